//! Full-period orbits assembled from the `[0, t_f]` segment, and their
//! diagnostics: choreography residual, collisional intervals, curvature and
//! configuration-energy extrema.

mod collision;
mod diagnostics;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{isosceles_state, PotentialSpec, ShootingParams, ThreeBodyState, Vec2};
use crate::integrator::{integrate, integrate_to_collinear, IntegratorConfig, TrajectorySegment};
use crate::shooting::SolutionRecord;

pub use collision::{collision_report, CollisionInterval, CollisionReport};
pub use diagnostics::{
    configuration_energy_extrema, curvature_profile, orbit_summary, EnergyExtrema, OrbitSummary, PairExtent,
};

/// Samples per period used unless a caller asks otherwise.
pub const DEFAULT_SAMPLES: usize = 2400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Twelve images of the `[0, t_f]` segment.
    Symmetry,
    /// One integration over the whole period.
    Direct,
}

#[derive(Debug, Clone)]
pub struct FullOrbit {
    pub period: f64,
    pub t_f: f64,
    pub construction: Construction,
    /// Uniform samples on `[0, T)`; the count is a multiple of 12.
    pub samples: Vec<ThreeBodyState>,
    /// Largest mismatch of positions or velocities where consecutive pieces
    /// meet (symmetry orbits, including the wrap at `T`), or the closure gap
    /// `|y(T) - y(0)|` of a direct orbit.
    pub junction_gap: f64,
    pub potential: PotentialSpec,
    pub source: Option<SolutionRecord>,
    base: TrajectorySegment,
}

fn state_gap(a: &ThreeBodyState, b: &ThreeBodyState) -> f64 {
    (0..3).map(|i| (a.q[i] - b.q[i]).norm().max((a.p[i] - b.p[i]).norm())).fold(0.0, f64::max)
}

fn check_samples(n: usize) -> Result<()> {
    if n == 0 || n % 12 != 0 {
        return Err(Error::Config(format!("orbit sample count must be a positive multiple of 12, got {n}")));
    }
    Ok(())
}

/// Body `j`'s position and velocity on piece `r` of a twelfth, at offset
/// `tau` into it, from states on the base segment.
fn piece(r: usize, j: usize, fwd: &ThreeBodyState, rev: &ThreeBodyState) -> (Vec2, Vec2) {
    match r {
        0 => (fwd.q[j], fwd.p[j]),
        1 => {
            let k = (2 * j) % 3;
            (-rev.q[k], rev.p[k])
        }
        2 => {
            let k = (j + 2) % 3;
            (fwd.q[k].reflect_x(), fwd.p[k].reflect_x())
        }
        _ => {
            let k = (2 * j + 1) % 3;
            (rev.q[k].reflect_y(), rev.p[k].reflect_x())
        }
    }
}

impl FullOrbit {
    /// Continuous state at any `t`, taken modulo the period.
    pub fn state_at(&self, t: f64) -> Result<ThreeBodyState> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("orbit time must be finite, got {t}")));
        }
        let tt = t.rem_euclid(self.period);
        match self.construction {
            Construction::Direct => {
                let s = self.base.state_at(tt.min(self.base.t_end()))?;
                Ok(ThreeBodyState { t, ..s })
            }
            Construction::Symmetry => {
                let t0 = self.t_f;
                let k = ((tt / t0).floor() as usize).min(11);
                let tau = (tt - k as f64 * t0).clamp(0.0, t0);
                Ok(self.assemble(t, k, tau)?)
            }
        }
    }

    fn assemble(&self, t: f64, k: usize, tau: f64) -> Result<ThreeBodyState> {
        let t0 = self.t_f;
        let fwd = self.base.state_at(tau)?;
        let rev = self.base.state_at((t0 - tau).max(0.0))?;
        let (m, r) = (k / 4, k % 4);
        let mut q = [Vec2::ZERO; 3];
        let mut p = [Vec2::ZERO; 3];
        for i in 0..3 {
            (q[i], p[i]) = piece(r, (i + m) % 3, &fwd, &rev);
        }
        Ok(ThreeBodyState { t, q, p })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn dt(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    /// Initial shooting parameters read off the orbit at `t = 0`.
    pub fn shooting_params(&self) -> ShootingParams {
        let s = &self.samples[0];
        ShootingParams { x0: s.q[0].x, y0: s.q[0].y, v: s.p[0].norm() }
    }

    /// CSV with columns `t, x0 .. y2, vx0 .. vy2`, one row per sample.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        crate::integrator::write_states_csv(writer, &self.samples)
    }
}

/// Assembles the period `12 t_f` from a segment on `[0, t_f]` that ends at the
/// collinear event.
pub fn build_full_orbit(
    segment: &TrajectorySegment,
    t_f: f64,
    n_samples: usize,
    spec: &PotentialSpec,
) -> Result<FullOrbit> {
    check_samples(n_samples)?;
    if segment.t_start() != 0.0 {
        return Err(Error::Consistency(format!("segment starts at {} instead of 0", segment.t_start())));
    }
    if !(t_f > 0.0) || (segment.t_end() - t_f).abs() > 1e-12 * t_f.max(1.0) {
        return Err(Error::Consistency(format!(
            "segment ends at {} but the event time is {t_f}",
            segment.t_end()
        )));
    }
    let mut orbit = FullOrbit {
        period: 12.0 * t_f,
        t_f,
        construction: Construction::Symmetry,
        samples: Vec::new(),
        junction_gap: 0.0,
        potential: *spec,
        source: None,
        base: segment.clone(),
    };
    let mut gap = 0.0f64;
    for k in 0..12 {
        let end = orbit.assemble(0.0, k, t_f)?;
        let next = orbit.assemble(0.0, (k + 1) % 12, 0.0)?;
        gap = gap.max(state_gap(&end, &next));
    }
    orbit.junction_gap = gap;
    let dt = orbit.period / n_samples as f64;
    orbit.samples = (0..n_samples).map(|k| orbit.state_at(k as f64 * dt)).collect::<Result<_>>()?;
    Ok(orbit)
}

/// Integrates the full period directly from the isosceles start, with the
/// period taken from the first collinear event.
pub fn direct_full_orbit(
    params: &ShootingParams,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
    n_samples: usize,
) -> Result<FullOrbit> {
    check_samples(n_samples)?;
    let s0 = isosceles_state(params)?;
    let ev = integrate_to_collinear(&s0, spec, cfg)?;
    let period = 12.0 * ev.t_f;
    let seg = integrate(&s0, spec, period, cfg)?;
    let dt = period / n_samples as f64;
    let samples = (0..n_samples).map(|k| seg.state_at(k as f64 * dt)).collect::<Result<_>>()?;
    Ok(FullOrbit {
        period,
        t_f: ev.t_f,
        construction: Construction::Direct,
        samples,
        junction_gap: state_gap(&seg.final_state(), &s0),
        potential: *spec,
        source: None,
        base: seg,
    })
}

/// Symmetry-assembled orbit of a record, with the record attached.
pub fn orbit_from_record(record: &SolutionRecord, cfg: &IntegratorConfig, n_samples: usize) -> Result<FullOrbit> {
    let s0 = isosceles_state(&record.params)?;
    let ev = integrate_to_collinear(&s0, &record.potential, cfg)?;
    let mut orbit = build_full_orbit(&ev.segment, ev.t_f, n_samples, &record.potential)?;
    orbit.source = Some(record.clone());
    Ok(orbit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoreographyCheck {
    /// `max(sample_residual, junction_gap)`.
    pub max_residual: f64,
    /// Sup over samples and bodies of `|q_{i+1}(t) - q_i(t + T/3)|`.
    pub sample_residual: f64,
    pub junction_gap: f64,
    pub within_tol: bool,
}

/// Checks `q_{i+1}(t) = q_i(t + T/3)` on the samples. For symmetry-built
/// orbits the relation holds by construction on the pieces, so the junction
/// mismatch is folded in.
pub fn verify_choreography(orbit: &FullOrbit, tol: f64) -> ChoreographyCheck {
    let n = orbit.samples.len();
    let shift = n / 3;
    let mut worst = 0.0f64;
    for k in 0..n {
        let now = &orbit.samples[k];
        let later = &orbit.samples[(k + shift) % n];
        for i in 0..3 {
            worst = worst.max((now.q[(i + 1) % 3] - later.q[i]).norm());
        }
    }
    let max_residual = worst.max(orbit.junction_gap);
    ChoreographyCheck {
        max_residual,
        sample_residual: worst,
        junction_gap: orbit.junction_gap,
        within_tol: max_residual <= tol,
    }
}

/// Sup-norm distance between two orbits over their common sample grid.
pub fn orbit_distance(a: &FullOrbit, b: &FullOrbit) -> Result<f64> {
    if a.samples.len() != b.samples.len() {
        return Err(Error::Consistency("orbits have different sample counts".into()));
    }
    Ok(a.samples.iter().zip(&b.samples).map(|(x, y)| state_gap(x, y)).fold(0.0, f64::max))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::shooting::newton_iterate;

    pub(crate) fn converged(x0: f64, y0: f64, v: f64, spec: &PotentialSpec) -> ShootingParams {
        newton_iterate(&ShootingParams::new(x0, y0, v).unwrap(), spec, &IntegratorConfig::default(), 1e-11, 30)
            .unwrap()
            .evaluation
            .params
    }

    fn symmetric(params: &ShootingParams, spec: &PotentialSpec, n: usize) -> FullOrbit {
        let cfg = IntegratorConfig::default();
        let ev = integrate_to_collinear(&isosceles_state(params).unwrap(), spec, &cfg).unwrap();
        build_full_orbit(&ev.segment, ev.t_f, n, spec).unwrap()
    }

    #[test]
    fn alpha_orbit_passes_origin_and_is_mirror_symmetric() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let params = converged(0.75, 0.725966, 0.522742, &spec);
        let orbit = symmetric(&params, &spec, 1200);
        assert!(orbit.junction_gap < 1e-8, "gap {}", orbit.junction_gap);
        let at_tf = orbit.state_at(orbit.t_f).unwrap();
        assert!(at_tf.q[0].norm() < 1e-8);
        // Reflections of body 0's path are on the path.
        let path: Vec<Vec2> = orbit.samples.iter().map(|s| s.q[0]).collect();
        let near = |p: Vec2| path.iter().map(|q| (*q - p).norm()).fold(f64::INFINITY, f64::min);
        let spacing = orbit.dt() * orbit.samples.iter().map(|s| s.p[0].norm()).fold(0.0, f64::max);
        for s in orbit.samples.iter().step_by(7) {
            assert!(near(s.q[0].reflect_x()) <= spacing);
            assert!(near(s.q[0].reflect_y()) <= spacing);
        }
        let check = verify_choreography(&orbit, 1e-6);
        assert!(check.within_tol, "{check:?}");
    }

    #[test]
    fn two_twelfths_is_reflected_isosceles() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let params = converged(0.75, 0.725966, 0.522742, &spec);
        let orbit = symmetric(&params, &spec, 120);
        let s0 = orbit.state_at(0.0).unwrap();
        let s2 = orbit.state_at(2.0 * orbit.t_f).unwrap();
        for i in 0..3 {
            assert!((s2.q[i] - s0.q[(i + 2) % 3].reflect_x()).norm() < 1e-8);
        }
        // Isosceles: one body on the x axis, the other two mirror images in x.
        let on_axis = s2.q.iter().filter(|q| q.y.abs() < 1e-8).count();
        assert_eq!(on_axis, 1);
    }

    #[test]
    fn direct_integration_overlaps_symmetric_assembly() {
        // Lower branch of alpha: mildly unstable, so a full-period integration stays close.
        let spec = PotentialSpec::lennard_jones_12_6();
        let params = converged(0.75, 0.553223, 0.615805, &spec);
        let sym = symmetric(&params, &spec, 600);
        let direct = direct_full_orbit(&params, &spec, &IntegratorConfig::default(), 600).unwrap();
        let d = orbit_distance(&sym, &direct).unwrap();
        assert!(d < 1e-6, "sup distance {d}");
        assert!(verify_choreography(&direct, 1e-6).within_tol);
    }

    #[test]
    fn non_solution_fails_choreography() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let bad = ShootingParams::new(0.75, 0.74, 0.522742).unwrap();
        let sym = symmetric(&bad, &spec, 120);
        assert!(!verify_choreography(&sym, 1e-6).within_tol);
        let direct = direct_full_orbit(&bad, &spec, &IntegratorConfig::default(), 120).unwrap();
        assert!(!verify_choreography(&direct, 1e-6).within_tol);
    }

    #[test]
    fn shift_direction_is_immaterial() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let orbit = symmetric(&converged(0.75, 0.725966, 0.522742, &spec), &spec, 240);
        let n = orbit.samples.len();
        let back = (0..n)
            .flat_map(|k| {
                let now = &orbit.samples[k];
                let earlier = &orbit.samples[(k + n - n / 3) % n];
                (0..3).map(move |i| (now.q[i] - earlier.q[(i + 1) % 3]).norm())
            })
            .fold(0.0, f64::max);
        assert!((back - verify_choreography(&orbit, 1.0).sample_residual).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sample_counts_and_mismatched_segments() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let cfg = IntegratorConfig::default();
        let ev = integrate_to_collinear(
            &isosceles_state(&ShootingParams::new(0.75, 0.725966, 0.522742).unwrap()).unwrap(),
            &spec,
            &cfg,
        )
        .unwrap();
        assert!(build_full_orbit(&ev.segment, ev.t_f, 100, &spec).is_err());
        assert!(matches!(
            build_full_orbit(&ev.segment, ev.t_f * 0.9, 120, &spec),
            Err(Error::Consistency(_))
        ));
    }
}
