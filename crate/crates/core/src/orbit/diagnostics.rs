use serde::{Deserialize, Serialize};

use super::{collision_report, verify_choreography, FullOrbit};
use crate::error::{Error, Result};
use crate::geometry::{accelerations, total_energy, PotentialSpec};

/// Curvature `|v x a| / |v|^3` of body 0's path at every sample; `None`
/// where the speed vanishes.
pub fn curvature_profile(orbit: &FullOrbit) -> Result<Vec<(f64, Option<f64>)>> {
    orbit
        .samples
        .iter()
        .map(|s| {
            let a = accelerations(s, &orbit.potential)?[0];
            let v = s.p[0];
            let speed = v.norm();
            let kappa = (speed > 1e-12).then(|| v.cross(a).abs() / speed.powi(3));
            Ok((s.t, kappa))
        })
        .collect()
}

/// Lowest potential energies of the isosceles and Euler configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyExtrema {
    pub isosceles_min: f64,
    /// `(x0, y0)` of the minimizing isosceles configuration.
    pub isosceles_at: (f64, f64),
    pub euler_min: f64,
    /// Spacing of the minimizing Euler configuration.
    pub euler_r: f64,
}

/// Closed-form minima for LJ(12,6). The isosceles minimum is the
/// equilateral triangle with side `2^(1/6)`; on the Euler line
/// `2u(r) + u(2r)` is quadratic in `r^-6`.
pub fn configuration_energy_extrema(spec: &PotentialSpec) -> Result<EnergyExtrema> {
    if !spec.is_lj_12_6() {
        return Err(Error::Unsupported(format!(
            "closed-form configuration minima are only known for LJ(12,6), not {}",
            spec.label()
        )));
    }
    let y0 = 2f64.powf(-5.0 / 6.0);
    let x0 = y0 / 3f64.sqrt();
    // 2u(r) + u(2r) = A w^2 - B w with w = r^-6.
    let a = 2.0 + 2f64.powi(-12);
    let b = 2.0 + 2f64.powi(-6);
    let euler_min = -b * b / (4.0 * a);
    let euler_r = (2.0 * a / b).powf(1.0 / 6.0);
    Ok(EnergyExtrema { isosceles_min: -0.75, isosceles_at: (x0, y0), euler_min, euler_r })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairExtent {
    pub i: usize,
    pub j: usize,
    pub min: f64,
    pub max: f64,
}

/// Compact description of an orbit for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub period: f64,
    pub energy: f64,
    /// Largest `|E(t) - E(0)|` over the samples.
    pub energy_spread: f64,
    pub n0: Option<u32>,
    pub n_ij: Option<[[u32; 3]; 3]>,
    pub simultaneous_collisions: usize,
    pub pair_distances: Vec<PairExtent>,
    /// Local maxima of body 0's curvature, largest first, at most ten.
    pub curvature_maxima: Vec<(f64, f64)>,
    pub choreography_residual: f64,
    pub max_x: f64,
}

pub fn orbit_summary(orbit: &FullOrbit) -> Result<OrbitSummary> {
    let spec = &orbit.potential;
    let energies = orbit.samples.iter().map(|s| total_energy(s, spec)).collect::<Result<Vec<_>>>()?;
    let e0 = energies[0];
    let energy_spread = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    let (n0, n_ij, simultaneous) = match spec.r_min() {
        Some(_) => {
            let rep = collision_report(orbit, spec)?;
            (Some(rep.n0), Some(rep.n_ij), rep.simultaneous.len())
        }
        None => (None, None, 0),
    };
    let pair_distances = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(i, j)| {
            let d = orbit.samples.iter().map(|s| s.distance(i, j));
            let (min, max) = d.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
            PairExtent { i, j, min, max }
        })
        .collect();

    let kappa = curvature_profile(orbit)?;
    let n = kappa.len();
    let mut maxima: Vec<(f64, f64)> = (0..n)
        .filter_map(|k| {
            let c = kappa[k].1?;
            let prev = kappa[(k + n - 1) % n].1.unwrap_or(0.0);
            let next = kappa[(k + 1) % n].1.unwrap_or(0.0);
            (c >= prev && c > next).then_some((kappa[k].0, c))
        })
        .collect();
    maxima.sort_by(|a, b| b.1.total_cmp(&a.1));
    maxima.truncate(10);

    let max_x = orbit.samples.iter().flat_map(|s| s.q.iter().map(|q| q.x)).fold(f64::NEG_INFINITY, f64::max);
    Ok(OrbitSummary {
        period: orbit.period,
        energy: e0,
        energy_spread,
        n0,
        n_ij,
        simultaneous_collisions: simultaneous,
        pair_distances,
        curvature_maxima: maxima,
        choreography_residual: verify_choreography(orbit, f64::INFINITY).max_residual,
        max_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ThreeBodyState, Vec2};
    use crate::integrator::{integrate_to_collinear, IntegratorConfig};
    use crate::numeric::golden_section_min;
    use crate::orbit::{build_full_orbit, tests::converged, Construction, DEFAULT_SAMPLES};

    #[test]
    fn euler_minimum_closed_form_matches_oracle() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let ex = configuration_energy_extrema(&spec).unwrap();
        assert_eq!(ex.isosceles_min, -0.75);
        assert!((ex.euler_min - (-5547.0 / 10924.0)).abs() < 1e-15);
        assert!((ex.euler_r - (2731.0f64 / 1376.0).powf(1.0 / 6.0)).abs() < 1e-14);
        assert!((ex.euler_r - 1.121).abs() < 5e-4);
        let u = |r: f64| spec.energy(r);
        let (r, e) = golden_section_min(|r| Ok::<_, ()>(2.0 * u(r) + u(2.0 * r)), 0.9, 1.5, 1e-12, 500).unwrap();
        assert!((e - ex.euler_min).abs() < 1e-9);
        assert!((r - ex.euler_r).abs() < 1e-5);
        // The equilateral configuration at the stated (x0, y0) has pair distances 2^(1/6).
        let (x0, y0) = ex.isosceles_at;
        let q = [Vec2::new(x0, y0), Vec2::new(-2.0 * x0, 0.0), Vec2::new(x0, -y0)];
        let s = ThreeBodyState::new(0.0, q, [Vec2::ZERO; 3]).unwrap();
        assert!((s.potential_energy(&spec) + 0.75).abs() < 1e-14);
    }

    #[test]
    fn extrema_unsupported_elsewhere() {
        assert!(configuration_energy_extrema(&PotentialSpec::homogeneous(6.0).unwrap()).is_err());
    }

    #[test]
    fn rotating_lagrange_triangle_has_curvature_one_over_radius() {
        // Equilateral triangle on a circle of radius R rotating rigidly under
        // the homogeneous a=2 potential: each body feels a central pull.
        let spec = PotentialSpec::homogeneous(2.0).unwrap();
        let radius = 1.3;
        let side = radius * 3f64.sqrt();
        // Net inward force magnitude a * side^-(a+1) * 2 cos 30 degrees = omega^2 R.
        let f = 2.0 * side.powi(-3) * 2.0 * (std::f64::consts::PI / 6.0).cos();
        let omega = (f / radius).sqrt();
        let q = [0.0, 1.0, 2.0].map(|k: f64| {
            let a = k * 2.0 * std::f64::consts::PI / 3.0;
            Vec2::new(radius * a.cos(), radius * a.sin())
        });
        let p = q.map(|v| Vec2::new(-v.y, v.x) * omega);
        let s0 = ThreeBodyState::new(0.0, q, p).unwrap();
        let seg = crate::integrator::integrate(&s0, &spec, 2.0, &IntegratorConfig::default()).unwrap();
        let samples = seg.sample_uniform(25).unwrap();
        for s in &samples {
            let a = accelerations(s, &spec).unwrap()[0];
            let v = s.p[0];
            let kappa = v.cross(a).abs() / v.norm().powi(3);
            assert!((kappa - 1.0 / radius).abs() < 1e-9, "{kappa}");
        }
    }

    #[test]
    fn alpha_summary_is_consistent() {
        let spec = PotentialSpec::lennard_jones_12_6();
        let params = converged(0.75, 0.725966, 0.522742, &spec);
        let cfg = IntegratorConfig::default();
        let ev = integrate_to_collinear(&crate::geometry::isosceles_state(&params).unwrap(), &spec, &cfg).unwrap();
        let orbit = build_full_orbit(&ev.segment, ev.t_f, DEFAULT_SAMPLES, &spec).unwrap();
        assert_eq!(orbit.construction, Construction::Symmetry);
        let sum = orbit_summary(&orbit).unwrap();
        assert!(sum.energy_spread <= 1e-8 * (1.0 + sum.energy.abs()), "{}", sum.energy_spread);
        assert!((sum.max_x - 2.0 * params.x0).abs() < 1e-6);
        assert!(sum.choreography_residual < 1e-6);
        assert!(sum.curvature_maxima.len() >= 2);
        let profile = curvature_profile(&orbit).unwrap();
        assert_eq!(profile.len(), DEFAULT_SAMPLES);
        assert!(profile.iter().all(|(_, k)| k.is_some()));
    }
}
