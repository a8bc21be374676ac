//! Adaptive DOP853 integration of the three-body flow with dense output.

mod dop853;
mod event;
mod segment;
mod tableau;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PotentialSpec, ThreeBodyState, PHASE_DIM};
use dop853::{attempt, dense, rhs, Attempt, Phase};

pub(crate) use dop853::DenseStep;
pub use event::{collinearity, integrate_to_collinear, CollinearEvent};
pub(crate) use event::locate_collinear;
pub use segment::TrajectorySegment;
pub(crate) use segment::write_states_csv;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Abort horizon for event searches.
    pub t_max: f64,
    /// Any pair closer than this is a trajectory failure.
    pub min_distance: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-11,
            max_step: 0.1,
            t_max: 200.0,
            min_distance: 1e-3,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::Config(format!(
                "tolerances must be positive (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if !ok(self.max_step) || !ok(self.t_max) || !ok(self.min_distance) {
            return Err(Error::Config("max_step, t_max and min_distance must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }

    /// Same config with both tolerances multiplied by `factor`.
    pub fn scaled_tolerances(&self, factor: f64) -> Self {
        Self { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..*self }
    }
}

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;
const BETA: f64 = 0.04;

/// An accepted step before its interpolant is built.
pub(crate) struct Accepted {
    pub t0: f64,
    pub t1: f64,
    pub h: f64,
    pub y0: Phase,
    pub k1: Phase,
    attempt: Attempt,
    k_new: Phase,
}

impl Accepted {
    pub fn y1(&self) -> &Phase {
        &self.attempt.y_new
    }

    pub fn dense(&self, spec: &PotentialSpec) -> DenseStep {
        let mut d = dense(spec, self.t0, self.h, &self.y0, &self.attempt, &self.k_new);
        d.t1 = self.t1;
        d
    }
}

/// Step-size controlled driver. `h` carries the direction of integration.
pub(crate) struct Stepper<'a> {
    spec: &'a PotentialSpec,
    cfg: &'a IntegratorConfig,
    t: f64,
    y: Phase,
    k1: Phase,
    h: f64,
    facold: f64,
    steps: usize,
    rejected_last: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a PotentialSpec, cfg: &'a IntegratorConfig, state0: &ThreeBodyState, direction: f64) -> Result<Self> {
        cfg.validate()?;
        state0.validate()?;
        let y = state0.to_phase();
        check_distance(cfg, state0.t, &y)?;
        let k1 = rhs(spec, &y);
        if k1.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite accelerations at the initial state".into()));
        }
        let h = initial_step(spec, cfg, &y, &k1).copysign(direction);
        Ok(Self { spec, cfg, t: state0.t, y, k1, h, facold: 1e-4, steps: 0, rejected_last: false })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Takes one accepted step, never passing `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<Accepted> {
        let expo1 = 0.125 - BETA * 0.2;
        let dir = self.h.signum();
        loop {
            if self.steps >= self.cfg.max_steps {
                return Err(Error::StepBudget { t: self.t, max_steps: self.cfg.max_steps });
            }
            let mut h = self.h.abs().min(self.cfg.max_step).copysign(dir);
            let remaining = t_stop - self.t;
            let last = (self.t + 1.01 * h - t_stop) * dir >= 0.0;
            if last {
                h = remaining;
            }
            if h.abs() <= 10.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t: self.t, h });
            }
            self.steps += 1;
            let at = attempt(self.spec, &self.y, &self.k1, h, self.cfg.rel_tol, self.cfg.abs_tol);
            let err = at.err;
            let fac11 = err.powf(expo1);
            if err <= 1.0 {
                let fac = (fac11 / self.facold.powf(BETA) / SAFE).clamp(1.0 / FAC2, 1.0 / FAC1);
                let mut h_new = h / fac;
                self.facold = err.max(1e-4);
                let k_new = rhs(self.spec, &at.y_new);
                let t_new = if last { t_stop } else { self.t + h };
                let acc = Accepted { t0: self.t, t1: t_new, h, y0: self.y, k1: self.k1, attempt: at, k_new };
                check_distance(self.cfg, t_new, acc.y1())?;
                if self.rejected_last {
                    h_new = h_new.abs().min(h.abs()).copysign(dir);
                }
                self.rejected_last = false;
                self.t = t_new;
                self.y = *acc.y1();
                self.k1 = k_new;
                if !last || h_new.abs() > 0.0 {
                    self.h = h_new;
                }
                return Ok(acc);
            }
            let shrink = if err.is_finite() { (fac11 / SAFE).min(1.0 / FAC1) } else { 1.0 / FAC1 };
            self.h = h / shrink;
            self.rejected_last = true;
        }
    }
}

fn initial_step(spec: &PotentialSpec, cfg: &IntegratorConfig, y: &Phase, f0: &Phase) -> f64 {
    let sk = |v: f64| cfg.abs_tol + cfg.rel_tol * v.abs();
    let dnf: f64 = (0..PHASE_DIM).map(|i| (f0[i] / sk(y[i])).powi(2)).sum();
    let dny: f64 = (0..PHASE_DIM).map(|i| (y[i] / sk(y[i])).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    h = h.min(cfg.max_step);
    let mut y1 = *y;
    for i in 0..PHASE_DIM {
        y1[i] += h * f0[i];
    }
    let f1 = rhs(spec, &y1);
    let der2 = ((0..PHASE_DIM).map(|i| ((f1[i] - f0[i]) / sk(y[i])).powi(2)).sum::<f64>()).sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if !der12.is_finite() {
        h * 1e-3
    } else if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.125)
    };
    (100.0 * h).min(h1).min(cfg.max_step)
}

fn check_distance(cfg: &IntegratorConfig, t: f64, y: &Phase) -> Result<()> {
    let d = |i: usize, j: usize| (y[2 * i] - y[2 * j]).hypot(y[2 * i + 1] - y[2 * j + 1]);
    let min = d(0, 1).min(d(0, 2)).min(d(1, 2));
    if !(min >= cfg.min_distance) {
        return Err(Error::Trajectory { t, distance: min });
    }
    Ok(())
}

/// Integrates from `state0` to `state0.t + duration`. A negative duration
/// integrates backwards in time.
pub fn integrate(
    state0: &ThreeBodyState,
    spec: &PotentialSpec,
    duration: f64,
    cfg: &IntegratorConfig,
) -> Result<TrajectorySegment> {
    if !duration.is_finite() || duration == 0.0 {
        return Err(Error::Domain(format!("integration length must be finite and nonzero, got {duration}")));
    }
    let mut stepper = Stepper::new(spec, cfg, state0, duration.signum())?;
    let t_end = state0.t + duration;
    let mut steps = Vec::new();
    while stepper.t() != t_end {
        let acc = stepper.step(t_end)?;
        steps.push(acc.dense(spec));
    }
    Ok(TrajectorySegment::from_steps(steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        angular_momentum, isosceles_state, linear_momentum, total_energy, ShootingParams, Vec2,
    };

    fn lj() -> PotentialSpec {
        PotentialSpec::lennard_jones_12_6()
    }

    fn alpha() -> ThreeBodyState {
        isosceles_state(&ShootingParams::new(0.75, 0.725966, 0.522742).unwrap()).unwrap()
    }

    #[test]
    fn equilibrium_is_stationary() {
        let s = 2f64.powf(1.0 / 6.0);
        let r = s / 3f64.sqrt();
        let q = [0.0, 1.0, 2.0].map(|k: f64| {
            let a = k * 2.0 * std::f64::consts::PI / 3.0;
            Vec2::new(r * a.cos(), r * a.sin())
        });
        let st = ThreeBodyState::new(0.0, q, [Vec2::ZERO; 3]).unwrap();
        let seg = integrate(&st, &lj(), 1.0, &IntegratorConfig::default()).unwrap();
        let end = seg.final_state();
        for i in 0..3 {
            assert!((end.q[i] - q[i]).norm() < 1e-12);
            assert!(end.p[i].norm() < 1e-12);
        }
    }

    #[test]
    fn conserves_momenta_and_energy() {
        let st = alpha();
        let spec = lj();
        let seg = integrate(&st, &spec, 15.0, &IntegratorConfig::default()).unwrap();
        let e0 = total_energy(&st, &spec).unwrap();
        for s in seg.sample_uniform(301).unwrap() {
            assert!(angular_momentum(&s).abs() < 1e-9);
            assert!(linear_momentum(&s).norm() < 1e-9);
            let e = total_energy(&s, &spec).unwrap();
            assert!((e - e0).abs() <= 1e-9 * (1.0 + e0.abs()), "drift {}", e - e0);
        }
    }

    #[test]
    fn dense_output_matches_stored_endpoints_and_restarts() {
        let st = alpha();
        let cfg = IntegratorConfig::default();
        let seg = integrate(&st, &lj(), 3.0, &cfg).unwrap();
        for w in seg.steps().windows(2) {
            assert_eq!(w[0].t1, w[1].t0);
            assert_eq!(w[0].eval_fraction(1.0), w[1].eval_fraction(0.0));
        }
        // Interpolated midpoint vs. an exact integration to that time.
        let t = 1.2345;
        let mid = seg.state_at(t).unwrap();
        let direct = integrate(&st, &lj(), t, &cfg).unwrap().final_state();
        for i in 0..3 {
            assert!((mid.q[i] - direct.q[i]).norm() < 1e-9);
            assert!((mid.p[i] - direct.p[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn backward_integration_recovers_start() {
        let st = alpha();
        let cfg = IntegratorConfig::default();
        let fwd = integrate(&st, &lj(), 4.0, &cfg).unwrap().final_state();
        let back = integrate(&fwd, &lj(), -4.0, &cfg).unwrap().final_state();
        assert!(back.t.abs() < 1e-15);
        for i in 0..3 {
            assert!((back.q[i] - st.q[i]).norm() < 1e-9);
            assert!((back.p[i] - st.p[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn global_error_tracks_tolerance() {
        let st = alpha();
        let free = IntegratorConfig { max_step: 10.0, ..Default::default() };
        let run = |f: f64| integrate(&st, &lj(), 5.0, &free.scaled_tolerances(f)).unwrap();
        let reference = run(1e-3).final_state();
        let err = |f: f64| {
            let s = run(f).final_state();
            (0..3).map(|i| (s.q[i] - reference.q[i]).norm()).fold(0.0, f64::max)
        };
        let (e_loose, e_mid, e_tight) = (err(1e5), err(1e2), err(1.0));
        assert!(e_tight < e_mid && e_mid < e_loose, "{e_tight:e} {e_mid:e} {e_loose:e}");
        assert!(e_tight < 1e-9);
        assert!(run(1e5).n_steps() < run(1.0).n_steps());
    }

    #[test]
    fn near_collision_is_reported() {
        let q = [Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0), Vec2::new(0.0, 3.0)];
        let p = [Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::ZERO];
        let st = ThreeBodyState::new(0.0, q, p).unwrap();
        let cfg = IntegratorConfig { min_distance: 0.2, ..Default::default() };
        let err = integrate(&st, &PotentialSpec::homogeneous(1.0).unwrap(), 5.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Trajectory { .. }), "{err}");
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(matches!(integrate(&alpha(), &lj(), 1.0, &cfg), Err(Error::Config(_))));
        assert!(integrate(&alpha(), &lj(), 0.0, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn step_budget_enforced() {
        let cfg = IntegratorConfig { max_steps: 5, ..Default::default() };
        assert!(matches!(integrate(&alpha(), &lj(), 5.0, &cfg), Err(Error::StepBudget { .. })));
    }
}
