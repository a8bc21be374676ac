use log::debug;
use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::{euler_residuals, evaluate, residual_derivative, Evaluation};
use crate::error::{Error, Result};
use crate::geometry::{isosceles_state, total_energy, PotentialSpec, ShootingParams};
use crate::integrator::{integrate_to_collinear, IntegratorConfig};
use crate::orbit::{build_full_orbit, collision_report, DEFAULT_SAMPLES};

/// Default bound on the normalized residual norm.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Lower and upper ends of the LJ(12,6) energy range of figure-eight
/// solutions (Euler-line minimum of the potential, largest observed E).
const LJ_ENERGY_RANGE: (f64, f64) = (-5547.0 / 10924.0, 0.295542);

/// A converged figure-eight solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub params: ShootingParams,
    pub period: f64,
    pub t_f: f64,
    pub energy: f64,
    /// Collisional intervals of body 0 per period; absent for potentials
    /// without a finite minimum.
    pub n0: Option<u32>,
    /// Normalized `|(P, D)|`.
    pub residual_norm: f64,
    pub residual_raw_norm: f64,
    pub potential: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_label: Option<String>,
}

impl SolutionRecord {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.series_label = Some(label.into());
        self
    }

    /// Sanity flag: energy inside the range spanned by the known LJ(12,6)
    /// solutions. Always true for other potentials.
    pub fn energy_plausible(&self) -> bool {
        if !self.potential.is_lj_12_6() {
            return true;
        }
        let slack = 1e-3;
        (LJ_ENERGY_RANGE.0 - slack..=LJ_ENERGY_RANGE.1 + slack).contains(&self.energy)
    }
}

/// Outcome of the raw 2-D iteration, before orbit diagnostics.
#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub evaluation: Evaluation,
    pub iterations: usize,
    pub history: Vec<f64>,
}

fn at_iterate(params: ShootingParams) -> impl FnOnce(Error) -> Error {
    move |e| Error::AtIterate { params, source: Box::new(e) }
}

fn eval_at(x0: f64, z: Vector2<f64>, spec: &PotentialSpec, cfg: &IntegratorConfig) -> Result<Evaluation> {
    let params = ShootingParams { x0, y0: z[0], v: z[1] };
    evaluate(&params, spec, cfg).map_err(at_iterate(params))
}

/// Damped Newton iteration in `(y0, v)` at fixed `x0` on the normalized
/// residuals, with a central-difference Jacobian.
pub fn newton_iterate(
    seed: &ShootingParams,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonReport> {
    seed.validate()?;
    let x0 = seed.x0;
    let mut z = Vector2::new(seed.y0, seed.v);
    let mut cur = eval_at(x0, z, spec, cfg)?;
    let mut history = vec![cur.norm()];

    for iter in 0..max_iter {
        if cur.norm() <= tol {
            return Ok(NewtonReport { evaluation: cur, iterations: iter, history });
        }
        let f = Vector2::new(cur.p, cur.d);
        let mut jac = Matrix2::zeros();
        for k in 0..2 {
            let col = residual_derivative(&cur.params, k + 1, spec, cfg)?;
            jac.set_column(k, &Vector2::from(col));
        }
        let sv = jac.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin.is_finite() && smax.is_finite()) || smin <= 1e-13 * smax {
            return Err(Error::SingularJacobian { at: cur.params });
        }
        let step = jac.lu().solve(&(-f)).ok_or(Error::SingularJacobian { at: cur.params })?;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = z + step * lambda;
            if trial[0] > 0.0 && trial[1] > 0.0 {
                if let Ok(ev) = eval_at(x0, trial, spec, cfg) {
                    if ev.norm() < cur.norm() {
                        accepted = Some((trial, ev));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, ev)) = accepted else {
            return Err(Error::Divergence { best: cur.params, residual_norm: cur.norm(), iterations: iter + 1 });
        };
        debug!("newton iter {iter}: |F| {:.3e} -> {:.3e} (lambda {lambda})", cur.norm(), ev.norm());
        z = trial;
        cur = ev;
        history.push(cur.norm());
    }
    if cur.norm() <= tol {
        return Ok(NewtonReport { evaluation: cur, iterations: max_iter, history });
    }
    Err(Error::Divergence { best: cur.params, residual_norm: cur.norm(), iterations: max_iter })
}

/// Converges `seed` and wraps the result with period, energy and collision
/// count.
pub fn newton_solve(
    seed: &ShootingParams,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
    tol: f64,
    max_iter: usize,
) -> Result<SolutionRecord> {
    let report = newton_iterate(seed, spec, cfg, tol, max_iter)?;
    solution_record(&report.evaluation.params, spec, cfg)
}

/// Record for parameters already known to be a solution. The residual is
/// recomputed; nothing here checks it against a tolerance.
pub fn solution_record(params: &ShootingParams, spec: &PotentialSpec, cfg: &IntegratorConfig) -> Result<SolutionRecord> {
    let s0 = isosceles_state(params)?;
    let energy = total_energy(&s0, spec)?;
    let ev = integrate_to_collinear(&s0, spec, cfg)?;
    let (p, d, p_raw, d_raw) = euler_residuals(&ev.state_f);
    let n0 = match spec.r_min() {
        Some(_) => {
            let orbit = build_full_orbit(&ev.segment, ev.t_f, DEFAULT_SAMPLES, spec)?;
            Some(collision_report(&orbit, spec)?.n0)
        }
        None => None,
    };
    Ok(SolutionRecord {
        params: *params,
        period: 12.0 * ev.t_f,
        t_f: ev.t_f,
        energy,
        n0,
        residual_norm: p.hypot(d),
        residual_raw_norm: p_raw.hypot(d_raw),
        potential: *spec,
        series_label: None,
    })
}
