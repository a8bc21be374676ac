//! Euler-configuration residuals at the first collinear event, seed
//! detection on `(y0, v)` grids and the 2-D Newton solver.

mod grid;
mod newton;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{isosceles_state, total_energy, PotentialSpec, ShootingParams, ThreeBodyState};
use crate::integrator::{locate_collinear, IntegratorConfig};

pub use grid::{find_seed_cells, find_seeds, scan_grid, ContourGrid, SeedCell, SeedScan};
pub use newton::{newton_iterate, newton_solve, solution_record, NewtonReport, SolutionRecord, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualStatus {
    Ok,
    TrajectoryFailure,
    EventNotFound,
}

impl ResidualStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResidualStatus::Ok => "ok",
            ResidualStatus::TrajectoryFailure => "trajectory_failure",
            ResidualStatus::EventNotFound => "event_not_found",
        }
    }
}

/// Residuals of one shooting evaluation. `p` and `d` are normalized; the raw
/// values are kept alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub params: ShootingParams,
    pub p: Option<f64>,
    pub d: Option<f64>,
    pub p_raw: Option<f64>,
    pub d_raw: Option<f64>,
    /// Total energy of the initial state.
    pub e: f64,
    pub t_f: Option<f64>,
    pub status: ResidualStatus,
}

impl ResidualSample {
    pub fn is_ok(&self) -> bool {
        self.status == ResidualStatus::Ok
    }

    /// `|(P, D)|` on the normalized residuals.
    pub fn norm(&self) -> Option<f64> {
        Some(self.p?.hypot(self.d?))
    }

    pub fn raw_norm(&self) -> Option<f64> {
        Some(self.p_raw?.hypot(self.d_raw?))
    }
}

/// Terminal data of a successful shooting evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub params: ShootingParams,
    pub p: f64,
    pub d: f64,
    pub p_raw: f64,
    pub d_raw: f64,
    pub e: f64,
    pub t_f: f64,
    pub state_f: ThreeBodyState,
}

impl Evaluation {
    pub fn norm(&self) -> f64 {
        self.p.hypot(self.d)
    }

    pub fn raw_norm(&self) -> f64 {
        self.p_raw.hypot(self.d_raw)
    }

    pub fn period(&self) -> f64 {
        12.0 * self.t_f
    }
}

/// `P = p2 x p1` and `D = |q1 - q0|^2 - |q2 - q0|^2` of a terminal state,
/// raw and normalized.
pub fn euler_residuals(state: &ThreeBodyState) -> (f64, f64, f64, f64) {
    let [q0, q1, q2] = state.q;
    let [_, p1, p2] = state.p;
    let p_raw = p2.cross(p1);
    let d1 = (q1 - q0).norm_sq();
    let d2 = (q2 - q0).norm_sq();
    let d_raw = d1 - d2;
    let p_scale = p1.norm() * p2.norm();
    let p = if p_scale > 0.0 { p_raw / p_scale } else { p_raw };
    (p, d_raw / d1.max(d2), p_raw, d_raw)
}

/// Integrates from the isosceles start to the first collinear event.
pub fn evaluate(params: &ShootingParams, spec: &PotentialSpec, cfg: &IntegratorConfig) -> Result<Evaluation> {
    let s0 = isosceles_state(params)?;
    let e = total_energy(&s0, spec)?;
    let (ev, _) = locate_collinear(&s0, spec, cfg, false)?;
    let (p, d, p_raw, d_raw) = euler_residuals(&ev.state_f);
    Ok(Evaluation { params: *params, p, d, p_raw, d_raw, e, t_f: ev.t_f, state_f: ev.state_f })
}

/// Central-difference derivative of the normalized `(P, D)` with respect to
/// coordinate `k` of `(x0, y0, v)`.
pub(crate) fn residual_derivative(
    params: &ShootingParams,
    k: usize,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
) -> Result<[f64; 2]> {
    let z = params.as_array();
    let h = (1e-8 * z[k].abs()).max(1e-10);
    let at = |sign: f64| {
        let mut zk = z;
        zk[k] += sign * h;
        let p = ShootingParams::from_array(zk);
        evaluate(&p, spec, cfg).map_err(|e| Error::AtIterate { params: p, source: Box::new(e) })
    };
    let (plus, minus) = (at(1.0)?, at(-1.0)?);
    Ok([(plus.p - minus.p) / (2.0 * h), (plus.d - minus.d) / (2.0 * h)])
}

/// Residual sample with integrator failures folded into the status.
pub fn residuals(params: &ShootingParams, spec: &PotentialSpec, cfg: &IntegratorConfig) -> Result<ResidualSample> {
    let s0 = isosceles_state(params)?;
    let e = total_energy(&s0, spec)?;
    let failed = |status| ResidualSample {
        params: *params,
        p: None,
        d: None,
        p_raw: None,
        d_raw: None,
        e,
        t_f: None,
        status,
    };
    match evaluate(params, spec, cfg) {
        Ok(ev) => Ok(ResidualSample {
            params: *params,
            p: Some(ev.p),
            d: Some(ev.d),
            p_raw: Some(ev.p_raw),
            d_raw: Some(ev.d_raw),
            e,
            t_f: Some(ev.t_f),
            status: ResidualStatus::Ok,
        }),
        Err(Error::EventNotFound { .. }) => Ok(failed(ResidualStatus::EventNotFound)),
        Err(err) if err.is_integration_failure() => Ok(failed(ResidualStatus::TrajectoryFailure)),
        Err(err) => Err(err),
    }
}
