use log::trace;
use nalgebra::{Matrix2x3, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{PotentialSpec, ShootingParams};
use crate::integrator::IntegratorConfig;
use crate::shooting::{evaluate, residual_derivative, Evaluation};

/// The constraint `normal . (z / scale - origin) = offset`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Hyperplane {
    pub scale: ShootingParams,
    pub origin: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Hyperplane {
    fn scale(&self) -> Vector3<f64> {
        Vector3::new(self.scale.x0, self.scale.y0, self.scale.v)
    }

    pub fn point(&self, s: f64) -> ShootingParams {
        let z = (self.origin + self.normal * s).component_mul(&self.scale());
        ShootingParams { x0: z[0], y0: z[1], v: z[2] }
    }

    fn residual(&self, p: &ShootingParams) -> f64 {
        let u = Vector3::new(p.x0, p.y0, p.v).component_div(&self.scale());
        self.normal.dot(&(u - self.origin)) - self.offset
    }
}

fn to_vec(p: &ShootingParams) -> Vector3<f64> {
    Vector3::from(p.as_array())
}

fn from_vec(z: &Vector3<f64>) -> ShootingParams {
    ShootingParams { x0: z[0], y0: z[1], v: z[2] }
}

fn eval(p: &ShootingParams, spec: &PotentialSpec, cfg: &IntegratorConfig) -> Result<Evaluation> {
    p.validate()?;
    evaluate(p, spec, cfg).map_err(|e| Error::AtIterate { params: *p, source: Box::new(e) })
}

/// Central-difference Jacobian of the normalized `(P, D)` in `(x0, y0, v)`.
pub(crate) fn jacobian(
    params: &ShootingParams,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
) -> Result<Matrix2x3<f64>> {
    let mut jac = Matrix2x3::zeros();
    for k in 0..3 {
        jac.set_column(k, &Vector2::from(residual_derivative(params, k, spec, cfg)?));
    }
    Ok(jac)
}

/// Damped Newton on `{P = 0, D = 0, plane}` from `guess`. Returns the
/// converged evaluation and the iteration count.
pub(crate) fn correct(
    plane: &Hyperplane,
    guess: &ShootingParams,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
    tol: f64,
    max_iter: usize,
) -> Result<(Evaluation, usize)> {
    let g_norm = |ev: &Evaluation| ev.norm().hypot(plane.residual(&ev.params));
    let inv_scale = Vector3::new(1.0 / plane.scale.x0, 1.0 / plane.scale.y0, 1.0 / plane.scale.v);
    let plane_row = plane.normal.component_mul(&inv_scale).transpose();

    let mut z = to_vec(guess);
    let mut cur = eval(guess, spec, cfg)?;
    for iter in 0..max_iter {
        if cur.norm() <= tol && plane.residual(&cur.params).abs() <= 1e-12 {
            return Ok((cur, iter));
        }
        let jac = jacobian(&cur.params, spec, cfg)?;
        let mut m = Matrix3::zeros();
        m.fixed_view_mut::<2, 3>(0, 0).copy_from(&jac);
        m.set_row(2, &plane_row);
        let rhs = -Vector3::new(cur.p, cur.d, plane.residual(&cur.params));
        let step = m.lu().solve(&rhs).ok_or(Error::SingularJacobian { at: cur.params })?;

        let before = g_norm(&cur);
        let mut lambda = 1.0;
        let mut next = None;
        for _ in 0..12 {
            let trial = from_vec(&(z + step * lambda));
            if let Ok(ev) = eval(&trial, spec, cfg) {
                if g_norm(&ev) < before {
                    next = Some(ev);
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some(ev) = next else {
            return Err(Error::Divergence { best: cur.params, residual_norm: cur.norm(), iterations: iter + 1 });
        };
        trace!("corrector iter {iter}: |G| {before:.3e} -> {:.3e}", g_norm(&ev));
        z = to_vec(&ev.params);
        cur = ev;
    }
    if cur.norm() <= tol {
        return Ok((cur, max_iter));
    }
    Err(Error::Divergence { best: cur.params, residual_norm: cur.norm(), iterations: max_iter })
}
