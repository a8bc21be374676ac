use serde::{Deserialize, Serialize};

use super::{PotentialSpec, Vec2};
use crate::error::{Error, Result};

/// Dimension of the flattened phase-space vector.
pub const PHASE_DIM: usize = 12;

/// Positions and velocities of three unit-mass bodies at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeBodyState {
    pub t: f64,
    pub q: [Vec2; 3],
    pub p: [Vec2; 3],
}

/// Initial-condition parameters of the isosceles start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingParams {
    pub x0: f64,
    pub y0: f64,
    pub v: f64,
}

impl ShootingParams {
    pub fn new(x0: f64, y0: f64, v: f64) -> Result<Self> {
        let params = ShootingParams { x0, y0, v };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("x0", self.x0), ("y0", self.y0), ("v", self.v)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!("shooting parameter {name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x0, self.y0, self.v]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        ShootingParams { x0: a[0], y0: a[1], v: a[2] }
    }
}

impl ThreeBodyState {
    pub fn new(t: f64, q: [Vec2; 3], p: [Vec2; 3]) -> Result<Self> {
        let state = ThreeBodyState { t, q, p };
        state.validate()?;
        Ok(state)
    }

    /// Finite components and strictly positive pair distances.
    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() || self.q.iter().chain(self.p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("state has non-finite components".into()));
        }
        let d = self.min_pair_distance();
        if d <= 0.0 {
            return Err(Error::Domain("coincident bodies".into()));
        }
        Ok(())
    }

    pub fn to_phase(&self) -> [f64; PHASE_DIM] {
        let mut y = [0.0; PHASE_DIM];
        for i in 0..3 {
            y[2 * i] = self.q[i].x;
            y[2 * i + 1] = self.q[i].y;
            y[6 + 2 * i] = self.p[i].x;
            y[6 + 2 * i + 1] = self.p[i].y;
        }
        y
    }

    pub fn from_phase(t: f64, y: &[f64; PHASE_DIM]) -> Self {
        let q = [Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3]), Vec2::new(y[4], y[5])];
        let p = [Vec2::new(y[6], y[7]), Vec2::new(y[8], y[9]), Vec2::new(y[10], y[11])];
        ThreeBodyState { t, q, p }
    }

    /// `r_ij = |q_i - q_j|`.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.q[i] - self.q[j]).norm()
    }

    pub fn min_pair_distance(&self) -> f64 {
        self.distance(0, 1).min(self.distance(0, 2)).min(self.distance(1, 2))
    }

    /// `(q1 - q0) × (q2 - q0)`; zero exactly when the bodies are collinear.
    pub fn collinearity(&self) -> f64 {
        (self.q[1] - self.q[0]).cross(self.q[2] - self.q[0])
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.p.iter().map(|p| p.norm_sq()).sum::<f64>()
    }

    pub fn potential_energy(&self, spec: &PotentialSpec) -> f64 {
        spec.energy(self.distance(0, 1)) + spec.energy(self.distance(0, 2)) + spec.energy(self.distance(1, 2))
    }
}

/// Pairwise accelerations without validation; bodies must be distinct.
#[inline]
pub(crate) fn accelerations_unchecked(q: &[Vec2; 3], spec: &PotentialSpec) -> [Vec2; 3] {
    let d01 = q[0] - q[1];
    let d02 = q[0] - q[2];
    let d12 = q[1] - q[2];
    let f01 = d01 * spec.force_over_r(d01.norm_sq());
    let f02 = d02 * spec.force_over_r(d02.norm_sq());
    let f12 = d12 * spec.force_over_r(d12.norm_sq());
    [f01 + f02, f12 - f01, -(f02 + f12)]
}

/// `a_i = sum_{j != i} F(q_i - q_j)` with unit masses.
pub fn accelerations(state: &ThreeBodyState, spec: &PotentialSpec) -> Result<[Vec2; 3]> {
    state.validate()?;
    Ok(accelerations_unchecked(&state.q, spec))
}

/// `E = sum_i |p_i|^2 / 2 + sum_{i>j} u(r_ij)`.
pub fn total_energy(state: &ThreeBodyState, spec: &PotentialSpec) -> Result<f64> {
    state.validate()?;
    Ok(state.kinetic_energy() + state.potential_energy(spec))
}

/// `sum_i q_i × p_i`.
pub fn angular_momentum(state: &ThreeBodyState) -> f64 {
    state.q.iter().zip(state.p.iter()).map(|(q, p)| q.cross(*p)).sum()
}

pub fn linear_momentum(state: &ThreeBodyState) -> Vec2 {
    state.p.iter().copied().sum()
}

pub fn center_of_mass(state: &ThreeBodyState) -> Vec2 {
    state.q.iter().copied().sum::<Vec2>() / 3.0
}

/// Isosceles start: body 1 on the negative x-axis, bodies 0 and 2 mirror
/// images in the x-axis, velocities of 0 and 2 along the triangle edges
/// toward / away from body 1, body 1 moving along +y. Total linear and
/// angular momentum vanish; `v > 0` gives clockwise motion in the left lobe.
pub fn isosceles_state(params: &ShootingParams) -> Result<ThreeBodyState> {
    params.validate()?;
    let ShootingParams { x0, y0, v } = *params;
    let q0 = Vec2::new(x0, y0);
    let q1 = Vec2::new(-2.0 * x0, 0.0);
    let q2 = Vec2::new(x0, -y0);
    let e01 = q1 - q0;
    let e12 = q2 - q1;
    let p0 = e01 * (v / e01.norm());
    let p2 = e12 * (v / e12.norm());
    let ratio = 3.0 * x0 / y0;
    let p1 = Vec2::new(0.0, 2.0 * v / (1.0 + ratio * ratio).sqrt());
    Ok(ThreeBodyState { t: 0.0, q: [q0, q1, q2], p: [p0, p1, p2] })
}
