//! Pair potentials `u(r)` between identical unit-mass bodies.

use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};
use crate::numeric::brent;

/// The functional form of a pair potential and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `u(r) = -1 / r^a`.
    Homogeneous { a: f64 },
    /// `u(r) = 1 / r^b - 1 / r^a`, `b > a`.
    #[serde(rename = "lj")]
    LennardJones {
        #[serde(default = "default_lj_b")]
        b: f64,
        #[serde(default = "default_lj_a")]
        a: f64,
    },
    /// `u(r) = (1 - exp(-a (r - r0)))^2`.
    Morse { a: f64, r0: f64 },
    /// `u(r) = exp(-r) - 1 / r^6`.
    Buckingham,
    /// `u(r) = -exp(-a r) / r`.
    ScreenedCoulomb { a: f64 },
}

fn default_lj_b() -> f64 {
    12.0
}

fn default_lj_a() -> f64 {
    6.0
}

/// A validated pair potential together with its derived length scales.
///
/// `r_min` is the location of the potential well and `r_zero` the zero of
/// `u` bounding the repulsive core. Either is `None` when the form has no
/// such point (homogeneous and screened-Coulomb attraction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialKind", into = "PotentialKind")]
pub struct PotentialSpec {
    kind: PotentialKind,
    r_min: Option<f64>,
    r_zero: Option<f64>,
}

impl TryFrom<PotentialKind> for PotentialSpec {
    type Error = Error;

    fn try_from(kind: PotentialKind) -> Result<Self> {
        PotentialSpec::new(kind)
    }
}

impl From<PotentialSpec> for PotentialKind {
    fn from(spec: PotentialSpec) -> Self {
        spec.kind
    }
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::lennard_jones_12_6()
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("potential parameter {name} must be positive and finite, got {value}")))
    }
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind) -> Result<Self> {
        let (r_min, r_zero) = match kind {
            PotentialKind::Homogeneous { a } => {
                positive("a", a)?;
                (None, None)
            }
            PotentialKind::LennardJones { b, a } => {
                positive("a", a)?;
                positive("b", b)?;
                if b <= a {
                    return Err(Error::Domain(format!("lennard-jones needs b > a, got b = {b}, a = {a}")));
                }
                ((Some((b / a).powf(1.0 / (b - a)))), Some(1.0))
            }
            PotentialKind::Morse { a, r0 } => {
                positive("a", a)?;
                positive("r0", r0)?;
                (Some(r0), Some(r0))
            }
            // The outer well: u' = 0 where r^7 e^{-r} = 6 and u = 0 where
            // r^6 e^{-r} = 1, both on the branch r > 7 (resp. r > 6).
            PotentialKind::Buckingham => {
                let well = brent(|r| 7.0 * r.ln() - r - 6f64.ln(), 7.0, 100.0, 1e-14, 0.0, 200)
                    .map(|b| b.root);
                let zero = brent(|r| 6.0 * r.ln() - r, 6.0, 100.0, 1e-14, 0.0, 200).map(|b| b.root);
                (well, zero)
            }
            PotentialKind::ScreenedCoulomb { a } => {
                positive("a", a)?;
                (None, None)
            }
        };
        let spec = PotentialSpec { kind, r_min, r_zero };
        spec.check_derived()?;
        Ok(spec)
    }

    /// The `1/r^12 - 1/r^6` potential.
    pub fn lennard_jones_12_6() -> Self {
        PotentialSpec::new(PotentialKind::LennardJones { b: 12.0, a: 6.0 }).expect("LJ(12,6) is valid")
    }

    pub fn lennard_jones(b: f64, a: f64) -> Result<Self> {
        PotentialSpec::new(PotentialKind::LennardJones { b, a })
    }

    pub fn homogeneous(a: f64) -> Result<Self> {
        PotentialSpec::new(PotentialKind::Homogeneous { a })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn r_min(&self) -> Option<f64> {
        self.r_min
    }

    pub fn r_zero(&self) -> Option<f64> {
        self.r_zero
    }

    /// True for the `1/r^12 - 1/r^6` case.
    pub fn is_lj_12_6(&self) -> bool {
        matches!(self.kind, PotentialKind::LennardJones { b, a } if b == 12.0 && a == 6.0)
    }

    pub fn label(&self) -> String {
        match self.kind {
            PotentialKind::Homogeneous { a } => format!("homogeneous(a={a})"),
            PotentialKind::LennardJones { b, a } => format!("lj({b},{a})"),
            PotentialKind::Morse { a, r0 } => format!("morse(a={a},r0={r0})"),
            PotentialKind::Buckingham => "buckingham".to_string(),
            PotentialKind::ScreenedCoulomb { a } => format!("screened_coulomb(a={a})"),
        }
    }

    fn check_derived(&self) -> Result<()> {
        if let Some(r0) = self.r_zero {
            let u = self.energy(r0);
            let scale = self.energy_scale(r0);
            if u.abs() > 1e-12 * scale {
                return Err(Error::Consistency(format!("{}: u(r_zero) = {u:e}", self.label())));
            }
        }
        if let Some(rm) = self.r_min {
            let du = self.derivative(rm);
            let scale = self.energy_scale(rm) / rm;
            if du.abs() > 1e-10 * scale {
                return Err(Error::Consistency(format!("{}: u'(r_min) = {du:e}", self.label())));
            }
        }
        Ok(())
    }

    /// Magnitude of the individual terms of `u` at `r`, for relative checks.
    fn energy_scale(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::LennardJones { b, a } => r.powf(-b) + r.powf(-a),
            PotentialKind::Buckingham => (-r).exp() + r.powi(-6),
            _ => 1.0,
        }
    }

    /// `u(r)`. No domain check: callers guarantee `r > 0`.
    #[inline]
    pub fn energy(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Homogeneous { a } => -r.powf(-a),
            PotentialKind::LennardJones { b, a } => {
                if b == 12.0 && a == 6.0 {
                    let inv6 = (r * r).powi(-3);
                    inv6 * inv6 - inv6
                } else {
                    r.powf(-b) - r.powf(-a)
                }
            }
            PotentialKind::Morse { a, r0 } => {
                let w = 1.0 - (-a * (r - r0)).exp();
                w * w
            }
            PotentialKind::Buckingham => (-r).exp() - r.powi(-6),
            PotentialKind::ScreenedCoulomb { a } => -(-a * r).exp() / r,
        }
    }

    /// `du/dr` in closed form.
    #[inline]
    pub fn derivative(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Homogeneous { a } => a * r.powf(-a - 1.0),
            PotentialKind::LennardJones { b, a } => {
                if b == 12.0 && a == 6.0 {
                    let inv6 = (r * r).powi(-3);
                    (6.0 * inv6 - 12.0 * inv6 * inv6) / r
                } else {
                    a * r.powf(-a - 1.0) - b * r.powf(-b - 1.0)
                }
            }
            PotentialKind::Morse { a, r0 } => {
                let e = (-a * (r - r0)).exp();
                2.0 * a * e * (1.0 - e)
            }
            PotentialKind::Buckingham => -(-r).exp() + 6.0 * r.powi(-7),
            PotentialKind::ScreenedCoulomb { a } => (-a * r).exp() * (a * r + 1.0) / (r * r),
        }
    }

    /// `-u'(r) / r` as a function of `r^2`; the pair force is this times the
    /// displacement vector.
    #[inline]
    pub(crate) fn force_over_r(&self, r2: f64) -> f64 {
        match self.kind {
            PotentialKind::LennardJones { b, a } if b == 12.0 && a == 6.0 => {
                let inv2 = 1.0 / r2;
                let inv6 = inv2 * inv2 * inv2;
                (12.0 * inv6 * inv6 - 6.0 * inv6) * inv2
            }
            PotentialKind::Homogeneous { a } if a == 6.0 => {
                let inv2 = 1.0 / r2;
                let inv4 = inv2 * inv2;
                -6.0 * inv4 * inv4
            }
            _ => {
                let r = r2.sqrt();
                -self.derivative(r) / r
            }
        }
    }
}

/// `u(r)` for the selected potential; `r` must be positive and finite.
pub fn pair_potential(r: f64, spec: &PotentialSpec) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("pair distance must be positive and finite, got {r}")));
    }
    Ok(spec.energy(r))
}

/// Force on a body displaced by `r_vec` from its partner:
/// `-u'(|r|) r / |r|`.
pub fn pair_force(r_vec: Vec2, spec: &PotentialSpec) -> Result<Vec2> {
    let r2 = r_vec.norm_sq();
    if !(r_vec.is_finite() && r2 > 0.0) {
        return Err(Error::Domain(format!("pair displacement must be nonzero and finite, got {r_vec:?}")));
    }
    Ok(r_vec * spec.force_over_r(r2))
}
