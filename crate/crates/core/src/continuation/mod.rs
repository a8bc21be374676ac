//! Pseudo-arclength continuation of solution families in `(x0, y0, v)`.
//!
//! Arclength is measured in coordinates divided componentwise by the start
//! point of the series, so `v` (which shrinks by an order of magnitude along
//! a branch) weighs as much as `x0`.

mod corrector;
mod special;

use std::io::Write;

use log::{debug, info};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PotentialSpec, ShootingParams};
use crate::integrator::IntegratorConfig;
use crate::shooting::{solution_record, SolutionRecord, DEFAULT_TOL};

use corrector::{correct, jacobian, Hyperplane};
pub use special::{locate_special, solve_at_x0, SpecialKind, SpecialPoint};

/// Initial sense of travel in `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationConfig {
    /// Initial normalized arclength step.
    pub step: f64,
    pub n_steps: usize,
    pub min_step: f64,
    pub max_step: f64,
    /// Step growth factor after an easy corrector solve.
    pub growth: f64,
    /// Corrector iterations counted as easy.
    pub easy_iterations: usize,
    pub max_corrector_iter: usize,
    /// Residual tolerance on normalized `|(P, D)|`.
    pub tol: f64,
    /// The series stops once a point leaves this `x0` interval.
    pub x0_range: Option<(f64, f64)>,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            step: 0.01,
            n_steps: 500,
            min_step: 1e-6,
            max_step: 0.05,
            growth: 1.3,
            easy_iterations: 3,
            max_corrector_iter: 12,
            tol: DEFAULT_TOL,
            x0_range: None,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.step
            && self.step <= self.max_step
            && self.growth >= 1.0
            && self.tol > 0.0
            && self.max_corrector_iter > 0;
        if !ok {
            return Err(Error::Config(format!("inconsistent continuation settings {self:?}")));
        }
        if let Some((lo, hi)) = self.x0_range {
            if !(lo < hi) {
                return Err(Error::Config(format!("empty x0 range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Why a series ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "detail")]
pub enum StopReason {
    StepsExhausted,
    LeftRange,
    StepUnderflow(String),
    IntegratorFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSeries {
    pub label: String,
    pub points: Vec<SolutionRecord>,
    /// Indices of points at which `x0` turns.
    pub fold_points: Vec<usize>,
    pub special_points: Vec<SpecialPoint>,
    pub stop: StopReason,
    /// Normalization used for arclength.
    pub scale: ShootingParams,
}

pub const SERIES_CSV_HEADER: [&str; 7] = ["label", "x0", "y0", "v", "T", "E", "n0"];

impl ContinuationSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.points[0].potential
    }

    pub(crate) fn normalized(&self, k: usize) -> Vector3<f64> {
        normalize(&self.points[k].params, &self.scale)
    }

    /// Largest normalized distance between consecutive points.
    pub fn max_gap(&self) -> f64 {
        (1..self.len()).map(|k| (self.normalized(k) - self.normalized(k - 1)).norm()).fold(0.0, f64::max)
    }

    /// Joins a series run backwards from the same start with this one,
    /// giving one series ordered along the branch.
    pub fn join(backward: ContinuationSeries, forward: ContinuationSeries) -> Result<ContinuationSeries> {
        if backward.points.first().map(|r| r.params) != forward.points.first().map(|r| r.params) {
            return Err(Error::Consistency("series to join do not share their first point".into()));
        }
        let mut points: Vec<_> = backward.points.into_iter().rev().collect();
        points.extend(forward.points.into_iter().skip(1));
        // Recomputed: the start itself is a fold when both halves leave it in the same x0 sense.
        let fold_points = detect_folds(&points);
        Ok(ContinuationSeries {
            label: forward.label,
            points,
            fold_points,
            special_points: Vec::new(),
            stop: forward.stop,
            scale: forward.scale,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(SERIES_CSV_HEADER)?;
        for r in &self.points {
            w.write_record([
                self.label.clone(),
                format!("{:.17e}", r.params.x0),
                format!("{:.17e}", r.params.y0),
                format!("{:.17e}", r.params.v),
                format!("{:.17e}", r.period),
                format!("{:.17e}", r.energy),
                r.n0.map(|n| n.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn normalize(p: &ShootingParams, scale: &ShootingParams) -> Vector3<f64> {
    Vector3::new(p.x0 / scale.x0, p.y0 / scale.y0, p.v / scale.v)
}

fn turns_at(points: &[SolutionRecord], k: usize) -> bool {
    let before = points[k].params.x0 - points[k - 1].params.x0;
    let after = points[k + 1].params.x0 - points[k].params.x0;
    before * after < 0.0
}

fn detect_folds(points: &[SolutionRecord]) -> Vec<usize> {
    (1..points.len().saturating_sub(1)).filter(|&k| turns_at(points, k)).collect()
}

/// Traces the family through `start` for up to `ccfg.n_steps` accepted steps.
pub fn continue_family(
    start: &SolutionRecord,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
    ccfg: &ContinuationConfig,
    direction: Direction,
) -> Result<ContinuationSeries> {
    ccfg.validate()?;
    cfg.validate()?;
    if start.residual_norm > ccfg.tol {
        return Err(Error::Domain(format!(
            "start record is not converged: |F| = {:.3e} > {:.3e}",
            start.residual_norm, ccfg.tol
        )));
    }
    let scale = start.params;
    let label = start.series_label.clone().unwrap_or_default();
    let mut series = ContinuationSeries {
        label: label.clone(),
        points: vec![start.clone()],
        fold_points: Vec::new(),
        special_points: Vec::new(),
        stop: StopReason::StepsExhausted,
        scale,
    };
    if ccfg.n_steps == 0 {
        return Ok(series);
    }

    // First tangent: null vector of the Jacobian in normalized coordinates.
    let jac = jacobian(&start.params, spec, cfg)?;
    let rows: Vec<Vector3<f64>> = (0..2)
        .map(|r| Vector3::new(jac[(r, 0)] * scale.x0, jac[(r, 1)] * scale.y0, jac[(r, 2)] * scale.v))
        .collect();
    let mut tangent = rows[0].cross(&rows[1]);
    if tangent.norm() == 0.0 || !tangent.iter().all(|c| c.is_finite()) {
        return Err(Error::SingularJacobian { at: start.params });
    }
    tangent /= tangent.norm();
    if tangent[0] * direction.sign() < 0.0 {
        tangent = -tangent;
    }

    let mut h = ccfg.step;
    let mut u = normalize(&start.params, &scale);
    while series.points.len() <= ccfg.n_steps {
        let plane = Hyperplane { scale, origin: u, normal: tangent, offset: h };
        let outcome = correct(&plane, &plane.point(h), spec, cfg, ccfg.tol, ccfg.max_corrector_iter);
        let accepted = match outcome {
            Ok((ev, iterations)) => {
                let u_new = normalize(&ev.params, &scale);
                let jump = (u_new - u).norm();
                if jump > 1.5 * h {
                    debug!("continuation: rejected jump {jump:.3e} for step {h:.3e}");
                    None
                } else {
                    match solution_record(&ev.params, spec, cfg) {
                        Ok(rec) if rec.residual_norm <= ccfg.tol => Some((rec, u_new, iterations)),
                        Ok(rec) => {
                            debug!("continuation: re-verification failed with |F| = {:.3e}", rec.residual_norm);
                            None
                        }
                        Err(e) if e.is_integration_failure() => None,
                        Err(e) => return Err(e),
                    }
                }
            }
            Err(e) if e.is_integration_failure() || is_corrector_failure(&e) => {
                debug!("continuation: corrector failed at step {h:.3e}: {e}");
                if h * 0.5 < ccfg.min_step {
                    series.stop = if e.is_integration_failure() {
                        StopReason::IntegratorFailure(e.to_string())
                    } else {
                        StopReason::StepUnderflow(e.to_string())
                    };
                    break;
                }
                None
            }
            Err(e) => return Err(e),
        };
        let Some((rec, u_new, iterations)) = accepted else {
            h *= 0.5;
            if h < ccfg.min_step {
                series.stop = StopReason::StepUnderflow(format!("step fell below {:.1e}", ccfg.min_step));
                break;
            }
            continue;
        };

        let secant = u_new - u;
        tangent = secant / secant.norm();
        u = u_new;
        let x0 = rec.params.x0;
        series.points.push(rec.with_label(label.clone()));
        if let Some(k) = fold_at_end(&series.points) {
            info!("continuation: fold at x0 = {:.6}", series.points[k].params.x0);
            series.fold_points.push(k);
        }
        if iterations <= ccfg.easy_iterations {
            h = (h * ccfg.growth).min(ccfg.max_step);
        }
        if let Some((lo, hi)) = ccfg.x0_range {
            if !(lo..=hi).contains(&x0) {
                series.stop = StopReason::LeftRange;
                break;
            }
        }
    }
    Ok(series)
}

fn is_corrector_failure(e: &Error) -> bool {
    matches!(e.root_cause(), Error::Divergence { .. } | Error::SingularJacobian { .. } | Error::Domain(_))
}

fn fold_at_end(points: &[SolutionRecord]) -> Option<usize> {
    let n = points.len();
    (n >= 3).then_some(n - 2).filter(|&k| turns_at(points, k))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::shooting::newton_solve;

    pub(crate) fn alpha_record() -> SolutionRecord {
        let spec = PotentialSpec::lennard_jones_12_6();
        newton_solve(&ShootingParams::new(0.75, 0.725966, 0.522742).unwrap(), &spec, &IntegratorConfig::default(), 1e-11, 30)
            .unwrap()
            .with_label("alpha")
    }

    #[test]
    fn zero_steps_echo_start() {
        let rec = alpha_record();
        let ccfg = ContinuationConfig { n_steps: 0, ..Default::default() };
        let s = continue_family(&rec, &rec.potential, &IntegratorConfig::default(), &ccfg, Direction::Increasing).unwrap();
        assert_eq!(s.points, vec![rec]);
        assert!(s.fold_points.is_empty());
    }

    #[test]
    fn alpha_turns_at_the_fold() {
        let rec = alpha_record();
        let spec = rec.potential;
        let ccfg = ContinuationConfig { n_steps: 60, x0_range: Some((0.6, 0.76)), ..Default::default() };
        let s = continue_family(&rec, &spec, &IntegratorConfig::default(), &ccfg, Direction::Decreasing).unwrap();
        assert_eq!(s.stop, StopReason::LeftRange, "{:?}", s.stop);
        assert_eq!(s.fold_points.len(), 1);
        let k = s.fold_points[0];
        assert!((s.points[k].params.x0 - 0.6812).abs() < 2e-3, "{:?}", s.points[k].params);
        assert!(s.points[1].params.x0 < rec.params.x0);
        // Past the fold x0 increases again on the lower branch.
        let last = s.points.last().unwrap();
        assert!(last.params.x0 > 0.76 && last.params.y0 < 0.6);
        for p in &s.points {
            assert!(p.residual_norm <= ccfg.tol);
            assert_eq!(p.series_label.as_deref(), Some("alpha"));
        }
        assert!(s.max_gap() <= 1.5 * ccfg.max_step);
    }

    #[test]
    fn homogeneous_family_is_the_scaling_family() {
        let spec = PotentialSpec::homogeneous(6.0).unwrap();
        let cfg = IntegratorConfig::default();
        let rec = newton_solve(&ShootingParams::new(1.0, 0.985945, 0.234675).unwrap(), &spec, &cfg, 1e-11, 30).unwrap();
        let ccfg = ContinuationConfig { n_steps: 200, x0_range: Some((0.5, 2.0)), max_step: 0.1, ..Default::default() };
        let up = continue_family(&rec, &spec, &cfg, &ccfg, Direction::Increasing).unwrap();
        let down = continue_family(&rec, &spec, &cfg, &ccfg, Direction::Decreasing).unwrap();
        let all = ContinuationSeries::join(down, up).unwrap();
        assert!(all.fold_points.is_empty());
        let (lo, hi) = (all.points[0].params.x0, all.points.last().unwrap().params.x0);
        assert!(lo < 0.5 && hi > 2.0, "{lo} {hi}");
        for p in &all.points {
            let ShootingParams { x0, y0, v } = p.params;
            assert!((y0 / x0 - 0.985945).abs() < 1e-4, "{:?}", p.params);
            assert!((v * x0.powi(3) - 0.234675).abs() < 1e-4, "{:?}", p.params);
        }
    }

    #[test]
    fn series_csv_has_one_row_per_point() {
        let rec = alpha_record();
        let s = ContinuationSeries {
            label: "alpha".into(),
            points: vec![rec.clone(), rec],
            fold_points: vec![],
            special_points: vec![],
            stop: StopReason::StepsExhausted,
            scale: ShootingParams::new(1.0, 1.0, 1.0).unwrap(),
        };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "label,x0,y0,v,T,E,n0");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("alpha,7.5"));
        assert!(lines[1].ends_with(",0"));
    }
}
