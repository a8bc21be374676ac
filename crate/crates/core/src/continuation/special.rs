use log::debug;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::corrector::{correct, Hyperplane};
use super::{ContinuationConfig, ContinuationSeries};
use crate::error::{Error, Result};
use crate::geometry::ShootingParams;
use crate::integrator::IntegratorConfig;
use crate::numeric::{brent, golden_section_min};
use crate::shooting::{newton_solve, solution_record, Evaluation, SolutionRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    EZero,
    TMin,
    EMax,
    X0Min,
}

impl SpecialKind {
    pub const ALL: [SpecialKind; 4] = [SpecialKind::EZero, SpecialKind::TMin, SpecialKind::EMax, SpecialKind::X0Min];

    pub fn as_str(&self) -> &'static str {
        match self {
            SpecialKind::EZero => "e_zero",
            SpecialKind::TMin => "t_min",
            SpecialKind::EMax => "e_max",
            SpecialKind::X0Min => "x0_min",
        }
    }

    /// Quantity minimized (or, for `EZero`, zeroed) along the series.
    fn value(&self, ev: &Evaluation) -> f64 {
        match self {
            SpecialKind::EZero => ev.e,
            SpecialKind::TMin => ev.period(),
            SpecialKind::EMax => -ev.e,
            SpecialKind::X0Min => ev.params.x0,
        }
    }

    fn record_value(&self, r: &SolutionRecord) -> f64 {
        match self {
            SpecialKind::EZero => r.energy,
            SpecialKind::TMin => r.period,
            SpecialKind::EMax => -r.energy,
            SpecialKind::X0Min => r.params.x0,
        }
    }
}

impl std::str::FromStr for SpecialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpecialKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.replace('-', "_").to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown special point kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub kind: SpecialKind,
    /// Index of the series point nearest to the refined location.
    pub near_index: usize,
    pub record: SolutionRecord,
}

/// Quadratic through three consecutive series points in normalized
/// coordinates, parameterized by chord length from the middle one.
struct LocalCurve {
    nodes: [f64; 3],
    points: [Vector3<f64>; 3],
}

impl LocalCurve {
    fn around(series: &ContinuationSeries, center: usize) -> Self {
        let points = [series.normalized(center - 1), series.normalized(center), series.normalized(center + 1)];
        let nodes = [-(points[1] - points[0]).norm(), 0.0, (points[2] - points[1]).norm()];
        LocalCurve { nodes, points }
    }

    fn at(&self, s: f64) -> (Vector3<f64>, Vector3<f64>) {
        let n = &self.nodes;
        let mut pos = Vector3::zeros();
        let mut der = Vector3::zeros();
        for i in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let (a, b) = (n[others[0]], n[others[1]]);
            let denom = (n[i] - a) * (n[i] - b);
            pos += self.points[i] * ((s - a) * (s - b) / denom);
            der += self.points[i] * ((2.0 * s - a - b) / denom);
        }
        (pos, der / der.norm())
    }
}

fn probe(
    curve: &LocalCurve,
    s: f64,
    series: &ContinuationSeries,
    cfg: &IntegratorConfig,
    ccfg: &ContinuationConfig,
) -> Result<Evaluation> {
    let (origin, normal) = curve.at(s);
    let plane = Hyperplane { scale: series.scale, origin, normal, offset: 0.0 };
    let (ev, _) = correct(&plane, &plane.point(0.0), series.potential(), cfg, ccfg.tol, ccfg.max_corrector_iter)?;
    Ok(ev)
}

/// Refines a distinguished point of `series` by re-converging probes on
/// the branch between neighbouring points.
pub fn locate_special(
    series: &ContinuationSeries,
    kind: SpecialKind,
    cfg: &IntegratorConfig,
    ccfg: &ContinuationConfig,
) -> Result<SpecialPoint> {
    let n = series.len();
    if n < 3 {
        return Err(Error::NotFound(format!("{} needs at least three series points", kind.as_str())));
    }
    let values: Vec<f64> = series.points.iter().map(|r| kind.record_value(r)).collect();
    let not_found = || Error::NotFound(format!("series {:?} does not bracket {}", series.label, kind.as_str()));

    let (params, near_index) = if kind == SpecialKind::EZero {
        let k = (0..n - 1).find(|&k| values[k] * values[k + 1] <= 0.0).ok_or_else(not_found)?;
        let center = k.clamp(1, n - 2);
        let curve = LocalCurve::around(series, center);
        let (a, b) = if center == k { (0.0, curve.nodes[2]) } else { (curve.nodes[0], 0.0) };
        let root = brent(
            |s| match probe(&curve, s, series, cfg, ccfg) {
                Ok(ev) => ev.e,
                Err(err) => {
                    debug!("special point probe at s = {s} failed: {err}");
                    f64::NAN
                }
            },
            a,
            b,
            1e-12,
            0.0,
            200,
        )
        .ok_or_else(not_found)?;
        let ev = probe(&curve, root.root, series, cfg, ccfg)?;
        let near = if values[k].abs() <= values[k + 1].abs() { k } else { k + 1 };
        (ev.params, near)
    } else {
        let k = (1..n - 1)
            .filter(|&k| values[k] <= values[k - 1] && values[k] <= values[k + 1])
            .min_by(|a, b| values[*a].total_cmp(&values[*b]))
            .ok_or_else(not_found)?;
        let curve = LocalCurve::around(series, k);
        let (s, _) = golden_section_min(
            |s| probe(&curve, s, series, cfg, ccfg).map(|ev| kind.value(&ev)),
            curve.nodes[0],
            curve.nodes[2],
            1e-8,
            200,
        )?;
        (probe(&curve, s, series, cfg, ccfg)?.params, k)
    };

    let mut record = solution_record(&params, series.potential(), cfg)?;
    if record.residual_norm > ccfg.tol {
        return Err(Error::Consistency(format!(
            "refined {} point fails re-verification: |F| = {:.3e}",
            kind.as_str(),
            record.residual_norm
        )));
    }
    record.series_label = Some(series.label.clone());
    Ok(SpecialPoint { kind, near_index, record })
}

impl ContinuationSeries {
    /// Fills `special_points` with every kind the series brackets.
    pub fn locate_specials(&mut self, cfg: &IntegratorConfig, ccfg: &ContinuationConfig) -> Result<()> {
        self.special_points.clear();
        for kind in SpecialKind::ALL {
            match locate_special(self, kind, cfg, ccfg) {
                Ok(p) => self.special_points.push(p),
                Err(Error::NotFound(msg)) => debug!("{msg}"),
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

/// Solutions of the series' family at fixed `x0`, one per crossing of `x0`
/// by the series. Each is converged by 2-D Newton from the interpolated
/// neighbours.
pub fn solve_at_x0(
    series: &ContinuationSeries,
    x0: f64,
    cfg: &IntegratorConfig,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<SolutionRecord>> {
    let mut out: Vec<SolutionRecord> = Vec::new();
    for w in series.points.windows(2) {
        let (a, b) = (&w[0].params, &w[1].params);
        if (a.x0 - x0) * (b.x0 - x0) > 0.0 || a.x0 == b.x0 {
            continue;
        }
        let f = (x0 - a.x0) / (b.x0 - a.x0);
        let seed = ShootingParams { x0, y0: a.y0 + f * (b.y0 - a.y0), v: a.v + f * (b.v - a.v) };
        match newton_solve(&seed, series.potential(), cfg, tol, max_iter) {
            Ok(mut rec) => {
                let dup = out.iter().any(|r| {
                    (r.params.y0 - rec.params.y0).abs() < 1e-8 && (r.params.v - rec.params.v).abs() < 1e-8
                });
                if !dup {
                    rec.series_label = Some(series.label.clone());
                    out.push(rec);
                }
            }
            Err(e) => debug!("solve_at_x0({x0}) from {seed:?} failed: {e}"),
        }
    }
    if out.is_empty() {
        return Err(Error::NotFound(format!("series {:?} has no converged point at x0 = {x0}", series.label)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::tests::alpha_record;
    use crate::continuation::{continue_family, Direction};

    #[test]
    fn kind_names_round_trip() {
        for k in SpecialKind::ALL {
            assert_eq!(k.as_str().parse::<SpecialKind>().unwrap(), k);
        }
        assert_eq!("E-max".parse::<SpecialKind>().unwrap(), SpecialKind::EMax);
        assert!("nope".parse::<SpecialKind>().is_err());
    }

    #[test]
    fn fold_and_energy_maximum_near_alpha() {
        let rec = alpha_record();
        let cfg = IntegratorConfig::default();
        let ccfg = ContinuationConfig { n_steps: 60, x0_range: Some((0.6, 0.76)), ..Default::default() };
        let s = continue_family(&rec, &rec.potential, &cfg, &ccfg, Direction::Decreasing).unwrap();
        let fold = locate_special(&s, SpecialKind::X0Min, &cfg, &ccfg).unwrap();
        assert!((fold.record.params.x0 - 0.6812).abs() < 2e-3, "{:?}", fold.record.params);
        assert!((fold.record.params.y0 - 0.617578).abs() < 2e-3);
        assert!(fold.record.params.x0 <= s.points.iter().map(|p| p.params.x0).fold(f64::INFINITY, f64::min) + 1e-12);
        let emax = locate_special(&s, SpecialKind::EMax, &cfg, &ccfg).unwrap();
        assert!((emax.record.energy - 0.295542).abs() < 1e-3, "{:?}", emax.record);
        assert!(matches!(locate_special(&s, SpecialKind::EZero, &cfg, &ccfg), Err(Error::NotFound(_))));
    }

    #[test]
    fn solve_at_x0_finds_both_branches() {
        let rec = alpha_record();
        let cfg = IntegratorConfig::default();
        let ccfg = ContinuationConfig { n_steps: 60, x0_range: Some((0.6, 0.76)), ..Default::default() };
        let s = continue_family(&rec, &rec.potential, &cfg, &ccfg, Direction::Decreasing).unwrap();
        let at = solve_at_x0(&s, 0.75, &cfg, 1e-11, 30).unwrap();
        assert_eq!(at.len(), 2, "{at:?}");
        assert!(at.iter().any(|r| (r.params.y0 - 0.553223).abs() < 1e-4 && (r.params.v - 0.615805).abs() < 1e-4));
        assert!(at.iter().any(|r| (r.params.y0 - 0.725966).abs() < 1e-5));
        assert!(solve_at_x0(&s, 0.5, &cfg, 1e-11, 30).is_err());
    }
}
