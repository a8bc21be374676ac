use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{residuals, ResidualSample};
use crate::error::{Error, Result};
use crate::geometry::{PotentialSpec, ShootingParams};
use crate::integrator::IntegratorConfig;

/// Residual samples on a `(y0, v)` lattice at fixed `x0`. `samples` is
/// row-major with `y0` as the slow index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourGrid {
    pub x0: f64,
    pub y0_axis: Vec<f64>,
    pub v_axis: Vec<f64>,
    pub samples: Vec<ResidualSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedCell {
    /// Lower-left corner indices into the two axes.
    pub i: usize,
    pub j: usize,
    pub seed: ShootingParams,
    /// False when the bilinear zero curves do not meet inside the cell and
    /// the center was used.
    pub bilinear: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedScan {
    pub seeds: Vec<SeedCell>,
    /// Cells skipped because a corner sample failed.
    pub excluded: Vec<(usize, usize)>,
    /// Sign-change cells rejected because `t_f` jumps between corners (the
    /// first collinear event switches branch inside the cell).
    pub discontinuous: Vec<(usize, usize)>,
}

/// Largest ratio of corner `t_f` values accepted in a seed cell.
const T_F_JUMP: f64 = 1.5;

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

/// Evaluates the residuals on an `n_y0 x n_v` lattice spanning the two
/// closed ranges. Cells are evaluated in parallel on the current rayon pool.
pub fn scan_grid(
    x0: f64,
    y0_range: (f64, f64),
    v_range: (f64, f64),
    n_y0: usize,
    n_v: usize,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
) -> Result<ContourGrid> {
    if n_y0 < 2 || n_v < 2 {
        return Err(Error::Config("grid needs at least 2 points per axis".into()));
    }
    let positive_range = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && 0.0 < a && a < b;
    if !(x0.is_finite() && x0 > 0.0) || !positive_range(y0_range) || !positive_range(v_range) {
        return Err(Error::Config(format!(
            "scan ranges must be positive and increasing (x0 = {x0}, y0 {y0_range:?}, v {v_range:?})"
        )));
    }
    cfg.validate()?;
    let y0_axis = axis(y0_range.0, y0_range.1, n_y0);
    let v_axis = axis(v_range.0, v_range.1, n_v);
    let samples = (0..n_y0 * n_v)
        .into_par_iter()
        .map(|k| {
            let params = ShootingParams::new(x0, y0_axis[k / n_v], v_axis[k % n_v])?;
            residuals(&params, spec, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContourGrid { x0, y0_axis, v_axis, samples })
}

impl ContourGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.y0_axis.len(), self.v_axis.len())
    }

    pub fn get(&self, i: usize, j: usize) -> &ResidualSample {
        &self.samples[i * self.v_axis.len() + j]
    }

    pub fn validate(&self) -> Result<()> {
        let increasing = |a: &[f64]| a.len() >= 2 && a.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&self.y0_axis) || !increasing(&self.v_axis) {
            return Err(Error::Consistency("grid axes must be strictly increasing".into()));
        }
        if self.samples.len() != self.y0_axis.len() * self.v_axis.len() {
            return Err(Error::Consistency("grid sample count does not match axes".into()));
        }
        Ok(())
    }

    /// Long-format CSV: `x0, y0, v, P, D, E, t_f, status`. Failed samples
    /// leave the residual columns empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x0", "y0", "v", "P", "D", "E", "t_f", "status"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for s in &self.samples {
            w.write_record([
                format!("{:.17e}", s.params.x0),
                format!("{:.17e}", s.params.y0),
                format!("{:.17e}", s.params.v),
                opt(s.p),
                opt(s.d),
                format!("{:.17e}", s.e),
                opt(s.t_f),
                s.status.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Axes plus `P`, `D`, `E` and `t_f` matrices (rows follow `y0`), with
    /// `null` for failed samples.
    pub fn to_matrices_json(&self) -> serde_json::Value {
        let (ny, nv) = self.shape();
        let matrix = |f: &dyn Fn(&ResidualSample) -> Option<f64>| {
            (0..ny).map(|i| (0..nv).map(|j| f(self.get(i, j))).collect::<Vec<_>>()).collect::<Vec<_>>()
        };
        serde_json::json!({
            "x0": self.x0,
            "y0_axis": self.y0_axis,
            "v_axis": self.v_axis,
            "P": matrix(&|s| s.p),
            "D": matrix(&|s| s.d),
            "E": matrix(&|s| Some(s.e)),
            "t_f": matrix(&|s| s.t_f),
        })
    }
}

fn changes_sign(c: [f64; 4]) -> bool {
    let pos = c.iter().any(|&v| v > 0.0);
    let neg = c.iter().any(|&v| v < 0.0);
    (pos && neg) || c.iter().any(|&v| v == 0.0)
}

/// Intersection of the zero curves of two bilinear interpolants on the unit
/// square, from corner values ordered `(0,0), (1,0), (0,1), (1,1)`.
fn bilinear_intersection(f: [f64; 4], g: [f64; 4]) -> Option<(f64, f64)> {
    let coeffs = |c: [f64; 4]| (c[0], c[1] - c[0], c[2] - c[0], c[3] - c[1] - c[2] + c[0]);
    let (a0, a1, a2, a3) = coeffs(f);
    let (b0, b1, b2, b3) = coeffs(g);
    let c2 = b1 * a3 - b3 * a1;
    let c1 = b0 * a3 + b1 * a2 - b2 * a1 - b3 * a0;
    let c0 = b0 * a2 - b2 * a0;
    let scale = c2.abs().max(c1.abs()).max(c0.abs());
    if scale == 0.0 {
        return None;
    }
    let mut roots = Vec::with_capacity(2);
    if c2.abs() <= 1e-12 * scale {
        if c1 != 0.0 {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (c1 + disc.sqrt().copysign(c1));
        roots.push(q / c2);
        if q != 0.0 {
            roots.push(c0 / q);
        }
    }
    let inside = |x: f64| (-1e-12..=1.0 + 1e-12).contains(&x);
    roots.into_iter().filter(|s| inside(*s)).find_map(|s| {
        let (den_f, den_g) = (a2 + a3 * s, b2 + b3 * s);
        let t = if den_f.abs() >= den_g.abs() {
            -(a0 + a1 * s) / den_f
        } else {
            -(b0 + b1 * s) / den_g
        };
        (t.is_finite() && inside(t)).then(|| (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
    })
}

/// Cells where both residuals change sign, with a seed per cell.
pub fn find_seed_cells(grid: &ContourGrid) -> SeedScan {
    let (ny, nv) = grid.shape();
    let mut out = SeedScan::default();
    if ny < 2 || nv < 2 || grid.samples.len() != ny * nv {
        return out;
    }
    for i in 0..ny - 1 {
        for j in 0..nv - 1 {
            let corners = [grid.get(i, j), grid.get(i + 1, j), grid.get(i, j + 1), grid.get(i + 1, j + 1)];
            let p: Option<Vec<f64>> = corners.iter().map(|s| s.p).collect();
            let d: Option<Vec<f64>> = corners.iter().map(|s| s.d).collect();
            let (Some(p), Some(d)) = (p, d) else {
                out.excluded.push((i, j));
                continue;
            };
            let p = [p[0], p[1], p[2], p[3]];
            let d = [d[0], d[1], d[2], d[3]];
            if !changes_sign(p) || !changes_sign(d) {
                continue;
            }
            let tf = corners.iter().filter_map(|c| c.t_f);
            let (lo, hi) = tf.fold((f64::INFINITY, 0.0f64), |(lo, hi), t| (lo.min(t), hi.max(t)));
            if hi > T_F_JUMP * lo {
                out.discontinuous.push((i, j));
                continue;
            }
            let hit = bilinear_intersection(p, d);
            let (s, t) = hit.unwrap_or((0.5, 0.5));
            let y0 = grid.y0_axis[i] + s * (grid.y0_axis[i + 1] - grid.y0_axis[i]);
            let v = grid.v_axis[j] + t * (grid.v_axis[j + 1] - grid.v_axis[j]);
            out.seeds.push(SeedCell { i, j, seed: ShootingParams { x0: grid.x0, y0, v }, bilinear: hit.is_some() });
        }
    }
    out
}

pub fn find_seeds(grid: &ContourGrid) -> Vec<ShootingParams> {
    find_seed_cells(grid).seeds.into_iter().map(|c| c.seed).collect()
}

#[cfg(test)]
mod tests {
    use super::super::ResidualStatus;
    use super::*;
    use proptest::prelude::*;

    fn synthetic(ny: usize, nv: usize, f: impl Fn(f64, f64) -> (Option<f64>, Option<f64>)) -> ContourGrid {
        let y0_axis = axis(0.5, 1.0, ny);
        let v_axis = axis(0.1, 0.6, nv);
        let mut samples = Vec::new();
        for &y0 in &y0_axis {
            for &v in &v_axis {
                let (p, d) = f(y0, v);
                let status = if p.is_some() { ResidualStatus::Ok } else { ResidualStatus::TrajectoryFailure };
                samples.push(ResidualSample {
                    params: ShootingParams { x0: 0.75, y0, v },
                    p,
                    d,
                    p_raw: p,
                    d_raw: d,
                    e: 0.0,
                    t_f: p.map(|_| 1.0),
                    status,
                });
            }
        }
        ContourGrid { x0: 0.75, y0_axis, v_axis, samples }
    }

    #[test]
    fn linear_crossing_located_exactly() {
        let g = synthetic(11, 11, |y0, v| (Some(y0 - 0.73), Some(v - 0.52 + 0.3 * (y0 - 0.73))));
        let seeds = find_seeds(&g);
        assert_eq!(seeds.len(), 1);
        assert!((seeds[0].y0 - 0.73).abs() < 1e-12);
        assert!((seeds[0].v - 0.52).abs() < 1e-12);
    }

    #[test]
    fn constant_sign_gives_no_seeds() {
        let g = synthetic(6, 6, |y0, v| (Some(1.0 + y0), Some(v - 0.3)));
        assert!(find_seeds(&g).is_empty());
    }

    #[test]
    fn failed_cells_excluded() {
        let g = synthetic(2, 2, |_, _| (None, None));
        let scan = find_seed_cells(&g);
        assert!(scan.seeds.is_empty());
        assert_eq!(scan.excluded, vec![(0, 0)]);
    }

    #[test]
    fn event_branch_jump_rejected() {
        let mut g = synthetic(2, 2, |y0, v| (Some(y0 - 0.73), Some(v - 0.35)));
        g.samples[3].t_f = Some(5.0);
        let scan = find_seed_cells(&g);
        assert!(scan.seeds.is_empty());
        assert_eq!(scan.discontinuous, vec![(0, 0)]);
    }

    #[test]
    fn real_scan_csv_and_json_shapes() {
        let g = scan_grid(
            0.75,
            (0.7, 0.75),
            (0.5, 0.55),
            3,
            3,
            &PotentialSpec::lennard_jones_12_6(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        g.validate().unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 10);
        let json = g.to_matrices_json();
        assert_eq!(json["P"].as_array().unwrap().len(), 3);
        // Coarse cells can flag sign changes without a crossing; alpha must be among them.
        let seeds = find_seeds(&g);
        assert!(seeds.iter().any(|s| (s.y0 - 0.725966).abs() < 0.025 && (s.v - 0.522742).abs() < 0.025));
        assert!(scan_grid(0.75, (0.7, 0.6), (0.5, 0.55), 3, 3, &PotentialSpec::lennard_jones_12_6(), &IntegratorConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn bilinear_hit_is_a_common_zero(
            f in proptest::array::uniform4(-1.0f64..1.0),
            g in proptest::array::uniform4(-1.0f64..1.0),
        ) {
            if let Some((s, t)) = bilinear_intersection(f, g) {
                let eval = |c: [f64; 4]| c[0] * (1.0 - s) * (1.0 - t) + c[1] * s * (1.0 - t) + c[2] * (1.0 - s) * t + c[3] * s * t;
                let scale = f.iter().chain(g.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
                prop_assert!(eval(f).abs() <= 1e-6 * scale.max(1.0));
                prop_assert!(eval(g).abs() <= 1e-6 * scale.max(1.0));
            }
        }
    }
}
