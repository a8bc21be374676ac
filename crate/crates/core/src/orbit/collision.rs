use serde::{Deserialize, Serialize};

use super::FullOrbit;
use crate::error::{Error, Result};
use crate::geometry::PotentialSpec;
use crate::numeric::golden_section_min;

/// Subdivisions of each sample interval used when scanning for dips.
const REFINE: usize = 10;
const T_TOL: f64 = 1e-10;

/// A maximal time interval with `r_ij <= r_min`. `t_start` lies in
/// `[0, T)`; `t_end` may exceed `T` for intervals that wrap around.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionInterval {
    pub i: usize,
    pub j: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub r_min_value: f64,
    pub t_at_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    /// Threshold distance used (the potential's `r_min`).
    pub threshold: f64,
    /// Symmetric pair counts `n_ij`, zero diagonal.
    pub n_ij: [[u32; 3]; 3],
    pub n0: u32,
    pub intervals: Vec<CollisionInterval>,
    /// Index pairs into `intervals` of overlapping (0,1) and (0,2) intervals.
    pub simultaneous: Vec<(usize, usize)>,
}

impl CollisionReport {
    /// Collision count of body `i`.
    pub fn n(&self, i: usize) -> u32 {
        self.n_ij[i].iter().sum()
    }
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Narrows a boundary of `{t : f(t) <= 0}` inside `[lo, hi]` to `T_TOL` and
/// returns the endpoint on the inside.
fn bisect(mut lo: f64, mut hi: f64, lo_inside: bool, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    while hi - lo > T_TOL {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? <= 0.0) == lo_inside {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if lo_inside { lo } else { hi })
}

/// Collisional intervals of every pair over one period.
pub fn collision_report(orbit: &FullOrbit, spec: &PotentialSpec) -> Result<CollisionReport> {
    let r_min = spec
        .r_min()
        .ok_or_else(|| Error::Unsupported(format!("{} has no finite minimum distance", spec.label())))?;
    let period = orbit.period;
    let m = orbit.samples.len() * REFINE;
    let dt = period / m as f64;
    let fine = (0..m).map(|k| orbit.state_at(k as f64 * dt)).collect::<Result<Vec<_>>>()?;

    let mut intervals = Vec::new();
    let mut n_ij = [[0u32; 3]; 3];
    for (i, j) in PAIRS {
        let f: Vec<f64> = fine.iter().map(|s| s.distance(i, j) - r_min).collect();
        let g = |t: f64| -> Result<f64> { Ok(orbit.state_at(t)?.distance(i, j) - r_min) };
        let inside: Vec<bool> = f.iter().map(|v| *v <= 0.0).collect();
        let found = if inside.iter().all(|b| *b) {
            let k = (0..m).min_by(|a, b| f[*a].total_cmp(&f[*b])).unwrap_or(0);
            vec![CollisionInterval {
                i,
                j,
                t_start: 0.0,
                t_end: period,
                r_min_value: f[k] + r_min,
                t_at_min: k as f64 * dt,
            }]
        } else {
            // Start searching just after a point outside so runs never straddle the scan origin.
            let first_out = inside.iter().position(|b| !b).unwrap_or(0);
            let mut out = Vec::new();
            let mut k = 0;
            while k < m {
                let idx = (first_out + k) % m;
                if !inside[idx] {
                    k += 1;
                    continue;
                }
                let begin = first_out + k;
                while k < m && inside[(first_out + k) % m] {
                    k += 1;
                }
                let end = first_out + k - 1;
                if end - begin + 1 < 2 {
                    continue;
                }
                // Unwrapped times: sample n sits at n * dt and may exceed T.
                let t_in_first = begin as f64 * dt;
                let t_in_last = end as f64 * dt;
                let t_start = bisect(t_in_first - dt, t_in_first, false, &g)?;
                let t_end = bisect(t_in_last, t_in_last + dt, true, &g)?;
                let kmin = (begin..=end).min_by(|a, b| f[a % m].total_cmp(&f[b % m])).expect("nonempty");
                let tk = kmin as f64 * dt;
                let (t_at_min, fmin) = golden_section_min(&g, tk - dt, tk + dt, 1e-10, 200)?;
                let (t_start, t_end, t_at_min) = if t_start >= period {
                    (t_start - period, t_end - period, t_at_min - period)
                } else {
                    (t_start, t_end, t_at_min)
                };
                out.push(CollisionInterval {
                    i,
                    j,
                    t_start,
                    t_end,
                    r_min_value: fmin + r_min,
                    t_at_min: t_at_min.rem_euclid(period),
                });
            }
            out
        };
        let count = found.len() as u32;
        n_ij[i][j] = count;
        n_ij[j][i] = count;
        intervals.extend(found);
    }
    intervals.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)).then(a.t_start.total_cmp(&b.t_start)));

    let mut simultaneous = Vec::new();
    for (a, ia) in intervals.iter().enumerate().filter(|(_, c)| (c.i, c.j) == (0, 1)) {
        for (b, ib) in intervals.iter().enumerate().filter(|(_, c)| (c.i, c.j) == (0, 2)) {
            let overlaps = [-period, 0.0, period]
                .iter()
                .any(|s| ia.t_start <= ib.t_end + s && ib.t_start + s <= ia.t_end);
            if overlaps {
                simultaneous.push((a, b));
            }
        }
    }

    Ok(CollisionReport { threshold: r_min, n0: n_ij[0][1] + n_ij[0][2], n_ij, intervals, simultaneous })
}
