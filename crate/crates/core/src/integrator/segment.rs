use std::io::Write;

use super::DenseStep;
use crate::error::{Error, Result};
use crate::geometry::ThreeBodyState;

/// Dense record of one integration run: the accepted steps, each with its
/// interpolant. Works for either time direction.
#[derive(Debug, Clone)]
pub struct TrajectorySegment {
    steps: Vec<DenseStep>,
}

pub(crate) const CSV_HEADER: [&str; 13] =
    ["t", "x0", "y0", "x1", "y1", "x2", "y2", "vx0", "vy0", "vx1", "vy1", "vx2", "vy2"];

impl TrajectorySegment {
    pub(crate) fn from_steps(steps: Vec<DenseStep>) -> Self {
        assert!(!steps.is_empty(), "segment needs at least one step");
        Self { steps }
    }

    #[cfg(test)]
    pub(crate) fn steps(&self) -> &[DenseStep] {
        &self.steps
    }

    pub fn t_start(&self) -> f64 {
        self.steps[0].t0
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().expect("nonempty").t1
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Times of all step boundaries, starting with `t_start`.
    pub fn step_times(&self) -> Vec<f64> {
        std::iter::once(self.t_start()).chain(self.steps.iter().map(|s| s.t1)).collect()
    }

    pub fn initial_state(&self) -> ThreeBodyState {
        ThreeBodyState::from_phase(self.t_start(), &self.steps[0].y0)
    }

    pub fn final_state(&self) -> ThreeBodyState {
        let last = self.steps.last().expect("nonempty");
        ThreeBodyState::from_phase(last.t1, &last.y1)
    }

    /// State at any `t` inside the covered interval (endpoints included).
    pub fn state_at(&self, t: f64) -> Result<ThreeBodyState> {
        let (a, b) = (self.t_start(), self.t_end());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(lo..=hi).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside segment [{lo}, {hi}]")));
        }
        let forward = b >= a;
        // First step whose far end reaches t.
        let i = self.steps.partition_point(|s| if forward { s.t1 < t } else { s.t1 > t });
        let step = &self.steps[i.min(self.steps.len() - 1)];
        let s = ((t - step.t0) / step.h).clamp(0.0, 1.0);
        let y = if t == step.t1 { step.y1 } else { step.eval_fraction(s) };
        Ok(ThreeBodyState::from_phase(t, &y))
    }

    /// `n >= 2` states at uniform spacing from `t_start` to `t_end` inclusive.
    pub fn sample_uniform(&self, n: usize) -> Result<Vec<ThreeBodyState>> {
        if n < 2 {
            return Err(Error::Domain("need at least two samples".into()));
        }
        let (a, b) = (self.t_start(), self.t_end());
        (0..n)
            .map(|k| {
                let t = if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 };
                self.state_at(t)
            })
            .collect()
    }

    /// CSV with columns `t, x0 .. y2, vx0 .. vy2` at `n` uniform samples.
    pub fn write_csv<W: Write>(&self, writer: W, n: usize) -> Result<()> {
        write_states_csv(writer, &self.sample_uniform(n)?)
    }
}

pub(crate) fn write_states_csv<W: Write>(writer: W, states: &[ThreeBodyState]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for s in states {
        let mut row = Vec::with_capacity(13);
        row.push(s.t);
        row.extend(s.q.iter().flat_map(|v| [v.x, v.y]));
        row.extend(s.p.iter().flat_map(|v| [v.x, v.y]));
        w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{isosceles_state, PotentialSpec, ShootingParams};
    use crate::integrator::{integrate, IntegratorConfig};

    fn seg(duration: f64) -> TrajectorySegment {
        let st = isosceles_state(&ShootingParams::new(0.75, 0.725966, 0.522742).unwrap()).unwrap();
        integrate(&st, &PotentialSpec::lennard_jones_12_6(), duration, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn step_times_strictly_monotone() {
        let f = seg(2.0).step_times();
        assert!(f.windows(2).all(|w| w[1] > w[0]));
        let b = seg(-2.0).step_times();
        assert!(b.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*b.last().unwrap(), -2.0);
    }

    #[test]
    fn state_at_hits_stored_endpoints_exactly() {
        let s = seg(2.0);
        for st in s.steps() {
            let at = s.state_at(st.t1).unwrap().to_phase();
            assert_eq!(at, st.y1);
        }
        assert_eq!(s.state_at(0.0).unwrap().to_phase(), s.initial_state().to_phase());
        assert!(s.state_at(2.0 + 1e-9).is_err());
        let b = seg(-1.0);
        assert!(b.state_at(-0.5).is_ok());
        assert!(b.state_at(0.5).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        seg(1.0).write_csv(&mut buf, 11).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1].split(',').count(), 13);
    }
}
