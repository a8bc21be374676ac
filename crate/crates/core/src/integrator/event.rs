use super::dop853::{attempt, dense, rhs, Phase};
use super::{IntegratorConfig, Stepper, TrajectorySegment};
use crate::error::{Error, Result};
use crate::geometry::{PotentialSpec, ThreeBodyState};
use crate::numeric::brent;

/// Signed area form `(q1 - q0) x (q2 - q0)`; zero exactly when the three
/// bodies are collinear.
pub fn collinearity(state: &ThreeBodyState) -> f64 {
    state.collinearity()
}

fn phase_collinearity(y: &Phase) -> f64 {
    let (ax, ay) = (y[2] - y[0], y[3] - y[1]);
    let (bx, by) = (y[4] - y[0], y[5] - y[1]);
    ax * by - ay * bx
}

/// First collinear configuration reached from an initial state.
#[derive(Debug, Clone)]
pub struct CollinearEvent {
    pub t_f: f64,
    pub state_f: ThreeBodyState,
    /// Time interval across which the collinearity changes sign.
    pub bracket: (f64, f64),
    /// Collinearity at `t_f` divided by `|q1 - q0| |q2 - q0|`.
    pub normalized_collinearity: f64,
    pub segment: TrajectorySegment,
}

/// Integrates forward until the first sign change of [`collinearity`] and
/// refines the crossing time.
pub fn integrate_to_collinear(
    state0: &ThreeBodyState,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
) -> Result<CollinearEvent> {
    let (ev, seg) = locate_collinear(state0, spec, cfg, true)?;
    Ok(CollinearEvent {
        t_f: ev.t_f,
        state_f: ev.state_f,
        bracket: ev.bracket,
        normalized_collinearity: ev.normalized_collinearity,
        segment: seg.expect("recorded"),
    })
}

pub(crate) struct EventCore {
    pub t_f: f64,
    pub state_f: ThreeBodyState,
    pub bracket: (f64, f64),
    pub normalized_collinearity: f64,
}

/// Event search with optional recording of the dense segment. Scans that
/// only need the terminal state skip the interpolants.
pub(crate) fn locate_collinear(
    state0: &ThreeBodyState,
    spec: &PotentialSpec,
    cfg: &IntegratorConfig,
    record: bool,
) -> Result<(EventCore, Option<TrajectorySegment>)> {
    let g0 = collinearity(state0);
    if g0 == 0.0 || !g0.is_finite() {
        return Err(Error::Domain("initial state is already collinear".into()));
    }
    let mut stepper = Stepper::new(spec, cfg, state0, 1.0)?;
    let t_stop = state0.t + cfg.t_max;
    let mut steps = Vec::new();
    let acc = loop {
        let acc = stepper.step(t_stop)?;
        let g1 = phase_collinearity(acc.y1());
        if g1 == 0.0 || g1.signum() != g0.signum() {
            break acc;
        }
        if record {
            steps.push(acc.dense(spec));
        }
        if stepper.t() >= t_stop {
            return Err(Error::EventNotFound { t_max: cfg.t_max });
        }
    };

    // Coarse root on the interpolant, then polish with exact steps of
    // length tau from the start of the crossing step.
    let h = acc.h;
    let interp = acc.dense(spec);
    let coarse = brent(|s| phase_collinearity(&interp.eval_fraction(s)), 0.0, 1.0, 1e-15, 0.0, 200)
        .map(|b| b.root * h)
        .unwrap_or(h);
    let exact = |tau: f64| attempt(spec, &acc.y0, &acc.k1, tau, cfg.rel_tol, cfg.abs_tol).y_new;
    let g = |tau: f64| if tau == h { phase_collinearity(acc.y1()) } else { phase_collinearity(&exact(tau)) };

    let mut delta = 1e-10 * h.abs().max(1e-3);
    let root = loop {
        let a = (coarse - delta).clamp(0.0, h);
        let b = (coarse + delta).clamp(0.0, h);
        if let Some(r) = brent(g, a, b, 1e-13, 0.0, 200) {
            break r;
        }
        if delta > h.abs() {
            return Err(Error::Consistency("collinear event bracket lost during refinement".into()));
        }
        delta *= 10.0;
    };

    let tau = root.root;
    let y_f = if tau == h { *acc.y1() } else { exact(tau) };
    let t_f = acc.t0 + tau;
    let state_f = ThreeBodyState::from_phase(t_f, &y_f);
    let scale = state_f.distance(0, 1) * state_f.distance(0, 2);
    let core = EventCore {
        t_f,
        bracket: (acc.t0 + root.lo, acc.t0 + root.hi),
        normalized_collinearity: root.f_root / scale,
        state_f,
    };

    let seg = record.then(|| {
        let at = attempt(spec, &acc.y0, &acc.k1, tau, cfg.rel_tol, cfg.abs_tol);
        let k_new = rhs(spec, &at.y_new);
        steps.push(dense(spec, acc.t0, tau, &acc.y0, &at, &k_new));
        TrajectorySegment::from_steps(steps)
    });
    Ok((core, seg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{isosceles_state, ShootingParams, Vec2};
    use crate::integrator::integrate;

    fn lj() -> PotentialSpec {
        PotentialSpec::lennard_jones_12_6()
    }

    fn start(x0: f64, y0: f64, v: f64) -> ThreeBodyState {
        isosceles_state(&ShootingParams::new(x0, y0, v).unwrap()).unwrap()
    }

    #[test]
    fn collinearity_of_start_and_lines() {
        let s = start(0.8, 0.6, 0.3);
        assert!((collinearity(&s) - 6.0 * 0.8 * 0.6).abs() < 1e-14);
        let line = ThreeBodyState::new(
            0.0,
            [Vec2::new(0.0, 0.0), Vec2::new(1.3, 0.4), Vec2::new(-1.3, -0.4)],
            [Vec2::ZERO; 3],
        )
        .unwrap();
        assert_eq!(collinearity(&line), 0.0);
        let on_axis = ThreeBodyState::new(
            0.0,
            [Vec2::new(-1.0, 0.0), Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            [Vec2::ZERO; 3],
        )
        .unwrap();
        assert_eq!(collinearity(&on_axis), 0.0);
    }

    #[test]
    fn homogeneous_event_at_one_twelfth_period() {
        let ev = integrate_to_collinear(
            &start(1.0, 0.985945, 0.234675),
            &PotentialSpec::homogeneous(6.0).unwrap(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!((ev.t_f - 5.1).abs() < 1e-3, "t_f = {}", ev.t_f);
    }

    #[test]
    fn alpha_ends_in_euler_configuration() {
        let ev = integrate_to_collinear(&start(0.75, 0.725966, 0.522742), &lj(), &IntegratorConfig::default()).unwrap();
        let s = &ev.state_f;
        assert!(s.q[0].norm() < 1e-5, "q0 = {:?}", s.q[0]);
        assert!((s.p[1] - s.p[2]).norm() < 1e-5);
        assert!(ev.bracket.1 - ev.bracket.0 <= 1e-12);
        assert!(ev.bracket.0 <= ev.t_f && ev.t_f <= ev.bracket.1);
        assert!(ev.normalized_collinearity.abs() <= 1e-12);
        assert_eq!(ev.segment.t_end(), ev.t_f);
        assert_eq!(ev.segment.final_state().to_phase(), s.to_phase());
    }

    #[test]
    fn bracket_straddles_sign_change() {
        let ev = integrate_to_collinear(&start(0.9, 0.8, 0.3), &lj(), &IntegratorConfig::default()).unwrap();
        let (lo, hi) = ev.bracket;
        assert!(hi - lo <= 1e-12);
        let before = ev.segment.state_at(lo - 1e-6).unwrap();
        assert!(collinearity(&before) > 0.0);
    }

    #[test]
    fn mirror_start_gives_same_event_time() {
        let st = start(0.8, 0.7, 0.4);
        let mirrored = ThreeBodyState::new(
            0.0,
            st.q.map(|q| q.reflect_y()),
            st.p.map(|p| p.reflect_y()),
        )
        .unwrap();
        let cfg = IntegratorConfig::default();
        let a = integrate_to_collinear(&st, &lj(), &cfg).unwrap();
        let b = integrate_to_collinear(&mirrored, &lj(), &cfg).unwrap();
        assert!((a.t_f - b.t_f).abs() < 1e-12, "{} vs {}", a.t_f, b.t_f);
    }

    #[test]
    fn halving_tolerances_changes_event_time_very_little() {
        let st = start(0.75, 0.725966, 0.522742);
        let cfg = IntegratorConfig::default();
        let a = integrate_to_collinear(&st, &lj(), &cfg).unwrap();
        let b = integrate_to_collinear(&st, &lj(), &cfg.scaled_tolerances(0.5)).unwrap();
        assert!((a.t_f - b.t_f).abs() < 1e-9, "{}", a.t_f - b.t_f);
    }

    #[test]
    fn reverse_integration_returns_to_start() {
        let st = start(0.75, 0.725966, 0.522742);
        let cfg = IntegratorConfig::default();
        let ev = integrate_to_collinear(&st, &lj(), &cfg).unwrap();
        let back = integrate(&ev.state_f, &lj(), -ev.t_f, &cfg).unwrap().final_state();
        for i in 0..3 {
            assert!((back.q[i] - st.q[i]).norm() < 10.0 * 1e-9);
            assert!((back.p[i] - st.p[i]).norm() < 10.0 * 1e-9);
        }
    }

    #[test]
    fn event_not_found_before_horizon() {
        let cfg = IntegratorConfig { t_max: 0.05, ..Default::default() };
        let err = integrate_to_collinear(&start(0.75, 0.725966, 0.522742), &lj(), &cfg).unwrap_err();
        assert!(matches!(err, Error::EventNotFound { .. }));
    }

    #[test]
    fn collinear_start_rejected() {
        let line = ThreeBodyState::new(
            0.0,
            [Vec2::new(-2.0, 0.0), Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)],
            [Vec2::new(0.0, 0.1), Vec2::ZERO, Vec2::new(0.0, -0.1)],
        )
        .unwrap();
        assert!(integrate_to_collinear(&line, &lj(), &IntegratorConfig::default()).is_err());
    }
}
