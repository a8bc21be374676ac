use figure_eight::config::RunConfig;
use figure_eight::continuation::{continue_family, ContinuationConfig, Direction};
use figure_eight::export::{read_record, write_csv, write_json, Provenance};
use figure_eight::geometry::isosceles_state;
use figure_eight::integrator::{integrate, IntegratorConfig};
use figure_eight::orbit::{collision_report, orbit_from_record, orbit_summary, verify_choreography};
use figure_eight::shooting::{find_seeds, newton_solve, scan_grid, DEFAULT_TOL};
use figure_eight::{PotentialSpec, ShootingParams};

#[test]
fn scan_seed_solve_analyze() {
    let lj = PotentialSpec::lennard_jones_12_6();
    let cfg = IntegratorConfig::default();
    let grid = scan_grid(0.75, (0.65, 0.8), (0.45, 0.6), 12, 12, &lj, &cfg).unwrap();
    let seeds = find_seeds(&grid);
    assert!(!seeds.is_empty());
    let recs: Vec<_> = seeds.iter().filter_map(|s| newton_solve(s, &lj, &cfg, DEFAULT_TOL, 40).ok()).collect();
    let alpha = recs
        .iter()
        .find(|r| (r.params.y0 - 0.725966).abs() < 1e-5 && (r.params.v - 0.522742).abs() < 1e-5)
        .expect("alpha among the solved seeds");
    assert_eq!(alpha.n0, Some(0));

    let orbit = orbit_from_record(alpha, &cfg, 1200).unwrap();
    assert!(verify_choreography(&orbit, 1e-8).within_tol);
    let summary = orbit_summary(&orbit).unwrap();
    assert!((summary.period - alpha.period).abs() < 1e-12);
    assert!(summary.energy_spread < 1e-9);
    assert_eq!(collision_report(&orbit, &lj).unwrap().n0, 0);

    let dir = tempfile::tempdir().unwrap();
    let prov = Provenance::new("pipeline", &RunConfig::default()).with_record(alpha);
    let json = dir.path().join("alpha.json");
    write_json(&json, &prov, alpha).unwrap();
    let csv = dir.path().join("alpha_orbit.csv");
    write_csv(&csv, &prov, |w| orbit.write_csv(w)).unwrap();
    assert_eq!(&read_record(&json).unwrap().0, alpha);
    assert_eq!(&read_record(&csv).unwrap().0, alpha);
}

#[test]
fn short_continuation_stays_on_solutions() {
    let lj = PotentialSpec::lennard_jones_12_6();
    let cfg = IntegratorConfig::default();
    let start = newton_solve(&ShootingParams::new(0.84, 0.827038, 0.126408).unwrap(), &lj, &cfg, DEFAULT_TOL, 40)
        .unwrap()
        .with_label("delta");
    let ccfg = ContinuationConfig { n_steps: 8, ..Default::default() };
    let series = continue_family(&start, &lj, &cfg, &ccfg, Direction::Increasing).unwrap();
    assert_eq!(series.len(), 9);
    for (a, b) in series.points.iter().zip(&series.points[1..]) {
        assert!(b.params.x0 > a.params.x0);
        assert!(b.residual_norm <= DEFAULT_TOL);
        assert_eq!(b.n0, Some(16));
    }
}

#[test]
fn homogeneous_solution_has_the_published_period() {
    let spec = PotentialSpec::homogeneous(6.0).unwrap();
    let cfg = IntegratorConfig::default();
    let rec = newton_solve(&ShootingParams::new(1.0, 0.98, 0.23).unwrap(), &spec, &cfg, DEFAULT_TOL, 40).unwrap();
    assert!((rec.period - 61.2).abs() < 1e-2);
    assert!((rec.energy - 0.0467827).abs() < 1e-4);
    assert_eq!(rec.n0, None);
}

/// One full period of direct integration from the published homogeneous
/// triple returns to the start within 1e-4. The orbit is too unstable for
/// this in double precision, so the test fails when run.
#[test]
#[ignore]
fn homogeneous_orbit_closes_after_one_period() {
    let spec = PotentialSpec::homogeneous(6.0).unwrap();
    let cfg = IntegratorConfig::default();
    let s0 = isosceles_state(&ShootingParams::new(1.0, 0.985945, 0.234675).unwrap()).unwrap();
    let s1 = match integrate(&s0, &spec, 61.2, &cfg) {
        Ok(seg) => seg.final_state(),
        Err(e) => panic!("integration over one period failed: {e}"),
    };
    let err = (0..3).map(|i| (s1.q[i] - s0.q[i]).norm().max((s1.p[i] - s0.p[i]).norm())).fold(0.0, f64::max);
    assert!(err <= 1e-4, "closure error {err:.3e}");
}
