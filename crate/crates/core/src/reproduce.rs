//! End-to-end checks of the published figure-eight results, one report per
//! acceptance criterion.
//!
//! A handful of published values cannot be reproduced as stated; those
//! checks still run and still fail, but carry a waiver naming the reason so
//! that batch runs can tell them apart from regressions.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::continuation::{
    continue_family, locate_special, solve_at_x0, ContinuationSeries, Direction, SpecialKind,
};
use crate::error::{Error, Result};
use crate::geometry::{
    angular_momentum, isosceles_state, linear_momentum, pair_force, pair_potential, total_energy, PotentialSpec,
    ShootingParams, Vec2,
};
use crate::integrator::{integrate, integrate_to_collinear, IntegratorConfig};
use crate::numeric::golden_section_min;
use crate::orbit::{
    build_full_orbit, collision_report, configuration_energy_extrema, direct_full_orbit, orbit_distance,
    orbit_from_record, verify_choreography, DEFAULT_SAMPLES,
};
use crate::shooting::{find_seed_cells, newton_solve, residuals, scan_grid, SolutionRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Criteria 1, 2, 6 (beta only), 8 (closed forms only) and 11.
    Quick,
    Full,
}

impl Profile {
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Profile::Quick => &[1, 2, 6, 8, 11],
            Profile::Full => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Set for checks known to fail for a documented reason.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waived: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        let name = name.into();
        let waived = KNOWN_DEVIATIONS.iter().find(|(n, _)| *n == name).map(|(_, why)| why.to_string());
        Check { name, passed, detail: detail.into(), waived }
    }

    fn within(name: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        let err = (got - want).abs();
        Check::new(name, err <= tol, format!("got {got:.9}, want {want} +- {tol:e} (off by {err:.2e})"))
    }

    fn at_most(name: impl Into<String>, got: f64, bound: f64) -> Self {
        Check::new(name, got <= bound, format!("{got:.3e} <= {bound:e}"))
    }

    fn count(name: impl Into<String>, got: Option<u32>, want: u32) -> Self {
        Check::new(name, got == Some(want), format!("got {got:?}, want {want}"))
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Check::new(name, false, format!("error: {err}"))
    }
}

/// Checks that fail against the literal published value, with the reason.
const KNOWN_DEVIATIONS: &[(&str, &str)] = &[
    (
        "euler minimum equals -5546/10924",
        "the published fraction disagrees with its own decimal -0.507781; the exact minimum is -5547/10924",
    ),
    ("residual at beta (0.726, 0.766265, 0.302694)", "no root at x0 = 0.726: the beta family turns at x0 = 0.72666"),
    ("newton returns to beta (0.726, 0.766265, 0.302694)", "no root at x0 = 0.726: the beta family turns at x0 = 0.72666"),
    (
        "residual at alpha (1, 0.513969, 0.396537)",
        "six published digits leave a residual of 4e-4 on this ill-conditioned branch; newton returns to the same digits",
    ),
    (
        "residual at alpha (1.5, 0.502649, 0.181062)",
        "six published digits leave a residual of 3e-2 on this ill-conditioned branch; newton returns to the same digits",
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionReport {
    /// Every check passed as stated.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Every check passed or failed only for a documented reason.
    pub fn passed_with_waivers(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.waived.is_some())
    }

    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let waived = self.checks.iter().filter(|c| !c.passed && c.waived.is_some()).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{verdict} criterion {:>2}: {} ({ok}/{} checks, {:.1} s)",
            self.id,
            self.title,
            self.checks.len(),
            self.seconds
        );
        if !self.passed() && self.passed_with_waivers() {
            let _ = write!(line, " [{waived} documented deviation(s)]");
        }
        line
    }
}

/// Fixed-width table of all reports with one row per check.
pub fn format_table(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}", r.summary_line());
        for c in &r.checks {
            let mark = match (c.passed, &c.waived) {
                (true, _) => "ok  ",
                (false, Some(_)) => "FAIL*",
                (false, None) => "FAIL",
            };
            let _ = writeln!(out, "    {mark:<5} {}: {}", c.name, c.detail);
            if let (false, Some(why)) = (c.passed, &c.waived) {
                let _ = writeln!(out, "          * {why}");
            }
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{passed}/{} criteria pass as stated", reports.len());
    out
}

type Triple = (f64, f64, f64);

const ALPHA: Triple = (0.75, 0.725966, 0.522742);
const ALPHA_PRIME: Triple = (0.75, 0.553223, 0.615805);
const ALPHA_UPPER: [Triple; 3] = [(0.6812, 0.617578, 0.660119), (1.0, 0.983588, 0.232296), (1.5, 1.478621, 0.0694721)];
const ALPHA_LOWER: [Triple; 3] = [ALPHA_PRIME, (1.0, 0.513969, 0.396537), (1.5, 0.502649, 0.181062)];

/// `(label, [(x0, y0, v, E); 3])`: smallest-x0 orbit first, then the higher
/// and lower energy orbits at larger x0.
const BRANCHES: [(&str, [(f64, f64, f64, f64); 3]); 4] = [
    ("beta", [(0.726, 0.766265, 0.302694, 0.0274632), (1.0, 0.956733, 0.144241, 0.00263843), (1.0, 1.241130, 0.0717890, 0.000697053)]),
    ("gamma", [(0.6007, 0.748371, 0.371779, 0.0622734), (0.8, 1.081836, 0.126051, 0.00561328), (0.8, 1.136739, 0.0749665, -0.00519619)]),
    ("delta", [(0.6501, 0.597985, 0.304229, -0.143858), (0.84, 0.827038, 0.126408, -0.0330865), (0.84, 0.848830, 0.0757119, -0.0387688)]),
    ("epsilon", [(0.7074, 0.579781, 0.204620, -0.211945), (0.91, 0.803912, 0.0857343, -0.0497687), (0.91, 0.811359, 0.0540501, -0.0521151)]),
];

const BRANCH_N0: [u32; 4] = [8, 8, 16, 24];

fn params(t: Triple) -> ShootingParams {
    ShootingParams { x0: t.0, y0: t.1, v: t.2 }
}

/// Runs criteria and caches continuation series shared between them.
pub struct Reproducer {
    run: RunConfig,
    lj: PotentialSpec,
    series: HashMap<&'static str, ContinuationSeries>,
    /// Every solution converged so far, for the period bound.
    found: Vec<SolutionRecord>,
}

impl Reproducer {
    pub fn new(run: &RunConfig) -> Self {
        Reproducer { run: run.clone(), lj: PotentialSpec::lennard_jones_12_6(), series: HashMap::new(), found: Vec::new() }
    }

    fn cfg(&self) -> &IntegratorConfig {
        &self.run.integrator
    }

    fn solve(&mut self, t: Triple, spec: &PotentialSpec) -> Result<SolutionRecord> {
        let rec = newton_solve(&params(t), spec, &self.run.integrator, self.run.solver.tol, self.run.solver.max_iter)?;
        self.found.push(rec.clone());
        Ok(rec)
    }

    /// The family through `start`, continued both ways inside `x0_range`,
    /// with its special points located.
    fn series(&mut self, label: &'static str) -> Result<ContinuationSeries> {
        if let Some(s) = self.series.get(label) {
            return Ok(s.clone());
        }
        let (start, x0_range) = match label {
            "alpha" => (ALPHA, (0.6, 2.15)),
            _ => {
                let (_, pts) = BRANCHES.iter().find(|(l, _)| *l == label).expect("known label");
                let (x0, y0, v, _) = pts[2];
                ((x0, y0, v), (0.55, 1.25))
            }
        };
        let lj = self.lj;
        let rec = self.solve(start, &lj)?.with_label(label);
        let ccfg = crate::continuation::ContinuationConfig { x0_range: Some(x0_range), ..self.run.continuation.clone() };
        let cfg = self.run.integrator.clone();
        let down = continue_family(&rec, &lj, &cfg, &ccfg, Direction::Decreasing)?;
        let up = continue_family(&rec, &lj, &cfg, &ccfg, Direction::Increasing)?;
        let mut series = ContinuationSeries::join(down, up)?;
        series.locate_specials(&cfg, &ccfg)?;
        self.found.extend(series.points.iter().cloned());
        self.found.extend(series.special_points.iter().map(|p| p.record.clone()));
        self.series.insert(label, series.clone());
        Ok(series)
    }

    fn special(&mut self, label: &'static str, kind: SpecialKind) -> Result<SolutionRecord> {
        let series = self.series(label)?;
        match series.special_points.iter().find(|p| p.kind == kind) {
            Some(p) => Ok(p.record.clone()),
            None => {
                let ccfg = self.run.continuation.clone();
                Ok(locate_special(&series, kind, self.cfg(), &ccfg)?.record)
            }
        }
    }

    pub fn run(&mut self, profile: Profile) -> Vec<CriterionReport> {
        profile.criteria().iter().map(|&id| self.criterion(id, profile)).collect()
    }

    pub fn criterion(&mut self, id: u32, profile: Profile) -> CriterionReport {
        let start = Instant::now();
        let (title, checks) = match id {
            1 => ("homogeneous a=6 baseline", self.c1()),
            2 => ("solution alpha at x0 = 0.75", self.c2()),
            3 => ("seed cells of the x0 = 0.75 scan", self.c3()),
            4 => ("alpha fold and branch points", self.c4()),
            5 => ("residuals and energies at published branch points", self.c5()),
            6 => ("collision counts", self.c6(profile)),
            7 => ("E = 0 solution on gamma", self.c7()),
            8 => ("energy extrema", self.c8(profile)),
            9 => ("E x0^6 asymptotics on alpha", self.c9()),
            10 => ("period bound", self.c10()),
            11 => ("property suite", self.c11()),
            _ => ("unknown criterion", vec![Check::new("criterion exists", false, format!("no criterion {id}"))]),
        };
        CriterionReport { id, title: title.to_string(), checks, seconds: start.elapsed().as_secs_f64() }
    }

    fn c1(&mut self) -> Vec<Check> {
        let t0 = Instant::now();
        let spec = PotentialSpec::homogeneous(6.0).expect("valid");
        match self.solve((1.0, 0.98, 0.23), &spec) {
            Ok(r) => vec![
                Check::within("y0", r.params.y0, 0.985945, 1e-4),
                Check::within("v", r.params.v, 0.234675, 1e-4),
                Check::within("period", r.period, 61.2, 1e-2),
                Check::within("energy", r.energy, 0.0467827, 1e-4),
                Check::at_most("runtime [s]", t0.elapsed().as_secs_f64(), 10.0),
            ],
            Err(e) => vec![Check::failed("converges from (0.98, 0.23)", &e)],
        }
    }

    fn c2(&mut self) -> Vec<Check> {
        let t0 = Instant::now();
        let lj = self.lj;
        match self.solve((0.75, 0.72, 0.53), &lj) {
            Ok(r) => vec![
                Check::within("y0", r.params.y0, ALPHA.1, 1e-4),
                Check::within("v", r.params.v, ALPHA.2, 1e-4),
                Check::at_most("residual", r.residual_norm, self.run.solver.tol),
                Check::at_most("runtime [s]", t0.elapsed().as_secs_f64(), 10.0),
            ],
            Err(e) => vec![Check::failed("converges from (0.72, 0.53)", &e)],
        }
    }

    fn c3(&mut self) -> Vec<Check> {
        let mut checks = Vec::new();
        let (y0_range, v_range) = ((0.45, 1.3), (0.05, 0.7));
        for (n, limit) in [(200usize, 1800.0), (60, 180.0)] {
            let t0 = Instant::now();
            let grid = match scan_grid(0.75, y0_range, v_range, n, n, &self.lj, self.cfg()) {
                Ok(g) => g,
                Err(e) => {
                    checks.push(Check::failed(format!("{n}x{n} scan"), &e));
                    continue;
                }
            };
            let cells = find_seed_cells(&grid);
            let dy = (y0_range.1 - y0_range.0) / (n - 1) as f64;
            let dv = (v_range.1 - v_range.0) / (n - 1) as f64;
            let near = |t: Triple| {
                cells.seeds.iter().any(|c| (c.seed.y0 - t.1).abs() <= dy && (c.seed.v - t.2).abs() <= dv)
            };
            let elapsed = t0.elapsed().as_secs_f64();
            if n == 200 {
                let k = cells.seeds.len();
                checks.push(Check::new("200x200 seed cells >= 6", k >= 6, format!("{k} cells")));
                checks.push(Check::new("200x200 cell within one spacing of alpha", near(ALPHA), ""));
                checks.push(Check::new("200x200 cell within one spacing of alpha'", near(ALPHA_PRIME), ""));
                checks.push(Check::at_most("200x200 runtime [s]", elapsed, limit));
            } else {
                checks.push(Check::new("60x60 cell within one spacing of alpha", near(ALPHA), ""));
                checks.push(Check::at_most("60x60 runtime [s]", elapsed, limit));
            }
        }
        checks
    }

    fn c4(&mut self) -> Vec<Check> {
        let mut checks = Vec::new();
        match self.special("alpha", SpecialKind::X0Min) {
            Ok(r) => {
                checks.push(Check::within("fold x0", r.params.x0, 0.6812, 2e-3));
                checks.push(Check::within("fold y0", r.params.y0, 0.617578, 2e-3));
            }
            Err(e) => checks.push(Check::failed("fold located", &e)),
        }
        let series = match self.series("alpha") {
            Ok(s) => s,
            Err(e) => return vec![Check::failed("alpha series", &e)],
        };
        checks.push(Check::new(
            "fold recorded in series",
            !series.fold_points.is_empty(),
            format!("{} fold(s), {} points", series.fold_points.len(), series.len()),
        ));
        for (x0, want, lower) in [(1.0, (0.513969, 0.396537), true), (1.5, (1.478621, 0.0694721), false)] {
            let branch = if lower { "lower" } else { "upper" };
            match solve_at_x0(&series, x0, self.cfg(), self.run.solver.tol, self.run.solver.max_iter) {
                Ok(rs) => {
                    let pick = if lower {
                        rs.iter().min_by(|a, b| a.params.y0.total_cmp(&b.params.y0))
                    } else {
                        rs.iter().max_by(|a, b| a.params.y0.total_cmp(&b.params.y0))
                    }
                    .expect("nonempty");
                    checks.push(Check::within(format!("{branch} branch y0 at x0 = {x0}"), pick.params.y0, want.0, 1e-4));
                    checks.push(Check::within(format!("{branch} branch v at x0 = {x0}"), pick.params.v, want.1, 1e-4));
                }
                Err(e) => checks.push(Check::failed(format!("{branch} branch at x0 = {x0}"), &e)),
            }
        }
        checks
    }

    fn c5(&mut self) -> Vec<Check> {
        let mut checks = Vec::new();
        let mut triples: Vec<(&str, Triple, Option<f64>)> = Vec::new();
        for t in ALPHA_UPPER.iter().chain(ALPHA_LOWER.iter()) {
            triples.push(("alpha", *t, None));
        }
        for (label, pts) in BRANCHES {
            for (x0, y0, v, e) in pts {
                triples.push((label, (x0, y0, v), Some(e)));
            }
        }
        let lj = self.lj;
        for (label, t, energy) in triples {
            let tag = format!("{label} ({}, {}, {})", t.0, t.1, t.2);
            match residuals(&params(t), &lj, self.cfg()) {
                Ok(s) => match s.raw_norm() {
                    Some(r) => checks.push(Check::at_most(format!("residual at {tag}"), r, 1e-4)),
                    None => checks.push(Check::new(format!("residual at {tag}"), false, s.status.as_str())),
                },
                Err(e) => checks.push(Check::failed(format!("residual at {tag}"), &e)),
            }
            if let Some(want) = energy {
                let got = isosceles_state(&params(t)).and_then(|s| total_energy(&s, &lj));
                match got {
                    Ok(e) => checks.push(Check::within(format!("energy at {tag}"), e, want, 1e-4)),
                    Err(e) => checks.push(Check::failed(format!("energy at {tag}"), &e)),
                }
            }
            let name = format!("newton returns to {tag}");
            match self.solve(t, &lj) {
                Ok(r) => {
                    let off = (r.params.y0 - t.1).abs().max((r.params.v - t.2).abs());
                    checks.push(Check::at_most(name, off, 1e-4));
                }
                Err(e) => checks.push(Check::failed(name, &e)),
            }
        }
        checks
    }

    fn n0_check(&mut self, name: String, t: Triple, want: u32) -> Check {
        let lj = self.lj;
        match self.solve(t, &lj) {
            Ok(r) => Check::count(name, r.n0, want),
            Err(e) => Check::failed(name, &e),
        }
    }

    fn c6(&mut self, profile: Profile) -> Vec<Check> {
        let mut checks = Vec::new();
        let branches: &[(&str, [(f64, f64, f64, f64); 3])] =
            if profile == Profile::Quick { &BRANCHES[..1] } else { &BRANCHES[..] };
        for (k, (label, pts)) in branches.iter().enumerate() {
            let want = BRANCH_N0[k];
            // The smallest-x0 orbit of each family is its fold.
            match self.special(label, SpecialKind::X0Min) {
                Ok(r) => checks.push(Check::count(
                    format!("n0 of smallest-x0 {label} orbit (x0 = {:.6})", r.params.x0),
                    r.n0,
                    want,
                )),
                Err(e) => checks.push(Check::failed(format!("smallest-x0 {label} orbit"), &e)),
            }
            for (i, (x0, y0, v, _)) in pts.iter().enumerate() {
                if i == 0 && *label == "beta" {
                    // No root at the published x0: count on the orbit assembled from the published triple itself.
                    let name = format!("n0 of {label} ({x0}, {y0}, {v}) as published");
                    let got = isosceles_state(&params((*x0, *y0, *v)))
                        .and_then(|s| integrate_to_collinear(&s, &self.lj, &self.run.integrator))
                        .and_then(|ev| build_full_orbit(&ev.segment, ev.t_f, DEFAULT_SAMPLES, &self.lj))
                        .and_then(|o| collision_report(&o, &self.lj));
                    checks.push(match got {
                        Ok(rep) => Check::count(name, Some(rep.n0), want),
                        Err(e) => Check::failed(name, &e),
                    });
                    continue;
                }
                checks.push(self.n0_check(format!("n0 of {label} ({x0}, {y0}, {v})"), (*x0, *y0, *v), want));
            }
        }
        if profile == Profile::Full {
            for t in std::iter::once(&ALPHA).chain(ALPHA_UPPER.iter()) {
                checks.push(self.n0_check(format!("n0 of alpha upper ({}, {}, {})", t.0, t.1, t.2), *t, 0));
            }
            for t in ALPHA_LOWER {
                checks.push(self.n0_check(format!("n0 of alpha lower ({}, {}, {})", t.0, t.1, t.2), t, 4));
            }
        }
        checks
    }

    fn c7(&mut self) -> Vec<Check> {
        match self.special("gamma", SpecialKind::EZero) {
            Ok(r) => vec![
                Check::within("x0", r.params.x0, 0.671188, 1e-3),
                Check::at_most("|E|", r.energy.abs(), 1e-6),
                Check::within("y0", r.params.y0, 0.893818, 1e-4),
                Check::within("v", r.params.v, 0.188131, 1e-4),
            ],
            Err(e) => vec![Check::failed("E = 0 point located", &e)],
        }
    }

    fn c8(&mut self, profile: Profile) -> Vec<Check> {
        let mut checks = Vec::new();
        if profile == Profile::Full {
            match self.special("alpha", SpecialKind::EMax) {
                Ok(r) => {
                    checks.push(Check::within("E max", r.energy, 0.295542, 1e-3));
                    checks.push(Check::within("x0 at E max", r.params.x0, 0.686512, 1e-3));
                }
                Err(e) => checks.push(Check::failed("E max located", &e)),
            }
        }
        let ex = match configuration_energy_extrema(&self.lj) {
            Ok(ex) => ex,
            Err(e) => {
                checks.push(Check::failed("closed forms", &e));
                return checks;
            }
        };
        let u = |r: f64| pair_potential(r, &self.lj).unwrap_or(f64::INFINITY);
        // Oracle for the isosceles minimum: nested golden-section search.
        let inner = |y0: f64| {
            golden_section_min(|x0| Ok::<_, ()>(u(2.0 * y0) + 2.0 * u((9.0 * x0 * x0 + y0 * y0).sqrt())), 0.2, 0.6, 1e-11, 400)
                .map(|(_, e)| e)
        };
        let iso = golden_section_min(inner, 0.4, 0.8, 1e-11, 400).map(|(_, e)| e).unwrap_or(f64::NAN);
        let (r_num, euler_num) = golden_section_min(|r| Ok::<_, ()>(2.0 * u(r) + u(2.0 * r)), 0.9, 1.5, 1e-12, 400)
            .unwrap_or((f64::NAN, f64::NAN));
        checks.push(Check::within("isosceles minimum equals -3/4", ex.isosceles_min, -0.75, 1e-9));
        checks.push(Check::within("isosceles minimum vs numeric oracle", iso, ex.isosceles_min, 1e-9));
        checks.push(Check::within("euler minimum equals -5546/10924", ex.euler_min, -5546.0 / 10924.0, 1e-9));
        checks.push(Check::within("euler minimum equals -0.507781", ex.euler_min, -0.507781, 1e-6));
        checks.push(Check::within("euler minimum vs numeric oracle", euler_num, ex.euler_min, 1e-9));
        checks.push(Check::within("euler spacing", ex.euler_r, 1.121, 5e-4));
        checks.push(Check::within("euler spacing vs numeric oracle", r_num, ex.euler_r, 1e-5));
        checks
    }

    fn c9(&mut self) -> Vec<Check> {
        let series = match self.series("alpha") {
            Ok(s) => s,
            Err(e) => return vec![Check::failed("alpha series", &e)],
        };
        let xs = [2.0, 2.05, 2.1];
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for x0 in xs {
            match solve_at_x0(&series, x0, self.cfg(), self.run.solver.tol, self.run.solver.max_iter) {
                Ok(rs) if rs.len() >= 2 => {
                    let hi = rs.iter().max_by(|a, b| a.params.y0.total_cmp(&b.params.y0)).expect("nonempty");
                    let lo = rs.iter().min_by(|a, b| a.params.y0.total_cmp(&b.params.y0)).expect("nonempty");
                    upper.push((x0, hi.energy));
                    lower.push((x0, lo.energy));
                }
                Ok(rs) => return vec![Check::new(format!("both branches at x0 = {x0}"), false, format!("{} found", rs.len()))],
                Err(e) => return vec![Check::failed(format!("both branches at x0 = {x0}"), &e)],
            }
        }
        // Least-squares c in E = c / x0^6.
        let fit = |pts: &[(f64, f64)]| {
            let num: f64 = pts.iter().map(|(x, e)| e * x.powi(-6)).sum();
            let den: f64 = pts.iter().map(|(x, _)| x.powi(-12)).sum();
            num / den
        };
        let (cu, cl) = (fit(&upper), fit(&lower));
        vec![
            Check::new("upper branch E x0^6 = 0.047 within 10%", ((cu - 0.047) / 0.047).abs() <= 0.1, format!("{cu:.5}")),
            Check::new("lower branch E x0^6 = 0.035 within 10%", ((cl - 0.035) / 0.035).abs() <= 0.1, format!("{cl:.5}")),
        ]
    }

    fn c10(&mut self) -> Vec<Check> {
        let t_min = match self.special("alpha", SpecialKind::TMin) {
            Ok(r) => r.period,
            Err(e) => return vec![Check::failed("alpha T min", &e)],
        };
        // Make sure the solutions of the other criteria are in `found`.
        for label in ["beta", "gamma", "delta", "epsilon"] {
            if let Err(e) = self.series(label) {
                return vec![Check::failed(format!("{label} series"), &e)];
            }
        }
        let (shortest, at) = self
            .found
            .iter()
            .map(|r| (r.period, r.params))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty");
        vec![
            Check::within("minimum T on alpha", t_min, 14.5, 0.5),
            Check::new(
                "no solution found has smaller T",
                shortest >= t_min - 1e-9,
                format!("{} solutions, shortest T = {shortest:.6} at {at:?}", self.found.len()),
            ),
        ]
    }

    fn c11(&mut self) -> Vec<Check> {
        let t0 = Instant::now();
        let mut checks = Vec::new();
        let cfg = self.run.integrator.clone();
        let lj = self.lj;
        let alpha = match self.solve(ALPHA, &lj) {
            Ok(r) => r,
            Err(e) => return vec![Check::failed("alpha converges", &e)],
        };

        // Conservation over one period of direct integration.
        match isosceles_state(&alpha.params).and_then(|s0| Ok((s0, integrate(&s0, &lj, alpha.period, &cfg)?))) {
            Ok((s0, seg)) => {
                let s1 = seg.final_state();
                let e0 = total_energy(&s0, &lj).unwrap_or(f64::NAN);
                let e1 = total_energy(&s1, &lj).unwrap_or(f64::NAN);
                let scale: f64 = (0..3).map(|i| s0.q[i].norm() * s0.p[i].norm()).sum();
                checks.push(Check::at_most("relative energy drift per period", ((e1 - e0) / e0).abs(), 1e-9));
                checks.push(Check::at_most("linear momentum drift per period", linear_momentum(&s1).norm(), 1e-9));
                checks.push(Check::at_most(
                    "relative angular momentum drift per period",
                    (angular_momentum(&s1) - angular_momentum(&s0)).abs() / scale,
                    1e-9,
                ));
            }
            Err(e) => checks.push(Check::failed("direct period integration", &e)),
        }

        match orbit_from_record(&alpha, &cfg, DEFAULT_SAMPLES) {
            Ok(o) => checks.push(Check::at_most("choreography residual", verify_choreography(&o, 1e-6).max_residual, 1e-6)),
            Err(e) => checks.push(Check::failed("alpha orbit", &e)),
        }

        for (name, t) in [("alpha'", ALPHA_PRIME), ("alpha fold", ALPHA_UPPER[0])] {
            let check_name = format!("symmetry vs direct orbit, {name}");
            let res = self.solve(t, &lj).and_then(|r| {
                let sym = orbit_from_record(&r, &cfg, DEFAULT_SAMPLES)?;
                let direct = direct_full_orbit(&r.params, &lj, &cfg, DEFAULT_SAMPLES)?;
                orbit_distance(&sym, &direct)
            });
            checks.push(match res {
                Ok(d) => Check::at_most(check_name, d, 1e-6),
                Err(e) => Check::failed(check_name, &e),
            });
        }

        let homogeneous = PotentialSpec::homogeneous(6.0).expect("valid");
        let mut worst: f64 = 0.0;
        for spec in [lj, homogeneous] {
            for k in 0..=110 {
                let r = 0.8 + 0.02 * k as f64;
                let h = 1e-6;
                let fd = -(pair_potential(r + h, &spec).unwrap_or(f64::NAN) - pair_potential(r - h, &spec).unwrap_or(f64::NAN))
                    / (2.0 * h);
                let f = pair_force(Vec2::new(r, 0.0), &spec).map(|v| v.x).unwrap_or(f64::NAN);
                let rel = (f - fd).abs() / fd.abs().max(1e-300);
                // Near the force-free separation compare against the force scale instead.
                let rel = if fd.abs() < 1e-3 { (f - fd).abs() } else { rel };
                worst = worst.max(rel);
            }
        }
        checks.push(Check::at_most("pair force vs finite difference (relative)", worst, 1e-6));

        match self.solve((1.0, 0.985945, 0.234675), &homogeneous) {
            Ok(base) => {
                for lambda in [0.5f64, 2.0] {
                    let p = base.params;
                    let scaled = (lambda * p.x0, lambda * p.y0, lambda.powf(-3.0) * p.v);
                    let name = format!("scaled homogeneous zero at lambda = {lambda}");
                    match residuals(&params(scaled), &homogeneous, &cfg) {
                        Ok(s) => checks.push(Check::at_most(name, s.norm().unwrap_or(f64::INFINITY), 1e-8)),
                        Err(e) => checks.push(Check::failed(name, &e)),
                    }
                }
            }
            Err(e) => checks.push(Check::failed("homogeneous base solution", &e)),
        }

        let back = isosceles_state(&alpha.params).and_then(|s0| {
            let fwd = integrate(&s0, &lj, alpha.t_f, &cfg)?;
            let s1 = fwd.final_state();
            let rev = integrate(&s1, &lj, -alpha.t_f, &cfg)?;
            let s2 = rev.final_state();
            Ok((0..3).map(|i| (s2.q[i] - s0.q[i]).norm().max((s2.p[i] - s0.p[i]).norm())).fold(0.0, f64::max))
        });
        match back {
            Ok(d) => checks.push(Check::at_most("time reversal recovers the start", d, 1e-8)),
            Err(e) => checks.push(Check::failed("time reversal", &e)),
        }
        checks.push(Check::at_most("runtime [s]", t0.elapsed().as_secs_f64(), 120.0));
        checks
    }
}
