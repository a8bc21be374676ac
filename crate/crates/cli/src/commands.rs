use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use figure_eight::config::RunConfig;
use figure_eight::continuation::{continue_family, ContinuationSeries, Direction};
use figure_eight::export::{read_record, write_csv, write_json, Provenance};
use figure_eight::orbit::{collision_report, orbit_from_record, orbit_summary, verify_choreography};
use figure_eight::reproduce::{format_table, Profile, Reproducer};
use figure_eight::shooting::{find_seed_cells, newton_solve, scan_grid};
use figure_eight::{Error, Result, ShootingParams};
use log::info;
use serde_json::json;

pub enum Directions {
    Both,
    One(Direction),
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

pub fn scan(cfg: &RunConfig) -> Result<ExitCode> {
    let s = &cfg.scan;
    let grid = scan_grid(s.x0, s.y0_range, s.v_range, s.n_y0, s.n_v, &cfg.potential, &cfg.integrator)?;
    let seeds = find_seed_cells(&grid);
    let prov = Provenance::new(command_line(), cfg);
    let dir = &cfg.output_dir;
    write_csv(&dir.join("scan.csv"), &prov, |w| grid.write_csv(w))?;
    write_json(&dir.join("scan.json"), &prov, &grid.to_matrices_json())?;
    write_json(&dir.join("seeds.json"), &prov, &seeds)?;
    println!("{} seed cell(s) on {}x{} grid at x0 = {}", seeds.seeds.len(), s.n_y0, s.n_v, s.x0);
    for c in seeds.seeds.iter().take(12) {
        println!("  y0 = {:.6}  v = {:.6}", c.seed.y0, c.seed.v);
    }
    if seeds.seeds.len() > 12 {
        println!("  ... full list in {}", dir.join("seeds.json").display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn solve(cfg: &RunConfig, seed: (f64, f64, f64), name: &str) -> Result<ExitCode> {
    let seed = ShootingParams::new(seed.0, seed.1, seed.2)?;
    let rec = newton_solve(&seed, &cfg.potential, &cfg.integrator, cfg.solver.tol, cfg.solver.max_iter)?;
    let orbit = orbit_from_record(&rec, &cfg.integrator, cfg.orbit.n_samples)?;
    let prov = Provenance::new(command_line(), cfg).with_record(&rec);
    write_json(&cfg.output_dir.join(format!("{name}.json")), &prov, &rec)?;
    write_csv(&cfg.output_dir.join(format!("{name}_orbit.csv")), &prov, |w| orbit.write_csv(w))?;
    let p = rec.params;
    println!(
        "x0 = {:.6}  y0 = {:.6}  v = {:.7}  T = {:.6}  E = {:.7}  n0 = {}  |F| = {:.2e}",
        p.x0,
        p.y0,
        p.v,
        rec.period,
        rec.energy,
        rec.n0.map_or("-".to_string(), |n| n.to_string()),
        rec.residual_norm
    );
    Ok(ExitCode::SUCCESS)
}

pub fn continue_series(
    cfg: &RunConfig,
    path: &Path,
    directions: Directions,
    label: Option<&str>,
    specials: bool,
) -> Result<ExitCode> {
    let (record, _) = read_record(path)?;
    let label = label
        .map(str::to_string)
        .or_else(|| record.series_label.clone())
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "series".to_string());
    let record = record.with_label(label.clone());
    let spec = record.potential;
    let run = |d| continue_family(&record, &spec, &cfg.integrator, &cfg.continuation, d);
    let mut series = match directions {
        Directions::Both => ContinuationSeries::join(run(Direction::Decreasing)?, run(Direction::Increasing)?)?,
        Directions::One(d) => run(d)?,
    };
    if specials {
        series.locate_specials(&cfg.integrator, &cfg.continuation)?;
    }
    info!("series {label}: {} points, stop {:?}", series.len(), series.stop);

    let prov = Provenance::new(command_line(), cfg).with_record(&record);
    write_csv(&cfg.output_dir.join(format!("{label}_series.csv")), &prov, |w| series.write_csv(w))?;
    let folds: Vec<_> = series.fold_points.iter().map(|&i| &series.points[i]).collect();
    let data = json!({
        "label": label,
        "n_points": series.len(),
        "stop": series.stop,
        "fold_points": folds,
        "special_points": series.special_points,
    });
    write_json(&cfg.output_dir.join(format!("{label}_special.json")), &prov, &data)?;

    println!("{label}: {} points, {} fold(s), stop {:?}", series.len(), series.fold_points.len(), series.stop);
    for sp in &series.special_points {
        let p = sp.record.params;
        println!(
            "  {:<7} x0 = {:.6}  y0 = {:.6}  v = {:.6}  T = {:.4}  E = {:.6}",
            sp.kind.as_str(),
            p.x0,
            p.y0,
            p.v,
            sp.record.period,
            sp.record.energy
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn analyze(cfg: &RunConfig, input: &Path, explicit_config: bool) -> Result<ExitCode> {
    let (record, embedded) = read_record(input)?;
    // Rebuild with the integrator the record was produced with unless told otherwise.
    let integrator = match embedded {
        Some(e) if !explicit_config => e.integrator,
        _ => cfg.integrator.clone(),
    };
    let orbit = orbit_from_record(&record, &integrator, cfg.orbit.n_samples)?;
    let summary = orbit_summary(&orbit)?;
    let collisions = match collision_report(&orbit, &record.potential) {
        Ok(r) => Some(r),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let check = verify_choreography(&orbit, 1e-6);
    let data = json!({
        "record": record,
        "summary": summary,
        "collisions": collisions,
        "choreography": check,
    });
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "orbit".into());
    let stem = stem.strip_suffix("_orbit").unwrap_or(&stem).to_string();
    let prov = Provenance::new(command_line(), cfg).with_record(&record);
    write_json(&cfg.output_dir.join(format!("{stem}_summary.json")), &prov, &data)?;

    let mut out = std::io::stdout().lock();
    let p = record.params;
    writeln!(out, "{} ({}, {}, {})", record.potential.label(), p.x0, p.y0, p.v)?;
    writeln!(out, "  T  = {:.6}", summary.period)?;
    writeln!(out, "  E  = {:.7} (spread {:.1e})", summary.energy, summary.energy_spread)?;
    writeln!(out, "  n0 = {}", summary.n0.map_or("-".to_string(), |n| n.to_string()))?;
    if let Some(c) = &collisions {
        writeln!(out, "  n_ij = {:?}, {} simultaneous", c.n_ij, c.simultaneous.len())?;
    }
    writeln!(out, "  choreography residual = {:.2e}", check.max_residual)?;
    Ok(ExitCode::SUCCESS)
}

pub fn reproduce(cfg: &RunConfig, quick: bool, criteria: &[u32], strict: bool) -> Result<ExitCode> {
    let profile = if quick { Profile::Quick } else { Profile::Full };
    let ids: Vec<u32> = if criteria.is_empty() { profile.criteria().to_vec() } else { criteria.to_vec() };
    let mut repro = Reproducer::new(cfg);
    let mut reports = Vec::new();
    for id in ids {
        let r = repro.criterion(id, profile);
        println!("{}", r.summary_line());
        reports.push(r);
    }
    println!();
    print!("{}", format_table(&reports));
    write_json(&cfg.output_dir.join("reproduce.json"), &Provenance::new(command_line(), cfg), &reports)?;
    let ok = reports.iter().all(|r| if strict { r.passed() } else { r.passed_with_waivers() });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
