//! Acceptance gate: one PASS/FAIL line per criterion, then the checks.
//!
//! Checks with a documented deviation are reported but do not fail the run.
//! `cargo test --test acceptance -- --ignored` fails on those as well.
//! Numeric arguments restrict the run to those criteria.

use std::process::ExitCode;

use figure_eight::config::RunConfig;
use figure_eight::reproduce::{format_table, Profile, Reproducer};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let strict = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let mut ids: Vec<u32> = args.iter().filter_map(|a| a.parse().ok()).collect();
    if ids.is_empty() {
        ids = Profile::Full.criteria().to_vec();
    }

    let mut repro = Reproducer::new(&RunConfig::default());
    let mut reports = Vec::new();
    for id in ids {
        let report = repro.criterion(id, Profile::Full);
        println!("{}", report.summary_line());
        reports.push(report);
    }
    println!();
    print!("{}", format_table(&reports));

    let ok = if strict {
        reports.iter().all(|r| r.passed())
    } else {
        reports.iter().all(|r| r.passed_with_waivers())
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        println!("acceptance failed{}", if strict { " (documented deviations counted)" } else { "" });
        ExitCode::FAILURE
    }
}
