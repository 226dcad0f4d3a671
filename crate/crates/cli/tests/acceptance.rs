//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Exits nonzero when any criterion fails.

use std::process::ExitCode;

use cqed_cli::acceptance::run_all;
use cqed_cli::{Config, RunContext};

fn main() -> ExitCode {
    let out = tempfile::tempdir().expect("temporary directory");
    let jobs = std::thread::available_parallelism().map_or(2, |n| n.get());
    let ctx = RunContext::new(Config::paper_defaults(), out.path().to_path_buf(), jobs, 0, false)
        .expect("bundled configuration builds");
    let results = run_all(&ctx);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!(
        "acceptance: {} passed, {} failed {:?}",
        results.len() - failed.len(),
        failed.len(),
        failed
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
