//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Positional arguments filter by id or name substring.

use std::process::ExitCode;
use std::time::Instant;

use casimir_shear::cli::verify_options;
use casimir_shear::verify::{self, CHECK_COUNT};

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |id: u8| {
        filters.is_empty()
            || filters
                .iter()
                .any(|f| f.parse::<u8>() == Ok(id) || verify::name(id).contains(f.as_str()))
    };
    let opts = verify_options(None);
    let mut failed = Vec::new();
    let mut ran = 0;
    for id in (1..=CHECK_COUNT).filter(|&id| selected(id)) {
        let t = Instant::now();
        let check = verify::run(id, &opts);
        println!("{} [{:.1} s]", check.summary(), t.elapsed().as_secs_f64());
        ran += 1;
        if !check.passed {
            failed.push(format!("{} {}", id, check.name));
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
