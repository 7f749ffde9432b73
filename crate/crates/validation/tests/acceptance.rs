//! Runs every acceptance criterion, prints one PASS/FAIL line each and exits
//! non-zero if any failed.

use std::process::ExitCode;

fn main() -> ExitCode {
    let outcomes: Vec<_> = fracab_validation::ALL.iter().map(|check| check()).collect();
    for outcome in &outcomes {
        println!("{outcome}");
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("\nacceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
