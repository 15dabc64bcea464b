//! Runs every built-in reproduction and prints each check.

use fcomp::harness::{run_repro, ReproCase};

fn main() -> fcomp::Result<()> {
    let mut all = true;
    for case in ReproCase::ALL {
        let out = run_repro(case, 2024)?;
        all &= out.passed;
        println!("{} {}", if out.passed { "ok  " } else { "FAIL" }, case.id());
        for c in &out.checks {
            println!(
                "       {:<48} {:.6} (want {:.6} ± {:.1e})",
                c.name, c.observed, c.expected, c.tolerance
            );
        }
    }
    if !all {
        std::process::exit(1);
    }
    Ok(())
}
