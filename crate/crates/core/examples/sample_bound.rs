//! Events needed for independent-event lotteries to pick the best forecaster
//! with a given probability, for a few gaps and field sizes.

use fcomp::accuracy::{hoeffding_m_bound, LimitAccuracyParams};

fn main() -> fcomp::Result<()> {
    println!("{:>4} {:>7} {:>6} {:>10}", "n", "gap", "pi", "events");
    for n in [2, 5, 20] {
        for delta in [0.2, 0.09, 0.02] {
            for pi in [0.9, 0.99] {
                let m = hoeffding_m_bound(&LimitAccuracyParams::new(n, delta, pi)?)?;
                println!("{n:>4} {delta:>7.2} {pi:>6.2} {m:>10}");
            }
        }
    }
    Ok(())
}
