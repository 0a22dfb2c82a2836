//! Frame-bound sweep: estimate the stability constants of the J-level
//! analysis operator over a doubling ladder of periods.
//!
//! ```sh
//! cargo run --release --example stability_sweep
//! ```

use mixdil::bank::builtin;
use mixdil::stability;

fn main() -> mixdil::Result<()> {
    for name in ["haar", "bspline-tf", "haar-split4"] {
        let bank = builtin(name)?;
        println!("== {name}");
        println!(
            "{:>5} {:>4} {:>20} {:>20} {:>7} {:>6}",
            "N", "J", "c1", "c2", "iters", "conv"
        );
        for period in [16i64, 32, 64] {
            let jmax = mixdil::xform::max_levels(&bank, &[period]).min(3);
            for levels in 1..=jmax {
                let rep = stability::frame_bounds(&bank, levels, &[period], 500, 1e-9)?;
                println!(
                    "{:>5} {:>4} {:>20.15} {:>20.15} {:>7} {:>6}",
                    period, levels, rep.c1_est, rep.c2_est, rep.iterations, rep.converged
                );
            }
        }
        let duality = stability::check_duality(&bank, 2, &[32])?;
        println!(
            "duality relations at J=2, N=32: {} (residual {:.3e})\n",
            duality.verdict_str(),
            duality.max_residual
        );
    }
    Ok(())
}
