//! Run every verification check on the built-in banks and print a summary.
//!
//! ```sh
//! cargo run --example verify_builtins
//! ```

use mixdil::bank::{builtin, BUILTIN_NAMES};
use mixdil::verify;

fn main() -> mixdil::Result<()> {
    for name in BUILTIN_NAMES {
        let bank = builtin(name)?;
        println!(
            "== {name} (d={}, r={}, {} wavelet channels)",
            bank.dim(),
            bank.multiplicity(),
            bank.wavelet_count()
        );
        let dets: Vec<i64> = bank
            .channels()
            .iter()
            .map(|c| c.dilation.det_abs())
            .collect();
        println!("   channel |det M_l|: {dets:?}");

        let pr = verify::check_pr_time(&bank)?;
        println!(
            "   perfect reconstruction : {:<12} residual {:.3e} ({})",
            pr.verdict_str(),
            pr.max_residual,
            pr.arithmetic_str()
        );
        let fr = verify::check_pr_fourier(&bank, 32, 1e-10)?;
        println!(
            "   frequency-side check   : {:<12} residual {:.3e}",
            fr.verdict_str(),
            fr.max_residual
        );
        let bi = verify::check_biorthogonal(&bank)?;
        println!(
            "   biorthogonality        : {:<12} residual {:.3e}",
            bi.verdict_str(),
            bi.max_residual
        );
        let (ratio, equal) = verify::critical_sampling(&bank);
        println!(
            "   critical sampling      : {} (target {}) -> {}",
            ratio,
            bank.multiplicity(),
            if equal {
                "critically sampled"
            } else {
                "redundant"
            }
        );
        let red = verify::redundancy_rate(&bank, 4, None)?;
        println!("   redundancy rate (J=4)  : {}", red.closed);
        println!();
    }
    Ok(())
}
