//! Build a bank from a JSON descriptor, verify it, and compare its
//! redundancy with a classical redundant construction.
//!
//! The bank below keeps one dyadic lowpass but sends the two wavelets to
//! dilation 4 on complementary half-shifts, which brings the total
//! coefficient budget back to critical sampling (1/2 + 1/4 + 1/4 = 1).
//!
//! ```sh
//! cargo run --example custom_bank
//! ```

use mixdil::bank;
use mixdil::verify;

const DESCRIPTOR: &str = r#"{
  "format": "mixdil-bank-v1",
  "dim": 1,
  "multiplicity": 1,
  "name": "split4-by-hand",
  "channels": [
    {"role": "lowpass", "dilation": [[2]],
     "primal": {"offset": [0], "shape": [2], "rows": 1, "cols": 1,
                "re": [0.5, 0.5],
                "exact": {"num": [1, 1], "den": [2, 2], "radicand": [1, 1]}}},
    {"role": "wavelet", "dilation": [[4]],
     "primal": {"offset": [0], "shape": [2], "rows": 1, "cols": 1,
                "re": [0.35355339059327373, -0.35355339059327373],
                "exact": {"num": [1, -1], "den": [4, 4], "radicand": [2, 2]}}},
    {"role": "wavelet", "dilation": [[4]],
     "primal": {"offset": [2], "shape": [2], "rows": 1, "cols": 1,
                "re": [0.35355339059327373, -0.35355339059327373],
                "exact": {"num": [1, -1], "den": [4, 4], "radicand": [2, 2]}}}
  ]
}"#;

fn main() -> mixdil::Result<()> {
    let custom = bank::from_json(DESCRIPTOR)?;
    println!("loaded `{}`:", custom.name());
    let pr = verify::check_pr_time(&custom)?;
    println!(
        "  perfect reconstruction: {} ({} arithmetic)",
        pr.verdict_str(),
        pr.arithmetic_str()
    );
    let bi = verify::check_biorthogonal(&custom)?;
    println!("  biorthogonality:        {}", bi.verdict_str());
    let (ratio, equal) = verify::critical_sampling(&custom);
    println!("  critical sampling:      {ratio} (equality: {equal})");

    // same wavelet shape, classical dyadic sampling: redundant
    let tight = bank::builtin("bspline-tf")?;
    for levels in [1usize, 2, 4, 8] {
        let a = verify::redundancy_rate(&custom, levels, None)?;
        let b = verify::redundancy_rate(&tight, levels, None)?;
        println!(
            "  J={levels}: redundancy {} (mixed dilations) vs {} (uniform dyadic tight frame)",
            a.closed, b.closed
        );
    }

    // the descriptor round-trips losslessly
    let text = bank::to_json(&custom);
    let again = bank::from_json(&text)?;
    assert_eq!(text, bank::to_json(&again));
    println!("  descriptor round-trip: lossless");
    Ok(())
}
