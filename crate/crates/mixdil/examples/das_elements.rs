//! Inspect discrete affine systems: composed filters, normalized elements,
//! and the identities they satisfy.
//!
//! ```sh
//! cargo run --example das_elements
//! ```

use mixdil::bank::builtin;
use mixdil::das::{self, Side};

fn main() -> mixdil::Result<()> {
    let bank = builtin("haar")?;

    println!("composed lowpass filters of the haar bank:");
    for j in 0..=3usize {
        let f = das::das_filter(&bank, 0, j, Side::Primal)?;
        let taps: Vec<f64> = f.points().map(|k| f.at(&k, 0, 0).re).collect();
        println!("  level {j}: offset {:?}, taps {taps:?}", f.offset());
    }

    println!("\nnormalized elements carry unit norm at every (l, j, k):");
    for (l, j, k) in [(0usize, 1usize, 0i64), (0, 2, 1), (1, 1, -2), (1, 3, 4)] {
        let e = das::das_element(&bank, l, j, &[k], Side::Primal)?;
        println!(
            "  (l={l}, j={j}, k={k}): support {:?}..{:?}, ||.||^2 = {:.15}",
            e.seq.bounds().map(|b| b.0),
            e.seq.bounds().map(|b| b.1),
            e.seq.norm_sq()
        );
    }

    println!("\ncascade-structure identity (exact where coefficients allow):");
    for name in ["haar", "bspline-tf", "haar-split4"] {
        let bank = builtin(name)?;
        for j in 1..=2usize {
            let rep = das::check_cascade(&bank, j, 4)?;
            println!(
                "  {name:<12} j={j}: {:<12} residual {:.3e} ({})",
                rep.verdict_str(),
                rep.max_residual,
                rep.arithmetic_str()
            );
        }
    }

    println!("\naffine-system biorthogonality over a shift window:");
    for (name, levels) in [("haar", 2usize), ("haar-split4", 2), ("bspline-tf", 1)] {
        let bank = builtin(name)?;
        let rep = das::check_das_biorthogonality(&bank, levels, 2)?;
        println!(
            "  {name:<12} J={levels}: {:<12} residual {:.3e}",
            rep.verdict_str(),
            rep.max_residual
        );
    }
    Ok(())
}
