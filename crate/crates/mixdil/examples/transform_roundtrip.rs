//! Multi-level analysis and synthesis round trips, free and periodic.
//!
//! ```sh
//! cargo run --example transform_roundtrip
//! ```

use num_complex::Complex64;

use mixdil::bank::builtin;
use mixdil::filterseq::{self, FilterSeq, PeriodicArray};
use mixdil::rng::SplitMix64;
use mixdil::xform;

fn main() -> mixdil::Result<()> {
    let mut rng = SplitMix64::new(42);

    // free-mode round trip on a finitely supported signal
    let cases = [("haar", 3usize), ("haar-split4", 2), ("bspline-tf", 4)];
    for (name, levels) in cases {
        let bank = builtin(name)?;
        let coeffs: Vec<Complex64> = (0..256)
            .map(|_| Complex64::new(rng.next_unit(), 0.0))
            .collect();
        let v = FilterSeq::from_complex(1, 1, 1, vec![0], vec![256], coeffs)?;
        let pyr = xform::analyze(&bank, &v, levels)?;
        let out = xform::synthesize(&bank, &pyr)?;
        println!(
            "{name:<12} J={levels}: free round-trip error {:.3e}, stored scalars {}",
            filterseq::max_abs_diff(&out, &v)?,
            pyr.stored_scalars()
        );
    }

    // periodic round trip with per-band sizes
    let bank = builtin("haar-split4")?;
    let mut v = PeriodicArray::zeros(1, 1, 1, vec![16])?;
    for k in 0..16 {
        v.set(&[k], 0, 0, Complex64::new((k as f64 / 3.0).cos(), 0.0));
    }
    println!(
        "\nhaar-split4 periodic, N=16, max admissible levels = {}",
        xform::max_levels(&bank, &[16])
    );
    let pyr = xform::analyze_periodic(&bank, &v, 2)?;
    if let xform::PyramidBands::Periodic {
        details, approx, ..
    } = &pyr.bands
    {
        for (j, level) in details.iter().enumerate() {
            let sizes: Vec<&[i64]> = level.iter().map(|b| b.period()).collect();
            println!("  level {}: detail periods {sizes:?}", j + 1);
        }
        println!("  approximation period {:?}", approx.period());
    }
    let out = xform::synthesize_periodic(&bank, &pyr)?;
    println!("  periodic round-trip error {:.3e}", out.max_abs_diff(&v));

    // an inadmissible period is reported with the offending level/channel
    let bad = PeriodicArray::zeros(1, 1, 1, vec![6])?;
    match xform::analyze_periodic(&bank, &bad, 1) {
        Err(e) => println!("\nN=6 with haar-split4: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
