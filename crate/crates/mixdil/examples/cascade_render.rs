//! Render refinable functions by the cascade algorithm, derive the wavelet
//! generators, and estimate Riesz bounds from the shift Gram sequence.
//!
//! CSV files land in a temporary directory for external plotting.
//!
//! ```sh
//! cargo run --example cascade_render
//! ```

use mixdil::bank::builtin;
use mixdil::io;
use mixdil::lattice::Lattice;
use mixdil::refine;

fn main() -> mixdil::Result<()> {
    let outdir = std::env::temp_dir().join("mixdil-cascade");
    std::fs::create_dir_all(&outdir)?;

    for name in ["haar", "bspline-tf"] {
        let bank = builtin(name)?;
        let diag = refine::mask_spectrum(&bank.lowpass().primal);
        println!("== {name}");
        println!(
            "  mask symbol eigenvalues at 0: {:?} -> {}",
            diag.eigenvalues,
            if diag.pass {
                "cascade admissible"
            } else {
                "warn"
            }
        );
        let out = refine::cascade(&bank, 10)?;
        println!(
            "  cascade: {} iterations, successive-iterate L2 difference {:.3e}",
            out.iterations, out.delta_l2
        );
        let psi_path = outdir.join(format!("{name}_psi0.csv"));
        io::write_samples_csv(&psi_path, &out.samples)?;
        println!("  wrote {}", psi_path.display());

        let gens = refine::derive_generators(&bank, &out.samples)?;
        for (i, g) in gens.iter().enumerate() {
            let path = outdir.join(format!("{name}_psi{}.csv", i + 1));
            io::write_samples_csv(&path, g)?;
            println!("  wrote {}", path.display());
        }

        let gram = refine::gram_shifts(&out.samples, &out.samples, &Lattice::standard(1), 4)?;
        let (lo, hi) = refine::riesz_bounds(&gram, 64, 1)?;
        println!("  riesz bounds of the shifts: ({lo:.6}, {hi:.6})");

        let bio = refine::check_function_biorthogonality(&bank, 12, 4)?;
        println!(
            "  function biorthogonality: {} (residual {:.3e})",
            bio.verdict_str(),
            bio.max_residual
        );
        for w in &bio.witnesses {
            println!("    note: {} -> {}", w.location, w.got);
        }
        println!();
    }
    Ok(())
}
