//! Tour of the exact lattice algebra: Hermite normal forms, dilation-matrix
//! cosets, sublattice intersections, and quotient representatives.
//!
//! ```sh
//! cargo run --example lattice_tour
//! ```

use mixdil::lattice::{
    coset_reps, hnf, intersect, quotient_reps, CosetSet, DilationMatrix, IntMatrix, Lattice,
};

fn show(cs: &CosetSet) -> String {
    let pts: Vec<String> = cs
        .reps()
        .iter()
        .map(|w| {
            let coords: Vec<String> = w.iter().map(|r| r.to_string()).collect();
            format!("({})", coords.join(", "))
        })
        .collect();
    pts.join(" ")
}

fn main() -> mixdil::Result<()> {
    let quincunx = IntMatrix::from_rows(&[&[1, 1], &[1, -1]])?;
    let (h, u) = hnf(&quincunx)?;
    println!("quincunx matrix [[1,1],[1,-1]]:");
    println!(
        "  column HNF H = {:?} with unimodular U = {:?}",
        h.entries(),
        u.entries()
    );
    println!(
        "  det = {}, so the coset count is {}",
        quincunx.det(),
        quincunx.det().abs()
    );

    let m = DilationMatrix::new(quincunx)?;
    println!("  frequency cosets Ω: {}", show(&coset_reps(&m)));

    let dyadic = DilationMatrix::scalar(2, 2)?;
    println!("\ndyadic 2I cosets: {}", show(&coset_reps(&dyadic)));

    let ql = Lattice::from_dilation(&m);
    let dl = Lattice::from_dilation(&dyadic);
    let both = intersect(&ql, &dl)?;
    println!(
        "\nquincunx lattice ∩ 2Z^2: basis {:?}, index {}",
        both.basis().entries(),
        both.index()
    );

    let z2 = Lattice::standard(2);
    println!(
        "Z^2 / quincunx representatives: {:?}",
        quotient_reps(&z2, &ql)?
    );
    println!("Z^2 / 2Z^2 representatives: {:?}", quotient_reps(&z2, &dl)?);

    // matrices that are not expansive are rejected up front
    let shear = IntMatrix::from_rows(&[&[1, 1], &[0, 2]])?;
    match DilationMatrix::new(shear) {
        Err(e) => println!("\n[[1,1],[0,2]] rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
