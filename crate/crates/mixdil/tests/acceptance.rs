//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantities. Run with `cargo test --test acceptance`
//! (`-- --nocapture` shows the lines).

use std::time::Instant;

use num_complex::Complex64;

use mixdil::bank::{builtin, BUILTIN_NAMES};
use mixdil::das::{self, Side};
use mixdil::filterseq::{self, FilterSeq, PeriodicArray, ScaledRadical};
use mixdil::lattice::{DilationMatrix, IntMatrix, Lattice, Rat};
use mixdil::refine;
use mixdil::rng::SplitMix64;
use mixdil::stability;
use mixdil::verify::{self, perturb_coefficient, Verdict};
use mixdil::xform::{self, PyramidBands};

fn pass(criterion: usize, name: &str, detail: &str) {
    println!("[criterion {criterion:2}] {name}: PASS ({detail})");
}

/// Criterion 1: exact perfect reconstruction on every builtin, and twenty
/// +0.01 single-coefficient perturbations each fail loudly. Under a second.
#[test]
fn criterion_01_pr_exactness() {
    let start = Instant::now();
    for name in BUILTIN_NAMES {
        let bank = builtin(name).unwrap();
        let rep = verify::check_pr_time(&bank).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{name} must pass exactly");
        assert_eq!(rep.max_residual, 0.0, "{name} residual must be exactly 0");
        assert_eq!(rep.arithmetic_str(), "exact");
    }
    let mut worst_fail = f64::INFINITY;
    let mut count = 0;
    for (b, name) in BUILTIN_NAMES.iter().enumerate() {
        let bank = builtin(name).unwrap();
        for i in 0..5 {
            let bad = perturb_coefficient(&bank, b * 5 + i, 0.01);
            let rep = verify::check_pr_time(&bad).unwrap();
            assert_eq!(rep.verdict, Verdict::Fail, "{name} perturbation {i}");
            assert!(
                rep.max_residual > 1e-3,
                "{name} perturbation {i}: residual {}",
                rep.max_residual
            );
            worst_fail = worst_fail.min(rep.max_residual);
            count += 1;
        }
    }
    assert_eq!(count, 20);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(
        1,
        "PR exactness",
        &format!(
            "4 banks exact, 20 perturbations fail (min residual {worst_fail:.2e}), {elapsed:?}"
        ),
    );
}

/// Criterion 2: the frequency-side checker agrees with the time-side checker
/// on all 24 verdicts of criterion 1.
#[test]
fn criterion_02_checker_agreement() {
    let mut verdicts = 0;
    for name in BUILTIN_NAMES {
        let bank = builtin(name).unwrap();
        let t = verify::check_pr_time(&bank).unwrap();
        let f = verify::check_pr_fourier(&bank, 0, 1e-10).unwrap();
        assert_eq!(t.passed(), f.passed(), "{name}");
        verdicts += 1;
    }
    for (b, name) in BUILTIN_NAMES.iter().enumerate() {
        let bank = builtin(name).unwrap();
        for i in 0..5 {
            let bad = perturb_coefficient(&bank, b * 5 + i, 0.01);
            let t = verify::check_pr_time(&bad).unwrap();
            let f = verify::check_pr_fourier(&bad, 0, 1e-10).unwrap();
            assert_eq!(t.passed(), f.passed(), "{name} perturbation {i}");
            verdicts += 1;
        }
    }
    assert_eq!(verdicts, 24);
    pass(2, "checker agreement", "24/24 verdicts agree");
}

/// Criterion 3: biorthogonality triage and exact critical-sampling ratios.
#[test]
fn criterion_03_biorthogonality_triage() {
    let haar = builtin("haar").unwrap();
    let split4 = builtin("haar-split4").unwrap();
    let bs = builtin("bspline-tf").unwrap();
    assert_eq!(
        verify::check_biorthogonal(&haar).unwrap().verdict,
        Verdict::Pass
    );
    assert_eq!(
        verify::check_biorthogonal(&split4).unwrap().verdict,
        Verdict::Pass
    );
    let rep = verify::check_biorthogonal(&bs).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    assert!(rep.max_residual > 0.1, "deviation {}", rep.max_residual);
    assert_eq!(
        verify::critical_sampling(&haar),
        (Rat::from_integer(1), true)
    );
    assert_eq!(
        verify::critical_sampling(&split4),
        (Rat::from_integer(1), true)
    );
    assert_eq!(verify::critical_sampling(&bs), (Rat::new(3, 2), false));
    pass(
        3,
        "biorthogonality triage",
        &format!(
            "haar/haar-split4 pass, bspline-tf deviates by {:.3} with ratio 3/2",
            rep.max_residual
        ),
    );
}

fn random_line(rng: &mut SplitMix64, len: usize) -> FilterSeq {
    let coeffs = (0..len)
        .map(|_| Complex64::new(rng.next_unit(), 0.0))
        .collect();
    FilterSeq::from_complex(1, 1, 1, vec![0], vec![len], coeffs).unwrap()
}

fn random_grid(rng: &mut SplitMix64, n: usize) -> FilterSeq {
    let coeffs = (0..n * n)
        .map(|_| Complex64::new(rng.next_unit(), 0.0))
        .collect();
    FilterSeq::from_complex(2, 1, 1, vec![0, 0], vec![n, n], coeffs).unwrap()
}

/// Criterion 4: end-to-end perfect reconstruction on random data.
#[test]
fn criterion_04_end_to_end_reconstruction() {
    let mut rng = SplitMix64::new(0xACCE);
    let mut worst = 0.0f64;
    let cases: [(&str, usize); 3] = [("haar", 3), ("haar-split4", 2), ("bspline-tf", 4)];
    for (name, levels) in cases {
        let bank = builtin(name).unwrap();
        let v = random_line(&mut rng, 256);
        let pyr = xform::analyze(&bank, &v, levels).unwrap();
        let out = xform::synthesize(&bank, &pyr).unwrap();
        let err = filterseq::max_abs_diff(&out, &v).unwrap();
        assert!(err < 1e-11, "{name} J={levels}: {err}");
        worst = worst.max(err);
    }
    let bank = builtin("haar2d").unwrap();
    let v = random_grid(&mut rng, 32);
    let pyr = xform::analyze(&bank, &v, 3).unwrap();
    let out = xform::synthesize(&bank, &pyr).unwrap();
    let err = filterseq::max_abs_diff(&out, &v).unwrap();
    assert!(err < 1e-11, "haar2d J=3: {err}");
    worst = worst.max(err);
    pass(
        4,
        "end-to-end reconstruction",
        &format!("256-sample 1-D and 32x32 2-D, max error {worst:.2e}"),
    );
}

/// Criterion 5: counted redundancy equals the closed form, by exact integer
/// counting.
#[test]
fn criterion_05_redundancy() {
    let haar = verify::redundancy_rate(&builtin("haar").unwrap(), 4, Some(&[256])).unwrap();
    assert_eq!(haar.closed, Rat::from_integer(1));
    assert_eq!(haar.counted, Some((256, 256)));
    let bs = verify::redundancy_rate(&builtin("bspline-tf").unwrap(), 4, Some(&[256])).unwrap();
    assert_eq!(bs.closed, Rat::new(31, 16));
    assert_eq!(bs.counted, Some((496, 256)));
    let s4 = verify::redundancy_rate(&builtin("haar-split4").unwrap(), 2, Some(&[16])).unwrap();
    assert_eq!(s4.closed, Rat::from_integer(1));
    assert_eq!(s4.counted, Some((16, 16)));
    pass(
        5,
        "redundancy",
        "haar 256/256, bspline-tf 496/256 = 31/16, haar-split4 16/16",
    );
}

fn rand_seq(rng: &mut SplitMix64, dim: usize, rows: usize, cols: usize) -> FilterSeq {
    let offset: Vec<i64> = (0..dim).map(|_| rng.next_range(-2, 2)).collect();
    let shape: Vec<usize> = (0..dim).map(|_| rng.next_range(1, 3) as usize).collect();
    let n = shape.iter().product::<usize>() * rows * cols;
    let coeffs = (0..n)
        .map(|_| Complex64::new(rng.next_unit(), rng.next_unit()))
        .collect();
    FilterSeq::from_complex(dim, rows, cols, offset, shape, coeffs).unwrap()
}

fn rand_exact_seq(rng: &mut SplitMix64, dim: usize, rows: usize, cols: usize) -> FilterSeq {
    let offset: Vec<i64> = (0..dim).map(|_| rng.next_range(-2, 2)).collect();
    let shape: Vec<usize> = (0..dim).map(|_| rng.next_range(1, 3) as usize).collect();
    let n = shape.iter().product::<usize>() * rows * cols;
    let vals = (0..n)
        .map(|_| ScaledRadical::new(rng.next_range(-4, 4), 1 << rng.next_range(0, 2), 1).unwrap())
        .collect();
    FilterSeq::from_exact(dim, rows, cols, offset, shape, vals).unwrap()
}

/// Criterion 6: adjointness and composition identities on 100 random
/// instances each, in floats below 1e−12 and exactly in exact mode.
#[test]
fn criterion_06_operator_identities() {
    let mut rng = SplitMix64::new(0x0611);
    let quincunx =
        || DilationMatrix::new(IntMatrix::from_rows(&[&[1, 1], &[1, -1]]).unwrap()).unwrap();
    // adjointness, float
    for trial in 0..100usize {
        let d = 1 + trial % 2;
        let (r, q) = (1 + trial % 2, 1 + (trial / 2) % 2);
        let m = if d == 1 {
            DilationMatrix::scalar(1, 2).unwrap()
        } else {
            quincunx()
        };
        let a = rand_seq(&mut rng, d, r, q);
        let v = rand_seq(&mut rng, d, 1, r);
        let w = rand_seq(&mut rng, d, 1, q);
        let lhs =
            filterseq::inner_product(&filterseq::subdivision(&a, &m, &v).unwrap(), &w).unwrap();
        let rhs =
            filterseq::inner_product(&v, &filterseq::transition(&a, &m, &w).unwrap()).unwrap();
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-12, "adjointness trial {trial}");
        }
    }
    // adjointness, exact: both sides agree as exact radical scalars
    for trial in 0..20usize {
        let d = 1 + trial % 2;
        let m = if d == 1 {
            DilationMatrix::scalar(1, 2).unwrap()
        } else {
            quincunx()
        };
        let a = rand_exact_seq(&mut rng, d, 1, 2);
        let v = rand_exact_seq(&mut rng, d, 1, 1);
        let w = rand_exact_seq(&mut rng, d, 1, 2);
        let lhs = filterseq::inner_product_exact(&filterseq::subdivision(&a, &m, &v).unwrap(), &w)
            .expect("exact pipeline");
        let rhs = filterseq::inner_product_exact(&v, &filterseq::transition(&a, &m, &w).unwrap())
            .expect("exact pipeline");
        assert_eq!(lhs, rhs, "exact adjointness trial {trial}");
    }
    // composition, float + exact spot checks
    for trial in 0..100usize {
        let d = 1 + trial % 2;
        let (m1, m2) = if d == 1 {
            (
                DilationMatrix::scalar(1, 2).unwrap(),
                DilationMatrix::scalar(1, 3).unwrap(),
            )
        } else {
            (DilationMatrix::scalar(2, 2).unwrap(), quincunx())
        };
        let q = 1 + trial % 2;
        let u1 = rand_seq(&mut rng, d, q, 1);
        let u2 = rand_seq(&mut rng, d, 2, q);
        let v = rand_seq(&mut rng, d, 1, 2);
        let m12 = DilationMatrix::new(m1.mat().mul(m2.mat()).unwrap()).unwrap();
        let comp = filterseq::convolve(&filterseq::upsample(&u2, m1.mat()), &u1).unwrap();
        let lhs = filterseq::subdivision(&u1, &m1, &filterseq::subdivision(&u2, &m2, &v).unwrap())
            .unwrap();
        let rhs = filterseq::subdivision(&comp, &m12, &v).unwrap();
        assert!(
            filterseq::max_abs_diff(&lhs, &rhs).unwrap() < 1e-12,
            "composition trial {trial}"
        );
    }
    for trial in 0..20usize {
        let m1 = DilationMatrix::scalar(1, 2).unwrap();
        let m2 = DilationMatrix::scalar(1, 2).unwrap();
        let u1 = rand_exact_seq(&mut rng, 1, 1, 1);
        let u2 = rand_exact_seq(&mut rng, 1, 1, 1);
        let v = rand_exact_seq(&mut rng, 1, 1, 1);
        let m12 = DilationMatrix::scalar(1, 4).unwrap();
        let comp = filterseq::convolve(&filterseq::upsample(&u2, m1.mat()), &u1).unwrap();
        let lhs = filterseq::subdivision(&u1, &m1, &filterseq::subdivision(&u2, &m2, &v).unwrap())
            .unwrap();
        let rhs = filterseq::subdivision(&comp, &m12, &v).unwrap();
        assert_eq!(
            filterseq::exact_eq(&lhs, &rhs),
            Some(true),
            "exact composition trial {trial}"
        );
    }
    pass(
        6,
        "operator identities",
        "adjointness and composition: 100 float + 20 exact trials each",
    );
}

/// Criterion 7: affine-system identities.
#[test]
fn criterion_07_das_identities() {
    // analysis coefficients equal element inner products (all builtins, J ≤ 3)
    let mut rng = SplitMix64::new(0x0707);
    for name in BUILTIN_NAMES {
        let bank = builtin(name).unwrap();
        let d = bank.dim();
        let levels = 3;
        let v = if d == 1 {
            random_line(&mut rng, 9)
        } else {
            random_grid(&mut rng, 5)
        };
        let pyr = xform::analyze(&bank, &v, levels).unwrap();
        let PyramidBands::Free { details, approx } = &pyr.bands else {
            panic!()
        };
        let window: i64 = if d == 1 { 6 } else { 3 };
        let shifts: Vec<Vec<i64>> = if d == 1 {
            (-window..=window).map(|k| vec![k]).collect()
        } else {
            let mut out = Vec::new();
            for a in -window..=window {
                for b in -window..=window {
                    out.push(vec![a, b]);
                }
            }
            out
        };
        for j in 1..=levels {
            for l in 1..=bank.wavelet_count() {
                for k in &shifts {
                    let e = das::das_element(&bank, l, j, k, Side::Primal).unwrap();
                    let ip = filterseq::inner_product(&v, &e.seq).unwrap();
                    let got = details[j - 1][l - 1].at(k, 0, 0);
                    assert!((got - ip[0]).norm() < 1e-12, "{name} key1(i) l={l} j={j}");
                }
            }
        }
        for k in &shifts {
            let e = das::das_element(&bank, 0, levels, k, Side::Primal).unwrap();
            let ip = filterseq::inner_product(&v, &e.seq).unwrap();
            for (c, ipv) in ip.iter().enumerate().take(bank.multiplicity()) {
                assert!(
                    (approx.at(k, 0, c) - ipv).norm() < 1e-12,
                    "{name} key1(i) approx"
                );
            }
        }
        // key1(ii): single-band synthesis equals the element combination
        let primal_as_synthesis = bank.dual_swap();
        let mut pyr2 = verify::empty_pyramid(&bank, levels);
        let PyramidBands::Free { approx: a2, .. } = &mut pyr2.bands else {
            panic!()
        };
        let band = if d == 1 {
            random_line(&mut rng, 4)
        } else {
            random_grid(&mut rng, 3)
        };
        *a2 = band.clone();
        let direct = xform::synthesize(&primal_as_synthesis, &pyr2).unwrap();
        let mut combo = FilterSeq::zero(d, 1, bank.multiplicity());
        for k in band.points() {
            let e = das::das_element(&bank, 0, levels, &k, Side::Primal).unwrap();
            combo = filterseq::add(&combo, &e.seq.scaled_complex(band.at(&k, 0, 0))).unwrap();
        }
        assert!(
            filterseq::max_abs_diff(&direct, &combo).unwrap() < 1e-12,
            "{name} key1(ii)"
        );
    }
    // cascade structure exact for haar at j ≤ 3
    let haar = builtin("haar").unwrap();
    for j in 1..=3 {
        let rep = das::check_cascade(&haar, j, 5).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "cascade j={j}");
        assert_eq!(rep.max_residual, 0.0);
    }
    // DAS biorthogonality triage
    assert_eq!(
        das::check_das_biorthogonality(&haar, 2, 2).unwrap().verdict,
        Verdict::Pass
    );
    assert_eq!(
        das::check_das_biorthogonality(&builtin("haar-split4").unwrap(), 2, 2)
            .unwrap()
            .verdict,
        Verdict::Pass
    );
    assert_eq!(
        das::check_das_biorthogonality(&builtin("bspline-tf").unwrap(), 1, 2)
            .unwrap()
            .verdict,
        Verdict::Fail
    );
    pass(
        7,
        "affine-system identities",
        "coefficient/synthesis identities ≤ 1e-12, cascade exact, biorthogonality triage",
    );
}

/// Criterion 8: frame bounds pin to 1 for the orthonormal builtins and the
/// power iteration converges quickly.
#[test]
fn criterion_08_frame_bounds() {
    let haar = builtin("haar").unwrap();
    for levels in 1..=3 {
        let rep = stability::frame_bounds(&haar, levels, &[64], 500, 1e-9).unwrap();
        assert!(rep.converged && rep.iterations < 500);
        assert!(
            (rep.c1_est - 1.0).abs() <= 1e-7,
            "haar J={levels} c1={}",
            rep.c1_est
        );
        assert!(
            (rep.c2_est - 1.0).abs() <= 1e-7,
            "haar J={levels} c2={}",
            rep.c2_est
        );
    }
    let split4 = builtin("haar-split4").unwrap();
    let rep = stability::frame_bounds(&split4, 2, &[16], 500, 1e-9).unwrap();
    assert!(rep.converged && rep.iterations < 500);
    assert!((rep.c1_est - 1.0).abs() <= 1e-7);
    assert!((rep.c2_est - 1.0).abs() <= 1e-7);
    pass(
        8,
        "frame bounds",
        &format!(
            "haar J=1..3 N=64 and haar-split4 J=2 N=16 pin c1=c2=1, ≤{} iterations",
            rep.iterations
        ),
    );
}

fn hat(x: f64) -> f64 {
    if x <= 0.0 || x >= 2.0 {
        0.0
    } else if x <= 1.0 {
        x
    } else {
        2.0 - x
    }
}

/// Criterion 9: cascade rendering against closed forms.
#[test]
fn criterion_09_cascade() {
    let haar = builtin("haar").unwrap();
    let out = refine::cascade(&haar, 8).unwrap();
    assert_eq!(
        out.iterations, 1,
        "box must be reproduced after iteration 1"
    );
    assert_eq!(out.delta_sup, 0.0);

    let mask = FilterSeq::scalar_1d(0, &[(1, 4), (1, 2), (1, 4)]);
    let two = DilationMatrix::scalar(1, 2).unwrap();
    let rendered = refine::cascade_mask(&mask, &two, 10).unwrap();
    let mut worst = 0.0f64;
    for y in rendered.samples.indices() {
        let x = rendered.samples.grid_point(&y)[0];
        worst = worst.max((rendered.samples.at(&y, 0).re - hat(x)).abs());
    }
    assert!(worst < 1e-10, "hat error {worst}");

    let hat12 = refine::cascade_mask(&mask, &two, 12).unwrap().samples;
    let z = Lattice::standard(1);
    let gram = refine::gram_shifts(&hat12, &hat12, &z, 4).unwrap();
    let v0 = gram.value_at(&[0]).unwrap()[0].re;
    let v1 = gram.value_at(&[1]).unwrap()[0].re;
    assert!((v0 - 2.0 / 3.0).abs() < 1e-3, "gram(0) = {v0}");
    assert!((v1 - 1.0 / 6.0).abs() < 1e-3, "gram(1) = {v1}");
    let (lo, hi) = refine::riesz_bounds(&gram, 64, 1).unwrap();
    assert!((lo - 1.0 / 3.0).abs() < 2e-3, "riesz lo = {lo}");
    assert!((hi - 1.0).abs() < 2e-3, "riesz hi = {hi}");
    pass(
        9,
        "cascade",
        &format!(
            "box exact; hat error {worst:.2e}; gram ({v0:.5}, {v1:.5}); riesz ({lo:.5}, {hi:.5})"
        ),
    );
}

/// Criterion 10: function-level biorthogonality for the critically sampled
/// builtins.
#[test]
fn criterion_10_function_biorthogonality() {
    for name in ["haar", "haar-split4"] {
        let bank = builtin(name).unwrap();
        let rep = refine::check_function_biorthogonality(&bank, 12, 4).unwrap();
        assert_eq!(rep.verdict, Verdict::PassNumeric, "{name}");
        assert!(rep.max_residual < 1e-4, "{name}: {}", rep.max_residual);
    }
    pass(
        10,
        "function biorthogonality",
        "haar and haar-split4 cross-Gram δ(k) within 1e-4 at n=12, |k| ≤ 4",
    );
}

/// Periodic pipeline double-check shared by criteria 4 and 5: a periodic
/// round trip on admissible data stays below the reconstruction budget.
#[test]
fn periodic_round_trip_support() {
    let mut rng = SplitMix64::new(0x0404);
    let cases: [(&str, usize, Vec<i64>); 3] = [
        ("haar", 3, vec![256]),
        ("haar-split4", 2, vec![256]),
        ("bspline-tf", 4, vec![256]),
    ];
    for (name, levels, period) in cases {
        let bank = builtin(name).unwrap();
        let mut v = PeriodicArray::zeros(1, 1, 1, period.clone()).unwrap();
        for c in v.data_mut() {
            *c = Complex64::new(rng.next_unit(), 0.0);
        }
        let pyr = xform::analyze_periodic(&bank, &v, levels).unwrap();
        let out = xform::synthesize_periodic(&bank, &pyr).unwrap();
        assert!(out.max_abs_diff(&v) < 1e-11, "{name}");
    }
    let bank = builtin("haar2d").unwrap();
    let mut v = PeriodicArray::zeros(2, 1, 1, vec![32, 32]).unwrap();
    for c in v.data_mut() {
        *c = Complex64::new(rng.next_unit(), 0.0);
    }
    let pyr = xform::analyze_periodic(&bank, &v, 3).unwrap();
    let out = xform::synthesize_periodic(&bank, &pyr).unwrap();
    assert!(out.max_abs_diff(&v) < 1e-11);
}
