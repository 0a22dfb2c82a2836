//! Frame-bound estimation for the J-level analysis operator on periodic
//! spaces, and the duality relations between analysis/synthesis norms.
//!
//! The Gram operator G = V_J∘W_J (synthesis with the primal filters after
//! analysis with the primal filters) is self-adjoint and positive
//! semidefinite on the r·ΠN-dimensional periodic space, applied matrix-free.
//! The largest eigenvalue comes from power iteration, the smallest from power
//! iteration on the shifted operator c2·I − G. Start vectors come from a
//! fixed seed so reports are reproducible.

use num_complex::Complex64;

use crate::bank::FilterBank;
use crate::error::Result;
use crate::filterseq::PeriodicArray;
use crate::rng::SplitMix64;
use crate::verify::{Arithmetic, Verdict, VerificationReport, Witness};
use crate::xform::{self, CoefficientPyramid, PyramidBands};

pub const POWER_SEED: u64 = 0x6D69_7864;

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub levels: usize,
    pub period: Vec<i64>,
    /// Lower/upper frame-bound estimates (smallest/largest eigenvalue of G).
    pub c1_est: f64,
    pub c2_est: f64,
    pub norm_w: f64,
    pub norm_v: f64,
    pub norm_w_dual: f64,
    pub norm_v_dual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn signal_to_vec(v: &PeriodicArray) -> Vec<Complex64> {
    v.data().to_vec()
}

fn vec_to_signal(bank: &FilterBank, period: &[i64], data: &[Complex64]) -> Result<PeriodicArray> {
    PeriodicArray::from_data(
        bank.dim(),
        1,
        bank.multiplicity(),
        period.to_vec(),
        data.to_vec(),
    )
}

/// Flatten a pyramid in decomposition order (details level by level, then
/// the approximation band).
fn pyramid_to_vec(pyr: &CoefficientPyramid) -> Vec<Complex64> {
    let PyramidBands::Periodic {
        details, approx, ..
    } = &pyr.bands
    else {
        unreachable!("stability works on periodic pyramids");
    };
    let mut out = Vec::new();
    for level in details {
        for band in level {
            out.extend_from_slice(band.data());
        }
    }
    out.extend_from_slice(approx.data());
    out
}

fn vec_to_pyramid(template: &CoefficientPyramid, data: &[Complex64]) -> CoefficientPyramid {
    let PyramidBands::Periodic {
        details,
        approx,
        period,
    } = &template.bands
    else {
        unreachable!()
    };
    let mut out = template.clone();
    let mut cursor = 0usize;
    let PyramidBands::Periodic {
        details: od,
        approx: oa,
        ..
    } = &mut out.bands
    else {
        unreachable!()
    };
    let _ = (details, period);
    for level in od {
        for band in level {
            let n = band.data().len();
            band.data_mut().copy_from_slice(&data[cursor..cursor + n]);
            cursor += n;
        }
    }
    let n = approx.data().len();
    oa.data_mut().copy_from_slice(&data[cursor..cursor + n]);
    cursor += n;
    debug_assert_eq!(cursor, data.len());
    out
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

struct PowerResult {
    eigenvalue: f64,
    iterations: usize,
    converged: bool,
}

/// Power iteration on a self-adjoint PSD operator; the Rayleigh quotient is
/// nondecreasing, which is asserted (with float slack) each step.
fn power_iterate(
    dim: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
    mut apply: impl FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
) -> Result<PowerResult> {
    let mut rng = SplitMix64::new(seed);
    let mut x: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.next_unit(), 0.0))
        .collect();
    let n0 = norm(&x);
    for xi in &mut x {
        *xi /= n0;
    }
    let mut rayleigh = f64::NEG_INFINITY;
    for it in 1..=max_iter {
        let y = apply(&x)?;
        let r = dot(&y, &x).re;
        debug_assert!(
            r >= rayleigh - 1e-9 * rayleigh.abs().max(1.0),
            "Rayleigh quotient must be nondecreasing ({rayleigh} -> {r})"
        );
        let ny = norm(&y);
        if ny <= 1e-300 {
            return Ok(PowerResult {
                eigenvalue: 0.0,
                iterations: it,
                converged: true,
            });
        }
        let done = (r - rayleigh).abs() <= tol * r.abs().max(1.0);
        rayleigh = r;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if done {
            return Ok(PowerResult {
                eigenvalue: rayleigh,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(PowerResult {
        eigenvalue: rayleigh,
        iterations: max_iter,
        converged: false,
    })
}

/// G = V_J ∘ W_J with the primal filters on both sides.
fn apply_gram(
    bank: &FilterBank,
    primal_synth: &FilterBank,
    period: &[i64],
    levels: usize,
    x: &[Complex64],
) -> Result<Vec<Complex64>> {
    let v = vec_to_signal(bank, period, x)?;
    let pyr = xform::analyze_periodic(bank, &v, levels)?;
    let out = xform::synthesize_periodic(primal_synth, &pyr)?;
    Ok(signal_to_vec(&out))
}

/// Frame bounds of W_J on the periodic space: c2 = λ_max(G), c1 = smallest
/// eigenvalue via the spectral shift c2·I − G.
pub fn frame_bounds(
    bank: &FilterBank,
    levels: usize,
    period: &[i64],
    max_iter: usize,
    tol: f64,
) -> Result<StabilityReport> {
    xform::check_admissible(bank, period, levels)?;
    let r = bank.multiplicity();
    let n: i64 = period.iter().product();
    let dim = n as usize * r;
    let primal_synth = bank.dual_swap();
    let dual_bank = bank.dual_swap();

    let top = power_iterate(dim, POWER_SEED, max_iter, tol, |x| {
        apply_gram(bank, &primal_synth, period, levels, x)
    })?;
    let c2 = top.eigenvalue;
    let bottom = power_iterate(dim, POWER_SEED ^ 0x1, max_iter, tol, |x| {
        let gx = apply_gram(bank, &primal_synth, period, levels, x)?;
        Ok(x.iter().zip(&gx).map(|(xi, gi)| c2 * xi - gi).collect())
    })?;
    let c1 = (c2 - bottom.eigenvalue).max(0.0);

    // operator norms: ‖W‖² = λ_max(V∘W) on the signal side, ‖V‖² = λ_max(W∘V)
    // on the pyramid side; dual bank analogues.
    let norm_w = c2.max(0.0).sqrt();
    let template = xform::analyze_periodic(
        bank,
        &PeriodicArray::zeros(bank.dim(), 1, r, period.to_vec())?,
        levels,
    )?;
    let pyr_dim = pyramid_to_vec(&template).len();
    let vside = power_iterate(pyr_dim, POWER_SEED ^ 0x2, max_iter, tol, |x| {
        let pyr = vec_to_pyramid(&template, x);
        let sig = xform::synthesize_periodic(&primal_synth, &pyr)?;
        let back = xform::analyze_periodic(bank, &sig, levels)?;
        Ok(pyramid_to_vec(&back))
    })?;
    let norm_v = vside.eigenvalue.max(0.0).sqrt();

    let dual_synth = dual_bank.dual_swap();
    let dtop = power_iterate(dim, POWER_SEED ^ 0x3, max_iter, tol, |x| {
        apply_gram(&dual_bank, &dual_synth, period, levels, x)
    })?;
    let norm_w_dual = dtop.eigenvalue.max(0.0).sqrt();
    let dvside = power_iterate(pyr_dim, POWER_SEED ^ 0x4, max_iter, tol, |x| {
        let pyr = vec_to_pyramid(&template, x);
        let sig = xform::synthesize_periodic(&dual_synth, &pyr)?;
        let back = xform::analyze_periodic(&dual_bank, &sig, levels)?;
        Ok(pyramid_to_vec(&back))
    })?;
    let norm_v_dual = dvside.eigenvalue.max(0.0).sqrt();

    let iterations = top
        .iterations
        .max(bottom.iterations)
        .max(vside.iterations)
        .max(dtop.iterations)
        .max(dvside.iterations);
    let converged =
        top.converged && bottom.converged && vside.converged && dtop.converged && dvside.converged;
    Ok(StabilityReport {
        levels,
        period: period.to_vec(),
        c1_est: c1,
        c2_est: c2,
        norm_w,
        norm_v,
        norm_w_dual,
        norm_v_dual,
        iterations,
        converged,
    })
}

/// Duality relations: ‖W_J‖ = ‖V_J‖ and ‖W̃_J‖ = ‖Ṽ_J‖ (adjoint pairs,
/// checked numerically to 1e−6), plus the sandwich
/// ‖v‖² ≤ ‖W̃_J‖²·‖W_J v‖² on random v for banks with perfect
/// reconstruction.
pub fn check_duality(
    bank: &FilterBank,
    levels: usize,
    period: &[i64],
) -> Result<VerificationReport> {
    let rep = frame_bounds(bank, levels, period, 500, 1e-11)?;
    let mut max_residual = (rep.norm_w - rep.norm_v).abs();
    max_residual = max_residual.max((rep.norm_w_dual - rep.norm_v_dual).abs());
    let mut witnesses = Vec::new();
    if (rep.norm_w - rep.norm_v).abs() > 1e-6 {
        witnesses.push(Witness {
            location: "‖W‖ vs ‖V‖".into(),
            expected: format!("{}", rep.norm_w),
            got: format!("{}", rep.norm_v),
        });
    }
    if (rep.norm_w_dual - rep.norm_v_dual).abs() > 1e-6 {
        witnesses.push(Witness {
            location: "‖W̃‖ vs ‖Ṽ‖".into(),
            expected: format!("{}", rep.norm_w_dual),
            got: format!("{}", rep.norm_v_dual),
        });
    }
    // the sandwich ‖v‖² ≤ ‖W̃_J‖²·‖W_J v‖² holds for every dual pair with
    // perfect reconstruction; a violation is evidence the pair is not dual
    {
        let mut rng = SplitMix64::new(POWER_SEED ^ 0x5);
        let r = bank.multiplicity();
        for trial in 0..20 {
            let mut v = PeriodicArray::zeros(bank.dim(), 1, r, period.to_vec())?;
            for c in v.data_mut() {
                *c = Complex64::new(rng.next_unit(), rng.next_unit());
            }
            let vn = v.norm_sq();
            let wv = xform::analyze_periodic(bank, &v, levels)?;
            let wn: f64 = pyramid_to_vec(&wv).iter().map(|c| c.norm_sqr()).sum();
            let bound = rep.norm_w_dual * rep.norm_w_dual * wn;
            let slack = 1e-9 * vn.max(1.0);
            if vn > bound + slack {
                max_residual = max_residual.max(vn - bound);
                if witnesses.len() < 8 {
                    witnesses.push(Witness {
                        location: format!("sandwich, trial {trial}"),
                        expected: format!("‖v‖² ≤ {bound}"),
                        got: format!("{vn}"),
                    });
                }
            }
        }
    }
    let verdict = if witnesses.is_empty() {
        Verdict::PassNumeric
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        property: format!("duality(J={levels})"),
        verdict,
        max_residual,
        witnesses,
        arithmetic: Arithmetic::Float,
    })
}

/// Adjointness probe used by tests and the acceptance suite:
/// ⟨V_J w, v⟩ = ⟨w, W_J v⟩ on random periodic data.
pub fn adjointness_residual(bank: &FilterBank, levels: usize, period: &[i64]) -> Result<f64> {
    let r = bank.multiplicity();
    let mut rng = SplitMix64::new(POWER_SEED ^ 0x6);
    let primal_synth = bank.dual_swap();
    let template = xform::analyze_periodic(
        bank,
        &PeriodicArray::zeros(bank.dim(), 1, r, period.to_vec())?,
        levels,
    )?;
    let pyr_dim = pyramid_to_vec(&template).len();
    let n: i64 = period.iter().product();
    let dim = n as usize * r;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.next_unit(), rng.next_unit()))
            .collect();
        let w: Vec<Complex64> = (0..pyr_dim)
            .map(|_| Complex64::new(rng.next_unit(), rng.next_unit()))
            .collect();
        let wv = pyramid_to_vec(&xform::analyze_periodic(
            bank,
            &vec_to_signal(bank, period, &v)?,
            levels,
        )?);
        let vw = signal_to_vec(&xform::synthesize_periodic(
            &primal_synth,
            &vec_to_pyramid(&template, &w),
        )?);
        let lhs = dot(&vw, &v);
        let rhs = dot(&w, &wv);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::builtin;
    use crate::error::Error;
    use crate::verify::perturb_coefficient;

    #[test]
    fn haar_bounds_are_one() {
        let bank = builtin("haar").unwrap();
        for levels in 1..=3 {
            let rep = frame_bounds(&bank, levels, &[64], 500, 1e-9).unwrap();
            assert!(rep.converged);
            assert!(rep.iterations < 500);
            assert!((rep.c1_est - 1.0).abs() < 1e-8, "c1 = {}", rep.c1_est);
            assert!((rep.c2_est - 1.0).abs() < 1e-8, "c2 = {}", rep.c2_est);
            assert!(rep.c1_est <= rep.c2_est + 1e-12);
            assert!(rep.norm_w * rep.norm_w <= rep.c2_est * (1.0 + 1e-6));
        }
    }

    #[test]
    fn split4_bounds_are_one() {
        let bank = builtin("haar-split4").unwrap();
        let rep = frame_bounds(&bank, 2, &[16], 500, 1e-9).unwrap();
        assert!(rep.converged);
        assert!((rep.c1_est - 1.0).abs() < 1e-8);
        assert!((rep.c2_est - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bspline_is_tight_with_bound_one() {
        let bank = builtin("bspline-tf").unwrap();
        let rep = frame_bounds(&bank, 2, &[64], 500, 1e-9).unwrap();
        assert!((rep.c1_est - 1.0).abs() < 1e-7, "c1 = {}", rep.c1_est);
        assert!((rep.c2_est - 1.0).abs() < 1e-7, "c2 = {}", rep.c2_est);
        // sandwich on random vectors
        let mut rng = SplitMix64::new(9);
        for _ in 0..50 {
            let mut v = PeriodicArray::zeros(1, 1, 1, vec![64]).unwrap();
            for c in v.data_mut() {
                *c = Complex64::new(rng.next_unit(), rng.next_unit());
            }
            let wn: f64 = pyramid_to_vec(&xform::analyze_periodic(&bank, &v, 2).unwrap())
                .iter()
                .map(|c| c.norm_sqr())
                .sum();
            let vn = v.norm_sq();
            assert!(rep.c1_est * vn <= wn + 1e-9 * vn);
            assert!(wn <= rep.c2_est * vn + 1e-9 * vn);
        }
    }

    #[test]
    fn adjointness_all_builtins() {
        let cases: [(&str, Vec<i64>); 4] = [
            ("haar", vec![16]),
            ("bspline-tf", vec![16]),
            ("haar-split4", vec![16]),
            ("haar2d", vec![8, 8]),
        ];
        for (name, period) in cases {
            let bank = builtin(name).unwrap();
            let jmax = crate::xform::max_levels(&bank, &period).min(3);
            for levels in 1..=jmax {
                let resid = adjointness_residual(&bank, levels, &period).unwrap();
                assert!(resid < 1e-11, "{name} J={levels}: {resid}");
            }
        }
    }

    #[test]
    fn duality_haar() {
        let bank = builtin("haar").unwrap();
        let rep = check_duality(&bank, 2, &[32]).unwrap();
        assert!(rep.passed(), "{:?}", rep.witnesses);
        let fb = frame_bounds(&bank, 2, &[32], 500, 1e-9).unwrap();
        for n in [fb.norm_w, fb.norm_v, fb.norm_w_dual, fb.norm_v_dual] {
            assert!((n - 1.0).abs() < 1e-6);
        }
        // swap symmetry: the dual-swapped bank exchanges the norm pairs
        let sw = frame_bounds(&bank.dual_swap(), 2, &[32], 500, 1e-9).unwrap();
        assert!((sw.norm_w - fb.norm_w_dual).abs() < 1e-9);
        assert!((sw.norm_w_dual - fb.norm_w).abs() < 1e-9);
    }

    #[test]
    fn corrupted_bank_flags_violation() {
        let bank = builtin("haar").unwrap();
        // scale the primal filters down: ṼW = (1/4)·Id, so ‖v‖² > ‖W̃‖²‖Wv‖²
        let shrunk = {
            let mut channels = bank.channels().to_vec();
            for ch in &mut channels {
                ch.primal = ch
                    .primal
                    .scaled_radical(&crate::filterseq::ScaledRadical::new(1, 2, 1).unwrap());
                ch.dual = ch
                    .dual
                    .scaled_radical(&crate::filterseq::ScaledRadical::new(1, 2, 1).unwrap());
            }
            crate::bank::FilterBank::new(1, 1, "haar-shrunk", channels).unwrap()
        };
        let rep = check_duality(&shrunk, 1, &[16]).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail, "{:?}", rep.witnesses);
        let _ = perturb_coefficient(&bank, 0, 0.01);
    }

    #[test]
    fn multiplicity_two_bounds() {
        let bank = crate::bank::test_bank_parallel_haar();
        let rep = frame_bounds(&bank, 2, &[16], 500, 1e-9).unwrap();
        assert!(rep.converged);
        assert!((rep.c1_est - 1.0).abs() < 1e-8, "c1 = {}", rep.c1_est);
        assert!((rep.c2_est - 1.0).abs() < 1e-8, "c2 = {}", rep.c2_est);
        assert!(adjointness_residual(&bank, 2, &[16]).unwrap() < 1e-11);
    }

    #[test]
    fn non_admissible_period_rejected() {
        let bank = builtin("haar").unwrap();
        assert!(matches!(
            frame_bounds(&bank, 3, &[12], 100, 1e-9),
            Err(Error::PeriodNotDivisible { .. })
        ));
    }
}
