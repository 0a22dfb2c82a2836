//! Algebraic verification of filter banks: perfect reconstruction (time and
//! frequency side), biorthogonality, critical sampling, redundancy rate.
//!
//! The time-domain impulse test is the authoritative checker because it runs
//! in exact arithmetic whenever the bank's coefficients allow: ṼW commutes
//! with shifts along Λ = ∩_l M_l·Z^d (every λ ∈ Λ is M_l·q_l for all l, so
//! each channel's transition/subdivision pair carries the shift through), and
//! both operators are local, so impulses over the finitely many cosets of
//! Z^d/Λ decide ṼW = identity on all finitely supported data. The Fourier
//! checker is advisory: its root-of-unity phases force float arithmetic.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::bank::{ChannelRole, FilterBank};
use crate::error::{Error, Result};
use crate::filterseq::{self, FilterSeq};
use crate::lattice::{self, coset_reps, omega_in, Lattice, Rat};
use crate::xform::{self, CoefficientPyramid, PyramidBands};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Exact-arithmetic pass (residual exactly zero).
    Pass,
    /// Float pass within the tolerance carried by `max_residual`.
    PassNumeric,
    Fail,
    /// Check does not apply to this bank; see the witness note.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub location: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub property: String,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub witnesses: Vec<Witness>,
    pub arithmetic: Arithmetic,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass | Verdict::PassNumeric)
    }

    pub fn verdict_str(&self) -> &'static str {
        match self.verdict {
            Verdict::Pass => "pass",
            Verdict::PassNumeric => "pass_numeric",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
        }
    }

    pub fn arithmetic_str(&self) -> &'static str {
        match self.arithmetic {
            Arithmetic::Exact => "exact",
            Arithmetic::Float => "float",
        }
    }
}

const MAX_WITNESSES: usize = 8;
const PR_TOL: f64 = 1e-10;
const IMPULSE_BUDGET: i64 = 1_000_000;

/// Λ = ∩_l M_l·Z^d over all channels.
pub fn common_shift_lattice(bank: &FilterBank) -> Result<Lattice> {
    let mut lam = Lattice::standard(bank.dim());
    for ch in bank.channels() {
        lam = lattice::intersect(&lam, &Lattice::from_dilation(&ch.dilation))?;
    }
    Ok(lam)
}

struct Accumulator {
    max_residual: f64,
    witnesses: Vec<Witness>,
    exact_ok: bool,
    exact_equal: bool,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            max_residual: 0.0,
            witnesses: Vec::new(),
            exact_ok: true,
            exact_equal: true,
        }
    }

    fn compare(&mut self, location: &str, got: &FilterSeq, expected: &FilterSeq) -> Result<()> {
        let resid = filterseq::max_abs_diff(got, expected)?;
        match filterseq::exact_eq(got, expected) {
            Some(eq) => self.exact_equal &= eq,
            None => self.exact_ok = false,
        }
        if resid > self.max_residual {
            self.max_residual = resid;
        }
        if resid > PR_TOL && self.witnesses.len() < MAX_WITNESSES {
            let worst = worst_entry(got, expected);
            self.witnesses.push(Witness {
                location: format!(
                    "{location}, n={:?}, entry ({},{})",
                    worst.0, worst.1, worst.2
                ),
                expected: format!("{}", expected.at(&worst.0, worst.1, worst.2)),
                got: format!("{}", got.at(&worst.0, worst.1, worst.2)),
            });
        }
        Ok(())
    }

    fn into_report(self, property: &str) -> VerificationReport {
        let arithmetic = if self.exact_ok {
            Arithmetic::Exact
        } else {
            Arithmetic::Float
        };
        let verdict = match arithmetic {
            Arithmetic::Exact => {
                if self.exact_equal {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            Arithmetic::Float => {
                if self.max_residual <= PR_TOL {
                    Verdict::PassNumeric
                } else {
                    Verdict::Fail
                }
            }
        };
        let max_residual = if verdict == Verdict::Pass {
            0.0
        } else {
            self.max_residual
        };
        VerificationReport {
            property: property.into(),
            verdict,
            max_residual,
            witnesses: self.witnesses,
            arithmetic,
        }
    }
}

fn worst_entry(got: &FilterSeq, expected: &FilterSeq) -> (Vec<i64>, usize, usize) {
    let mut best = (vec![0; got.dim()], 0usize, 0usize);
    let mut worst = -1.0f64;
    for k in got.points().chain(expected.points()) {
        for i in 0..got.rows() {
            for j in 0..got.cols() {
                let d = (got.at(&k, i, j) - expected.at(&k, i, j)).norm();
                if d > worst {
                    worst = d;
                    best = (k.clone(), i, j);
                }
            }
        }
    }
    best
}

/// Perfect reconstruction by 1-level impulse probing over Z^d/Λ.
pub fn check_pr_time(bank: &FilterBank) -> Result<VerificationReport> {
    let d = bank.dim();
    let r = bank.multiplicity();
    let lam = common_shift_lattice(bank)?;
    if lam.index().saturating_mul(r as i64) > IMPULSE_BUDGET {
        return Err(Error::EnvelopeExceeded(format!(
            "{} impulse probes",
            lam.index() * r as i64
        )));
    }
    let reps = lattice::quotient_reps(&Lattice::standard(d), &lam)?;
    let mut acc = Accumulator::new();
    for j in 0..r {
        for k in &reps {
            let v = FilterSeq::delta_row(d, r, j, k);
            let pyr = xform::analyze(bank, &v, 1)?;
            let out = xform::synthesize(bank, &pyr)?;
            acc.compare(&format!("e_{j}·δ at k={k:?}"), &out, &v)?;
        }
    }
    Ok(acc.into_report("pr-time"))
}

fn rat_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// All distinct frequency offsets ∪_l Ω_l.
fn all_offsets(bank: &FilterBank) -> Vec<Vec<Rat>> {
    let mut seen: HashSet<Vec<Rat>> = HashSet::new();
    let mut out = Vec::new();
    for ch in bank.channels() {
        for w in coset_reps(&ch.dilation).reps() {
            if seen.insert(w.clone()) {
                out.push(w.clone());
            }
        }
    }
    out
}

/// Perfect reconstruction on the frequency side: for each offset ω the
/// Laurent coefficients of Σ_l χ_{Ω_l}(ω)·conj(b̂_l(ξ))^T·b̂̃_l(ξ+2πω) must
/// form δ(ω)·I_r. A ξ-grid evaluation with grid_n^d points is added when
/// grid_n > 0; the reported residual is the max over both routes.
pub fn check_pr_fourier(bank: &FilterBank, grid_n: usize, tol: f64) -> Result<VerificationReport> {
    let d = bank.dim();
    let r = bank.multiplicity();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut max_residual = 0.0f64;
    let mut witnesses = Vec::new();
    let offsets = all_offsets(bank);
    for omega in &offsets {
        let is_zero = omega.iter().all(|x| *x == Ratio::from_integer(0));
        let mut laurent: HashMap<Vec<i64>, Vec<Complex64>> = HashMap::new();
        for ch in bank.channels() {
            if !omega_in(&ch.dilation, omega) {
                continue;
            }
            let b = &ch.primal;
            let bd = &ch.dual;
            for k1 in b.points() {
                for k2 in bd.points() {
                    let t: Vec<i64> = k2.iter().zip(&k1).map(|(a, b)| a - b).collect();
                    let phase: f64 = k2
                        .iter()
                        .zip(omega)
                        .map(|(k, w)| -two_pi * *k as f64 * rat_f64(w))
                        .sum();
                    let e = Complex64::new(0.0, phase).exp();
                    let entry = laurent
                        .entry(t)
                        .or_insert_with(|| vec![Complex64::new(0.0, 0.0); r * r]);
                    // conj(b(k1))^T · b̃(k2): (r×rows)·(rows×r)
                    for i in 0..r {
                        for jj in 0..r {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for t_row in 0..b.rows() {
                                acc += b.at(&k1, t_row, i).conj() * bd.at(&k2, t_row, jj);
                            }
                            entry[i * r + jj] += acc * e;
                        }
                    }
                }
            }
        }
        for (t, mat) in &laurent {
            for i in 0..r {
                for jj in 0..r {
                    let target = if is_zero && t.iter().all(|x| *x == 0) && i == jj {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let resid = (mat[i * r + jj] - target).norm();
                    if resid > max_residual {
                        max_residual = resid;
                    }
                    if resid > tol && witnesses.len() < MAX_WITNESSES {
                        witnesses.push(Witness {
                            location: format!("ω={omega:?}, t={t:?}, entry ({i},{jj})"),
                            expected: format!("{target}"),
                            got: format!("{}", mat[i * r + jj]),
                        });
                    }
                }
            }
        }
        // the t = 0 coefficient must exist when ω = 0
        if is_zero && !laurent.contains_key(&vec![0i64; d]) {
            max_residual = f64::max(max_residual, 1.0);
        }
    }
    if grid_n > 0 {
        let mut grid_idx = vec![0usize; d];
        loop {
            let xi: Vec<f64> = grid_idx
                .iter()
                .map(|&m| two_pi * m as f64 / grid_n as f64)
                .collect();
            for omega in &offsets {
                let is_zero = omega.iter().all(|x| *x == Ratio::from_integer(0));
                let shifted: Vec<f64> = xi
                    .iter()
                    .zip(omega)
                    .map(|(x, w)| x + two_pi * rat_f64(w))
                    .collect();
                let mut total = vec![Complex64::new(0.0, 0.0); r * r];
                for ch in bank.channels() {
                    if !omega_in(&ch.dilation, omega) {
                        continue;
                    }
                    let bf = filterseq::symbol(&ch.primal, &xi);
                    let bdf = filterseq::symbol(&ch.dual, &shifted);
                    let rows = ch.primal.rows();
                    for i in 0..r {
                        for jj in 0..r {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for t_row in 0..rows {
                                acc += bf[t_row * r + i].conj() * bdf[t_row * r + jj];
                            }
                            total[i * r + jj] += acc;
                        }
                    }
                }
                for i in 0..r {
                    for jj in 0..r {
                        let target = if is_zero && i == jj { 1.0 } else { 0.0 };
                        let resid = (total[i * r + jj] - target).norm();
                        if resid > max_residual {
                            max_residual = resid;
                        }
                    }
                }
            }
            // advance the grid index
            let mut ax = 0;
            loop {
                if ax == d {
                    break;
                }
                grid_idx[ax] += 1;
                if grid_idx[ax] < grid_n {
                    break;
                }
                grid_idx[ax] = 0;
                ax += 1;
            }
            if ax == d {
                break;
            }
        }
    }
    let verdict = if max_residual <= tol {
        Verdict::PassNumeric
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        property: "pr-fourier".into(),
        verdict,
        max_residual,
        witnesses,
        arithmetic: Arithmetic::Float,
    })
}

/// Biorthogonality: PR plus WṼ = identity on the coefficient side, probed by
/// per-channel impulses over Z^d/(M_l^{-1}Λ).
pub fn check_biorthogonal(bank: &FilterBank) -> Result<VerificationReport> {
    let pr = check_pr_time(bank)?;
    if !pr.passed() {
        return Ok(VerificationReport {
            property: "biorthogonal".into(),
            verdict: Verdict::Fail,
            max_residual: pr.max_residual,
            witnesses: vec![Witness {
                location: "pr-time precondition".into(),
                expected: "perfect reconstruction".into(),
                got: format!("pr residual {}", pr.max_residual),
            }],
            arithmetic: pr.arithmetic,
        });
    }
    let d = bank.dim();
    let r = bank.multiplicity();
    let lam = common_shift_lattice(bank)?;
    let mut acc = Accumulator::new();
    for (l, ch) in bank.channels().iter().enumerate() {
        let shift_basis = ch.dilation.inv_times_mat(lam.basis()).ok_or_else(|| {
            Error::InvariantViolation("Λ is not inside the channel's dilation lattice".into())
        })?;
        let sub = Lattice::from_basis(shift_basis)?;
        if sub.index().saturating_mul(r as i64) > IMPULSE_BUDGET {
            return Err(Error::EnvelopeExceeded("biorthogonality probes".into()));
        }
        let reps = lattice::quotient_reps(&Lattice::standard(d), &sub)?;
        let components = if l == 0 { r } else { 1 };
        for j in 0..components {
            for p in &reps {
                let mut pyr = empty_pyramid(bank, 1);
                let PyramidBands::Free { details, approx } = &mut pyr.bands else {
                    unreachable!()
                };
                if l == 0 {
                    *approx = FilterSeq::delta_row(d, r, j, p);
                } else {
                    details[0][l - 1] = FilterSeq::delta_row(d, 1, 0, p);
                }
                let x = xform::synthesize(bank, &pyr)?;
                let out = xform::analyze(bank, &x, 1)?;
                let (
                    PyramidBands::Free {
                        details: din,
                        approx: ain,
                    },
                    PyramidBands::Free {
                        details: dout,
                        approx: aout,
                    },
                ) = (&pyr.bands, &out.bands)
                else {
                    unreachable!()
                };
                acc.compare(
                    &format!("input channel {l} impulse p={p:?} j={j} → approx"),
                    aout,
                    ain,
                )?;
                for (k, (got, expected)) in dout[0].iter().zip(&din[0]).enumerate() {
                    acc.compare(
                        &format!("input channel {l} impulse p={p:?} j={j} → detail {}", k + 1),
                        got,
                        expected,
                    )?;
                }
            }
        }
    }
    Ok(acc.into_report("biorthogonal"))
}

/// Exact critical-sampling ratio r/|det M_0| + Σ_l 1/|det M_l| and its
/// comparison against the multiplicity r.
pub fn critical_sampling(bank: &FilterBank) -> (Rat, bool) {
    let r = bank.multiplicity() as i64;
    let mut total = Rat::new(r, bank.lowpass().dilation.det_abs());
    for ch in &bank.channels()[1..] {
        if ch.role == ChannelRole::Wavelet {
            total += Rat::new(1, ch.dilation.det_abs());
        }
    }
    (total, total == Rat::from_integer(r))
}

#[derive(Debug, Clone)]
pub struct RedundancyReport {
    /// Stored coefficient scalars per input scalar, in closed form.
    pub closed: Rat,
    /// (stored, input) scalar counts from an actual periodic pyramid.
    pub counted: Option<(u64, u64)>,
}

/// Redundancy rate of the J-level transform:
/// (Σ_{j=1..J} Σ_{l=1..s} |det M_0|^{−(j−1)}·|det M_l|^{−1})/r + |det M_0|^{−J}.
/// With a period, additionally counts actual pyramid entries and checks that
/// the count matches the closed form exactly.
pub fn redundancy_rate(
    bank: &FilterBank,
    levels: usize,
    period: Option<&[i64]>,
) -> Result<RedundancyReport> {
    let r = bank.multiplicity() as i64;
    let det0 = bank.lowpass().dilation.det_abs();
    let pow = |base: i64, e: usize| -> Result<i64> {
        base.checked_pow(e as u32)
            .ok_or_else(|| Error::EnvelopeExceeded("redundancy exponent overflow".into()))
    };
    let mut closed = Rat::new(1, pow(det0, levels)?);
    for j in 1..=levels {
        let scale = Rat::new(1, pow(det0, j - 1)?);
        for ch in &bank.channels()[1..] {
            closed += scale * Rat::new(1, ch.dilation.det_abs()) / Rat::from_integer(r);
        }
    }
    let counted = match period {
        None => None,
        Some(n) => {
            let v = crate::filterseq::PeriodicArray::zeros(
                bank.dim(),
                1,
                bank.multiplicity(),
                n.to_vec(),
            )?;
            let pyr = xform::analyze_periodic(bank, &v, levels)?;
            let stored = pyr.stored_scalars();
            let input: u64 =
                n.iter().map(|&x| x as u64).product::<u64>() * bank.multiplicity() as u64;
            let counted_rate = Rat::new(stored as i64, input as i64);
            if counted_rate != closed {
                return Err(Error::InvariantViolation(format!(
                    "counted rate {counted_rate} disagrees with closed form {closed}"
                )));
            }
            Some((stored, input))
        }
    };
    Ok(RedundancyReport { closed, counted })
}

/// Deterministic single-coefficient perturbation (+delta on one primal tap),
/// dropping exact data so the float path is exercised. Test helper shared
/// across modules and the acceptance suite.
pub fn perturb_coefficient(bank: &FilterBank, which: usize, delta: f64) -> FilterBank {
    let mut channels: Vec<crate::bank::Channel> = bank.channels().to_vec();
    let n_ch = channels.len();
    let ch = &mut channels[which % n_ch];
    let f = &ch.primal;
    let total = f.coeffs().len();
    let pick = (which * 7 + 3) % total;
    let mut coeffs = f.coeffs().to_vec();
    coeffs[pick] += Complex64::new(delta, 0.0);
    ch.primal = FilterSeq::from_complex(
        f.dim(),
        f.rows(),
        f.cols(),
        f.offset().to_vec(),
        f.shape().to_vec(),
        coeffs,
    )
    .expect("same storage layout");
    FilterBank::new(
        bank.dim(),
        bank.multiplicity(),
        format!("{}~perturbed", bank.name()),
        channels,
    )
    .expect("perturbation keeps shapes valid")
}

#[cfg(test)]
pub(crate) fn tests_perturb(bank: &FilterBank, which: usize, delta: f64) -> FilterBank {
    perturb_coefficient(bank, which, delta)
}

/// All-zero free pyramid with the given level count. Test helper.
pub fn empty_pyramid(bank: &FilterBank, levels: usize) -> CoefficientPyramid {
    let d = bank.dim();
    let r = bank.multiplicity();
    CoefficientPyramid {
        bank_name: bank.name().to_string(),
        levels,
        bands: PyramidBands::Free {
            details: vec![vec![FilterSeq::zero(d, 1, 1); bank.wavelet_count()]; levels],
            approx: FilterSeq::zero(d, 1, r),
        },
    }
}

#[cfg(test)]
pub(crate) fn tests_zero_pyramid(bank: &FilterBank, levels: usize) -> CoefficientPyramid {
    empty_pyramid(bank, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{builtin, Channel, FilterBank, BUILTIN_NAMES};
    use crate::filterseq::ScaledRadical;
    use crate::rng::SplitMix64;

    use super::perturb_coefficient as perturb;

    #[test]
    fn pr_time_builtins_exact() {
        for name in BUILTIN_NAMES {
            let bank = builtin(name).unwrap();
            let rep = check_pr_time(&bank).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "{name}: {:?}", rep.witnesses);
            assert_eq!(rep.arithmetic, Arithmetic::Exact);
            assert_eq!(rep.max_residual, 0.0);
        }
    }

    #[test]
    fn pr_time_detects_corruption() {
        // replace haar's wavelet by a copy of the lowpass
        let bank = builtin("haar").unwrap();
        let mut channels = bank.channels().to_vec();
        channels[1].primal = channels[0].primal.clone();
        channels[1].dual = channels[0].dual.clone();
        let bad = FilterBank::new(1, 1, "haar-bad", channels).unwrap();
        let rep = check_pr_time(&bad).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(!rep.witnesses.is_empty());
        assert!(rep.max_residual > 1e-3);
    }

    #[test]
    fn pr_fourier_builtins() {
        for name in BUILTIN_NAMES {
            let bank = builtin(name).unwrap();
            let rep = check_pr_fourier(&bank, 0, 1e-10).unwrap();
            assert_eq!(rep.verdict, Verdict::PassNumeric, "{name}");
            assert!(rep.max_residual < 1e-12, "{name}: {}", rep.max_residual);
        }
        let haar = builtin("haar").unwrap();
        let rep = check_pr_fourier(&haar, 16, 1e-10).unwrap();
        assert!(rep.max_residual < 1e-15);
    }

    #[test]
    fn checker_agreement_on_perturbations() {
        let mut idx = 0;
        for name in BUILTIN_NAMES {
            let bank = builtin(name).unwrap();
            for _ in 0..5 {
                let bad = perturb(&bank, idx, 0.01);
                idx += 1;
                let t = check_pr_time(&bad).unwrap();
                let f = check_pr_fourier(&bad, 0, 1e-10).unwrap();
                assert_eq!(t.passed(), f.passed(), "{name} perturbation {idx}");
                assert_eq!(t.verdict, Verdict::Fail);
                assert!(t.max_residual > 1e-3);
            }
        }
    }

    #[test]
    fn biorthogonality_triage() {
        let haar = builtin("haar").unwrap();
        assert_eq!(check_biorthogonal(&haar).unwrap().verdict, Verdict::Pass);
        let split4 = builtin("haar-split4").unwrap();
        assert_eq!(check_biorthogonal(&split4).unwrap().verdict, Verdict::Pass);
        let bs = builtin("bspline-tf").unwrap();
        let rep = check_biorthogonal(&bs).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.max_residual > 0.1, "deviation {}", rep.max_residual);
    }

    #[test]
    fn biorthogonality_implies_pr_and_critical_sampling() {
        for name in BUILTIN_NAMES {
            let bank = builtin(name).unwrap();
            let bi = check_biorthogonal(&bank).unwrap();
            if bi.passed() {
                assert!(check_pr_time(&bank).unwrap().passed());
                let (_, equal) = critical_sampling(&bank);
                assert!(equal, "{name} biorthogonal but not critically sampled");
            }
        }
        // rescaling primal by c and dual by 1/c preserves biorthogonality and
        // hence the critical-sampling identity stays satisfied
        let mut rng = SplitMix64::new(0xb10);
        for name in ["haar", "haar-split4"] {
            for _ in 0..5 {
                let base = builtin(name).unwrap();
                let num = rng.next_range(1, 5);
                let den = rng.next_range(1, 5);
                let c = ScaledRadical::new(num, den, 1).unwrap();
                let c_inv = ScaledRadical::new(den, num, 1).unwrap();
                let mut channels = base.channels().to_vec();
                for ch in &mut channels {
                    ch.primal = ch.primal.scaled_radical(&c);
                    ch.dual = ch.dual.scaled_radical(&c_inv);
                }
                let scaled = FilterBank::new(1, 1, format!("{name}-scaled"), channels).unwrap();
                let bi = check_biorthogonal(&scaled).unwrap();
                assert_eq!(bi.verdict, Verdict::Pass, "{name} scaled by {num}/{den}");
                assert!(critical_sampling(&scaled).1);
            }
        }
    }

    #[test]
    fn critical_sampling_values() {
        let (v, eq) = critical_sampling(&builtin("haar").unwrap());
        assert_eq!((v, eq), (Rat::from_integer(1), true));
        let (v, eq) = critical_sampling(&builtin("haar-split4").unwrap());
        assert_eq!((v, eq), (Rat::from_integer(1), true));
        let (v, eq) = critical_sampling(&builtin("bspline-tf").unwrap());
        assert_eq!((v, eq), (Rat::new(3, 2), false));
    }

    #[test]
    fn redundancy_closed_forms() {
        let haar = builtin("haar").unwrap();
        for j in 1..=5 {
            let rep = redundancy_rate(&haar, j, None).unwrap();
            assert_eq!(rep.closed, Rat::from_integer(1));
        }
        let bs = builtin("bspline-tf").unwrap();
        let rep = redundancy_rate(&bs, 4, None).unwrap();
        assert_eq!(rep.closed, Rat::new(31, 16));
        let split4 = builtin("haar-split4").unwrap();
        let rep = redundancy_rate(&split4, 2, None).unwrap();
        assert_eq!(rep.closed, Rat::from_integer(1));
    }

    #[test]
    fn redundancy_counted_matches() {
        let bs = builtin("bspline-tf").unwrap();
        let rep = redundancy_rate(&bs, 4, Some(&[256])).unwrap();
        assert_eq!(rep.closed, Rat::new(31, 16));
        assert_eq!(rep.counted, Some((496, 256)));
        let split4 = builtin("haar-split4").unwrap();
        let rep = redundancy_rate(&split4, 2, Some(&[16])).unwrap();
        assert_eq!(rep.counted, Some((16, 16)));
        let haar2d = builtin("haar2d").unwrap();
        let rep = redundancy_rate(&haar2d, 2, Some(&[16, 16])).unwrap();
        assert_eq!(rep.closed, Rat::from_integer(1));
        assert_eq!(rep.counted, Some((256, 256)));
    }

    #[test]
    fn dual_swap_preserves_pr() {
        for name in BUILTIN_NAMES {
            let bank = builtin(name).unwrap();
            let swapped = bank.dual_swap();
            assert_eq!(
                check_pr_time(&bank).unwrap().passed(),
                check_pr_time(&swapped).unwrap().passed()
            );
        }
        let mut rng = SplitMix64::new(0xbeef);
        let bad = perturb(
            &builtin("haar").unwrap(),
            rng.next_range(0, 9) as usize,
            0.01,
        );
        assert_eq!(
            check_pr_time(&bad).unwrap().passed(),
            check_pr_time(&bad.dual_swap()).unwrap().passed()
        );
    }

    /// Matrix-valued (r = 2) pipeline: exact PR, biorthogonality, critical
    /// sampling, checker agreement, and redundancy all work on a
    /// multiplicity-2 bank.
    #[test]
    fn multiplicity_two_bank() {
        let bank = crate::bank::test_bank_parallel_haar();
        let pr = check_pr_time(&bank).unwrap();
        assert_eq!(pr.verdict, Verdict::Pass, "{:?}", pr.witnesses);
        assert_eq!(pr.arithmetic, Arithmetic::Exact);
        let fr = check_pr_fourier(&bank, 8, 1e-10).unwrap();
        assert!(fr.passed());
        let bi = check_biorthogonal(&bank).unwrap();
        assert_eq!(bi.verdict, Verdict::Pass, "{:?}", bi.witnesses);
        let (ratio, equal) = critical_sampling(&bank);
        assert_eq!((ratio, equal), (Rat::from_integer(2), true));
        let red = redundancy_rate(&bank, 3, Some(&[16])).unwrap();
        assert_eq!(red.closed, Rat::from_integer(1));
        assert_eq!(red.counted, Some((32, 32)));
    }

    /// Non-diagonal dilations: the quincunx Haar pair passes every checker;
    /// probes run over the quotient of the quincunx lattice.
    #[test]
    fn quincunx_bank() {
        let bank = crate::bank::test_bank_quincunx_haar();
        let lam = common_shift_lattice(&bank).unwrap();
        assert_eq!(lam.index(), 2);
        let pr = check_pr_time(&bank).unwrap();
        assert_eq!(pr.verdict, Verdict::Pass, "{:?}", pr.witnesses);
        assert_eq!(pr.arithmetic, Arithmetic::Exact);
        assert!(check_pr_fourier(&bank, 6, 1e-10).unwrap().passed());
        let bi = check_biorthogonal(&bank).unwrap();
        assert_eq!(bi.verdict, Verdict::Pass, "{:?}", bi.witnesses);
        let (ratio, equal) = critical_sampling(&bank);
        assert_eq!((ratio, equal), (Rat::from_integer(1), true));
        // free-mode round trip stays exact
        let mut rng = SplitMix64::new(0x71);
        let vals: Vec<ScaledRadical> = (0..12)
            .map(|_| ScaledRadical::from_integer(rng.next_range(-5, 5)))
            .collect();
        let v = FilterSeq::from_exact(2, 1, 1, vec![-1, 0], vec![4, 3], vals).unwrap();
        let pyr = crate::xform::analyze(&bank, &v, 2).unwrap();
        let out = crate::xform::synthesize(&bank, &pyr).unwrap();
        assert_eq!(crate::filterseq::exact_eq(&out, &v), Some(true));
    }

    /// Banks whose impulse budget explodes are refused, not ground through.
    #[test]
    fn envelope_guard() {
        let mk = |det: i64| {
            let f = FilterSeq::scalar_1d(0, &[(1, 2), (1, 2)]);
            Channel {
                dilation: crate::lattice::DilationMatrix::scalar(1, det).unwrap(),
                primal: f.clone(),
                dual: f,
                role: ChannelRole::Wavelet,
            }
        };
        let mut low = mk(1009);
        low.role = ChannelRole::Lowpass;
        let bank = FilterBank::new(1, 1, "huge", vec![low, mk(1013)]).unwrap();
        assert!(matches!(
            check_pr_time(&bank),
            Err(Error::EnvelopeExceeded(_))
        ));
    }

    #[test]
    fn random_bank_fails_fourier() {
        let mut rng = SplitMix64::new(0x77);
        let m = crate::lattice::DilationMatrix::scalar(1, 2).unwrap();
        let mk = |rng: &mut SplitMix64| {
            let coeffs: Vec<Complex64> = (0..3)
                .map(|_| Complex64::new(rng.next_unit(), 0.0))
                .collect();
            FilterSeq::from_complex(1, 1, 1, vec![0], vec![3], coeffs).unwrap()
        };
        let b0 = mk(&mut rng);
        let b1 = mk(&mut rng);
        let bank = FilterBank::new(
            1,
            1,
            "random",
            vec![
                Channel {
                    dilation: m.clone(),
                    primal: b0.clone(),
                    dual: b0,
                    role: ChannelRole::Lowpass,
                },
                Channel {
                    dilation: m,
                    primal: b1.clone(),
                    dual: b1,
                    role: ChannelRole::Wavelet,
                },
            ],
        )
        .unwrap();
        assert_eq!(
            check_pr_fourier(&bank, 0, 1e-10).unwrap().verdict,
            Verdict::Fail
        );
    }
}
