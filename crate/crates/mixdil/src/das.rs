//! Discrete affine systems: composed filters, shifted/normalized elements,
//! and the cascade-structure, frame-expansion, and biorthogonality identities
//! they satisfy.
//!
//! The level-j composed filter stacks the lowpass j−1 times under the channel
//! filter; its normalized translates shift along M_0^{j−1}·M_l·Z^d with the
//! scale |det M_0|^{(j−1)/2}·|det M_l|^{1/2} carried exactly whenever the
//! coefficients allow, so primal/dual pairings of equal level are exact
//! rationals.

use num_complex::Complex64;

use crate::bank::FilterBank;
use crate::error::{Error, Result};
use crate::filterseq::{self, FilterSeq, ScaledRadical};
use crate::lattice::IntMatrix;
use crate::rng::SplitMix64;
use crate::verify::{Arithmetic, Verdict, VerificationReport, Witness};

/// Which side of the bank an element is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Primal,
    Dual,
}

/// One normalized, shifted element of a discrete affine system.
#[derive(Debug, Clone)]
pub struct DasElement {
    pub channel: usize,
    pub level: usize,
    pub shift: Vec<i64>,
    pub seq: FilterSeq,
}

/// Elements of the J-level system over a finite shift window: lowpass
/// elements at level J only, wavelet elements at levels 1..=J.
#[derive(Debug, Clone)]
pub struct DiscreteAffineSystem {
    pub bank_name: String,
    pub levels: usize,
    pub elements: Vec<DasElement>,
}

fn filter_of(bank: &FilterBank, l: usize, side: Side) -> Result<&FilterSeq> {
    let ch = bank
        .channels()
        .get(l)
        .ok_or_else(|| Error::InvalidArgument(format!("channel {l} out of range")))?;
    Ok(match side {
        Side::Primal => &ch.primal,
        Side::Dual => &ch.dual,
    })
}

/// Composed level-j filter: the channel filter upsampled by M_0^{j−1},
/// convolved down the lowpass chain. Level 0 is defined for the lowpass
/// channel only and is δ_0·I_r; level 1 is the channel filter itself.
pub fn das_filter(bank: &FilterBank, l: usize, j: usize, side: Side) -> Result<FilterSeq> {
    if j == 0 {
        if l != 0 {
            return Err(Error::InvalidArgument(
                "level 0 exists only for the lowpass channel".into(),
            ));
        }
        return Ok(FilterSeq::delta_identity(bank.dim(), bank.multiplicity()));
    }
    let target = filter_of(bank, l, side)?.clone();
    if j == 1 {
        return Ok(target);
    }
    let m0 = bank.lowpass().dilation.mat();
    let lowpass = filter_of(bank, 0, side)?;
    let mut acc = lowpass.clone();
    for p in 1..j - 1 {
        acc = filterseq::convolve(&filterseq::upsample(lowpass, &m0.pow(p as u32)), &acc)?;
    }
    filterseq::convolve(&filterseq::upsample(&target, &m0.pow((j - 1) as u32)), &acc)
}

/// Shift lattice generator M_0^{j−1}·M_l of the level-j elements.
pub fn shift_matrix(bank: &FilterBank, l: usize, j: usize) -> Result<IntMatrix> {
    let ch = bank
        .channels()
        .get(l)
        .ok_or_else(|| Error::InvalidArgument(format!("channel {l} out of range")))?;
    let m0 = bank.lowpass().dilation.mat();
    m0.pow(j.saturating_sub(1) as u32).mul(ch.dilation.mat())
}

/// Element scale |det M_0|^{(j−1)/2}·|det M_l|^{1/2}.
pub fn element_scale(bank: &FilterBank, l: usize, j: usize) -> Result<ScaledRadical> {
    let det0 = bank.lowpass().dilation.det_abs();
    let detl = bank
        .channels()
        .get(l)
        .ok_or_else(|| Error::InvalidArgument(format!("channel {l} out of range")))?
        .dilation
        .det_abs();
    let mut scale = ScaledRadical::sqrt_integer(detl)?;
    for _ in 0..j.saturating_sub(1) {
        scale = scale
            .checked_mul(&ScaledRadical::sqrt_integer(det0)?)
            .ok_or_else(|| Error::EnvelopeExceeded("element scale overflow".into()))?;
    }
    Ok(scale)
}

/// Normalized, shifted element b_{l,j;k}. Level 0 uses the δ_k·I_r
/// convention.
pub fn das_element(
    bank: &FilterBank,
    l: usize,
    j: usize,
    k: &[i64],
    side: Side,
) -> Result<DasElement> {
    if j == 0 {
        let seq = FilterSeq::delta_identity(bank.dim(), bank.multiplicity()).shifted(k);
        return Ok(DasElement {
            channel: 0,
            level: 0,
            shift: k.to_vec(),
            seq,
        });
    }
    let base = das_filter(bank, l, j, side)?;
    let shift = shift_matrix(bank, l, j)?.mat_vec(k);
    let seq = base
        .scaled_radical(&element_scale(bank, l, j)?)
        .shifted(&shift);
    Ok(DasElement {
        channel: l,
        level: j,
        shift: k.to_vec(),
        seq,
    })
}

fn integer_box(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for ax in 0..lo.len() {
        let mut next = Vec::new();
        for v in &out {
            for x in lo[ax]..=hi[ax] {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// All elements with shifts in [−window, window]^d.
pub fn build_system(
    bank: &FilterBank,
    levels: usize,
    window: i64,
    side: Side,
) -> Result<DiscreteAffineSystem> {
    if levels == 0 {
        return Err(Error::InvalidArgument("level count must be >= 1".into()));
    }
    let d = bank.dim();
    let lo = vec![-window; d];
    let hi = vec![window; d];
    let mut elements = Vec::new();
    for k in integer_box(&lo, &hi) {
        elements.push(das_element(bank, 0, levels, &k, side)?);
    }
    for l in 1..=bank.wavelet_count() {
        for j in 1..=levels {
            for k in integer_box(&lo, &hi) {
                elements.push(das_element(bank, l, j, &k, side)?);
            }
        }
    }
    Ok(DiscreteAffineSystem {
        bank_name: bank.name().to_string(),
        levels,
        elements,
    })
}

/// Shifts k of family (l, j) whose element supports can meet the support box
/// of `data`; computed from exact support bounds, over-inclusive is fine.
fn overlapping_shifts(
    bank: &FilterBank,
    l: usize,
    j: usize,
    side: Side,
    data: &FilterSeq,
) -> Result<Vec<Vec<i64>>> {
    let base = das_filter(bank, l, j, side)?;
    let (Some((blo, bhi)), Some((dlo, dhi))) = (base.bounds(), data.bounds()) else {
        return Ok(Vec::new());
    };
    let shift = shift_matrix(bank, l, j)?;
    let d = bank.dim();
    let inv = shift.inverse().ok_or(Error::SingularMatrix)?;
    // need shift·k ∈ [dlo − bhi, dhi − blo]
    let lo: Vec<i64> = dlo.iter().zip(&bhi).map(|(a, b)| a - b).collect();
    let hi: Vec<i64> = dhi.iter().zip(&blo).map(|(a, b)| a - b).collect();
    let mut klo = vec![i64::MAX; d];
    let mut khi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let pt: Vec<i64> = (0..d)
            .map(|ax| {
                if corner >> ax & 1 == 1 {
                    hi[ax]
                } else {
                    lo[ax]
                }
            })
            .collect();
        let img = crate::lattice::rat_mat_vec(d, &inv, &pt);
        for ax in 0..d {
            klo[ax] = klo[ax].min(img[ax].floor().to_integer());
            khi[ax] = khi[ax].max(img[ax].ceil().to_integer());
        }
    }
    Ok(integer_box(&klo, &khi))
}

/// Σ_k ⟨v, b_{l,j;k}⟩·⟨b̃_{l,j;k}, w⟩ over all shifts with support overlap.
/// Returns the float value plus the exact value when the whole sum stays in
/// the radical algebra.
fn pair_sum(
    bank: &FilterBank,
    l: usize,
    j: usize,
    v: &FilterSeq,
    w: &FilterSeq,
) -> Result<(Complex64, Option<ScaledRadical>)> {
    debug_assert!(j >= 1);
    let mut shifts = overlapping_shifts(bank, l, j, Side::Primal, v)?;
    shifts.extend(overlapping_shifts(bank, l, j, Side::Dual, w)?);
    shifts.sort();
    shifts.dedup();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_exact = Some(ScaledRadical::ZERO);
    for k in shifts {
        let p = das_element(bank, l, j, &k, Side::Primal)?;
        let pd = das_element(bank, l, j, &k, Side::Dual)?;
        let a = filterseq::inner_product(v, &p.seq)?; // 1×rows
        let b = filterseq::inner_product(&pd.seq, w)?; // rows×1
        for t in 0..p.seq.rows() {
            total += a[t] * b[t];
        }
        if let Some(acc) = total_exact.take() {
            let ae = filterseq::inner_product_exact(v, &p.seq);
            let be = filterseq::inner_product_exact(&pd.seq, w);
            total_exact = match (ae, be) {
                (Some(ae), Some(be)) => (0..p.seq.rows()).try_fold(acc, |s, t| {
                    ae[t]
                        .checked_mul(&be[t])
                        .and_then(|prod| s.checked_add(&prod))
                }),
                _ => None,
            };
        }
    }
    Ok((total, total_exact))
}

fn random_signal(rng: &mut SplitMix64, dim: usize, r: usize, span: i64) -> FilterSeq {
    let shape: Vec<usize> = (0..dim).map(|_| rng.next_range(2, span) as usize).collect();
    let offset: Vec<i64> = (0..dim).map(|_| rng.next_range(-2, 2)).collect();
    let n = shape.iter().product::<usize>() * r;
    let vals: Vec<ScaledRadical> = (0..n)
        .map(|_| ScaledRadical::from_integer(rng.next_range(-5, 5)))
        .collect();
    FilterSeq::from_exact(dim, 1, r, offset, shape, vals).unwrap()
}

/// Cascade-structure identity at level j:
/// Σ_k ⟨v,b_{0,j−1;k}⟩⟨b̃_{0,j−1;k},w⟩ = Σ_{l,k} ⟨v,b_{l,j;k}⟩⟨b̃_{l,j;k},w⟩
/// on random finitely supported pairs (level 0 uses the δ_k·I_r convention,
/// for which the left side is just ⟨v, w⟩).
pub fn check_cascade(bank: &FilterBank, j: usize, trials: usize) -> Result<VerificationReport> {
    if j == 0 {
        return Err(Error::InvalidArgument("cascade level must be >= 1".into()));
    }
    let mut rng = SplitMix64::new(0x6361_7363);
    let mut max_residual = 0.0f64;
    let mut witnesses = Vec::new();
    let mut all_exact = true;
    let mut exact_equal = true;
    for trial in 0..trials {
        let v = random_signal(&mut rng, bank.dim(), bank.multiplicity(), 4);
        let w = random_signal(&mut rng, bank.dim(), bank.multiplicity(), 4);
        let (lhs, lhs_exact) = if j == 1 {
            (
                filterseq::inner_product(&v, &w)?[0],
                filterseq::inner_product_exact(&v, &w).map(|e| e[0]),
            )
        } else {
            pair_sum(bank, 0, j - 1, &v, &w)?
        };
        let mut rhs = Complex64::new(0.0, 0.0);
        let mut rhs_exact = Some(ScaledRadical::ZERO);
        for l in 0..=bank.wavelet_count() {
            let (part, part_exact) = pair_sum(bank, l, j, &v, &w)?;
            rhs += part;
            rhs_exact = match (rhs_exact, part_exact) {
                (Some(a), Some(b)) => a.checked_add(&b),
                _ => None,
            };
        }
        match (lhs_exact, rhs_exact) {
            (Some(a), Some(b)) => exact_equal &= a == b,
            _ => all_exact = false,
        }
        let resid = (lhs - rhs).norm();
        if resid > max_residual {
            max_residual = resid;
        }
        if resid > 1e-10 && witnesses.len() < 4 {
            witnesses.push(Witness {
                location: format!("trial {trial}"),
                expected: format!("{lhs}"),
                got: format!("{rhs}"),
            });
        }
    }
    let verdict = if all_exact {
        if exact_equal {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else if max_residual < 1e-10 {
        Verdict::PassNumeric
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        property: format!("das-cascade(j={j})"),
        verdict,
        max_residual: if verdict == Verdict::Pass {
            0.0
        } else {
            max_residual
        },
        witnesses,
        arithmetic: if all_exact {
            Arithmetic::Exact
        } else {
            Arithmetic::Float
        },
    })
}

/// Frame expansion: v = Σ_k ⟨v,b_{0,J;k}⟩·b̃_{0,J;k} + Σ_{j,l,k} ⟨v,b_{l,j;k}⟩·b̃_{l,j;k}.
pub fn check_frame_expansion(
    bank: &FilterBank,
    levels: usize,
    trials: usize,
) -> Result<VerificationReport> {
    if levels == 0 {
        return Err(Error::InvalidArgument("level count must be >= 1".into()));
    }
    let mut rng = SplitMix64::new(0x6672_616d);
    let r = bank.multiplicity();
    let mut max_residual = 0.0f64;
    let mut witnesses = Vec::new();
    for trial in 0..trials {
        let v = random_signal(&mut rng, bank.dim(), r, 4);
        let mut recon = FilterSeq::zero(bank.dim(), 1, r);
        let mut families: Vec<(usize, usize)> = vec![(0, levels)];
        for l in 1..=bank.wavelet_count() {
            for j in 1..=levels {
                families.push((l, j));
            }
        }
        for (l, j) in families {
            for k in overlapping_shifts(bank, l, j, Side::Primal, &v)? {
                let p = das_element(bank, l, j, &k, Side::Primal)?;
                let coeff = filterseq::inner_product(&v, &p.seq)?; // 1×rows
                let pd = das_element(bank, l, j, &k, Side::Dual)?;
                for (t, c) in coeff.iter().enumerate().take(pd.seq.rows()) {
                    let row = extract_row(&pd.seq, t);
                    recon = filterseq::add(&recon, &row.scaled_complex(*c))?;
                }
            }
        }
        let resid = filterseq::max_abs_diff(&recon, &v)?;
        if resid > max_residual {
            max_residual = resid;
        }
        if resid > 1e-10 && witnesses.len() < 4 {
            witnesses.push(Witness {
                location: format!("trial {trial}"),
                expected: "input signal".into(),
                got: format!("residual {resid}"),
            });
        }
    }
    let verdict = if max_residual < 1e-11 {
        Verdict::PassNumeric
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        property: format!("das-frame-expansion(J={levels})"),
        verdict,
        max_residual,
        witnesses,
        arithmetic: Arithmetic::Float,
    })
}

fn extract_row(f: &FilterSeq, row: usize) -> FilterSeq {
    if f.is_empty() {
        return FilterSeq::zero(f.dim(), 1, f.cols());
    }
    let pts: Vec<Vec<i64>> = f.points().collect();
    let mut coeffs = Vec::with_capacity(pts.len() * f.cols());
    for k in &pts {
        for j in 0..f.cols() {
            coeffs.push(f.at(k, row, j));
        }
    }
    FilterSeq::from_complex(
        f.dim(),
        1,
        f.cols(),
        f.offset().to_vec(),
        f.shape().to_vec(),
        coeffs,
    )
    .unwrap()
    .canonicalize()
}

/// DAS biorthogonality over a shift window: primal/dual pairings must form
/// the Kronecker pattern across channels, levels, and shifts.
///
/// The dual side is not windowed: for every primal window element, all dual
/// elements whose supports can overlap it are generated from exact support
/// bounds, so enlarging the window can never turn a pass into a fail.
pub fn check_das_biorthogonality(
    bank: &FilterBank,
    levels: usize,
    window: i64,
) -> Result<VerificationReport> {
    let primal = build_system(bank, levels, window, Side::Primal)?;
    // bounding box covering all primal supports
    let d = bank.dim();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for e in &primal.elements {
        if let Some((elo, ehi)) = e.seq.bounds() {
            for ax in 0..d {
                lo[ax] = lo[ax].min(elo[ax]);
                hi[ax] = hi[ax].max(ehi[ax]);
            }
        }
    }
    let shape: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l + 1) as usize)
        .collect();
    let cover = FilterSeq::zeros(d, 1, 1, lo, shape);
    let mut dual_elements: Vec<DasElement> = Vec::new();
    let mut families: Vec<(usize, usize)> = vec![(0, levels)];
    for l in 1..=bank.wavelet_count() {
        for j in 1..=levels {
            families.push((l, j));
        }
    }
    for &(l, j) in &families {
        for k in overlapping_shifts(bank, l, j, Side::Dual, &cover)? {
            dual_elements.push(das_element(bank, l, j, &k, Side::Dual)?);
        }
    }
    let mut max_residual = 0.0f64;
    let mut witnesses = Vec::new();
    let mut exact_ok = true;
    let mut exact_equal = true;
    for p in &primal.elements {
        for q in &dual_elements {
            let want_delta = p.channel == q.channel && p.level == q.level && p.shift == q.shift;
            let ip = filterseq::inner_product(&q.seq, &p.seq)?;
            let rows = q.seq.rows();
            let cols = p.seq.rows();
            match filterseq::inner_product_exact(&q.seq, &p.seq) {
                Some(exact) => {
                    for (idx, e) in exact.iter().enumerate() {
                        let (i, j) = (idx / cols, idx % cols);
                        let target = if want_delta && i == j {
                            ScaledRadical::from_integer(1)
                        } else {
                            ScaledRadical::ZERO
                        };
                        if *e != target {
                            exact_equal = false;
                        }
                    }
                }
                None => exact_ok = false,
            }
            for i in 0..rows {
                for j in 0..cols {
                    let target = if want_delta && i == j { 1.0 } else { 0.0 };
                    let resid = (ip[i * cols + j] - target).norm();
                    if resid > max_residual {
                        max_residual = resid;
                    }
                    if resid > 1e-10 && witnesses.len() < 8 {
                        witnesses.push(Witness {
                            location: format!(
                                "⟨dual (l={},j={},k={:?}), primal (l={},j={},k={:?})⟩ entry ({i},{j})",
                                q.channel, q.level, q.shift, p.channel, p.level, p.shift
                            ),
                            expected: format!("{target}"),
                            got: format!("{}", ip[i * cols + j]),
                        });
                    }
                }
            }
        }
    }
    let arithmetic = if exact_ok {
        Arithmetic::Exact
    } else {
        Arithmetic::Float
    };
    let verdict = match arithmetic {
        Arithmetic::Exact => {
            if exact_equal {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
        Arithmetic::Float => {
            if max_residual < 1e-10 {
                Verdict::PassNumeric
            } else {
                Verdict::Fail
            }
        }
    };
    Ok(VerificationReport {
        property: format!("das-biorthogonality(J={levels})"),
        verdict,
        max_residual: if verdict == Verdict::Pass {
            0.0
        } else {
            max_residual
        },
        witnesses,
        arithmetic,
    })
}
