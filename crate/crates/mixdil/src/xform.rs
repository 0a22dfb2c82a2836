//! J-level discrete framelet transform: analysis by repeated transition with
//! each channel's own dilation, synthesis by dual subdivision level by level.
//!
//! Analysis uses only the primal filters, synthesis only the duals; transforms
//! with the roles exchanged go through [`FilterBank::dual_swap`]. Pyramid
//! bands are kept in decomposition order (level 1 first, channels in bank
//! order within a level).

use crate::bank::FilterBank;
use crate::error::{Error, Result};
use crate::filterseq::{self, subdivision_periodic, transition_periodic, FilterSeq, PeriodicArray};

/// Output of the J-level transform: detail bands per level and channel plus
/// the final approximation band.
#[derive(Debug, Clone)]
pub struct CoefficientPyramid {
    pub bank_name: String,
    pub levels: usize,
    pub bands: PyramidBands,
}

#[derive(Debug, Clone)]
pub enum PyramidBands {
    Free {
        /// details\[j−1\]\[l−1\] for level j = 1..=J, wavelet channel l = 1..=s.
        details: Vec<Vec<FilterSeq>>,
        approx: FilterSeq,
    },
    Periodic {
        details: Vec<Vec<PeriodicArray>>,
        approx: PeriodicArray,
        period: Vec<i64>,
    },
}

impl CoefficientPyramid {
    pub fn is_periodic(&self) -> bool {
        matches!(self.bands, PyramidBands::Periodic { .. })
    }

    /// Total stored coefficient scalars (grid points × matrix entries).
    pub fn stored_scalars(&self) -> u64 {
        match &self.bands {
            PyramidBands::Free { details, approx } => {
                let mut n = approx.coeffs().len() as u64;
                for level in details {
                    for band in level {
                        n += band.coeffs().len() as u64;
                    }
                }
                n
            }
            PyramidBands::Periodic {
                details, approx, ..
            } => {
                let mut n = approx.data().len() as u64;
                for level in details {
                    for band in level {
                        n += band.data().len() as u64;
                    }
                }
                n
            }
        }
    }
}

fn check_bank_input(bank: &FilterBank, rows: usize, cols: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::InvalidArgument("level count must be >= 1".into()));
    }
    if rows != 1 || cols != bank.multiplicity() {
        return Err(Error::ShapeMismatch(format!(
            "input must be 1x{}, got {rows}x{cols}",
            bank.multiplicity()
        )));
    }
    Ok(())
}

/// J-level analysis: v_{l,j} = T_{b_l,M_l} v_{0,j−1} for every channel, the
/// lowpass output carrying the recursion.
pub fn analyze(bank: &FilterBank, v: &FilterSeq, levels: usize) -> Result<CoefficientPyramid> {
    check_bank_input(bank, v.rows(), v.cols(), levels)?;
    if v.dim() != bank.dim() {
        return Err(Error::DimensionMismatch("analyze input".into()));
    }
    let mut approx = v.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let mut level_bands = Vec::with_capacity(bank.wavelet_count());
        for ch in &bank.channels()[1..] {
            level_bands.push(filterseq::transition(&ch.primal, &ch.dilation, &approx)?);
        }
        let low = bank.lowpass();
        approx = filterseq::transition(&low.primal, &low.dilation, &approx)?;
        details.push(level_bands);
    }
    Ok(CoefficientPyramid {
        bank_name: bank.name().to_string(),
        levels,
        bands: PyramidBands::Free { details, approx },
    })
}

/// J-level synthesis with the dual filters:
/// ṽ_{j−1} = Σ_l S_{b̃_l,M_l} ṽ_{l,j}.
pub fn synthesize(bank: &FilterBank, pyr: &CoefficientPyramid) -> Result<FilterSeq> {
    let PyramidBands::Free { details, approx } = &pyr.bands else {
        return Err(Error::InvalidArgument(
            "free-mode synthesis on a periodic pyramid".into(),
        ));
    };
    if details.len() != pyr.levels || details.iter().any(|l| l.len() != bank.wavelet_count()) {
        return Err(Error::ShapeMismatch("pyramid does not match bank".into()));
    }
    let mut acc = approx.clone();
    for level_bands in details.iter().rev() {
        let low = bank.lowpass();
        let mut out = filterseq::subdivision(&low.dual, &low.dilation, &acc)?;
        for (ch, band) in bank.channels()[1..].iter().zip(level_bands) {
            let part = filterseq::subdivision(&ch.dual, &ch.dilation, band)?;
            out = filterseq::add(&out, &part)?;
        }
        acc = out;
    }
    Ok(acc)
}

/// Per-channel divisibility of one level: M^{-1}·diag(N) must be an integral
/// diagonal matrix.
fn divide_period(period: &[i64], mat: &crate::lattice::IntMatrix) -> Option<Vec<i64>> {
    if !mat.is_diagonal() {
        return None;
    }
    let mut out = Vec::with_capacity(period.len());
    for (n, m) in period.iter().zip(mat.diagonal()) {
        let m = m.abs();
        if n % m != 0 {
            return None;
        }
        out.push(n / m);
    }
    Some(out)
}

/// Admissibility of a period for a J-level transform.
///
/// Two conditions per level j and channel l, both required:
/// the channel's own chain N/M_l^j must stay integral (each channel tracks
/// its own period lattice), and the actual recursion's input period
/// N/M_0^{j−1} must be divisible by M_l.
pub fn check_admissible(bank: &FilterBank, period: &[i64], levels: usize) -> Result<()> {
    if period.len() != bank.dim() || period.iter().any(|&n| n <= 0) {
        return Err(Error::InvalidArgument(
            "period must be a positive d-vector".into(),
        ));
    }
    let mut own: Vec<Vec<i64>> = bank.channels().iter().map(|_| period.to_vec()).collect();
    let mut approx_chain = period.to_vec();
    for j in 1..=levels {
        for (l, ch) in bank.channels().iter().enumerate() {
            own[l] =
                divide_period(&own[l], ch.dilation.mat()).ok_or(Error::PeriodNotDivisible {
                    level: j,
                    channel: l,
                })?;
            divide_period(&approx_chain, ch.dilation.mat()).ok_or(Error::PeriodNotDivisible {
                level: j,
                channel: l,
            })?;
        }
        approx_chain =
            divide_period(&approx_chain, bank.lowpass().dilation.mat()).expect("checked above");
    }
    Ok(())
}

/// Largest J for which the period stays admissible at every level.
pub fn max_levels(bank: &FilterBank, period: &[i64]) -> usize {
    let mut j = 0;
    while j < 64 && check_admissible(bank, period, j + 1).is_ok() {
        j += 1;
    }
    j
}

/// Periodic J-level analysis; the per-level periods follow the lowpass chain.
pub fn analyze_periodic(
    bank: &FilterBank,
    v: &PeriodicArray,
    levels: usize,
) -> Result<CoefficientPyramid> {
    check_bank_input(bank, v.rows(), v.cols(), levels)?;
    if v.dim() != bank.dim() {
        return Err(Error::DimensionMismatch("analyze input".into()));
    }
    check_admissible(bank, v.period(), levels)?;
    let mut approx = v.clone();
    let mut details = Vec::with_capacity(levels);
    for j in 1..=levels {
        let mut level_bands = Vec::with_capacity(bank.wavelet_count());
        for (l, ch) in bank.channels().iter().enumerate().skip(1) {
            level_bands.push(transition_periodic(
                &ch.primal,
                &ch.dilation,
                &approx,
                j,
                l,
            )?);
        }
        let low = bank.lowpass();
        approx = transition_periodic(&low.primal, &low.dilation, &approx, j, 0)?;
        details.push(level_bands);
    }
    Ok(CoefficientPyramid {
        bank_name: bank.name().to_string(),
        levels,
        bands: PyramidBands::Periodic {
            details,
            approx,
            period: v.period().to_vec(),
        },
    })
}

pub fn synthesize_periodic(bank: &FilterBank, pyr: &CoefficientPyramid) -> Result<PeriodicArray> {
    let PyramidBands::Periodic {
        details, approx, ..
    } = &pyr.bands
    else {
        return Err(Error::InvalidArgument(
            "periodic synthesis on a free pyramid".into(),
        ));
    };
    if details.len() != pyr.levels || details.iter().any(|l| l.len() != bank.wavelet_count()) {
        return Err(Error::ShapeMismatch("pyramid does not match bank".into()));
    }
    let mut acc = approx.clone();
    for (j, level_bands) in details.iter().enumerate().rev() {
        let low = bank.lowpass();
        let mut out = subdivision_periodic(&low.dual, &low.dilation, &acc, j + 1, 0)?;
        for ((l, ch), band) in bank.channels().iter().enumerate().skip(1).zip(
            // enumerate().skip(1) walks channels 1..; zip the band list
            level_bands.iter(),
        ) {
            let part = subdivision_periodic(&ch.dual, &ch.dilation, band, j + 1, l)?;
            if part.period() != out.period() {
                return Err(Error::PeriodNotDivisible {
                    level: j + 1,
                    channel: l,
                });
            }
            for (o, p) in out.data_mut().iter_mut().zip(part.data()) {
                *o += p;
            }
        }
        acc = out;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::builtin;
    use crate::filterseq::{exact_eq, max_abs_diff, ScaledRadical};
    use crate::rng::SplitMix64;
    use num_complex::Complex64;

    fn rand_input_1d(rng: &mut SplitMix64, len: usize) -> FilterSeq {
        let coeffs = (0..len)
            .map(|_| Complex64::new(rng.next_unit(), 0.0))
            .collect();
        FilterSeq::from_complex(1, 1, 1, vec![0], vec![len], coeffs).unwrap()
    }

    fn rand_exact_input_1d(rng: &mut SplitMix64, len: usize) -> FilterSeq {
        let vals = (0..len)
            .map(|_| ScaledRadical::from_integer(rng.next_range(-8, 8)))
            .collect();
        FilterSeq::from_exact(1, 1, 1, vec![0], vec![len], vals).unwrap()
    }

    #[test]
    fn haar_impulse_level1() {
        let bank = builtin("haar").unwrap();
        let v = FilterSeq::delta_row(1, 1, 0, &[0]);
        let pyr = analyze(&bank, &v, 1).unwrap();
        let PyramidBands::Free { details, approx } = &pyr.bands else {
            panic!()
        };
        let half_sqrt2 = ScaledRadical::new(1, 2, 2).unwrap();
        let expect = FilterSeq::from_exact(1, 1, 1, vec![0], vec![1], vec![half_sqrt2]).unwrap();
        assert_eq!(exact_eq(&details[0][0], &expect), Some(true));
        assert_eq!(exact_eq(approx, &expect), Some(true));
    }

    #[test]
    fn zero_input_gives_zero_pyramid() {
        let bank = builtin("haar").unwrap();
        let v = FilterSeq::zero(1, 1, 1);
        let pyr = analyze(&bank, &v, 3).unwrap();
        let PyramidBands::Free { details, approx } = &pyr.bands else {
            panic!()
        };
        assert!(approx.is_empty());
        assert!(details.iter().all(|l| l.iter().all(|b| b.is_empty())));
        let out = synthesize(&bank, &pyr).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn haar_exact_round_trip() {
        let bank = builtin("haar").unwrap();
        let mut rng = SplitMix64::new(1);
        for _ in 0..5 {
            let v = rand_exact_input_1d(&mut rng, 9);
            let pyr = analyze(&bank, &v, 3).unwrap();
            let out = synthesize(&bank, &pyr).unwrap();
            assert!(out.is_exact(), "haar pipeline stays exact");
            assert_eq!(exact_eq(&out, &v), Some(true));
        }
    }

    #[test]
    fn haar_parseval() {
        let bank = builtin("haar").unwrap();
        let mut rng = SplitMix64::new(2);
        for _ in 0..5 {
            let v = rand_input_1d(&mut rng, 17);
            let pyr = analyze(&bank, &v, 3).unwrap();
            let PyramidBands::Free { details, approx } = &pyr.bands else {
                panic!()
            };
            let mut total = approx.norm_sq();
            for level in details {
                for band in level {
                    total += band.norm_sq();
                }
            }
            assert!((total - v.norm_sq()).abs() < 1e-12);
        }
    }

    #[test]
    fn bspline_reconstruction() {
        let bank = builtin("bspline-tf").unwrap();
        let mut rng = SplitMix64::new(3);
        let v = rand_input_1d(&mut rng, 33);
        let pyr = analyze(&bank, &v, 4).unwrap();
        let out = synthesize(&bank, &pyr).unwrap();
        assert!(max_abs_diff(&out, &v).unwrap() < 1e-12);
    }

    /// The J-level analysis equals J applications of the 1-level analysis to
    /// the running approximation band.
    #[test]
    fn recursive_factorization() {
        let bank = builtin("haar-split4").unwrap();
        let mut rng = SplitMix64::new(4);
        let v = rand_input_1d(&mut rng, 21);
        let levels = 2;
        let pyr = analyze(&bank, &v, levels).unwrap();
        let mut approx = v;
        for j in 0..levels {
            let step = analyze(&bank, &approx, 1).unwrap();
            let PyramidBands::Free { details, approx: a } = step.bands else {
                panic!()
            };
            let PyramidBands::Free { details: full, .. } = &pyr.bands else {
                panic!()
            };
            for (band, expect) in details[0].iter().zip(&full[j]) {
                assert!(max_abs_diff(band, expect).unwrap() < 1e-13);
            }
            approx = a;
        }
        let PyramidBands::Free { approx: a_full, .. } = &pyr.bands else {
            panic!()
        };
        assert!(max_abs_diff(&approx, a_full).unwrap() < 1e-13);
    }

    #[test]
    fn periodic_haar_counts() {
        let bank = builtin("haar").unwrap();
        let mut v = PeriodicArray::zeros(1, 1, 1, vec![8]).unwrap();
        for k in 0..8 {
            v.set(&[k], 0, 0, Complex64::new((k * k) as f64, 0.0));
        }
        let pyr = analyze_periodic(&bank, &v, 3).unwrap();
        let PyramidBands::Periodic {
            details, approx, ..
        } = &pyr.bands
        else {
            panic!()
        };
        assert_eq!(details[0][0].period(), &[4]);
        assert_eq!(details[1][0].period(), &[2]);
        assert_eq!(details[2][0].period(), &[1]);
        assert_eq!(approx.period(), &[1]);
        let out = synthesize_periodic(&bank, &pyr).unwrap();
        assert!(out.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn periodic_split4_counts_match_critical_sampling() {
        let bank = builtin("haar-split4").unwrap();
        let mut v = PeriodicArray::zeros(1, 1, 1, vec![16]).unwrap();
        for k in 0..16 {
            v.set(&[k], 0, 0, Complex64::new((k + 1) as f64, 0.0));
        }
        let pyr = analyze_periodic(&bank, &v, 2).unwrap();
        let PyramidBands::Periodic {
            details, approx, ..
        } = &pyr.bands
        else {
            panic!()
        };
        assert_eq!(details[0][0].period(), &[4]);
        assert_eq!(details[0][1].period(), &[4]);
        assert_eq!(details[1][0].period(), &[2]);
        assert_eq!(details[1][1].period(), &[2]);
        assert_eq!(approx.period(), &[4]);
        assert_eq!(pyr.stored_scalars(), 16);
        let out = synthesize_periodic(&bank, &pyr).unwrap();
        assert!(out.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn period_not_divisible() {
        let bank = builtin("haar-split4").unwrap();
        let v = PeriodicArray::zeros(1, 1, 1, vec![6]).unwrap();
        assert!(matches!(
            analyze_periodic(&bank, &v, 1),
            Err(Error::PeriodNotDivisible { .. })
        ));
    }

    #[test]
    fn max_levels_examples() {
        let haar = builtin("haar").unwrap();
        assert_eq!(max_levels(&haar, &[8]), 3);
        assert_eq!(max_levels(&haar, &[7]), 0);
        let split4 = builtin("haar-split4").unwrap();
        assert_eq!(max_levels(&split4, &[16]), 2);
        let haar2d = builtin("haar2d").unwrap();
        assert_eq!(max_levels(&haar2d, &[32, 32]), 5);
        assert_eq!(max_levels(&haar2d, &[32, 8]), 3);
    }

    /// For input supported well inside a large period box, the periodic and
    /// free pyramids agree on corresponding indices.
    #[test]
    fn periodic_free_agreement() {
        let bank = builtin("haar").unwrap();
        let mut rng = SplitMix64::new(8);
        let n = 64i64;
        let len = 8usize;
        let start = 24i64;
        let coeffs: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.next_unit(), 0.0))
            .collect();
        let free_v =
            FilterSeq::from_complex(1, 1, 1, vec![start], vec![len], coeffs.clone()).unwrap();
        let mut per_v = PeriodicArray::zeros(1, 1, 1, vec![n]).unwrap();
        for (i, c) in coeffs.iter().enumerate() {
            per_v.set(&[start + i as i64], 0, 0, *c);
        }
        let fp = analyze(&bank, &free_v, 3).unwrap();
        let pp = analyze_periodic(&bank, &per_v, 3).unwrap();
        let (
            PyramidBands::Free {
                details: fd,
                approx: fa,
            },
            PyramidBands::Periodic {
                details: pd,
                approx: pa,
                ..
            },
        ) = (&fp.bands, &pp.bands)
        else {
            panic!()
        };
        for (flevel, plevel) in fd.iter().zip(pd) {
            for (fband, pband) in flevel.iter().zip(plevel) {
                for k in fband.points() {
                    assert!((fband.at(&k, 0, 0) - pband.at(&k, 0, 0)).norm() < 1e-13);
                }
            }
        }
        for k in fa.points() {
            assert!((fa.at(&k, 0, 0) - pa.at(&k, 0, 0)).norm() < 1e-13);
        }
    }

    /// Matrix-valued transform: exact free round trip and periodic round
    /// trip for a multiplicity-2 bank.
    #[test]
    fn multiplicity_two_round_trips() {
        let bank = crate::bank::test_bank_parallel_haar();
        let mut rng = SplitMix64::new(31);
        let vals: Vec<ScaledRadical> = (0..20)
            .map(|_| ScaledRadical::from_integer(rng.next_range(-6, 6)))
            .collect();
        let v = FilterSeq::from_exact(1, 1, 2, vec![-3], vec![10], vals).unwrap();
        let pyr = analyze(&bank, &v, 2).unwrap();
        let PyramidBands::Free { details, approx } = &pyr.bands else {
            panic!()
        };
        assert_eq!(approx.cols(), 2);
        assert!(details.iter().all(|l| l.iter().all(|b| b.cols() == 1)));
        let out = synthesize(&bank, &pyr).unwrap();
        assert_eq!(exact_eq(&out, &v), Some(true));

        let mut p = PeriodicArray::zeros(1, 1, 2, vec![8]).unwrap();
        for k in 0..8 {
            for c in 0..2 {
                p.set(&[k], 0, c, Complex64::new(rng.next_unit(), 0.0));
            }
        }
        let pyr = analyze_periodic(&bank, &p, 3).unwrap();
        assert_eq!(pyr.stored_scalars(), 16);
        let out = synthesize_periodic(&bank, &pyr).unwrap();
        assert!(out.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let bank = builtin("haar").unwrap();
        let v = FilterSeq::delta_row(1, 1, 0, &[0]);
        assert!(matches!(
            analyze(&bank, &v, 0),
            Err(Error::InvalidArgument(_))
        ));
        let wide = FilterSeq::delta_identity(1, 2);
        assert!(matches!(
            analyze(&bank, &wide, 1),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
