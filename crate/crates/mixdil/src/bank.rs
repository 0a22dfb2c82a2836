//! Filter-bank data model, validation, JSON descriptor I/O, and built-in
//! reference banks.
//!
//! A bank has one matrix-valued lowpass channel (index 0, filters r×r) and
//! s ≥ 0 scalar wavelet channels (filters 1×r), each with its own dilation
//! matrix. Primal filters drive analysis, dual filters drive synthesis; when
//! the descriptor omits a dual it defaults to the primal (the self-dual /
//! tight convention).

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterseq::{FilterSeq, ScaledRadical};
use crate::lattice::{DilationMatrix, IntMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelRole {
    Lowpass,
    Wavelet,
}

#[derive(Debug, Clone)]
pub struct Channel {
    pub dilation: DilationMatrix,
    pub primal: FilterSeq,
    pub dual: FilterSeq,
    pub role: ChannelRole,
}

#[derive(Debug, Clone)]
pub struct FilterBank {
    dim: usize,
    multiplicity: usize,
    name: String,
    channels: Vec<Channel>,
}

impl FilterBank {
    pub fn new(
        dim: usize,
        multiplicity: usize,
        name: impl Into<String>,
        channels: Vec<Channel>,
    ) -> Result<Self> {
        let bank = Self {
            dim,
            multiplicity,
            name: name.into(),
            channels,
        };
        bank.validate()?;
        Ok(bank)
    }

    fn validate(&self) -> Result<()> {
        let r = self.multiplicity;
        if self.channels.is_empty() {
            return Err(Error::InvariantViolation("bank has no channels".into()));
        }
        if self.channels[0].role != ChannelRole::Lowpass {
            return Err(Error::InvariantViolation(
                "channel 0 must be the lowpass channel".into(),
            ));
        }
        for (l, ch) in self.channels.iter().enumerate() {
            if l > 0 && ch.role != ChannelRole::Wavelet {
                return Err(Error::InvariantViolation(format!(
                    "channel {l}: only channel 0 may be lowpass"
                )));
            }
            if ch.dilation.dim() != self.dim {
                return Err(Error::InvariantViolation(format!(
                    "channel {l}: dilation dimension {} != bank dimension {}",
                    ch.dilation.dim(),
                    self.dim
                )));
            }
            let want_rows = if l == 0 { r } else { 1 };
            for (tag, f) in [("primal", &ch.primal), ("dual", &ch.dual)] {
                if f.dim() != self.dim {
                    return Err(Error::InvariantViolation(format!(
                        "channel {l}: {tag} filter dimension {} != bank dimension {}",
                        f.dim(),
                        self.dim
                    )));
                }
                if f.rows() != want_rows || f.cols() != r {
                    return Err(Error::InvariantViolation(format!(
                        "channel {l}: {tag} filter is {}x{}, expected {want_rows}x{r}",
                        f.rows(),
                        f.cols()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Multiplicity r: component count of the data rows / lowpass size.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn lowpass(&self) -> &Channel {
        &self.channels[0]
    }

    /// Wavelet channel count s.
    pub fn wavelet_count(&self) -> usize {
        self.channels.len() - 1
    }

    /// Bank with primal and dual exchanged in every channel.
    pub fn dual_swap(&self) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|c| Channel {
                dilation: c.dilation.clone(),
                primal: c.dual.clone(),
                dual: c.primal.clone(),
                role: c.role,
            })
            .collect();
        Self {
            dim: self.dim,
            multiplicity: self.multiplicity,
            name: format!("{}~swap", self.name),
            channels,
        }
    }

    /// True when every filter carries exact coefficient data.
    pub fn is_exact(&self) -> bool {
        self.channels
            .iter()
            .all(|c| c.primal.is_exact() && c.dual.is_exact())
    }
}

// ---------------------------------------------------------------------------
// built-in banks

fn sr(num: i64, den: i64, radicand: i64) -> ScaledRadical {
    ScaledRadical::new(num, den, radicand).expect("valid literal")
}

fn scalar_filter_1d(offset: i64, taps: Vec<ScaledRadical>) -> FilterSeq {
    let len = taps.len();
    FilterSeq::from_exact(1, 1, 1, vec![offset], vec![len], taps).expect("literal filter")
}

fn haar() -> FilterBank {
    let m = DilationMatrix::scalar(1, 2).unwrap();
    let b0 = scalar_filter_1d(0, vec![sr(1, 2, 1), sr(1, 2, 1)]);
    let b1 = scalar_filter_1d(0, vec![sr(1, 2, 1), sr(-1, 2, 1)]);
    FilterBank::new(
        1,
        1,
        "haar",
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
    .expect("haar is valid")
}

fn bspline_tf() -> FilterBank {
    let m = DilationMatrix::scalar(1, 2).unwrap();
    let b0 = scalar_filter_1d(0, vec![sr(1, 4, 1), sr(1, 2, 1), sr(1, 4, 1)]);
    let b1 = scalar_filter_1d(0, vec![sr(-1, 4, 1), sr(1, 2, 1), sr(-1, 4, 1)]);
    let b2 = scalar_filter_1d(0, vec![sr(1, 4, 2), sr(0, 1, 1), sr(-1, 4, 2)]);
    let ch = |f: FilterSeq, role| Channel {
        dilation: m.clone(),
        primal: f.clone(),
        dual: f,
        role,
    };
    FilterBank::new(
        1,
        1,
        "bspline-tf",
        vec![
            ch(b0, ChannelRole::Lowpass),
            ch(b1, ChannelRole::Wavelet),
            ch(b2, ChannelRole::Wavelet),
        ],
    )
    .expect("bspline-tf is valid")
}

fn haar_split4() -> FilterBank {
    let m0 = DilationMatrix::scalar(1, 2).unwrap();
    let m4 = DilationMatrix::scalar(1, 4).unwrap();
    let b0 = scalar_filter_1d(0, vec![sr(1, 2, 1), sr(1, 2, 1)]);
    // 1/(2√2) = √2/4
    let b1 = scalar_filter_1d(0, vec![sr(1, 4, 2), sr(-1, 4, 2)]);
    let b2 = scalar_filter_1d(2, vec![sr(1, 4, 2), sr(-1, 4, 2)]);
    FilterBank::new(
        1,
        1,
        "haar-split4",
        vec![
            Channel {
                dilation: m0,
                primal: b0.clone(),
                dual: b0,
                role: ChannelRole::Lowpass,
            },
            Channel {
                dilation: m4.clone(),
                primal: b1.clone(),
                dual: b1,
                role: ChannelRole::Wavelet,
            },
            Channel {
                dilation: m4,
                primal: b2.clone(),
                dual: b2,
                role: ChannelRole::Wavelet,
            },
        ],
    )
    .expect("haar-split4 is valid")
}

fn haar2d() -> FilterBank {
    let m = DilationMatrix::new(IntMatrix::scalar(2, 2)).unwrap();
    // tensor products of h = (1/2, 1/2) and g = (1/2, −1/2) on {0,1}²
    let tensor = |fx: [i64; 2], fy: [i64; 2]| {
        let mut vals = Vec::with_capacity(4);
        for a in fx {
            for b in fy {
                vals.push(sr(a * b, 4, 1));
            }
        }
        FilterSeq::from_exact(2, 1, 1, vec![0, 0], vec![2, 2], vals).expect("tensor filter")
    };
    let h = [1, 1];
    let g = [1, -1];
    let b0 = tensor(h, h);
    let b1 = tensor(h, g);
    let b2 = tensor(g, h);
    let b3 = tensor(g, g);
    let ch = |f: FilterSeq, role| Channel {
        dilation: m.clone(),
        primal: f.clone(),
        dual: f,
        role,
    };
    FilterBank::new(
        2,
        1,
        "haar2d",
        vec![
            ch(b0, ChannelRole::Lowpass),
            ch(b1, ChannelRole::Wavelet),
            ch(b2, ChannelRole::Wavelet),
            ch(b3, ChannelRole::Wavelet),
        ],
    )
    .expect("haar2d is valid")
}

pub const BUILTIN_NAMES: &[&str] = &["haar", "bspline-tf", "haar-split4", "haar2d"];

/// Non-diagonal fixture: the Haar-type pair on the quincunx lattice.
/// Both channels sample by [[1,1],[1,-1]]; taps sit at (0,0) and (1,0).
/// Orthonormal, hence a perfect-reconstruction biorthogonal pair.
#[cfg(test)]
pub(crate) fn test_bank_quincunx_haar() -> FilterBank {
    let m = DilationMatrix::new(IntMatrix::from_rows(&[&[1, 1], &[1, -1]]).expect("2x2"))
        .expect("quincunx is expansive");
    let taps = |hi: i64| {
        FilterSeq::from_exact(
            2,
            1,
            1,
            vec![0, 0],
            vec![2, 1],
            vec![sr(1, 2, 1), sr(hi, 2, 1)],
        )
        .expect("two taps")
    };
    let b0 = taps(1);
    let b1 = taps(-1);
    FilterBank::new(
        2,
        1,
        "quincunx-haar",
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
    .expect("quincunx haar is valid")
}

/// Multiplicity-2 fixture for matrix-valued code paths: two Haar banks in
/// direct sum. Lowpass diag(h, h) with two wavelet rows (g, 0) and (0, g);
/// orthonormal, so critically sampled at r = 2.
#[cfg(test)]
pub(crate) fn test_bank_parallel_haar() -> FilterBank {
    let m = DilationMatrix::scalar(1, 2).unwrap();
    let h = sr(1, 2, 1);
    let g = sr(-1, 2, 1);
    let z = ScaledRadical::ZERO;
    let lowpass =
        FilterSeq::from_exact(1, 2, 2, vec![0], vec![2], vec![h, z, z, h, h, z, z, h]).unwrap();
    let w1 = FilterSeq::from_exact(1, 1, 2, vec![0], vec![2], vec![h, z, g, z]).unwrap();
    let w2 = FilterSeq::from_exact(1, 1, 2, vec![0], vec![2], vec![z, h, z, g]).unwrap();
    let ch = |f: FilterSeq, role| Channel {
        dilation: m.clone(),
        primal: f.clone(),
        dual: f,
        role,
    };
    FilterBank::new(
        1,
        2,
        "parallel-haar",
        vec![
            ch(lowpass, ChannelRole::Lowpass),
            ch(w1, ChannelRole::Wavelet),
            ch(w2, ChannelRole::Wavelet),
        ],
    )
    .expect("parallel haar is valid")
}

/// Built-in reference banks.
pub fn builtin(name: &str) -> Result<FilterBank> {
    match name {
        "haar" => Ok(haar()),
        "bspline-tf" => Ok(bspline_tf()),
        "haar-split4" => Ok(haar_split4()),
        "haar2d" => Ok(haar2d()),
        other => Err(Error::UnknownName(other.into())),
    }
}

// ---------------------------------------------------------------------------
// descriptor format (mixdil-bank-v1)

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BankDoc {
    format: String,
    dim: usize,
    multiplicity: usize,
    name: String,
    channels: Vec<ChannelDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    role: String,
    dilation: Vec<Vec<i64>>,
    primal: FilterDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual: Option<FilterDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterDoc {
    offset: Vec<i64>,
    shape: Vec<usize>,
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExactDoc {
    num: Vec<i64>,
    den: Vec<i64>,
    radicand: Vec<i64>,
}

fn filter_to_doc(f: &FilterSeq) -> FilterDoc {
    let re: Vec<f64> = f.coeffs().iter().map(|c| c.re).collect();
    let has_im = f.coeffs().iter().any(|c| c.im != 0.0);
    let im = has_im.then(|| f.coeffs().iter().map(|c| c.im).collect());
    let exact = f.exact().map(|ex| ExactDoc {
        num: ex.iter().map(|e| e.num()).collect(),
        den: ex.iter().map(|e| e.den()).collect(),
        radicand: ex.iter().map(|e| e.radicand()).collect(),
    });
    FilterDoc {
        offset: f.offset().to_vec(),
        shape: f.shape().to_vec(),
        rows: f.rows(),
        cols: f.cols(),
        re,
        im,
        exact,
    }
}

fn filter_from_doc(doc: &FilterDoc, dim: usize, what: &str) -> Result<FilterSeq> {
    if doc.offset.len() != dim || doc.shape.len() != dim {
        return Err(Error::Format(format!(
            "{what}: offset/shape length must equal dim {dim}"
        )));
    }
    let n: usize = doc.shape.iter().product::<usize>() * doc.rows * doc.cols;
    if doc.re.len() != n {
        return Err(Error::Format(format!(
            "{what}: expected {n} re values, got {}",
            doc.re.len()
        )));
    }
    if let Some(ex) = &doc.exact {
        if ex.num.len() != n || ex.den.len() != n || ex.radicand.len() != n {
            return Err(Error::Format(format!(
                "{what}: exact arrays must have {n} entries"
            )));
        }
        if doc.im.iter().any(|im| im.iter().any(|v| *v != 0.0)) {
            return Err(Error::Format(format!(
                "{what}: exact coefficients must be real"
            )));
        }
        let values: Vec<ScaledRadical> = ex
            .num
            .iter()
            .zip(&ex.den)
            .zip(&ex.radicand)
            .map(|((&num, &den), &rad)| {
                ScaledRadical::new(num, den, rad)
                    .map_err(|_| Error::Format(format!("{what}: bad exact entry")))
            })
            .collect::<Result<_>>()?;
        // the exact field is authoritative; floats are rebuilt from it
        for (i, (v, r)) in values.iter().zip(&doc.re).enumerate() {
            if (v.to_f64() - r).abs() > 1e-9 * r.abs().max(1.0) {
                return Err(Error::Format(format!(
                    "{what}: re[{i}] = {r} disagrees with its exact value {}",
                    v.to_f64()
                )));
            }
        }
        return FilterSeq::from_exact(
            dim,
            doc.rows,
            doc.cols,
            doc.offset.clone(),
            doc.shape.clone(),
            values,
        );
    }
    if let Some(im) = &doc.im {
        if im.len() != n {
            return Err(Error::Format(format!(
                "{what}: expected {n} im values, got {}",
                im.len()
            )));
        }
    }
    let coeffs: Vec<Complex64> = doc
        .re
        .iter()
        .enumerate()
        .map(|(i, &re)| Complex64::new(re, doc.im.as_ref().map_or(0.0, |im| im[i])))
        .collect();
    FilterSeq::from_complex(
        dim,
        doc.rows,
        doc.cols,
        doc.offset.clone(),
        doc.shape.clone(),
        coeffs,
    )
}

/// Parse a bank descriptor from JSON text.
pub fn from_json(text: &str) -> Result<FilterBank> {
    let doc: BankDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("bank descriptor: {e}")))?;
    if doc.format != "mixdil-bank-v1" {
        return Err(Error::Format(format!(
            "unsupported format `{}` (expected mixdil-bank-v1)",
            doc.format
        )));
    }
    let mut channels = Vec::with_capacity(doc.channels.len());
    for (l, ch) in doc.channels.iter().enumerate() {
        let role = match ch.role.as_str() {
            "lowpass" => ChannelRole::Lowpass,
            "wavelet" => ChannelRole::Wavelet,
            other => {
                return Err(Error::Format(format!(
                    "channel {l}: unknown role `{other}`"
                )))
            }
        };
        if ch.dilation.len() != doc.dim || ch.dilation.iter().any(|r| r.len() != doc.dim) {
            return Err(Error::Format(format!(
                "channel {l}: dilation must be {0}x{0}",
                doc.dim
            )));
        }
        let entries: Vec<i64> = ch.dilation.iter().flatten().copied().collect();
        let dilation = DilationMatrix::new(IntMatrix::new(doc.dim, entries)?)?;
        let primal = filter_from_doc(&ch.primal, doc.dim, &format!("channel {l} primal"))?;
        let dual = match &ch.dual {
            Some(d) => filter_from_doc(d, doc.dim, &format!("channel {l} dual"))?,
            None => primal.clone(),
        };
        channels.push(Channel {
            dilation,
            primal,
            dual,
            role,
        });
    }
    FilterBank::new(doc.dim, doc.multiplicity, doc.name, channels)
}

/// Serialize a bank to descriptor JSON (pretty-printed, shortest round-trip
/// float formatting).
pub fn to_json(bank: &FilterBank) -> String {
    let doc = BankDoc {
        format: "mixdil-bank-v1".into(),
        dim: bank.dim,
        multiplicity: bank.multiplicity,
        name: bank.name.clone(),
        channels: bank
            .channels
            .iter()
            .map(|ch| ChannelDoc {
                role: match ch.role {
                    ChannelRole::Lowpass => "lowpass".into(),
                    ChannelRole::Wavelet => "wavelet".into(),
                },
                dilation: (0..bank.dim)
                    .map(|i| (0..bank.dim).map(|j| ch.dilation.mat().get(i, j)).collect())
                    .collect(),
                primal: filter_to_doc(&ch.primal),
                dual: Some(filter_to_doc(&ch.dual)),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("descriptor serializes")
}

pub fn load(path: impl AsRef<Path>) -> Result<FilterBank> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.as_ref().display()),
        ))
    })?;
    from_json(&text)
}

pub fn save(bank: &FilterBank, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(bank) + "\n")?;
    Ok(())
}
