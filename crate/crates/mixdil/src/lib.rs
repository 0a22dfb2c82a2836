//! Framelet and wavelet filter banks with mixed dilation factors.
//!
//! A filter bank here pairs one matrix-valued lowpass channel with any number
//! of scalar wavelet channels, where every channel may downsample by its own
//! integer dilation matrix. The crate provides:
//!
//! - exact integer-lattice algebra (Hermite normal form, coset enumeration,
//!   sublattice intersection) backing the sampling arguments ([`lattice`]),
//! - finitely supported matrix-valued filter sequences with an exact
//!   `(p/q)·√m` coefficient mode ([`filterseq`]),
//! - the filter-bank data model, its JSON descriptor and built-in reference
//!   banks ([`bank`]),
//! - multi-level analysis/synthesis transforms on free and periodic data
//!   ([`xform`]),
//! - perfect-reconstruction, biorthogonality, critical-sampling and
//!   redundancy checks with exact verdicts where the coefficients allow
//!   ([`verify`]),
//! - discrete affine systems and their identities ([`das`]),
//! - frame-bound estimation by matrix-free power iteration ([`stability`]),
//! - cascade rendering of refinable functions, Gram/bracket products and
//!   Riesz bound estimates ([`refine`]),
//! - array/CSV/manifest file formats ([`io`]) and the CLI command layer
//!   ([`cli`]).
//!
//! Everything is deterministic: fixed summation orders, fixed seeds.
//!
//! # Quick start
//!
//! ```
//! use num_complex::Complex64;
//! use mixdil::{builtin, filterseq, verify, xform, FilterSeq};
//!
//! // a critically sampled bank whose wavelets downsample by 4
//! let bank = builtin("haar-split4")?;
//! assert!(verify::check_pr_time(&bank)?.passed());
//! assert_eq!(verify::critical_sampling(&bank).1, true);
//!
//! // two-level transform and reconstruction of a short signal
//! let data: Vec<Complex64> = (0..32).map(|k| Complex64::new((k as f64).sin(), 0.0)).collect();
//! let v = FilterSeq::from_complex(1, 1, 1, vec![0], vec![32], data)?;
//! let pyramid = xform::analyze(&bank, &v, 2)?;
//! let back = xform::synthesize(&bank, &pyramid)?;
//! assert!(filterseq::max_abs_diff(&back, &v)? < 1e-12);
//! # Ok::<(), mixdil::Error>(())
//! ```

pub mod bank;
pub mod cli;
pub mod das;
pub mod error;
pub mod filterseq;
pub mod io;
pub mod lattice;
pub mod refine;
pub mod rng;
pub mod stability;
pub mod verify;
pub mod xform;

pub use bank::{builtin, Channel, ChannelRole, FilterBank};
pub use error::{Error, Result};
pub use filterseq::{FilterSeq, PeriodicArray, ScaledRadical};
pub use lattice::{coset_reps, hnf, CosetSet, DilationMatrix, IntMatrix, Lattice, Rat};
pub use verify::{Arithmetic, Verdict, VerificationReport};
pub use xform::CoefficientPyramid;
