//! Command implementations behind the `mixdil` binary.
//!
//! Exit codes: 0 every requested check passed, 1 a property failed, 2 usage
//! error, 3 file/format error, 4 envelope exceeded. Every command is
//! deterministic for identical inputs and flags.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;

use crate::bank::{self, FilterBank};
use crate::das;
use crate::error::{Error, Result};
use crate::filterseq::{FilterSeq, PeriodicArray};
use crate::io::{self, Array};
use crate::lattice::Lattice;
use crate::refine;
use crate::stability;
use crate::verify;
use crate::xform;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Format(_) | Error::InvariantViolation(_) => 3,
        Error::EnvelopeExceeded(_) => 4,
        Error::PeriodNotDivisible { .. }
        | Error::InvalidArgument(_)
        | Error::UnknownName(_)
        | Error::ShapeMismatch(_)
        | Error::DimensionMismatch(_)
        | Error::NotSublattice
        | Error::SingularMatrix
        | Error::NotExpansive(_) => 2,
        Error::MaskDiagnosticFailed(_) | Error::Diverged(_) => 1,
    }
}

/// A bank argument is either a builtin name or a descriptor path.
pub fn resolve_bank(spec: &str) -> Result<FilterBank> {
    if Path::new(spec).exists() {
        return bank::load(spec);
    }
    match bank::builtin(spec) {
        Ok(b) => Ok(b),
        Err(Error::UnknownName(_)) if looks_like_path(spec) => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{spec}: no such file"),
        ))),
        Err(e) => Err(e),
    }
}

fn looks_like_path(spec: &str) -> bool {
    spec.contains('/') || spec.contains('.')
}

fn fmt_rat(r: crate::lattice::Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn report_json(rep: &verify::VerificationReport) -> serde_json::Value {
    json!({
        "property": rep.property,
        "verdict": rep.verdict_str(),
        "max_residual": rep.max_residual,
        "arithmetic": rep.arithmetic_str(),
        "witnesses": rep.witnesses.iter().map(|w| json!({
            "location": w.location,
            "expected": w.expected,
            "got": w.got,
        })).collect::<Vec<_>>(),
    })
}

fn print_report(rep: &verify::VerificationReport) {
    println!(
        "{:<24} {:<14} residual={:<12e} arithmetic={}",
        rep.property,
        rep.verdict_str(),
        rep.max_residual,
        rep.arithmetic_str()
    );
    for w in &rep.witnesses {
        println!(
            "    at {}: expected {}, got {}",
            w.location, w.expected, w.got
        );
    }
}

pub struct VerifyOpts {
    pub bank: String,
    pub fourier: bool,
    pub tol: f64,
    pub bi: bool,
    pub critical: bool,
    pub grid: usize,
    pub json: bool,
}

pub fn cmd_verify(opts: &VerifyOpts) -> Result<i32> {
    let bank = resolve_bank(&opts.bank)?;
    let mut reports = vec![verify::check_pr_time(&bank)?];
    if opts.fourier {
        reports.push(verify::check_pr_fourier(&bank, opts.grid, opts.tol)?);
    }
    if opts.bi {
        reports.push(verify::check_biorthogonal(&bank)?);
    }
    let mut all_pass = reports.iter().all(|r| r.passed());
    let critical = opts.critical.then(|| verify::critical_sampling(&bank));
    if let Some((ratio, equal)) = &critical {
        all_pass &= *equal;
        if !opts.json {
            println!(
                "{:<24} {:<14} ratio={} target={}",
                "critical-sampling",
                if *equal { "pass" } else { "fail" },
                fmt_rat(*ratio),
                bank.multiplicity()
            );
        }
    }
    if opts.json {
        let mut checks: Vec<serde_json::Value> = reports.iter().map(report_json).collect();
        if let Some((ratio, equal)) = &critical {
            checks.push(json!({
                "property": "critical-sampling",
                "verdict": if *equal { "pass" } else { "fail" },
                "ratio": fmt_rat(*ratio),
            }));
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "bank": bank.name(),
                "checks": checks,
            }))
            .expect("json serializes")
        );
    } else {
        for rep in &reports {
            print_report(rep);
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

pub struct TransformOpts {
    pub analyze: bool,
    pub bank: String,
    pub input: PathBuf,
    pub output: PathBuf,
    pub levels: usize,
    pub periodic: Option<Vec<i64>>,
    pub csv: bool,
}

fn array_to_filter(a: &Array) -> Result<FilterSeq> {
    let shape: Vec<usize> = a.extents.iter().map(|&e| e as usize).collect();
    FilterSeq::from_complex(a.dim, a.rows, a.cols, vec![0; a.dim], shape, a.data.clone())
}

pub fn cmd_transform(opts: &TransformOpts) -> Result<i32> {
    let bank = resolve_bank(&opts.bank)?;
    if opts.analyze {
        let arr = if opts.csv {
            io::read_csv_1d(&opts.input)?
        } else {
            io::read_mdf1(&opts.input)?
        };
        if arr.dim != bank.dim() || arr.rows != 1 || arr.cols != bank.multiplicity() {
            return Err(Error::ShapeMismatch(format!(
                "input is {}-D {}x{}, bank needs {}-D 1x{}",
                arr.dim,
                arr.rows,
                arr.cols,
                bank.dim(),
                bank.multiplicity()
            )));
        }
        let pyr = match &opts.periodic {
            Some(period) => {
                let extents: Vec<i64> = arr.extents.iter().map(|&e| e as i64).collect();
                if *period != extents {
                    return Err(Error::InvalidArgument(format!(
                        "periodic extents {period:?} do not match the array extents {extents:?}"
                    )));
                }
                let v = PeriodicArray::from_data(
                    arr.dim,
                    arr.rows,
                    arr.cols,
                    period.clone(),
                    arr.data.clone(),
                )?;
                xform::analyze_periodic(&bank, &v, opts.levels)?
            }
            None => {
                let v = array_to_filter(&arr)?;
                xform::analyze(&bank, &v, opts.levels)?
            }
        };
        let manifest = io::write_pyramid(&opts.output, &pyr, &vec![0; arr.dim], &arr.extents)?;
        println!("wrote {}", manifest.display());
        Ok(0)
    } else {
        let loaded = io::read_pyramid(&opts.input, bank.wavelet_count())?;
        let dim = bank.dim();
        let extents = loaded.input_shape.clone();
        let data = match &loaded.pyramid.bands {
            xform::PyramidBands::Free { .. } => {
                let out = xform::synthesize(&bank, &loaded.pyramid)?;
                // embed onto the recorded input box
                let shape: Vec<usize> = extents.iter().map(|&e| e as usize).collect();
                let mut data =
                    Vec::with_capacity(shape.iter().product::<usize>() * bank.multiplicity());
                let template = FilterSeq::zeros(dim, 1, 1, loaded.input_offset.clone(), shape);
                for k in template.points() {
                    for c in 0..bank.multiplicity() {
                        data.push(out.at(&k, 0, c));
                    }
                }
                data
            }
            xform::PyramidBands::Periodic { .. } => {
                let out = xform::synthesize_periodic(&bank, &loaded.pyramid)?;
                out.data().to_vec()
            }
        };
        let arr = Array {
            dim,
            rows: 1,
            cols: bank.multiplicity(),
            extents,
            data,
        };
        if opts.csv {
            io::write_csv_1d(&opts.output, &arr)?;
        } else {
            io::write_mdf1(&opts.output, &arr)?;
        }
        println!("wrote {}", opts.output.display());
        Ok(0)
    }
}

pub struct DasOpts {
    pub bank: String,
    pub channel: usize,
    pub level: usize,
    pub shift: Option<Vec<i64>>,
    pub dual: bool,
    pub output: PathBuf,
}

pub fn cmd_das(opts: &DasOpts) -> Result<i32> {
    let bank = resolve_bank(&opts.bank)?;
    if opts.channel > bank.wavelet_count() {
        return Err(Error::InvalidArgument(format!(
            "channel {} out of range (bank has {} wavelet channels)",
            opts.channel,
            bank.wavelet_count()
        )));
    }
    let side = if opts.dual {
        das::Side::Dual
    } else {
        das::Side::Primal
    };
    let seq = match &opts.shift {
        Some(k) => {
            if k.len() != bank.dim() {
                return Err(Error::InvalidArgument("shift has wrong dimension".into()));
            }
            das::das_element(&bank, opts.channel, opts.level, k, side)?.seq
        }
        None => das::das_filter(&bank, opts.channel, opts.level, side)?,
    };
    write_filter_csv(&opts.output, &seq)?;
    println!("wrote {}", opts.output.display());
    Ok(0)
}

fn write_filter_csv(path: &Path, f: &FilterSeq) -> Result<()> {
    let mut out = String::new();
    for ax in 0..f.dim() {
        if ax > 0 {
            out.push(',');
        }
        out.push_str(&format!("k{ax}"));
    }
    for e in 0..f.rows() * f.cols() {
        out.push_str(&format!(",re{e},im{e}"));
    }
    out.push('\n');
    for k in f.points() {
        for (ax, kv) in k.iter().enumerate() {
            if ax > 0 {
                out.push(',');
            }
            out.push_str(&kv.to_string());
        }
        for i in 0..f.rows() {
            for j in 0..f.cols() {
                let c = f.at(&k, i, j);
                out.push_str(&format!(",{},{}", io::fmt_f64(c.re), io::fmt_f64(c.im)));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub struct StabilityOpts {
    pub bank: String,
    pub levels: usize,
    pub period: Vec<i64>,
    pub json: bool,
}

pub fn cmd_stability(opts: &StabilityOpts) -> Result<i32> {
    let bank = resolve_bank(&opts.bank)?;
    if opts.levels == 0 {
        return Err(Error::InvalidArgument("levels must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for levels in 1..=opts.levels {
        rows.push(stability::frame_bounds(
            &bank,
            levels,
            &opts.period,
            500,
            1e-9,
        )?);
    }
    if opts.json {
        let doc = json!({
            "bank": bank.name(),
            "period": opts.period,
            "rows": rows.iter().map(|r| json!({
                "levels": r.levels,
                "c1": r.c1_est,
                "c2": r.c2_est,
                "norm_w": r.norm_w,
                "norm_v": r.norm_v,
                "norm_w_dual": r.norm_w_dual,
                "norm_v_dual": r.norm_v_dual,
                "iterations": r.iterations,
                "converged": r.converged,
            })).collect::<Vec<_>>(),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("json serializes")
        );
    } else {
        println!(
            "{:>3} {:>18} {:>18} {:>6} {:>9}",
            "J", "c1", "c2", "iters", "converged"
        );
        for r in &rows {
            println!(
                "{:>3} {:>18} {:>18} {:>6} {:>9}",
                r.levels,
                io::fmt_f64(r.c1_est),
                io::fmt_f64(r.c2_est),
                r.iterations,
                r.converged
            );
        }
    }
    Ok(if rows.iter().all(|r| r.converged) {
        0
    } else {
        1
    })
}

pub struct RefineOpts {
    pub bank: String,
    pub iters: usize,
    pub gram_lag: i64,
    pub bounds_grid: usize,
    pub output: String,
}

pub fn cmd_refine(opts: &RefineOpts) -> Result<i32> {
    if opts.iters == 0 {
        return Err(Error::InvalidArgument("iters must be >= 1".into()));
    }
    let bank = resolve_bank(&opts.bank)?;
    let out = refine::cascade(&bank, opts.iters)?;
    println!(
        "cascade: level {} grid, {} iterations, delta_l2={:e}, delta_sup={:e}",
        opts.iters, out.iterations, out.delta_l2, out.delta_sup
    );
    let psi_path = format!("{}_psi0.csv", opts.output);
    io::write_samples_csv(&psi_path, &out.samples)?;
    println!("wrote {psi_path}");
    let gens = refine::derive_generators(&bank, &out.samples)?;
    for (i, g) in gens.iter().enumerate() {
        let path = format!("{}_psi{}.csv", opts.output, i + 1);
        io::write_samples_csv(&path, g)?;
        println!("wrote {path}");
    }
    let gram = refine::gram_shifts(
        &out.samples,
        &out.samples,
        &Lattice::standard(bank.dim()),
        opts.gram_lag,
    )?;
    let gram_path = format!("{}_gram.csv", opts.output);
    io::write_gram_csv(&gram_path, &gram, bank.dim())?;
    println!("wrote {gram_path}");
    let (lo, hi) = refine::riesz_bounds(&gram, opts.bounds_grid, bank.dim())?;
    println!("riesz bounds: ({}, {})", io::fmt_f64(lo), io::fmt_f64(hi));
    Ok(0)
}

pub struct RedundancyOpts {
    pub bank: String,
    pub levels: usize,
    pub period: Option<Vec<i64>>,
}

pub fn cmd_redundancy(opts: &RedundancyOpts) -> Result<i32> {
    let bank = resolve_bank(&opts.bank)?;
    if opts.levels == 0 {
        return Err(Error::InvalidArgument("levels must be >= 1".into()));
    }
    let rep = verify::redundancy_rate(&bank, opts.levels, opts.period.as_deref())?;
    match rep.counted {
        Some((stored, input)) => println!("{} (counted: {stored}/{input})", fmt_rat(rep.closed)),
        None => println!("{}", fmt_rat(rep.closed)),
    }
    Ok(0)
}

/// Deterministic random input array used by examples (and handy for quick
/// CLI experiments through `transform`).
pub fn random_input(dim: usize, r: usize, extents: &[u64], seed: u64) -> Array {
    let mut rng = crate::rng::SplitMix64::new(seed);
    let count = extents.iter().product::<u64>() as usize * r;
    Array {
        dim,
        rows: 1,
        cols: r,
        extents: extents.to_vec(),
        data: (0..count)
            .map(|_| Complex64::new(rng.next_unit(), 0.0))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bank_resolution() {
        assert!(resolve_bank("haar").is_ok());
        assert!(matches!(
            resolve_bank("not-a-bank"),
            Err(Error::UnknownName(_))
        ));
        assert!(matches!(
            resolve_bank("missing/path.bank"),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_for(&Error::Format("x".into())), 3);
        assert_eq!(
            exit_code_for(&Error::PeriodNotDivisible {
                level: 1,
                channel: 2
            }),
            2
        );
        assert_eq!(exit_code_for(&Error::EnvelopeExceeded("x".into())), 4);
        assert_eq!(exit_code_for(&Error::Diverged("x".into())), 1);
    }
}
