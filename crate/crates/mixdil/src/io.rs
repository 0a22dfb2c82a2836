//! File formats for arrays, bands, and sampled functions.
//!
//! MDF1 binary arrays: bytes 0–3 magic "MDF1", then little-endian u32 dim,
//! u32 rows, u32 cols, u64 extents\[dim\], and f64 interleaved (re, im) values
//! in row-major lexicographic order with matrix entries innermost. A CSV
//! alternative is accepted for 1-D data. Band manifests are JSON documents
//! listing the per-band files with their channel, level, and geometry, so
//! synthesis needs no bank-derived guessing.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterseq::{FilterSeq, PeriodicArray};
use crate::refine::SampledFunction;
use crate::xform::{CoefficientPyramid, PyramidBands};

pub const MDF1_MAGIC: &[u8; 4] = b"MDF1";

/// Raw array payload shared by the free and periodic pipelines.
#[derive(Debug, Clone)]
pub struct Array {
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    pub extents: Vec<u64>,
    pub data: Vec<Complex64>,
}

impl Array {
    pub fn scalar_count(&self) -> usize {
        self.extents.iter().product::<u64>() as usize * self.rows * self.cols
    }
}

pub fn write_mdf1(path: impl AsRef<Path>, a: &Array) -> Result<()> {
    if a.extents.len() != a.dim || a.data.len() != a.scalar_count() {
        return Err(Error::ShapeMismatch("array extents/data mismatch".into()));
    }
    let mut buf = Vec::with_capacity(16 + a.dim * 8 + a.data.len() * 16);
    buf.extend_from_slice(MDF1_MAGIC);
    buf.extend_from_slice(&(a.dim as u32).to_le_bytes());
    buf.extend_from_slice(&(a.rows as u32).to_le_bytes());
    buf.extend_from_slice(&(a.cols as u32).to_le_bytes());
    for e in &a.extents {
        buf.extend_from_slice(&e.to_le_bytes());
    }
    for c in &a.data {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_mdf1(path: impl AsRef<Path>) -> Result<Array> {
    let mut bytes = Vec::new();
    fs::File::open(path.as_ref())
        .map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.as_ref().display()),
            ))
        })?
        .read_to_end(&mut bytes)?;
    let fail = |msg: &str| Error::Format(format!("{}: {msg}", path.as_ref().display()));
    if bytes.len() < 16 || &bytes[0..4] != MDF1_MAGIC {
        return Err(fail("not an MDF1 array"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let dim = u32_at(4);
    let rows = u32_at(8);
    let cols = u32_at(12);
    if dim == 0 || dim > 4 {
        return Err(fail("dimension out of range"));
    }
    let mut off = 16;
    if bytes.len() < off + dim * 8 {
        return Err(fail("truncated extents"));
    }
    let mut extents = Vec::with_capacity(dim);
    for _ in 0..dim {
        extents.push(u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
        off += 8;
    }
    let count = extents.iter().product::<u64>() as usize * rows * cols;
    if bytes.len() != off + count * 16 {
        return Err(fail("payload size does not match the header"));
    }
    let mut data = Vec::with_capacity(count);
    for i in 0..count {
        let base = off + i * 16;
        let re = f64::from_le_bytes(bytes[base..base + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[base + 8..base + 16].try_into().unwrap());
        data.push(Complex64::new(re, im));
    }
    Ok(Array {
        dim,
        rows,
        cols,
        extents,
        data,
    })
}

/// 1-D CSV alternative: one row per index, `k,re,im` per matrix entry
/// (columns `k,re0,im0,re1,im1,…`); a non-numeric first line is treated as a
/// header.
pub fn write_csv_1d(path: impl AsRef<Path>, a: &Array) -> Result<()> {
    if a.dim != 1 {
        return Err(Error::InvalidArgument("CSV arrays are 1-D only".into()));
    }
    let mut out = String::new();
    out.push('k');
    for e in 0..a.rows * a.cols {
        out.push_str(&format!(",re{e},im{e}"));
    }
    out.push('\n');
    let per = a.rows * a.cols;
    for k in 0..a.extents[0] as usize {
        out.push_str(&k.to_string());
        for e in 0..per {
            let c = a.data[k * per + e];
            out.push_str(&format!(",{},{}", fmt_f64(c.re), fmt_f64(c.im)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_csv_1d(path: impl AsRef<Path>) -> Result<Array> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.as_ref().display()),
        ))
    })?;
    let fail = |msg: String| Error::Format(format!("{}: {msg}", path.as_ref().display()));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if lineno == 0 => continue, // header
            Err(e) => return Err(fail(format!("line {}: {e}", lineno + 1))),
        }
    }
    if rows.is_empty() {
        return Err(fail("no data rows".into()));
    }
    let width = rows[0].len();
    if width < 3 || width.is_multiple_of(2) {
        return Err(fail("expected columns k,re,im[,re,im…]".into()));
    }
    if rows.iter().any(|r| r.len() != width) {
        return Err(fail("ragged rows".into()));
    }
    let per = (width - 1) / 2;
    let mut data = Vec::with_capacity(rows.len() * per);
    for (i, r) in rows.iter().enumerate() {
        if r[0] != i as f64 {
            return Err(fail(format!("row {i} has index {}", r[0])));
        }
        for e in 0..per {
            data.push(Complex64::new(r[1 + 2 * e], r[2 + 2 * e]));
        }
    }
    Ok(Array {
        dim: 1,
        rows: 1,
        cols: per,
        extents: vec![rows.len() as u64],
        data,
    })
}

/// Shortest round-trip decimal formatting.
pub fn fmt_f64(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

// ---------------------------------------------------------------------------
// band manifests

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    format: String,
    bank: String,
    dim: usize,
    levels: usize,
    mode: String,
    input_offset: Vec<i64>,
    input_shape: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<Vec<i64>>,
    bands: Vec<BandDoc>,
    approx: BandDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandDoc {
    #[serde(default)]
    channel: usize,
    #[serde(default)]
    level: usize,
    file: String,
    offset: Vec<i64>,
    shape: Vec<u64>,
}

fn filter_to_array(f: &FilterSeq) -> Array {
    Array {
        dim: f.dim(),
        rows: f.rows(),
        cols: f.cols(),
        extents: f.shape().iter().map(|&s| s as u64).collect(),
        data: f.coeffs().to_vec(),
    }
}

fn periodic_to_array(p: &PeriodicArray) -> Array {
    Array {
        dim: p.dim(),
        rows: p.rows(),
        cols: p.cols(),
        extents: p.period().iter().map(|&n| n as u64).collect(),
        data: p.data().to_vec(),
    }
}

/// Write all pyramid bands plus a manifest into a directory. `input_offset`
/// and `input_shape` record the original signal's box so synthesis can embed
/// its output back onto it.
pub fn write_pyramid(
    dir: impl AsRef<Path>,
    pyr: &CoefficientPyramid,
    input_offset: &[i64],
    input_shape: &[u64],
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut bands = Vec::new();
    let (mode, period, approx_doc) = match &pyr.bands {
        PyramidBands::Free { details, approx } => {
            for (j, level) in details.iter().enumerate() {
                for (i, band) in level.iter().enumerate() {
                    let file = format!("band_l{}_j{}.mdf1", i + 1, j + 1);
                    write_mdf1(dir.join(&file), &filter_to_array(band))?;
                    bands.push(BandDoc {
                        channel: i + 1,
                        level: j + 1,
                        file,
                        offset: band.offset().to_vec(),
                        shape: band.shape().iter().map(|&s| s as u64).collect(),
                    });
                }
            }
            let file = "approx.mdf1".to_string();
            write_mdf1(dir.join(&file), &filter_to_array(approx))?;
            (
                "free",
                None,
                BandDoc {
                    channel: 0,
                    level: pyr.levels,
                    file,
                    offset: approx.offset().to_vec(),
                    shape: approx.shape().iter().map(|&s| s as u64).collect(),
                },
            )
        }
        PyramidBands::Periodic {
            details,
            approx,
            period,
        } => {
            for (j, level) in details.iter().enumerate() {
                for (i, band) in level.iter().enumerate() {
                    let file = format!("band_l{}_j{}.mdf1", i + 1, j + 1);
                    write_mdf1(dir.join(&file), &periodic_to_array(band))?;
                    bands.push(BandDoc {
                        channel: i + 1,
                        level: j + 1,
                        file,
                        offset: vec![0; band.dim()],
                        shape: band.period().iter().map(|&n| n as u64).collect(),
                    });
                }
            }
            let file = "approx.mdf1".to_string();
            write_mdf1(dir.join(&file), &periodic_to_array(approx))?;
            (
                "periodic",
                Some(period.clone()),
                BandDoc {
                    channel: 0,
                    level: pyr.levels,
                    file,
                    offset: vec![0; approx.dim()],
                    shape: approx.period().iter().map(|&n| n as u64).collect(),
                },
            )
        }
    };
    let dim = input_offset.len();
    let doc = ManifestDoc {
        format: "mixdil-manifest-v1".into(),
        bank: pyr.bank_name.clone(),
        dim,
        levels: pyr.levels,
        mode: mode.into(),
        input_offset: input_offset.to_vec(),
        input_shape: input_shape.to_vec(),
        period,
        bands,
        approx: approx_doc,
    };
    let path = dir.join("manifest.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n",
    )?;
    Ok(path)
}

/// Pyramid read back from a manifest, plus the recorded input box.
pub struct LoadedPyramid {
    pub pyramid: CoefficientPyramid,
    pub input_offset: Vec<i64>,
    pub input_shape: Vec<u64>,
}

pub fn read_pyramid(
    manifest_path: impl AsRef<Path>,
    wavelet_count: usize,
) -> Result<LoadedPyramid> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", manifest_path.display()),
        ))
    })?;
    let doc: ManifestDoc =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("manifest: {e}")))?;
    if doc.format != "mixdil-manifest-v1" {
        return Err(Error::Format(format!(
            "unsupported manifest format `{}`",
            doc.format
        )));
    }
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let load = |band: &BandDoc| -> Result<Array> {
        let a = read_mdf1(dir.join(&band.file))?;
        if a.extents != band.shape || a.dim != doc.dim {
            return Err(Error::Format(format!(
                "band {}: geometry disagrees with the manifest",
                band.file
            )));
        }
        Ok(a)
    };
    let mut details_free: Vec<Vec<FilterSeq>> = vec![Vec::new(); doc.levels];
    let mut details_periodic: Vec<Vec<PeriodicArray>> = vec![Vec::new(); doc.levels];
    let mut sorted: Vec<&BandDoc> = doc.bands.iter().collect();
    sorted.sort_by_key(|b| (b.level, b.channel));
    for band in sorted {
        if band.level == 0 || band.level > doc.levels {
            return Err(Error::Format(format!(
                "band {} has level {} outside 1..={}",
                band.file, band.level, doc.levels
            )));
        }
        let a = load(band)?;
        if doc.mode == "free" {
            let shape: Vec<usize> = a.extents.iter().map(|&e| e as usize).collect();
            details_free[band.level - 1].push(FilterSeq::from_complex(
                a.dim,
                a.rows,
                a.cols,
                band.offset.clone(),
                shape,
                a.data,
            )?);
        } else {
            let period: Vec<i64> = a.extents.iter().map(|&e| e as i64).collect();
            details_periodic[band.level - 1].push(PeriodicArray::from_data(
                a.dim, a.rows, a.cols, period, a.data,
            )?);
        }
    }
    let details_count_ok = if doc.mode == "free" {
        details_free.iter().all(|l| l.len() == wavelet_count)
    } else {
        details_periodic.iter().all(|l| l.len() == wavelet_count)
    };
    if !details_count_ok {
        return Err(Error::Format(format!(
            "manifest does not carry {wavelet_count} wavelet bands per level"
        )));
    }
    let approx = load(&doc.approx)?;
    let bands = if doc.mode == "free" {
        let shape: Vec<usize> = approx.extents.iter().map(|&e| e as usize).collect();
        PyramidBands::Free {
            details: details_free,
            approx: FilterSeq::from_complex(
                approx.dim,
                approx.rows,
                approx.cols,
                doc.approx.offset.clone(),
                shape,
                approx.data,
            )?,
        }
    } else {
        let period: Vec<i64> = approx.extents.iter().map(|&e| e as i64).collect();
        PyramidBands::Periodic {
            details: details_periodic,
            approx: PeriodicArray::from_data(
                approx.dim,
                approx.rows,
                approx.cols,
                period,
                approx.data,
            )?,
            period: doc
                .period
                .clone()
                .ok_or_else(|| Error::Format("periodic manifest without period".into()))?,
        }
    };
    Ok(LoadedPyramid {
        pyramid: CoefficientPyramid {
            bank_name: doc.bank,
            levels: doc.levels,
            bands,
        },
        input_offset: doc.input_offset,
        input_shape: doc.input_shape,
    })
}

/// Sampled-function CSV: grid coordinates, then per-component values (re and
/// im columns only when any imaginary part is nonzero).
pub fn write_samples_csv(path: impl AsRef<Path>, f: &SampledFunction) -> Result<()> {
    let complex = f.values().iter().any(|c| c.im != 0.0);
    let mut out = String::new();
    for ax in 0..f.dim() {
        if ax > 0 {
            out.push(',');
        }
        out.push_str(&format!("x{ax}"));
    }
    for c in 0..f.components() {
        out.push_str(&format!(",v{c}"));
        if complex {
            out.push_str(&format!(",v{c}_im"));
        }
    }
    out.push('\n');
    for y in f.indices() {
        let x = f.grid_point(&y);
        for (ax, xv) in x.iter().enumerate() {
            if ax > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(*xv));
        }
        for c in 0..f.components() {
            let v = f.at(&y, c);
            out.push_str(&format!(",{}", fmt_f64(v.re)));
            if complex {
                out.push_str(&format!(",{}", fmt_f64(v.im)));
            }
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Gram CSV: lag coordinates, then matrix entries (re, im interleaved).
pub fn write_gram_csv(
    path: impl AsRef<Path>,
    g: &crate::refine::GramSequence,
    dim: usize,
) -> Result<()> {
    let mut out = String::new();
    for ax in 0..dim {
        if ax > 0 {
            out.push(',');
        }
        out.push_str(&format!("k{ax}"));
    }
    for e in 0..g.rows * g.cols {
        out.push_str(&format!(",re{e},im{e}"));
    }
    out.push('\n');
    for (t, v) in g.lags.iter().zip(&g.values) {
        for (ax, tv) in t.iter().enumerate() {
            if ax > 0 {
                out.push(',');
            }
            out.push_str(&tv.to_string());
        }
        for c in v {
            out.push_str(&format!(",{},{}", fmt_f64(c.re), fmt_f64(c.im)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::builtin;
    use crate::rng::SplitMix64;
    use crate::xform;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("mixdil-io-test");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn mdf1_round_trip() {
        let mut rng = SplitMix64::new(7);
        let a = Array {
            dim: 2,
            rows: 1,
            cols: 2,
            extents: vec![3, 4],
            data: (0..24)
                .map(|_| Complex64::new(rng.next_unit(), rng.next_unit()))
                .collect(),
        };
        let p = tmp("roundtrip.mdf1");
        write_mdf1(&p, &a).unwrap();
        let b = read_mdf1(&p).unwrap();
        assert_eq!(a.extents, b.extents);
        assert_eq!((a.rows, a.cols), (b.rows, b.cols));
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn mdf1_rejects_garbage() {
        let p = tmp("garbage.bin");
        fs::write(&p, b"MDXXnope").unwrap();
        assert!(matches!(read_mdf1(&p), Err(Error::Format(_))));
        let missing = tmp("missing.mdf1");
        let _ = fs::remove_file(&missing);
        assert!(matches!(read_mdf1(&missing), Err(Error::Io(_))));
    }

    #[test]
    fn csv_round_trip() {
        let a = Array {
            dim: 1,
            rows: 1,
            cols: 1,
            extents: vec![5],
            data: (0..5)
                .map(|i| Complex64::new(i as f64 / 3.0, -(i as f64)))
                .collect(),
        };
        let p = tmp("roundtrip.csv");
        write_csv_1d(&p, &a).unwrap();
        let b = read_csv_1d(&p).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.extents, b.extents);
    }

    #[test]
    fn pyramid_manifest_round_trip_free() {
        let bank = builtin("haar").unwrap();
        let mut rng = SplitMix64::new(3);
        let coeffs: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.next_unit(), 0.0))
            .collect();
        let v = FilterSeq::from_complex(1, 1, 1, vec![0], vec![16], coeffs).unwrap();
        let pyr = xform::analyze(&bank, &v, 2).unwrap();
        let dir = tmp("pyr-free");
        let manifest = write_pyramid(&dir, &pyr, &[0], &[16]).unwrap();
        let loaded = read_pyramid(&manifest, bank.wavelet_count()).unwrap();
        assert_eq!(loaded.input_shape, vec![16]);
        let out = xform::synthesize(&bank, &loaded.pyramid).unwrap();
        let direct = xform::synthesize(&bank, &pyr).unwrap();
        assert!(crate::filterseq::max_abs_diff(&out, &direct).unwrap() < 1e-15);
    }

    #[test]
    fn pyramid_manifest_round_trip_periodic() {
        let bank = builtin("haar-split4").unwrap();
        let mut v = PeriodicArray::zeros(1, 1, 1, vec![16]).unwrap();
        for k in 0..16 {
            v.set(&[k], 0, 0, Complex64::new((k * 3 % 7) as f64, 0.0));
        }
        let pyr = xform::analyze_periodic(&bank, &v, 2).unwrap();
        let dir = tmp("pyr-periodic");
        let manifest = write_pyramid(&dir, &pyr, &[0], &[16]).unwrap();
        let loaded = read_pyramid(&manifest, bank.wavelet_count()).unwrap();
        let out = xform::synthesize_periodic(&bank, &loaded.pyramid).unwrap();
        assert!(out.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn manifest_missing_band_file() {
        let bank = builtin("haar").unwrap();
        let v = FilterSeq::delta_row(1, 1, 0, &[0]);
        let pyr = xform::analyze(&bank, &v, 1).unwrap();
        let dir = tmp("pyr-broken");
        let manifest = write_pyramid(&dir, &pyr, &[0], &[1]).unwrap();
        fs::remove_file(dir.join("band_l1_j1.mdf1")).unwrap();
        assert!(matches!(
            read_pyramid(&manifest, bank.wavelet_count()),
            Err(Error::Io(_))
        ));
    }
}
