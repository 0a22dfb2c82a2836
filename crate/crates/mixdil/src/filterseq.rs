//! Finitely supported matrix-valued sequences on Z^d.
//!
//! Coefficients are stored densely over the support box (row-major over the
//! box, matrix entries innermost) as complex doubles, with an optional
//! parallel array of exact `(p/q)·√m` scalars. The exact array is present
//! only when every entry is real and representable; operations propagate it
//! whenever the radicand algebra stays closed and silently fall back to
//! float-only mode otherwise. Float summations run in a fixed lexicographic
//! support order so results are reproducible bit for bit.

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::{DilationMatrix, IntMatrix, Rat};

/// Exact scalar of the form (num/den)·√radicand with radicand square-free.
///
/// Zero is normalized to 0/1·√1. The product of two values with equal
/// radicand is exactly rational, which is what makes paired primal/dual
/// operator compositions exactly checkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledRadical {
    num: i64,
    den: i64,
    radicand: i64,
}

/// Square-free decomposition n = s²·m; returns (s, m).
fn square_free(n: i64) -> (i64, i64) {
    debug_assert!(n > 0);
    let mut s = 1i64;
    let mut m = n;
    let mut p = 2i64;
    while p * p <= m {
        while m % (p * p) == 0 {
            m /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, m)
}

impl ScaledRadical {
    pub const ZERO: Self = Self {
        num: 0,
        den: 1,
        radicand: 1,
    };

    pub fn new(num: i64, den: i64, radicand: i64) -> Result<Self> {
        if den == 0 || radicand <= 0 {
            return Err(Error::InvalidArgument(
                "scaled radical needs den != 0, radicand > 0".into(),
            ));
        }
        if num == 0 {
            return Ok(Self::ZERO);
        }
        let (s, m) = square_free(radicand);
        let (mut num, mut den) = (num.checked_mul(s).ok_or_else(overflow)?, den);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = num.abs().gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
            radicand: m,
        })
    }

    pub fn from_rational(r: Rat) -> Self {
        Self::new(*r.numer(), *r.denom(), 1).expect("valid rational")
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(n, 1, 1).expect("valid integer")
    }

    /// √n for a positive integer n, with the square part extracted.
    pub fn sqrt_integer(n: i64) -> Result<Self> {
        Self::new(1, 1, n)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exact rational value when the radicand is trivial.
    pub fn as_rational(&self) -> Option<Rat> {
        (self.radicand == 1).then(|| Rat::new(self.num, self.den))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64 * (self.radicand as f64).sqrt()
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -self.num,
            ..*self
        }
    }

    /// Exact product; None on overflow.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if self.is_zero() || other.is_zero() {
            return Some(Self::ZERO);
        }
        let g = self.radicand.gcd(&other.radicand);
        // √m1·√m2 = g·√((m1/g)(m2/g)); the reduced product is square-free
        let rad = (self.radicand / g).checked_mul(other.radicand / g)?;
        let num = (self.num as i128) * (other.num as i128) * (g as i128);
        let den = (self.den as i128) * (other.den as i128);
        let gg = num.abs().gcd(&den);
        Some(Self {
            num: i64::try_from(num / gg).ok()?,
            den: i64::try_from(den / gg).ok()?,
            radicand: rad,
        })
    }

    /// Exact sum; None when the radicands differ (and neither side is zero)
    /// or on overflow.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(*other);
        }
        if other.is_zero() {
            return Some(*self);
        }
        if self.radicand != other.radicand {
            return None;
        }
        let num =
            (self.num as i128) * (other.den as i128) + (other.num as i128) * (self.den as i128);
        let den = (self.den as i128) * (other.den as i128);
        if num == 0 {
            return Some(Self::ZERO);
        }
        let g = num.abs().gcd(&den);
        Some(Self {
            num: i64::try_from(num / g).ok()?,
            den: i64::try_from(den / g).ok()?,
            radicand: self.radicand,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }
}

fn overflow() -> Error {
    Error::EnvelopeExceeded("exact scalar overflow".into())
}

/// Finitely supported matrix-valued sequence on Z^d.
#[derive(Debug, Clone)]
pub struct FilterSeq {
    dim: usize,
    rows: usize,
    cols: usize,
    offset: Vec<i64>,
    shape: Vec<usize>,
    coeffs: Vec<Complex64>,
    exact: Option<Vec<ScaledRadical>>,
}

fn shape_len(shape: &[usize]) -> usize {
    shape.iter().product()
}

impl FilterSeq {
    pub fn zeros(
        dim: usize,
        rows: usize,
        cols: usize,
        offset: Vec<i64>,
        shape: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(offset.len(), dim);
        debug_assert_eq!(shape.len(), dim);
        let n = shape_len(&shape) * rows * cols;
        Self {
            dim,
            rows,
            cols,
            offset,
            shape,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            exact: Some(vec![ScaledRadical::ZERO; n]),
        }
    }

    /// Canonical all-zero sequence: empty support box at offset 0.
    pub fn zero(dim: usize, rows: usize, cols: usize) -> Self {
        Self {
            dim,
            rows,
            cols,
            offset: vec![0; dim],
            shape: vec![0; dim],
            coeffs: Vec::new(),
            exact: Some(Vec::new()),
        }
    }

    /// δ_0·I_r.
    pub fn delta_identity(dim: usize, r: usize) -> Self {
        let mut s = Self::zeros(dim, r, r, vec![0; dim], vec![1; dim]);
        for i in 0..r {
            s.put_exact(&vec![0; dim], i, i, ScaledRadical::from_integer(1));
        }
        s
    }

    /// 1×r row impulse e_j^T·δ_k.
    pub fn delta_row(dim: usize, r: usize, j: usize, k: &[i64]) -> Self {
        let mut s = Self::zeros(dim, 1, r, k.to_vec(), vec![1; dim]);
        s.put_exact(k, 0, j, ScaledRadical::from_integer(1));
        s
    }

    /// Build a real sequence from exact scalars listed in lexicographic
    /// support order, matrix entries innermost.
    pub fn from_exact(
        dim: usize,
        rows: usize,
        cols: usize,
        offset: Vec<i64>,
        shape: Vec<usize>,
        values: Vec<ScaledRadical>,
    ) -> Result<Self> {
        let n = shape_len(&shape) * rows * cols;
        if values.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} values, got {}",
                values.len()
            )));
        }
        let coeffs = values
            .iter()
            .map(|e| Complex64::new(e.to_f64(), 0.0))
            .collect();
        Ok(Self {
            dim,
            rows,
            cols,
            offset,
            shape,
            coeffs,
            exact: Some(values),
        })
    }

    /// Build a float sequence (no exact data) in the same storage order.
    pub fn from_complex(
        dim: usize,
        rows: usize,
        cols: usize,
        offset: Vec<i64>,
        shape: Vec<usize>,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        let n = shape_len(&shape) * rows * cols;
        if coeffs.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} values, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            dim,
            rows,
            cols,
            offset,
            shape,
            coeffs,
            exact: None,
        })
    }

    /// Scalar (1×1) sequence over a 1-D support from rational taps.
    pub fn scalar_1d(offset: i64, taps: &[(i64, i64)]) -> Self {
        let values = taps
            .iter()
            .map(|&(n, d)| ScaledRadical::new(n, d, 1).unwrap())
            .collect();
        Self::from_exact(1, 1, 1, vec![offset], vec![taps.len()], values).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn exact(&self) -> Option<&[ScaledRadical]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn point_index(&self, k: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((kv, off), sh) in k.iter().zip(&self.offset).zip(&self.shape) {
            let rel = kv - off;
            if rel < 0 || rel as usize >= *sh {
                return None;
            }
            idx = idx * sh + rel as usize;
        }
        Some(idx)
    }

    /// Coefficient at support point k, entry (i, j); zero outside the box.
    pub fn at(&self, k: &[i64], i: usize, j: usize) -> Complex64 {
        match self.point_index(k) {
            Some(p) => self.coeffs[(p * self.rows + i) * self.cols + j],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn exact_at(&self, k: &[i64], i: usize, j: usize) -> Option<ScaledRadical> {
        let ex = self.exact.as_ref()?;
        Some(match self.point_index(k) {
            Some(p) => ex[(p * self.rows + i) * self.cols + j],
            None => ScaledRadical::ZERO,
        })
    }

    fn put(&mut self, k: &[i64], i: usize, j: usize, v: Complex64) {
        let p = self.point_index(k).expect("point inside box");
        self.coeffs[(p * self.rows + i) * self.cols + j] = v;
    }

    fn put_exact(&mut self, k: &[i64], i: usize, j: usize, v: ScaledRadical) {
        let p = self.point_index(k).expect("point inside box");
        self.coeffs[(p * self.rows + i) * self.cols + j] = Complex64::new(v.to_f64(), 0.0);
        if let Some(ex) = self.exact.as_mut() {
            ex[(p * self.rows + i) * self.cols + j] = v;
        }
    }

    fn drop_exact(&mut self) {
        self.exact = None;
    }

    /// Support points in lexicographic order.
    pub fn points(&self) -> Points {
        Points {
            offset: self.offset.clone(),
            shape: self.shape.clone(),
            cur: vec![0; self.dim],
            done: self.coeffs.is_empty(),
        }
    }

    /// Inclusive support bounds (lo, hi), or None when empty.
    pub fn bounds(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        if self.is_empty() {
            return None;
        }
        let lo = self.offset.clone();
        let hi: Vec<i64> = self
            .offset
            .iter()
            .zip(&self.shape)
            .map(|(o, s)| o + *s as i64 - 1)
            .collect();
        Some((lo, hi))
    }

    /// Normalize an all-zero sequence to the canonical empty box.
    pub fn canonicalize(mut self) -> Self {
        let all_zero = self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0);
        if all_zero && !self.coeffs.is_empty() {
            return Self::zero(self.dim, self.rows, self.cols);
        }
        if self.exact.is_none() && all_zero {
            self.exact = Some(vec![ScaledRadical::ZERO; self.coeffs.len()]);
        }
        self
    }

    /// Translate the support box.
    pub fn shifted(&self, t: &[i64]) -> Self {
        let mut out = self.clone();
        for (o, ti) in out.offset.iter_mut().zip(t) {
            *o += ti;
        }
        out
    }

    /// Multiply every entry by an exact scalar (keeps exactness when the
    /// radicand algebra closes).
    pub fn scaled_radical(&self, s: &ScaledRadical) -> Self {
        let exact = self.exact.as_ref().and_then(|ex| {
            ex.iter()
                .map(|e| e.checked_mul(s))
                .collect::<Option<Vec<_>>>()
        });
        let coeffs = match &exact {
            Some(ex) => ex.iter().map(|e| Complex64::new(e.to_f64(), 0.0)).collect(),
            None => self.coeffs.iter().map(|c| c * s.to_f64()).collect(),
        };
        Self {
            coeffs,
            exact,
            ..self.clone()
        }
        .canonicalize()
    }

    /// Multiply every entry by a float scalar (drops exactness).
    pub fn scaled_complex(&self, c: Complex64) -> Self {
        let mut out = Self {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            ..self.clone()
        };
        out.drop_exact();
        out.canonicalize()
    }

    /// Squared Frobenius norm over all entries.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Max absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Iterator over support points in lexicographic order (last axis fastest,
/// matching row-major storage).
pub struct Points {
    offset: Vec<i64>,
    shape: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl Iterator for Points {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out: Vec<i64> = self
            .cur
            .iter()
            .zip(&self.offset)
            .map(|(c, o)| *c as i64 + o)
            .collect();
        let d = self.shape.len();
        let mut ax = d;
        loop {
            if ax == 0 {
                self.done = true;
                break;
            }
            ax -= 1;
            self.cur[ax] += 1;
            if self.cur[ax] < self.shape[ax] {
                break;
            }
            self.cur[ax] = 0;
        }
        Some(out)
    }
}

fn check_same_dim(a: &FilterSeq, b: &FilterSeq) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "filter dims {} vs {}",
            a.dim, b.dim
        )));
    }
    Ok(())
}

/// Convolution (u1*u2)(n) = Σ_k u1(k)·u2(n−k); support box is the Minkowski
/// sum of the input boxes.
pub fn convolve(u1: &FilterSeq, u2: &FilterSeq) -> Result<FilterSeq> {
    check_same_dim(u1, u2)?;
    if u1.cols != u2.rows {
        return Err(Error::ShapeMismatch(format!(
            "convolve: {}x{} with {}x{}",
            u1.rows, u1.cols, u2.rows, u2.cols
        )));
    }
    if u1.is_empty() || u2.is_empty() {
        return Ok(FilterSeq::zero(u1.dim, u1.rows, u2.cols));
    }
    let offset: Vec<i64> = u1
        .offset
        .iter()
        .zip(&u2.offset)
        .map(|(a, b)| a + b)
        .collect();
    let shape: Vec<usize> = u1
        .shape
        .iter()
        .zip(&u2.shape)
        .map(|(a, b)| a + b - 1)
        .collect();
    let mut out = FilterSeq::zeros(u1.dim, u1.rows, u2.cols, offset, shape);
    let mut exact_ok = u1.is_exact() && u2.is_exact();
    let mut acc_exact = if exact_ok {
        vec![ScaledRadical::ZERO; out.coeffs.len()]
    } else {
        Vec::new()
    };
    for k1 in u1.points() {
        for k2 in u2.points() {
            let n: Vec<i64> = k1.iter().zip(&k2).map(|(a, b)| a + b).collect();
            let p = out.point_index(&n).expect("inside Minkowski box");
            for i in 0..u1.rows {
                for j in 0..u2.cols {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..u1.cols {
                        acc += u1.at(&k1, i, t) * u2.at(&k2, t, j);
                    }
                    let idx = (p * out.rows + i) * out.cols + j;
                    out.coeffs[idx] += acc;
                    if exact_ok {
                        for t in 0..u1.cols {
                            let a = u1.exact_at(&k1, i, t).unwrap();
                            let b = u2.exact_at(&k2, t, j).unwrap();
                            match a
                                .checked_mul(&b)
                                .and_then(|prod| acc_exact[idx].checked_add(&prod))
                            {
                                Some(v) => acc_exact[idx] = v,
                                None => {
                                    exact_ok = false;
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if exact_ok {
        out.coeffs = acc_exact
            .iter()
            .map(|e| Complex64::new(e.to_f64(), 0.0))
            .collect();
        out.exact = Some(acc_exact);
    } else {
        out.exact = None;
    }
    Ok(out.canonicalize())
}

/// Upsampling: (u↑M)(M·k) = u(k), zero off the image lattice.
pub fn upsample(u: &FilterSeq, m: &IntMatrix) -> FilterSeq {
    if u.is_empty() {
        return FilterSeq::zero(u.dim, u.rows, u.cols);
    }
    let d = u.dim;
    let (lo, hi) = u.bounds().expect("nonempty");
    let mut out_lo = vec![i64::MAX; d];
    let mut out_hi = vec![i64::MIN; d];
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
        let img = m.mat_vec(&pt);
        for ax in 0..d {
            out_lo[ax] = out_lo[ax].min(img[ax]);
            out_hi[ax] = out_hi[ax].max(img[ax]);
        }
    }
    let shape: Vec<usize> = out_lo
        .iter()
        .zip(&out_hi)
        .map(|(l, h)| (h - l + 1) as usize)
        .collect();
    let mut out = FilterSeq::zeros(d, u.rows, u.cols, out_lo, shape);
    let keep_exact = u.is_exact();
    if !keep_exact {
        out.drop_exact();
    }
    for k in u.points() {
        let img = m.mat_vec(&k);
        for i in 0..u.rows {
            for j in 0..u.cols {
                if keep_exact {
                    out.put_exact(&img, i, j, u.exact_at(&k, i, j).unwrap());
                } else {
                    out.put(&img, i, j, u.at(&k, i, j));
                }
            }
        }
    }
    out.canonicalize()
}

/// Downsampling: (u↓M)(k) = u(M·k).
pub fn downsample(u: &FilterSeq, m: &IntMatrix) -> Result<FilterSeq> {
    if m.det() == 0 {
        return Err(Error::SingularMatrix);
    }
    if u.is_empty() {
        return Ok(FilterSeq::zero(u.dim, u.rows, u.cols));
    }
    let d = u.dim;
    let inv = m.inverse().expect("nonsingular");
    let (lo, hi) = u.bounds().expect("nonempty");
    let mut out_lo = vec![i64::MAX; d];
    let mut out_hi = vec![i64::MIN; d];
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
            out_lo[ax] = out_lo[ax].min(img[ax].floor().to_integer());
            out_hi[ax] = out_hi[ax].max(img[ax].ceil().to_integer());
        }
    }
    let shape: Vec<usize> = out_lo
        .iter()
        .zip(&out_hi)
        .map(|(l, h)| (h - l + 1) as usize)
        .collect();
    let mut out = FilterSeq::zeros(d, u.rows, u.cols, out_lo, shape);
    let keep_exact = u.is_exact();
    if !keep_exact {
        out.drop_exact();
    }
    let pts: Vec<Vec<i64>> = out.points().collect();
    for k in pts {
        let src = m.mat_vec(&k);
        for i in 0..u.rows {
            for j in 0..u.cols {
                if keep_exact {
                    out.put_exact(&k, i, j, u.exact_at(&src, i, j).unwrap());
                } else {
                    out.put(&k, i, j, u.at(&src, i, j));
                }
            }
        }
    }
    Ok(out.canonicalize())
}

/// Adjoint filter u*(k) = conj(u(−k))^T.
pub fn star(u: &FilterSeq) -> FilterSeq {
    if u.is_empty() {
        return FilterSeq::zero(u.dim, u.cols, u.rows);
    }
    let d = u.dim;
    let (lo, hi) = u.bounds().expect("nonempty");
    let out_lo: Vec<i64> = hi.iter().map(|h| -h).collect();
    let shape: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l + 1) as usize)
        .collect();
    let mut out = FilterSeq::zeros(d, u.cols, u.rows, out_lo, shape);
    let keep_exact = u.is_exact();
    if !keep_exact {
        out.drop_exact();
    }
    for k in u.points() {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        for i in 0..u.rows {
            for j in 0..u.cols {
                if keep_exact {
                    // exact entries are real: conjugation is the identity
                    out.put_exact(&neg, j, i, u.exact_at(&k, i, j).unwrap());
                } else {
                    out.put(&neg, j, i, u.at(&k, i, j).conj());
                }
            }
        }
    }
    out.canonicalize()
}

/// Fourier symbol û(ξ) = Σ_k u(k)·e^{−ik·ξ}, summed in lexicographic order.
pub fn symbol(u: &FilterSeq, xi: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); u.rows * u.cols];
    for k in u.points() {
        let phase: f64 = k.iter().zip(xi).map(|(ki, x)| *ki as f64 * x).sum();
        let e = Complex64::new(0.0, -phase).exp();
        for i in 0..u.rows {
            for j in 0..u.cols {
                out[i * u.cols + j] += u.at(&k, i, j) * e;
            }
        }
    }
    out
}

/// Subdivision operator |det M|^{1/2}·((u↑M)*a).
pub fn subdivision(a: &FilterSeq, m: &DilationMatrix, u: &FilterSeq) -> Result<FilterSeq> {
    if u.cols != a.rows {
        return Err(Error::ShapeMismatch(format!(
            "subdivision: data {}x{} filter {}x{}",
            u.rows, u.cols, a.rows, a.cols
        )));
    }
    let conv = convolve(&upsample(u, m.mat()), a)?;
    Ok(conv.scaled_radical(&ScaledRadical::sqrt_integer(m.det_abs())?))
}

/// Transition operator |det M|^{1/2}·((u*b^⋆)↓M).
pub fn transition(b: &FilterSeq, m: &DilationMatrix, u: &FilterSeq) -> Result<FilterSeq> {
    if u.cols != b.cols {
        return Err(Error::ShapeMismatch(format!(
            "transition: data {}x{} filter {}x{}",
            u.rows, u.cols, b.rows, b.cols
        )));
    }
    let conv = convolve(u, &star(b))?;
    let down = downsample(&conv, m.mat())?;
    Ok(down.scaled_radical(&ScaledRadical::sqrt_integer(m.det_abs())?))
}

/// Entrywise sum (same matrix shape); support box is the union bounding box.
pub fn add(u: &FilterSeq, v: &FilterSeq) -> Result<FilterSeq> {
    check_same_dim(u, v)?;
    if u.rows != v.rows || u.cols != v.cols {
        return Err(Error::ShapeMismatch("add: matrix shapes differ".into()));
    }
    if u.is_empty() {
        return Ok(v.clone());
    }
    if v.is_empty() {
        return Ok(u.clone());
    }
    let (ulo, uhi) = u.bounds().unwrap();
    let (vlo, vhi) = v.bounds().unwrap();
    let lo: Vec<i64> = ulo.iter().zip(&vlo).map(|(a, b)| *a.min(b)).collect();
    let hi: Vec<i64> = uhi.iter().zip(&vhi).map(|(a, b)| *a.max(b)).collect();
    let shape: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l + 1) as usize)
        .collect();
    let mut out = FilterSeq::zeros(u.dim, u.rows, u.cols, lo, shape);
    let pts: Vec<Vec<i64>> = out.points().collect();
    let exact_in = u.is_exact() && v.is_exact();
    let mut exact_ok = exact_in;
    for k in &pts {
        for i in 0..u.rows {
            for j in 0..u.cols {
                if exact_ok {
                    let a = u.exact_at(k, i, j).unwrap();
                    let b = v.exact_at(k, i, j).unwrap();
                    if let Some(e) = a.checked_add(&b) {
                        out.put_exact(k, i, j, e);
                        continue;
                    }
                    exact_ok = false;
                }
                out.put(k, i, j, u.at(k, i, j) + v.at(k, i, j));
            }
        }
    }
    if !exact_ok {
        out.drop_exact();
        if exact_in {
            // one deterministic float pass so no entry kept an exact-path value
            for k in &pts {
                for i in 0..u.rows {
                    for j in 0..u.cols {
                        out.put(k, i, j, u.at(k, i, j) + v.at(k, i, j));
                    }
                }
            }
        }
    }
    Ok(out.canonicalize())
}

pub fn negate(u: &FilterSeq) -> FilterSeq {
    let coeffs = u.coeffs.iter().map(|c| -c).collect();
    let exact = u
        .exact
        .as_ref()
        .map(|ex| ex.iter().map(|e| e.neg()).collect());
    FilterSeq {
        coeffs,
        exact,
        ..u.clone()
    }
}

pub fn sub(u: &FilterSeq, v: &FilterSeq) -> Result<FilterSeq> {
    add(u, &negate(v))
}

/// Matrix inner product ⟨u, v⟩ = Σ_k u(k)·conj(v(k))^T, a rows(u)×rows(v)
/// complex matrix.
pub fn inner_product(u: &FilterSeq, v: &FilterSeq) -> Result<Vec<Complex64>> {
    check_same_dim(u, v)?;
    if u.cols != v.cols {
        return Err(Error::ShapeMismatch(
            "inner product: col counts differ".into(),
        ));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); u.rows * v.rows];
    let Some(window) = overlap_window(u, v) else {
        return Ok(out);
    };
    for k in window.points() {
        for i in 0..u.rows {
            for t in 0..v.rows {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..u.cols {
                    acc += u.at(&k, i, j) * v.at(&k, t, j).conj();
                }
                out[i * v.rows + t] += acc;
            }
        }
    }
    Ok(out)
}

/// Exact inner product when both operands carry exact data and the radicand
/// algebra closes; None otherwise.
pub fn inner_product_exact(u: &FilterSeq, v: &FilterSeq) -> Option<Vec<ScaledRadical>> {
    if !u.is_exact() || !v.is_exact() || u.cols != v.cols || u.dim != v.dim {
        return None;
    }
    let mut out = vec![ScaledRadical::ZERO; u.rows * v.rows];
    let Some(window) = overlap_window(u, v) else {
        return Some(out);
    };
    for k in window.points() {
        for i in 0..u.rows {
            for t in 0..v.rows {
                for j in 0..u.cols {
                    let p = u.exact_at(&k, i, j)?.checked_mul(&v.exact_at(&k, t, j)?)?;
                    out[i * v.rows + t] = out[i * v.rows + t].checked_add(&p)?;
                }
            }
        }
    }
    Some(out)
}

fn overlap_window(u: &FilterSeq, v: &FilterSeq) -> Option<FilterSeq> {
    let (ulo, uhi) = u.bounds()?;
    let (vlo, vhi) = v.bounds()?;
    let lo: Vec<i64> = ulo.iter().zip(&vlo).map(|(a, b)| *a.max(b)).collect();
    let hi: Vec<i64> = uhi.iter().zip(&vhi).map(|(a, b)| *a.min(b)).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return None;
    }
    let shape: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l + 1) as usize)
        .collect();
    Some(FilterSeq::zeros(u.dim, 1, 1, lo, shape))
}

/// Max absolute entrywise difference over the union of both supports.
pub fn max_abs_diff(u: &FilterSeq, v: &FilterSeq) -> Result<f64> {
    check_same_dim(u, v)?;
    if u.rows != v.rows || u.cols != v.cols {
        return Err(Error::ShapeMismatch("diff: matrix shapes differ".into()));
    }
    let mut worst = 0.0f64;
    for k in u.points().chain(v.points()) {
        for i in 0..u.rows {
            for j in 0..u.cols {
                worst = worst.max((u.at(&k, i, j) - v.at(&k, i, j)).norm());
            }
        }
    }
    Ok(worst)
}

/// Exact equality when both carry exact data; None when either is float-only.
pub fn exact_eq(u: &FilterSeq, v: &FilterSeq) -> Option<bool> {
    if !u.is_exact() || !v.is_exact() {
        return None;
    }
    if u.rows != v.rows || u.cols != v.cols || u.dim != v.dim {
        return Some(false);
    }
    for k in u.points().chain(v.points()) {
        for i in 0..u.rows {
            for j in 0..u.cols {
                if u.exact_at(&k, i, j).unwrap() != v.exact_at(&k, i, j).unwrap() {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

/// Periodic complex array: indices are interpreted modulo the period
/// componentwise; storage is lexicographic with matrix entries innermost.
#[derive(Debug, Clone)]
pub struct PeriodicArray {
    dim: usize,
    rows: usize,
    cols: usize,
    period: Vec<i64>,
    data: Vec<Complex64>,
}

impl PeriodicArray {
    pub fn zeros(dim: usize, rows: usize, cols: usize, period: Vec<i64>) -> Result<Self> {
        if period.len() != dim || period.iter().any(|&n| n <= 0) {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        let n: i64 = period.iter().product();
        Ok(Self {
            dim,
            rows,
            cols,
            period,
            data: vec![Complex64::new(0.0, 0.0); n as usize * rows * cols],
        })
    }

    pub fn from_data(
        dim: usize,
        rows: usize,
        cols: usize,
        period: Vec<i64>,
        data: Vec<Complex64>,
    ) -> Result<Self> {
        let mut out = Self::zeros(dim, rows, cols, period)?;
        if data.len() != out.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values, got {}",
                out.data.len(),
                data.len()
            )));
        }
        out.data = data;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn period(&self) -> &[i64] {
        &self.period
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    fn fold_index(&self, k: &[i64]) -> usize {
        let mut idx = 0usize;
        for (kv, p) in k.iter().zip(&self.period) {
            let m = kv.rem_euclid(*p);
            idx = idx * *p as usize + m as usize;
        }
        idx
    }

    pub fn at(&self, k: &[i64], i: usize, j: usize) -> Complex64 {
        let p = self.fold_index(k);
        self.data[(p * self.rows + i) * self.cols + j]
    }

    pub fn set(&mut self, k: &[i64], i: usize, j: usize, v: Complex64) {
        let p = self.fold_index(k);
        self.data[(p * self.rows + i) * self.cols + j] = v;
    }

    /// Grid points of one period block in lexicographic order.
    pub fn points(&self) -> Points {
        Points {
            offset: vec![0; self.dim],
            shape: self.period.iter().map(|&n| n as usize).collect(),
            cur: vec![0; self.dim],
            done: self.data.is_empty(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Periodic transition: output period is M^{-1}·diag(N), which must be an
/// integral diagonal matrix. Non-diagonal dilations are outside the periodic
/// envelope and report PeriodNotDivisible.
pub fn transition_periodic(
    b: &FilterSeq,
    m: &DilationMatrix,
    u: &PeriodicArray,
    level: usize,
    channel: usize,
) -> Result<PeriodicArray> {
    if u.cols != b.cols {
        return Err(Error::ShapeMismatch("periodic transition".into()));
    }
    if !m.mat().is_diagonal() {
        return Err(Error::PeriodNotDivisible { level, channel });
    }
    let diag: Vec<i64> = m.mat().diagonal().iter().map(|d| d.abs()).collect();
    let mut out_period = Vec::with_capacity(u.dim);
    for (n, d) in u.period.iter().zip(&diag) {
        if n % d != 0 {
            return Err(Error::PeriodNotDivisible { level, channel });
        }
        out_period.push(n / d);
    }
    let scale = (m.det_abs() as f64).sqrt();
    let mut out = PeriodicArray::zeros(u.dim, u.rows, b.rows, out_period)?;
    let pts: Vec<Vec<i64>> = out.points().collect();
    for n in pts {
        let mn = m.mat().mat_vec(&n);
        for i in 0..u.rows {
            for t in 0..b.rows {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in b.points() {
                    // u(Mn + k)·conj(b(k))^T
                    let src: Vec<i64> = mn.iter().zip(&k).map(|(a, b)| a + b).collect();
                    for j in 0..u.cols {
                        acc += u.at(&src, i, j) * b.at(&k, t, j).conj();
                    }
                }
                out.set(&n, i, t, acc * scale);
            }
        }
    }
    Ok(out)
}

/// Periodic subdivision: output period is M·diag(N) (diagonal M only).
pub fn subdivision_periodic(
    a: &FilterSeq,
    m: &DilationMatrix,
    w: &PeriodicArray,
    level: usize,
    channel: usize,
) -> Result<PeriodicArray> {
    if w.cols != a.rows {
        return Err(Error::ShapeMismatch("periodic subdivision".into()));
    }
    if !m.mat().is_diagonal() {
        return Err(Error::PeriodNotDivisible { level, channel });
    }
    let diag: Vec<i64> = m.mat().diagonal().iter().map(|d| d.abs()).collect();
    let out_period: Vec<i64> = w.period.iter().zip(&diag).map(|(n, d)| n * d).collect();
    let scale = (m.det_abs() as f64).sqrt();
    let mut out = PeriodicArray::zeros(w.dim, w.rows, a.cols, out_period)?;
    let mdiag = m.mat().diagonal();
    let pts: Vec<Vec<i64>> = out.points().collect();
    for n in pts {
        for i in 0..w.rows {
            for j in 0..a.cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in a.points() {
                    // needs n − t = M·k with integer k
                    let mut k = Vec::with_capacity(w.dim);
                    let mut on_lattice = true;
                    for ax in 0..w.dim {
                        let rem = n[ax] - t[ax];
                        if rem % mdiag[ax] != 0 {
                            on_lattice = false;
                            break;
                        }
                        k.push(rem / mdiag[ax]);
                    }
                    if !on_lattice {
                        continue;
                    }
                    for s in 0..w.cols {
                        acc += w.at(&k, i, s) * a.at(&t, s, j);
                    }
                }
                out.set(&n, i, j, acc * scale);
            }
        }
    }
    Ok(out)
}
