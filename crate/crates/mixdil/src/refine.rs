//! Function-side numerics: cascade rendering of refinable (vector) functions,
//! derived generators, Gram/bracket-product computation, Riesz/Bessel bound
//! estimation, and the function-level biorthogonality check.
//!
//! Normalization: the refinement equation is taken in its Fourier form
//! φ̂(M^Tξ) = b̂(ξ)·φ̂(ξ) with b̂(0) = 1, so the time-domain iteration weight
//! is |det M₀| on the mask taps, and the derived generators use
//! ψ^l(x) = |det M₀|·Σ_k b_l(k)·ψ⁰(M₀x − k).
//!
//! Rendering runs the cascade on a fixed grid M₀^{-n}Z^d: the iterates'
//! sample values there are exact samples of the true cascade iterates, and
//! the iteration is run to numerical convergence (with a divergence guard),
//! so grid-point accuracy is limited by the fixed point's attraction, not by
//! the grid level.

use num_complex::Complex64;

use crate::bank::FilterBank;
use crate::error::{Error, Result};
use crate::filterseq::FilterSeq;
use crate::lattice::{rat_mat_vec, DilationMatrix, Lattice, Rat};
use crate::verify::{self, Arithmetic, Verdict, VerificationReport, Witness};

/// Samples of a (vector) function on the grid M₀^{-n}Z^d restricted to an
/// integer index box.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    dim: usize,
    components: usize,
    level: usize,
    box_lo: Vec<i64>,
    box_hi: Vec<i64>,
    values: Vec<Complex64>,
    dilation_base: DilationMatrix,
}

impl SampledFunction {
    pub fn zeros(
        dim: usize,
        components: usize,
        level: usize,
        box_lo: Vec<i64>,
        box_hi: Vec<i64>,
        dilation_base: DilationMatrix,
    ) -> Self {
        let n: usize = box_lo
            .iter()
            .zip(&box_hi)
            .map(|(l, h)| (h - l + 1).max(0) as usize)
            .product();
        Self {
            dim,
            components,
            level,
            box_lo,
            box_hi,
            values: vec![Complex64::new(0.0, 0.0); n * components],
            dilation_base,
        }
    }

    /// Sample a closed-form function on the grid.
    pub fn from_fn(
        dim: usize,
        components: usize,
        level: usize,
        box_lo: Vec<i64>,
        box_hi: Vec<i64>,
        dilation_base: DilationMatrix,
        f: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Self {
        let mut out = Self::zeros(dim, components, level, box_lo, box_hi, dilation_base);
        let indices: Vec<Vec<i64>> = out.indices().collect();
        for y in indices {
            let x = out.grid_point(&y);
            let v = f(&x);
            for (c, val) in v.iter().enumerate() {
                out.set(&y, c, Complex64::new(*val, 0.0));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Grid level n: samples live on M₀^{-n}Z^d.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn box_lo(&self) -> &[i64] {
        &self.box_lo
    }

    pub fn box_hi(&self) -> &[i64] {
        &self.box_hi
    }

    pub fn dilation_base(&self) -> &DilationMatrix {
        &self.dilation_base
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn index_of(&self, y: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((yv, lo), hi) in y.iter().zip(&self.box_lo).zip(&self.box_hi) {
            if yv < lo || yv > hi {
                return None;
            }
            let extent = (hi - lo + 1) as usize;
            idx = idx * extent + (yv - lo) as usize;
        }
        Some(idx)
    }

    /// Value at grid index y (zero outside the box).
    pub fn at(&self, y: &[i64], component: usize) -> Complex64 {
        match self.index_of(y) {
            Some(i) => self.values[i * self.components + component],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, y: &[i64], component: usize, v: Complex64) {
        let i = self.index_of(y).expect("index inside box");
        self.values[i * self.components + component] = v;
    }

    /// Grid indices in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let shape: Vec<usize> = self
            .box_lo
            .iter()
            .zip(&self.box_hi)
            .map(|(l, h)| (h - l + 1).max(0) as usize)
            .collect();
        let seq = FilterSeq::zeros(self.dim, 1, 1, self.box_lo.clone(), shape);
        seq.points()
    }

    /// Physical coordinates of grid index y: M₀^{-n}·y.
    pub fn grid_point(&self, y: &[i64]) -> Vec<f64> {
        let d = self.dim;
        let mn = self.dilation_base.mat().pow(self.level as u32);
        let inv = mn.inverse().expect("dilation power is nonsingular");
        rat_mat_vec(d, &inv, y)
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Cell volume of the grid, |det M₀|^{-n}.
    pub fn cell_volume(&self) -> f64 {
        (self.dilation_base.det_abs() as f64).powi(-(self.level as i32))
    }
}

/// Cascade output: the rendered samples plus convergence diagnostics.
#[derive(Debug, Clone)]
pub struct CascadeOutput {
    pub samples: SampledFunction,
    pub iterations: usize,
    /// L2 norm of the last successive-iterate difference.
    pub delta_l2: f64,
    /// Sup norm of the last successive-iterate difference.
    pub delta_sup: f64,
}

/// Diagnostic on the mask's symbol at the origin.
#[derive(Debug, Clone)]
pub struct MaskDiagnostic {
    pub eigenvalues: Vec<Complex64>,
    pub pass: bool,
    pub note: String,
}

/// Eigenvalues of b̂₀(0); the practical cascade precondition is a simple
/// eigenvalue 1 (within 1e−9) with every other eigenvalue strictly inside
/// the unit circle.
pub fn mask_spectrum(b0: &FilterSeq) -> MaskDiagnostic {
    let r = b0.rows();
    let mut at_zero = vec![Complex64::new(0.0, 0.0); r * r];
    for k in b0.points() {
        for i in 0..r {
            for j in 0..b0.cols() {
                at_zero[i * r + j] += b0.at(&k, i, j);
            }
        }
    }
    let eigenvalues = eigenvalues_complex(r, &at_zero);
    let mut best: Option<usize> = None;
    for (i, ev) in eigenvalues.iter().enumerate() {
        if (ev - Complex64::new(1.0, 0.0)).norm() <= 1e-9
            && best.is_none_or(|b| {
                (ev - Complex64::new(1.0, 0.0)).norm()
                    < (eigenvalues[b] - Complex64::new(1.0, 0.0)).norm()
            })
        {
            best = Some(i);
        }
    }
    let (pass, note) = match best {
        None => (
            false,
            format!("no eigenvalue of the mask symbol at 0 equals 1 (got {eigenvalues:?})"),
        ),
        Some(i) => {
            let bad: Vec<&Complex64> = eigenvalues
                .iter()
                .enumerate()
                .filter(|(j, ev)| *j != i && ev.norm() >= 1.0)
                .map(|(_, ev)| ev)
                .collect();
            if bad.is_empty() {
                (
                    true,
                    "simple eigenvalue 1, remainder inside the unit circle".into(),
                )
            } else {
                (
                    false,
                    format!("eigenvalues {bad:?} of the mask symbol at 0 are not inside the unit circle"),
                )
            }
        }
    };
    MaskDiagnostic {
        eigenvalues,
        pass,
        note,
    }
}

/// Characteristic polynomial by the Faddeev–LeVerrier recursion, roots by
/// Durand–Kerner. Adequate for the r ≤ 4 envelope.
fn eigenvalues_complex(n: usize, a: &[Complex64]) -> Vec<Complex64> {
    if n == 1 {
        return vec![a[0]];
    }
    let zero = Complex64::new(0.0, 0.0);
    let mul = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![zero; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero;
                for k in 0..n {
                    acc += x[i * n + k] * y[k * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        out
    };
    let trace = |x: &[Complex64]| -> Complex64 { (0..n).map(|i| x[i * n + i]).sum() };
    // p(λ) = λ^n + c[1]·λ^{n−1} + … + c[n]
    let mut coeff = vec![zero; n + 1];
    coeff[0] = Complex64::new(1.0, 0.0);
    let mut mk = a.to_vec();
    coeff[1] = -trace(&mk);
    for k in 2..=n {
        let mut shifted = mk.clone();
        for i in 0..n {
            shifted[i * n + i] += coeff[k - 1];
        }
        mk = mul(a, &shifted);
        coeff[k] = -trace(&mk) / k as f64;
    }
    durand_kerner(&coeff)
}

/// Roots of a monic complex polynomial given by its coefficients
/// [1, c1, …, cn].
fn durand_kerner(coeff: &[Complex64]) -> Vec<Complex64> {
    let n = coeff.len() - 1;
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeff {
            acc = acc * x + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

fn float_bounds(f: &FilterSeq) -> Option<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = f.bounds()?;
    Some((
        lo.iter().map(|&x| x as f64).collect(),
        hi.iter().map(|&x| x as f64).collect(),
    ))
}

/// Image of the box [lo, hi] under the exact inverse of m, bounded by corner
/// images.
fn inv_box(m: &DilationMatrix, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = m.dim();
    let inv = m.mat().inverse().expect("nonsingular");
    let invf: Vec<f64> = inv
        .iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .collect();
    let mut out_lo = vec![f64::INFINITY; d];
    let mut out_hi = vec![f64::NEG_INFINITY; d];
    for corner in 0..(1usize << d) {
        let pt: Vec<f64> = (0..d)
            .map(|ax| {
                if corner >> ax & 1 == 1 {
                    hi[ax]
                } else {
                    lo[ax]
                }
            })
            .collect();
        for i in 0..d {
            let v: f64 = (0..d).map(|j| invf[i * d + j] * pt[j]).sum();
            out_lo[i] = out_lo[i].min(v);
            out_hi[i] = out_hi[i].max(v);
        }
    }
    (out_lo, out_hi)
}

/// Working box covering the initial indicator, all cascade iterates'
/// supports, and the limit support estimate Σ_{j≥1} M^{-j}·hull(supp b).
fn working_box(mask: &FilterSeq, m: &DilationMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = m.dim();
    let (slo, shi) = float_bounds(mask)
        .ok_or_else(|| Error::InvalidArgument("cascade mask must be nonzero".into()))?;
    // support recursion B_{t} = M^{-1}(B_{t−1} ⊕ S) from the unit cube
    let mut lo = vec![0.0; d];
    let mut hi = vec![1.0; d];
    let mut acc_lo = lo.clone();
    let mut acc_hi = hi.clone();
    for _ in 0..80 {
        let sum_lo: Vec<f64> = lo.iter().zip(&slo).map(|(a, b)| a + b).collect();
        let sum_hi: Vec<f64> = hi.iter().zip(&shi).map(|(a, b)| a + b).collect();
        let (nlo, nhi) = inv_box(m, &sum_lo, &sum_hi);
        for ax in 0..d {
            acc_lo[ax] = acc_lo[ax].min(nlo[ax]);
            acc_hi[ax] = acc_hi[ax].max(nhi[ax]);
        }
        lo = nlo;
        hi = nhi;
    }
    Ok((acc_lo, acc_hi))
}

/// Cascade iteration for an r×r mask on the fixed grid M^{-n}Z^d, starting
/// from the unit-cube indicator (first component for r > 1), run to numerical
/// convergence of the iterates' samples.
pub fn cascade_mask(mask: &FilterSeq, m: &DilationMatrix, level: usize) -> Result<CascadeOutput> {
    if level == 0 {
        return Err(Error::InvalidArgument("grid level must be >= 1".into()));
    }
    if mask.rows() != mask.cols() {
        return Err(Error::ShapeMismatch("cascade mask must be square".into()));
    }
    let diag = mask_spectrum(mask);
    if !diag.pass {
        return Err(Error::MaskDiagnosticFailed(diag.note));
    }
    let d = m.dim();
    let r = mask.rows();
    let (wlo, whi) = working_box(mask, m)?;
    // grid index bounds: y with M^{-n}y in the working box
    let mn = m.mat().pow(level as u32);
    let mut ilo = vec![i64::MAX; d];
    let mut ihi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let pt: Vec<f64> = (0..d)
            .map(|ax| {
                if corner >> ax & 1 == 1 {
                    whi[ax]
                } else {
                    wlo[ax]
                }
            })
            .collect();
        for i in 0..d {
            let v: f64 = (0..d).map(|j| mn.get(i, j) as f64 * pt[j]).sum();
            ilo[i] = ilo[i].min(v.floor() as i64 - 1);
            ihi[i] = ihi[i].max(v.ceil() as i64 + 1);
        }
    }
    let cells: i64 = ilo.iter().zip(&ihi).map(|(l, h)| h - l + 1).product();
    if cells.saturating_mul(r as i64) > 50_000_000 {
        return Err(Error::EnvelopeExceeded(format!(
            "cascade grid of {cells} cells"
        )));
    }
    let mut f = SampledFunction::zeros(d, r, level, ilo.clone(), ihi.clone(), m.clone());
    // initial iterate: exact membership of M^{-n}y in [0,1)^d
    let inv_mn = mn.inverse().expect("nonsingular");
    let one = Rat::from_integer(1);
    let zero = Rat::from_integer(0);
    let init_indices: Vec<Vec<i64>> = f.indices().collect();
    for y in &init_indices {
        let p = rat_mat_vec(d, &inv_mn, y);
        if p.iter().all(|c| *c >= zero && *c < one) {
            f.set(y, 0, Complex64::new(1.0, 0.0));
        }
    }
    // precompute M^n·k for mask taps
    let taps: Vec<(Vec<i64>, Vec<Complex64>)> = mask
        .points()
        .map(|k| {
            let img = mn.mat_vec(&k);
            let entries: Vec<Complex64> = (0..r)
                .flat_map(|i| (0..r).map(move |j| (i, j)))
                .map(|(i, j)| mask.at(&k, i, j))
                .collect();
            (img, entries)
        })
        .collect();
    let det = m.det_abs() as f64;
    let cell = f.cell_volume();
    let max_iter = 400;
    let mut last_delta = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut delta_l2 = f64::INFINITY;
    let mut delta_sup = f64::INFINITY;
    for it in 1..=max_iter {
        let mut next = SampledFunction::zeros(d, r, level, ilo.clone(), ihi.clone(), m.clone());
        for y in &init_indices {
            let my = m.mat().mat_vec(y);
            for (img, entries) in &taps {
                let src: Vec<i64> = my.iter().zip(img).map(|(a, b)| a - b).collect();
                for i in 0..r {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..r {
                        acc += entries[i * r + j] * f.at(&src, j);
                    }
                    if acc.re != 0.0 || acc.im != 0.0 {
                        let cur = next.at(y, i);
                        next.set(y, i, cur + det * acc);
                    }
                }
            }
        }
        delta_sup = next
            .values
            .iter()
            .zip(&f.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        delta_l2 = (next
            .values
            .iter()
            .zip(&f.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * cell)
            .sqrt();
        f = next;
        let scale = f.max_abs().max(1e-30);
        if delta_sup == 0.0 || delta_sup < 1e-13 * scale {
            return Ok(CascadeOutput {
                samples: f,
                iterations: it,
                delta_l2,
                delta_sup,
            });
        }
        if delta_sup > last_delta {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(Error::Diverged(format!(
                    "successive-iterate difference grew for 3 iterations (last {delta_sup:.3e})"
                )));
            }
        } else {
            growth_streak = 0;
        }
        last_delta = delta_sup;
    }
    Ok(CascadeOutput {
        samples: f,
        iterations: max_iter,
        delta_l2,
        delta_sup,
    })
}

/// Render the bank's primal refinable function ψ⁰ at grid level n.
pub fn cascade(bank: &FilterBank, level: usize) -> Result<CascadeOutput> {
    cascade_mask(&bank.lowpass().primal, &bank.lowpass().dilation, level)
}

/// Generators ψ^l(x) = |det M₀|·Σ_k b_l(k)·ψ⁰(M₀x − k) on the same grid.
pub fn derive_generators(
    bank: &FilterBank,
    psi0: &SampledFunction,
) -> Result<Vec<SampledFunction>> {
    let d = bank.dim();
    let m0 = &bank.lowpass().dilation;
    if psi0.dim() != d || psi0.components() != bank.multiplicity() {
        return Err(Error::ShapeMismatch("psi0 does not match the bank".into()));
    }
    let level = psi0.level();
    let mn = m0.mat().pow(level as u32);
    let det = m0.det_abs() as f64;
    let mut out = Vec::with_capacity(bank.wavelet_count());
    for ch in &bank.channels()[1..] {
        let b = &ch.primal;
        // y-range: M₀y − Mⁿk ∈ box(ψ⁰) for some tap k
        let (Some((blo, bhi)),) = (b.bounds(),) else {
            out.push(SampledFunction::zeros(
                d,
                1,
                level,
                vec![0; d],
                vec![-1; d],
                m0.clone(),
            ));
            continue;
        };
        let mut tlo = vec![f64::INFINITY; d];
        let mut thi = vec![f64::NEG_INFINITY; d];
        for corner in 0..(1usize << d) {
            let kpt: Vec<i64> = (0..d)
                .map(|ax| {
                    if corner >> ax & 1 == 1 {
                        bhi[ax]
                    } else {
                        blo[ax]
                    }
                })
                .collect();
            let img = mn.mat_vec(&kpt);
            for inner in 0..(1usize << d) {
                let ppt: Vec<f64> = (0..d)
                    .map(|ax| {
                        let base = if inner >> ax & 1 == 1 {
                            psi0.box_hi()[ax]
                        } else {
                            psi0.box_lo()[ax]
                        };
                        (base + img[ax]) as f64
                    })
                    .collect();
                for ax in 0..d {
                    tlo[ax] = tlo[ax].min(ppt[ax]);
                    thi[ax] = thi[ax].max(ppt[ax]);
                }
            }
        }
        let (ylo, yhi) = inv_box(m0, &tlo, &thi);
        let box_lo: Vec<i64> = ylo.iter().map(|v| v.floor() as i64 - 1).collect();
        let box_hi: Vec<i64> = yhi.iter().map(|v| v.ceil() as i64 + 1).collect();
        let mut g = SampledFunction::zeros(d, 1, level, box_lo, box_hi, m0.clone());
        let indices: Vec<Vec<i64>> = g.indices().collect();
        for y in &indices {
            let my = m0.mat().mat_vec(y);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in b.points() {
                let img = mn.mat_vec(&k);
                let src: Vec<i64> = my.iter().zip(&img).map(|(a, b)| a - b).collect();
                for j in 0..psi0.components() {
                    acc += b.at(&k, 0, j) * psi0.at(&src, j);
                }
            }
            g.set(y, 0, det * acc);
        }
        out.push(g);
    }
    Ok(out)
}

/// Gram matrices ⟨f, g(·+t)⟩ over lattice lags with ‖t‖∞ ≤ max_lag, by
/// Riemann sums at the shared grid resolution.
#[derive(Debug, Clone)]
pub struct GramSequence {
    pub rows: usize,
    pub cols: usize,
    pub lags: Vec<Vec<i64>>,
    pub values: Vec<Vec<Complex64>>,
}

impl GramSequence {
    pub fn value_at(&self, lag: &[i64]) -> Option<&[Complex64]> {
        self.lags
            .iter()
            .position(|l| l == lag)
            .map(|i| self.values[i].as_slice())
    }
}

pub fn gram_shifts(
    f: &SampledFunction,
    g: &SampledFunction,
    lattice: &Lattice,
    max_lag: i64,
) -> Result<GramSequence> {
    if f.dim() != g.dim() || f.level() != g.level() {
        return Err(Error::DimensionMismatch(
            "gram operands must share grid".into(),
        ));
    }
    if f.dilation_base().mat() != g.dilation_base().mat() {
        return Err(Error::DimensionMismatch(
            "gram operands must share the dilation base".into(),
        ));
    }
    let d = f.dim();
    let mn = f.dilation_base().mat().pow(f.level() as u32);
    let weight = f.cell_volume();
    // integer lags on the lattice within the window
    let mut lags = Vec::new();
    let mut cursor = vec![-max_lag; d];
    loop {
        if lattice.contains(&cursor) {
            lags.push(cursor.clone());
        }
        let mut ax = 0;
        loop {
            if ax == d {
                break;
            }
            cursor[ax] += 1;
            if cursor[ax] <= max_lag {
                break;
            }
            cursor[ax] = -max_lag;
            ax += 1;
        }
        if ax == d {
            break;
        }
    }
    let indices: Vec<Vec<i64>> = f.indices().collect();
    let mut values = Vec::with_capacity(lags.len());
    for t in &lags {
        let shift = mn.mat_vec(t);
        let mut mat = vec![Complex64::new(0.0, 0.0); f.components() * g.components()];
        for y in &indices {
            let gy: Vec<i64> = y.iter().zip(&shift).map(|(a, b)| a + b).collect();
            for i in 0..f.components() {
                let fv = f.at(y, i);
                if fv.re == 0.0 && fv.im == 0.0 {
                    continue;
                }
                for j in 0..g.components() {
                    mat[i * g.components() + j] += fv * g.at(&gy, j).conj();
                }
            }
        }
        for v in &mut mat {
            *v *= weight;
        }
        values.push(mat);
    }
    Ok(GramSequence {
        rows: f.components(),
        cols: g.components(),
        lags,
        values,
    })
}

/// Bracket symbol Σ_t value(t)·e^{−i t·ξ}.
pub fn bracket_symbol(gram: &GramSequence, xi: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); gram.rows * gram.cols];
    for (t, v) in gram.lags.iter().zip(&gram.values) {
        let phase: f64 = t.iter().zip(xi).map(|(ti, x)| *ti as f64 * x).sum();
        let e = Complex64::new(0.0, -phase).exp();
        for (o, val) in out.iter_mut().zip(v) {
            *o += val * e;
        }
    }
    out
}

/// Min/max eigenvalue of the bracket symbol over a ξ-grid of grid_n^d points
/// covering [0, 2π)^d.
pub fn riesz_bounds(gram: &GramSequence, grid_n: usize, dim: usize) -> Result<(f64, f64)> {
    if gram.rows != gram.cols {
        return Err(Error::ShapeMismatch(
            "riesz bounds need a square bracket symbol".into(),
        ));
    }
    if grid_n == 0 {
        return Err(Error::InvalidArgument("grid must be nonempty".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = gram.rows;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut idx = vec![0usize; dim];
    loop {
        let xi: Vec<f64> = idx
            .iter()
            .map(|&t| two_pi * t as f64 / grid_n as f64)
            .collect();
        let sym = bracket_symbol(gram, &xi);
        if r == 1 {
            let v = sym[0].re;
            lo = lo.min(v);
            hi = hi.max(v);
        } else {
            for ev in eigenvalues_complex(r, &sym) {
                lo = lo.min(ev.re);
                hi = hi.max(ev.re);
            }
        }
        let mut ax = 0;
        loop {
            if ax == dim {
                break;
            }
            idx[ax] += 1;
            if idx[ax] < grid_n {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
        if ax == dim {
            break;
        }
    }
    Ok((lo, hi))
}

/// Function-level biorthogonality ⟨ψ̃⁰, ψ⁰(·−k)⟩ = δ(k)·I_r over integer
/// lags. Gated on critical sampling: redundant banks cannot satisfy it and
/// report NotApplicable.
pub fn check_function_biorthogonality(
    bank: &FilterBank,
    level: usize,
    max_lag: i64,
) -> Result<VerificationReport> {
    let (ratio, equal) = verify::critical_sampling(bank);
    if !equal {
        return Ok(VerificationReport {
            property: "function-biorthogonality".into(),
            verdict: Verdict::NotApplicable,
            max_residual: 0.0,
            witnesses: vec![Witness {
                location: "critical sampling".into(),
                expected: format!("{}", bank.multiplicity()),
                got: format!("{ratio} (bank is redundant; biorthogonality cannot hold)"),
            }],
            arithmetic: Arithmetic::Float,
        });
    }
    let primal = cascade_mask(&bank.lowpass().primal, &bank.lowpass().dilation, level)?;
    let dual = cascade_mask(&bank.lowpass().dual, &bank.lowpass().dilation, level)?;
    let gram = gram_shifts(
        &dual.samples,
        &primal.samples,
        &Lattice::standard(bank.dim()),
        max_lag,
    )?;
    let r = bank.multiplicity();
    let mut max_residual = 0.0f64;
    let mut witnesses = Vec::new();
    for (t, v) in gram.lags.iter().zip(&gram.values) {
        let is_zero = t.iter().all(|x| *x == 0);
        for i in 0..r {
            for j in 0..r {
                let target = if is_zero && i == j { 1.0 } else { 0.0 };
                let resid = (v[i * r + j] - target).norm();
                if resid > max_residual {
                    max_residual = resid;
                }
                if resid > 1e-4 && witnesses.len() < 8 {
                    witnesses.push(Witness {
                        location: format!("lag {t:?}, entry ({i},{j})"),
                        expected: format!("{target}"),
                        got: format!("{}", v[i * r + j]),
                    });
                }
            }
        }
    }
    let verdict = if max_residual <= 1e-4 {
        Verdict::PassNumeric
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        property: "function-biorthogonality".into(),
        verdict,
        max_residual,
        witnesses,
        arithmetic: Arithmetic::Float,
    })
}
