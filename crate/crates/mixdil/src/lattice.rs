//! Exact integer-matrix and lattice algebra: Hermite normal form, coset
//! enumeration, sublattice intersection and quotient representatives.
//!
//! Everything here is exact integer/rational arithmetic inside the supported
//! envelope (dimension ≤ 4, entries small). All values are immutable after
//! construction and all operations are pure.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational scalar used for inverse-transpose entries and coset points.
pub type Rat = Ratio<i64>;

/// Square integer matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<i64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim} entries, got {}",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    /// Build from nested rows, e.g. `IntMatrix::from_rows(&[&[1, 1], &[1, -1]])`.
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend_from_slice(r);
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self {
            dim,
            entries: vec![0; dim * dim],
        };
        for i in 0..dim {
            m.entries[i * dim + i] = 1;
        }
        m
    }

    /// Scalar dilation m·I_d.
    pub fn scalar(dim: usize, m: i64) -> Self {
        let mut s = Self::identity(dim);
        for i in 0..dim {
            s.entries[i * dim + i] = m;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut t = Self {
            dim: d,
            entries: vec![0; d * d],
        };
        for i in 0..d {
            for j in 0..d {
                t.entries[j * d + i] = self.entries[i * d + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("matrix product".into()));
        }
        let d = self.dim;
        let mut out = Self {
            dim: d,
            entries: vec![0; d * d],
        };
        for i in 0..d {
            for j in 0..d {
                let mut acc: i128 = 0;
                for k in 0..d {
                    acc += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                out.entries[i * d + j] = i64::try_from(acc).expect("entry overflow");
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, x: &[i64]) -> Vec<i64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Nonnegative integer power, `pow(0)` is the identity.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..e {
            acc = acc.mul(self).expect("same dim");
        }
        acc
    }

    /// Exact determinant by Laplace expansion (dim ≤ 4 envelope).
    pub fn det(&self) -> i64 {
        fn det_rec(d: usize, m: &[i128]) -> i128 {
            if d == 1 {
                return m[0];
            }
            let mut acc: i128 = 0;
            for j in 0..d {
                if m[j] == 0 {
                    continue;
                }
                let mut minor = Vec::with_capacity((d - 1) * (d - 1));
                for i in 1..d {
                    for jj in 0..d {
                        if jj != j {
                            minor.push(m[i * d + jj]);
                        }
                    }
                }
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc += sign * m[j] * det_rec(d - 1, &minor);
            }
            acc
        }
        let wide: Vec<i128> = self.entries.iter().map(|&e| e as i128).collect();
        i64::try_from(det_rec(self.dim, &wide)).expect("determinant overflow")
    }

    /// Exact rational inverse (row-major d×d), or None if singular.
    pub fn inverse(&self) -> Option<Vec<Rat>> {
        let det = self.det();
        if det == 0 {
            return None;
        }
        let d = self.dim;
        let mut inv = vec![Rat::from_integer(0); d * d];
        for i in 0..d {
            for j in 0..d {
                // cofactor C_ji / det
                let mut minor = Vec::with_capacity((d - 1) * (d - 1));
                for r in 0..d {
                    if r == j {
                        continue;
                    }
                    for c in 0..d {
                        if c != i {
                            minor.push(self.get(r, c));
                        }
                    }
                }
                let md = if d == 1 {
                    1
                } else {
                    IntMatrix {
                        dim: d - 1,
                        entries: minor,
                    }
                    .det()
                };
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                inv[i * d + j] = Rat::new(sign * md, det);
            }
        }
        Some(inv)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| i == j || self.get(i, j) == 0))
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }
}

/// Apply an exact rational matrix (row-major) to an integer vector.
pub fn rat_mat_vec(dim: usize, m: &[Rat], x: &[i64]) -> Vec<Rat> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| m[i * dim + j] * Rat::from_integer(x[j]))
                .sum()
        })
        .collect()
}

/// Column echelon form by unimodular column operations.
///
/// Returns (E, U) with E = A·U, U unimodular, E lower-echelon: pivots walk
/// down-right, each pivot positive, entries left of a pivot in its row reduced
/// into [0, pivot).
fn column_echelon(rows: usize, cols: usize, data: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let mut b: Vec<i64> = data.to_vec();
    let mut u: Vec<i64> = vec![0; cols * cols];
    for j in 0..cols {
        u[j * cols + j] = 1;
    }
    let idx = |i: usize, j: usize| i * cols + j;
    let uidx = |i: usize, j: usize| i * cols + j;
    let mut pc = 0usize; // next pivot column
    for pr in 0..rows {
        if pc >= cols {
            break;
        }
        loop {
            // column with smallest nonzero |b[pr][j]| among j >= pc
            let mut best: Option<(usize, i64)> = None;
            for j in pc..cols {
                let v = b[idx(pr, j)];
                if v != 0 && best.is_none_or(|(_, bv)| v.abs() < bv.abs()) {
                    best = Some((j, v));
                }
            }
            let Some((jmin, _)) = best else {
                break;
            };
            if jmin != pc {
                for i in 0..rows {
                    b.swap(idx(i, jmin), idx(i, pc));
                }
                for i in 0..cols {
                    u.swap(uidx(i, jmin), uidx(i, pc));
                }
            }
            let piv = b[idx(pr, pc)];
            let mut clean = true;
            for j in pc + 1..cols {
                let v = b[idx(pr, j)];
                if v != 0 {
                    let q = v / piv; // truncated: |remainder| < |piv|
                    if q != 0 {
                        for i in 0..rows {
                            b[idx(i, j)] -= q * b[idx(i, pc)];
                        }
                        for i in 0..cols {
                            u[uidx(i, j)] -= q * u[uidx(i, pc)];
                        }
                    }
                    if b[idx(pr, j)] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if b[idx(pr, pc)] != 0 {
            if b[idx(pr, pc)] < 0 {
                for i in 0..rows {
                    b[idx(i, pc)] = -b[idx(i, pc)];
                }
                for i in 0..cols {
                    u[uidx(i, pc)] = -u[uidx(i, pc)];
                }
            }
            let piv = b[idx(pr, pc)];
            for j in 0..pc {
                let v = b[idx(pr, j)];
                let q = v.div_euclid(piv);
                if q != 0 {
                    for i in 0..rows {
                        b[idx(i, j)] -= q * b[idx(i, pc)];
                    }
                    for i in 0..cols {
                        u[uidx(i, j)] -= q * u[uidx(i, pc)];
                    }
                }
            }
            pc += 1;
        }
    }
    (b, u)
}

/// Column Hermite normal form of a nonsingular matrix.
///
/// Returns (H, U) with H = A·U, U unimodular, H lower triangular with
/// positive diagonal and 0 ≤ H\[i\]\[j\] < H\[i\]\[i\] for j < i.
pub fn hnf(a: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if a.det() == 0 {
        return Err(Error::SingularMatrix);
    }
    let d = a.dim;
    let (e, u) = column_echelon(d, d, &a.entries);
    Ok((
        IntMatrix { dim: d, entries: e },
        IntMatrix { dim: d, entries: u },
    ))
}

/// Integer dilation matrix: all eigenvalues strictly greater than 1 in
/// modulus, with its determinant and exact inverse-transpose cached.
#[derive(Debug, Clone)]
pub struct DilationMatrix {
    mat: IntMatrix,
    det_abs: i64,
    inv_transpose: Vec<Rat>,
}

impl PartialEq for DilationMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl DilationMatrix {
    pub fn new(mat: IntMatrix) -> Result<Self> {
        let det = mat.det();
        if det == 0 {
            return Err(Error::SingularMatrix);
        }
        let rho = spectral_radius_of_inverse(&mat);
        if rho >= 1.0 - 1e-9 {
            return Err(Error::NotExpansive(rho));
        }
        let inv_transpose = mat.transpose().inverse().expect("nonsingular");
        Ok(Self {
            mat,
            det_abs: det.abs(),
            inv_transpose,
        })
    }

    /// Scalar dilation m·I_d.
    pub fn scalar(dim: usize, m: i64) -> Result<Self> {
        Self::new(IntMatrix::scalar(dim, m))
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn det_abs(&self) -> i64 {
        self.det_abs
    }

    pub fn mat(&self) -> &IntMatrix {
        &self.mat
    }

    /// Exact M^{-T}, row-major.
    pub fn inv_transpose(&self) -> &[Rat] {
        &self.inv_transpose
    }

    /// Exact M^{-1}·x when integral, else None.
    pub fn inv_times_vec(&self, x: &[i64]) -> Option<Vec<i64>> {
        let d = self.dim();
        let inv = self.mat.inverse().expect("nonsingular");
        let y = rat_mat_vec(d, &inv, x);
        y.iter()
            .map(|r| r.is_integer().then(|| r.to_integer()))
            .collect()
    }

    /// Exact M^{-1}·B when every entry is integral, else None.
    pub fn inv_times_mat(&self, b: &IntMatrix) -> Option<IntMatrix> {
        let d = self.dim();
        if b.dim() != d {
            return None;
        }
        let inv = self.mat.inverse().expect("nonsingular");
        let mut out = IntMatrix::identity(d);
        for j in 0..d {
            let col: Vec<i64> = (0..d).map(|i| b.get(i, j)).collect();
            let y = rat_mat_vec(d, &inv, &col);
            for (i, r) in y.iter().enumerate() {
                if !r.is_integer() {
                    return None;
                }
                out.set(i, j, r.to_integer());
            }
        }
        Some(out)
    }
}

/// Spectral radius of M^{-1}, estimated by power iteration with a
/// geometric-mean growth rate. Deterministic start vector.
fn spectral_radius_of_inverse(mat: &IntMatrix) -> f64 {
    let d = mat.dim();
    let det = mat.det() as f64;
    let inv = mat.inverse().expect("checked nonsingular");
    let invf: Vec<f64> = inv
        .iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .collect();
    let _ = det;
    let mut x: Vec<f64> = (0..d).map(|i| 1.0 + 0.37 * (i as f64 + 1.0)).collect();
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let n0 = norm(&x);
    for xi in &mut x {
        *xi /= n0;
    }
    let burn = 64;
    let total = 564;
    let mut log_sum = 0.0;
    let mut counted = 0usize;
    for it in 0..total {
        let y: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| invf[i * d + j] * x[j]).sum())
            .collect();
        let n = norm(&y);
        if n == 0.0 {
            return 0.0;
        }
        if it >= burn {
            log_sum += n.ln();
            counted += 1;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / n;
        }
    }
    (log_sum / counted as f64).exp()
}

/// The coset representatives Ω_M = (M^{-T}Z^d)/Z^d reduced into [0,1)^d.
#[derive(Debug, Clone)]
pub struct CosetSet {
    base: DilationMatrix,
    reps: Vec<Vec<Rat>>,
}

impl CosetSet {
    pub fn base(&self) -> &DilationMatrix {
        &self.base
    }

    pub fn reps(&self) -> &[Vec<Rat>] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Membership in Ω_M: true iff M^T·ω is an integer vector.
    pub fn contains(&self, omega: &[Rat]) -> bool {
        omega_in(&self.base, omega)
    }
}

/// True iff M^T·ω ∈ Z^d, i.e. ω lies on the coset lattice of M.
pub fn omega_in(m: &DilationMatrix, omega: &[Rat]) -> bool {
    let d = m.dim();
    let mt = m.mat().transpose();
    (0..d).all(|i| {
        (0..d)
            .map(|j| Rat::from_integer(mt.get(i, j)) * omega[j])
            .sum::<Rat>()
            .is_integer()
    })
}

/// Compare vectors with the first coordinate varying fastest.
fn colex<T: Ord>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Enumerate the |det M| representatives of (M^{-T}Z^d)/Z^d in [0,1)^d.
///
/// Zero comes first; the remainder is sorted with the first coordinate
/// varying fastest. Enumeration walks the fundamental digits of the HNF of
/// M^T, so the cost is exactly |det M| candidates.
pub fn coset_reps(m: &DilationMatrix) -> CosetSet {
    let d = m.dim();
    let (h, _) = hnf(&m.mat().transpose()).expect("dilation is nonsingular");
    let diag: Vec<i64> = h.diagonal();
    let mut reps: Vec<Vec<Rat>> = Vec::with_capacity(m.det_abs() as usize);
    let mut digit = vec![0i64; d];
    loop {
        let w = rat_mat_vec(d, m.inv_transpose(), &digit);
        let frac: Vec<Rat> = w.iter().map(|r| r - r.floor()).collect();
        reps.push(frac);
        // advance digits, first axis fastest
        let mut axis = 0;
        loop {
            if axis == d {
                break;
            }
            digit[axis] += 1;
            if digit[axis] < diag[axis] {
                break;
            }
            digit[axis] = 0;
            axis += 1;
        }
        if axis == d {
            break;
        }
    }
    reps.sort_by(|a, b| colex(a, b));
    reps.dedup();
    debug_assert_eq!(reps.len(), m.det_abs() as usize);
    debug_assert!(reps[0].iter().all(|r| r == &Rat::from_integer(0)));
    CosetSet {
        base: m.clone(),
        reps,
    }
}

/// Full-rank integer lattice, basis columns in column Hermite normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: IntMatrix,
    index: i64,
}

impl Lattice {
    /// Build from any nonsingular generating matrix (columns generate).
    pub fn from_basis(basis: IntMatrix) -> Result<Self> {
        let (h, _) = hnf(&basis)?;
        let index = h.det();
        debug_assert!(index > 0);
        Ok(Self { basis: h, index })
    }

    pub fn standard(dim: usize) -> Self {
        Self {
            basis: IntMatrix::identity(dim),
            index: 1,
        }
    }

    pub fn from_dilation(m: &DilationMatrix) -> Self {
        Self::from_basis(m.mat().clone()).expect("dilation is nonsingular")
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Basis in column HNF.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// |det basis| = index of the lattice in Z^d.
    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let d = self.dim();
        let inv = self.basis.inverse().expect("full rank");
        rat_mat_vec(d, &inv, x).iter().all(|r| r.is_integer())
    }
}

/// Intersection of two full-rank lattices of the same dimension.
///
/// Computes the integer kernel of [B1 | -B2] by column echelon reduction,
/// then HNF-reduces B1 applied to the kernel's first block.
pub fn intersect(l1: &Lattice, l2: &Lattice) -> Result<Lattice> {
    if l1.dim() != l2.dim() {
        return Err(Error::DimensionMismatch("lattice intersection".into()));
    }
    let d = l1.dim();
    let cols = 2 * d;
    let mut c = vec![0i64; d * cols];
    for i in 0..d {
        for j in 0..d {
            c[i * cols + j] = l1.basis.get(i, j);
            c[i * cols + d + j] = -l2.basis.get(i, j);
        }
    }
    let (e, u) = column_echelon(d, cols, &c);
    // kernel columns: those mapped to zero
    let mut kernel_cols: Vec<usize> = Vec::new();
    for j in 0..cols {
        if (0..d).all(|i| e[i * cols + j] == 0) {
            kernel_cols.push(j);
        }
    }
    debug_assert_eq!(kernel_cols.len(), d, "full-rank inputs have rank-d kernel");
    // first block of each kernel vector gives x with B1·x ∈ L2
    let mut k = IntMatrix::identity(d);
    for (out_j, &j) in kernel_cols.iter().enumerate() {
        for i in 0..d {
            k.set(i, out_j, u[i * cols + j]);
        }
    }
    let inter = l1.basis.mul(&k)?;
    let lat = Lattice::from_basis(inter)?;
    debug_assert_eq!(
        (l1.index * l2.index) % lat.index,
        0,
        "index must divide the product"
    );
    Ok(lat)
}

/// Representatives of L1/L2 for a sublattice L2 ⊆ L1.
///
/// Returns exactly index(L2)/index(L1) vectors, pairwise distinct mod L2 and
/// containing 0, scanned in order with the first coordinate fastest.
pub fn quotient_reps(l1: &Lattice, l2: &Lattice) -> Result<Vec<Vec<i64>>> {
    if l1.dim() != l2.dim() {
        return Err(Error::DimensionMismatch("lattice quotient".into()));
    }
    let d = l1.dim();
    // L2 ⊆ L1 iff C = B1^{-1}·B2 is integral
    let inv1 = l1.basis.inverse().expect("full rank");
    let mut c = IntMatrix::identity(d);
    for j in 0..d {
        let col: Vec<i64> = (0..d).map(|i| l2.basis.get(i, j)).collect();
        let y = rat_mat_vec(d, &inv1, &col);
        for (i, r) in y.iter().enumerate() {
            if !r.is_integer() {
                return Err(Error::NotSublattice);
            }
            c.set(i, j, r.to_integer());
        }
    }
    let m = c.det().abs();
    let count = m as usize;
    if count == 0 {
        return Err(Error::NotSublattice);
    }
    let scan_total = (m as u128).checked_pow(d as u32);
    if scan_total.is_none_or(|t| t > 4_000_000) {
        return Err(Error::EnvelopeExceeded(format!(
            "quotient scan of {m}^{d} candidates"
        )));
    }
    let (h, _) = hnf(&c)?;
    let hd = h.diagonal();
    // canonical digits of x modulo the columns of h
    let canon = |x: &[i64]| -> Vec<i64> {
        let mut r = x.to_vec();
        for i in 0..d {
            let q = r[i].div_euclid(hd[i]);
            if q != 0 {
                for (row, rv) in r.iter_mut().enumerate().skip(i) {
                    *rv -= q * h.get(row, i);
                }
            }
        }
        r
    };
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::with_capacity(count);
    let mut x = vec![0i64; d];
    'scan: loop {
        if seen.insert(canon(&x)) {
            reps.push(l1.basis.mat_vec(&x));
            if reps.len() == count {
                break 'scan;
            }
        }
        let mut axis = 0;
        loop {
            if axis == d {
                break 'scan;
            }
            x[axis] += 1;
            if x[axis] < m {
                break;
            }
            x[axis] = 0;
            axis += 1;
        }
    }
    debug_assert_eq!(reps.len(), count);
    Ok(reps)
}
