//! Dense complex linear algebra for finite-dimensional operators.
//!
//! Everything in this crate runs on desk-scale Hilbert spaces (dimension a few
//! dozen at most), so the representation is a plain row-major `Vec<Complex64>`
//! and the eigensolver is a cyclic Jacobi iteration: deterministic,
//! dependency-free, and accurate to near machine precision at these sizes.
//!
//! The dual space `H*` is identified with `H` through the computational basis,
//! so the transpose of an operator is the entrywise matrix transpose (no
//! conjugation). This is the convention behind every `A ⊗ Bᵀ` product built
//! here, and it makes `tr[τH] = tr[τᵀHᵀ]` hold exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity gate used by [`HermitianOperator::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Default total-dimension guard for Kronecker products and tensor grids.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Maximum total dimension accepted by [`kron`] and the tensor-power
/// objective. `QWOT_MAX_DIM` overrides the built-in default of 4096.
pub fn dimension_guard() -> usize {
    std::env::var("QWOT_MAX_DIM")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from rows of complex entries.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let nr = rows.len();
        if nr == 0 {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        let nc = rows[0].len();
        if nc == 0 || rows.iter().any(|r| r.len() != nc) {
            return Err(Error::Shape("rows must be non-empty and equal-length".into()));
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { rows: nr, cols: nc, data })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Entrywise transpose, no conjugation. Realizes the dual-space action of
    /// an operator under the computational-basis identification of `H*`.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `tr[A† B]`, the Hilbert-Schmidt inner product.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = (self.get(i, j) + self.get(j, i).conj()).scale(0.5);
                out.set(i, j, v);
            }
        }
        out
    }

    /// `tr[A B]` without materializing the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t += self.get(i, j) * other.get(j, i);
            }
        }
        t
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.dagger()).max_abs()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Rank-one matrix `v w†`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for i in 0..v.len() {
            for j in 0..w.len() {
                m.set(i, j, v[i] * w[j].conj());
            }
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Kronecker product `A ⊗ B` with the row-major index convention
/// `(A ⊗ B)[(i·rB + a), (j·cB + b)] = A[i,j] · B[a,b]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let guard = dimension_guard();
    if rows > guard || cols > guard {
        return Err(Error::Size(format!(
            "kron result dimension {rows}x{cols} exceeds the guard of {guard}"
        )));
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for x in 0..b.rows() {
                for y in 0..b.cols() {
                    out.set(i * b.rows() + x, j * b.cols() + y, aij * b.get(x, y));
                }
            }
        }
    }
    Ok(out)
}

/// Which tensor factor [`partial_trace`] sums out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    /// Trace out the first factor; the result lives on the second (dB × dB).
    First,
    /// Trace out the second factor; the result lives on the first (dA × dA).
    Second,
}

/// Partial trace of an operator on a bipartite space of dimensions `(dA, dB)`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    side: TraceSide,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Shape(format!(
            "partial trace expects a {n}x{n} matrix for dims ({da},{db}), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    match side {
        TraceSide::Second => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    let mut s = Complex64::new(0.0, 0.0);
                    for a in 0..db {
                        s += m.get(i * db + a, j * db + a);
                    }
                    out.set(i, j, s);
                }
            }
            Ok(out)
        }
        TraceSide::First => {
            let mut out = ComplexMatrix::zeros(db, db);
            for a in 0..db {
                for b in 0..db {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..da {
                        s += m.get(i * db + a, i * db + b);
                    }
                    out.set(a, b, s);
                }
            }
            Ok(out)
        }
    }
}

/// A validated Hermitian operator. The stored matrix is exactly
/// Hermitianized via `(M + M†)/2` at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates `‖M − M†‖_max ≤ 1e−12` and stores the Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("Hermitian operator must be square".into()));
        }
        if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("Hermitian operator entries must be finite".into()));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::Domain(format!(
                "matrix is not Hermitian: max |M - M†| = {defect:.3e}"
            )));
        }
        Ok(Self { dim: m.rows(), matrix: m.hermitian_part() })
    }

    /// Hermitianizes unconditionally. For inputs that are only symmetric up to
    /// coarse rounding (e.g. published matrices truncated to a few decimals).
    pub fn from_matrix_lenient(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("Hermitian operator must be square".into()));
        }
        if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("Hermitian operator entries must be finite".into()));
        }
        Ok(Self { dim: m.rows(), matrix: m.hermitian_part() })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim) }
    }

    pub fn from_diag(values: &[f64]) -> Self {
        Self { dim: values.len(), matrix: ComplexMatrix::diag(values) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Operator norm, i.e. the largest eigenvalue magnitude.
    pub fn op_norm(&self) -> f64 {
        match eigh(self, default_cluster_tol(self)) {
            Ok(d) => d
                .eigenvalues
                .iter()
                .fold(0.0_f64, |m, &l| m.max(l.abs())),
            // A Hermitian matrix whose Jacobi sweep failed is still bounded
            // by its Frobenius norm.
            Err(_) => self.matrix.frobenius_norm(),
        }
    }

    /// Expectation value `tr[ρ A]` style pairing; both operators Hermitian so
    /// the result is real up to rounding.
    pub fn pair(&self, other: &HermitianOperator) -> f64 {
        self.matrix.matmul(other.matrix()).trace().re
    }
}

/// Spectral decomposition of a Hermitian operator.
///
/// `eigenvalues` are ascending; the columns of `eigenvectors` are the matching
/// orthonormal eigenvectors. `multiplicity_groups` partitions the indices into
/// clusters of numerically equal eigenvalues: the gap between adjacent
/// clusters exceeds the clustering tolerance used at construction.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    pub multiplicity_groups: Vec<Vec<usize>>,
}

impl EigenDecomposition {
    /// Distinct eigenvalues, one per multiplicity group (group mean).
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        self.multiplicity_groups
            .iter()
            .map(|g| g.iter().map(|&i| self.eigenvalues[i]).sum::<f64>() / g.len() as f64)
            .collect()
    }

    /// Spectral projector onto the given multiplicity group.
    pub fn group_projector(&self, group: usize) -> ComplexMatrix {
        let dim = self.eigenvectors.rows();
        let mut p = ComplexMatrix::zeros(dim, dim);
        for &idx in &self.multiplicity_groups[group] {
            let v = self.eigenvectors.column(idx);
            p = p.add(&ComplexMatrix::outer(&v, &v));
        }
        p
    }

    /// `V diag(f(λ)) V†`.
    pub fn assemble(&self, values: &[f64]) -> ComplexMatrix {
        let dim = self.eigenvectors.rows();
        assert_eq!(values.len(), dim);
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in values.iter().enumerate() {
                    if w != 0.0 {
                        acc += self.eigenvectors.get(i, k)
                            * self.eigenvectors.get(j, k).conj()
                            * w;
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Default eigenvalue clustering tolerance: `1e−8 · max(1, ‖A‖)`.
///
/// Uses the Frobenius norm as the scale (an upper bound on the operator norm)
/// so that no eigendecomposition is needed to pick the tolerance.
pub fn default_cluster_tol(a: &HermitianOperator) -> f64 {
    1e-8 * a.matrix().frobenius_norm().max(1.0)
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations. Deterministic for a fixed input; eigenvalues ascending.
pub fn eigh(a: &HermitianOperator, cluster_tol: f64) -> Result<EigenDecomposition> {
    if cluster_tol <= 0.0 {
        return Err(Error::Domain("cluster_tol must be positive".into()));
    }
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let off_target = 1e-13 * scale.max(f64::MIN_POSITIVE);

    let off = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    if n == 1 {
        let lam = m.get(0, 0).re;
        return Ok(EigenDecomposition {
            eigenvalues: vec![lam],
            eigenvectors: v,
            multiplicity_groups: vec![vec![0]],
        });
    }

    let mut converged = scale == 0.0 || off(&m) <= off_target;
    if !converged {
        let pivot_floor = off_target / (n as f64);
        'sweeps: for _ in 0..JACOBI_MAX_SWEEPS {
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let g = m.get(p, q);
                    let gn = g.norm();
                    if gn <= pivot_floor {
                        continue;
                    }
                    let alpha = m.get(p, p).re;
                    let beta = m.get(q, q).re;
                    let phase = g / gn;
                    let tau = (alpha - beta) / (2.0 * gn);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let ps = phase.scale(s);
                    let ps_conj = phase.conj().scale(s);
                    let md = &mut m.data;
                    // Column update M <- M R with R the plane rotation.
                    for i in 0..n {
                        let ip = i * n + p;
                        let iq = i * n + q;
                        let mip = md[ip];
                        let miq = md[iq];
                        md[ip] = mip.scale(c) + miq * ps_conj;
                        md[iq] = miq.scale(c) - mip * ps;
                    }
                    // Row update M <- R† M.
                    let (rp, rq) = (p * n, q * n);
                    for j in 0..n {
                        let mpj = md[rp + j];
                        let mqj = md[rq + j];
                        md[rp + j] = mpj.scale(c) + mqj * ps;
                        md[rq + j] = mqj.scale(c) - mpj * ps_conj;
                    }
                    // Accumulate eigenvectors V <- V R.
                    let vd = &mut v.data;
                    for i in 0..n {
                        let ip = i * n + p;
                        let iq = i * n + q;
                        let vip = vd[ip];
                        let viq = vd[iq];
                        vd[ip] = vip.scale(c) + viq * ps_conj;
                        vd[iq] = viq.scale(c) - vip * ps;
                    }
                }
            }
            if off(&m) <= off_target {
                converged = true;
                break 'sweeps;
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not reach its off-diagonal target in {JACOBI_MAX_SWEEPS} sweeps (off = {:.3e})",
            off(&m)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let lams: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| lams[i].partial_cmp(&lams[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| lams[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, new_col, v.get(i, old_col));
        }
    }

    // Greedy gap clustering: a new group starts whenever the ascending gap
    // exceeds the tolerance.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![0usize];
    for i in 1..n {
        if eigenvalues[i] - eigenvalues[i - 1] > cluster_tol {
            groups.push(std::mem::take(&mut current));
        }
        current.push(i);
    }
    groups.push(current);

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
        multiplicity_groups: groups,
    })
}

/// Real functional calculus: `f(A) = V diag(f(λ)) V†`.
///
/// Fails with a domain error if `f` returns a non-finite value on any
/// eigenvalue.
pub fn apply_scalar_function(
    a: &HermitianOperator,
    f: impl Fn(f64) -> f64,
) -> Result<HermitianOperator> {
    let decomp = eigh(a, default_cluster_tol(a))?;
    let mut values = Vec::with_capacity(decomp.eigenvalues.len());
    for &lam in &decomp.eigenvalues {
        let y = f(lam);
        if !y.is_finite() {
            return Err(Error::Domain(format!(
                "scalar function returned a non-finite value at eigenvalue {lam}"
            )));
        }
        values.push(y);
    }
    HermitianOperator::new(decomp.assemble(&values).hermitian_part())
}

/// `|x|^p` with the continuous extension `0^p = 0`, also for `p < 1`.
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        0.0
    } else {
        a.powf(p)
    }
}
