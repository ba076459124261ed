//! Dense complex matrix arithmetic sized for dimensions up to 64.
//!
//! Everything here is double precision and allocation-per-value; the
//! matrices in this problem never exceed 16x16 on hot paths, so the
//! cyclic Jacobi eigensolver is both fast enough and fully deterministic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::DensityOperator;

/// Off-diagonal Frobenius norm below which a Jacobi sweep is converged,
/// relative to the matrix scale (absolute for unit-scale matrices).
const JACOBI_OFF_TOLERANCE: f64 = 1e-13;

/// Hard cap on Jacobi sweeps; convergence is quadratic, so hitting this
/// means the input was not Hermitian to working precision.
const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues this far below zero are numerical dust and get clamped in
/// PSD square roots; anything lower is a genuine negativity and an error.
pub const PSD_CLAMP_TOLERANCE: f64 = 1e-10;

/// Relative cutoff under which an eigenvalue of a PSD operator is
/// treated as exactly zero before a square root is taken. sqrt has an
/// unbounded derivative at zero, so without the cutoff an eigenvalue
/// that is mathematically zero but computed as ~1e-16 would contribute
/// ~1e-8 of pure noise.
const SQRT_DUST_CUTOFF: f64 = 1e-13;

/// Dense row-major complex matrix.
///
/// Most operations require a square matrix; the rectangular form exists
/// for isometries (e.g. the 16x2 copier map).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    /// Square matrix from row-major entries.
    pub fn square(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new(dim, dim, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Square diagonal matrix with the given real diagonal.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    /// Square matrix with real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::square(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    ///
    /// Panics on rectangular matrices; callers on the isometry path use
    /// `rows()`/`cols()` instead.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "dim() on a {}x{} matrix", self.rows, self.cols);
        self.rows
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Matrix product self * other.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest deviation from Hermitian symmetry, `max |M[r][c] - conj(M[c][r])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut max = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                if d > max {
                    max = d;
                }
            }
        }
        max
    }

    /// (M + M^dag) / 2; removes Hermiticity dust without changing a
    /// matrix that is already Hermitian to working precision.
    pub fn hermitized(&self) -> Self {
        let adj = self.adjoint();
        self.add(&adj).scale(Complex64::new(0.5, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product with index convention (rA * rowsB + rB).
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for ra in 0..self.rows {
            for ca in 0..self.cols {
                let a = self.get(ra, ca);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for rb in 0..other.rows {
                    for cb in 0..other.cols {
                        out.set(
                            ra * other.rows + rb,
                            ca * other.cols + cb,
                            a * other.get(rb, cb),
                        );
                    }
                }
            }
        }
        out
    }
}

/// Kronecker product of two matrices.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; `eigenvectors` holds the matching
/// orthonormal eigenvectors as columns, so `M = V diag(values) V^dag`.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// The input must be Hermitian within 1e-10. Rotations run in sweeps over
/// all upper-triangle pivots until the off-diagonal Frobenius norm falls
/// below 1e-13 (relative to scale for large-norm matrices).
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigResult> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let dev = m.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(Error::NonHermitian(dev));
    }

    let n = m.dim();
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);

    if n == 1 {
        return Ok(EigResult {
            eigenvalues: vec![a.get(0, 0).re],
            eigenvectors: v,
        });
    }

    let scale = a.frobenius_norm().max(1.0);
    let off_target = JACOBI_OFF_TOLERANCE * scale;
    // Pivots this small cannot move the off-norm above the target.
    let pivot_skip = 1e-16 * scale / (n as f64);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < off_target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q, pivot_skip);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= off_target {
        return Err(Error::NoConvergence);
    }

    // Sort eigenpairs ascending, deterministically.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re).then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }

    Ok(EigResult { eigenvalues, eigenvectors: vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a.get(r, c).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) element.
///
/// The pivot a_pq = r e^{i phi} is first phase-aligned to the real axis,
/// then a standard real rotation with tan chosen from
/// t^2 + 2 tau t - 1 = 0, tau = (a_qq - a_pp) / 2r zeroes it.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, skip: f64) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r <= skip {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;

    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Rotation R: R_pp = c, R_pq = s, R_qp = -s conj(phase), R_qq = c conj(phase).
    let n = a.dim();
    let s_phase = phase * s; // s e^{i phi}
    let c_phase_conj = phase.conj() * c;

    // Rows: A <- R^dag A.
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c - aqj * s_phase);
        a.set(q, j, apj * s + aqj * phase * c);
    }
    // Columns: A <- A R.
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c - aiq * s_phase.conj());
        a.set(i, q, aip * s + aiq * c_phase_conj);
    }
    // Pin the annihilated pair and diagonal reality exactly.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dpp = a.get(p, p).re;
    let dqq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dpp, 0.0));
    a.set(q, q, Complex64::new(dqq, 0.0));

    // Accumulate eigenvectors: V <- V R.
    for i in 0..v.rows() {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c - viq * s_phase.conj());
        v.set(i, q, vip * s + viq * c_phase_conj);
    }
}

/// Hermitian PSD square root via eigendecomposition.
///
/// Eigenvalues in [-1e-10, 0) are clamped to zero; anything below that
/// is a genuine negativity and yields `NotPsd`.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_CLAMP_TOLERANCE {
        return Err(Error::NotPsd(min));
    }
    let n = m.dim();
    let v = &eig.eigenvectors;
    let max = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SQRT_DUST_CUTOFF * max;
    let mut out = ComplexMatrix::zeros(n, n);
    // V sqrt(L) V^dag, accumulated rank-1 to stay Hermitian by construction.
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let root = lambda.sqrt();
        for r in 0..n {
            let vr = v.get(r, k);
            for c in 0..n {
                let add = vr * v.get(c, k).conj() * root;
                out.set(r, c, out.get(r, c) + add);
            }
        }
    }
    Ok(out.hermitized())
}

/// Bures distance between two density operators,
/// sqrt(2) * [1 - Tr((rho1^{1/2} rho2 rho1^{1/2})^{1/2})]^{1/2}.
///
/// The result lies in [0, sqrt(2)] and is symmetric in its arguments to
/// numerical precision.
pub fn bures_distance(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    bures_distance_matrices(rho1.matrix(), rho2.matrix())
}

/// Bures distance on raw PSD unit-trace matrices.
pub fn bures_distance_matrices(m1: &ComplexMatrix, m2: &ComplexMatrix) -> Result<f64> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch(m1.dim(), m2.dim()));
    }
    let s1 = sqrt_psd(m1)?;
    let inner = s1.matmul(m2).matmul(&s1).hermitized();
    let eig = hermitian_eig(&inner)?;
    let max = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SQRT_DUST_CUTOFF * max;
    let fidelity_root: f64 = eig
        .eigenvalues
        .iter()
        .map(|&lambda| if lambda > cutoff { lambda.sqrt() } else { 0.0 })
        .sum();
    // Rounding can push the fidelity term a hair past 1 for equal inputs.
    Ok((2.0 * (1.0 - fidelity_root).max(0.0)).sqrt())
}
