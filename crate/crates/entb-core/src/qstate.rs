//! Pure states and density operators over ordered lists of
//! finite-dimensional subsystems.
//!
//! Subsystem 0 is the most significant index: for dims [d0, d1, ...] the
//! flat index of digits (m0, m1, ...) is m0*d1*d2*... + m1*d2*... + ...
//! This makes the two-qubit matrix element rho_{m mu, n nu} live at row
//! 2m + mu, column 2n + nu, and the partial transpose a literal index
//! swap.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{hermitian_eig, ComplexMatrix, PSD_CLAMP_TOLERANCE};

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::BadDims(dims.to_vec()));
    }
    Ok(dims.iter().product())
}

/// Strides for the most-significant-first index convention.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn check_keep(keep: &[usize], count: usize) -> Result<()> {
    for (pos, &k) in keep.iter().enumerate() {
        if k >= count {
            return Err(Error::InvalidSubsystem { index: k, count });
        }
        if pos > 0 && keep[pos - 1] >= k {
            return Err(Error::KeepNotIncreasing(keep.to_vec()));
        }
    }
    Ok(())
}

/// Flat-index offsets of every multi-index over the selected subsystems,
/// enumerated in ascending multi-index order.
fn subsystem_offsets(dims: &[usize], selected: &[usize]) -> Vec<usize> {
    let strides = strides(dims);
    let total: usize = selected.iter().map(|&s| dims[s]).product();
    let mut offsets = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut off = 0;
        for &s in selected.iter().rev() {
            off += (idx % dims[s]) * strides[s];
            idx /= dims[s];
        }
        offsets.push(off);
    }
    offsets
}

/// Normalized pure state over a list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Build a state, checking the squared norm is within 1e-12 of 1.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::BadAmplitudeCount { dims, len: amplitudes.len() });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized((norm_sq - 1.0).abs()));
        }
        Ok(Self { dims, amplitudes })
    }

    pub(crate) fn new_unchecked(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Self {
        Self { dims, amplitudes }
    }

    /// Computational basis state |index> over the given dims.
    pub fn basis_state(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = check_dims(&dims)?;
        if index >= total {
            return Err(Error::InvalidSubsystem { index, count: total });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); total];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product self (x) other; subsystems of `other` follow ours.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { dims, amplitudes }
    }

    /// Density operator |self><self|.
    pub fn to_density(&self) -> DensityOperator {
        let n = self.amplitudes.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, self.amplitudes[r] * self.amplitudes[c].conj());
            }
        }
        DensityOperator { dims: self.dims.clone(), matrix: m }
    }

    /// Reduced density operator of the kept subsystems, tracing out the
    /// rest directly from the amplitudes.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityOperator> {
        check_keep(keep, self.dims.len())?;
        let traced: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let keep_offsets = subsystem_offsets(&self.dims, keep);
        let traced_offsets = subsystem_offsets(&self.dims, &traced);
        let k = keep_offsets.len();
        let mut m = ComplexMatrix::zeros(k, k);
        for (i, &oi) in keep_offsets.iter().enumerate() {
            for (j, &oj) in keep_offsets.iter().enumerate() {
                let mut sum = Complex64::new(0.0, 0.0);
                for &ot in &traced_offsets {
                    sum += self.amplitudes[oi + ot] * self.amplitudes[oj + ot].conj();
                }
                m.set(i, j, sum);
            }
        }
        let dims = keep.iter().map(|&s| self.dims[s]).collect();
        Ok(DensityOperator { dims, matrix: m })
    }

    /// Reorder subsystems; output factor p is input factor `perm[p]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::BadDims(perm.to_vec()));
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidSubsystem { index: p, count: n });
            }
            seen[p] = true;
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let old_strides = strides(&self.dims);
        let new_strides = strides(&new_dims);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (new_idx, slot) in amplitudes.iter_mut().enumerate() {
            let mut rem = new_idx;
            let mut old_idx = 0;
            for (pos, &p) in perm.iter().enumerate() {
                let digit = rem / new_strides[pos] % new_dims[pos];
                rem %= new_strides[pos];
                old_idx += digit * old_strides[p];
            }
            *slot = self.amplitudes[old_idx];
        }
        Ok(Self { dims: new_dims, amplitudes })
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator over a list of
/// subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Build and fully validate: Hermitian within 1e-12, unit trace
    /// within 1e-12, minimum eigenvalue >= -1e-10.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let total = check_dims(&dims)?;
        if !matrix.is_square() || matrix.dim() != total {
            return Err(Error::InvalidDensity(format!(
                "matrix is {}x{}, dims {:?} require {}x{}",
                matrix.rows(),
                matrix.cols(),
                dims,
                total,
                total
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > 1e-12 {
            return Err(Error::InvalidDensity(format!("not Hermitian, asymmetry {dev:.3e}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let eig = hermitian_eig(&matrix)?;
        let min = eig.eigenvalues[0];
        if min < -PSD_CLAMP_TOLERANCE {
            return Err(Error::InvalidDensity(format!("min eigenvalue {min:.3e}")));
        }
        Ok(Self { dims, matrix })
    }

    /// Trusted constructor for values produced by operations that keep
    /// the invariants by construction (reductions, convex mixtures).
    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Tensor product of two operators.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, matrix: self.matrix.tensor(&other.matrix) }
    }

    /// Convex mixture of operators on identical dims.
    pub fn mixture(terms: &[(f64, DensityOperator)]) -> Result<Self> {
        let sum: f64 = terms.iter().map(|(w, _)| w).sum();
        if terms.is_empty() || terms.iter().any(|(w, _)| *w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::BadWeights(sum));
        }
        let dims = terms[0].1.dims.clone();
        let n = terms[0].1.total_dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, rho) in terms {
            if rho.dims != dims {
                return Err(Error::DimensionMismatch(rho.total_dim(), n));
            }
            m = m.add(&rho.matrix.scale(Complex64::new(*w, 0.0)));
        }
        Ok(Self { dims, matrix: m })
    }

    /// Reorder subsystems; output factor p is input factor `perm[p]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::BadDims(perm.to_vec()));
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidSubsystem { index: p, count: n });
            }
            seen[p] = true;
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let old_strides = strides(&self.dims);
        let new_strides = strides(&new_dims);
        let total = self.total_dim();
        let map = |new_idx: usize| -> usize {
            let mut rem = new_idx;
            let mut old = 0;
            for (pos, &p) in perm.iter().enumerate() {
                let digit = rem / new_strides[pos] % new_dims[pos];
                rem %= new_strides[pos];
                old += digit * old_strides[p];
            }
            old
        };
        let mut m = ComplexMatrix::zeros(total, total);
        for r in 0..total {
            let or = map(r);
            for c in 0..total {
                m.set(r, c, self.matrix.get(or, map(c)));
            }
        }
        Ok(Self { dims: new_dims, matrix: m })
    }
}

/// The two-qubit input state alpha|00> + beta|11> with beta = +sqrt(1 - alpha^2).
pub fn input_state(alpha: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    Ok(PureState::new_unchecked(
        vec![2, 2],
        vec![
            Complex64::new(alpha, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(beta, 0.0),
        ],
    ))
}

/// Reduced density operator over the kept subsystems (strictly
/// increasing index list); the kept order is preserved.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    check_keep(keep, rho.dims().len())?;
    let dims = rho.dims();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_offsets = subsystem_offsets(dims, keep);
    let traced_offsets = subsystem_offsets(dims, &traced);
    let k = keep_offsets.len();
    let mut m = ComplexMatrix::zeros(k, k);
    for (i, &oi) in keep_offsets.iter().enumerate() {
        for (j, &oj) in keep_offsets.iter().enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            for &ot in &traced_offsets {
                sum += rho.matrix().get(oi + ot, oj + ot);
            }
            m.set(i, j, sum);
        }
    }
    let new_dims = keep.iter().map(|&s| dims[s]).collect();
    Ok(DensityOperator::from_parts_unchecked(new_dims, m))
}

/// Partial transpose over the second qubit of a two-qubit operator:
/// out[2m + mu][2n + nu] = rho[2m + nu][2n + mu].
///
/// Only dims [2, 2] are accepted; that is the case where positivity of
/// the result decides separability exactly.
pub fn partial_transpose(rho: &DensityOperator) -> Result<ComplexMatrix> {
    if rho.dims() != [2, 2] {
        return Err(Error::NotTwoQubits(rho.dims().to_vec()));
    }
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(4, 4);
    for m in 0..2 {
        for mu in 0..2 {
            for n in 0..2 {
                for nu in 0..2 {
                    out.set(2 * m + mu, 2 * n + nu, src.get(2 * m + nu, 2 * n + mu));
                }
            }
        }
    }
    Ok(out)
}

/// Partial transpose on a raw 4x4 matrix (same index convention).
pub(crate) fn partial_transpose_matrix(src: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for m in 0..2 {
        for mu in 0..2 {
            for n in 0..2 {
                for nu in 0..2 {
                    out.set(2 * m + mu, 2 * n + nu, src.get(2 * m + nu, 2 * n + mu));
                }
            }
        }
    }
    out
}
