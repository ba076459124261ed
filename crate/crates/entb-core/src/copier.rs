//! Quantum copiers as isometries.
//!
//! A copier is described by two real 4x4 amplitude tables C and D. The
//! image of |0> is `sum_{i,k} C[i][k] |R_i>|Z_k>` and the image of |1> is
//! the same sum over D, where |R_1..R_4> = |00>, |01>, |10>, |11> span
//! the original+copy pair and |Z_1..Z_4> span a four-dimensional copier
//! ancilla. Unitarity of the underlying transformation requires both
//! images to be unit vectors and mutually orthogonal; that is exactly
//! the invariant enforced here.
//!
//! The distinguished instance is the universal copying machine (UQCM),
//! which copies every pure input equally well.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qlinalg::{bures_distance, ComplexMatrix};
use crate::qstate::PureState;

/// Tolerance on the copier normalization and orthogonality invariants.
pub const SPEC_TOLERANCE: f64 = 1e-12;

/// Real amplitude tables of a copier.
///
/// `c[i][k]` weights |R_{i+1}>|Z_{k+1}> in the image of |0>, `d[i][k]`
/// likewise for |1> (tables are stored 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct CopierSpec {
    c: [[f64; 4]; 4],
    d: [[f64; 4]; 4],
}

impl CopierSpec {
    /// Build a spec, enforcing unit norms and orthogonality of the two
    /// images within 1e-12.
    pub fn new(c: [[f64; 4]; 4], d: [[f64; 4]; 4]) -> Result<Self> {
        let (norm_c, norm_d, ortho) = table_residuals(&c, &d);
        if norm_c.abs() > SPEC_TOLERANCE {
            return Err(Error::InvalidSpec(format!(
                "C table norm deviates from 1 by {norm_c:.3e}"
            )));
        }
        if norm_d.abs() > SPEC_TOLERANCE {
            return Err(Error::InvalidSpec(format!(
                "D table norm deviates from 1 by {norm_d:.3e}"
            )));
        }
        if ortho.abs() > SPEC_TOLERANCE {
            return Err(Error::InvalidSpec(format!(
                "images of |0> and |1> are not orthogonal (inner product {ortho:.3e})"
            )));
        }
        Ok(Self { c, d })
    }

    pub fn c(&self) -> &[[f64; 4]; 4] {
        &self.c
    }

    pub fn d(&self) -> &[[f64; 4]; 4] {
        &self.d
    }

    /// Flatten to the 32-vector (C row-major, then D row-major) used by
    /// the feasibility search.
    pub fn to_flat(&self) -> [f64; 32] {
        let mut flat = [0.0; 32];
        for i in 0..4 {
            for k in 0..4 {
                flat[4 * i + k] = self.c[i][k];
                flat[16 + 4 * i + k] = self.d[i][k];
            }
        }
        flat
    }

    /// Rebuild from the flat 32-vector layout, validating the invariants.
    pub fn from_flat(flat: &[f64; 32]) -> Result<Self> {
        let (c, d) = split_flat(flat);
        Self::new(c, d)
    }

    /// Diagnostic: whether the tables also satisfy the alternative
    /// row-wise convention (every row of C and of D individually
    /// unit-norm, and every row-wise C.D product equal to 1). The UQCM
    /// does not; the flag is reported rather than interpreted.
    pub fn satisfies_row_form(&self, tol: f64) -> bool {
        for i in 0..4 {
            let nc: f64 = self.c[i].iter().map(|x| x * x).sum();
            let nd: f64 = self.d[i].iter().map(|x| x * x).sum();
            let cd: f64 = self.c[i].iter().zip(&self.d[i]).map(|(x, y)| x * y).sum();
            if (nc - 1.0).abs() > tol || (nd - 1.0).abs() > tol || (cd - 1.0).abs() > tol {
                return false;
            }
        }
        true
    }

    /// Serialize as a flat text map, one `C[i][k] = value` line per
    /// entry (1-based indices, 17 significant digits).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, table) in [("C", &self.c), ("D", &self.d)] {
            for i in 0..4 {
                for k in 0..4 {
                    out.push_str(&format!("{}[{}][{}] = {:.16e}\n", name, i + 1, k + 1, table[i][k]));
                }
            }
        }
        out
    }

    /// Parse the flat text map format. Blank lines and `#` comments are
    /// skipped; missing keys default to zero; duplicate keys are errors.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = [[0.0; 4]; 4];
        let mut d = [[0.0; 4]; 4];
        let mut seen = [[false; 16]; 2];
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: &str| Error::SpecParse { line: line_no + 1, msg: msg.to_string() };
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err("expected `KEY = VALUE`"))?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| parse_err("unparsable value"))?;
            let (table, rest) = match key.split_at_checked(1) {
                Some(("C", rest)) => (0usize, rest),
                Some(("D", rest)) => (1usize, rest),
                _ => return Err(parse_err("key must start with C or D")),
            };
            let idx: Vec<usize> = rest
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split("][")
                .map(|s| s.parse::<usize>().map_err(|_| parse_err("bad index")))
                .collect::<Result<_>>()?;
            if idx.len() != 2 || !(1..=4).contains(&idx[0]) || !(1..=4).contains(&idx[1]) {
                return Err(parse_err("indices must be C[i][k] with i, k in 1..4"));
            }
            let (i, k) = (idx[0] - 1, idx[1] - 1);
            if seen[table][4 * i + k] {
                return Err(parse_err("duplicate key"));
            }
            seen[table][4 * i + k] = true;
            if table == 0 {
                c[i][k] = value;
            } else {
                d[i][k] = value;
            }
        }
        Self::new(c, d)
    }
}

pub(crate) fn split_flat(flat: &[f64; 32]) -> ([[f64; 4]; 4], [[f64; 4]; 4]) {
    let mut c = [[0.0; 4]; 4];
    let mut d = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            c[i][k] = flat[4 * i + k];
            d[i][k] = flat[16 + 4 * i + k];
        }
    }
    (c, d)
}

/// Residuals of the unitarity invariants: (sum C^2 - 1, sum D^2 - 1, sum C.D).
pub(crate) fn table_residuals(c: &[[f64; 4]; 4], d: &[[f64; 4]; 4]) -> (f64, f64, f64) {
    let mut norm_c = 0.0;
    let mut norm_d = 0.0;
    let mut ortho = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            norm_c += c[i][k] * c[i][k];
            norm_d += d[i][k] * d[i][k];
            ortho += c[i][k] * d[i][k];
        }
    }
    (norm_c - 1.0, norm_d - 1.0, ortho)
}

/// Project arbitrary tables onto the invariant set: C is normalized,
/// the C component is removed from D, and D is normalized.
///
/// Fails when either table is too close to zero (or D to a multiple of
/// C) for the projection to be meaningful.
pub fn orthonormalized_tables(c: [[f64; 4]; 4], d: [[f64; 4]; 4]) -> Result<CopierSpec> {
    let mut c = c;
    let mut d = d;
    let norm_c: f64 = c.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if norm_c < 1e-9 {
        return Err(Error::InvalidSpec("C table is numerically zero".to_string()));
    }
    for x in c.iter_mut().flatten() {
        *x /= norm_c;
    }
    let overlap: f64 = c
        .iter()
        .flatten()
        .zip(d.iter().flatten())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in c.iter().flatten().zip(d.iter_mut().flatten()) {
        *y -= overlap * x;
    }
    let norm_d: f64 = d.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if norm_d < 1e-9 {
        return Err(Error::InvalidSpec(
            "D table is numerically a multiple of C".to_string(),
        ));
    }
    for y in d.iter_mut().flatten() {
        *y /= norm_d;
    }
    CopierSpec::new(c, d)
}

/// Random valid spec for tests: Gaussian tables pushed through the
/// orthonormalizing projection.
#[cfg(test)]
pub(crate) fn random_valid_spec(rng: &mut ChaCha8Rng) -> CopierSpec {
    loop {
        let mut c = [[0.0; 4]; 4];
        let mut d = [[0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let (x, y) = normal_pair(rng);
                c[i][k] = x;
                d[i][k] = y;
            }
        }
        if let Ok(spec) = orthonormalized_tables(c, d) {
            return spec;
        }
    }
}

/// The universal copying machine.
///
/// |0> maps to sqrt(2/3)|00>|Z_1> + sqrt(1/6)(|01> + |10>)|Z_2>, and
/// |1> to the bit-flipped image with ancilla labels exchanged.
pub fn uqcm_spec() -> CopierSpec {
    let a = (2.0f64 / 3.0).sqrt();
    let b = (1.0f64 / 6.0).sqrt();
    let mut c = [[0.0; 4]; 4];
    let mut d = [[0.0; 4]; 4];
    c[0][0] = a; // |00>|Z1>
    c[1][1] = b; // |01>|Z2>
    c[2][1] = b; // |10>|Z2>
    d[3][1] = a; // |11>|Z2>
    d[1][0] = b; // |01>|Z1>
    d[2][0] = b; // |10>|Z1>
    CopierSpec::new(c, d).expect("UQCM tables satisfy the invariants")
}

/// The 16x2 isometry mapping the input qubit into the
/// (original, copy, ancilla) space with dims [2, 2, 4].
///
/// Column 0 is the image of |0>, column 1 the image of |1>; both are
/// unit columns and mutually orthogonal for every valid spec.
pub fn copier_isometry(spec: &CopierSpec) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(16, 2);
    for i in 0..4 {
        for k in 0..4 {
            let row = 4 * i + k; // (R index) * 4 + (Z index)
            m.set(row, 0, Complex64::new(spec.c[i][k], 0.0));
            m.set(row, 1, Complex64::new(spec.d[i][k], 0.0));
        }
    }
    m
}

/// Raw isometry columns for unvalidated tables; used by the search.
pub(crate) fn raw_columns(
    c: &[[f64; 4]; 4],
    d: &[[f64; 4]; 4],
) -> ([Complex64; 16], [Complex64; 16]) {
    let mut col0 = [Complex64::new(0.0, 0.0); 16];
    let mut col1 = [Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        for k in 0..4 {
            col0[4 * i + k] = Complex64::new(c[i][k], 0.0);
            col1[4 * i + k] = Complex64::new(d[i][k], 0.0);
        }
    }
    (col0, col1)
}

/// Apply a copier to one qubit subsystem of a pure state.
///
/// The target factor keeps its position; a copy qubit (dim 2) and the
/// copier ancilla (dim 4) are inserted immediately after it. The map is
/// an isometry, so the norm is preserved.
pub fn apply_local_copier(state: &PureState, target: usize, spec: &CopierSpec) -> Result<PureState> {
    let dims = state.dims();
    if target >= dims.len() {
        return Err(Error::InvalidSubsystem { index: target, count: dims.len() });
    }
    if dims[target] != 2 {
        return Err(Error::TargetNotQubit(dims[target]));
    }
    let (col0, col1) = raw_columns(&spec.c, &spec.d);
    apply_columns(state, target, &col0, &col1)
}

/// Shared isometry application over explicit columns.
pub(crate) fn apply_columns(
    state: &PureState,
    target: usize,
    col0: &[Complex64; 16],
    col1: &[Complex64; 16],
) -> Result<PureState> {
    let dims = state.dims();
    let suffix_len: usize = dims[target + 1..].iter().product();
    let block = 2 * suffix_len; // input span of (target, suffix)

    let mut new_dims = Vec::with_capacity(dims.len() + 2);
    new_dims.extend_from_slice(&dims[..=target]);
    new_dims.push(2);
    new_dims.push(4);
    new_dims.extend_from_slice(&dims[target + 1..]);

    let out_len = state.amplitudes().len() / 2 * 16;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (idx, &amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let prefix = idx / block;
        let tval = (idx / suffix_len) % 2;
        let suffix = idx % suffix_len;
        let column = if tval == 0 { col0 } else { col1 };
        let base = prefix * (16 * suffix_len) + suffix;
        for (r16, &w) in column.iter().enumerate() {
            out[base + r16 * suffix_len] += amp * w;
        }
    }
    Ok(PureState::new_unchecked(new_dims, out))
}

/// Aggregate quality statistics of a copier over seeded random inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CopierQualityReport {
    pub samples: usize,
    pub seed: u64,
    /// Largest Frobenius distance between the two single-clone outputs;
    /// zero means original and copy are always identical.
    pub copy_asymmetry_max: f64,
    /// Bures distance from a single clone to the ideal pure input.
    pub single_copy_distance_mean: f64,
    pub single_copy_distance_std: f64,
    /// Bures distance from the joint original+copy output to the ideal
    /// product of two input copies.
    pub joint_distance_mean: f64,
    pub joint_distance_std: f64,
    /// Smallest joint distance seen; strictly positive output is the
    /// operational statement that perfect broadcasting never happens.
    pub joint_distance_min: f64,
    /// Whether the tables also satisfy the row-wise convention; see
    /// `CopierSpec::satisfies_row_form`.
    pub satisfies_row_form: bool,
}

/// Haar-random qubit pure state: four standard normals, normalized.
pub(crate) fn haar_qubit(rng: &mut ChaCha8Rng) -> PureState {
    let (x0, y0) = normal_pair(rng);
    let (x1, y1) = normal_pair(rng);
    let mut amps = vec![Complex64::new(x0, y0), Complex64::new(x1, y1)];
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    PureState::new_unchecked(vec![2], amps)
}

/// Box-Muller pair of standard normals.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Evaluate the copier-quality conditions over `samples` seeded
/// Haar-random pure inputs:
/// (i) original and copy clones are identical,
/// (ii) the clone-to-ideal Bures distance is input independent,
/// (iii) the joint-output-to-ideal-product Bures distance is input
/// independent and strictly positive.
///
/// Identical seeds produce bit-identical reports.
pub fn copier_quality_report(
    spec: &CopierSpec,
    samples: usize,
    seed: u64,
) -> Result<CopierQualityReport> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut asymmetry_max = 0.0f64;
    let mut single = Vec::with_capacity(samples);
    let mut joint = Vec::with_capacity(samples);
    for _ in 0..samples {
        let psi = haar_qubit(&mut rng);
        let ideal = psi.to_density();
        let out = apply_local_copier(&psi, 0, spec)?;
        let rho_ab = out.reduced_density(&[0, 1])?;
        let rho_a = out.reduced_density(&[0])?;
        let rho_b = out.reduced_density(&[1])?;

        let asym = rho_a.matrix().sub(rho_b.matrix()).frobenius_norm();
        asymmetry_max = asymmetry_max.max(asym);
        single.push(bures_distance(&rho_a, &ideal)?);
        joint.push(bures_distance(&rho_ab, &ideal.tensor(&ideal))?);
    }
    let (single_mean, single_std) = mean_std(&single);
    let (joint_mean, joint_std) = mean_std(&joint);
    let joint_min = joint.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CopierQualityReport {
        samples,
        seed,
        copy_asymmetry_max: asymmetry_max,
        single_copy_distance_mean: single_mean,
        single_copy_distance_std: single_std,
        joint_distance_mean: joint_mean,
        joint_distance_std: joint_std,
        joint_distance_min: joint_min,
        satisfies_row_form: spec.satisfies_row_form(SPEC_TOLERANCE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::PureState;
    use rand::Rng;

    const SQRT_2_3: f64 = 0.816496580927726;
    const SQRT_1_6: f64 = 0.408248290463863;

    #[test]
    fn uqcm_tables_match_known_amplitudes() {
        let spec = uqcm_spec();
        assert!((spec.c()[0][0] - SQRT_2_3).abs() < 1e-15);
        assert!((spec.c()[1][1] - SQRT_1_6).abs() < 1e-15);
        assert!((spec.c()[2][1] - SQRT_1_6).abs() < 1e-15);
        assert!((spec.d()[3][1] - SQRT_2_3).abs() < 1e-15);
        assert!((spec.d()[1][0] - SQRT_1_6).abs() < 1e-15);
        assert!((spec.d()[2][0] - SQRT_1_6).abs() < 1e-15);

        let (nc, nd, ortho) = table_residuals(spec.c(), spec.d());
        assert!(nc.abs() < 1e-15);
        assert!(nd.abs() < 1e-15);
        // no cell is nonzero in both tables, so the sum is exactly zero
        assert_eq!(ortho, 0.0);
        assert!(!spec.satisfies_row_form(1e-12));
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let mut c = [[0.0; 4]; 4];
        c[0][0] = 1.1; // wrong norm
        let mut d = [[0.0; 4]; 4];
        d[3][3] = 1.0;
        assert!(matches!(CopierSpec::new(c, d), Err(Error::InvalidSpec(_))));

        let mut c = [[0.0; 4]; 4];
        c[0][0] = 1.0;
        let mut d = [[0.0; 4]; 4];
        d[0][0] = 1.0; // parallel to C
        assert!(matches!(CopierSpec::new(c, d), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn isometry_columns_are_orthonormal() {
        let spec = uqcm_spec();
        let v = copier_isometry(&spec);
        assert_eq!((v.rows(), v.cols()), (16, 2));
        assert!((v.get(0, 0).re - SQRT_2_3).abs() < 1e-15);
        let gram = v.adjoint().matmul(&v);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn isometry_columns_are_orthonormal_for_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..5 {
            let v = copier_isometry(&random_valid_spec(&mut rng));
            let gram = v.adjoint().matmul(&v);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn zero_input_expands_as_expected() {
        let spec = uqcm_spec();
        let zero = PureState::basis_state(vec![2], 0).unwrap();
        let out = apply_local_copier(&zero, 0, &spec).unwrap();
        assert_eq!(out.dims(), &[2, 2, 4]);
        // sqrt(2/3)|00>|Z1> + sqrt(1/6)|01>|Z2> + sqrt(1/6)|10>|Z2>
        assert!((out.amplitudes()[0].re - SQRT_2_3).abs() < 1e-15);
        assert!((out.amplitudes()[5].re - SQRT_1_6).abs() < 1e-15);
        assert!((out.amplitudes()[9].re - SQRT_1_6).abs() < 1e-15);
        let nonzero: usize = out.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn copier_preserves_norm() {
        let spec = uqcm_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let psi = haar_qubit(&mut rng);
            let out = apply_local_copier(&psi, 0, &spec).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clone_of_basis_state_reduces_to_known_mixture() {
        // Oracle: the single-clone output for |0> is
        // (2/3)|0><0| + (1/6)I = diag(5/6, 1/6).
        let spec = uqcm_spec();
        let zero = PureState::basis_state(vec![2], 0).unwrap();
        let out = apply_local_copier(&zero, 0, &spec).unwrap();
        let rho_a = out.reduced_density(&[0]).unwrap();
        let expected = ComplexMatrix::diagonal(&[5.0 / 6.0, 1.0 / 6.0]);
        assert!(rho_a.matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn copier_commutes_with_relabeling_of_untouched_factors() {
        let spec = uqcm_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = haar_qubit(&mut rng);
        let b = {
            // a random dim-3 bystander factor
            let mut amps: Vec<Complex64> = (0..3)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm: f64 = amps.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut amps {
                *x /= norm;
            }
            PureState::new(vec![3], amps).unwrap()
        };
        let left = apply_local_copier(&a.tensor(&b), 0, &spec).unwrap();
        let right = apply_local_copier(&b.tensor(&a), 1, &spec).unwrap();
        // right has dims [3, 2, 2, 4]; bring the bystander to the end
        let right = right.permute_subsystems(&[1, 2, 3, 0]).unwrap();
        assert_eq!(left.dims(), right.dims());
        for (x, y) in left.amplitudes().iter().zip(right.amplitudes()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn copier_rejects_bad_targets() {
        let spec = uqcm_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let psi = haar_qubit(&mut rng);
        assert!(matches!(
            apply_local_copier(&psi, 1, &spec),
            Err(Error::InvalidSubsystem { .. })
        ));
        let trit = PureState::basis_state(vec![3], 0).unwrap();
        assert!(matches!(
            apply_local_copier(&trit, 0, &spec),
            Err(Error::TargetNotQubit(3))
        ));
    }

    #[test]
    fn quality_report_for_uqcm() {
        let report = copier_quality_report(&uqcm_spec(), 100, 2024).unwrap();
        assert!(report.copy_asymmetry_max <= 1e-12);
        assert!(report.single_copy_distance_std <= 1e-10);
        assert!(report.joint_distance_std <= 1e-10);
        // single-clone distance oracle: d_B(diag(5/6,1/6), diag(1,0))
        let oracle = (2.0 * (1.0 - (5.0f64 / 6.0).sqrt())).sqrt();
        assert!((report.single_copy_distance_mean - oracle).abs() < 1e-9);
        assert!(report.joint_distance_min > 0.1);
        assert!(!report.satisfies_row_form);
    }

    #[test]
    fn quality_report_is_deterministic_per_seed() {
        let spec = uqcm_spec();
        let a = copier_quality_report(&spec, 25, 7).unwrap();
        let b = copier_quality_report(&spec, 25, 7).unwrap();
        assert_eq!(a, b);
        let c = copier_quality_report(&spec, 25, 8).unwrap();
        assert_ne!(a.seed, c.seed);
    }

    #[test]
    fn quality_report_needs_two_samples() {
        assert!(matches!(
            copier_quality_report(&uqcm_spec(), 1, 0),
            Err(Error::TooFewSamples(1))
        ));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let spec = uqcm_spec();
        let text = spec.to_text();
        let back = CopierSpec::from_text(&text).unwrap();
        assert_eq!(spec, back);
        // comments and blank lines are tolerated
        let annotated = format!("# universal copier\n\n{text}");
        assert_eq!(CopierSpec::from_text(&annotated).unwrap(), spec);
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!(
            CopierSpec::from_text("C[1][1] 0.5"),
            Err(Error::SpecParse { .. })
        ));
        assert!(matches!(
            CopierSpec::from_text("E[1][1] = 0.5"),
            Err(Error::SpecParse { .. })
        ));
        assert!(matches!(
            CopierSpec::from_text("C[5][1] = 0.5"),
            Err(Error::SpecParse { .. })
        ));
        assert!(matches!(
            CopierSpec::from_text("C[1][1] = 0.5\nC[1][1] = 0.5"),
            Err(Error::SpecParse { .. })
        ));
        // parses but violates the norm invariant
        assert!(matches!(
            CopierSpec::from_text("C[1][1] = 0.5"),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn flat_round_trip() {
        let spec = uqcm_spec();
        let flat = spec.to_flat();
        assert_eq!(CopierSpec::from_flat(&flat).unwrap(), spec);
    }
}
