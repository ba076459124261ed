//! The end-to-end broadcasting protocol.
//!
//! A two-qubit input alpha|00> + beta|11> is shared between sides I and
//! II; each side runs its half through the same local copier. The six
//! output factors are ordered (aI, bI, xI, aII, bII, xII); tracing the
//! two ancillas leaves the four-qubit operator on (aI, bI, aII, bII)
//! whose pair reductions carry the whole story: the locally produced
//! pairs aI-bI / aII-bII, and the spatially separated pairs aI-bII /
//! aII-bI.
//!
//! Besides the numeric pipeline this module carries the closed forms of
//! the two pair reductions for the UQCM, the window solver locating the
//! alpha^2 ranges where each pair is inseparable, the linear extension
//! of the pipeline to separable mixture inputs, and the real amplitude
//! tables from which the pair matrices follow for a general copier.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::copier::{apply_local_copier, CopierSpec};
use crate::error::{Error, Result};
use crate::qlinalg::{hermitian_eig, ComplexMatrix};
use crate::qstate::{
    input_state, partial_trace, partial_transpose_matrix, DensityOperator, PureState,
};
use crate::separability::{
    is_separable_with_tolerance, min_pt_eigenvalue_of, SeparabilityReport, Verdict,
    DEFAULT_VERDICT_TOLERANCE,
};

/// Labels for the four two-qubit reductions of the four-party output.
/// The first letter names the original-side qubit, the second the copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairLabel {
    /// aI with bI: produced locally on side I.
    AiBi,
    /// aII with bII: produced locally on side II.
    AiiBii,
    /// aI with bII: spatially separated.
    AiBii,
    /// aII with bI: spatially separated.
    AiiBi,
}

impl PairLabel {
    pub const ALL: [PairLabel; 4] = [
        PairLabel::AiBi,
        PairLabel::AiiBii,
        PairLabel::AiBii,
        PairLabel::AiiBi,
    ];

    /// True for the pairs produced by a single copier.
    pub fn is_local(self) -> bool {
        matches!(self, PairLabel::AiBi | PairLabel::AiiBii)
    }
}

impl std::fmt::Display for PairLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PairLabel::AiBi => "aI-bI",
            PairLabel::AiiBii => "aII-bII",
            PairLabel::AiBii => "aI-bII",
            PairLabel::AiiBi => "aII-bI",
        };
        write!(f, "{s}")
    }
}

/// Which family of pair reductions a window query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Local,
    Nonlocal,
}

/// Full output of one broadcast run.
#[derive(Debug, Clone)]
pub struct BroadcastOutcome {
    /// Four-qubit output operator on dims [2, 2, 2, 2], ordered
    /// (aI, bI, aII, bII).
    pub rho_out_4: DensityOperator,
    /// Two-qubit reductions, each ordered (original qubit, copy qubit).
    pub pair_reductions: BTreeMap<PairLabel, DensityOperator>,
    pub reports: BTreeMap<PairLabel, SeparabilityReport>,
}

impl BroadcastOutcome {
    /// The broadcasting condition: both nonlocal pairs inseparable while
    /// both local pairs are separable.
    pub fn broadcasting_holds(&self) -> bool {
        PairLabel::ALL.iter().all(|&label| {
            let verdict = self.reports[&label].verdict;
            if label.is_local() {
                verdict == Verdict::Separable
            } else {
                verdict == Verdict::Inseparable
            }
        })
    }
}

/// Run both copiers on a two-qubit pure input; output factors are
/// (aI, bI, xI, aII, bII, xII).
fn broadcast_state(input: &PureState, spec: &CopierSpec) -> Result<PureState> {
    if input.dims() != [2, 2] {
        return Err(Error::NotTwoQubits(input.dims().to_vec()));
    }
    let after_first = apply_local_copier(input, 0, spec)?; // (aI, bI, xI, aII)
    apply_local_copier(&after_first, 3, spec) // (aI, bI, xI, aII, bII, xII)
}

/// Four-qubit output operator of the pure pipeline on (aI, bI, aII, bII).
fn four_party_output(input: &PureState, spec: &CopierSpec) -> Result<DensityOperator> {
    let six = broadcast_state(input, spec)?;
    six.reduced_density(&[0, 1, 3, 4])
}

fn outcome_from_rho4(rho4: DensityOperator, tolerance: f64) -> Result<BroadcastOutcome> {
    let mut pair_reductions = BTreeMap::new();
    pair_reductions.insert(PairLabel::AiBi, partial_trace(&rho4, &[0, 1])?);
    pair_reductions.insert(PairLabel::AiiBii, partial_trace(&rho4, &[2, 3])?);
    pair_reductions.insert(PairLabel::AiBii, partial_trace(&rho4, &[0, 3])?);
    // tracing leaves (bI, aII); swap to keep the original qubit first
    pair_reductions.insert(
        PairLabel::AiiBi,
        partial_trace(&rho4, &[1, 2])?.permute_subsystems(&[1, 0])?,
    );
    let mut reports = BTreeMap::new();
    for (&label, rho) in &pair_reductions {
        reports.insert(label, is_separable_with_tolerance(rho, tolerance)?);
    }
    Ok(BroadcastOutcome { rho_out_4: rho4, pair_reductions, reports })
}

/// Broadcast the entangled input alpha|00> + beta|11> through two
/// identical copiers, with the default verdict band.
pub fn broadcast_numeric(alpha: f64, spec: &CopierSpec) -> Result<BroadcastOutcome> {
    broadcast_numeric_with_tolerance(alpha, spec, DEFAULT_VERDICT_TOLERANCE)
}

/// Same as [`broadcast_numeric`] with an explicit verdict band.
pub fn broadcast_numeric_with_tolerance(
    alpha: f64,
    spec: &CopierSpec,
    tolerance: f64,
) -> Result<BroadcastOutcome> {
    let input = input_state(alpha)?;
    let rho4 = four_party_output(&input, spec)?;
    outcome_from_rho4(rho4, tolerance)
}

/// Closed form of the locally produced pair reduction for the UQCM:
/// (2 alpha^2 / 3)|00><00| + (1/3)|+><+| + (2 beta^2 / 3)|11><11|
/// with |+> = (|01> + |10>)/sqrt(2).
pub fn local_output_closed(alpha: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let alpha_sq = alpha * alpha;
    let beta_sq = 1.0 - alpha_sq;
    let mut m = ComplexMatrix::diagonal(&[
        2.0 * alpha_sq / 3.0,
        1.0 / 6.0,
        1.0 / 6.0,
        2.0 * beta_sq / 3.0,
    ]);
    m.set(1, 2, Complex64::new(1.0 / 6.0, 0.0));
    m.set(2, 1, Complex64::new(1.0 / 6.0, 0.0));
    DensityOperator::new(vec![2, 2], m)
}

/// Closed form of the spatially separated pair reduction for the UQCM:
/// diagonal ((24 alpha^2 + 1)/36, 5/36, 5/36, (24 beta^2 + 1)/36) plus
/// (4 alpha beta / 9)(|00><11| + |11><00|).
pub fn nonlocal_output_closed(alpha: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let alpha_sq = alpha * alpha;
    let beta_sq = 1.0 - alpha_sq;
    let beta = beta_sq.sqrt();
    let mut m = ComplexMatrix::diagonal(&[
        (24.0 * alpha_sq + 1.0) / 36.0,
        5.0 / 36.0,
        5.0 / 36.0,
        (24.0 * beta_sq + 1.0) / 36.0,
    ]);
    let corner = Complex64::new(4.0 * alpha * beta / 9.0, 0.0);
    m.set(0, 3, corner);
    m.set(3, 0, corner);
    DensityOperator::new(vec![2, 2], m)
}

/// Minimum partial-transpose eigenvalue of one pair reduction at a
/// given alpha^2, evaluated through the numeric pipeline.
pub fn pair_min_pt_eigenvalue(alpha_sq: f64, spec: &CopierSpec, pair: PairClass) -> Result<f64> {
    let input = input_state(alpha_sq.sqrt())?;
    let six = broadcast_state(&input, spec)?;
    // factor indices in (aI, bI, xI, aII, bII, xII)
    let keep: [usize; 2] = match pair {
        PairClass::Local => [0, 1],    // (aI, bI)
        PairClass::Nonlocal => [0, 4], // (aI, bII)
    };
    let rho = six.reduced_density(&keep)?;
    min_pt_eigenvalue_of(&partial_transpose_matrix(rho.matrix()))
}

/// Result of a window solve over alpha^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowResult {
    /// Sign-change points of the minimum partial-transpose eigenvalue,
    /// symmetric about 1/2. For the nonlocal pair the eigenvalue is
    /// negative (inseparable) inside the window; for the local pair it
    /// is negative outside, so the window is the separable range.
    Window { alpha_sq_low: f64, alpha_sq_high: f64 },
    /// The eigenvalue never changes sign on the scan grid; the window
    /// is empty or covers all of [0, 1].
    NoSignChange { always_inseparable: bool },
}

const WINDOW_SCAN_POINTS: usize = 1001;
const WINDOW_BRACKET_TOLERANCE: f64 = 1e-10;

/// Locate the alpha^2 window of the requested pair class by scanning
/// [0, 1/2] on a 1001-point grid and bisecting the single sign change of
/// the minimum partial-transpose eigenvalue down to a 1e-10 bracket.
///
/// More than one sign change on the scan grid is an error; none at all
/// yields the tagged degenerate result.
pub fn separability_window(pair: PairClass, spec: &CopierSpec) -> Result<WindowResult> {
    let grid_x = |i: usize| 0.5 * i as f64 / (WINDOW_SCAN_POINTS - 1) as f64;
    let mut values = Vec::with_capacity(WINDOW_SCAN_POINTS);
    for i in 0..WINDOW_SCAN_POINTS {
        values.push(pair_min_pt_eigenvalue(grid_x(i), spec, pair)?);
    }
    let negative = |v: f64| v < 0.0;
    let changes: Vec<usize> = (0..WINDOW_SCAN_POINTS - 1)
        .filter(|&i| negative(values[i]) != negative(values[i + 1]))
        .collect();
    match changes.len() {
        0 => Ok(WindowResult::NoSignChange { always_inseparable: negative(values[0]) }),
        1 => {
            let i = changes[0];
            let mut lo = grid_x(i);
            let mut hi = grid_x(i + 1);
            let lo_negative = negative(values[i]);
            while hi - lo > WINDOW_BRACKET_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if negative(pair_min_pt_eigenvalue(mid, spec, pair)?) == lo_negative {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            Ok(WindowResult::Window { alpha_sq_low: root, alpha_sq_high: 1.0 - root })
        }
        n => Err(Error::MultipleSignChanges(n)),
    }
}

/// Broadcast a separable mixture input sum_i w_i rhoA_i (x) rhoB_i.
///
/// The copier map is linear on density operators, so the pipeline runs
/// over the pure product branches of each term (eigendecomposition of
/// each single-qubit factor) and the four-party outputs are mixed with
/// the matching weights.
pub fn broadcast_separable(
    mixture: &[(f64, DensityOperator, DensityOperator)],
    spec: &CopierSpec,
) -> Result<BroadcastOutcome> {
    broadcast_separable_with_tolerance(mixture, spec, DEFAULT_VERDICT_TOLERANCE)
}

/// Same as [`broadcast_separable`] with an explicit verdict band.
pub fn broadcast_separable_with_tolerance(
    mixture: &[(f64, DensityOperator, DensityOperator)],
    spec: &CopierSpec,
    tolerance: f64,
) -> Result<BroadcastOutcome> {
    let weight_sum: f64 = mixture.iter().map(|(w, _, _)| w).sum();
    if mixture.is_empty() || mixture.iter().any(|(w, _, _)| *w < 0.0) || (weight_sum - 1.0).abs() > 1e-12
    {
        return Err(Error::BadWeights(weight_sum));
    }
    let mut acc = ComplexMatrix::zeros(16, 16);
    for (weight, rho_a, rho_b) in mixture {
        if rho_a.dims() != [2] || rho_b.dims() != [2] {
            return Err(Error::InvalidDensity(
                "mixture factors must be single-qubit operators".to_string(),
            ));
        }
        for (branch_weight, branch) in pure_product_branches(rho_a, rho_b)? {
            let share = weight * branch_weight;
            if share <= 1e-15 {
                continue;
            }
            let rho4 = four_party_output(&branch, spec)?;
            acc = acc.add(&rho4.matrix().scale(Complex64::new(share, 0.0)));
        }
    }
    let rho4 = DensityOperator::from_parts_unchecked(vec![2, 2, 2, 2], acc);
    outcome_from_rho4(rho4, tolerance)
}

/// Decompose rhoA (x) rhoB into at most four weighted pure product states.
fn pure_product_branches(
    rho_a: &DensityOperator,
    rho_b: &DensityOperator,
) -> Result<Vec<(f64, PureState)>> {
    let eig_a = hermitian_eig(rho_a.matrix())?;
    let eig_b = hermitian_eig(rho_b.matrix())?;
    let column = |eig: &crate::qlinalg::EigResult, k: usize| {
        let v = &eig.eigenvectors;
        PureState::new_unchecked(vec![2], vec![v.get(0, k), v.get(1, k)])
    };
    let mut branches = Vec::with_capacity(4);
    for (j, &p) in eig_a.eigenvalues.iter().enumerate() {
        for (k, &q) in eig_b.eigenvalues.iter().enumerate() {
            let weight = p.max(0.0) * q.max(0.0);
            if weight > 0.0 {
                branches.push((weight, column(&eig_a, j).tensor(&column(&eig_b, k))));
            }
        }
    }
    Ok(branches)
}

/// The joint output amplitude table of two identical copiers acting on
/// alpha|00> + beta|11>:
/// `joint[i][j][k][l] = alpha C[i][k] C[j][l] + beta D[i][k] D[j][l]`,
/// where i, j index the pair bases of sides I and II and k, l the two
/// ancilla bases (all 0-based here).
pub type JointTable = [[[[f64; 4]; 4]; 4]; 4];

/// Closed-form tables for a general real-amplitude copier.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTables {
    pub joint: JointTable,
    /// Local pair matrix on the (aI, bI) basis,
    /// `sum_k alpha^2 C[i][k] C[j][k] + beta^2 D[i][k] D[j][k]`; valid for
    /// tables satisfying the normalization and orthogonality invariants.
    pub local_pair: [[f64; 4]; 4],
    /// Nonlocal pair matrix on the (aI, bII) basis, contracted from the
    /// four-party form of the joint table; valid for arbitrary tables.
    pub nonlocal_pair: [[f64; 4]; 4],
}

pub(crate) fn joint_table(alpha: f64, beta: f64, c: &[[f64; 4]; 4], d: &[[f64; 4]; 4]) -> JointTable {
    let mut joint = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    joint[i][j][k][l] = alpha * c[i][k] * c[j][l] + beta * d[i][k] * d[j][l];
                }
            }
        }
    }
    joint
}

/// The four-party output operator as a real 16x16 matrix on the
/// (aI, bI, aII, bII) basis, row index 4*i + j over the two pair bases.
pub(crate) fn four_party_from_joint(joint: &JointTable) -> [[f64; 16]; 16] {
    let mut m = [[0.0; 16]; 16];
    for i in 0..4 {
        for j in 0..4 {
            for i2 in 0..4 {
                for j2 in 0..4 {
                    let mut sum = 0.0;
                    for k in 0..4 {
                        for l in 0..4 {
                            sum += joint[i][j][k][l] * joint[i2][j2][k][l];
                        }
                    }
                    m[4 * i + j][4 * i2 + j2] = sum;
                }
            }
        }
    }
    m
}

/// Local pair reduction (aI, bI) of the real four-party matrix.
pub(crate) fn local_from_four_party(m: &[[f64; 16]; 16]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for i2 in 0..4 {
            let mut sum = 0.0;
            for j in 0..4 {
                sum += m[4 * i + j][4 * i2 + j];
            }
            out[i][i2] = sum;
        }
    }
    out
}

/// Nonlocal pair reduction (aI, bII) of the real four-party matrix.
pub(crate) fn nonlocal_from_four_party(m: &[[f64; 16]; 16]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for a in 0..2 {
        for t in 0..2 {
            for a2 in 0..2 {
                for t2 in 0..2 {
                    let mut sum = 0.0;
                    for b in 0..2 {
                        for aii in 0..2 {
                            sum += m[8 * a + 4 * b + 2 * aii + t][8 * a2 + 4 * b + 2 * aii + t2];
                        }
                    }
                    out[2 * a + t][2 * a2 + t2] = sum;
                }
            }
        }
    }
    out
}

/// Build the closed-form tables for a copier at the given alpha.
pub fn amplitude_tables(alpha: f64, spec: &CopierSpec) -> Result<AmplitudeTables> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    let (c, d) = (spec.c(), spec.d());
    let joint = joint_table(alpha, beta, c, d);
    let alpha_sq = alpha * alpha;
    let beta_sq = 1.0 - alpha_sq;
    let mut local_pair = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut sum = 0.0;
            for k in 0..4 {
                sum += alpha_sq * c[i][k] * c[j][k] + beta_sq * d[i][k] * d[j][k];
            }
            local_pair[i][j] = sum;
        }
    }
    let nonlocal_pair = nonlocal_from_four_party(&four_party_from_joint(&joint));
    Ok(AmplitudeTables { joint, local_pair, nonlocal_pair })
}

/// One entry of the tabulated-expansion cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabulationEntry {
    /// 1-based (row, col) position in the nonlocal pair matrix.
    pub row: usize,
    pub col: usize,
    /// Value from the four-party contraction.
    pub contracted: f64,
    /// Value from the explicit per-entry product-sum tabulation.
    pub tabulated: f64,
    pub agrees: bool,
}

/// Tolerance for the tabulation cross-check.
const TABULATION_TOLERANCE: f64 = 1e-10;

/// Product-sum tabulation of the ten independent nonlocal matrix
/// entries: each entry is sum_{kl} of four products of joint-table
/// slices, with factor indices 1-based.
///
/// The tabulation is retained as a redundant route for cross-checking
/// the contraction. It is transcribed as-is: the first product of the
/// (4,2) entry is inconsistent with the contraction for general tables
/// and is therefore reported, never asserted.
const NONLOCAL_TABULATION: [(usize, usize, [[usize; 4]; 4]); 10] = [
    (1, 1, [[1, 1, 1, 1], [2, 1, 2, 1], [1, 3, 1, 3], [2, 3, 2, 3]]),
    (2, 2, [[1, 2, 1, 2], [2, 2, 2, 2], [1, 4, 1, 4], [2, 4, 2, 4]]),
    (3, 3, [[3, 1, 3, 1], [4, 1, 4, 1], [3, 3, 3, 3], [4, 3, 4, 3]]),
    (4, 4, [[4, 2, 4, 2], [3, 2, 3, 2], [3, 4, 3, 4], [4, 4, 4, 4]]),
    (2, 1, [[2, 2, 2, 1], [1, 2, 1, 1], [1, 4, 1, 3], [2, 4, 2, 3]]),
    (3, 1, [[3, 1, 1, 1], [4, 1, 2, 1], [3, 3, 1, 3], [4, 3, 2, 3]]),
    (4, 1, [[3, 2, 1, 1], [4, 2, 2, 1], [3, 4, 1, 3], [4, 4, 2, 3]]),
    (3, 2, [[1, 2, 3, 1], [2, 2, 4, 1], [1, 4, 3, 3], [2, 4, 4, 3]]),
    // first product transcribed as printed; (3,1) here disagrees with
    // the contracted (3,2) factor for general tables
    (4, 2, [[1, 2, 3, 1], [2, 2, 4, 2], [1, 4, 3, 4], [2, 4, 4, 4]]),
    (3, 4, [[3, 1, 3, 2], [4, 1, 4, 2], [3, 3, 3, 4], [4, 3, 4, 4]]),
];

/// Cross-check the contracted nonlocal pair matrix against the explicit
/// product-sum tabulation, entry by entry.
pub fn nonlocal_tabulation_report(alpha: f64, spec: &CopierSpec) -> Result<Vec<TabulationEntry>> {
    let tables = amplitude_tables(alpha, spec)?;
    let joint = &tables.joint;
    let slice_dot = |i: usize, j: usize, i2: usize, j2: usize| -> f64 {
        let mut sum = 0.0;
        for k in 0..4 {
            for l in 0..4 {
                sum += joint[i - 1][j - 1][k][l] * joint[i2 - 1][j2 - 1][k][l];
            }
        }
        sum
    };
    Ok(NONLOCAL_TABULATION
        .iter()
        .map(|&(row, col, products)| {
            let tabulated: f64 = products
                .iter()
                .map(|&[i, j, i2, j2]| slice_dot(i, j, i2, j2))
                .sum();
            let contracted = tables.nonlocal_pair[row - 1][col - 1];
            TabulationEntry {
                row,
                col,
                contracted,
                tabulated,
                agrees: (contracted - tabulated).abs() <= TABULATION_TOLERANCE,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copier::{random_valid_spec, uqcm_spec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sqrt_half() -> f64 {
        0.5f64.sqrt()
    }

    /// Classical correlated copier: |0> -> |00>|Z1>, |1> -> |11>|Z2>.
    /// Every output of it on the entangled input is separable.
    fn classical_copier() -> CopierSpec {
        let mut c = [[0.0; 4]; 4];
        c[0][0] = 1.0;
        let mut d = [[0.0; 4]; 4];
        d[3][1] = 1.0;
        CopierSpec::new(c, d).unwrap()
    }

    #[test]
    fn symmetric_point_reports() {
        let outcome = broadcast_numeric(sqrt_half(), &uqcm_spec()).unwrap();
        let nonlocal = &outcome.reports[&PairLabel::AiBii];
        assert!((nonlocal.min_pt_eigenvalue + 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(nonlocal.verdict, Verdict::Inseparable);
        let local = &outcome.reports[&PairLabel::AiBi];
        assert_eq!(local.verdict, Verdict::Separable);
        assert!((local.min_pt_eigenvalue - 1.0 / 6.0).abs() < 1e-12);
        assert!(outcome.broadcasting_holds());
    }

    #[test]
    fn product_input_yields_separable_nonlocal_pairs() {
        let outcome = broadcast_numeric(1.0, &uqcm_spec()).unwrap();
        assert_eq!(outcome.reports[&PairLabel::AiBii].verdict, Verdict::Separable);
        assert_eq!(outcome.reports[&PairLabel::AiiBi].verdict, Verdict::Separable);
        assert!(!outcome.broadcasting_holds());
    }

    #[test]
    fn outcome_reductions_are_consistent_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for spec in [uqcm_spec(), random_valid_spec(&mut rng)] {
            let alpha = 0.7f64.sqrt();
            let outcome = broadcast_numeric(alpha, &spec).unwrap();
            // the stored four-party operator is a valid density operator
            DensityOperator::new(vec![2, 2, 2, 2], outcome.rho_out_4.matrix().clone()).unwrap();
            // stored reductions match re-tracing the four-party operator
            for (label, keep, perm) in [
                (PairLabel::AiBi, [0usize, 1], None),
                (PairLabel::AiiBii, [2, 3], None),
                (PairLabel::AiBii, [0, 3], None),
                (PairLabel::AiiBi, [1, 2], Some([1usize, 0])),
            ] {
                let mut again = partial_trace(&outcome.rho_out_4, &keep).unwrap();
                if let Some(perm) = perm {
                    again = again.permute_subsystems(&perm).unwrap();
                }
                assert!(
                    outcome.pair_reductions[&label].matrix().max_abs_diff(again.matrix()) < 1e-12,
                    "stored {label} reduction inconsistent"
                );
            }
            // identical copiers on a symmetric input: I and II mirror
            let local_diff = outcome.pair_reductions[&PairLabel::AiBi]
                .matrix()
                .max_abs_diff(outcome.pair_reductions[&PairLabel::AiiBii].matrix());
            let nonlocal_diff = outcome.pair_reductions[&PairLabel::AiBii]
                .matrix()
                .max_abs_diff(outcome.pair_reductions[&PairLabel::AiiBi].matrix());
            assert!(local_diff < 1e-12);
            assert!(nonlocal_diff < 1e-12);
        }
    }

    #[test]
    fn closed_forms_at_known_points() {
        // alpha = 1 local form: (2/3)|00><00| + (1/3)|+><+|
        let local = local_output_closed(1.0).unwrap();
        let mut expected = ComplexMatrix::diagonal(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 0.0]);
        expected.set(1, 2, Complex64::new(1.0 / 6.0, 0.0));
        expected.set(2, 1, Complex64::new(1.0 / 6.0, 0.0));
        assert!(local.matrix().max_abs_diff(&expected) < 1e-15);

        // alpha^2 = 1/2 nonlocal form: diag (13,5,5,13)/36, corners 2/9
        let nonlocal = nonlocal_output_closed(sqrt_half()).unwrap();
        assert!((nonlocal.matrix().get(0, 0).re - 13.0 / 36.0).abs() < 1e-15);
        assert!((nonlocal.matrix().get(1, 1).re - 5.0 / 36.0).abs() < 1e-15);
        assert!((nonlocal.matrix().get(0, 3).re - 2.0 / 9.0).abs() < 1e-15);

        for alpha in [0.0, 0.3, 0.9, 1.0] {
            assert!((local_output_closed(alpha).unwrap().matrix().trace().re - 1.0).abs() < 1e-14);
            assert!(
                (nonlocal_output_closed(alpha).unwrap().matrix().trace().re - 1.0).abs() < 1e-14
            );
        }
        assert!(local_output_closed(1.2).is_err());
        assert!(nonlocal_output_closed(-0.1).is_err());
    }

    #[test]
    fn closed_forms_match_numeric_pipeline() {
        let spec = uqcm_spec();
        let alpha = 0.3;
        let outcome = broadcast_numeric(alpha, &spec).unwrap();
        let local = local_output_closed(alpha).unwrap();
        let nonlocal = nonlocal_output_closed(alpha).unwrap();
        assert!(
            outcome.pair_reductions[&PairLabel::AiBi]
                .matrix()
                .max_abs_diff(local.matrix())
                < 1e-12
        );
        assert!(
            outcome.pair_reductions[&PairLabel::AiBii]
                .matrix()
                .max_abs_diff(nonlocal.matrix())
                < 1e-12
        );
    }

    #[test]
    fn uqcm_windows_match_analytic_bounds() {
        let spec = uqcm_spec();
        // nonlocal inseparability window: 1/2 +- sqrt(39)/16
        match separability_window(PairClass::Nonlocal, &spec).unwrap() {
            WindowResult::Window { alpha_sq_low, alpha_sq_high } => {
                assert!((alpha_sq_low - 0.1096876251001001).abs() < 1e-6);
                assert!((alpha_sq_high - 0.8903123748998999).abs() < 1e-6);
                assert!((alpha_sq_low + alpha_sq_high - 1.0).abs() < 1e-9);
            }
            other => panic!("expected a window, got {other:?}"),
        }
        // local separability window: 1/2 +- sqrt(48)/16
        match separability_window(PairClass::Local, &spec).unwrap() {
            WindowResult::Window { alpha_sq_low, alpha_sq_high } => {
                assert!((alpha_sq_low - 0.0669872981077807).abs() < 1e-6);
                assert!((alpha_sq_high - 0.9330127018922193).abs() < 1e-6);
                assert!((alpha_sq_low + alpha_sq_high - 1.0).abs() < 1e-9);
            }
            other => panic!("expected a window, got {other:?}"),
        }
    }

    #[test]
    fn classical_copier_has_no_nonlocal_window() {
        let result = separability_window(PairClass::Nonlocal, &classical_copier()).unwrap();
        assert_eq!(result, WindowResult::NoSignChange { always_inseparable: false });
    }

    #[test]
    fn pair_reductions_are_unit_trace_and_psd() {
        let spec = uqcm_spec();
        for i in 0..=10 {
            let alpha = (i as f64 / 10.0).sqrt();
            let outcome = broadcast_numeric(alpha, &spec).unwrap();
            for label in PairLabel::ALL {
                let rho = &outcome.pair_reductions[&label];
                assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
                let eig = crate::qlinalg::hermitian_eig(rho.matrix()).unwrap();
                assert!(eig.eigenvalues[0] >= -1e-10, "{label} at alpha^2 = {}", alpha * alpha);
            }
        }
    }

    #[test]
    fn windows_nest_on_coarse_grid() {
        let spec = uqcm_spec();
        for i in 0..=100 {
            let alpha_sq = i as f64 / 100.0;
            let nonlocal = pair_min_pt_eigenvalue(alpha_sq, &spec, PairClass::Nonlocal).unwrap();
            if nonlocal < -1e-10 {
                let local = pair_min_pt_eigenvalue(alpha_sq, &spec, PairClass::Local).unwrap();
                assert!(local > 1e-10, "local pair not separable at alpha^2 = {alpha_sq}");
            }
        }
    }

    #[test]
    fn separable_input_single_product_term() {
        let zero = PureState::basis_state(vec![2], 0).unwrap().to_density();
        let outcome =
            broadcast_separable(&[(1.0, zero.clone(), zero)], &uqcm_spec()).unwrap();
        assert_ne!(outcome.reports[&PairLabel::AiBii].verdict, Verdict::Inseparable);
        assert_ne!(outcome.reports[&PairLabel::AiiBi].verdict, Verdict::Inseparable);
    }

    #[test]
    fn separable_input_classical_mixture() {
        let zero = PureState::basis_state(vec![2], 0).unwrap().to_density();
        let one = PureState::basis_state(vec![2], 1).unwrap().to_density();
        let mixture = vec![(0.5, zero.clone(), zero), (0.5, one.clone(), one)];
        let outcome = broadcast_separable(&mixture, &uqcm_spec()).unwrap();
        assert_eq!(outcome.reports[&PairLabel::AiBii].verdict, Verdict::Separable);
    }

    #[test]
    fn separable_input_rejects_bad_weights() {
        let zero = PureState::basis_state(vec![2], 0).unwrap().to_density();
        let one = PureState::basis_state(vec![2], 1).unwrap().to_density();
        let mixture = vec![(0.5, zero.clone(), zero), (0.6, one.clone(), one)];
        assert!(matches!(
            broadcast_separable(&mixture, &uqcm_spec()),
            Err(Error::BadWeights(_))
        ));
    }

    #[test]
    fn random_separable_mixtures_never_turn_nonlocal_inseparable() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let spec = uqcm_spec();
        for _ in 0..50 {
            let mixture = random_separable_mixture(&mut rng);
            let outcome = broadcast_separable(&mixture, &spec).unwrap();
            for label in [PairLabel::AiBii, PairLabel::AiiBi] {
                let report = &outcome.reports[&label];
                assert_ne!(report.verdict, Verdict::Inseparable);
                assert!(report.min_pt_eigenvalue >= -1e-10);
            }
        }
    }

    pub(crate) fn random_qubit_density(rng: &mut ChaCha8Rng) -> DensityOperator {
        // uniform in the Bloch ball, kept slightly inside the surface
        let (x, y, z) = loop {
            let v = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let r2: f64 = v.0 * v.0 + v.1 * v.1 + v.2 * v.2;
            if r2 <= 1.0 {
                break (v.0 * 0.999, v.1 * 0.999, v.2 * 0.999);
            }
        };
        let m = ComplexMatrix::square(
            2,
            vec![
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        )
        .unwrap();
        DensityOperator::new(vec![2], m).unwrap()
    }

    pub(crate) fn random_separable_mixture(
        rng: &mut ChaCha8Rng,
    ) -> Vec<(f64, DensityOperator, DensityOperator)> {
        let k = rng.gen_range(1..=4);
        let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        weights
            .into_iter()
            .map(|w| (w, random_qubit_density(rng), random_qubit_density(rng)))
            .collect()
    }

    #[test]
    fn amplitude_tables_match_closed_forms_for_uqcm() {
        let spec = uqcm_spec();
        let alpha = sqrt_half();
        let tables = amplitude_tables(alpha, &spec).unwrap();
        let local = local_output_closed(alpha).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((tables.local_pair[i][j] - local.matrix().get(i, j).re).abs() < 1e-12);
            }
        }
        let diag = [13.0 / 36.0, 5.0 / 36.0, 5.0 / 36.0, 13.0 / 36.0];
        for (i, expected) in diag.into_iter().enumerate() {
            assert!((tables.nonlocal_pair[i][i] - expected).abs() < 1e-12);
        }
        assert!((tables.nonlocal_pair[0][3] - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn joint_table_at_alpha_zero_is_d_only() {
        let spec = uqcm_spec();
        let tables = amplitude_tables(0.0, &spec).unwrap();
        let d = spec.d();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        assert!((tables.joint[i][j][k][l] - d[i][k] * d[j][l]).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn tables_match_numeric_reductions_for_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..5 {
            let spec = random_valid_spec(&mut rng);
            let alpha = rng.gen_range(0.0..1.0f64);
            let tables = amplitude_tables(alpha, &spec).unwrap();
            let outcome = broadcast_numeric(alpha, &spec).unwrap();
            let local = &outcome.pair_reductions[&PairLabel::AiBi];
            let nonlocal = &outcome.pair_reductions[&PairLabel::AiBii];
            let mut trace = 0.0;
            for i in 0..4 {
                trace += tables.local_pair[i][i];
                for j in 0..4 {
                    assert!((tables.local_pair[i][j] - tables.local_pair[j][i]).abs() < 1e-13);
                    assert!((tables.local_pair[i][j] - local.matrix().get(i, j).re).abs() < 1e-12);
                    assert!(
                        (tables.nonlocal_pair[i][j] - nonlocal.matrix().get(i, j).re).abs()
                            < 1e-12
                    );
                }
            }
            assert!((trace - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tabulation_agrees_except_for_the_known_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let spec = random_valid_spec(&mut rng);
        let report = nonlocal_tabulation_report(0.6, &spec).unwrap();
        assert_eq!(report.len(), 10);
        for entry in &report {
            if (entry.row, entry.col) == (4, 2) {
                assert!(!entry.agrees, "the transcribed (4,2) product should disagree");
            } else {
                assert!(
                    entry.agrees,
                    "entry ({}, {}) disagrees: contracted {} vs tabulated {}",
                    entry.row, entry.col, entry.contracted, entry.tabulated
                );
            }
        }
        // the UQCM happens to zero the defective product, so everything agrees
        let report = nonlocal_tabulation_report(sqrt_half(), &uqcm_spec()).unwrap();
        assert!(report.iter().all(|e| e.agrees));
    }
}
