//! Local broadcasting of two-qubit entanglement through quantum copiers.
//!
//! Two parties share an entangled pair of qubits and each runs their
//! half through a local quantum copier. This crate simulates that
//! protocol end to end: dense complex linear algebra sized for the
//! problem, states and reductions, partial-transpose separability
//! verdicts, the universal copying machine and the general real
//! amplitude copier family, closed forms and inseparability windows of
//! the pair outputs, and a penalty-based feasibility search over the
//! copier family.
//!
//! The interesting effect, and the reason the crate exists: for a range
//! of input entanglement the two spatially separated output pairs are
//! entangled while both locally produced pairs are separable, so purely
//! local operations split one entangled pair into two.

pub mod broadcast;
pub mod copier;
pub mod error;
pub mod qlinalg;
pub mod qstate;
pub mod search;
pub mod separability;

pub use broadcast::{
    amplitude_tables, broadcast_numeric, broadcast_numeric_with_tolerance, broadcast_separable,
    broadcast_separable_with_tolerance, local_output_closed, nonlocal_output_closed,
    nonlocal_tabulation_report, pair_min_pt_eigenvalue, separability_window, AmplitudeTables,
    BroadcastOutcome, PairClass, PairLabel, TabulationEntry, WindowResult,
};
pub use copier::{
    apply_local_copier, copier_isometry, copier_quality_report, orthonormalized_tables, uqcm_spec,
    CopierQualityReport, CopierSpec,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qlinalg::{
    bures_distance, bures_distance_matrices, hermitian_eig, sqrt_psd, tensor_product,
    ComplexMatrix, EigResult,
};
pub use qstate::{input_state, partial_trace, partial_transpose, DensityOperator, PureState};
pub use search::{
    feasibility_score, score_breakdown, search_copiers, FeasiblePoint, PenaltyWeights,
    ScoreBreakdown, SearchConfig, FEASIBLE_SCORE,
};
pub use separability::{
    is_separable, is_separable_with_tolerance, w_determinants, SeparabilityReport, Verdict,
    DEFAULT_VERDICT_TOLERANCE,
};
