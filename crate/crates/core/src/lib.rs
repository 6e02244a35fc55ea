//! Reduced Collatz dynamics as exact, testable machinery.
//!
//! The combined transformation alphabet is I(x) = (3x+1)/2 on odd x and
//! O(x) = x/2 on even x. The reduced dynamics of x is its transformation
//! sequence down to the first value below x; these sequences correspond
//! one-to-one with residue classes mod 2^t, and the crate computes both
//! directions exactly, enumerates all patterns up to a length bound with
//! their dyadic coverage ratios, exports the partition-labeled forking
//! tree, and verifies convergence for single large integers and ranges.
//!
//! Arithmetic is exact throughout: an inline `u64` lane promotes to heap
//! big integers on overflow, and every ratio-line decision compares
//! integer powers of 2 and 3 rather than floats.

pub mod dynamics;
pub mod enumerate;
pub mod error;
pub mod form;
pub mod graph;
pub mod nat;
pub mod residue;
pub mod steps;
pub mod symbols;
pub mod verify;
pub mod word;

pub use dynamics::{
    apply, apply_primed, coefficient, dynam, is_matched, rd_one_convention, reduced_dynamics,
    replace, PrimedString, RdOutcome, StepCoefficient, Trajectory, DEFAULT_RD_BUDGET,
};
pub use enumerate::{
    coverage, enumerate_forms, enumerate_forms_threaded, forms_of_length, pattern_counts,
    verify_enumeration, CoverageRow, CoverageTable, EnumRecord,
};
pub use error::{Error, Result};
pub use form::{ceil_lambda, is_reduced_form, prefix_status, FormStatus, FormVerdict, LineStatus};
pub use graph::{build_graph, export_dot, export_json, DynNode, NodeKind};
pub use nat::Nat;
pub use residue::{
    class_with_dynamics, d2r, forking_point, parity_transition, partition_split, r2d,
    ForkOutcome, ParityTransition, ResidueClass, SplitChildren,
};
pub use steps::{classic_step, step_i, step_i_prime, step_o};
pub use symbols::{DynString, Symbol};
pub use verify::{
    classic_descent, verify_range, verify_to_one, verify_to_one_with_oracle, RangeConfig,
    RangeReport, VerifyReport, VerifySession, DEFAULT_RANGE_BUDGET, DEFAULT_VERIFY_BUDGET,
};

/// The inline lane of [`Nat`]; values at or below `SmallWord::MAX` stay
/// unboxed.
pub type SmallWord = u64;
/// The wide fixed-width lane used by range scans before promoting to
/// [`Nat`].
pub type WideWord = u128;
