//! Modal logic over finite frames: syntax, truth, validity, the
//! correspondence harness, bisimulation, and pointwise validity criteria
//! for presentations.

mod bisim;
mod conditions;
mod criterion;
mod formulas;
mod semantics;
mod syntax;

pub use bisim::{is_bisimulation, largest_bisimulation, Bisimulation, Model};
pub use conditions::{
    correspondence_test, star_condition, star_condition_within, star_star_condition, CorrespondenceConfig,
    CorrespondenceReport, StarStarParts, Violation,
};
pub use criterion::{
    counterexample_frame, criterion_validity, family_k_check, Countermodel, CriterionVerdict, FamilyKCheck,
    FamilyKReport, PointRef,
};
pub use formulas::{alt_n, alt_or_phi, phi_formula};
pub use semantics::{
    check, frame_valid, local_counterexample, locally_valid_nodes, truth_set, FrameVerdict, Valuation,
    ValidityLimits, DEFAULT_MAX_VAL_BITS,
};
pub use syntax::{parse_modal, ModalFormula};
