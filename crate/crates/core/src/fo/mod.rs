//! First-order logic over `{R}` or `{S, P}` with hub constants.

mod ef;
mod eval;
mod syntax;
mod translate;

pub use ef::{ef_equivalent, ef_equivalent_capped, DEFAULT_MAX_ROUNDS};
pub use eval::{eval, eval_at, eval_with, Assignment, EvalLimits, UnaryInterp, DEFAULT_MAX_COST};
pub use syntax::{parse_fo, parse_fo_for, phi_star, FoFormula, Pred, Term};
pub use translate::{sharp_translate, standard_translation};
