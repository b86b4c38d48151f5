//! Ultrafilter extensions of relational structures at desk scale.
//!
//! Finite structures are handled exactly: every ultrafilter over a finite
//! universe is principal, and the set-family definitions are evaluated by
//! literal subset enumeration. Countable almost-bounded structures are handled
//! through [`presentation::Presentation`]s, finite descriptions built from hubs
//! and repeated pattern blocks, whose ultrafilter extension is again a
//! presentation.
//!
//! The modal and first-order layers provide model checking, frame validity,
//! correspondence testing, bisimulation and Ehrenfeucht–Fraïssé games over
//! the finite structures produced here.

pub mod card;
pub mod canon;
pub mod error;
pub mod fo;
pub mod modal;
pub mod neighborhood;
pub mod nodeset;
pub mod presentation;
pub mod structure;
pub mod symbolic;
pub mod ultrafilter;

mod lex;

pub use card::Card;
pub use error::{Error, Result};
pub use nodeset::{NodeId, NodeSet, Relation};
pub use presentation::Presentation;
pub use structure::{Road, Structure};
