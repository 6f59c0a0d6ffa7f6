//! 2-primary algebraic and hermitian K-groups of rings of 2-integers in
//! totally real 2-regular number fields.
//!
//! Groups are tracked modulo odd torsion as [`FgAb2`] values. The
//! [`tables`] module evaluates the closed forms, [`fields`] decides which
//! fields they apply to, and [`verify`] cross-checks the tables against
//! each other through splittings and exact sequences.

pub mod abgroup;
pub mod adams;
pub mod error;
pub mod fields;
pub mod numtheory;
pub mod tables;
pub mod verify;

pub use abgroup::{direct_sum, exact_window_check, n_copies, ses_consistent, ExactWindow, FgAb2, GroupJson};
pub use error::{Error, Result};
pub use fields::{FieldInvariants, FieldSpec};
pub use tables::{Base, Eps, QueryContext, TableSet, TheoryTag};
pub use verify::CheckReport;
