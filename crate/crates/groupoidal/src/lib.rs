//! Finite groupoids, fibrations between them, Haar systems, Fell bundles,
//! and the finite-dimensional section *-algebras they generate.
//!
//! The crate models everything with explicit finite tables and verifies the
//! structural identities it relies on — fibration criteria, induced Haar
//! systems, induced Fell bundles over the base of a fibration, and the
//! resulting decomposition of section algebras — either exactly over the
//! rationals (extended by roots of unity) or in floating point with
//! documented tolerances.
//!
//! Modules follow the pipeline:
//!
//! - [`groupoid`], [`functor`], [`iso`]: groupoid and functor data model,
//!   axiom validation, fibration/covering criteria, quotients, isomorphism
//!   search.
//! - [`construct`]: transformation, action, pullback, Čech,
//!   bitransformation, and linking groupoids.
//! - [`haar`]: Haar systems, induced Haar systems, quasi-invariant measures,
//!   modular functions.
//! - [`fell`]: Fell bundles, cocycle line bundles, central extensions.
//! - [`cstar`]: section algebras, regular representations, operator norms,
//!   block (Wedderburn) decomposition.
//! - [`iterated`]: the induced Fell bundle over the base of a fibration and
//!   the iterated-decomposition checks built on it.
//! - [`generators`]: seeded random instances for the property suites.

pub mod construct;
pub mod cstar;
pub mod error;
pub mod exec;
pub mod fell;
pub mod functor;
pub mod generators;
pub mod groupoid;
pub mod haar;
pub mod iso;
pub mod iterated;
pub mod linalg;
pub mod num;
pub mod report;

pub use error::{Error, Result};
pub use num::NumMode;
pub use report::ValidationReport;
