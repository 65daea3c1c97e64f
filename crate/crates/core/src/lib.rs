//! shadowlab-core: exact arithmetic for finite-window shadowing questions
//! over group actions.
//!
//! The library answers one question in several guises: given a noisy orbit
//! indexed by a ball in a finitely generated group, is there a single point
//! whose exact orbit stays uniformly close to it? Everything is decided in
//! rational arithmetic, so verdicts come with checkable witnesses or
//! infeasibility certificates rather than floating-point confidence.
//!
//! Module map:
//! - [`group`]: normal forms, balls, word norms, generating-set comparison.
//! - [`action`]: rational matrix actions and the auxiliary BS(1,n) action.
//! - [`pseudo`]: pseudotrajectory constructions, defect measurement, TSV io.
//! - [`solver`]: feasibility of the shadowing constraint system, grid oracle,
//!   fiberwise boxes, coherence checks.
//! - [`numeric`]: rational scalars and directed-rounding interval routines.

pub mod action;
pub mod group;
pub mod numeric;
pub mod pseudo;
pub mod solver;
