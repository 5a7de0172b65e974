//! Tableau decision procedure for SHIQ knowledge bases with ABoxes.
//!
//! Terminologies are internalized into ABox assertions over a fresh
//! transitive universal role ([`reduction`]); the resulting ABox is decided
//! by building a completion forest with pairwise blocking and
//! depth-first search over nondeterministic rule choices ([`engine`]).
//! [`model`] holds independent semantic checkers used to validate verdicts.

pub mod batch;
pub mod corpus;
pub mod engine;
pub mod model;
pub mod parse;
pub mod reduction;
pub mod syntax;

pub use engine::{solve, EngineError, Outcome, SearchLimits, SolveOptions};
pub use reduction::{
    reduce_abox_consistency, reduce_concept_sat, reduce_subsumption, ReducedProblem,
};
pub use syntax::{Assertion, Concept, Gci, KnowledgeBase, Role, RoleBox};
