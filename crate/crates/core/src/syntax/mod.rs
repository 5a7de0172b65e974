//! Concepts, roles, role boxes and knowledge bases.

use std::sync::Arc;

use thiserror::Error;

mod closure;
mod concept;
mod kb;
mod role;

pub use closure::{closure, closure_of};
pub use concept::{neg_nnf, nnf, Concept};
pub use kb::{validate_concept, Assertion, Gci, KnowledgeBase};
pub use role::{inv, Role, RoleBox};

/// Interned symbol for concept, role and individual names.
pub type Name = Arc<str>;

/// Reserved concept name standing in for `⊥★`.
pub const BOTTOM_MARKER: &str = "$bot";
/// Reserved name of the universal role introduced by internalization.
pub const UNIVERSAL_ROLE: &str = "$u";
/// Reserved individual synthesized for concept queries.
pub const QUERY_INDIVIDUAL: &str = "$q0";

/// Names starting with `$` belong to the reasoner.
pub fn is_reserved(name: &str) -> bool {
    name.starts_with('$')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("unknown concept name `{0}`")]
    UnknownAtom(String),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("number restriction `{concept}` uses non-simple role `{role}`")]
    NonSimpleRole { role: String, concept: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}
