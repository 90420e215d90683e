//! Replaying the construction of a lifting of `D` from a lifting of its
//! unfolding: projectability witnesses, the `Qⁿ` tower with its chain maps,
//! the truncated colimit `R` and the natural isomorphism `δ: F R ≅ D`.

use thiserror::Error;

use crate::unfold::UnfoldError;

pub mod colimit;
pub mod fixtures;
pub mod functor;
pub mod replay;

pub use colimit::{idempotent_chain_colimit, small_targets, verify_colimit_universal, CoconeCheck, IdempotentColimit};
pub use fixtures::{conc_tower_fixture, ConcLiftPackage, ConcTower};
pub use functor::{ConcFunctor, IdentityFunctor, ObjectOf, ProjectableFunctor};
pub use replay::{replay, replay_identity, LiftReplay, LiftedUnfolding, ReplayMode, ReplayOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("not a product projection")]
    NotAProjection,
    #[error("ρ is not idempotent at element {0}")]
    NotIdempotent(usize),
    #[error("functor: {0}")]
    Functor(String),
    #[error("projectability witness failed at x={node} n={level}: {detail}")]
    WitnessFailure { node: usize, level: usize, detail: String },
    #[error("{what} is not well defined at x={node} n={level}: element {q} has preimages {first} and {second} with different images")]
    NotWellDefined {
        what: String,
        node: usize,
        level: usize,
        q: usize,
        first: usize,
        second: usize,
    },
    #[error("lift package is invalid: {}", .0.join("; "))]
    LiftPackageInvalid(Vec<String>),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
}
