//! Finite replay of functorial lifting of diagrams of distributive
//! semilattices: semilattices, lattices, monoids, Boolean retractions,
//! congruence semilattices, diagram unfolding and lift verification.

pub mod catalog;
pub mod congruence;
pub mod corpus;
pub mod diagram;
pub mod lattice;
pub mod ledger;
pub mod lift;
pub mod monoid;
pub mod retraction;
pub mod semilattice;
pub mod unfold;
