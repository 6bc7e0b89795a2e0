//! Finite and dense n-spherical orders.
//!
//! The n-ary relation `K_n` studied here holds on every tuple with a
//! repeated entry. On all-distinct tuples it depends only on their order
//! pattern: for `n >= 3` rotate the least entry to the front and ask whether
//! the rest is an even permutation, so the relation is closed under cyclic
//! rotation. Arity 2 is the (reflexive) linear order and arity 3 the
//! circular order.
//!
//! The crate is organized as:
//!
//! - [`order`]: explicit finite structures, axiom checking, counting,
//!   isomorphism search and exhaustive enumeration.
//! - [`dense`]: the countable dense structure over the rationals, presented
//!   as an element enumeration plus a membership rule.
//! - [`backforth`]: the partial-isomorphism extension engine between two
//!   enumerations of dense structures.
//! - [`logic`]: formulas over `{K, =}`, an s-expression parser, complete
//!   atomic diagrams and the decision procedure for the dense theory.
//! - [`spectra`]: countable-spectrum arithmetic for constant and unary
//!   expansions, model catalogs and Hasse diagrams in DOT.
//! - [`cli`]: the `sphord` command-line front end.

pub mod backforth;
pub mod budget;
pub mod cli;
pub mod dense;
pub mod logic;
pub mod order;
pub mod spectra;

pub use budget::Budget;
pub use dense::{DenseOracle, Enumeration};
pub use order::{FiniteSphericalOrder, Relation};
