//! Safety verification for thread definition programs via multiset rewriting
//! with name constraints.

pub mod compile;
pub mod corpus;
pub mod msr;
pub mod nc;
pub mod pattern;
pub mod sim;
pub mod symbolic;
pub mod tdl;

pub use nc::{Atom, Constraint, Rational, Term, Var};
