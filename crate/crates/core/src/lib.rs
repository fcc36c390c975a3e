//! Algorithms around the pseudovariety `U` of supersolvable finite groups
//! with abelian Sylow subgroups and abelian derived subgroup of squarefree
//! exponent: Stallings automata, the groups `G_{p,d}`, closures in the
//! pro-`U` topology, and separating witnesses for metabelian and
//! Baumslag-Solitar words.

pub mod apd;
pub mod bs;
pub mod error;
pub mod finitegroup;
pub mod fplinalg;
pub mod freeword;
pub mod metabelian;
pub mod numtheory;
pub mod stallings;
pub mod uvar;

pub use error::{Error, Result};
pub use freeword::{Letter, Word};
pub use stallings::Automaton;
