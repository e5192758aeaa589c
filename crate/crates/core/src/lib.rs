//! Pattern Hopf algebras of combinatorial presheaves.
//!
//! The crate is organized bottom up: [`presheaf`] fixes the instance
//! contract, [`instances`] provides permutations, marked permutations, graphs,
//! marked graphs, set partitions and set compositions, [`algebra`] builds the
//! pattern algebra on top of any instance, and [`mper`], [`lyndon`],
//! [`freeness`] and [`series`] cover the factorization theory of marked
//! permutations and its enumerative consequences.

pub mod algebra;
pub mod error;
pub mod freeness;
pub mod instances;
pub mod linear;
pub mod lyndon;
pub mod mper;
pub mod presheaf;
pub mod rank;
pub mod series;

pub use error::{Error, Result};
pub use presheaf::{InstanceDescriptor, Labeled, Presheaf};
