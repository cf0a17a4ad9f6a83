//! Plaquette random-cluster model and Potts lattice gauge theory on cubical
//! complexes, with exact sparse linear algebra over prime fields.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cubical;
pub mod duality;
pub mod error;
pub mod field;
pub mod graph;
pub mod homology;
pub mod linalg;
pub mod math;
pub mod pltg;
pub mod rcm;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
