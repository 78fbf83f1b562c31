//! Residual coordinates over `R = A[x]`: reduction of automorphisms of
//! `S[y, z]` that fix `y` modulo `x` to coordinate systems over `R`.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod group;
pub mod io;
pub mod mt2;
pub mod reduce;
pub mod ring;
pub mod weights;

pub use error::{Error, Result};
