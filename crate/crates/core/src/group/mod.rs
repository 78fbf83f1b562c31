//! Generators, words and endomorphisms of `S[y, z]` over `S = A[x, 1/x]`.

mod endo;
mod generator;
mod ia;
pub mod probe;
mod word;

pub use endo::Endo;
pub use generator::{GenPerm, Generator, Slot};
pub use ia::{
    canonical_ia_form, fixes_y, is_in_ia_tau, preserves_a_tau, validate_elementary_tau, IaWitness,
};
pub use word::{as_elementary, Automorphism, GeneratorWord, EXPANSION_LIMIT, WORKING_LIMIT};
