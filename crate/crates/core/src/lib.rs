//! Covering constructions with independent certificates: strip coverings of
//! the sphere, k-fold coverings by rounding fractional covers, homothet
//! coverings of planar convex bodies, and bounded-multiplicity epsilon-nets.
//!
//! Every randomized routine takes an explicit [`rand::Rng`] so a single
//! seeded stream can be threaded through a whole run.

pub mod epsnet;
pub mod error;
pub mod geometry;
pub mod homothet;
pub mod hypergraph;
pub mod multicover;
pub mod strips;
pub mod verify;

pub use error::{Error, Result};

/// The generator used by every seeded entry point.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Creates the run generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
