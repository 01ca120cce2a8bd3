//! Restricted-ramification p-extensions of ℚ: Kummer groups, genus groups,
//! cup products on marked arithmetic curves, and certificates that the
//! cup product is surjective in the shape required by the mildness criterion.
//!
//! Everything is exact arithmetic over 𝔽_p for an odd prime p.

pub mod classfield;
pub mod coh_dims;
pub mod cup;
pub mod document;
mod error;
pub mod fp_linalg;
pub mod kummer;
pub mod residue;
pub mod seeker;

pub use error::{Error, Result, Stage};
