//! Spectral analysis of frustration-free nearest-neighbour qubit chains
//! H = Σ |ψ⟩⟨ψ|_{i,i+1}: phase classification from the 2×2 matrix T_ψ,
//! exact ground spaces, finite-size gaps, and numerical checks of the
//! operator inequalities behind the gapped/gapless dichotomy.

pub mod error;
pub mod numerics;
pub mod states;
pub mod chain;
pub mod groundspace;
pub mod spectral;
pub mod analysis;
pub mod rank_class;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
