//! Finite-level computations for the Cantor actions attached to
//! renormalizable groups: coset towers `X_ℓ = Γ/Γ_ℓ`, their quotient
//! groups `Q_ℓ`, the discriminant groups `D_ℓ`, and probes of the limit.

pub mod analyzer;
pub mod backend;
pub mod chain;
pub mod config;
pub mod error;
pub mod perm;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod tree;

pub use error::{Error, Result};

/// Integer Heisenberg group with machine-word coordinates.
pub type Heisenberg = backend::HeisenbergGroup<i64>;
/// `ℤ^k ⋊ H` with machine-word coordinates.
pub type LatticeSemidirect = backend::LatticeGroup<i64>;
/// `ℤ[1/5] ⋊ (ℤ/2 × ℤ)`; numerators grow quickly under conjugation by `c`,
/// so coordinates are arbitrary precision.
pub type AffineUnit = backend::AffineUnitGroup<num_bigint::BigInt>;
