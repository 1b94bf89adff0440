//! Concrete renormalizable groups.
//!
//! A [`Backend`] supplies element arithmetic, a fixed generating set, the
//! endomorphism φ (when it has one) and a canonical invariant of the coset
//! `gΓ_ℓ` at every level. Everything downstream (coset spaces, quotient
//! groups, probes) is generic over this trait.

mod affine;
mod heisenberg;
mod lattice;
mod wreath;
mod word;

pub use affine::{AffineElement, AffineUnitGroup, FracFive};
pub use heisenberg::{HeisenbergElement, HeisenbergGroup};
pub use lattice::{LatticeElement, LatticeGroup};
pub use word::{Letter, Word};
pub use wreath::{AutomatonState, StateLetter, StateWord, WreathAutomaton, DEFAULT_COMPARISON_DEPTH};

use std::fmt::Debug;
use std::hash::Hash;

use serde_json::Value;

use crate::error::Result;

pub trait Backend: Send + Sync {
    type Element: Clone + Eq + Hash + Debug + Send + Sync;
    /// Canonical form of a coset `gΓ_ℓ`.
    type Token: Clone + Eq + Hash + Debug + Send + Sync;
    /// Equality key: two elements are equal in the group iff their keys are.
    type Key: Clone + Eq + Hash + Send + Sync;

    fn name(&self) -> &'static str;

    fn identity(&self) -> Self::Element;

    fn multiply(&self, g: &Self::Element, h: &Self::Element) -> Self::Element;

    fn invert(&self, g: &Self::Element) -> Self::Element;

    /// Fixed, documented generator order; words and BFS use this order.
    fn generators(&self) -> Vec<Self::Element>;

    fn generator_names(&self) -> Vec<String>;

    fn supports_phi(&self) -> bool;

    /// The renormalization φ. Errors with `UnsupportedForChainKind` when the
    /// backend carries no φ.
    fn apply_phi(&self, g: &Self::Element) -> Result<Self::Element>;

    /// Backends whose cosets are vertices of a rooted tree.
    fn is_tree_action(&self) -> bool {
        false
    }

    /// Invariant of `gΓ_ℓ`: `coset_id(g, ℓ) == coset_id(h, ℓ)` iff `h⁻¹g ∈ Γ_ℓ`.
    fn coset_id(&self, g: &Self::Element, level: usize) -> Result<Self::Token>;

    fn key(&self, g: &Self::Element) -> Self::Key;

    fn encode(&self, g: &Self::Element) -> Value;

    fn decode(&self, v: &Value) -> Result<Self::Element>;

    /// Backend id and parameters, used to tag caches and reports.
    fn describe(&self) -> Value;

    fn equal(&self, g: &Self::Element, h: &Self::Element) -> bool {
        self.key(g) == self.key(h)
    }

    fn is_identity(&self, g: &Self::Element) -> bool {
        self.equal(g, &self.identity())
    }

    fn phi_power(&self, g: &Self::Element, n: usize) -> Result<Self::Element> {
        let mut out = g.clone();
        for _ in 0..n {
            out = self.apply_phi(&out)?;
        }
        Ok(out)
    }
}

pub(crate) fn decode_error(backend: &str, v: &Value) -> crate::Error {
    crate::Error::BackendMismatch {
        expected: format!("{backend} element"),
        found: v.to_string(),
    }
}
