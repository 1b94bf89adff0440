//! Exact permutation-group algebra on dense point sets `[0, n)`.

mod abelian;
mod bsgs;

pub use abelian::{abelian_invariants, AbelianShape, ABELIAN_ENUMERATION_BUDGET};
pub use bsgs::{PermGroupBSGS, SchreierVector};

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `[0, degree)`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!(
                    "image {i} out of range or repeated (degree {n})"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees `images` is a bijection.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1, 2]]` is `(0 1 2)`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let x_idx = x as usize;
                if x_idx >= degree || touched[x_idx] {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle point {x} out of range or repeated"
                    )));
                }
                touched[x_idx] = true;
                images[x_idx] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `a ∘ b`, the map `i ↦ a(b(i))`.
    pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
        if a.degree() != b.degree() {
            return Err(Error::DegreeMismatch {
                left: a.degree(),
                right: b.degree(),
            });
        }
        Ok(a.after(b))
    }

    /// `self ∘ other` for equal degrees.
    pub(crate) fn after(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    /// Replaces `self` by `left ∘ self` without allocating.
    #[inline]
    pub(crate) fn left_apply(&mut self, left: &Permutation) {
        for x in self.images.iter_mut() {
            *x = left.images[*x as usize];
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// Disjoint cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// `self^k` for any integer `k`, computed cycle-wise.
    pub fn pow(&self, k: i64) -> Permutation {
        let mut images: Vec<u32> = (0..self.degree() as u32).collect();
        for cycle in self.cycles() {
            let len = cycle.len() as i64;
            let shift = k.rem_euclid(len) as usize;
            for (i, &x) in cycle.iter().enumerate() {
                images[x as usize] = cycle[(i + shift) % cycle.len()];
            }
        }
        Permutation { images }
    }

    pub fn smallest_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    /// Relabels through `proj` onto the quotient set `[0, target_degree)`.
    ///
    /// The result `q` satisfies `q(proj(x)) = proj(self(x))`; fails when a
    /// fiber of `proj` is not carried into a single fiber.
    pub fn block_projection(&self, proj: &[u32], target_degree: usize) -> Result<Permutation> {
        if proj.len() != self.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: proj.len(),
            });
        }
        const UNSET: u32 = u32::MAX;
        let mut images = vec![UNSET; target_degree];
        for (x, &px) in proj.iter().enumerate() {
            let target = proj[self.images[x] as usize];
            let slot = &mut images[px as usize];
            if *slot == UNSET {
                *slot = target;
            } else if *slot != target {
                return Err(Error::NotBlockCompatible { point: x as u32 });
            }
        }
        if images.contains(&UNSET) {
            return Err(Error::InvalidPermutation(
                "projection is not surjective".into(),
            ));
        }
        Permutation::from_images(images)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, cycles: &[&[u32]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let q = p(4, &[&[0, 2, 3]]);
        assert_eq!(Permutation::compose(&Permutation::identity(4), &q).unwrap(), q);
    }

    #[test]
    fn transposition_squares_to_identity() {
        let t = p(2, &[&[0, 1]]);
        assert!(Permutation::compose(&t, &t).unwrap().is_identity());
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let r = p(3, &[&[0, 1, 2]]);
        let t = p(3, &[&[0, 1]]);
        let rt = Permutation::compose(&r, &t).unwrap();
        assert_eq!(rt.images(), &[2, 1, 0]);
    }

    #[test]
    fn compose_rejects_degree_mismatch() {
        let err = Permutation::compose(&Permutation::identity(2), &Permutation::identity(3));
        assert!(matches!(err, Err(Error::DegreeMismatch { left: 2, right: 3 })));
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
    }

    #[test]
    fn pow_and_order() {
        let c = p(6, &[&[0, 1, 2], &[3, 4]]);
        assert_eq!(c.order(), 6);
        assert!(c.pow(6).is_identity());
        assert_eq!(c.pow(-1), c.inverse());
        assert_eq!(c.pow(2), c.after(&c));
    }

    #[test]
    fn block_projection_of_identity() {
        let proj = [0, 1, 0, 1];
        let q = Permutation::identity(4).block_projection(&proj, 2).unwrap();
        assert!(q.is_identity());
    }

    #[test]
    fn block_projection_with_bijective_fibers_relabels() {
        // proj is a bijection: the projection is proj ∘ p ∘ proj^{-1}.
        let g = p(3, &[&[0, 1, 2]]);
        let proj = [2, 0, 1];
        let q = g.block_projection(&proj, 3).unwrap();
        let pi = Permutation::from_images(proj.to_vec()).unwrap();
        assert_eq!(q, pi.after(&g).after(&pi.inverse()));
    }

    #[test]
    fn block_projection_detects_split_fibers() {
        // Fibers {0,1} and {2,3}; (1 2) splits both.
        let g = p(4, &[&[1, 2]]);
        let err = g.block_projection(&[0, 0, 1, 1], 2);
        assert!(matches!(err, Err(Error::NotBlockCompatible { .. })));
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn compose_is_associative(a in arb_perm(7), b in arb_perm(7), c in arb_perm(7)) {
            prop_assert_eq!(a.after(&b).after(&c), a.after(&b.after(&c)));
        }

        #[test]
        fn inverse_cancels(a in arb_perm(9)) {
            prop_assert!(a.after(&a.inverse()).is_identity());
            prop_assert!(a.inverse().after(&a).is_identity());
        }

        #[test]
        fn block_projection_is_a_homomorphism(x in 0u32..4, y in 0u32..4, s in any::<bool>()) {
            // Z/8 acting on itself, blocks = residues mod 4.
            let rot = |k: u32| Permutation::from_images((0..8).map(|i| (i + k) % 8).collect()).unwrap();
            let flip = Permutation::from_images((0..8).map(|i| (8 - i) % 8).collect()).unwrap();
            let a = if s { rot(x).after(&flip) } else { rot(x) };
            let b = rot(y);
            let proj: Vec<u32> = (0..8).map(|i| i % 4).collect();
            let lhs = a.after(&b).block_projection(&proj, 4).unwrap();
            let rhs = a.block_projection(&proj, 4).unwrap().after(&b.block_projection(&proj, 4).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
