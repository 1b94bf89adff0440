//! Stabilizer chains (base and strong generating set) via Schreier–Sims.
//!
//! Two constructions share one data structure:
//! - [`PermGroupBSGS::build`] is the deterministic incremental algorithm;
//!   every Schreier generator is sifted, in generator-index order.
//! - [`PermGroupBSGS::build_with_order`] sifts pseudo-random elements
//!   (seeded product replacement) until the product of the basic orbit
//!   lengths reaches a known group order. Once that happens the chain is a
//!   genuine BSGS, so the answer is exact; only the running time is random.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Permutation;
use crate::error::{Error, Result};

const NOT_IN_ORBIT: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

/// Orbit of one base point under the generators of its stabilizer level,
/// stored as a Schreier tree: each orbit point records the generator edge
/// it was reached by, so coset representatives are products along the path
/// to the root.
#[derive(Clone, Debug)]
pub struct SchreierVector {
    root: u32,
    orbit: Vec<u32>,
    /// `labels[x] = 2*slot + inv`: `x = t(parent)` with `t` the level
    /// generator in `slot` (inverted when `inv` is set).
    labels: Vec<u32>,
}

impl SchreierVector {
    fn new(root: u32, degree: usize) -> Self {
        let mut labels = vec![NOT_IN_ORBIT; degree];
        labels[root as usize] = ROOT;
        SchreierVector {
            root,
            orbit: vec![root],
            labels,
        }
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn orbit(&self) -> &[u32] {
        &self.orbit
    }

    pub fn contains(&self, x: u32) -> bool {
        self.labels[x as usize] != NOT_IN_ORBIT
    }

    /// Closes the orbit under `gens`, trying only slots `>= first_new` on
    /// points that were already present.
    fn extend(&mut self, gens: &[usize], first_new: usize, strong: &[Permutation], inv: &[Permutation]) {
        let old_len = self.orbit.len();
        let mut pos = 0;
        while pos < self.orbit.len() {
            let x = self.orbit[pos];
            let start = if pos < old_len { first_new } else { 0 };
            for (slot, &g) in gens.iter().enumerate().skip(start) {
                for (flag, table) in [(0u32, &strong[g]), (1u32, &inv[g])] {
                    let y = table.apply(x);
                    if self.labels[y as usize] == NOT_IN_ORBIT {
                        self.labels[y as usize] = 2 * slot as u32 + flag;
                        self.orbit.push(y);
                    }
                }
            }
            pos += 1;
        }
    }
}

#[derive(Clone, Debug)]
struct StabLevel {
    base_point: u32,
    /// Indices into the strong generating set of the generators of
    /// `G^(i) = Stab(β_0, …, β_{i-1})`.
    gens: Vec<usize>,
    tree: SchreierVector,
    /// Deterministic construction: per orbit position, number of level
    /// generators whose Schreier generator has already been sifted.
    checked: Vec<u32>,
}

/// A finite permutation group with base, strong generators and transversals.
#[derive(Clone, Debug)]
pub struct PermGroupBSGS {
    degree: usize,
    strong: Vec<Permutation>,
    strong_inv: Vec<Permutation>,
    levels: Vec<StabLevel>,
    order: BigUint,
}

impl PermGroupBSGS {
    pub fn trivial(degree: usize) -> Self {
        PermGroupBSGS {
            degree,
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: Vec::new(),
            order: BigUint::one(),
        }
    }

    /// Deterministic Schreier–Sims. Base points are the smallest point moved
    /// by the element that forces a new level.
    pub fn build(generators: &[Permutation], degree: usize) -> Result<Self> {
        Self::build_with_base(generators, degree, &[])
    }

    /// As [`build`](Self::build), with the base forced to start with `prefix`.
    pub fn build_with_base(generators: &[Permutation], degree: usize, prefix: &[u32]) -> Result<Self> {
        let mut g = Self::empty_with_prefix(generators, degree, prefix)?;
        for p in generators {
            if !p.is_identity() && !g.strong.contains(p) {
                g.strong.push(p.clone());
                g.strong_inv.push(p.inverse());
            }
        }
        for idx in 0..g.strong.len() {
            let fixes_base = g.levels.iter().all(|l| g.strong[idx].apply(l.base_point) == l.base_point);
            if fixes_base {
                let b = g.strong[idx].smallest_moved_point().expect("non-identity");
                g.push_level(b);
            }
        }
        for i in 0..g.levels.len() {
            let prior: Vec<u32> = g.levels[..i].iter().map(|l| l.base_point).collect();
            let gens: Vec<usize> = (0..g.strong.len())
                .filter(|&s| prior.iter().all(|&b| g.strong[s].apply(b) == b))
                .collect();
            g.levels[i].gens = gens;
            g.extend_level(i, 0);
        }

        let mut i = g.levels.len() as isize - 1;
        while i >= 0 {
            let level = i as usize;
            match g.next_nontrivial_schreier_residue(level) {
                Some((residue, fail)) => {
                    let idx = g.add_strong(residue, fail);
                    for k in level + 1..=fail {
                        g.levels[k].gens.push(idx);
                        let first_new = g.levels[k].gens.len() - 1;
                        g.extend_level(k, first_new);
                    }
                    i = fail as isize;
                }
                None => i -= 1,
            }
        }
        g.recompute_order();
        Ok(g)
    }

    /// Randomized Schreier–Sims terminated by a known order.
    ///
    /// Fails with [`Error::OrderHintUnreachable`] if the hint is wrong
    /// (either exceeded, or not reached within the iteration cap).
    pub fn build_with_order(
        generators: &[Permutation],
        degree: usize,
        prefix: &[u32],
        target: &BigUint,
        seed: u64,
    ) -> Result<Self> {
        let mut g = Self::empty_with_prefix(generators, degree, prefix)?;
        let unreachable = |g: &PermGroupBSGS| Error::OrderHintUnreachable {
            target: target.to_string(),
            reached: g.order.to_string(),
        };
        for p in generators {
            g.absorb(p.clone());
            if &g.order > target {
                return Err(unreachable(&g));
            }
        }
        if &g.order == target {
            return Ok(g);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut source = ProductReplacement::new(generators, degree, &mut rng);
        const MAX_STALE: usize = 4000;
        let mut stale = 0;
        while &g.order < target {
            let before = g.order.clone();
            g.absorb(source.next(&mut rng));
            if g.order == before {
                stale += 1;
                if stale > MAX_STALE {
                    return Err(unreachable(&g));
                }
            } else {
                stale = 0;
            }
        }
        if &g.order != target {
            return Err(unreachable(&g));
        }
        Ok(g)
    }

    fn empty_with_prefix(generators: &[Permutation], degree: usize, prefix: &[u32]) -> Result<Self> {
        for p in generators {
            if p.degree() != degree {
                return Err(Error::DegreeMismatch { left: degree, right: p.degree() });
            }
        }
        let mut g = Self::trivial(degree);
        for (k, &b) in prefix.iter().enumerate() {
            if b as usize >= degree || prefix[..k].contains(&b) {
                return Err(Error::InvalidPermutation(format!("bad base point {b}")));
            }
            g.push_level(b);
        }
        Ok(g)
    }

    fn push_level(&mut self, b: u32) {
        self.levels.push(StabLevel {
            base_point: b,
            gens: Vec::new(),
            tree: SchreierVector::new(b, self.degree),
            checked: vec![0],
        });
    }

    fn add_strong(&mut self, p: Permutation, fail_level: usize) -> usize {
        if fail_level == self.levels.len() {
            let b = p.smallest_moved_point().expect("non-identity residue");
            self.push_level(b);
        }
        self.strong_inv.push(p.inverse());
        self.strong.push(p);
        self.strong.len() - 1
    }

    fn extend_level(&mut self, i: usize, first_new: usize) {
        let level = &mut self.levels[i];
        level.tree.extend(&level.gens, first_new, &self.strong, &self.strong_inv);
        level.checked.resize(level.tree.orbit.len(), 0);
    }

    /// Sifts `p`, adding the residue to every level it belongs to.
    fn absorb(&mut self, mut p: Permutation) {
        let fail = self.sift_from(&mut p, 0);
        if p.is_identity() {
            return;
        }
        let idx = self.add_strong(p, fail);
        for k in 0..=fail {
            self.levels[k].gens.push(idx);
            let first_new = self.levels[k].gens.len() - 1;
            self.extend_level(k, first_new);
        }
        self.recompute_order();
    }

    fn next_nontrivial_schreier_residue(&mut self, i: usize) -> Option<(Permutation, usize)> {
        let mut pos = 0;
        while pos < self.levels[i].tree.orbit.len() {
            if self.levels[i].checked[pos] as usize >= self.levels[i].gens.len() {
                pos += 1;
                continue;
            }
            let delta = self.levels[i].tree.orbit[pos];
            let u_delta = self.coset_rep(i, delta);
            while (self.levels[i].checked[pos] as usize) < self.levels[i].gens.len() {
                let slot = self.levels[i].checked[pos] as usize;
                self.levels[i].checked[pos] += 1;
                let s = self.levels[i].gens[slot];
                let mut h = self.strong[s].after(&u_delta);
                let fail = self.sift_from(&mut h, i);
                if !h.is_identity() {
                    return Some((h, fail));
                }
            }
            pos += 1;
        }
        None
    }

    /// `u_δ` with `u_δ(β_i) = δ`.
    fn coset_rep(&self, i: usize, mut delta: u32) -> Permutation {
        let level = &self.levels[i];
        let mut u = Permutation::identity(self.degree);
        while delta != level.base_point {
            let label = level.tree.labels[delta as usize];
            let g = level.gens[(label / 2) as usize];
            let (t, t_inv) = if label.is_multiple_of(2) {
                (&self.strong[g], &self.strong_inv[g])
            } else {
                (&self.strong_inv[g], &self.strong[g])
            };
            u = u.after(t);
            delta = t_inv.apply(delta);
        }
        u
    }

    /// Strips `h` through levels `start..`; returns the first level whose
    /// orbit does not contain the image of its base point, or the number of
    /// levels if `h` passes all of them.
    fn sift_from(&self, h: &mut Permutation, start: usize) -> usize {
        for i in start..self.levels.len() {
            let level = &self.levels[i];
            let b = level.base_point;
            let mut gamma = h.apply(b);
            if !level.tree.contains(gamma) {
                return i;
            }
            while gamma != b {
                let label = level.tree.labels[gamma as usize];
                let g = level.gens[(label / 2) as usize];
                let t_inv = if label.is_multiple_of(2) { &self.strong_inv[g] } else { &self.strong[g] };
                h.left_apply(t_inv);
                gamma = t_inv.apply(gamma);
            }
        }
        self.levels.len()
    }

    fn recompute_order(&mut self) {
        self.order = self
            .levels
            .iter()
            .map(|l| BigUint::from(l.tree.orbit.len()))
            .product();
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    pub fn basic_orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.tree.orbit.len()).collect()
    }

    pub fn transversals(&self) -> impl Iterator<Item = &SchreierVector> {
        self.levels.iter().map(|l| &l.tree)
    }

    /// The coset representative at `level` mapping its base point to `point`.
    pub fn transversal_element(&self, level: usize, point: u32) -> Option<Permutation> {
        let l = self.levels.get(level)?;
        l.tree.contains(point).then(|| self.coset_rep(level, point))
    }

    /// True iff `p` sifts to the identity.
    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: p.degree() });
        }
        let mut h = p.clone();
        let done = self.sift_from(&mut h, 0);
        Ok(done == self.levels.len() && h.is_identity())
    }

    pub fn is_subgroup_of(&self, other: &PermGroupBSGS) -> Result<bool> {
        for s in &self.strong {
            if !other.contains(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equal orders and mutual membership of strong generators.
    pub fn same_group(&self, other: &PermGroupBSGS) -> Result<bool> {
        Ok(self.order == other.order && self.is_subgroup_of(other)? && other.is_subgroup_of(self)?)
    }

    /// The orbit of `x` under the whole group.
    pub fn orbit_of(&self, x: u32) -> Vec<u32> {
        let mut tree = SchreierVector::new(x, self.degree);
        let all: Vec<usize> = (0..self.strong.len()).collect();
        tree.extend(&all, 0, &self.strong, &self.strong_inv);
        tree.orbit
    }

    /// `{g ∈ G : g(x) = x}`.
    pub fn point_stabilizer(&self, x: u32) -> Result<PermGroupBSGS> {
        if x as usize >= self.degree {
            return Err(Error::InvalidPermutation(format!("point {x} out of range")));
        }
        if self.levels.first().map(|l| l.base_point) == Some(x) {
            return Ok(self.tail());
        }
        if self.strong.iter().all(|s| s.apply(x) == x) {
            return Ok(self.clone());
        }
        let rebased = Self::build_with_order(&self.strong, self.degree, &[x], &self.order, 0x5eed_0001)?;
        Ok(rebased.tail())
    }

    /// The stabilizer of the first base point, read off the chain.
    fn tail(&self) -> PermGroupBSGS {
        if self.levels.len() <= 1 {
            return Self::trivial(self.degree);
        }
        let mut used: Vec<usize> = self.levels[1..].iter().flat_map(|l| l.gens.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let remap = |old: usize| used.binary_search(&old).expect("tail generator");
        let levels: Vec<StabLevel> = self.levels[1..]
            .iter()
            .map(|l| StabLevel {
                base_point: l.base_point,
                gens: l.gens.iter().map(|&g| remap(g)).collect(),
                tree: l.tree.clone(),
                checked: Vec::new(),
            })
            .collect();
        let mut out = PermGroupBSGS {
            degree: self.degree,
            strong: used.iter().map(|&g| self.strong[g].clone()).collect(),
            strong_inv: used.iter().map(|&g| self.strong_inv[g].clone()).collect(),
            levels,
            order: BigUint::one(),
        };
        out.recompute_order();
        out
    }
}

/// Product-replacement pseudo-random element generator.
struct ProductReplacement {
    slots: Vec<Permutation>,
    acc: Permutation,
}

impl ProductReplacement {
    fn new(generators: &[Permutation], degree: usize, rng: &mut ChaCha8Rng) -> Self {
        let base: Vec<Permutation> = if generators.is_empty() {
            vec![Permutation::identity(degree)]
        } else {
            generators.to_vec()
        };
        let n = base.len().max(10);
        let slots = (0..n).map(|i| base[i % base.len()].clone()).collect();
        let mut pr = ProductReplacement {
            slots,
            acc: Permutation::identity(degree),
        };
        for _ in 0..50 {
            pr.step(rng);
        }
        pr
    }

    fn step(&mut self, rng: &mut ChaCha8Rng) {
        let n = self.slots.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let other = if rng.gen_bool(0.5) {
            self.slots[j].clone()
        } else {
            self.slots[j].inverse()
        };
        self.slots[i] = if rng.gen_bool(0.5) {
            self.slots[i].after(&other)
        } else {
            other.after(&self.slots[i])
        };
        self.acc = self.acc.after(&self.slots[i]);
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> Permutation {
        self.step(rng);
        self.acc.clone()
    }
}
