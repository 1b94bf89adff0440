//! Finite models of a group chain: the coset spaces `X_ℓ = Γ/Γ_ℓ` with the
//! generator actions and projections, and the groups `Q_ℓ ⊃ D_ℓ` they carry.

pub mod cache;
mod discriminant;

pub use discriminant::{Bonding, DiscriminantLevel, DiscriminantTower};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const DEFAULT_MAX_INDEX: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    /// `Γ_ℓ = φ^ℓ(Γ)`.
    Renormalization,
    /// `Γ_ℓ` = stabilizer of the length-`ℓ` prefix of the basepoint path.
    VertexStabilizer,
}

impl ChainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainKind::Renormalization => "renormalization",
            ChainKind::VertexStabilizer => "vertex_stabilizer",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub max_level: usize,
    pub max_index: usize,
}

impl ChainSpec {
    pub fn new(kind: ChainKind, max_level: usize) -> Self {
        ChainSpec { kind, max_level, max_index: DEFAULT_MAX_INDEX }
    }

    pub fn check<B: Backend>(&self, backend: &B) -> Result<()> {
        match self.kind {
            ChainKind::Renormalization if !backend.supports_phi() => Err(Error::UnsupportedForChainKind(
                format!("backend {} has no renormalization map", backend.name()),
            )),
            ChainKind::VertexStabilizer if !backend.is_tree_action() => Err(Error::UnsupportedForChainKind(
                format!("backend {} does not act on a rooted tree", backend.name()),
            )),
            _ => Ok(()),
        }
    }
}

/// The action of the generators on `X_ℓ`. Point 0 is the basepoint `Γ_ℓ`.
#[derive(Clone, Debug)]
pub struct LevelAction<B: Backend> {
    level: usize,
    representatives: Vec<B::Element>,
    generator_perms: Vec<Permutation>,
    projection: Option<Vec<u32>>,
    index: HashMap<B::Token, u32>,
}

impl<B: Backend> LevelAction<B> {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn size(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[B::Element] {
        &self.representatives
    }

    pub fn generator_perms(&self) -> &[Permutation] {
        &self.generator_perms
    }

    /// Index at level `ℓ−1` of each point; `None` at level 0.
    pub fn projection(&self) -> Option<&[u32]> {
        self.projection.as_deref()
    }

    pub fn index_of(&self, token: &B::Token) -> Option<u32> {
        self.index.get(token).copied()
    }

    /// The point `gΓ_ℓ`.
    pub fn locate(&self, backend: &B, g: &B::Element) -> Result<u32> {
        let token = backend.coset_id(g, self.level)?;
        self.index_of(&token).ok_or_else(|| {
            Error::ChainInconsistent(format!("coset {token:?} missing from level {}", self.level))
        })
    }

    /// The permutation of `X_ℓ` induced by left multiplication by `g`.
    pub fn action_of(&self, backend: &B, g: &B::Element) -> Result<Permutation> {
        let images = self
            .representatives
            .iter()
            .map(|r| self.locate(backend, &backend.multiply(g, r)))
            .collect::<Result<Vec<u32>>>()?;
        Permutation::from_images(images)
    }

    /// Breadth-first enumeration of `Γ/Γ_ℓ` from the identity coset,
    /// applying generators and then their inverses to each representative.
    pub fn build(backend: &B, level: usize, max_index: usize) -> Result<Self> {
        let gens = backend.generators();
        let invs: Vec<B::Element> = gens.iter().map(|g| backend.invert(g)).collect();
        let id = backend.identity();
        let mut index = HashMap::new();
        index.insert(backend.coset_id(&id, level)?, 0u32);
        let mut reps = vec![id];
        let mut images: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
        let mut x = 0;
        while x < reps.len() {
            for (gi, g) in gens.iter().chain(invs.iter()).enumerate() {
                let y = backend.multiply(g, &reps[x]);
                let token = backend.coset_id(&y, level)?;
                let next = index.len() as u32;
                let target = *index.entry(token).or_insert(next);
                if target == next {
                    if reps.len() >= max_index {
                        return Err(Error::IndexBudgetExceeded { level, limit: max_index });
                    }
                    reps.push(y);
                }
                if gi < gens.len() {
                    images[gi].push(target);
                }
            }
            x += 1;
        }
        let generator_perms = images
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::ChainInconsistent(format!("level {level}: {e}")))?;
        Ok(LevelAction { level, representatives: reps, generator_perms, projection: None, index })
    }

    fn attach_projection(&mut self, backend: &B, below: &LevelAction<B>) -> Result<()> {
        let proj = self
            .representatives
            .iter()
            .map(|r| below.locate(backend, r))
            .collect::<Result<Vec<u32>>>()?;
        self.projection = Some(proj);
        Ok(())
    }

    pub(crate) fn from_parts(
        backend: &B,
        level: usize,
        representatives: Vec<B::Element>,
        generator_perms: Vec<Permutation>,
        projection: Option<Vec<u32>>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(representatives.len());
        for (i, r) in representatives.iter().enumerate() {
            if index.insert(backend.coset_id(r, level)?, i as u32).is_some() {
                return Err(Error::CacheCorrupt(format!("duplicate coset at level {level}")));
            }
        }
        Ok(LevelAction { level, representatives, generator_perms, projection, index })
    }
}

/// Levels `0..=max_level` of a chain.
#[derive(Clone, Debug)]
pub struct Tower<B: Backend> {
    backend: B,
    spec: ChainSpec,
    levels: Vec<LevelAction<B>>,
}

impl<B: Backend> Tower<B> {
    pub fn build(backend: B, spec: ChainSpec) -> Result<Self> {
        spec.check(&backend)?;
        let mut tower = Tower { backend, spec: spec.clone(), levels: Vec::new() };
        tower.extend_to(spec.max_level)?;
        Ok(tower)
    }

    /// Builds further levels (no-op if already present).
    pub fn extend_to(&mut self, max_level: usize) -> Result<()> {
        while self.levels.len() <= max_level {
            let level = self.levels.len();
            let mut action = LevelAction::build(&self.backend, level, self.spec.max_index)?;
            if let Some(below) = self.levels.last() {
                action.attach_projection(&self.backend, below)?;
            }
            self.levels.push(action);
        }
        self.spec.max_level = self.spec.max_level.max(max_level);
        Ok(())
    }

    pub(crate) fn from_levels(backend: B, spec: ChainSpec, levels: Vec<LevelAction<B>>) -> Self {
        Tower { backend, spec, levels }
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn kind(&self) -> ChainKind {
        self.spec.kind
    }

    /// Deepest level built.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[LevelAction<B>] {
        &self.levels
    }

    pub fn level(&self, level: usize) -> Result<&LevelAction<B>> {
        self.levels.get(level).ok_or(Error::InsufficientDepth {
            needed: level + 1,
            available: self.levels.len(),
        })
    }

    /// Projection `X_from → X_to` composed from the level projections.
    pub fn projection_between(&self, from: usize, to: usize) -> Result<Vec<u32>> {
        assert!(to <= from, "projection goes down the tower");
        let mut map: Vec<u32> = (0..self.level(from)?.size() as u32).collect();
        for l in (to + 1..=from).rev() {
            let proj = self.levels[l].projection().expect("levels above 0 have projections");
            for x in map.iter_mut() {
                *x = proj[*x as usize];
            }
        }
        Ok(map)
    }

    /// Points of `X_level` lying over the basepoint of `X_depth`, i.e. the
    /// cylinder `U_depth ∩ X_level`, in increasing order.
    pub fn basepoint_cylinder(&self, depth: usize, level: usize) -> Result<Vec<u32>> {
        let map = self.projection_between(level, depth)?;
        Ok((0..map.len() as u32).filter(|&x| map[x as usize] == 0).collect())
    }

    /// `s_ℓ : X_ℓ → X_{ℓ+1}`, `gΓ_ℓ ↦ φ(g)Γ_{ℓ+1}`.
    pub fn shift_map(&self, level: usize) -> Result<Vec<u32>> {
        if self.spec.kind != ChainKind::Renormalization {
            return Err(Error::UnsupportedForChainKind("the shift map needs a renormalization chain".into()));
        }
        let here = self.level(level)?;
        let above = self.level(level + 1)?;
        here.representatives
            .iter()
            .map(|r| above.locate(&self.backend, &self.backend.apply_phi(r)?))
            .collect()
    }

    /// Permutations of `X_ℓ` induced by `φ^ℓ` of the generators; they
    /// generate the image of `Γ_ℓ` for a renormalization chain.
    pub fn renormalized_generator_perms(&self, level: usize) -> Result<Vec<Permutation>> {
        let action = self.level(level)?;
        self.backend
            .generators()
            .iter()
            .map(|g| action.action_of(&self.backend, &self.backend.phi_power(g, level)?))
            .collect()
    }

    /// Permutation of `X_ℓ` induced by a word, composed from the generator
    /// permutations.
    pub fn word_action(&self, word: &crate::backend::Word, level: usize) -> Result<Permutation> {
        let action = self.level(level)?;
        let mut out = Permutation::identity(action.size());
        for l in word.0.iter().rev() {
            let p = &action.generator_perms[l.generator as usize];
            if l.inverse {
                out.left_apply(&p.inverse());
            } else {
                out.left_apply(p);
            }
        }
        Ok(out)
    }
}
