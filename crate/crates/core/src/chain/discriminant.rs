use num_bigint::BigUint;
use rayon::prelude::*;

use super::{ChainKind, LevelAction, Tower};
use crate::backend::Backend;
use crate::error::{Error, Result};
use crate::perm::{abelian_invariants, AbelianShape, PermGroupBSGS, Permutation};

const QUOTIENT_SEED: u64 = 0x7e11_0000;

/// `Q_ℓ` (the image of Γ in `Sym(X_ℓ)`) and `D_ℓ` (the stabilizer of the
/// basepoint in `Q_ℓ`).
#[derive(Clone, Debug)]
pub struct DiscriminantLevel {
    pub level: usize,
    pub size: usize,
    pub quotient: PermGroupBSGS,
    pub discriminant: PermGroupBSGS,
    /// `None` when `D_ℓ` is too large to enumerate.
    pub shape: Option<AbelianShape>,
}

/// The bonding map `D_{ℓ+1} → D_ℓ`.
#[derive(Clone, Debug)]
pub struct Bonding {
    pub level: usize,
    /// Strong generators of `D_{ℓ+1}` with their images on `X_ℓ`.
    pub images: Vec<(Permutation, Permutation)>,
    pub image: PermGroupBSGS,
    pub surjective: bool,
    pub bijective: bool,
}

#[derive(Clone, Debug)]
pub struct DiscriminantTower {
    pub levels: Vec<DiscriminantLevel>,
    /// `bondings[ℓ]` maps `D_{ℓ+1}` onto its image in `D_ℓ`.
    pub bondings: Vec<Bonding>,
}

impl DiscriminantTower {
    pub fn compute<B: Backend>(tower: &Tower<B>) -> Result<Self> {
        Self::compute_to(tower, tower.depth())
    }

    /// Levels `0..=max_level` only.
    pub fn compute_to<B: Backend>(tower: &Tower<B>, max_level: usize) -> Result<Self> {
        tower.level(max_level)?;
        let levels = (0..=max_level)
            .into_par_iter()
            .map(|l| discriminant_level(tower, l))
            .collect::<Result<Vec<_>>>()?;
        let bondings = (0..max_level)
            .into_par_iter()
            .map(|l| bonding_map(tower, &levels, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscriminantTower { levels, bondings })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, level: usize) -> Result<&DiscriminantLevel> {
        self.levels.get(level).ok_or(Error::InsufficientDepth {
            needed: level + 1,
            available: self.levels.len(),
        })
    }
}

/// `Q_ℓ`, the group generated by the generator permutations on `X_ℓ`.
///
/// For a renormalization chain of an algebraic backend the order is known in
/// advance as `n_ℓ · |⟨φ^ℓ(generators)⟩|`, and a randomized build that stops
/// at that order is exact. Otherwise the deterministic build is used.
pub fn quotient_group<B: Backend>(tower: &Tower<B>, level: usize) -> Result<PermGroupBSGS> {
    let action = tower.level(level)?;
    if tower.kind() == ChainKind::Renormalization && !tower.backend().is_tree_action() {
        let d = renormalized_stabilizer(tower, level)?;
        let target = BigUint::from(action.size()) * d.order();
        PermGroupBSGS::build_with_order(
            action.generator_perms(),
            action.size(),
            &[0],
            &target,
            QUOTIENT_SEED + level as u64,
        )
    } else {
        PermGroupBSGS::build_with_base(action.generator_perms(), action.size(), &[0])
    }
}

/// `⟨φ^ℓ(generators)⟩` acting on `X_ℓ`; each generator must fix the basepoint.
fn renormalized_stabilizer<B: Backend>(tower: &Tower<B>, level: usize) -> Result<PermGroupBSGS> {
    let action = tower.level(level)?;
    let perms = tower.renormalized_generator_perms(level)?;
    if let Some(p) = perms.iter().find(|p| p.apply(0) != 0) {
        return Err(Error::ChainInconsistent(format!(
            "φ^{level} of a generator moves the basepoint of level {level} to {}",
            p.apply(0)
        )));
    }
    PermGroupBSGS::build(&perms, action.size())
}

pub fn discriminant_level<B: Backend>(tower: &Tower<B>, level: usize) -> Result<DiscriminantLevel> {
    let action: &LevelAction<B> = tower.level(level)?;
    let quotient = quotient_group(tower, level)?;
    let discriminant = quotient.point_stabilizer(0)?;
    if tower.kind() == ChainKind::Renormalization {
        let expected = renormalized_stabilizer(tower, level)?;
        if !discriminant.same_group(&expected)? {
            return Err(Error::ChainInconsistent(format!(
                "basepoint stabilizer at level {level} (order {}) differs from the image of φ^{level}(Γ) (order {})",
                discriminant.order(),
                expected.order()
            )));
        }
    }
    let shape = match abelian_invariants(discriminant.strong_generators()) {
        Ok(s) => Some(s),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(DiscriminantLevel { level, size: action.size(), quotient, discriminant, shape })
}

/// Images of the strong generators of `D_{ℓ+1}` under the projection to `X_ℓ`.
pub(crate) fn bonding_map<B: Backend>(
    tower: &Tower<B>,
    levels: &[DiscriminantLevel],
    level: usize,
) -> Result<Bonding> {
    let proj = tower.level(level + 1)?.projection().expect("projection above level 0");
    let upper = &levels[level + 1];
    let lower = &levels[level];
    let images = upper
        .discriminant
        .strong_generators()
        .iter()
        .map(|g| Ok((g.clone(), g.block_projection(proj, lower.size)?)))
        .collect::<Result<Vec<_>>>()?;
    for (_, img) in &images {
        if img.apply(0) != 0 || !lower.discriminant.contains(img)? {
            return Err(Error::ChainInconsistent(format!("bonding image at level {level} leaves D_{level}")));
        }
    }
    let gens: Vec<Permutation> = images.iter().map(|(_, i)| i.clone()).collect();
    let image = PermGroupBSGS::build(&gens, lower.size)?;
    let surjective = image.order() == lower.discriminant.order();
    let bijective = surjective && upper.discriminant.order() == lower.discriminant.order();
    Ok(Bonding { level, images, image, surjective, bijective })
}
