//! Depth-stamped evidence about the limit of the discriminant tower.

mod probes;
mod search;

pub use probes::{
    contracting_probe, kernel_probe, qa_witness_search, self_replicating_probe, validate_witness,
    ContractingLevel, KernelWord, QaOutcome, QaWitness, ReplicationResult, SelfReplication,
};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::chain::{DiscriminantTower, Tower};
use crate::error::{Error, Result};
use crate::perm::{PermGroupBSGS, Permutation};

pub const DEFAULT_WINDOW: usize = 3;

/// The images `S_ℓ^{(k)}` of `D_{ℓ+k}` in `D_ℓ` for `k = 0..=W`.
#[derive(Clone, Debug)]
pub struct StableImage {
    pub level: usize,
    pub window: usize,
    /// `|S_ℓ^{(k)}|` for `k = 0..=W`; `k = 0` is `|D_ℓ|`.
    pub orders: Vec<BigUint>,
    /// `S_ℓ^{(W)}`.
    pub group: PermGroupBSGS,
    /// `S_ℓ^{(W−1)} = S_ℓ^{(W)}`, or `S_ℓ^{(W)}` is trivial.
    pub stabilized: bool,
}

/// Image of `D_from` in `D_to` under the composed bonding maps.
pub fn composed_image<B: Backend>(
    tower: &Tower<B>,
    disc: &DiscriminantTower,
    from: usize,
    to: usize,
) -> Result<PermGroupBSGS> {
    let proj = tower.projection_between(from, to)?;
    let n = tower.level(to)?.size();
    let gens = disc
        .level(from)?
        .discriminant
        .strong_generators()
        .iter()
        .map(|g| g.block_projection(&proj, n))
        .collect::<Result<Vec<Permutation>>>()?;
    PermGroupBSGS::build_with_base(&gens, n, &[0])
}

pub fn stable_image<B: Backend>(
    tower: &Tower<B>,
    disc: &DiscriminantTower,
    level: usize,
    window: usize,
) -> Result<StableImage> {
    if window == 0 {
        return Err(Error::ConfigInvalid("window must be at least 1".into()));
    }
    let available = disc.levels.len().min(tower.levels().len());
    if level + window >= available {
        return Err(Error::InsufficientDepth { needed: level + window + 1, available });
    }
    let mut images = vec![disc.level(level)?.discriminant.clone()];
    for k in 1..=window {
        let s = composed_image(tower, disc, level + k, level)?;
        if !s.is_subgroup_of(&images[k - 1])? {
            return Err(Error::ChainInconsistent(format!(
                "stable images at level {level} are not nested at step {k}"
            )));
        }
        images.push(s);
    }
    let last = images.pop().expect("window >= 1");
    let stabilized = last.is_trivial() || last.same_group(&images[window - 1])?;
    let mut orders: Vec<BigUint> = images.iter().map(|g| g.order().clone()).collect();
    orders.push(last.order().clone());
    Ok(StableImage { level, window, orders, group: last, stabilized })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    TrivialInLimit,
    FiniteStable { order: u64 },
    Growing,
    Undetermined,
}

impl VerdictKind {
    pub fn label(&self) -> String {
        match self {
            VerdictKind::TrivialInLimit => "TrivialInLimit".into(),
            VerdictKind::FiniteStable { order } => format!("FiniteStable({order})"),
            VerdictKind::Growing => "Growing".into(),
            VerdictKind::Undetermined => "Undetermined".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StableImageSummary {
    pub level: usize,
    /// Decimal strings, `k = 0..=W`.
    pub orders: Vec<String>,
    pub stabilized: bool,
}

/// Finite-depth evidence for the trichotomy trivial / finite / infinite of
/// the limit discriminant group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub evidence_depth: usize,
    pub window: usize,
    pub stable_images: Vec<StableImageSummary>,
}

/// Classification over the levels `ℓ = 1..=depth−W`:
///
/// * every `S_ℓ^{(W)}` trivial: `TrivialInLimit`;
/// * every `S_ℓ^{(W)}` stabilized, of one order `c`, and the bonding
///   `D_{ℓ+1} → D_ℓ` carrying `S_{ℓ+1}^{(W−1)}` bijectively onto
///   `S_ℓ^{(W)}` (equal orders): `FiniteStable(c)`;
/// * `|D_ℓ|` strictly increasing over `1..=depth` with every bonding
///   surjective: `Growing`;
/// * otherwise `Undetermined`.
pub fn classify_discriminant<B: Backend>(
    tower: &Tower<B>,
    disc: &DiscriminantTower,
    window: usize,
) -> Result<Verdict> {
    let depth = disc.depth().min(tower.depth());
    if window == 0 {
        return Err(Error::ConfigInvalid("window must be at least 1".into()));
    }
    if depth < window + 1 {
        return Err(Error::InsufficientDepth { needed: window + 2, available: depth + 1 });
    }
    let images = (1..=depth - window)
        .map(|l| stable_image(tower, disc, l, window))
        .collect::<Result<Vec<_>>>()?;
    let summaries = images
        .iter()
        .map(|s| StableImageSummary {
            level: s.level,
            orders: s.orders.iter().map(BigUint::to_string).collect(),
            stabilized: s.stabilized,
        })
        .collect();
    let kind = decide(tower, disc, &images, window, depth)?;
    Ok(Verdict { kind, evidence_depth: depth, window, stable_images: summaries })
}

fn decide<B: Backend>(
    tower: &Tower<B>,
    disc: &DiscriminantTower,
    images: &[StableImage],
    window: usize,
    depth: usize,
) -> Result<VerdictKind> {
    if images.iter().all(|s| s.group.is_trivial()) {
        return Ok(VerdictKind::TrivialInLimit);
    }
    let c = images[0].group.order();
    if images.iter().all(|s| s.stabilized && s.group.order() == c) {
        let mut bijective = true;
        for s in images {
            let above = composed_image(tower, disc, s.level + window, s.level + 1)?;
            if above.order() != c {
                bijective = false;
                break;
            }
        }
        if bijective {
            if let Some(order) = c.to_u64() {
                return Ok(VerdictKind::FiniteStable { order });
            }
        }
    }
    let orders: Vec<&BigUint> = (1..=depth).map(|l| disc.levels[l].discriminant.order()).collect();
    let increasing = orders.windows(2).all(|w| w[0] < w[1]);
    let surjective = disc.bondings[..depth].iter().all(|b| b.surjective);
    if increasing && surjective {
        return Ok(VerdictKind::Growing);
    }
    Ok(VerdictKind::Undetermined)
}
