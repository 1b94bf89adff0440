use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::search_words;
use crate::backend::{Backend, WreathAutomaton, Word};
use crate::chain::{ChainKind, LevelAction, Tower};
use crate::error::{Error, Result};

/// A word whose action on `X_L` fixes the basepoint cylinder `U_k`
/// pointwise but is not the identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QaWitness {
    #[serde(skip)]
    pub word: Word,
    #[serde(rename = "word")]
    pub word_text: String,
    pub level: usize,
    pub cylinder_depth: usize,
    pub cylinder_size: usize,
    pub moved_point: u32,
    pub moved_to: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum QaOutcome {
    Witness(QaWitness),
    NoneFound { level: usize, cylinder_depth: usize, word_bound: usize },
}

impl QaOutcome {
    pub fn witness(&self) -> Option<&QaWitness> {
        match self {
            QaOutcome::Witness(w) => Some(w),
            QaOutcome::NoneFound { .. } => None,
        }
    }
}

fn moves<B: Backend>(backend: &B, action: &LevelAction<B>, g: &B::Element, x: u32) -> Result<Option<u32>> {
    let y = action.locate(backend, &backend.multiply(g, &action.representatives()[x as usize]))?;
    Ok((y != x).then_some(y))
}

fn first_moved_point<B: Backend>(backend: &B, action: &LevelAction<B>, g: &B::Element) -> Result<Option<(u32, u32)>> {
    for x in 0..action.size() as u32 {
        if let Some(y) = moves(backend, action, g, x)? {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// Breadth-first search for a word of length at most `bound` acting on
/// `X_level` trivially on the cylinder `U_depth` but not on all of `X_level`.
pub fn qa_witness_search<B: Backend>(
    tower: &Tower<B>,
    level: usize,
    cylinder_depth: usize,
    bound: usize,
) -> Result<QaOutcome> {
    if cylinder_depth >= level {
        return Err(Error::ConfigInvalid(format!(
            "cylinder depth {cylinder_depth} must be below the level {level}"
        )));
    }
    let backend = tower.backend();
    let action = tower.level(level)?;
    let cylinder = tower.basepoint_cylinder(cylinder_depth, level)?;
    let base_token = backend.coset_id(&backend.identity(), level)?;
    let names = backend.generator_names();
    let mut found = None;
    search_words(backend, bound, |g| backend.key(g), |word, g| {
        if backend.coset_id(g, level)? != base_token {
            return Ok(false);
        }
        for &x in &cylinder {
            if moves(backend, action, g, x)?.is_some() {
                return Ok(false);
            }
        }
        if let Some((x, y)) = first_moved_point(backend, action, g)? {
            found = Some(QaWitness {
                word: word.clone(),
                word_text: word.display(&names),
                level,
                cylinder_depth,
                cylinder_size: cylinder.len(),
                moved_point: x,
                moved_to: y,
            });
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(match found {
        Some(w) => QaOutcome::Witness(w),
        None => QaOutcome::NoneFound { level, cylinder_depth, word_bound: bound },
    })
}

/// Replays the witness through the generator permutations of the tower.
pub fn validate_witness<B: Backend>(tower: &Tower<B>, witness: &QaWitness) -> Result<bool> {
    let perm = tower.word_action(&witness.word, witness.level)?;
    let cylinder = tower.basepoint_cylinder(witness.cylinder_depth, witness.level)?;
    let fixes_cylinder = cylinder.iter().all(|&x| perm.apply(x) == x);
    let moves_point = witness.moved_point != witness.moved_to && perm.apply(witness.moved_point) == witness.moved_to;
    Ok(fixes_cylinder && moves_point)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelWord {
    #[serde(skip)]
    pub word: Word,
    #[serde(rename = "word")]
    pub word_text: String,
    /// Acts as the identity on all of `X_L`.
    pub acts_trivially: bool,
}

/// Distinct nonidentity elements of word length at most `bound` lying in
/// `Γ_L` (fixing the basepoint of `X_L`), each by its first word.
pub fn kernel_probe<B: Backend>(tower: &Tower<B>, level: usize, bound: usize) -> Result<Vec<KernelWord>> {
    let backend = tower.backend();
    let action = tower.level(level)?;
    let base_token = backend.coset_id(&backend.identity(), level)?;
    let names = backend.generator_names();
    let mut out = Vec::new();
    search_words(backend, bound, |g| backend.key(g), |word, g| {
        if backend.coset_id(g, level)? == base_token {
            out.push(KernelWord {
                word: word.clone(),
                word_text: word.display(&names),
                acts_trivially: first_moved_point(backend, action, g)?.is_none(),
            });
        }
        Ok(false)
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractingLevel {
    pub level: usize,
    /// Smallest `n ≤ max_iterate` with `φⁿ(g)` trivial on `X_ℓ`.
    pub trivial_at: Option<usize>,
    pub max_iterate: usize,
}

/// For each level `ℓ ≤ max_level`, the first iterate `φⁿ(g)` acting
/// trivially on `X_ℓ`.
pub fn contracting_probe<B: Backend>(
    tower: &Tower<B>,
    g: &B::Element,
    max_level: usize,
    max_iterate: usize,
) -> Result<Vec<ContractingLevel>> {
    if tower.kind() != ChainKind::Renormalization {
        return Err(Error::UnsupportedForChainKind("the contracting probe needs a renormalization chain".into()));
    }
    let backend = tower.backend();
    tower.level(max_level)?;
    let out = (0..=max_level)
        .into_par_iter()
        .map(|level| {
            let action = tower.level(level)?;
            let mut h = g.clone();
            for n in 0..=max_iterate {
                if n > 0 {
                    h = backend.apply_phi(&h)?;
                }
                if first_moved_point(backend, action, &h)?.is_none() {
                    return Ok(ContractingLevel { level, trivial_at: Some(n), max_iterate });
                }
            }
            Ok(ContractingLevel { level, trivial_at: None, max_iterate })
        })
        .collect::<Result<Vec<_>>>()?;
    for pair in out.windows(2) {
        if let Some(n) = pair[1].trivial_at {
            if pair[0].trivial_at.is_none_or(|m| m > n) {
                return Err(Error::ChainInconsistent(format!(
                    "φ^{n}(g) acts trivially at level {} but not at level {}",
                    pair[1].level, pair[0].level
                )));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub generator: String,
    /// A word `h` fixing the vertex whose section there acts as the generator.
    pub word: Option<String>,
    pub section: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelfReplication {
    pub passed: bool,
    pub vertex: Vec<u32>,
    pub word_bound: usize,
    pub depth: usize,
    pub results: Vec<ReplicationResult>,
}

/// Searches, for every generator `g`, a word `h` of length at most `bound`
/// fixing the first vertex of the basepoint path with `h|_v = g` on the
/// first `depth` levels.
pub fn self_replicating_probe(automaton: &WreathAutomaton, bound: usize, depth: usize) -> Result<SelfReplication> {
    let vertex = automaton.basepoint_prefix(1);
    let names = automaton.generator_names();
    let targets: Vec<Vec<u32>> = automaton
        .generators()
        .iter()
        .map(|g| automaton.level_permutation(g, depth).into_images())
        .collect();
    let mut results: Vec<ReplicationResult> = names
        .iter()
        .map(|n| ReplicationResult { generator: n.clone(), word: None, section: None })
        .collect();
    let mut missing = targets.len();
    search_words(
        automaton,
        bound,
        |h| automaton.level_permutation(h, depth + 1).into_images(),
        |word, h| {
            if automaton.apply(h, &vertex) != vertex {
                return Ok(false);
            }
            let section = automaton.section_at(h, &vertex)?;
            let action = automaton.level_permutation(&section, depth).into_images();
            for (i, t) in targets.iter().enumerate() {
                if results[i].word.is_none() && *t == action {
                    results[i].word = Some(word.display(&names));
                    results[i].section = Some(automaton.display(&section));
                    missing -= 1;
                }
            }
            Ok(missing == 0)
        },
    )?;
    Ok(SelfReplication { passed: missing == 0, vertex, word_bound: bound, depth, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::HeisenbergGroup;
    use crate::chain::ChainSpec;

    #[test]
    fn odometer_has_no_witness() {
        let t = Tower::build(WreathAutomaton::odometer(), ChainSpec::new(ChainKind::Renormalization, 6)).unwrap();
        assert!(qa_witness_search(&t, 6, 1, 12).unwrap().witness().is_none());
    }

    #[test]
    fn grigorchuk_witness_replays() {
        let t = Tower::build(WreathAutomaton::grigorchuk(), ChainSpec::new(ChainKind::VertexStabilizer, 6)).unwrap();
        let out = qa_witness_search(&t, 6, 1, 12).unwrap();
        let w = out.witness().expect("witness");
        assert!(validate_witness(&t, w).unwrap());
        assert_eq!(w.word_text, "d");
    }

    #[test]
    fn heisenberg_contracting_center() {
        let h = HeisenbergGroup::<i64>::new(2, 3).unwrap();
        let t = Tower::build(h.clone(), ChainSpec::new(ChainKind::Renormalization, 2)).unwrap();
        let c = crate::backend::HeisenbergElement::new(0, 0, 1);
        let out = contracting_probe(&t, &c, 2, 5).unwrap();
        assert_eq!(out.iter().map(|l| l.trivial_at).collect::<Vec<_>>(), vec![Some(0), Some(1), Some(2)]);
        let id = contracting_probe(&t, &h.identity(), 2, 5).unwrap();
        assert!(id.iter().all(|l| l.trivial_at == Some(0)));
    }

    #[test]
    fn replication() {
        assert!(self_replicating_probe(&WreathAutomaton::odometer(), 4, 8).unwrap().passed);
        assert!(self_replicating_probe(&WreathAutomaton::grigorchuk(), 10, 8).unwrap().passed);
        assert!(!self_replicating_probe(&WreathAutomaton::rigid_toy(), 10, 8).unwrap().passed);
    }

    #[test]
    fn empty_bound_finds_nothing() {
        let t = Tower::build(HeisenbergGroup::<i64>::new(2, 3).unwrap(), ChainSpec::new(ChainKind::Renormalization, 1))
            .unwrap();
        assert!(kernel_probe(&t, 1, 0).unwrap().is_empty());
    }
}
