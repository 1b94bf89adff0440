#![allow(dead_code)]

use std::collections::HashSet;

use renormlab::backend::{Backend, WreathAutomaton};
use renormlab::chain::{ChainKind, ChainSpec, Tower};
use renormlab::perm::Permutation;
use renormlab::{AffineUnit, Heisenberg, LatticeSemidirect};

/// Product of generators (or inverses) from left to right.
pub fn element<B: Backend>(b: &B, letters: &[(usize, bool)]) -> B::Element {
    let gens = b.generators();
    letters.iter().fold(b.identity(), |acc, &(i, inv)| {
        let g = &gens[i % gens.len()];
        let g = if inv { b.invert(g) } else { g.clone() };
        b.multiply(&acc, &g)
    })
}

pub fn heisenberg_23(depth: usize) -> Tower<Heisenberg> {
    Tower::build(Heisenberg::new(2, 3).unwrap(), ChainSpec::new(ChainKind::Renormalization, depth)).unwrap()
}

pub fn heisenberg_22(depth: usize) -> Tower<Heisenberg> {
    Tower::build(Heisenberg::new(2, 2).unwrap(), ChainSpec::new(ChainKind::Renormalization, depth)).unwrap()
}

pub fn lattice() -> LatticeSemidirect {
    LatticeSemidirect::new(3, 2, vec![vec![1, 2, 0]]).unwrap()
}

pub fn lattice_tower(depth: usize) -> Tower<LatticeSemidirect> {
    Tower::build(lattice(), ChainSpec::new(ChainKind::Renormalization, depth)).unwrap()
}

pub fn affine_tower(depth: usize) -> Tower<AffineUnit> {
    Tower::build(AffineUnit::new(), ChainSpec::new(ChainKind::Renormalization, depth)).unwrap()
}

pub fn odometer_tower(depth: usize) -> Tower<WreathAutomaton> {
    Tower::build(WreathAutomaton::odometer(), ChainSpec::new(ChainKind::Renormalization, depth)).unwrap()
}

pub fn grigorchuk_tower(depth: usize) -> Tower<WreathAutomaton> {
    Tower::build(WreathAutomaton::grigorchuk(), ChainSpec::new(ChainKind::VertexStabilizer, depth)).unwrap()
}

pub fn toy_tower(depth: usize) -> Tower<WreathAutomaton> {
    Tower::build(WreathAutomaton::rigid_toy(), ChainSpec::new(ChainKind::VertexStabilizer, depth)).unwrap()
}

/// All elements of the group generated by `gens`, by breadth-first closure.
pub fn closure(gens: &[Permutation], degree: usize, limit: usize) -> Option<HashSet<Vec<u32>>> {
    let id: Vec<u32> = (0..degree as u32).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y: Vec<u32> = x.iter().map(|&i| g.apply(i)).collect();
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(seen)
}
