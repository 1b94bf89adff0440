use std::collections::{HashMap, HashSet};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{PermGroupBSGS, Permutation};
use crate::error::{Error, Result};

/// Largest group order `abelian_invariants` will enumerate.
pub const ABELIAN_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Isomorphism type of a finite abelian group as invariant factors
/// `d_1 | d_2 | … | d_r` (empty for the trivial group).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbelianShape {
    Abelian(Vec<u64>),
    NonAbelian,
}

impl AbelianShape {
    pub fn is_cyclic(&self) -> bool {
        matches!(self, AbelianShape::Abelian(f) if f.len() <= 1)
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            AbelianShape::Abelian(f) => Some(f.iter().product()),
            AbelianShape::NonAbelian => None,
        }
    }

    /// `Z/6`, `Z/2 x Z/2`, `1`, or `non-abelian`.
    pub fn label(&self) -> String {
        match self {
            AbelianShape::NonAbelian => "non-abelian".into(),
            AbelianShape::Abelian(f) if f.is_empty() => "1".into(),
            AbelianShape::Abelian(f) => f
                .iter()
                .map(|d| format!("Z/{d}"))
                .collect::<Vec<_>>()
                .join(" x "),
        }
    }
}

/// Invariant factors of the group generated by `generators`.
///
/// Repeatedly extracts an element of maximal order modulo the subgroup
/// found so far; a cyclic subgroup of maximal order in a finite abelian
/// group is a direct summand, so the extracted orders are the invariant
/// factors from the top down.
pub fn abelian_invariants(generators: &[Permutation]) -> Result<AbelianShape> {
    let Some(first) = generators.first() else {
        return Ok(AbelianShape::Abelian(Vec::new()));
    };
    let degree = first.degree();
    for (i, a) in generators.iter().enumerate() {
        if a.degree() != degree {
            return Err(Error::DegreeMismatch { left: degree, right: a.degree() });
        }
        for b in &generators[i + 1..] {
            if a.after(b) != b.after(a) {
                return Ok(AbelianShape::NonAbelian);
            }
        }
    }

    let group = PermGroupBSGS::build(generators, degree)?;
    let order = group
        .order()
        .to_u64()
        .filter(|&o| o <= ABELIAN_ENUMERATION_BUDGET)
        .ok_or_else(|| Error::TooLarge {
            order: group.order().to_string(),
            budget: ABELIAN_ENUMERATION_BUDGET,
        })?;

    // The group acts faithfully on the union of its base-point orbits.
    let mut support: Vec<u32> = group.base().iter().flat_map(|&b| group.orbit_of(b)).collect();
    support.sort_unstable();
    support.dedup();
    let mut relabel = vec![u32::MAX; degree];
    for (i, &x) in support.iter().enumerate() {
        relabel[x as usize] = i as u32;
    }
    let restricted: Vec<Permutation> = generators
        .iter()
        .map(|g| {
            Permutation::from_images_unchecked(
                support.iter().map(|&x| relabel[g.apply(x) as usize]).collect(),
            )
        })
        .collect();

    let elements = enumerate(&restricted, support.len());
    debug_assert_eq!(elements.len() as u64, order);
    let index: HashMap<&Permutation, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let orders: Vec<u64> = elements.iter().map(Permutation::order).collect();

    let mut subgroup: HashSet<usize> = HashSet::from([0]);
    let mut factors = Vec::new();
    while (subgroup.len() as u64) < order {
        let mut best: Option<(u64, usize)> = None;
        for (i, x) in elements.iter().enumerate() {
            if subgroup.contains(&i) {
                continue;
            }
            let k = order_modulo(x, orders[i], &subgroup, &index);
            if best.is_none_or(|(bk, _)| k > bk) {
                best = Some((k, i));
            }
        }
        let (k, i) = best.expect("proper subgroup has an element outside");
        let x = &elements[i];
        let mut grown = HashSet::with_capacity(subgroup.len() * k as usize);
        for &h in &subgroup {
            let mut y = elements[h].clone();
            for _ in 0..k {
                grown.insert(index[&y]);
                y = y.after(x);
            }
        }
        subgroup = grown;
        factors.push(k);
    }
    factors.reverse();
    Ok(AbelianShape::Abelian(factors))
}

fn order_modulo(
    x: &Permutation,
    ord: u64,
    subgroup: &HashSet<usize>,
    index: &HashMap<&Permutation, usize>,
) -> u64 {
    let mut divisors: Vec<u64> = (1..=ord).take_while(|d| d * d <= ord).filter(|d| ord.is_multiple_of(*d)).flat_map(|d| [d, ord / d]).collect();
    divisors.sort_unstable();
    divisors.dedup();
    for d in divisors {
        if subgroup.contains(&index[&x.pow(d as i64)]) {
            return d;
        }
    }
    ord
}

fn enumerate(generators: &[Permutation], degree: usize) -> Vec<Permutation> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    let id = Permutation::identity(degree);
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut pos = 0;
    while pos < out.len() {
        for g in generators {
            let y = g.after(&out[pos]);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
        pos += 1;
    }
    out
}
