use std::marker::PhantomData;

use serde_json::{json, Value};

use super::{decode_error, Backend};
use crate::error::{Error, Result};
use crate::perm::{PermGroupBSGS, Permutation};
use crate::scalar::Coord;

/// `(v, h)` in `ℤ^k ⋊ H`, `h` a permutation of the coordinate axes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeElement<T> {
    pub v: Vec<T>,
    pub h: Vec<u32>,
}

/// `ℤ^k ⋊ H` with `H ⊂ Sym(k)` permuting coordinates and `φ(v, h) = (m·v, h)`.
///
/// Product: `(v,h)(u,k) = (v + h·u, hk)` where `(h·u)_{h(i)} = u_i`.
/// Generators: the unit vectors `e1..ek`, then the generators of `H`
/// (`h1, h2, …`).
#[derive(Clone, Debug)]
pub struct LatticeGroup<T> {
    rank: usize,
    scale: u64,
    h_generators: Vec<Vec<u32>>,
    _coord: PhantomData<T>,
}

impl<T: Coord> LatticeGroup<T> {
    pub fn new(rank: usize, scale: u64, h_generators: Vec<Vec<u32>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ConfigInvalid("lattice rank k must be positive".into()));
        }
        if scale < 2 {
            return Err(Error::ConfigInvalid(format!("lattice scale m must be >= 2 (got {scale})")));
        }
        for h in &h_generators {
            if h.len() != rank {
                return Err(Error::ConfigInvalid(format!(
                    "H generator {h:?} is not a permutation of {rank} symbols"
                )));
            }
            Permutation::from_images(h.clone())
                .map_err(|e| Error::ConfigInvalid(format!("H generator {h:?}: {e}")))?;
        }
        Ok(LatticeGroup { rank, scale, h_generators, _coord: PhantomData })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Order of the finite group `H`.
    pub fn h_order(&self) -> num_bigint::BigUint {
        let gens: Vec<Permutation> = self
            .h_generators
            .iter()
            .map(|h| Permutation::from_images(h.clone()).expect("validated"))
            .collect();
        PermGroupBSGS::build(&gens, self.rank).expect("validated").order().clone()
    }

    fn act(&self, h: &[u32], u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rank];
        for (i, ui) in u.iter().enumerate() {
            out[h[i] as usize] = ui.clone();
        }
        out
    }
}

impl<T: Coord> Backend for LatticeGroup<T> {
    type Element = LatticeElement<T>;
    type Token = Vec<T>;
    type Key = LatticeElement<T>;

    fn name(&self) -> &'static str {
        "lattice"
    }

    fn identity(&self) -> Self::Element {
        LatticeElement {
            v: vec![T::zero(); self.rank],
            h: (0..self.rank as u32).collect(),
        }
    }

    fn multiply(&self, g: &Self::Element, k: &Self::Element) -> Self::Element {
        let hu = self.act(&g.h, &k.v);
        LatticeElement {
            v: g.v.iter().zip(hu).map(|(a, b)| a.clone() + b).collect(),
            h: k.h.iter().map(|&i| g.h[i as usize]).collect(),
        }
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        // (v,h)^{-1} = (-h^{-1}·v, h^{-1})
        let mut h_inv = vec![0u32; self.rank];
        for (i, &x) in g.h.iter().enumerate() {
            h_inv[x as usize] = i as u32;
        }
        let neg: Vec<T> = g.v.iter().map(|a| -a.clone()).collect();
        LatticeElement { v: self.act(&h_inv, &neg), h: h_inv }
    }

    fn generators(&self) -> Vec<Self::Element> {
        let id = self.identity();
        let mut out: Vec<Self::Element> = (0..self.rank)
            .map(|i| {
                let mut v = vec![T::zero(); self.rank];
                v[i] = T::one();
                LatticeElement { v, h: id.h.clone() }
            })
            .collect();
        out.extend(self.h_generators.iter().map(|h| LatticeElement {
            v: vec![T::zero(); self.rank],
            h: h.clone(),
        }));
        out
    }

    fn generator_names(&self) -> Vec<String> {
        (1..=self.rank)
            .map(|i| format!("e{i}"))
            .chain((1..=self.h_generators.len()).map(|i| format!("h{i}")))
            .collect()
    }

    fn supports_phi(&self) -> bool {
        true
    }

    fn apply_phi(&self, g: &Self::Element) -> Result<Self::Element> {
        let m = T::from_small(self.scale);
        Ok(LatticeElement {
            v: g.v.iter().map(|a| a.clone() * m.clone()).collect(),
            h: g.h.clone(),
        })
    }

    /// `Γ_ℓ = m^ℓ ℤ^k ⋊ H`, so the coset is determined by `v mod m^ℓ`.
    fn coset_id(&self, g: &Self::Element, level: usize) -> Result<Self::Token> {
        let modulus = T::checked_power(self.scale, level).ok_or(Error::LevelBudgetExceeded { level })?;
        Ok(g.v.iter().map(|a| a.mod_floor(&modulus)).collect())
    }

    fn key(&self, g: &Self::Element) -> Self::Key {
        g.clone()
    }

    fn encode(&self, g: &Self::Element) -> Value {
        json!({
            "v": g.v.iter().map(Coord::to_json).collect::<Vec<_>>(),
            "h": g.h,
        })
    }

    fn decode(&self, v: &Value) -> Result<Self::Element> {
        let err = || decode_error(self.name(), v);
        let vec = v.get("v").and_then(Value::as_array).ok_or_else(err)?;
        let h = v.get("h").and_then(Value::as_array).ok_or_else(err)?;
        if vec.len() != self.rank || h.len() != self.rank {
            return Err(err());
        }
        let h: Vec<u32> = h
            .iter()
            .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(err))
            .collect::<Result<_>>()?;
        Permutation::from_images(h.clone()).map_err(|_| err())?;
        Ok(LatticeElement {
            v: vec.iter().map(T::from_json).collect::<Result<_>>()?,
            h,
        })
    }

    fn describe(&self) -> Value {
        json!({"name": "lattice", "k": self.rank, "m": self.scale, "h": self.h_generators})
    }
}
