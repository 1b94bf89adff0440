use std::marker::PhantomData;

use serde_json::{json, Value};

use super::{decode_error, Backend};
use crate::error::{Error, Result};
use crate::scalar::Coord;

/// `(x, y, z)` with `(x,y,z)(u,v,w) = (x+u, y+v, z+w+xv)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisenbergElement<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Coord> HeisenbergElement<T> {
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        let c = |v: i64| T::from_i64(v).expect("coordinate");
        HeisenbergElement { x: c(x), y: c(y), z: c(z) }
    }
}

/// The integer Heisenberg group with `φ(x,y,z) = (px, qy, pqz)`.
///
/// `Γ_ℓ = φ^ℓ(Γ) = {(p^ℓ x, q^ℓ y, (pq)^ℓ z)}` has index `(pq)^{2ℓ}`.
#[derive(Clone, Debug)]
pub struct HeisenbergGroup<T> {
    p: u64,
    q: u64,
    _coord: PhantomData<T>,
}

impl<T: Coord> HeisenbergGroup<T> {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::ConfigInvalid(format!(
                "heisenberg requires p, q >= 2 (got p={p}, q={q})"
            )));
        }
        Ok(HeisenbergGroup { p, q, _coord: PhantomData })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn power(&self, base: u64, level: usize) -> Result<T> {
        T::checked_power(base, level).ok_or(Error::LevelBudgetExceeded { level })
    }
}

impl<T: Coord> Backend for HeisenbergGroup<T> {
    type Element = HeisenbergElement<T>;
    type Token = (T, T, T);
    type Key = HeisenbergElement<T>;

    fn name(&self) -> &'static str {
        "heisenberg"
    }

    fn identity(&self) -> Self::Element {
        HeisenbergElement { x: T::zero(), y: T::zero(), z: T::zero() }
    }

    fn multiply(&self, g: &Self::Element, h: &Self::Element) -> Self::Element {
        HeisenbergElement {
            x: g.x.clone() + h.x.clone(),
            y: g.y.clone() + h.y.clone(),
            z: g.z.clone() + h.z.clone() + g.x.clone() * h.y.clone(),
        }
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        HeisenbergElement {
            x: -g.x.clone(),
            y: -g.y.clone(),
            z: g.x.clone() * g.y.clone() - g.z.clone(),
        }
    }

    fn generators(&self) -> Vec<Self::Element> {
        vec![
            HeisenbergElement::new(1, 0, 0),
            HeisenbergElement::new(0, 1, 0),
            HeisenbergElement::new(0, 0, 1),
        ]
    }

    fn generator_names(&self) -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }

    fn supports_phi(&self) -> bool {
        true
    }

    fn apply_phi(&self, g: &Self::Element) -> Result<Self::Element> {
        let p = T::from_small(self.p);
        let q = T::from_small(self.q);
        Ok(HeisenbergElement {
            x: p.clone() * g.x.clone(),
            y: q.clone() * g.y.clone(),
            z: p * q * g.z.clone(),
        })
    }

    /// Right multiplication by `(p^ℓu, q^ℓv, (pq)^ℓw)` shifts `z` by
    /// `(pq)^ℓ w + x q^ℓ v`; reducing `x`, then `y`, then `z` is a complete
    /// invariant of `gΓ_ℓ`.
    fn coset_id(&self, g: &Self::Element, level: usize) -> Result<Self::Token> {
        let pl = self.power(self.p, level)?;
        let ql = self.power(self.q, level)?;
        let m = self.power(self.p * self.q, level)?;
        let x = g.x.mod_floor(&pl);
        let y = g.y.mod_floor(&ql);
        let v = (y.clone() - g.y.clone()) / ql.clone();
        let z = (g.z.clone() + g.x.clone() * ql * v).mod_floor(&m);
        Ok((x, y, z))
    }

    fn key(&self, g: &Self::Element) -> Self::Key {
        g.clone()
    }

    fn encode(&self, g: &Self::Element) -> Value {
        json!([g.x.to_json(), g.y.to_json(), g.z.to_json()])
    }

    fn decode(&self, v: &Value) -> Result<Self::Element> {
        match v.as_array().map(Vec::as_slice) {
            Some([x, y, z]) => Ok(HeisenbergElement {
                x: T::from_json(x)?,
                y: T::from_json(y)?,
                z: T::from_json(z)?,
            }),
            _ => Err(decode_error(self.name(), v)),
        }
    }

    fn describe(&self) -> Value {
        json!({"name": "heisenberg", "p": self.p, "q": self.q})
    }
}
