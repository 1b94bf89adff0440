use std::marker::PhantomData;

use serde_json::{json, Value};

use super::{decode_error, Backend};
use crate::error::{Error, Result};
use crate::scalar::Coord;

/// `num / 5^exp`, normalized so that `5 ∤ num` whenever `exp > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FracFive<T> {
    num: T,
    exp: u32,
}

impl<T: Coord> FracFive<T> {
    pub fn new(num: T, exp: u32) -> Self {
        let mut f = FracFive { num, exp };
        f.normalize();
        f
    }

    pub fn integer(num: T) -> Self {
        FracFive { num, exp: 0 }
    }

    pub fn zero() -> Self {
        Self::integer(T::zero())
    }

    pub fn numerator(&self) -> &T {
        &self.num
    }

    pub fn denominator_exp(&self) -> u32 {
        self.exp
    }

    fn five() -> T {
        T::from_small(5)
    }

    fn normalize(&mut self) {
        let five = Self::five();
        while self.exp > 0 && self.num.is_multiple_of(&five) {
            self.num = self.num.clone() / five.clone();
            self.exp -= 1;
        }
        if self.num.is_zero() {
            self.exp = 0;
        }
    }

    fn add(&self, other: &Self) -> Self {
        let e = self.exp.max(other.exp);
        let lift = |f: &Self| f.num.clone() * num_traits::pow(Self::five(), (e - f.exp) as usize);
        Self::new(lift(self) + lift(other), e)
    }

    /// Multiplies by `±5^k`.
    fn scale(&self, negate: bool, k: i64) -> Self {
        let num = if negate { -self.num.clone() } else { self.num.clone() };
        if k >= 0 {
            Self::new(num * num_traits::pow(Self::five(), k as usize), self.exp)
        } else {
            Self::new(num, self.exp + k.unsigned_abs() as u32)
        }
    }

    fn double(&self) -> Self {
        Self::new(self.num.clone() * T::from_small(2), self.exp)
    }

    /// Residue in `ℤ/2^level`, using that 5 is a unit there.
    fn residue_mod_power_of_two(&self, level: usize) -> Result<T> {
        let modulus = T::checked_power(2, level).ok_or(Error::LevelBudgetExceeded { level })?;
        if modulus.is_one() {
            return Ok(T::zero());
        }
        let inv5 = Self::five().extended_gcd(&modulus).x.mod_floor(&modulus);
        let mut r = self.num.mod_floor(&modulus);
        for _ in 0..self.exp {
            r = (r * inv5.clone()).mod_floor(&modulus);
        }
        Ok(r)
    }
}

/// The affine map `x ↦ (−1)^ε 5^m x + t`, i.e. `a^t b^ε c^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineElement<T> {
    pub negate: bool,
    pub scale_exp: i64,
    pub shift: FracFive<T>,
}

impl<T: Coord> AffineElement<T> {
    /// Image of the integer `x` (only meaningful when it is integral).
    pub fn eval(&self, x: i64) -> FracFive<T> {
        FracFive::integer(T::from_i64(x).expect("coordinate"))
            .scale(self.negate, self.scale_exp)
            .add(&self.shift)
    }
}

/// `ℤ[1/5] ⋊ (ℤ/2 × ℤ)` realized as affine maps of `ℤ[1/5]`:
/// `a: x ↦ x+1`, `b: x ↦ −x`, `c: x ↦ 5x`, multiplied as functions
/// (`(gh)(x) = g(h(x))`), so that `bab⁻¹ = a⁻¹` and `cac⁻¹ = a⁵`.
///
/// `φ(a) = a²`, `φ(b) = b`, `φ(c) = c`; on maps this doubles the
/// translation. `Γ_ℓ = ⟨a^{2^ℓ}, b, c⟩` is the set of maps whose
/// translation lies in `2^ℓ ℤ[1/5]`, so `gΓ_ℓ` is determined by
/// `g(0) mod 2^ℓ`.
#[derive(Clone, Debug, Default)]
pub struct AffineUnitGroup<T> {
    _coord: PhantomData<T>,
}

impl<T: Coord> AffineUnitGroup<T> {
    pub fn new() -> Self {
        AffineUnitGroup { _coord: PhantomData }
    }
}

impl<T: Coord> Backend for AffineUnitGroup<T> {
    type Element = AffineElement<T>;
    type Token = T;
    type Key = AffineElement<T>;

    fn name(&self) -> &'static str {
        "affine-unit"
    }

    fn identity(&self) -> Self::Element {
        AffineElement { negate: false, scale_exp: 0, shift: FracFive::zero() }
    }

    fn multiply(&self, g: &Self::Element, h: &Self::Element) -> Self::Element {
        AffineElement {
            negate: g.negate ^ h.negate,
            scale_exp: g.scale_exp + h.scale_exp,
            shift: h.shift.scale(g.negate, g.scale_exp).add(&g.shift),
        }
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        AffineElement {
            negate: g.negate,
            scale_exp: -g.scale_exp,
            shift: g.shift.scale(!g.negate, -g.scale_exp),
        }
    }

    fn generators(&self) -> Vec<Self::Element> {
        vec![
            AffineElement { negate: false, scale_exp: 0, shift: FracFive::integer(T::one()) },
            AffineElement { negate: true, scale_exp: 0, shift: FracFive::zero() },
            AffineElement { negate: false, scale_exp: 1, shift: FracFive::zero() },
        ]
    }

    fn generator_names(&self) -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }

    fn supports_phi(&self) -> bool {
        true
    }

    fn apply_phi(&self, g: &Self::Element) -> Result<Self::Element> {
        Ok(AffineElement {
            negate: g.negate,
            scale_exp: g.scale_exp,
            shift: g.shift.double(),
        })
    }

    fn coset_id(&self, g: &Self::Element, level: usize) -> Result<Self::Token> {
        g.shift.residue_mod_power_of_two(level)
    }

    fn key(&self, g: &Self::Element) -> Self::Key {
        g.clone()
    }

    fn encode(&self, g: &Self::Element) -> Value {
        json!({
            "negate": g.negate,
            "scale_exp": g.scale_exp,
            "shift": [g.shift.num.to_json(), g.shift.exp],
        })
    }

    fn decode(&self, v: &Value) -> Result<Self::Element> {
        let err = || decode_error(self.name(), v);
        let negate = v.get("negate").and_then(Value::as_bool).ok_or_else(err)?;
        let scale_exp = v.get("scale_exp").and_then(Value::as_i64).ok_or_else(err)?;
        let shift = match v.get("shift").and_then(Value::as_array).map(Vec::as_slice) {
            Some([num, exp]) => {
                let exp = exp.as_u64().ok_or_else(err)? as u32;
                let f = FracFive { num: T::from_json(num)?, exp };
                if FracFive::new(f.num.clone(), exp) != f {
                    return Err(err());
                }
                f
            }
            _ => return Err(err()),
        };
        Ok(AffineElement { negate, scale_exp, shift })
    }

    fn describe(&self) -> Value {
        json!({"name": "affine-unit"})
    }
}
