//! Integer coordinate types for the arithmetic backends.
//!
//! The Heisenberg, lattice and affine backends are written once against
//! [`Coord`]; the crate root fixes the concrete choices (`i64` for the
//! lattice-coordinate groups, `BigInt` for the affine group whose
//! translations pick up powers of 5).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use serde_json::Value;

use crate::error::{Error, Result};

pub trait Coord:
    Integer
    + Signed
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_small(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("coordinate type too narrow")
    }

    /// `base^exp`, or `None` when the result leaves the representable range.
    fn checked_power(base: u64, exp: usize) -> Option<Self>;

    fn to_json(&self) -> Value {
        match self.to_i64() {
            Some(v) => Value::from(v),
            None => Value::String(self.to_string()),
        }
    }

    fn from_json(v: &Value) -> Result<Self>;
}

fn parse_json_int<T: FromPrimitive + std::str::FromStr>(v: &Value) -> Result<T> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .and_then(T::from_i64)
            .ok_or_else(|| Error::ConfigInvalid(format!("integer out of range: {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::ConfigInvalid(format!("not an integer: {s:?}"))),
        other => Err(Error::ConfigInvalid(format!("expected integer, got {other}"))),
    }
}

macro_rules! prim_coord {
    ($($t:ty),*) => {$(
        impl Coord for $t {
            fn checked_power(base: u64, exp: usize) -> Option<Self> {
                let base = <$t>::try_from(base).ok()?;
                base.checked_pow(u32::try_from(exp).ok()?)
            }

            fn from_json(v: &Value) -> Result<Self> {
                parse_json_int(v)
            }
        }
    )*};
}

prim_coord!(i32, i64, i128);

impl Coord for BigInt {
    fn checked_power(base: u64, exp: usize) -> Option<Self> {
        Some(num_traits::pow(BigInt::from(base), exp))
    }

    fn from_json(v: &Value) -> Result<Self> {
        parse_json_int(v)
    }
}
