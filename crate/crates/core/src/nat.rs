//! Arbitrary-precision non-negative integers with an inline word lane.
//!
//! `Nat` keeps values that fit in a `u64` unboxed and promotes to a heap
//! big integer beyond that. All promotions are checked; nothing truncates.
//! Parsing accepts plain decimal plus the expression forms `2^k`, `2^k+c`
//! and `2^k-c`, which is how the interesting witnesses are usually written.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Shl, Shr, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive};

use crate::error::{Error, Result};

/// Ceiling on `k` in parsed `2^k` expressions (bits of the result).
const MAX_PARSED_EXPONENT: u64 = 100_000_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Nat(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(u64),
    /// Invariant: the value does not fit in a `u64`.
    Big(Box<BigUint>),
}

impl Nat {
    pub const ZERO: Nat = Nat(Repr::Small(0));
    pub const ONE: Nat = Nat(Repr::Small(1));

    pub fn from_biguint(v: BigUint) -> Nat {
        match v.to_u64() {
            Some(w) => Nat(Repr::Small(w)),
            None => Nat(Repr::Big(Box::new(v))),
        }
    }

    fn from_u128_value(v: u128) -> Nat {
        if let Ok(w) = u64::try_from(v) {
            Nat(Repr::Small(w))
        } else {
            Nat(Repr::Big(Box::new(BigUint::from(v))))
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(w) => BigUint::from(*w),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(w) => Some(*w),
            Repr::Big(_) => None,
        }
    }

    pub fn to_u128(&self) -> Option<u128> {
        match &self.0 {
            Repr::Small(w) => Some(*w as u128),
            Repr::Big(b) => b.to_u128(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1))
    }

    pub fn is_even(&self) -> bool {
        match &self.0 {
            Repr::Small(w) => w & 1 == 0,
            Repr::Big(b) => !b.bit(0),
        }
    }

    pub fn is_odd(&self) -> bool {
        !self.is_even()
    }

    /// Number of bits in the value; 0 for zero.
    pub fn bit_length(&self) -> u64 {
        match &self.0 {
            Repr::Small(w) => (64 - w.leading_zeros()) as u64,
            Repr::Big(b) => b.bits(),
        }
    }

    /// 2-adic valuation. `None` for zero.
    pub fn trailing_zeros(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(w) => {
                if *w == 0 {
                    None
                } else {
                    Some(w.trailing_zeros() as u64)
                }
            }
            Repr::Big(b) => b.trailing_zeros(),
        }
    }

    /// The low `t` bits, i.e. the value mod 2^t.
    pub fn low_bits(&self, t: u64) -> Nat {
        if t >= self.bit_length() {
            return self.clone();
        }
        match &self.0 {
            Repr::Small(w) => Nat(Repr::Small(w & ((1u64 << t) - 1))),
            Repr::Big(b) => {
                let mask = (BigUint::one() << t) - BigUint::one();
                Nat::from_biguint(&**b & mask)
            }
        }
    }

    pub fn checked_sub(&self, rhs: &Nat) -> Option<Nat> {
        match (&self.0, &rhs.0) {
            (Repr::Small(a), Repr::Small(b)) => a.checked_sub(*b).map(|w| Nat(Repr::Small(w))),
            (Repr::Small(_), Repr::Big(_)) => None,
            (Repr::Big(a), Repr::Small(b)) => Some(Nat::from_biguint(&**a - BigUint::from(*b))),
            (Repr::Big(a), Repr::Big(b)) => {
                if **a >= **b {
                    Some(Nat::from_biguint(&**a - &**b))
                } else {
                    None
                }
            }
        }
    }

    /// |self - rhs|.
    pub fn abs_diff(&self, rhs: &Nat) -> Nat {
        match self.checked_sub(rhs) {
            Some(d) => d,
            None => rhs.checked_sub(self).expect("one direction subtracts"),
        }
    }

    pub fn two_pow(k: u64) -> Nat {
        if k < 64 {
            Nat(Repr::Small(1u64 << k))
        } else {
            Nat(Repr::Big(Box::new(BigUint::one() << k)))
        }
    }

    pub fn three_pow(k: u64) -> Nat {
        // 3^40 < 2^64 <= 3^41
        if k <= 40 {
            Nat(Repr::Small(3u64.pow(k as u32)))
        } else {
            Nat::from_biguint(BigUint::from(3u8).pow(k))
        }
    }

    /// x/2. Exact only for even x; callers check parity.
    pub(crate) fn half(&self) -> Nat {
        match &self.0 {
            Repr::Small(w) => Nat(Repr::Small(w >> 1)),
            Repr::Big(b) => Nat::from_biguint(&**b >> 1),
        }
    }

    /// 3x + 1.
    pub(crate) fn mul3_add1(&self) -> Nat {
        match &self.0 {
            Repr::Small(w) => Nat::from_u128_value(3 * (*w as u128) + 1),
            Repr::Big(b) => Nat(Repr::Big(Box::new(&**b * 3u32 + 1u32))),
        }
    }

    /// (3x + 1)/2 for odd x.
    pub(crate) fn mul3_add1_half(&self) -> Nat {
        match &self.0 {
            Repr::Small(w) => Nat::from_u128_value((3 * (*w as u128) + 1) >> 1),
            Repr::Big(b) => Nat::from_biguint((&**b * 3u32 + 1u32) >> 1),
        }
    }

    /// 3x/2 for even x.
    pub(crate) fn mul3_half(&self) -> Nat {
        match &self.0 {
            Repr::Small(w) => Nat::from_u128_value(3 * ((*w as u128) >> 1)),
            Repr::Big(b) => Nat::from_biguint((&**b >> 1) * 3u32),
        }
    }

    pub fn to_f64_lossy(&self) -> f64 {
        match &self.0 {
            Repr::Small(w) => *w as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    /// Big-endian byte encoding without leading zeros (empty for 0).
    pub fn to_bytes_be(&self) -> Vec<u8> {
        if self.is_zero() {
            return Vec::new();
        }
        match &self.0 {
            Repr::Small(w) => {
                let bytes = w.to_be_bytes();
                let skip = bytes.iter().take_while(|&&b| b == 0).count();
                bytes[skip..].to_vec()
            }
            Repr::Big(b) => b.to_bytes_be(),
        }
    }

    pub fn from_bytes_be(bytes: &[u8]) -> Nat {
        Nat::from_biguint(BigUint::from_bytes_be(bytes))
    }
}

impl Default for Nat {
    fn default() -> Self {
        Nat::ZERO
    }
}

impl From<u64> for Nat {
    fn from(w: u64) -> Nat {
        Nat(Repr::Small(w))
    }
}

impl From<u32> for Nat {
    fn from(w: u32) -> Nat {
        Nat(Repr::Small(w as u64))
    }
}

impl From<usize> for Nat {
    fn from(w: usize) -> Nat {
        Nat(Repr::Small(w as u64))
    }
}

impl From<u128> for Nat {
    fn from(w: u128) -> Nat {
        Nat::from_u128_value(w)
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Nat {
        Nat::from_biguint(v)
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Nat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Big(_)) => Ordering::Less,
            (Repr::Big(_), Repr::Small(_)) => Ordering::Greater,
            (Repr::Big(a), Repr::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Nat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq<u64> for Nat {
    fn eq(&self, other: &u64) -> bool {
        matches!(&self.0, Repr::Small(w) if w == other)
    }
}

impl PartialOrd<u64> for Nat {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        match &self.0 {
            Repr::Small(w) => w.partial_cmp(other),
            Repr::Big(_) => Some(Ordering::Greater),
        }
    }
}

impl Add for &Nat {
    type Output = Nat;
    fn add(self, rhs: &Nat) -> Nat {
        match (&self.0, &rhs.0) {
            (Repr::Small(a), Repr::Small(b)) => Nat::from_u128_value(*a as u128 + *b as u128),
            _ => Nat::from_biguint(self.to_biguint() + rhs.to_biguint()),
        }
    }
}

impl Sub for &Nat {
    type Output = Nat;
    fn sub(self, rhs: &Nat) -> Nat {
        self.checked_sub(rhs).expect("Nat subtraction underflow")
    }
}

impl Mul for &Nat {
    type Output = Nat;
    fn mul(self, rhs: &Nat) -> Nat {
        match (&self.0, &rhs.0) {
            (Repr::Small(a), Repr::Small(b)) => Nat::from_u128_value(*a as u128 * *b as u128),
            _ => Nat::from_biguint(self.to_biguint() * rhs.to_biguint()),
        }
    }
}

impl Shl<u64> for &Nat {
    type Output = Nat;
    fn shl(self, k: u64) -> Nat {
        if self.is_zero() {
            return Nat::ZERO;
        }
        if k < 64 && self.bit_length() + k <= 64 {
            if let Some(w) = self.to_u64() {
                return Nat::from(w << k);
            }
        }
        Nat::from_biguint(self.to_biguint() << k)
    }
}

impl Shr<u64> for &Nat {
    type Output = Nat;
    fn shr(self, k: u64) -> Nat {
        match &self.0 {
            Repr::Small(w) => {
                if k >= 64 {
                    Nat::ZERO
                } else {
                    Nat(Repr::Small(w >> k))
                }
            }
            Repr::Big(b) => Nat::from_biguint(&**b >> k),
        }
    }
}

impl AddAssign<u64> for Nat {
    fn add_assign(&mut self, rhs: u64) {
        *self = &*self + &Nat::from(rhs);
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(w) => write!(f, "{w}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn parse_decimal(text: &str, offset: usize) -> Result<Nat> {
    if text.is_empty() {
        return Err(syntax(offset, "expected a decimal literal"));
    }
    if let Some(pos) = text.bytes().position(|b| !b.is_ascii_digit()) {
        return Err(syntax(offset + pos, "expected a decimal digit"));
    }
    match text.parse::<u64>() {
        Ok(w) => Ok(Nat::from(w)),
        Err(_) => {
            let big: BigUint = text
                .parse()
                .map_err(|_| syntax(offset, "invalid decimal literal"))?;
            Ok(Nat::from_biguint(big))
        }
    }
}

impl FromStr for Nat {
    type Err = Error;

    /// Accepts `<decimal>`, `2^k`, `2^k+c`, `2^k-c`.
    fn from_str(text: &str) -> Result<Nat> {
        if let Some(rest) = text.strip_prefix("2^") {
            let split = rest.bytes().position(|b| b == b'+' || b == b'-');
            let (exp_text, tail) = match split {
                Some(p) => (&rest[..p], Some((p, &rest[p..]))),
                None => (rest, None),
            };
            let exp = parse_decimal(exp_text, 2)?;
            let k = exp
                .to_u64()
                .filter(|&k| k <= MAX_PARSED_EXPONENT)
                .ok_or_else(|| syntax(2, "exponent too large"))?;
            let base = Nat::two_pow(k);
            match tail {
                None => Ok(base),
                Some((p, t)) => {
                    let sign = t.as_bytes()[0];
                    let c = parse_decimal(&t[1..], 2 + p + 1)?;
                    if sign == b'+' {
                        Ok(&base + &c)
                    } else {
                        base.checked_sub(&c)
                            .ok_or_else(|| syntax(2 + p, "expression is negative"))
                    }
                }
            }
        } else {
            parse_decimal(text, 0)
        }
    }
}

impl serde::Serialize for Nat {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Nat {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Nat, D::Error> {
        struct NatVisitor;
        impl serde::de::Visitor<'_> for NatVisitor {
            type Value = Nat;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string or non-negative integer")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Nat, E> {
                parse_decimal(v, 0).map_err(E::custom)
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Nat, E> {
                Ok(Nat::from(v))
            }
        }
        deserializer.deserialize_any(NatVisitor)
    }
}
