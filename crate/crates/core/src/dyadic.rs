//! Exact dyadic rationals `a / 2^e`.
//!
//! Every coordinate, breakpoint and evaluation result in this crate is a
//! dyadic rational. The representation is canonical, so structural equality
//! is value equality and hashing is consistent.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DyadicParseError {
    #[error("empty input")]
    Empty,
    #[error("invalid integer at byte {0}")]
    InvalidInteger(usize),
    #[error("denominator is not a power of two")]
    NonPowerOfTwoDenominator,
    #[error("invalid exponent")]
    InvalidExponent,
}

/// A dyadic rational `numer / 2^exp`.
///
/// Canonical form: `exp == 0`, or `numer` is odd. Zero is stored as `0 / 2^0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numer: BigInt,
    exp: u32,
}

impl Dyadic {
    /// Builds `numer / 2^exp` and reduces it to canonical form.
    pub fn new(numer: BigInt, exp: u32) -> Self {
        let mut d = Dyadic { numer, exp };
        d.canonicalize();
        d
    }

    /// Convenience constructor from machine integers: `n / 2^e`.
    pub fn ratio(n: i64, e: u32) -> Self {
        Self::new(BigInt::from(n), e)
    }

    pub fn zero() -> Self {
        Dyadic {
            numer: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            numer: BigInt::one(),
            exp: 0,
        }
    }

    fn canonicalize(&mut self) {
        if self.numer.is_zero() {
            self.exp = 0;
            return;
        }
        if self.exp == 0 {
            return;
        }
        let tz = self.numer.trailing_zeros().unwrap_or(0);
        let shift = tz.min(u64::from(self.exp)) as u32;
        if shift > 0 {
            self.numer >>= shift;
            self.exp -= shift;
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numer.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// Exact `self * 2^k` for a signed `k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.numer.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            let k = k as u64;
            let reduce = k.min(u64::from(self.exp));
            let mut out = Dyadic {
                numer: self.numer.clone(),
                exp: self.exp - reduce as u32,
            };
            let rest = k - reduce;
            if rest > 0 {
                out.numer <<= rest;
            }
            out
        } else {
            let k = k.unsigned_abs();
            let exp = u64::from(self.exp) + k;
            assert!(exp <= u64::from(u32::MAX), "dyadic exponent overflow");
            let mut out = Dyadic {
                numer: self.numer.clone(),
                exp: exp as u32,
            };
            out.canonicalize();
            out
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            numer: self.numer.abs(),
            exp: self.exp,
        }
    }

    /// Nearest integer; a half-integer rounds up.
    pub fn round_nearest(&self) -> BigInt {
        if self.exp == 0 {
            return self.numer.clone();
        }
        // floor((numer + 2^(exp-1)) / 2^exp), using floor division via shift
        let half = BigInt::one() << (self.exp - 1);
        (&self.numer + half) >> self.exp
    }

    /// Writes `value = odd * 2^v` for a nonzero value; returns `(odd, v)`.
    pub fn odd_part(&self) -> (BigInt, i64) {
        assert!(!self.numer.is_zero(), "odd_part of zero");
        let tz = self.numer.trailing_zeros().unwrap_or(0);
        let odd = &self.numer >> tz;
        (odd, tz as i64 - i64::from(self.exp))
    }

    /// If `self / other == 2^s` exactly (both strictly positive), returns `s`.
    pub fn ratio_pow2(&self, other: &Dyadic) -> Option<i64> {
        if !self.numer.is_positive() || !other.numer.is_positive() {
            return None;
        }
        let (oa, va) = self.odd_part();
        let (ob, vb) = other.odd_part();
        if oa == ob {
            Some(va - vb)
        } else {
            None
        }
    }

    /// Exact division, when the quotient happens to be dyadic.
    pub fn checked_div(&self, other: &Dyadic) -> Option<Dyadic> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Dyadic::zero());
        }
        let (oa, va) = self.odd_part();
        let (ob, vb) = other.odd_part();
        // (oa / ob) * 2^(va - vb) is dyadic iff ob divides oa
        let (q, r) = (&oa / &ob, &oa % &ob);
        if !r.is_zero() {
            return None;
        }
        let v = va - vb;
        if v >= 0 {
            Some(Dyadic::new(q << v as u64, 0))
        } else {
            let e = v.unsigned_abs();
            assert!(e <= u64::from(u32::MAX));
            Some(Dyadic::new(q, e as u32))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.numer.to_f64().unwrap_or(f64::NAN) / (self.exp as f64).exp2()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic {
            numer: BigInt::from(n),
            exp: 0,
        }
    }
}

impl From<u32> for Dyadic {
    fn from(n: u32) -> Self {
        Dyadic {
            numer: BigInt::from(n),
            exp: 0,
        }
    }
}

impl From<BigInt> for Dyadic {
    fn from(n: BigInt) -> Self {
        Dyadic { numer: n, exp: 0 }
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.numer << (e - self.exp);
        let b = &rhs.numer << (e - rhs.exp);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.numer << (e - self.exp);
        let b = &rhs.numer << (e - rhs.exp);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numer * &rhs.numer, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            numer: -&self.numer,
            exp: self.exp,
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            numer: -self.numer,
            exp: self.exp,
        }
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Dyadic> for Dyadic {
    fn sub_assign(&mut self, rhs: &Dyadic) {
        *self = &*self - rhs;
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.exp == other.exp {
            return self.numer.cmp(&other.numer);
        }
        let e = self.exp.max(other.exp);
        let a = &self.numer << (e - self.exp);
        let b = &other.numer << (e - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/2^{}", self.numer, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Dyadic {
    type Err = DyadicParseError;

    /// Grammar: `INT | INT "/" POW2 | INT "/2^" UINT`, where `POW2` is a
    /// decimal power of two. Other denominators are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(DyadicParseError::Empty);
        }
        match s.find('/') {
            None => {
                let n = s
                    .parse::<BigInt>()
                    .map_err(|_| DyadicParseError::InvalidInteger(0))?;
                Ok(Dyadic::from(n))
            }
            Some(pos) => {
                let n = s[..pos]
                    .parse::<BigInt>()
                    .map_err(|_| DyadicParseError::InvalidInteger(0))?;
                let den = &s[pos + 1..];
                if let Some(rest) = den.strip_prefix("2^") {
                    let e = rest
                        .parse::<u32>()
                        .map_err(|_| DyadicParseError::InvalidExponent)?;
                    Ok(Dyadic::new(n, e))
                } else {
                    let q = den
                        .parse::<BigInt>()
                        .map_err(|_| DyadicParseError::InvalidInteger(pos + 1))?;
                    if !q.is_positive() {
                        return Err(DyadicParseError::NonPowerOfTwoDenominator);
                    }
                    let tz = q.trailing_zeros().unwrap_or(0);
                    if (&q >> tz) != BigInt::one() {
                        return Err(DyadicParseError::NonPowerOfTwoDenominator);
                    }
                    assert!(tz <= u64::from(u32::MAX));
                    Ok(Dyadic::new(n, tz as u32))
                }
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
