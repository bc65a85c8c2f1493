//! Exact field elements.
//!
//! A [`Scalar`] is either a rational number or a residue modulo a prime. Rationals
//! embed canonically into every prime field whose characteristic does not divide
//! the denominator, so `0`, `1` and every parsed coefficient can start life as a
//! rational and meet a residue later. Mixing residues of different moduli panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
enum Repr {
    /// numerator, denominator > 0, lowest terms
    Small(i64, i64),
    /// never holds a value that fits `Small`
    Big(Box<BigRational>),
    /// residue in `[0, modulus)`
    Mod(u64, u64),
}

/// Exact scalar: arbitrary-precision rational or prime-field residue.
#[derive(Clone, Debug)]
pub struct Scalar(Repr);

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn mod_inv(a: u64, m: u64) -> Option<u64> {
    if a.is_multiple_of(m) {
        None
    } else {
        // m is prime
        Some(mod_pow(a, m - 2, m))
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Scalar(Repr::Small(1, 1))
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar(Repr::Small(n, 1))
    }

    /// The rational `num/den`.
    ///
    /// Panics if `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigint(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_big(BigRational::new(num, den))
    }

    /// Residue of `value` modulo the prime `modulus`.
    pub fn modular(value: i64, modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be a prime >= 2");
        let r = value.rem_euclid(modulus as i64) as u64;
        Scalar(Repr::Mod(r, modulus))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        let (mut n, mut d) = (num, den);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Scalar(Repr::Small(n, d)),
            _ => Scalar(Repr::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d))))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduces and normalises the sign
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Scalar(Repr::Small(n, d)),
            _ => Scalar(Repr::Big(Box::new(r))),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
            Repr::Mod(..) => panic!("residue has no rational value"),
        }
    }

    /// The rational value, when this scalar is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.0 {
            Repr::Mod(..) => None,
            _ => Some(self.to_big()),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn as_small_ratio(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            _ => None,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.0 {
            Repr::Mod(_, m) => Some(m),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        !matches!(self.0, Repr::Mod(..))
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n == 0,
            Repr::Big(_) => false,
            Repr::Mod(r, _) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Small(n, d) => *n == 1 && *d == 1,
            Repr::Big(_) => false,
            Repr::Mod(r, _) => *r == 1,
        }
    }

    /// Reduce a rational into `F_modulus`.
    fn into_mod(&self, modulus: u64) -> u64 {
        match &self.0 {
            Repr::Mod(r, m) => {
                assert_eq!(*m, modulus, "mixing residues of different moduli");
                *r
            }
            Repr::Small(n, d) => {
                let num = n.rem_euclid(modulus as i64) as u64;
                let den = d.rem_euclid(modulus as i64) as u64;
                let inv = mod_inv(den, modulus).expect("denominator divisible by the modulus");
                ((num as u128 * inv as u128) % modulus as u128) as u64
            }
            Repr::Big(b) => {
                let m = BigInt::from(modulus);
                let num = b.numer().mod_floor(&m).to_u64().unwrap();
                let den = b.denom().mod_floor(&m).to_u64().unwrap();
                let inv = mod_inv(den, modulus).expect("denominator divisible by the modulus");
                ((num as u128 * inv as u128) % modulus as u128) as u64
            }
        }
    }

    /// Shared modulus of two operands, if either is a residue.
    fn common_modulus(&self, other: &Scalar) -> Option<u64> {
        match (&self.0, &other.0) {
            (Repr::Mod(_, a), Repr::Mod(_, b)) => {
                assert_eq!(a, b, "mixing residues of different moduli");
                Some(*a)
            }
            (Repr::Mod(_, a), _) | (_, Repr::Mod(_, a)) => Some(*a),
            _ => None,
        }
    }

    /// Convert into the prime field of the given modulus, or keep rational for `None`.
    pub fn in_field(&self, modulus: Option<u64>) -> Scalar {
        match modulus {
            None => self.clone(),
            Some(m) => Scalar(Repr::Mod(self.into_mod(m), m)),
        }
    }

    pub fn add_ref(&self, other: &Scalar) -> Scalar {
        if let Some(m) = self.common_modulus(other) {
            let s = (self.into_mod(m) as u128 + other.into_mod(m) as u128) % m as u128;
            return Scalar(Repr::Mod(s as u64, m));
        }
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_add(*c) {
                        return Scalar(Repr::Small(s, 1));
                    }
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Self::from_i128(a * d + c * b, b * d)
            }
            _ => Self::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn sub_ref(&self, other: &Scalar) -> Scalar {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Scalar) -> Scalar {
        if let Some(m) = self.common_modulus(other) {
            let s = (self.into_mod(m) as u128 * other.into_mod(m) as u128) % m as u128;
            return Scalar(Repr::Mod(s as u64, m));
        }
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(p) = a.checked_mul(*c) {
                        return Scalar(Repr::Small(p, 1));
                    }
                }
                if *a == 0 || *c == 0 {
                    return Scalar::zero();
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                // cross-cancel first to keep the product inside i128
                let g1 = gcd_i128(a, d);
                let g2 = gcd_i128(c, b);
                Self::from_i128((a / g1) * (c / g2), (b / g2) * (d / g1))
            }
            _ => Self::from_big(self.to_big() * other.to_big()),
        }
    }

    pub fn neg_ref(&self) -> Scalar {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Scalar(Repr::Small(m, *d)),
                None => Self::from_big(-self.to_big()),
            },
            Repr::Big(b) => Self::from_big(-(**b).clone()),
            Repr::Mod(r, m) => Scalar(Repr::Mod((m - r) % m, *m)),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
            Repr::Mod(r, m) => Scalar(Repr::Mod(mod_inv(*r, *m)?, *m)),
        })
    }

    pub fn div_ref(&self, other: &Scalar) -> Scalar {
        self.mul_ref(&other.inv().expect("division by zero"))
    }

    /// Sign of a rational (residues report their zero-ness only).
    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Repr::Mod(r, _) => (*r != 0) as i32,
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = acc.mul_ref(self);
        }
        acc
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if let Some(m) = self.common_modulus(other) {
            return self.into_mod(m) == other.into_mod(m);
        }
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    /// Rationals are ordered numerically; residues are not ordered.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if !self.is_rational() || !other.is_rational() {
            return if self == other { Some(Ordering::Equal) } else { None };
        }
        Some(self.to_big().cmp(&other.to_big()))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

impl From<i32> for Scalar {
    fn from(n: i32) -> Self {
        Scalar::from_i64(n as i64)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_big(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
            Repr::Mod(r, _) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid scalar literal `{0}`")]
pub struct ScalarParseError(pub String);

impl FromStr for Scalar {
    type Err = ScalarParseError;

    /// Accepts `n`, `-n` and `n/d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScalarParseError(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = match den {
            Some(d) => d.parse().map_err(|_| err())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(Scalar::from_bigint(num, den))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = self.add_ref(rhs);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = self.sub_ref(rhs);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = self.mul_ref(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms_and_sign() {
        let s = Scalar::ratio(6, -4);
        assert_eq!(s.as_small_ratio(), Some((-3, 2)));
        assert_eq!(s.to_string(), "-3/2");
    }

    #[test]
    fn overflow_promotes_to_big_and_back() {
        let big = Scalar::from_i64(i64::MAX);
        let sum = &big + &big;
        assert!(sum.as_small_ratio().is_none());
        let back = &sum - &big;
        assert_eq!(back.as_small_ratio(), Some((i64::MAX, 1)));
    }

    #[test]
    fn residues() {
        let a = Scalar::modular(3, 7);
        let b = Scalar::modular(5, 7);
        assert_eq!(&a * &b, Scalar::modular(1, 7));
        assert_eq!(a.inv().unwrap(), Scalar::modular(5, 7));
        // rationals embed into F_7: 1/2 = 4
        assert_eq!(&Scalar::ratio(1, 2) + &Scalar::modular(0, 7), Scalar::modular(4, 7));
        assert!(Scalar::modular(7, 7).is_zero());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("-3/6".parse::<Scalar>().unwrap(), Scalar::ratio(-1, 2));
        assert_eq!("12".parse::<Scalar>().unwrap(), Scalar::from_i64(12));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    proptest! {
        #[test]
        fn addition_matches_cross_multiplication(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let lhs = &Scalar::ratio(a, b) + &Scalar::ratio(c, d);
            let rhs = Scalar::ratio(a * d + c * b, b * d);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn field_axioms_on_big_values(a in any::<i64>(), b in 1i64..i64::MAX, c in any::<i64>()) {
            let x = Scalar::ratio(a, b);
            let y = Scalar::from_i64(c);
            let z = &(&x * &y) + &x;
            prop_assert_eq!(&z - &x, &x * &y);
            if !y.is_zero() {
                prop_assert_eq!(&(&x * &y) / &y, x.clone());
            }
        }
    }
}
