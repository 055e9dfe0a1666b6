//! Exact rationals and rationals extended by a single positive infinitesimal.
//!
//! [`Rat`] keeps values that fit in `i64` inline and falls back to
//! [`BigInt`] when an operation overflows, so the common case never
//! allocates. Both representations are canonical (positive denominator,
//! reduced), and a value is stored inline whenever it fits, which makes
//! structural equality and hashing agree with numeric equality.
//!
//! [`EpsRat`] is `real + inf·ι` for a formal `ι > 0` smaller than every
//! positive rational. A strict bound `d > 1` is written `d ≥ 1 + ι`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational {0:?}: expected \"p/q\" with optional sign on p")]
    Malformed(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(BigInt, BigInt),
}

/// Arbitrary-precision rational number in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat(Repr);

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

impl Rat {
    pub fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(Repr::Small(n, 1))
    }

    pub fn new(numer: i64, denom: i64) -> Result<Rat, RatError> {
        if denom == 0 {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat::from_i128(numer as i128, denom as i128))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Rat, RatError> {
        if denom.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat::from_big(numer, denom))
    }

    /// `2^-t`.
    pub fn pow2_neg(t: u32) -> Rat {
        Rat::from_big(BigInt::one(), BigInt::one() << t)
    }

    fn from_i128(n: i128, d: i128) -> Rat {
        debug_assert!(d != 0);
        let g = gcd_i128(n, d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            // i128::MIN cannot occur: inputs are products of i64 values.
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(n: BigInt, d: BigInt) -> Rat {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g.is_one() { (n, d) } else { (n / &g, d / &g) };
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        match (n.to_i64(), d.to_i64()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(n, d)),
        }
    }

    fn big_parts(&self) -> (BigInt, BigInt) {
        match &self.0 {
            Repr::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(n, d) => (n.clone(), d.clone()),
        }
    }

    pub fn numer(&self) -> BigInt {
        self.big_parts().0
    }

    pub fn denom(&self) -> BigInt {
        self.big_parts().1
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(n, _) => n.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(_, d) => d.is_one(),
        }
    }

    /// Lossy conversion, used only for drawing.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(n, d) => {
                n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    /// Re-normalize; a no-op on every value this module produces.
    pub fn normalized(&self) -> Rat {
        let (n, d) = self.big_parts();
        Rat::from_big(n, d)
    }

    /// `self mod m` for `m > 0`, landing in `[0, m)`.
    pub fn rem_euclid(&self, m: &Rat) -> Rat {
        assert!(!m.is_negative() && !m.is_zero(), "modulus must be positive");
        let (an, ad) = self.big_parts();
        let (mn, md) = m.big_parts();
        // self / m = (an*md) / (ad*mn); floor it and subtract.
        let q = (&an * &md).div_floor(&(&ad * &mn));
        let qm = Rat::from_big(q, BigInt::one()) * m;
        self - &qm
    }

    #[cfg(test)]
    fn is_canonical(&self) -> bool {
        match &self.0 {
            Repr::Small(n, d) => *d > 0 && gcd_i128(*n as i128, *d as i128) == 1,
            Repr::Big(n, d) => {
                d.is_positive()
                    && n.gcd(d).is_one()
                    && !(n.to_i64().is_some() && d.to_i64().is_some())
            }
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => {
                let (a, b) = self.big_parts();
                let (c, d) = other.big_parts();
                (a * d).cmp(&(c * b))
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            if *b == *d {
                return Rat::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(n) = (a * d).checked_add(c * b) {
                return Rat::from_i128(n, b * d);
            }
        }
        let (a, b) = self.big_parts();
        let (c, d) = rhs.big_parts();
        Rat::from_big(&a * &d + &c * &b, b * d)
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            return Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        let (a, b) = self.big_parts();
        let (c, d) = rhs.big_parts();
        Rat::from_big(a * c, b * d)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat(Repr::Small(m, *d)),
                None => Rat::from_big(-BigInt::from(*n), BigInt::from(*d)),
            },
            Repr::Big(n, d) => Rat::from_big(-n, d.clone()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatError;

    /// Accepts `p/q` (sign only on `p`) or a bare integer `p`.
    fn from_str(s: &str) -> Result<Rat, RatError> {
        let malformed = || RatError::Malformed(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p, q),
            None => (s, "1"),
        };
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let p_body = p.strip_prefix(['-', '+']).unwrap_or(p);
        if !digits(p_body) || !digits(q) {
            return Err(malformed());
        }
        let numer: BigInt = p.parse().map_err(|_| malformed())?;
        let denom: BigInt = q.parse().map_err(|_| malformed())?;
        Rat::from_bigints(numer, denom)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `real + inf·ι`, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EpsRat {
    pub real: Rat,
    pub inf: i64,
}

impl EpsRat {
    pub fn new(real: Rat, inf: i64) -> EpsRat {
        EpsRat { real, inf }
    }

    pub fn zero() -> EpsRat {
        EpsRat::default()
    }

    pub fn real(real: Rat) -> EpsRat {
        EpsRat { real, inf: 0 }
    }

    pub fn is_negative(&self) -> bool {
        self.real.is_negative() || (self.real.is_zero() && self.inf < 0)
    }

    pub fn scale(&self, k: i64) -> EpsRat {
        EpsRat {
            real: &self.real * &Rat::from_int(k),
            inf: self.inf * k,
        }
    }

    /// Value after fixing `ι` to a concrete rational.
    pub fn substitute(&self, iota: &Rat) -> Rat {
        &self.real + &(&Rat::from_int(self.inf) * iota)
    }
}

impl<'a> Add<&'a EpsRat> for &'a EpsRat {
    type Output = EpsRat;
    fn add(self, rhs: &EpsRat) -> EpsRat {
        EpsRat {
            real: &self.real + &rhs.real,
            inf: self.inf + rhs.inf,
        }
    }
}

impl<'a> Sub<&'a EpsRat> for &'a EpsRat {
    type Output = EpsRat;
    fn sub(self, rhs: &EpsRat) -> EpsRat {
        EpsRat {
            real: &self.real - &rhs.real,
            inf: self.inf - rhs.inf,
        }
    }
}

impl Neg for &EpsRat {
    type Output = EpsRat;
    fn neg(self) -> EpsRat {
        EpsRat {
            real: -&self.real,
            inf: -self.inf,
        }
    }
}

impl Add for EpsRat {
    type Output = EpsRat;
    fn add(self, rhs: EpsRat) -> EpsRat {
        &self + &rhs
    }
}

impl Sub for EpsRat {
    type Output = EpsRat;
    fn sub(self, rhs: EpsRat) -> EpsRat {
        &self - &rhs
    }
}

impl Neg for EpsRat {
    type Output = EpsRat;
    fn neg(self) -> EpsRat {
        -&self
    }
}

impl fmt::Display for EpsRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.inf {
            0 => write!(f, "{}", self.real),
            k if k < 0 => write!(f, "{} - {}ι", self.real, -k),
            k => write!(f, "{} + {}ι", self.real, k),
        }
    }
}

impl fmt::Debug for EpsRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.real, self.inf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d).unwrap()
    }

    #[test]
    fn fraction_arithmetic() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(7, 1) - r(7, 1), Rat::zero());
        assert_eq!((r(7, 1) - r(7, 1)).to_string(), "0/1");
        assert_eq!(r(13, 14).cmp(&Rat::one()), Ordering::Less);
        assert_eq!(r(2, -4), r(-1, 2));
        assert_eq!(Rat::new(1, 0), Err(RatError::ZeroDenominator));
    }

    #[test]
    fn eps_examples() {
        let e = |n: i64, d: i64, k: i64| EpsRat::new(r(n, d), k);
        assert!(e(1, 1, 0) < e(1, 1, 1));
        assert!(e(1, 1, 5) < e(2, 1, -100));
        assert_eq!(e(0, 1, 0).cmp(&e(0, 1, 0)), Ordering::Equal);
        assert_eq!(e(1, 1, 1) + e(1, 1, -1), e(2, 1, 0));
        assert_eq!(e(0, 1, 0) + e(3, 2, 4), e(3, 2, 4));
        assert_eq!(e(1, 3, 2) + e(2, 3, 2), e(1, 1, 4));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("-3/2".parse::<Rat>().unwrap(), r(-3, 2));
        assert_eq!("14/1".parse::<Rat>().unwrap(), r(14, 1));
        assert_eq!("2/4".parse::<Rat>().unwrap().to_string(), "1/2");
        assert_eq!("5".parse::<Rat>().unwrap(), r(5, 1));
        assert_eq!("1/0".parse::<Rat>(), Err(RatError::ZeroDenominator));
        for bad in ["", "/2", "1/", "a/2", "1/-2", "1.5", "1/2/3", "--1/2"] {
            assert!(bad.parse::<Rat>().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sum = &big + &big;
        assert_eq!(sum.numer(), BigInt::from(i64::MAX) * 2);
        assert!(sum.is_canonical());
        let back = &sum - &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let tiny = Rat::pow2_neg(100);
        assert_eq!(&(&tiny * &Rat::from_int(2)) * &Rat::pow2_neg(0), Rat::pow2_neg(99));
        let m = Rat::from_int(i64::MIN);
        assert_eq!((-&m).numer(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn rem_euclid_lands_in_range() {
        let c = r(14, 1);
        assert_eq!(r(15, 1).rem_euclid(&c), r(1, 1));
        assert_eq!(r(-1, 2).rem_euclid(&c), r(27, 2));
        assert_eq!(r(3, 1).rem_euclid(&c), r(3, 1));
        assert_eq!(r(28, 1).rem_euclid(&c), Rat::zero());
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        prop_oneof![
            (-50i64..50, 1i64..20).prop_map(|(n, d)| r(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| r(n, d)),
        ]
    }

    fn arb_eps() -> impl Strategy<Value = EpsRat> {
        (arb_rat(), -1000i64..1000).prop_map(|(q, k)| EpsRat::new(q, k))
    }

    proptest! {
        #[test]
        fn rat_ring_laws(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a + &Rat::zero(), a.clone());
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a - &a, Rat::zero());
            prop_assert!((&(&a + &b) + &c).is_canonical());
            prop_assert_eq!(a.normalized().normalized(), a.normalized());
            prop_assert_eq!(a.normalized(), a.clone());
        }

        #[test]
        fn rat_order_agrees_with_subtraction(a in arb_rat(), b in arb_rat()) {
            let diff = &a - &b;
            let expected = if diff.is_zero() {
                Ordering::Equal
            } else if diff.is_negative() {
                Ordering::Less
            } else {
                Ordering::Greater
            };
            prop_assert_eq!(a.cmp(&b), expected);
            prop_assert_eq!(b.cmp(&a), expected.reverse());
        }

        #[test]
        fn eps_group_laws(a in arb_eps(), b in arb_eps(), c in arb_eps()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a + &EpsRat::zero(), a.clone());
            prop_assert_eq!(&a + &(-&a), EpsRat::zero());
            // translation invariance of the order
            prop_assert_eq!((&a + &c).cmp(&(&b + &c)), a.cmp(&b));
        }

        #[test]
        fn rat_parse_display_round_trip(a in arb_rat()) {
            prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a);
        }
    }
}
