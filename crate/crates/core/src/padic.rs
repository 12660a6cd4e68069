//! Fixed-precision p-adic integers.
//!
//! A [`PadicInt`] is an element of `Z_p` truncated to `K` base-`p` digits,
//! i.e. a residue modulo `p^K`. All ring operations are exact modulo `p^K`.
//! Digits are exposed little-endian (`α_0` first), and the text form is
//! `p:K:α_0,α_1,…,α_{K-1}`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

pub const DEFAULT_PRECISION: u32 = 16;

/// p-adic valuation of a truncated integer.
///
/// `AtLeast(K)` marks a value indistinguishable from zero at precision `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_at_floor(self) -> bool {
        matches!(self, Valuation::AtLeast(_))
    }

    /// Lower bound on the true valuation.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// `p^{-v}`, with the precision floor mapped to zero.
    pub fn norm(self, p: u32) -> Rational {
        match self {
            Valuation::Finite(v) => inverse_power(p, v),
            Valuation::AtLeast(_) => Rational::zero(),
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::AtLeast(_)) => Ordering::Less,
            (Valuation::AtLeast(_), Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::AtLeast(a), Valuation::AtLeast(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub(crate) fn inverse_power(p: u32, v: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(p).pow(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u32,
    precision: u32,
    modulus: Arc<BigUint>,
    residue: BigUint,
}

fn check_ring(p: u64, precision: u32) -> Result<u32> {
    if !arith::is_prime(p) || p > u32::MAX as u64 {
        return Err(Error::InvalidModulus(p));
    }
    if precision == 0 {
        return Err(Error::InvalidPrecision);
    }
    Ok(p as u32)
}

impl PadicInt {
    /// Canonical image of an integer (negative values wrap modulo `p^K`).
    pub fn from_integer(n: impl Into<BigInt>, p: u64, precision: u32) -> Result<Self> {
        let p = check_ring(p, precision)?;
        let modulus = BigUint::from(p).pow(precision);
        let n: BigInt = n.into();
        let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let residue = n.mod_floor(&m).to_biguint().expect("mod_floor is non-negative");
        Ok(PadicInt { p, precision, modulus: Arc::new(modulus), residue })
    }

    pub fn from_digits(p: u64, digits: &[u32]) -> Result<Self> {
        let p32 = check_ring(p, digits.len() as u32)?;
        let mut residue = BigUint::zero();
        for &d in digits.iter().rev() {
            if d >= p32 {
                return Err(Error::InvalidDigit { digit: d as u64, p: p32 });
            }
            residue = residue * p32 + d;
        }
        let precision = digits.len() as u32;
        Ok(PadicInt {
            p: p32,
            precision,
            modulus: Arc::new(BigUint::from(p32).pow(precision)),
            residue,
        })
    }

    /// Uniformly distributed element of `Z/p^K`.
    pub fn random<R: Rng + ?Sized>(p: u64, precision: u32, rng: &mut R) -> Result<Self> {
        let p32 = check_ring(p, precision)?;
        let digits: Vec<u32> = (0..precision).map(|_| rng.gen_range(0..p32)).collect();
        Self::from_digits(p, &digits)
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Self::from_integer(0, p, precision)
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::from_integer(1, p, precision)
    }

    fn with_residue(&self, residue: BigUint) -> Self {
        PadicInt { p: self.p, precision: self.precision, modulus: Arc::clone(&self.modulus), residue }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Representative in `[0, p^K)`.
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// First digit `α_0 = x mod p`.
    pub fn residue_mod_p(&self) -> u32 {
        (&self.residue % self.p).to_u32().expect("digit fits")
    }

    pub fn digits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.precision as usize);
        let mut r = self.residue.clone();
        for _ in 0..self.precision {
            let (q, d) = r.div_rem(&BigUint::from(self.p));
            out.push(d.to_u32().expect("digit fits"));
            r = q;
        }
        out
    }

    pub fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p && self.precision == other.precision
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(Error::IncompatibleOperands(self.p, self.precision, other.p, other.precision))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_residue((&self.residue + &other.residue) % &*self.modulus))
    }

    pub fn neg(&self) -> Self {
        if self.residue.is_zero() {
            self.clone()
        } else {
            self.with_residue(&*self.modulus - &self.residue)
        }
    }

    /// Addition of the `p^K`-complement.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_residue((&self.residue * &other.residue) % &*self.modulus))
    }

    /// `x^e` modulo `p^K` by square-and-multiply; `e` may be arbitrarily large.
    pub fn pow(&self, e: &BigUint) -> Self {
        self.with_residue(self.residue.modpow(e, &self.modulus))
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        self.pow(&BigUint::from(e))
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Unit sphere membership: `|x|_p = 1`.
    pub fn is_unit(&self) -> bool {
        self.residue_mod_p() != 0
    }

    pub fn valuation(&self) -> Valuation {
        if self.residue.is_zero() {
            return Valuation::AtLeast(self.precision);
        }
        let mut r = self.residue.clone();
        let mut v = 0;
        let p = BigUint::from(self.p);
        loop {
            let (q, d) = r.div_rem(&p);
            if !d.is_zero() {
                return Valuation::Finite(v);
            }
            r = q;
            v += 1;
        }
    }

    pub fn norm(&self) -> Rational {
        self.valuation().norm(self.p)
    }

    pub fn dist(&self, other: &Self) -> Result<Rational> {
        Ok(self.sub(other)?.norm())
    }

    /// Measurement map `g(u) = Σ α_j p^{-(j+1)}`, exact.
    pub fn measure_g(&self) -> Rational {
        // Σ α_j p^{-(j+1)} = (Σ α_j p^{K-1-j}) / p^K
        let mut numer = BigUint::zero();
        for d in self.digits() {
            numer = numer * self.p + d;
        }
        Rational::new(
            BigInt::from_biguint(Sign::Plus, numer),
            BigInt::from_biguint(Sign::Plus, (*self.modulus).clone()),
        )
    }

    pub fn measure_g_as<T: Scalar>(&self) -> T {
        T::from_rational(&self.measure_g())
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:", self.p, self.precision)?;
        for (i, d) in self.digits().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for PadicInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected p:K:digits, got {s:?}"));
        let mut parts = s.trim().splitn(3, ':');
        let p: u64 = parts.next().and_then(|t| t.trim().parse().ok()).ok_or_else(bad)?;
        let k: u32 = parts.next().and_then(|t| t.trim().parse().ok()).ok_or_else(bad)?;
        let digits = parts
            .next()
            .ok_or_else(bad)?
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        if digits.len() != k as usize {
            return Err(Error::Parse(format!("{} digits given for precision {k}", digits.len())));
        }
        Self::from_digits(p, &digits)
    }
}

impl Serialize for PadicInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PadicInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Checks `o_p((γ+u)^n − γ^n) = o_p(n) + o_p(u)` for a unit `γ` and `|u|_p ≤ 1/p`.
///
/// For `p = 2` the identity needs `|u|_2 ≤ 1/4`; `u = 2` and `n = 2` give
/// `9 − 1 = 8` with valuation 3, not 2.
pub fn binomial_valuation_check(gamma: &PadicInt, u: &PadicInt, n: &BigUint) -> Result<bool> {
    gamma.check(u)?;
    let p = gamma.p;
    if !gamma.is_unit() {
        return Err(Error::NotInIdentityDomain("gamma is not a unit".into()));
    }
    if n.is_zero() {
        return Err(Error::NotInIdentityDomain("exponent must be positive".into()));
    }
    let min_u = if p == 2 { 2 } else { 1 };
    let u_val = match u.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(k) => return Err(Error::PrecisionExceeded(k)),
    };
    if u_val < min_u {
        return Err(Error::NotInIdentityDomain(format!("o_p(u) = {u_val} < {min_u}")));
    }
    let n_val = big_p_valuation(n, p);
    let expected = n_val + u_val;
    if expected >= gamma.precision {
        return Err(Error::PrecisionExceeded(gamma.precision));
    }
    let diff = gamma.add(u)?.pow(n).sub(&gamma.pow(n))?;
    Ok(diff.valuation() == Valuation::Finite(expected))
}

pub(crate) fn big_p_valuation(n: &BigUint, p: u32) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let mut r = n.clone();
    let mut v = 0;
    loop {
        let (q, d) = r.div_rem(&BigUint::from(p));
        if !d.is_zero() {
            return v;
        }
        r = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, ToPrimitive};
    use proptest::prelude::*;

    fn pi(n: i64, p: u64, k: u32) -> PadicInt {
        PadicInt::from_integer(n, p, k).unwrap()
    }

    fn ratio(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn from_integer_examples() {
        assert_eq!(pi(0, 7, 4).digits(), [0, 0, 0, 0]);
        assert_eq!(pi(-1, 5, 3).digits(), [4, 4, 4]);
        assert_eq!(pi(61, 29, 3).digits(), [3, 2, 0]);
    }

    #[test]
    fn from_integer_errors() {
        assert_eq!(PadicInt::from_integer(1, 6, 3), Err(Error::InvalidModulus(6)));
        assert_eq!(PadicInt::from_integer(1, 1, 3), Err(Error::InvalidModulus(1)));
        assert_eq!(PadicInt::from_integer(1, 5, 0), Err(Error::InvalidPrecision));
        assert!(matches!(PadicInt::from_digits(5, &[1, 5]), Err(Error::InvalidDigit { .. })));
    }

    #[test]
    fn ring_ops() {
        assert_eq!(pi(3, 5, 3).mul(&pi(2, 5, 3)).unwrap(), pi(6, 5, 3));
        assert_eq!(pi(6, 5, 3).digits(), [1, 1, 0]);
        assert_eq!(pi(3, 5, 3).sub(&pi(7, 5, 3)).unwrap(), pi(-4, 5, 3));
        assert_eq!(pi(2, 29, 2).pow_u64(28).residue_mod_p(), 1);
        // 2^28 mod 29^2 by repeated multiplication
        let mut acc = 1u64;
        for _ in 0..28 {
            acc = acc * 2 % 841;
        }
        assert_eq!(pi(2, 29, 2).pow_u64(28), pi(acc as i64, 29, 2));
        assert_eq!(
            pi(3, 5, 3).add(&pi(3, 5, 4)),
            Err(Error::IncompatibleOperands(5, 3, 5, 4))
        );
        assert!(pi(3, 5, 3).mul(&pi(3, 7, 3)).is_err());
    }

    #[test]
    fn huge_exponent() {
        // 3^(2^70) mod 125: the unit group has order 100, 2^70 mod 100 = 24
        let e = BigUint::one() << 70u32;
        assert_eq!(pi(3, 5, 3).pow(&e), pi(3, 5, 3).pow_u64(24));
    }

    #[test]
    fn valuation_and_norm() {
        assert_eq!(pi(0, 7, 4).valuation(), Valuation::AtLeast(4));
        assert_eq!(pi(29, 29, 3).norm(), ratio(1, 29));
        assert_eq!(pi(50, 5, 4).valuation(), Valuation::Finite(2));
        let x = pi(123, 7, 4);
        assert_eq!(x.dist(&x).unwrap(), Rational::zero());
        assert!(Valuation::Finite(3) < Valuation::AtLeast(4));
        assert_eq!(Valuation::AtLeast(16).to_string(), ">=16");
    }

    #[test]
    fn measure_examples() {
        assert_eq!(pi(0, 11, 5).measure_g(), Rational::zero());
        assert_eq!(pi(-1, 5, 3).measure_g(), ratio(124, 125));
        assert!((pi(-1, 5, 3).measure_g_as::<f64>() - 0.992).abs() < 1e-15);
        assert_eq!(pi(1, 29, 6).measure_g(), ratio(1, 29));
    }

    #[test]
    fn text_form() {
        let x = pi(61, 29, 3);
        assert_eq!(x.to_string(), "29:3:3,2,0");
        assert_eq!("29:3:3,2,0".parse::<PadicInt>().unwrap(), x);
        assert!("29:3:3,2".parse::<PadicInt>().is_err());
        assert!("29:3:3,2,29".parse::<PadicInt>().is_err());
        assert!("x".parse::<PadicInt>().is_err());
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"29:3:3,2,0\"");
        assert_eq!(serde_json::from_str::<PadicInt>(&json).unwrap(), x);
    }

    #[test]
    fn binomial_examples() {
        let gamma = pi(2, 5, 6);
        let u = pi(5, 5, 6);
        assert!(binomial_valuation_check(&gamma, &u, &BigUint::from(5u32)).unwrap());
        let diff = gamma.add(&u).unwrap().pow_u64(5).sub(&gamma.pow_u64(5)).unwrap();
        assert_eq!(diff.valuation(), Valuation::Finite(2));
        assert!(binomial_valuation_check(&gamma, &pi(75, 5, 6), &BigUint::one()).unwrap());
    }

    #[test]
    fn binomial_domain_errors() {
        let one = BigUint::one();
        assert!(matches!(
            binomial_valuation_check(&pi(5, 5, 4), &pi(5, 5, 4), &one),
            Err(Error::NotInIdentityDomain(_))
        ));
        assert!(matches!(
            binomial_valuation_check(&pi(2, 5, 4), &pi(1, 5, 4), &one),
            Err(Error::NotInIdentityDomain(_))
        ));
        assert_eq!(
            binomial_valuation_check(&pi(2, 5, 4), &pi(0, 5, 4), &one),
            Err(Error::PrecisionExceeded(4))
        );
        assert_eq!(
            binomial_valuation_check(&pi(2, 5, 3), &pi(25, 5, 3), &BigUint::from(5u32)),
            Err(Error::PrecisionExceeded(3))
        );
        // p = 2 with |u| = 1/2 falls outside the identity's domain
        let gamma = pi(1, 2, 8);
        let u = pi(2, 2, 8);
        let diff = gamma.add(&u).unwrap().pow_u64(2).sub(&gamma.pow_u64(2)).unwrap();
        assert_eq!(diff.valuation(), Valuation::Finite(3));
        assert!(matches!(
            binomial_valuation_check(&gamma, &u, &BigUint::from(2u32)),
            Err(Error::NotInIdentityDomain(_))
        ));
    }

    fn arb_pair(p: u64, k: u32) -> impl Strategy<Value = (PadicInt, PadicInt, PadicInt)> {
        let modulus = (p as i64).pow(k);
        (0..modulus, 0..modulus, 0..modulus).prop_map(move |(a, b, c)| (pi(a, p, k), pi(b, p, k), pi(c, p, k)))
    }

    proptest! {
        #[test]
        fn ultrametric((x, y, z) in prop_oneof![arb_pair(2, 20), arb_pair(5, 8), arb_pair(29, 4)]) {
            let dxz = x.dist(&z).unwrap();
            let dxy = x.dist(&y).unwrap();
            let dyz = y.dist(&z).unwrap();
            prop_assert!(dxz <= dxy.clone().max(dyz.clone()));
            if dxy != dyz {
                prop_assert_eq!(dxz, dxy.max(dyz));
            }
        }

        #[test]
        fn norm_multiplicative((x, y, _) in arb_pair(5, 8)) {
            if let (Some(a), Some(b)) = (x.valuation().finite(), y.valuation().finite()) {
                if a + b < 8 {
                    prop_assert_eq!(x.mul(&y).unwrap().valuation(), Valuation::Finite(a + b));
                }
            }
        }

        #[test]
        fn measure_is_contracting((x, y, _) in prop_oneof![arb_pair(3, 10), arb_pair(41, 4)]) {
            let gap = (x.measure_g() - y.measure_g()).abs();
            prop_assert!(gap <= x.dist(&y).unwrap());
            prop_assert_eq!(x == y, x.measure_g() == y.measure_g());
        }

        #[test]
        fn digits_roundtrip((x, _, _) in arb_pair(7, 6)) {
            let back = PadicInt::from_digits(7, &x.digits()).unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(x.to_string().parse::<PadicInt>().unwrap(), x);
        }

        #[test]
        fn arithmetic_matches_integers(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let m = 3i64.pow(7);
            let (x, y) = (pi(a, 3, 7), pi(b, 3, 7));
            prop_assert_eq!(x.add(&y).unwrap().residue().to_i64().unwrap(), (a + b).rem_euclid(m));
            prop_assert_eq!(x.mul(&y).unwrap().residue().to_i64().unwrap(), (a * b).rem_euclid(m));
            prop_assert_eq!(x.sub(&y).unwrap().residue().to_i64().unwrap(), (a - b).rem_euclid(m));
        }
    }
}
