//! Roots of unity in `Z_p`.
//!
//! `Γ_p`, the `(p−1)`-th roots of unity, is cyclic. Fixing the smallest
//! primitive root `ξ` modulo `p`, every root is `ξ^a` for a unique
//! [`RootIndex`] `a ∈ Z/(p−1)`, and `x ↦ x^s` on `Γ_p` becomes `a ↦ a·s`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::PadicInt;

/// Primes up to this bound get every lift precomputed.
pub const EAGER_TABLE_LIMIT: u64 = 100_000;

/// Exponent of a root of unity relative to the fixed primitive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootIndex {
    a: u64,
    p: u64,
}

impl RootIndex {
    pub fn new(a: u64, p: u64) -> Self {
        RootIndex { a: a % (p - 1), p }
    }

    pub fn unity(p: u64) -> Self {
        RootIndex { a: 0, p }
    }

    pub fn value(self) -> u64 {
        self.a
    }

    pub fn p(self) -> u64 {
        self.p
    }

    /// Index of `x^s` when `x` has index `self`.
    pub fn power(self, s: u64) -> Self {
        RootIndex::new(arith::mul_mod(self.a, s % (self.p - 1), self.p - 1), self.p)
    }

    /// Index of the product of two roots.
    pub fn compose(self, other: Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        RootIndex::new(self.a + other.a, self.p)
    }

    pub fn is_unity(self) -> bool {
        self.a == 0
    }
}

impl fmt::Display for RootIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ξ^{}", self.a)
    }
}

impl Serialize for RootIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.a)
    }
}

/// Smallest generator of `(Z/p)^*`; `1` for `p = 2`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !arith::is_prime(p) {
        return Err(Error::InvalidModulus(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = arith::factorize(p - 1);
    let g = (2..p)
        .find(|&g| factors.iter().all(|&(r, _)| arith::pow_mod(g, (p - 1) / r, p) != 1))
        .expect("every prime has a primitive root");
    Ok(g)
}

/// The root of unity congruent to `a0` modulo `p`, to `K` digits.
pub fn teichmuller_lift(a0: u64, p: u64, precision: u32) -> Result<PadicInt> {
    if a0 % p == 0 {
        return Err(Error::NotAUnit(a0));
    }
    let mut x = PadicInt::from_integer(a0 % p, p, precision)?;
    // the lift is correct to j+1 digits after j iterations
    for _ in 0..precision {
        let next = x.pow_u64(p);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    if x.pow_u64(p) == x {
        Ok(x)
    } else {
        Err(Error::InternalInconsistency(format!("lift of {a0} mod {p} did not stabilize")))
    }
}

/// Fixed points of `x ↦ x^k` on `Γ_p`: indices `a` with `a(k−1) ≡ 0 mod p−1`.
pub fn gamma_k(p: u64, k: u64) -> Vec<RootIndex> {
    let n = p - 1;
    let step = n / n.gcd(&((k - 1) % n));
    (0..n).step_by(step as usize).map(|a| RootIndex::new(a, p)).collect()
}

/// The image `f_l[Γ_k]` and how it compares with `Γ_u`, `u = (k−1)/gcd(k−1, l) + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageOfGammaK {
    pub image: Vec<RootIndex>,
    /// `u` from the closed-form statement.
    pub stated_u: u64,
    pub stated_matches: bool,
    /// An exponent `u'` with `Γ_{u'}` equal to the image: `u' − 1 = |image|`.
    pub exact_u: u64,
}

pub fn image_of_gamma_k(p: u64, k: u64, l: u64) -> ImageOfGammaK {
    let image: BTreeSet<RootIndex> = gamma_k(p, k).into_iter().map(|a| a.power(l)).collect();
    let image: Vec<RootIndex> = image.into_iter().collect();
    let stated_u = (k - 1) / (k - 1).gcd(&l) + 1;
    let stated_matches = gamma_k(p, stated_u) == image;
    let exact_u = image.len() as u64 + 1;
    debug_assert_eq!(gamma_k(p, exact_u), image);
    ImageOfGammaK { image, stated_u, stated_matches, exact_u }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FixedPointKind {
    /// `|f'(x)|_p = |k|_p < 1`.
    Attracting,
    /// The map is an isometry on the sphere.
    SiegelCenter,
}

pub fn classify_fixed_points(p: u64, k: u64) -> FixedPointKind {
    if k % p == 0 {
        FixedPointKind::Attracting
    } else {
        FixedPointKind::SiegelCenter
    }
}

/// All Teichmüller lifts of `Γ_p` at a fixed precision, indexed by [`RootIndex`].
#[derive(Clone, Debug)]
pub struct UnityTable {
    p: u64,
    precision: u32,
    xi: u64,
    xi_lift: PadicInt,
    lifts: Option<Vec<PadicInt>>,
    /// residue mod p → index
    logs: Option<Vec<u64>>,
}

impl UnityTable {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        let xi = primitive_root(p)?;
        let xi_lift = teichmuller_lift(xi, p, precision)?;
        let (lifts, logs) = if p <= EAGER_TABLE_LIMIT {
            let mut lifts = Vec::with_capacity((p - 1) as usize);
            let mut logs = vec![u64::MAX; p as usize];
            let mut r = 1u64;
            for a in 0..p - 1 {
                lifts.push(teichmuller_lift(r, p, precision)?);
                logs[r as usize] = a;
                r = arith::mul_mod(r, xi, p);
            }
            (Some(lifts), Some(logs))
        } else {
            (None, None)
        };
        Ok(UnityTable { p, precision, xi, xi_lift, lifts, logs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The primitive root `ξ` modulo `p`.
    pub fn primitive_root(&self) -> u64 {
        self.xi
    }

    pub fn xi_lift(&self) -> &PadicInt {
        &self.xi_lift
    }

    pub fn lift(&self, index: RootIndex) -> PadicInt {
        match &self.lifts {
            Some(lifts) => lifts[index.value() as usize].clone(),
            None => teichmuller_lift(arith::pow_mod(self.xi, index.value(), self.p), self.p, self.precision)
                .expect("powers of a primitive root are units"),
        }
    }

    pub fn index_of_residue(&self, r: u64) -> Option<RootIndex> {
        let r = r % self.p;
        if r == 0 {
            return None;
        }
        let a = match &self.logs {
            Some(logs) => logs[r as usize],
            None => {
                let mut acc = 1u64;
                let mut a = 0;
                while acc != r {
                    acc = arith::mul_mod(acc, self.xi, self.p);
                    a += 1;
                }
                a
            }
        };
        Some(RootIndex::new(a, self.p))
    }

    /// Index of the root of unity nearest to a sphere point.
    pub fn index_of(&self, x: &PadicInt) -> Result<RootIndex> {
        self.index_of_residue(x.residue_mod_p() as u64).ok_or(Error::NotOnSphere)
    }

    /// Splits a sphere point as `x = γ + u` with `γ ∈ Γ_p` and `|u|_p ≤ 1/p`.
    pub fn decompose(&self, x: &PadicInt) -> Result<(RootIndex, PadicInt)> {
        if x.p() as u64 != self.p || x.precision() != self.precision {
            return Err(Error::IncompatibleOperands(
                x.p(),
                x.precision(),
                self.p as u32,
                self.precision,
            ));
        }
        let index = self.index_of(x)?;
        let u = x.sub(&self.lift(index))?;
        Ok((index, u))
    }

    /// Recovers the index of an exact lift; `None` if `x` is not a root of unity.
    pub fn index_of_lift(&self, x: &PadicInt) -> Option<RootIndex> {
        let index = self.index_of(x).ok()?;
        (self.lift(index) == *x).then_some(index)
    }
}
