//! Exact attractor analysis in index space `Z/(p−1)`.
//!
//! On the unit sphere the monomial RDS only ever moves a point's nearest root
//! of unity by `a ↦ a·s_j mod (p−1)`, so attractors, invariant subsets and
//! basins are all computed on integers.

pub mod linalg;
pub mod markov;
pub mod report;

use std::collections::{BTreeSet, VecDeque};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{PadicInt, DEFAULT_PRECISION};
use crate::unity::{RootIndex, UnityTable};
use crate::Rational;

/// An experiment: prime, exponents, their probabilities, precision and seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RdsSpec {
    p: u64,
    exponents: Vec<u64>,
    probabilities: Vec<Rational>,
    precision: u32,
    seed: u64,
}

impl RdsSpec {
    /// Validates every field and reports all violations together.
    pub fn new(
        p: u64,
        exponents: Vec<u64>,
        probabilities: Vec<Rational>,
        precision: u32,
        seed: u64,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if !arith::is_prime(p) || p > u32::MAX as u64 {
            problems.push(format!("p = {p} is not a prime below 2^32"));
        }
        if exponents.is_empty() {
            problems.push("at least one exponent is required".to_string());
        }
        for &s in &exponents {
            if s < 2 {
                problems.push(format!("exponent {s} is below 2"));
            }
        }
        let distinct: BTreeSet<_> = exponents.iter().collect();
        if distinct.len() != exponents.len() {
            problems.push("exponents must be pairwise distinct".to_string());
        }
        if probabilities.len() != exponents.len() {
            problems.push(format!(
                "{} probabilities given for {} exponents",
                probabilities.len(),
                exponents.len()
            ));
        }
        for q in &probabilities {
            if *q <= Rational::zero() {
                problems.push(format!("probability {q} is not positive"));
            }
        }
        let total: Rational = probabilities.iter().cloned().sum();
        if !probabilities.is_empty() && total != Rational::one() {
            problems.push(format!("probabilities sum to {total}, not 1"));
        }
        if precision == 0 {
            problems.push("precision must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(RdsSpec { p, exponents, probabilities, precision, seed })
        } else {
            Err(Error::InvalidSpec(problems))
        }
    }

    /// Equal probabilities, default precision, seed 0.
    pub fn uniform(p: u64, exponents: &[u64]) -> Result<Self> {
        let m = exponents.len().max(1) as u64;
        let q = vec![Rational::new(1.into(), m.into()); exponents.len()];
        Self::new(p, exponents.to_vec(), q, DEFAULT_PRECISION, 0)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_precision(self, precision: u32) -> Result<Self> {
        Self::new(self.p, self.exponents, self.probabilities, precision, self.seed)
    }

    pub fn with_probabilities(self, probabilities: Vec<Rational>) -> Result<Self> {
        Self::new(self.p, self.exponents, probabilities, self.precision, self.seed)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probabilities
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// At least one exponent is divisible by `p`, so the sphere is attracted.
    pub fn is_attracting(&self) -> bool {
        self.exponents.iter().any(|s| s % self.p == 0)
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.is_attracting() {
            Vec::new()
        } else {
            vec![format!(
                "no exponent is divisible by p = {}: sphere dynamics are isometric; no attraction claim",
                self.p
            )]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTrace {
    pub prime: u64,
    pub exponent: u32,
    /// Exponents sharing this prime; non-empty means the factor was removed.
    pub shared_with: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorOrder {
    pub q: u64,
    pub factors: Vec<FactorTrace>,
}

/// Largest divisor `q` of `p−1` coprime to every exponent.
pub fn attractor_order(p: u64, exponents: &[u64]) -> AttractorOrder {
    let mut q = p - 1;
    let factors = arith::factorize(p - 1)
        .into_iter()
        .map(|(prime, exponent)| {
            let shared_with: Vec<u64> = exponents.iter().copied().filter(|s| s % prime == 0).collect();
            if !shared_with.is_empty() {
                q /= prime.pow(exponent);
            }
            FactorTrace { prime, exponent, shared_with }
        })
        .collect();
    AttractorOrder { q, factors }
}

/// `(p−1)/q`: the attractor is generated by `ζ = ξ^{(p−1)/q}`.
pub fn zeta_index(p: u64, exponents: &[u64]) -> u64 {
    (p - 1) / attractor_order(p, exponents).q
}

/// Image of `Γ_p` under `f_{s_1}^{p−1} ∘ … ∘ f_{s_m}^{p−1}`, computed literally.
pub fn attractor_image(p: u64, exponents: &[u64]) -> Vec<RootIndex> {
    let n = p - 1;
    let multiplier = exponents
        .iter()
        .fold(1 % n, |acc, &s| arith::mul_mod(acc, arith::pow_mod(s, p - 1, n), n));
    let image: BTreeSet<RootIndex> =
        (0..n).map(|a| RootIndex::new(arith::mul_mod(a, multiplier, n), p)).collect();
    image.into_iter().collect()
}

/// The attractor `I_s`, ascending; cross-checked against [`attractor_image`].
pub fn attractor_set(p: u64, exponents: &[u64]) -> Result<Vec<RootIndex>> {
    let step = zeta_index(p, exponents);
    let set: Vec<RootIndex> = (0..p - 1).step_by(step as usize).map(|a| RootIndex::new(a, p)).collect();
    if set != attractor_image(p, exponents) {
        return Err(Error::InternalInconsistency(format!(
            "attractor for p={p}, s={exponents:?} disagrees with the composed-power image"
        )));
    }
    Ok(set)
}

/// Partition of the attractor into minimal invariant subsets.
///
/// Components are orbits of the group generated by the exponents acting on
/// `Z/q`, found by union-find and ordered by smallest member.
pub fn invariant_decomposition(p: u64, exponents: &[u64]) -> Vec<Vec<RootIndex>> {
    let q = attractor_order(p, exponents).q;
    let step = (p - 1) / q;
    let mut parent: Vec<usize> = (0..q as usize).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for b in 0..q {
        for &s in exponents {
            let (x, y) = (find(&mut parent, b as usize), find(&mut parent, arith::mul_mod(b, s % q, q) as usize));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<RootIndex>> = Default::default();
    for b in 0..q as usize {
        let root = find(&mut parent, b);
        groups.entry(root).or_default().push(RootIndex::new(b as u64 * step, p));
    }
    let mut components: Vec<Vec<RootIndex>> = groups.into_values().collect();
    for c in &mut components {
        c.sort();
    }
    components.sort_by_key(|c| c[0]);
    components
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleMapOrbits {
    pub exponent: u64,
    /// Multiplicative order of the exponent modulo `q`.
    pub order_mod_q: u64,
    /// Cycles in iteration order, each starting at its smallest index.
    pub orbits: Vec<Vec<RootIndex>>,
}

/// Cycle decomposition of `f_{s_j}` on the attractor (`j` is zero-based).
pub fn single_map_orbits(p: u64, exponents: &[u64], j: usize) -> Result<SingleMapOrbits> {
    let s = *exponents.get(j).ok_or_else(|| {
        Error::InvalidSpec(vec![format!("map index {j} out of range for {} exponents", exponents.len())])
    })?;
    let q = attractor_order(p, exponents).q;
    let step = (p - 1) / q;
    let order_mod_q = arith::multiplicative_order(s % q, q)
        .ok_or_else(|| Error::InternalInconsistency(format!("{s} is not a unit modulo q = {q}")))?;
    let mut seen = vec![false; q as usize];
    let mut orbits = Vec::new();
    for start in 0..q {
        if seen[start as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut b = start;
        while !seen[b as usize] {
            seen[b as usize] = true;
            cycle.push(RootIndex::new(b * step, p));
            b = arith::mul_mod(b, s % q, q);
        }
        orbits.push(cycle);
    }
    Ok(SingleMapOrbits { exponent: s, order_mod_q, orbits })
}

/// Orbit length `d_a` of `a` under `·s mod q` and the bound `q_a = φ(q / gcd(a, q))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitLengthCertificate {
    pub orbit_length: u64,
    pub reduced_modulus: u64,
    pub bound: u64,
}

impl OrbitLengthCertificate {
    pub fn holds(&self) -> bool {
        self.bound % self.orbit_length == 0
    }
}

pub fn orbit_length_bound(q: u64, a: u64, s: u64) -> Result<OrbitLengthCertificate> {
    if s.gcd(&q) != 1 {
        return Err(Error::NotAUnitModQ { s, q });
    }
    let a = a % q;
    let mut orbit_length = 1;
    let mut b = arith::mul_mod(a, s % q, q);
    while b != a {
        b = arith::mul_mod(b, s % q, q);
        orbit_length += 1;
    }
    let reduced_modulus = q / a.gcd(&q);
    let cert = OrbitLengthCertificate { orbit_length, reduced_modulus, bound: arith::totient(reduced_modulus) };
    if !cert.holds() {
        return Err(Error::InternalInconsistency(format!(
            "orbit length {orbit_length} of {a} under ·{s} mod {q} does not divide {}",
            cert.bound
        )));
    }
    Ok(cert)
}

/// Whether `f_s(target) = target` for every exponent.
pub fn is_invariant(exponents: &[u64], target: &[RootIndex]) -> bool {
    let set: BTreeSet<RootIndex> = target.iter().copied().collect();
    exponents.iter().all(|&s| {
        let image: BTreeSet<RootIndex> = set.iter().map(|a| a.power(s)).collect();
        image == set
    })
}

/// All indices in `Z/(p−1)` that reach `target` with positive probability.
pub fn basin(p: u64, exponents: &[u64], target: &[RootIndex]) -> Result<Vec<RootIndex>> {
    if !is_invariant(exponents, target) {
        return Err(Error::NotInvariant);
    }
    let n = p - 1;
    let mut preimages: Vec<Vec<u64>> = vec![Vec::new(); n as usize];
    for a in 0..n {
        for &s in exponents {
            preimages[RootIndex::new(a, p).power(s).value() as usize].push(a);
        }
    }
    let mut inside = vec![false; n as usize];
    let mut queue: VecDeque<u64> = target.iter().map(|a| a.value()).collect();
    for &a in &queue {
        inside[a as usize] = true;
    }
    while let Some(b) = queue.pop_front() {
        for &a in &preimages[b as usize] {
            if !inside[a as usize] {
                inside[a as usize] = true;
                queue.push_back(a);
            }
        }
    }
    Ok((0..n).filter(|&a| inside[a as usize]).map(|a| RootIndex::new(a, p)).collect())
}

/// Confirms `lift(a)^s = lift(a·s)` for every index and exponent at `precision`.
pub fn cross_check_lifts(p: u64, exponents: &[u64], precision: u32) -> Result<()> {
    let table = UnityTable::new(p, precision)?;
    for a in 0..p - 1 {
        let index = RootIndex::new(a, p);
        let lift: PadicInt = table.lift(index);
        for &s in exponents {
            if lift.pow_u64(s) != table.lift(index.power(s)) {
                return Err(Error::InternalInconsistency(format!(
                    "lift of {index} raised to {s} is not the lift of {}",
                    index.power(s)
                )));
            }
        }
    }
    Ok(())
}
