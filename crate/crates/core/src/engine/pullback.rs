//! Pullback convergence `dist(φ(n, θ^{−n}ω) S_1(0), I_s) → 0`.
//!
//! Writing a sphere point as `γ + u`, the pullback image is
//! `x^{S_{−n}}`, whose distance to `γ^{S_{−n}} ∈ Γ_p` is `|S_{−n}|_p |u|_p`
//! for odd `p`. The supremum over `|u|_p ≤ 1/p` is then `p^{−(v_n+1)}` with
//! `v_n = o_p(S_{−n})`. For `p = 2` it is `2^{−(v_n+2)}` once `v_n ≥ 1`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::analysis::report::serialize_rational;
use crate::analysis::{zeta_index, RdsSpec};
use crate::engine::noise::{NoiseProcess, Stream};
use crate::engine::orbit::Simulator;
use crate::error::Result;
use crate::padic::{inverse_power, PadicInt};
use crate::unity::RootIndex;
use crate::Rational;

/// Number of sphere points sampled by [`pullback_distance`].
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackDistance {
    pub n: u64,
    /// `v_n = o_p(S_{−n}(ω))`.
    pub exponent_valuation: u64,
    /// Closed-form sup distance to the roots of unity.
    #[serde(serialize_with = "serialize_rational")]
    pub closed_form: Rational,
    /// Sampled sup distance to the roots of unity.
    #[serde(serialize_with = "serialize_rational")]
    pub sampled: Rational,
    /// Every root of unity is mapped into the attractor by `x ↦ x^{S_{−n}}`.
    pub index_absorbed: bool,
    /// Closed-form Hausdorff distance to the attractor.
    #[serde(serialize_with = "serialize_rational")]
    pub hausdorff: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub hausdorff_sampled: Rational,
    /// The closed-form distance is below `p^{−K}` and reported as zero.
    pub at_precision_floor: bool,
}

impl PullbackDistance {
    pub fn agrees(&self) -> bool {
        self.closed_form == self.sampled && self.hausdorff == self.hausdorff_sampled
    }
}

/// `(distance, at_floor)` for `v = o_p(S)` at precision `K`.
pub fn pullback_closed_form(p: u32, precision: u32, v: u64) -> (Rational, bool) {
    let exponent = match (p, v) {
        (2, 0) => 1,
        (2, v) => v + 2,
        (_, v) => v + 1,
    };
    if exponent >= precision as u64 {
        (Rational::zero(), true)
    } else {
        (inverse_power(p, exponent as u32), false)
    }
}

pub fn pullback_distance(spec: &RdsSpec, n: u64) -> Result<PullbackDistance> {
    let sim = Simulator::new(spec)?;
    pullback_distance_with(&sim, &NoiseProcess::for_spec(spec, 0), n, DEFAULT_SAMPLES)
}

/// Closed form and sampled estimate for the first `n` backward draws of `noise`.
///
/// Sample points cycle through every root of unity with a perturbation of
/// norm exactly `1/p` (every other sample is `x = 3` when `p = 2`), so the
/// sampled supremum is attained whenever `samples ≥ max(p − 1, 2)`.
pub fn pullback_distance_with(sim: &Simulator, noise: &NoiseProcess, n: u64, samples: usize) -> Result<PullbackDistance> {
    let spec = sim.spec();
    let (p, precision) = (spec.p(), spec.precision());
    let mut exponent = BigUint::one();
    let mut v = 0;
    let mut index_multiplier = 1 % (p - 1);
    for j in noise.backward().take(n as usize) {
        let s = spec.exponents()[j];
        exponent *= s;
        v += sim.exponent_valuation(j);
        index_multiplier = crate::arith::mul_mod(index_multiplier, s % (p - 1), p - 1);
    }
    let index_absorbed = index_multiplier % zeta_index(p, spec.exponents()) == 0;

    let (closed_form, at_precision_floor) = pullback_closed_form(p as u32, precision, v);
    let hausdorff = if index_absorbed { closed_form.clone() } else { Rational::one() };

    // samples are units, so the exponent only matters modulo |(Z/p^K)^×|
    let group_order = BigUint::from(p - 1) * BigUint::from(p).pow(precision - 1);
    let exponent = exponent % group_order;
    let mut rng = noise.rng(Stream::Sampling);
    let mut sampled = Rational::zero();
    let mut hausdorff_sampled = Rational::zero();
    for i in 0..samples {
        let a = RootIndex::new(i as u64 % (p - 1), p);
        let x = if p == 2 && i % 2 == 1 {
            // |u|_2 = 1/2 with x ≡ 3 mod 4
            PadicInt::from_integer(3, p, precision)?
        } else {
            let t = loop {
                let t: u64 = rng.gen();
                if t % p != 0 {
                    break t;
                }
            };
            sim.table().lift(a).add(&PadicInt::from_integer(p as u128 * t as u128, p, precision)?)?
        };
        let y = x.pow(&exponent);
        let (b, u) = sim.table().decompose(&y)?;
        let d = u.norm();
        let h = if sim.in_attractor(b) { d.clone() } else { Rational::one() };
        sampled = sampled.max(d);
        hausdorff_sampled = hausdorff_sampled.max(h);
    }
    Ok(PullbackDistance {
        n,
        exponent_valuation: v,
        closed_form,
        sampled,
        index_absorbed,
        hausdorff,
        hausdorff_sampled,
        at_precision_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_distance() {
        let spec = RdsSpec::uniform(29, &[29, 2, 3]).unwrap().with_seed(5);
        let d = pullback_distance(&spec, 0).unwrap();
        assert_eq!(d.closed_form, Rational::new(1.into(), 29.into()));
        assert!(d.agrees());
        assert!(!d.index_absorbed);
        assert_eq!(d.hausdorff, Rational::one());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(pullback_closed_form(29, 16, 2), (inverse_power(29, 3), false));
        assert_eq!(pullback_closed_form(29, 16, 15), (Rational::zero(), true));
        assert_eq!(pullback_closed_form(29, 16, 14), (inverse_power(29, 15), false));
        assert_eq!(pullback_closed_form(2, 20, 0), (inverse_power(2, 1), false));
        assert_eq!(pullback_closed_form(2, 20, 3), (inverse_power(2, 5), false));
    }

    #[test]
    fn sampled_matches_closed_form() {
        for (p, ex) in [(29u64, vec![29u64, 2, 3]), (5, vec![5, 2]), (2, vec![2, 3]), (3, vec![3, 2]), (47, vec![14, 47])] {
            let spec = RdsSpec::uniform(p, &ex).unwrap().with_precision(12).unwrap();
            let sim = Simulator::new(&spec).unwrap();
            for seed in 0..4 {
                let noise = NoiseProcess::new(spec.probabilities(), seed, 0);
                for n in [0, 1, 2, 3, 5, 8, 13, 21] {
                    let d = pullback_distance_with(&sim, &noise, n, 4 * (p as usize)).unwrap();
                    assert!(d.agrees(), "p={p} seed={seed} n={n}: {d:?}");
                }
            }
        }
    }
}
