//! Markov chains induced by the RDS on index space.
//!
//! Under i.i.d. exponent draws the index dynamics form a homogeneous chain
//! with `P(a, b) = Σ_{j : a·s_j ≡ b} q_j`. On the attractor every map is a
//! permutation, so the chain is doubly stochastic there.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::{attractor_set, invariant_decomposition, linalg, RdsSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::unity::RootIndex;

/// Largest index space handled by the dense solvers.
pub const MAX_EXACT_STATES: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<T> {
    states: Vec<RootIndex>,
    entries: Vec<Vec<T>>,
}

impl<T: Scalar> TransitionMatrix<T> {
    pub fn new(states: Vec<RootIndex>, entries: Vec<Vec<T>>) -> Self {
        assert_eq!(states.len(), entries.len());
        assert!(entries.iter().all(|row| row.len() == states.len()));
        TransitionMatrix { states, entries }
    }

    /// Chain of the maps `a ↦ a·s_j` restricted to `states`, which must be closed.
    pub fn from_maps(spec: &RdsSpec, states: Vec<RootIndex>) -> Result<Self> {
        let position: BTreeMap<RootIndex, usize> = states.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let probabilities: Vec<T> = spec.probabilities().iter().map(T::from_rational).collect();
        let n = states.len();
        let mut entries = vec![vec![T::zero(); n]; n];
        for (i, a) in states.iter().enumerate() {
            for (&s, q) in spec.exponents().iter().zip(&probabilities) {
                let b = a.power(s);
                let j = *position.get(&b).ok_or_else(|| {
                    Error::InternalInconsistency(format!("{a} maps to {b} outside the state set"))
                })?;
                entries[i][j] = entries[i][j].clone() + q.clone();
            }
        }
        Ok(TransitionMatrix { states, entries })
    }

    pub fn states(&self) -> &[RootIndex] {
        &self.states
    }

    pub fn entries(&self) -> &[Vec<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn position(&self, a: RootIndex) -> Option<usize> {
        self.states.binary_search(&a).ok().or_else(|| self.states.iter().position(|&s| s == a))
    }

    pub fn get(&self, from: RootIndex, to: RootIndex) -> Option<&T> {
        Some(&self.entries[self.position(from)?][self.position(to)?])
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.entries.iter().map(|row| row.iter().cloned().fold(T::zero(), |a, b| a + b)).collect()
    }

    pub fn column_sums(&self) -> Vec<T> {
        (0..self.len())
            .map(|j| self.entries.iter().map(|row| row[j].clone()).fold(T::zero(), |a, b| a + b))
            .collect()
    }

    pub fn is_stochastic(&self) -> bool {
        self.row_sums().iter().all(|s| (s.clone() - T::one()).is_negligible())
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.is_stochastic() && self.column_sums().iter().all(|s| (s.clone() - T::one()).is_negligible())
    }

    /// Sub-matrix on a subset of states, in the subset's order.
    pub fn restrict(&self, subset: &[RootIndex]) -> Option<Self> {
        let pos: Vec<usize> = subset.iter().map(|&a| self.position(a)).collect::<Option<_>>()?;
        let entries = pos.iter().map(|&i| pos.iter().map(|&j| self.entries[i][j].clone()).collect()).collect();
        Some(TransitionMatrix { states: subset.to_vec(), entries })
    }

    /// Strongly connected classes of the positive-probability graph, via mutual reachability.
    pub fn communicating_classes(&self) -> Vec<Vec<RootIndex>> {
        let n = self.len();
        let reach: Vec<Vec<bool>> = (0..n)
            .map(|start| {
                let mut seen = vec![false; n];
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(i) = stack.pop() {
                    for j in 0..n {
                        if !seen[j] && !self.entries[i][j].is_zero() {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
                seen
            })
            .collect();
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let class: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            for &j in &class {
                assigned[j] = true;
            }
            let mut members: Vec<RootIndex> = class.into_iter().map(|j| self.states[j]).collect();
            members.sort();
            classes.push(members);
        }
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

/// The chain on the attractor, states in ascending index order.
pub fn transition_matrix<T: Scalar>(spec: &RdsSpec) -> Result<TransitionMatrix<T>> {
    TransitionMatrix::from_maps(spec, attractor_set(spec.p(), spec.exponents())?)
}

/// The chain on all of `Z/(p−1)`.
pub fn index_chain<T: Scalar>(spec: &RdsSpec) -> Result<TransitionMatrix<T>> {
    let p = spec.p();
    TransitionMatrix::from_maps(spec, (0..p - 1).map(|a| RootIndex::new(a, p)).collect())
}

/// Stationary distribution of `P` restricted to `component`, by solving `πP = π`, `Σπ = 1`.
pub fn component_stationary<T: Scalar>(matrix: &TransitionMatrix<T>, component: &[RootIndex]) -> Result<Vec<T>> {
    let sub = matrix
        .restrict(component)
        .ok_or_else(|| Error::InternalInconsistency("component is not inside the chain".into()))?;
    let n = sub.len();
    // rows of (Pᵀ − I), last one replaced by the normalization
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = sub.entries[j][i].clone();
                    if i == j {
                        v - T::one()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut b = vec![T::zero(); n];
    a[n - 1] = vec![T::one(); n];
    b[n - 1] = T::one();
    linalg::solve(a, b)
        .ok_or_else(|| Error::InternalInconsistency(format!("singular stationary system on {component:?}")))
}

/// Per-component stationary distributions; each is checked to be uniform.
pub fn stationary_distributions<T: Scalar>(
    matrix: &TransitionMatrix<T>,
    components: &[Vec<RootIndex>],
) -> Result<Vec<Vec<T>>> {
    components
        .iter()
        .map(|c| {
            let pi = component_stationary(matrix, c)?;
            let uniform = T::from_ratio(1, c.len() as u64);
            if pi.iter().any(|x| !(x.clone() - uniform.clone()).is_negligible()) {
                return Err(Error::InternalInconsistency(format!(
                    "stationary distribution on {c:?} is not uniform: {pi:?}"
                )));
            }
            Ok(pi)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Absorption<T> {
    pub components: Vec<Vec<RootIndex>>,
    /// For every index: probability of ending in each component.
    pub probabilities: BTreeMap<RootIndex, Vec<T>>,
}

impl<T> Absorption<T> {
    pub fn transient(&self) -> impl Iterator<Item = (&RootIndex, &Vec<T>)> {
        let inside: BTreeSet<RootIndex> = self.components.iter().flatten().copied().collect();
        self.probabilities.iter().filter(move |(a, _)| !inside.contains(a))
    }
}

/// Absorption probabilities into each attractor component from every index.
pub fn absorption_analysis<T: Scalar>(spec: &RdsSpec) -> Result<Absorption<T>> {
    let p = spec.p();
    if p - 1 > MAX_EXACT_STATES {
        return Err(Error::TooLarge(p - 1));
    }
    let chain = index_chain::<T>(spec)?;
    let components = invariant_decomposition(p, spec.exponents());
    let k = components.len();
    let mut home: BTreeMap<RootIndex, usize> = BTreeMap::new();
    for (c, members) in components.iter().enumerate() {
        for &a in members {
            home.insert(a, c);
        }
    }
    let transient: Vec<RootIndex> = chain.states().iter().copied().filter(|a| !home.contains_key(a)).collect();
    let tpos: BTreeMap<RootIndex, usize> = transient.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let t = transient.len();
    // (I − Q) H = R
    let mut lhs = vec![vec![T::zero(); t]; t];
    let mut rhs = vec![vec![T::zero(); k]; t];
    for (i, &a) in transient.iter().enumerate() {
        lhs[i][i] = T::one();
        let row = &chain.entries()[chain.position(a).expect("index in chain")];
        for (j, &b) in chain.states().iter().enumerate() {
            let pij = &row[j];
            if pij.is_zero() {
                continue;
            }
            match (tpos.get(&b), home.get(&b)) {
                (Some(&tj), _) => lhs[i][tj] = lhs[i][tj].clone() - pij.clone(),
                (None, Some(&c)) => rhs[i][c] = rhs[i][c].clone() + pij.clone(),
                (None, None) => unreachable!("every index is transient or in a component"),
            }
        }
    }
    let solved = if t == 0 {
        Vec::new()
    } else {
        linalg::solve_multi(lhs, rhs)
            .ok_or_else(|| Error::InternalInconsistency("absorption system is singular".into()))?
    };
    let mut probabilities = BTreeMap::new();
    for &a in chain.states() {
        let row = match home.get(&a) {
            Some(&c) => (0..k).map(|i| if i == c { T::one() } else { T::zero() }).collect(),
            None => solved[tpos[&a]].clone(),
        };
        probabilities.insert(a, row);
    }
    Ok(Absorption { components, probabilities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ExactMatrix, Rational};
    use num_traits::{One, Zero};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ix(a: u64) -> RootIndex {
        RootIndex::new(a, 29)
    }

    fn spec29(q: [Rational; 3]) -> RdsSpec {
        RdsSpec::new(29, vec![29, 2, 3], q.to_vec(), 16, 0).unwrap()
    }

    #[test]
    fn p29_row() {
        let (q1, q2, q3) = (r(1, 5), r(3, 10), r(1, 2));
        let m: ExactMatrix = transition_matrix(&spec29([q1.clone(), q2.clone(), q3.clone()])).unwrap();
        assert_eq!(m.get(ix(4), ix(8)), Some(&q2));
        assert_eq!(m.get(ix(4), ix(12)), Some(&q3));
        assert_eq!(m.get(ix(4), ix(4)), Some(&q1));
        assert_eq!(m.get(ix(0), ix(0)), Some(&Rational::one()));
        assert!(m.is_doubly_stochastic());
    }

    #[test]
    fn single_p_exponent_is_identity() {
        let spec = RdsSpec::uniform(5, &[5]).unwrap();
        let m: ExactMatrix = transition_matrix(&spec).unwrap();
        assert_eq!(m.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { Rational::one() } else { Rational::zero() };
                assert_eq!(m.entries()[i][j], expect);
            }
        }
    }

    #[test]
    fn stationary_uniform() {
        for q in [[r(1, 3), r(1, 3), r(1, 3)], [r(1, 5), r(2, 5), r(2, 5)], [r(7, 10), r(1, 20), r(1, 4)]] {
            let spec = spec29(q);
            let m: ExactMatrix = transition_matrix(&spec).unwrap();
            let comps = invariant_decomposition(29, spec.exponents());
            let pis = stationary_distributions(&m, &comps).unwrap();
            assert_eq!(pis[0], vec![Rational::one()]);
            assert_eq!(pis[1], vec![r(1, 6); 6]);
        }
        let spec = RdsSpec::uniform(61, &[61, 2, 3]).unwrap();
        let m: ExactMatrix = transition_matrix(&spec).unwrap();
        let comp: Vec<RootIndex> = [12, 24, 48, 36].iter().map(|&a| RootIndex::new(a, 61)).collect();
        assert_eq!(component_stationary(&m, &comp).unwrap(), vec![r(1, 4); 4]);
    }

    #[test]
    fn float_chain_agrees() {
        let spec = spec29([r(1, 5), r(2, 5), r(2, 5)]);
        let m = transition_matrix::<f64>(&spec).unwrap();
        assert!(m.is_doubly_stochastic());
        let comps = invariant_decomposition(29, spec.exponents());
        let pis = stationary_distributions(&m, &comps).unwrap();
        assert!(pis[1].iter().all(|x| (x - 1.0 / 6.0).abs() < 1e-12));
        let f32m = transition_matrix::<f32>(&spec).unwrap();
        assert!((f32m.get(ix(4), ix(8)).unwrap() - 0.4).abs() < 1e-6);
    }

    #[test]
    fn classes_match_components() {
        for (p, ex) in [(29u64, vec![29u64, 2, 3]), (41, vec![11, 41]), (61, vec![61, 2]), (47, vec![14, 47])] {
            let spec = RdsSpec::uniform(p, &ex).unwrap();
            let m: ExactMatrix = transition_matrix(&spec).unwrap();
            assert_eq!(m.communicating_classes(), invariant_decomposition(p, &ex));
        }
    }

    #[test]
    fn absorption_rows() {
        let spec = spec29([r(1, 3), r(1, 3), r(1, 3)]);
        let abs: Absorption<Rational> = absorption_analysis(&spec).unwrap();
        assert_eq!(abs.probabilities[&ix(4)], vec![Rational::zero(), Rational::one()]);
        assert_eq!(abs.probabilities[&ix(0)], vec![Rational::one(), Rational::zero()]);
        for (_, row) in abs.transient() {
            assert_eq!(row.iter().cloned().sum::<Rational>(), Rational::one());
        }
        assert!(abs.probabilities[&ix(7)][0] > Rational::zero());
        assert_eq!(abs.transient().count(), 28 - 7);
    }

    #[test]
    fn absorption_size_guard() {
        let p = 4099u64;
        let spec = RdsSpec::uniform(p, &[p, 2]).unwrap();
        assert_eq!(absorption_analysis::<Rational>(&spec).unwrap_err(), Error::TooLarge(p - 1));
    }
}
