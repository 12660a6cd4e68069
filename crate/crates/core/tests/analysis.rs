use std::collections::{BTreeMap, BTreeSet};

use padic_rds::analysis::markov::{absorption_analysis, index_chain, stationary_distributions, transition_matrix};
use padic_rds::analysis::{attractor_order, attractor_set, basin, invariant_decomposition, RdsSpec};
use padic_rds::engine::{NoiseProcess, Simulator};
use padic_rds::{ExactMatrix, FloatAbsorption, PadicInt, Rational, RootIndex, UnityTable};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn idx(a: u64) -> RootIndex {
    RootIndex::new(a, 29)
}

#[test]
fn p29_chain_edges() {
    let q = vec![r(1, 7), r(2, 7), r(4, 7)];
    let spec = RdsSpec::new(29, vec![29, 2, 3], q.clone(), 16, 0).unwrap();
    let m: ExactMatrix = transition_matrix(&spec).unwrap();
    let edges = [
        (4, 8, 1), (4, 12, 2), (8, 16, 1), (8, 24, 2), (12, 24, 1), (12, 8, 2),
        (16, 4, 1), (16, 20, 2), (20, 12, 1), (20, 4, 2), (24, 20, 1), (24, 16, 2),
    ];
    let mut expected: BTreeMap<(u64, u64), Rational> = BTreeMap::new();
    for (a, b, j) in edges {
        expected.insert((a, b), q[j].clone());
    }
    for a in (4..=24).step_by(4) {
        expected.insert((a, a), q[0].clone());
    }
    expected.insert((0, 0), r(1, 1));
    for &a in m.states() {
        for &b in m.states() {
            let want = expected.get(&(a.value(), b.value())).cloned().unwrap_or_else(|| r(0, 1));
            assert_eq!(m.get(a, b).unwrap(), &want, "{a} -> {b}");
        }
    }
}

#[test]
fn golden_decompositions() {
    let sizes = |p, ex: &[u64]| -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for c in invariant_decomposition(p, ex) {
            *out.entry(c.len()).or_insert(0) += 1;
        }
        out
    };
    assert_eq!(sizes(41, &[11, 41]), BTreeMap::from([(1, 10), (2, 15)]));
    assert_eq!(sizes(41, &[17, 41]), BTreeMap::from([(1, 8), (4, 8)]));
    assert_eq!(sizes(47, &[14, 47]), BTreeMap::from([(1, 1), (22, 1)]));
    assert_eq!(sizes(29, &[29, 2, 3]), BTreeMap::from([(1, 1), (6, 1)]));
    assert_eq!(attractor_order(61, &[61, 2]).q, 15);
}

/// Components equal the closed strongly connected classes of the transition graph.
fn scc_oracle(p: u64, exponents: &[u64]) -> BTreeSet<Vec<u64>> {
    let n = (p - 1) as usize;
    let mut g = DiGraph::<u64, ()>::new();
    let nodes: Vec<_> = (0..n as u64).map(|a| g.add_node(a)).collect();
    for a in 0..n as u64 {
        for &s in exponents {
            let b = ((a as u128 * s as u128) % n as u128) as usize;
            g.update_edge(nodes[a as usize], nodes[b], ());
        }
    }
    let mut out = BTreeSet::new();
    for scc in tarjan_scc(&g) {
        let members: BTreeSet<_> = scc.iter().copied().collect();
        let closed = scc.iter().all(|&v| g.neighbors(v).all(|w| members.contains(&w)));
        if closed {
            let mut c: Vec<u64> = scc.iter().map(|&v| g[v]).collect();
            c.sort_unstable();
            out.insert(c);
        }
    }
    out
}

#[test]
fn decomposition_matches_scc_on_many_specs() {
    for p in [3u64, 5, 7, 11, 13, 29, 31, 41, 43, 47, 61, 97, 101] {
        for ex in [vec![p, 2], vec![p, 3], vec![p, 2, 3], vec![5, p], vec![p, 6, 10], vec![2, 3]] {
            let ex: Vec<u64> = ex.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
            let got: BTreeSet<Vec<u64>> = invariant_decomposition(p, &ex)
                .into_iter()
                .map(|c| c.into_iter().map(RootIndex::value).collect())
                .collect();
            assert_eq!(got, scc_oracle(p, &ex), "p={p} s={ex:?}");
        }
    }
}

proptest! {
    #[test]
    fn sccs_of_restricted_chain_are_components(p in prop::sample::select(vec![7u64, 13, 29, 31, 37, 41, 53]),
                                                ex in prop::collection::btree_set(2u64..200, 1..4)) {
        let ex: Vec<u64> = ex.into_iter().collect();
        let spec = RdsSpec::uniform(p, &ex).unwrap();
        let m: ExactMatrix = transition_matrix(&spec).unwrap();
        prop_assert!(m.is_doubly_stochastic());
        let mut classes = m.communicating_classes();
        classes.sort();
        let mut comps = invariant_decomposition(p, &ex);
        comps.sort();
        prop_assert_eq!(classes, comps);
    }

    #[test]
    fn congruent_exponent_changes_nothing(p in prop::sample::select(vec![11u64, 29, 41, 47]),
                                         s in 2u64..60, k in 1u64..4) {
        let t = s + k * (p - 1);
        let base = vec![p, s];
        let mut more = vec![p, s, t];
        more.dedup();
        prop_assert_eq!(attractor_set(p, &base).unwrap(), attractor_set(p, &more).unwrap());
        prop_assert_eq!(invariant_decomposition(p, &base), invariant_decomposition(p, &more));
    }

    #[test]
    fn stationary_is_uniform_for_any_weights(w in prop::collection::vec(1i64..50, 3)) {
        let total: i64 = w.iter().sum();
        let q = w.iter().map(|&x| r(x, total)).collect();
        let spec = RdsSpec::new(29, vec![29, 2, 3], q, 16, 0).unwrap();
        let m: ExactMatrix = transition_matrix(&spec).unwrap();
        let comps = invariant_decomposition(29, spec.exponents());
        for (c, pi) in comps.iter().zip(stationary_distributions(&m, &comps).unwrap()) {
            prop_assert!(pi.iter().all(|x| *x == r(1, c.len() as i64)));
        }
    }
}

/// Absorbing component of index `a`: the orbit of `a mod q` under the exponents.
fn crt_oracle(p: u64, ex: &[u64], a: u64, comps: &[Vec<RootIndex>]) -> usize {
    let q = attractor_order(p, ex).q;
    let d = (p - 1) / q;
    // the attractor element congruent to a mod q
    let target = (0..q).map(|k| k * d).find(|x| x % q == a % q).unwrap();
    comps.iter().position(|c| c.iter().any(|b| b.value() == target)).unwrap()
}

#[test]
fn absorption_is_deterministic() {
    for (p, ex) in [(29u64, vec![29u64, 2, 3]), (41, vec![11, 41]), (41, vec![17, 41]), (61, vec![61, 2]), (37, vec![37, 6, 4])] {
        let spec = RdsSpec::uniform(p, &ex).unwrap();
        let abs = absorption_analysis::<Rational>(&spec).unwrap();
        for (a, row) in &abs.probabilities {
            assert_eq!(row.iter().cloned().sum::<Rational>(), r(1, 1));
            let c = crt_oracle(p, &ex, a.value(), &abs.components);
            for (i, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == c { r(1, 1) } else { r(0, 1) }, "p={p} {a}");
            }
            let target: Vec<RootIndex> = abs.components[c].clone();
            assert!(basin(p, &ex, &target).unwrap().contains(a));
        }
    }
}

#[test]
fn float_absorption_agrees() {
    let spec = RdsSpec::new(29, vec![29, 2, 3], vec![r(1, 5), r(2, 5), r(2, 5)], 16, 0).unwrap();
    let exact = absorption_analysis::<Rational>(&spec).unwrap();
    let float: FloatAbsorption = absorption_analysis(&spec).unwrap();
    for (a, row) in &exact.probabilities {
        for (x, y) in row.iter().zip(&float.probabilities[a]) {
            assert!((padic_rds::Scalar::to_f64(x) - y).abs() < 1e-12);
        }
    }
}

/// Monte Carlo: starting from a lift of `ξ^7` every trajectory ends in `{1}`.
#[test]
fn monte_carlo_absorption_oracle() {
    let spec = RdsSpec::uniform(29, &[29, 2, 3]).unwrap().with_seed(2024);
    let sim = Simulator::new(&spec).unwrap();
    let exact = absorption_analysis::<Rational>(&spec).unwrap();
    let start = sim.table().lift(idx(7)).add(&PadicInt::from_integer(29 * 5, 29, 16).unwrap()).unwrap();
    let trials = 20_000;
    let mut hits = vec![0u64; exact.components.len()];
    for trial in 0..trials {
        let noise = NoiseProcess::for_spec(&spec, trial);
        let mut x = start.clone();
        let mut component = None;
        for j in noise.forward().take(200) {
            x = sim.step(&x, j);
            let a = sim.table().index_of(&x).unwrap();
            if let Some(c) = sim.component_of(a) {
                component = Some(c);
                break;
            }
        }
        hits[component.expect("absorbed within 200 steps")] += 1;
    }
    for (c, want) in exact.probabilities[&idx(7)].iter().enumerate() {
        let freq = hits[c] as f64 / trials as f64;
        let p = padic_rds::Scalar::to_f64(want);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * sigma + 1e-12, "component {c}: {freq} vs {p}");
    }
}

#[test]
fn deterministic_single_map_matches_forward_orbit() {
    for (p, s) in [(29u64, 2u64), (41, 11), (47, 14), (61, 4)] {
        let spec = RdsSpec::uniform(p, &[s]).unwrap();
        let abs = absorption_analysis::<Rational>(&spec).unwrap();
        let chain: ExactMatrix = index_chain(&spec).unwrap();
        assert_eq!(chain.len() as u64, p - 1);
        for a in 0..p - 1 {
            let mut orbit = BTreeSet::new();
            let mut x = RootIndex::new(a, p);
            while orbit.insert(x) {
                x = x.power(s);
            }
            let row = &abs.probabilities[&RootIndex::new(a, p)];
            for (c, comp) in abs.components.iter().enumerate() {
                let hit = comp.iter().any(|b| orbit.contains(b));
                assert_eq!(row[c], if hit { r(1, 1) } else { r(0, 1) });
            }
        }
    }
}

#[test]
fn attractor_lifts_are_roots_of_unity() {
    for (p, ex) in [(29u64, vec![29u64, 2, 3]), (61, vec![61, 2]), (47, vec![14, 47])] {
        let q = attractor_order(p, &ex).q;
        let table = UnityTable::new(p, 20).unwrap();
        for a in attractor_set(p, &ex).unwrap() {
            let x = table.lift(a);
            assert_eq!(x.pow_u64(q), PadicInt::one(p, 20).unwrap(), "p={p} {a}");
        }
    }
}
