use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{attractor_set, invariant_decomposition, RdsSpec};
use crate::arith;
use crate::engine::noise::NoiseProcess;
use crate::error::{Error, Result};
use crate::padic::{PadicInt, Valuation};
use crate::unity::{RootIndex, UnityTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitStep {
    pub step: u64,
    /// Zero-based index of the drawn exponent; `None` for the initial state.
    pub drawn: Option<usize>,
    pub state: PadicInt,
    /// Valuation of the distance to the nearest attractor lift.
    pub dist_valuation: Valuation,
    /// `v_n = Σ o_p(s_{j_i})` over the draws so far.
    pub cumulative_valuation: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTrace {
    pub p: u64,
    pub precision: u32,
    pub exponents: Vec<u64>,
    pub steps: Vec<OrbitStep>,
}

impl OrbitTrace {
    pub fn last(&self) -> &OrbitStep {
        self.steps.last().expect("a trace always holds the initial state")
    }

    /// CSV with columns `step,drawn_j,state,dist_valuation,cumulative_valuation`;
    /// `drawn_j` is one-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,drawn_j,state,dist_valuation,cumulative_valuation\n");
        for s in &self.steps {
            let j = s.drawn.map(|j| (j + 1).to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.step, j, s.state, s.dist_valuation, s.cumulative_valuation
            ));
        }
        out
    }
}

/// Precomputed lifts and attractor membership for one spec.
#[derive(Clone, Debug)]
pub struct Simulator {
    spec: RdsSpec,
    table: UnityTable,
    attractor: Vec<RootIndex>,
    components: Vec<Vec<RootIndex>>,
    component_of: Vec<Option<usize>>,
    exponent_valuations: Vec<u64>,
}

impl Simulator {
    pub fn new(spec: &RdsSpec) -> Result<Self> {
        let p = spec.p();
        let table = UnityTable::new(p, spec.precision())?;
        let attractor = attractor_set(p, spec.exponents())?;
        let components = invariant_decomposition(p, spec.exponents());
        let mut component_of = vec![None; (p - 1) as usize];
        for (c, members) in components.iter().enumerate() {
            for a in members {
                component_of[a.value() as usize] = Some(c);
            }
        }
        let exponent_valuations = spec
            .exponents()
            .iter()
            .map(|&s| arith::p_valuation(s, p).unwrap_or(0) as u64)
            .collect();
        Ok(Simulator { spec: spec.clone(), table, attractor, components, component_of, exponent_valuations })
    }

    pub fn spec(&self) -> &RdsSpec {
        &self.spec
    }

    pub fn table(&self) -> &UnityTable {
        &self.table
    }

    pub fn attractor(&self) -> &[RootIndex] {
        &self.attractor
    }

    pub fn components(&self) -> &[Vec<RootIndex>] {
        &self.components
    }

    pub fn component_of(&self, a: RootIndex) -> Option<usize> {
        self.component_of[a.value() as usize]
    }

    pub fn in_attractor(&self, a: RootIndex) -> bool {
        self.component_of(a).is_some()
    }

    /// `o_p(s_j)`.
    pub fn exponent_valuation(&self, j: usize) -> u64 {
        self.exponent_valuations[j]
    }

    pub fn step(&self, x: &PadicInt, j: usize) -> PadicInt {
        x.pow_u64(self.spec.exponents()[j])
    }

    /// Valuation of `inf_{z ∈ I_s} |x − z|_p`; zero when `x` is off the sphere
    /// or its nearest root lies outside the attractor.
    pub fn attractor_distance(&self, x: &PadicInt) -> Valuation {
        match self.table.index_of(x) {
            Ok(a) if self.in_attractor(a) => {
                x.sub(&self.table.lift(a)).expect("same ring").valuation()
            }
            _ => Valuation::Finite(0),
        }
    }

    fn check_state(&self, u0: &PadicInt) -> Result<()> {
        if u0.p() as u64 != self.spec.p() || u0.precision() != self.spec.precision() {
            return Err(Error::IncompatibleOperands(
                u0.p(),
                u0.precision(),
                self.spec.p() as u32,
                self.spec.precision(),
            ));
        }
        Ok(())
    }

    /// `n_steps` iterations `u_{n+1} = u_n^{s_{j_{n+1}}}` driven by `noise.forward()`.
    pub fn simulate(&self, u0: &PadicInt, n_steps: u64, noise: &NoiseProcess) -> Result<OrbitTrace> {
        self.check_state(u0)?;
        let mut steps = Vec::with_capacity(n_steps as usize + 1);
        steps.push(OrbitStep {
            step: 0,
            drawn: None,
            state: u0.clone(),
            dist_valuation: self.attractor_distance(u0),
            cumulative_valuation: 0,
        });
        let mut x = u0.clone();
        let mut v = 0;
        for (n, j) in (1..=n_steps).zip(noise.forward()) {
            x = self.step(&x, j);
            v += self.exponent_valuation(j);
            steps.push(OrbitStep {
                step: n,
                drawn: Some(j),
                state: x.clone(),
                dist_valuation: self.attractor_distance(&x),
                cumulative_valuation: v,
            });
        }
        Ok(OrbitTrace {
            p: self.spec.p(),
            precision: self.spec.precision(),
            exponents: self.spec.exponents().to_vec(),
            steps,
        })
    }
}

/// Orbit of `u0` under the spec's trial-0 noise.
pub fn simulate_orbit(spec: &RdsSpec, u0: &PadicInt, n_steps: u64) -> Result<OrbitTrace> {
    Simulator::new(spec)?.simulate(u0, n_steps, &NoiseProcess::for_spec(spec, 0))
}

/// Counts `k_{j,n}` of each exponent among the first `n` draws.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleProduct {
    pub n: u64,
    pub counts: Vec<u64>,
}

impl CocycleProduct {
    pub fn from_draws(m: usize, draws: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = vec![0; m];
        let mut n = 0;
        for j in draws {
            counts[j] += 1;
            n += 1;
        }
        CocycleProduct { n, counts }
    }

    /// `S_n = Π s_j^{k_{j,n}}`.
    pub fn exponent(&self, exponents: &[u64]) -> BigUint {
        exponents
            .iter()
            .zip(&self.counts)
            .fold(BigUint::from(1u32), |acc, (&s, &k)| acc * BigUint::from(s).pow(k as u32))
    }
}

pub fn recurrence_counters(spec: &RdsSpec, n: u64) -> CocycleProduct {
    let noise = NoiseProcess::for_spec(spec, 0);
    CocycleProduct::from_draws(spec.exponents().len(), noise.forward().take(n as usize))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialSummary {
    pub trial: u64,
    pub final_state: PadicInt,
    pub final_index: Option<RootIndex>,
    /// Attractor component holding the final nearest root, if any.
    pub component: Option<usize>,
    pub dist_valuation: String,
    pub cumulative_valuation: u64,
    pub counts: Vec<u64>,
}

/// Independent trials on a pool of `workers` threads; output ordered by trial.
pub fn run_trials(
    sim: &Simulator,
    u0: &PadicInt,
    n_steps: u64,
    trials: u64,
    workers: usize,
) -> Result<(Vec<OrbitTrace>, Vec<TrialSummary>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InternalInconsistency(e.to_string()))?;
    let results: Vec<Result<(OrbitTrace, TrialSummary)>> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|trial| {
                let noise = NoiseProcess::for_spec(sim.spec(), trial);
                let trace = sim.simulate(u0, n_steps, &noise)?;
                let last = trace.last();
                let final_index = sim.table().index_of(&last.state).ok();
                let summary = TrialSummary {
                    trial,
                    final_state: last.state.clone(),
                    final_index,
                    component: final_index.and_then(|a| sim.component_of(a)),
                    dist_valuation: last.dist_valuation.to_string(),
                    cumulative_valuation: last.cumulative_valuation,
                    counts: CocycleProduct::from_draws(
                        sim.spec().exponents().len(),
                        trace.steps.iter().filter_map(|s| s.drawn),
                    )
                    .counts,
                };
                Ok((trace, summary))
            })
            .collect()
    });
    let mut traces = Vec::with_capacity(results.len());
    let mut summaries = Vec::with_capacity(results.len());
    for r in results {
        let (t, s) = r?;
        traces.push(t);
        summaries.push(s);
    }
    Ok((traces, summaries))
}
