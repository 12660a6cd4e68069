use serde::Serialize;

use crate::analysis::markov::{transition_matrix, TransitionMatrix};
use crate::analysis::report::fmt_rational;
use crate::analysis::RdsSpec;
use crate::engine::noise::NoiseProcess;
use crate::engine::orbit::Simulator;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::unity::RootIndex;
use crate::{ExactMatrix, FloatMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryCheck {
    pub from: RootIndex,
    pub to: RootIndex,
    pub exact: String,
    pub estimate: f64,
    /// Binomial standard error `sqrt(P(1−P)/n_from)`.
    pub sigma: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalChain {
    #[serde(skip)]
    pub exact: ExactMatrix,
    #[serde(skip)]
    pub estimate: FloatMatrix,
    pub start: RootIndex,
    pub burn_in: u64,
    pub transitions: u64,
    /// Departures counted from each attractor state.
    pub visits: Vec<u64>,
    pub max_abs_deviation: f64,
    /// Checks for every entry of every visited row.
    pub entries: Vec<EntryCheck>,
    pub all_pass: bool,
}

impl EmpiricalChain {
    /// Fraction of counted transitions leaving each state.
    pub fn occupancy(&self) -> Vec<f64> {
        self.visits.iter().map(|&v| v as f64 / self.transitions.max(1) as f64).collect()
    }
}

/// Default start: smallest index of the first non-singleton component.
fn default_start(sim: &Simulator) -> RootIndex {
    sim.components()
        .iter()
        .find(|c| c.len() > 1)
        .map(|c| c[0])
        .unwrap_or_else(|| RootIndex::unity(sim.spec().p()))
}

pub fn empirical_transition_matrix(spec: &RdsSpec, n_steps: u64, burn_in: u64) -> Result<EmpiricalChain> {
    let sim = Simulator::new(spec)?;
    let start = default_start(&sim);
    empirical_transition_matrix_with(&sim, &NoiseProcess::for_spec(spec, 0), start, n_steps, burn_in)
}

/// Frequency estimate of `P(a, b)` from one orbit started at the lift of `start`.
pub fn empirical_transition_matrix_with(
    sim: &Simulator,
    noise: &NoiseProcess,
    start: RootIndex,
    n_steps: u64,
    burn_in: u64,
) -> Result<EmpiricalChain> {
    let exact: ExactMatrix = transition_matrix(sim.spec())?;
    let n = exact.len();
    let position = |a: RootIndex| {
        exact
            .position(a)
            .ok_or_else(|| Error::InternalInconsistency(format!("orbit left the attractor at {a}")))
    };
    let mut counts = vec![vec![0u64; n]; n];
    let mut x = sim.table().lift(start);
    let mut current = position(start)?;
    for (step, j) in (0..burn_in + n_steps).zip(noise.forward()) {
        x = sim.step(&x, j);
        let a = sim
            .table()
            .index_of_lift(&x)
            .ok_or_else(|| Error::InternalInconsistency("state is no longer a root of unity".into()))?;
        let next = position(a)?;
        if step >= burn_in {
            counts[current][next] += 1;
        }
        current = next;
    }
    let visits: Vec<u64> = counts.iter().map(|row| row.iter().sum()).collect();
    let estimate_rows: Vec<Vec<f64>> = counts
        .iter()
        .zip(&visits)
        .map(|(row, &v)| row.iter().map(|&c| if v == 0 { 0.0 } else { c as f64 / v as f64 }).collect())
        .collect();
    let mut entries = Vec::new();
    let mut max_abs_deviation = 0.0f64;
    for i in (0..n).filter(|&i| visits[i] > 0) {
        for k in 0..n {
            let p = Scalar::to_f64(&exact.entries()[i][k]);
            let est = estimate_rows[i][k];
            let sigma = (p * (1.0 - p) / visits[i] as f64).sqrt();
            let dev = (est - p).abs();
            max_abs_deviation = max_abs_deviation.max(dev);
            entries.push(EntryCheck {
                from: exact.states()[i],
                to: exact.states()[k],
                exact: fmt_rational(&exact.entries()[i][k]),
                estimate: est,
                sigma,
                pass: dev <= 3.0 * sigma + 1e-12,
            });
        }
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(EmpiricalChain {
        estimate: TransitionMatrix::new(exact.states().to_vec(), estimate_rows),
        exact,
        start,
        burn_in,
        transitions: n_steps,
        visits,
        max_abs_deviation,
        entries,
        all_pass,
    })
}
