//! Interference-strip patterns.
//!
//! Each post-burn-in orbit state `u_n` becomes a point `(g(u_n), y_n)` with
//! `y_n` uniform on `[a, b]`. Points cluster in vertical strips at `x = g(γ)`
//! for the attractor lifts `γ` of the component the orbit settled in; the
//! strip positions come from exact lifts, never from the samples.

use std::collections::{BTreeSet, VecDeque};

use num_traits::Signed;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::report::serialize_rational;
use crate::analysis::RdsSpec;
use crate::engine::{NoiseProcess, Simulator, Stream};
use crate::error::{Error, Result};
use crate::padic::{inverse_power, PadicInt};
use crate::unity::{RootIndex, UnityTable};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct PatternConfig {
    pub spec: RdsSpec,
    pub u0: PadicInt,
    /// Orbit length; the first `burn_in` states are discarded.
    pub n_particles: u64,
    pub burn_in: u64,
    pub y_range: (f64, f64),
    pub x_bins: usize,
    pub y_bins: usize,
    /// Samples must lie within `p^{−tolerance_digits}` of a strip center.
    pub tolerance_digits: u32,
}

impl PatternConfig {
    pub fn new(spec: RdsSpec, u0: PadicInt, n_particles: u64) -> Result<Self> {
        let p = spec.p();
        let config = PatternConfig {
            tolerance_digits: spec.precision() / 2,
            burn_in: crate::engine::default_burn_in(p),
            spec,
            u0,
            n_particles,
            y_range: (0.0, 1.0),
            x_bins: 200,
            y_bins: 50,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let (a, b) = self.y_range;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            problems.push(format!("y range [{a}, {b}] must satisfy a < b"));
        }
        if self.n_particles == 0 {
            problems.push("particle count must be at least 1".to_string());
        }
        if self.burn_in >= self.n_particles {
            problems.push(format!("burn-in {} leaves no particles out of {}", self.burn_in, self.n_particles));
        }
        if self.x_bins == 0 || self.y_bins == 0 {
            problems.push("histogram needs at least one bin per axis".to_string());
        }
        if self.u0.p() as u64 != self.spec.p() || self.u0.precision() != self.spec.precision() {
            problems.push(format!(
                "initial state {} does not match p = {}, K = {}",
                self.u0,
                self.spec.p(),
                self.spec.precision()
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(problems))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripCenter {
    pub index: RootIndex,
    #[serde(serialize_with = "serialize_rational")]
    pub exact: Rational,
    pub x: f64,
}

/// `g(lift(a))` for each index of a component, ascending in `x`.
pub fn strip_centers(spec: &RdsSpec, component: &[RootIndex]) -> Result<Vec<StripCenter>> {
    let table = UnityTable::new(spec.p(), spec.precision())?;
    Ok(centers_from_table(&table, component))
}

fn centers_from_table(table: &UnityTable, component: &[RootIndex]) -> Vec<StripCenter> {
    let mut centers: Vec<StripCenter> = component
        .iter()
        .map(|&index| {
            let exact = table.lift(index).measure_g();
            StripCenter { index, x: crate::Scalar::to_f64(&exact), exact }
        })
        .collect();
    centers.sort_by(|a, b| a.exact.cmp(&b.exact));
    centers
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub x_bins: usize,
    pub y_bins: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// `counts[x][y]`.
    pub counts: Vec<Vec<u64>>,
}

impl Histogram {
    pub fn new(x_bins: usize, y_bins: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Histogram { x_bins, y_bins, x_range, y_range, counts: vec![vec![0; y_bins]; x_bins] }
    }

    fn bin(v: f64, (lo, hi): (f64, f64), n: usize) -> usize {
        (((v - lo) / (hi - lo) * n as f64).floor().max(0.0) as usize).min(n - 1)
    }

    pub fn add(&mut self, x: f64, y: f64) {
        let i = Self::bin(x, self.x_range, self.x_bins);
        let j = Self::bin(y, self.y_range, self.y_bins);
        self.counts[i][j] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn y_marginal(&self) -> Vec<u64> {
        (0..self.y_bins).map(|j| self.counts.iter().map(|row| row[j]).sum()).collect()
    }

    /// Row-major counts, one x bin per line, after a two-line header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# x_bins y_bins x_min x_max y_min y_max\n");
        out.push_str(&format!(
            "# {} {} {} {} {} {}\n",
            self.x_bins, self.y_bins, self.x_range.0, self.x_range.1, self.y_range.0, self.y_range.1
        ));
        for row in &self.counts {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternResult {
    pub strip_centers: Vec<StripCenter>,
    /// Post-burn-in samples per strip, aligned with `strip_centers`.
    pub occupancy: Vec<u64>,
    pub reached_component: usize,
    #[serde(skip)]
    pub histogram: Histogram,
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
    /// Largest `|g(u_n) − g(γ_n)|` over samples, `γ_n` the state's nearest lift.
    #[serde(serialize_with = "serialize_rational")]
    pub max_center_gap: Rational,
    pub within_tolerance: bool,
}

impl PatternResult {
    /// Points CSV with 17 significant digits.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.samples {
            out.push_str(&format!("{x:.16e},{y:.16e}\n"));
        }
        out
    }
}

pub fn generate_pattern(config: &PatternConfig) -> Result<PatternResult> {
    config.validate()?;
    let sim = Simulator::new(&config.spec)?;
    generate_with(&sim, config, &NoiseProcess::for_spec(&config.spec, 0))
}

fn generate_with(sim: &Simulator, config: &PatternConfig, noise: &NoiseProcess) -> Result<PatternResult> {
    let p = config.spec.p();
    let table = sim.table();
    let (a, b) = config.y_range;
    let mut yrng = noise.rng(Stream::Auxiliary);
    let mut histogram = Histogram::new(config.x_bins, config.y_bins, (0.0, 1.0), config.y_range);
    let mut samples = Vec::with_capacity((config.n_particles - config.burn_in) as usize);
    let mut x = config.u0.clone();
    let mut reached: Option<usize> = None;
    let mut strips: Vec<StripCenter> = Vec::new();
    let mut occupancy = Vec::new();
    let mut max_center_gap = Rational::from_integer(0.into());
    let tolerance = inverse_power(p as u32, config.tolerance_digits);
    for (n, j) in (1..=config.n_particles).zip(noise.forward()) {
        x = sim.step(&x, j);
        if n <= config.burn_in {
            continue;
        }
        let index = table.index_of(&x).ok();
        let component = index.and_then(|a| sim.component_of(a));
        let component = match (reached, component) {
            (_, None) => {
                return Err(Error::NotAbsorbed(format!(
                    "state {x} at step {n} is not near the attractor; increase the burn-in"
                )))
            }
            (None, Some(c)) => {
                reached = Some(c);
                strips = centers_from_table(table, &sim.components()[c]);
                occupancy = vec![0; strips.len()];
                c
            }
            (Some(r), Some(c)) if r == c => c,
            (Some(r), Some(c)) => {
                return Err(Error::InternalInconsistency(format!("orbit moved from component {r} to {c}")))
            }
        };
        debug_assert_eq!(Some(component), reached);
        let index = index.expect("component implies index");
        let slot = strips.iter().position(|s| s.index == index).expect("index lies in its component");
        occupancy[slot] += 1;
        let g = x.measure_g();
        let gap = (&g - &strips[slot].exact).abs();
        if gap > max_center_gap {
            max_center_gap = gap;
        }
        let gx = crate::Scalar::to_f64(&g);
        let y = a + (b - a) * yrng.gen::<f64>();
        histogram.add(gx, y);
        samples.push((gx, y));
    }
    Ok(PatternResult {
        strip_centers: strips,
        occupancy,
        reached_component: reached.expect("at least one particle after burn-in"),
        histogram,
        samples,
        within_tolerance: max_center_gap <= tolerance,
        max_center_gap,
    })
}

/// Attractor components reachable from `u0` with positive probability.
pub fn reachable_components(sim: &Simulator, u0: &PadicInt) -> Vec<usize> {
    let Ok(start) = sim.table().index_of(u0) else {
        return Vec::new();
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for &s in sim.spec().exponents() {
            let b = a.power(s);
            if seen.insert(b) {
                queue.push_back(b);
            }
        }
    }
    let comps: BTreeSet<usize> = seen.into_iter().filter_map(|a| sim.component_of(a)).collect();
    comps.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub occupancy: Vec<u64>,
    /// Whether each strip count lies within 3σ of the uniform multinomial mean.
    pub within_three_sigma: Vec<bool>,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedReport {
    pub strip_centers: Vec<StripCenter>,
    pub outcomes: Vec<SeedOutcome>,
    pub occupancies_differ: bool,
}

/// Runs the pattern for every seed and requires identical strip sets.
pub fn seed_independence_check(config: &PatternConfig, seeds: &[u64]) -> Result<SeedReport> {
    config.validate()?;
    if seeds.is_empty() {
        return Err(Error::InvalidSpec(vec!["at least one seed is required".into()]));
    }
    let sim = Simulator::new(&config.spec)?;
    let reachable = reachable_components(&sim, &config.u0);
    if reachable.len() != 1 {
        return Err(Error::InvalidSpec(vec![format!(
            "initial state can settle in components {reachable:?}; strip sets would depend on chance"
        )]));
    }
    let runs: Vec<Result<PatternResult>> = seeds
        .par_iter()
        .map(|&seed| generate_with(&sim, config, &NoiseProcess::new(config.spec.probabilities(), seed, 0)))
        .collect();
    let runs: Vec<PatternResult> = runs.into_iter().collect::<Result<_>>()?;
    let reference = &runs[0].strip_centers;
    for (seed, run) in seeds.iter().zip(&runs) {
        if run.strip_centers != *reference {
            return Err(Error::ModelViolation(format!("seed {seed} produced a different strip set")));
        }
    }
    let outcomes = seeds
        .iter()
        .zip(&runs)
        .map(|(&seed, run)| {
            let n: u64 = run.occupancy.iter().sum();
            let k = run.occupancy.len() as f64;
            let mean = n as f64 / k;
            let sigma = (n as f64 * (1.0 / k) * (1.0 - 1.0 / k)).sqrt();
            SeedOutcome {
                seed,
                within_three_sigma: run.occupancy.iter().map(|&c| (c as f64 - mean).abs() <= 3.0 * sigma).collect(),
                occupancy: run.occupancy.clone(),
                within_tolerance: run.within_tolerance,
            }
        })
        .collect::<Vec<_>>();
    let occupancies_differ = outcomes.windows(2).any(|w| w[0].occupancy != w[1].occupancy);
    Ok(SeedReport { strip_centers: reference.clone(), outcomes, occupancies_differ })
}
