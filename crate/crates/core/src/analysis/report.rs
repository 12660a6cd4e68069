use std::collections::BTreeMap;

use serde::Serialize;

use crate::analysis::markov::{absorption_analysis, stationary_distributions, transition_matrix, MAX_EXACT_STATES};
use crate::analysis::{attractor_order, attractor_set, invariant_decomposition, RdsSpec};
use crate::error::Result;
use crate::padic::PadicInt;
use crate::unity::{RootIndex, UnityTable};
use crate::{ExactMatrix, Rational};

/// Renders a rational as `num/den`, always with a denominator.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

#[derive(Clone, Debug, Serialize)]
pub struct RootEntry {
    pub index: RootIndex,
    pub label: String,
    pub lift: PadicInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractorReport {
    pub p: u64,
    pub precision: u32,
    pub exponents: Vec<u64>,
    pub probabilities: Vec<String>,
    pub q: u64,
    pub primitive_root: u64,
    pub zeta_index: u64,
    pub attractor: Vec<RootIndex>,
    pub components: Vec<Vec<RootIndex>>,
    pub stationary: Vec<Vec<String>>,
    pub transient_absorption: BTreeMap<u64, Vec<String>>,
    pub attracting: bool,
    pub warnings: Vec<String>,
    pub roots: Vec<RootEntry>,
}

pub fn analyze(spec: &RdsSpec) -> Result<AttractorReport> {
    let p = spec.p();
    let q = attractor_order(p, spec.exponents()).q;
    let attractor = attractor_set(p, spec.exponents())?;
    let components = invariant_decomposition(p, spec.exponents());
    let matrix: ExactMatrix = transition_matrix(spec)?;
    let stationary = stationary_distributions(&matrix, &components)?
        .iter()
        .map(|pi| pi.iter().map(fmt_rational).collect())
        .collect();
    let mut warnings = spec.warnings();
    let mut transient_absorption = BTreeMap::new();
    if p - 1 <= MAX_EXACT_STATES {
        let absorption = absorption_analysis::<Rational>(spec)?;
        for (a, row) in absorption.transient() {
            transient_absorption.insert(a.value(), row.iter().map(fmt_rational).collect());
        }
    } else {
        warnings.push(format!("absorption probabilities skipped: p−1 = {} exceeds {MAX_EXACT_STATES}", p - 1));
    }
    let table = UnityTable::new(p, spec.precision())?;
    let roots = attractor
        .iter()
        .map(|&index| RootEntry { index, label: index.to_string(), lift: table.lift(index) })
        .collect();
    Ok(AttractorReport {
        p,
        precision: spec.precision(),
        exponents: spec.exponents().to_vec(),
        probabilities: spec.probabilities().iter().map(fmt_rational).collect(),
        q,
        primitive_root: table.primitive_root(),
        zeta_index: (p - 1) / q,
        attractor,
        components,
        stationary,
        transient_absorption,
        attracting: spec.is_attracting(),
        warnings,
        roots,
    })
}
