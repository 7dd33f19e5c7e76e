use super::Instance;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// First rule a vertex sequence breaks, in reporting order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    RepeatVisit,
    /// Sequence does not start at the start depot and end at the end depot.
    Endpoints,
    Precedence,
    Capacity,
    Length,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::RepeatVisit => "repeat_visit",
            Violation::Endpoints => "endpoints",
            Violation::Precedence => "precedence",
            Violation::Capacity => "capacity",
            Violation::Length => "length",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct EvalResult<S = f64> {
    pub length: S,
    pub revenue: S,
    pub profit: S,
    pub feasible: bool,
    pub violation: Option<Violation>,
}

/// Total Euclidean length of consecutive legs.
pub fn route_length<S: Scalar>(inst: &Instance<S>, seq: &[usize]) -> Result<S> {
    for &v in seq {
        inst.check_vertex(v)?;
    }
    Ok(seq
        .windows(2)
        .fold(S::zero(), |acc, w| acc + inst.dist(w[0], w[1])))
}

/// Requests whose pickup and delivery both occur in `seq`.
pub(crate) fn paired_requests<S: Scalar>(inst: &Instance<S>, seq: &[usize]) -> BTreeSet<usize> {
    let mut present = vec![false; inst.num_vertices()];
    for &v in seq {
        present[v] = true;
    }
    (1..=inst.n())
        .filter(|&h| present[h] && present[inst.delivery_of(h)])
        .collect()
}

/// Repeat, endpoint and pairing/precedence checks.
pub(crate) fn structural_violation<S: Scalar>(
    inst: &Instance<S>,
    seq: &[usize],
) -> Option<Violation> {
    let mut position = vec![usize::MAX; inst.num_vertices()];
    for (i, &v) in seq.iter().enumerate() {
        if position[v] != usize::MAX {
            return Some(Violation::RepeatVisit);
        }
        position[v] = i;
    }
    if seq.len() < 2 || seq[0] != inst.start() || *seq.last().unwrap() != inst.end() {
        return Some(Violation::Endpoints);
    }
    for h in 1..=inst.n() {
        let p = position[h];
        let d = position[inst.delivery_of(h)];
        match (p == usize::MAX, d == usize::MAX) {
            (true, true) => {}
            (false, false) if p < d => {}
            _ => return Some(Violation::Precedence),
        }
    }
    None
}

/// Revenue of the delivered requests. A pickup without its delivery (or the
/// reverse) is a pairing error.
pub fn collected_revenue<S: Scalar>(inst: &Instance<S>, seq: &[usize]) -> Result<S> {
    for &v in seq {
        inst.check_vertex(v)?;
    }
    let served = paired_requests(inst, seq);
    let unpaired = seq
        .iter()
        .filter_map(|&v| inst.request_of(v))
        .any(|h| !served.contains(&h));
    if unpaired {
        return Err(Error::Structural(Violation::Precedence));
    }
    Ok(inst.revenue_of_set(&served))
}

/// Vehicle load on departure from each position of `seq`.
///
/// Vertices that are neither pickups nor deliveries leave the load unchanged.
pub fn load_profile<S: Scalar>(inst: &Instance<S>, seq: &[usize]) -> Vec<i64> {
    let mut load = 0i64;
    seq.iter()
        .map(|&v| {
            if inst.is_pickup(v) {
                load += i64::from(inst.demand_of(v));
            } else if inst.is_delivery(v) {
                load -= i64::from(inst.demand_of(v - inst.n()));
            }
            load
        })
        .collect()
}

/// Full feasibility check.
///
/// Violations are reported in the fixed order repeat, endpoints, precedence,
/// capacity, length. Only out-of-range vertices produce an `Err`.
pub fn validate_route<S: Scalar>(inst: &Instance<S>, seq: &[usize]) -> Result<EvalResult<S>> {
    let length = route_length(inst, seq)?;
    let revenue = inst.revenue_of_set(&paired_requests(inst, seq));
    let violation = structural_violation(inst, seq).or_else(|| {
        let cap = i64::from(inst.capacity());
        if load_profile(inst, seq).into_iter().any(|l| l > cap) {
            Some(Violation::Capacity)
        } else if length > inst.max_length() + S::length_tolerance() {
            Some(Violation::Length)
        } else {
            None
        }
    });
    Ok(EvalResult {
        length,
        revenue,
        profit: revenue - length,
        feasible: violation.is_none(),
        violation,
    })
}

/// Negative revenue plus `rho` times the route-length overage.
///
/// Only the length limit is relaxed; any other violation is an error.
pub fn shaped_objective<S: Scalar>(inst: &Instance<S>, seq: &[usize], rho: S) -> Result<S> {
    let eval = validate_route(inst, seq)?;
    match eval.violation {
        None | Some(Violation::Length) => {}
        Some(v) => return Err(Error::Structural(v)),
    }
    let overage = (eval.length - inst.max_length()).max(S::zero());
    Ok(-eval.revenue + rho * overage)
}
