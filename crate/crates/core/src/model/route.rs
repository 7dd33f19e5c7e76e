use super::eval::{paired_requests, structural_violation};
use super::{validate_route, Instance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// A structurally valid vertex sequence with its served set and cached
/// length and revenue.
///
/// Structural validity means: starts at the start depot, ends at the end
/// depot, visits no vertex twice and every pickup precedes its delivery.
/// Capacity and the length limit are *not* implied; use [`Route::is_feasible`].
#[derive(Clone, Debug, PartialEq)]
pub struct Route<S = f64> {
    seq: Vec<usize>,
    served: BTreeSet<usize>,
    length: S,
    revenue: S,
}

/// Wire format of a route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "S: Scalar")]
pub struct RouteJson<S = f64> {
    pub seq: Vec<usize>,
    pub revenue: S,
    pub length: S,
}

impl<S: Scalar> Route<S> {
    pub fn new(inst: &Instance<S>, seq: Vec<usize>) -> Result<Self> {
        for &v in &seq {
            inst.check_vertex(v)?;
        }
        if let Some(v) = structural_violation(inst, &seq) {
            return Err(Error::Structural(v));
        }
        Ok(Self::build(inst, seq))
    }

    /// Builds a route from a sequence already known to be structurally valid.
    pub(crate) fn build(inst: &Instance<S>, seq: Vec<usize>) -> Self {
        debug_assert!(structural_violation(inst, &seq).is_none(), "{seq:?}");
        let served = paired_requests(inst, &seq);
        let length = seq
            .windows(2)
            .fold(S::zero(), |acc, w| acc + inst.dist(w[0], w[1]));
        let revenue = inst.revenue_of_set(&served);
        Self {
            seq,
            served,
            length,
            revenue,
        }
    }

    /// The route that serves nothing.
    pub fn empty(inst: &Instance<S>) -> Self {
        Self::build(inst, vec![inst.start(), inst.end()])
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn into_seq(self) -> Vec<usize> {
        self.seq
    }

    pub fn served(&self) -> &BTreeSet<usize> {
        &self.served
    }

    pub fn length(&self) -> S {
        self.length
    }

    pub fn revenue(&self) -> S {
        self.revenue
    }

    pub fn profit(&self) -> S {
        self.revenue - self.length
    }

    pub fn is_feasible(&self, inst: &Instance<S>) -> bool {
        validate_route(inst, &self.seq)
            .map(|e| e.feasible)
            .unwrap_or(false)
    }

    /// Route without the given requests' pickups and deliveries.
    pub fn without(&self, inst: &Instance<S>, requests: &BTreeSet<usize>) -> Self {
        let seq = self
            .seq
            .iter()
            .copied()
            .filter(|&v| inst.request_of(v).is_none_or(|h| !requests.contains(&h)))
            .collect();
        Self::build(inst, seq)
    }

    /// Total quality order: higher revenue first, then shorter length, then
    /// lexicographically smaller sequence. `Less` means `self` is better.
    pub fn quality_cmp(&self, other: &Self) -> Ordering {
        other
            .revenue
            .partial_cmp(&self.revenue)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                self.length
                    .partial_cmp(&other.length)
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| self.seq.cmp(&other.seq))
    }

    pub fn is_better_than(&self, other: &Self) -> bool {
        self.quality_cmp(other) == Ordering::Less
    }

    pub fn to_json(&self) -> RouteJson<S> {
        RouteJson {
            seq: self.seq.clone(),
            revenue: self.revenue,
            length: self.length,
        }
    }

    /// Parses a route and checks that its cached values match recomputation.
    pub fn from_json(inst: &Instance<S>, json: RouteJson<S>) -> Result<Self> {
        let route = Self::new(inst, json.seq)?;
        let tol = S::lit(1e-6);
        if (route.length - json.length).abs() > tol || (route.revenue - json.revenue).abs() > tol {
            return Err(Error::InvalidInstance(format!(
                "cached route values (length {}, revenue {}) disagree with recomputation ({}, {})",
                json.length, json.revenue, route.length, route.revenue
            )));
        }
        Ok(route)
    }
}

/// Keeps the best route per served set, sorted best first.
pub(crate) fn dedup_by_served<S: Scalar>(routes: impl IntoIterator<Item = Route<S>>) -> Vec<Route<S>> {
    let mut sorted: Vec<Route<S>> = routes.into_iter().collect();
    sorted.sort_by(|a, b| a.quality_cmp(b));
    let mut seen = BTreeSet::new();
    sorted.retain(|r| seen.insert(r.served.clone()));
    sorted
}
