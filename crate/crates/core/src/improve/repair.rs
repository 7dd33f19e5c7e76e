use super::require_feasible;
use crate::error::Result;
use crate::model::{load_profile, Instance, Route};
use crate::scalar::Scalar;
use std::cmp::Ordering;

/// One pickup/delivery pair insertion into a route.
///
/// The pickup goes right after position `pickup_after` and the delivery right
/// after position `delivery_after` of the original sequence; equal positions
/// place the two back to back.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Insertion<S = f64> {
    pub request: usize,
    pub pickup_after: usize,
    pub delivery_after: usize,
    pub length: S,
    pub revenue: S,
}

impl<S: Scalar> Insertion<S> {
    pub fn apply(&self, inst: &Instance<S>, seq: &[usize]) -> Vec<usize> {
        let (a, b) = (self.pickup_after, self.delivery_after);
        let mut out = Vec::with_capacity(seq.len() + 2);
        out.extend_from_slice(&seq[..=a]);
        out.push(self.request);
        out.extend_from_slice(&seq[a + 1..=b]);
        out.push(inst.delivery_of(self.request));
        out.extend_from_slice(&seq[b + 1..]);
        out
    }
}

/// Best single-request insertion that raises revenue, if any.
///
/// Every unserved request is tried at every pickup/delivery position pair
/// whose spanned arcs all have room for its demand. Candidates are ranked by
/// revenue, then length, then sequence.
pub fn best_insertion<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Option<Insertion<S>> {
    let seq = route.seq();
    let loads = load_profile(inst, seq);
    let cap = i64::from(inst.capacity());
    let limit = inst.max_length() + S::length_tolerance();
    let last = seq.len() - 1;
    let mut best: Option<Insertion<S>> = None;

    for h in 1..=inst.n() {
        if route.served().contains(&h) {
            continue;
        }
        let mut served = route.served().clone();
        served.insert(h);
        let revenue = inst.revenue_of_set(&served);
        if revenue <= route.revenue() + S::improvement_eps() {
            continue;
        }
        let room = cap - i64::from(inst.demand_of(h));
        let d = inst.delivery_of(h);
        for a in 0..last {
            if loads[a] > room {
                continue;
            }
            let (u, w) = (seq[a], seq[a + 1]);
            let base = route.length() - inst.dist(u, w);
            let adjacent = base + inst.dist(u, h) + inst.dist(h, d) + inst.dist(d, w);
            consider(inst, seq, &mut best, h, a, a, adjacent, revenue, limit);
            let with_pickup = base + inst.dist(u, h) + inst.dist(h, w);
            // the gap closes at the first arc that cannot carry the demand
            for b in a + 1..last {
                if loads[b] > room {
                    break;
                }
                let (x, y) = (seq[b], seq[b + 1]);
                let length = with_pickup - inst.dist(x, y) + inst.dist(x, d) + inst.dist(d, y);
                consider(inst, seq, &mut best, h, a, b, length, revenue, limit);
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn consider<S: Scalar>(
    inst: &Instance<S>,
    seq: &[usize],
    best: &mut Option<Insertion<S>>,
    request: usize,
    a: usize,
    b: usize,
    length: S,
    revenue: S,
    limit: S,
) {
    if length > limit {
        return;
    }
    let cand = Insertion {
        request,
        pickup_after: a,
        delivery_after: b,
        length,
        revenue,
    };
    let better = match best {
        None => true,
        Some(cur) => match revenue
            .partial_cmp(&cur.revenue)
            .unwrap_or(Ordering::Equal)
            .reverse()
            .then_with(|| length.partial_cmp(&cur.length).unwrap_or(Ordering::Equal))
        {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => cand.apply(inst, seq) < cur.apply(inst, seq),
        },
    };
    if better {
        *best = Some(cand);
    }
}

/// Greedy best-insertion repair to a fixpoint, without checking the input.
pub(crate) fn repair_route<S: Scalar>(inst: &Instance<S>, mut route: Route<S>) -> Route<S> {
    while let Some(ins) = best_insertion(inst, &route) {
        route = Route::build(inst, ins.apply(inst, route.seq()));
    }
    route
}

/// Repeatedly applies the best revenue-raising insertion until none is left.
///
/// Fails if `route` is not feasible.
pub fn repair<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Result<Route<S>> {
    require_feasible(inst, route)?;
    Ok(repair_route(inst, route.clone()))
}
