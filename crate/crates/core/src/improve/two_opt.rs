use crate::model::{load_profile, Instance, Route};
use crate::scalar::Scalar;

/// Whether reversing `seq[i..=j]` keeps precedence and capacity.
fn reversal_feasible<S: Scalar>(inst: &Instance<S>, seq: &[usize], loads: &[i64], i: usize, j: usize) -> bool {
    let seg = &seq[i..=j];
    // a pair inside the segment would end up delivered before pickup
    if seg
        .iter()
        .any(|&v| inst.is_pickup(v) && seg.contains(&inst.delivery_of(v)))
    {
        return false;
    }
    let cap = i64::from(inst.capacity());
    let mut load = loads[i - 1];
    seg.iter().rev().all(|&v| {
        if inst.is_pickup(v) {
            load += i64::from(inst.demand_of(v));
        } else if inst.is_delivery(v) {
            load -= i64::from(inst.demand_of(v - inst.n()));
        }
        load <= cap
    })
}

/// Segment-reversal local search on a feasible route.
///
/// Each pass applies the feasible reversal with the largest length saving;
/// stops when no reversal shortens the route. The served set is unchanged.
pub fn two_opt_route<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Route<S> {
    let mut seq = route.seq().to_vec();
    let eps = S::improvement_eps();
    loop {
        let loads = load_profile(inst, &seq);
        let mut best: Option<(S, usize, usize)> = None;
        for i in 1..seq.len().saturating_sub(2) {
            for j in i + 1..seq.len() - 1 {
                let (a, b, c, d) = (seq[i - 1], seq[i], seq[j], seq[j + 1]);
                let delta = inst.dist(a, c) + inst.dist(b, d) - inst.dist(a, b) - inst.dist(c, d);
                if delta < -eps
                    && best.is_none_or(|(bd, _, _)| delta < bd)
                    && reversal_feasible(inst, &seq, &loads, i, j)
                {
                    best = Some((delta, i, j));
                }
            }
        }
        match best {
            Some((_, i, j)) => seq[i..=j].reverse(),
            None => break,
        }
    }
    if seq == route.seq() {
        route.clone()
    } else {
        Route::build(inst, seq)
    }
}
