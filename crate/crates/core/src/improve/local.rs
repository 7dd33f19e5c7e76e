use super::budget::Budget;
use super::repair::repair_route;
use super::two_opt::two_opt_route;
use super::{require_feasible, revenue_improves};
use crate::error::Result;
use crate::model::{Instance, Route};
use crate::scalar::Scalar;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Removes `requests` from `route` and repairs the remainder greedily.
///
/// Repair may reinsert removed requests.
pub fn destroy_repair<S: Scalar>(
    inst: &Instance<S>,
    route: &Route<S>,
    requests: &BTreeSet<usize>,
) -> Route<S> {
    repair_route(inst, route.without(inst, requests))
}

/// Alternates greedy repair and 2-Opt until neither changes the route.
pub fn hill_climb<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Result<Route<S>> {
    require_feasible(inst, route)?;
    let mut cur = route.clone();
    loop {
        let next = two_opt_route(inst, &repair_route(inst, cur.clone()));
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Best single-request destroy+repair neighbour of `route`.
pub(crate) fn best_one_destroy<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Option<Route<S>> {
    route
        .served()
        .iter()
        .map(|&h| destroy_repair(inst, route, &BTreeSet::from([h])))
        .min_by(|a, b| a.quality_cmp(b))
}

/// Best-improvement LNS over the 1-destroy neighbourhood.
///
/// Every round evaluates removing each served request followed by repair and
/// moves to the best neighbour if it raises revenue. Stops at a 1-attractor
/// or when the budget runs out.
pub fn bi_lns<S: Scalar>(inst: &Instance<S>, route: &Route<S>, budget: Budget) -> Result<Route<S>> {
    require_feasible(inst, route)?;
    let mut clock = budget.start();
    let mut cur = route.clone();
    while !clock.exhausted() {
        clock.tick();
        match best_one_destroy(inst, &cur) {
            Some(next) if revenue_improves(&next, &cur) => cur = next,
            _ => break,
        }
    }
    Ok(cur)
}

/// LNS with uniform random destroy of `k ~ U{1..k_max}` served requests and
/// greedy repair; a candidate replaces the incumbent only if it raises
/// revenue.
pub fn lns_random<S: Scalar>(
    inst: &Instance<S>,
    route: &Route<S>,
    k_max: usize,
    budget: Budget,
    seed: u64,
) -> Result<Route<S>> {
    require_feasible(inst, route)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clock = budget.start();
    let mut cur = route.clone();
    while !clock.exhausted() {
        clock.tick();
        let m = cur.served().len();
        if m == 0 {
            let next = repair_route(inst, cur.clone());
            if next == cur {
                break;
            }
            cur = next;
            continue;
        }
        let k = rng.gen_range(1..=k_max.clamp(1, m));
        let removed: BTreeSet<usize> = cur.served().iter().copied().choose_multiple(&mut rng, k).into_iter().collect();
        let cand = destroy_repair(inst, &cur, &removed);
        if revenue_improves(&cand, &cur) {
            cur = cand;
        }
    }
    Ok(cur)
}
