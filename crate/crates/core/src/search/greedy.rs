use super::decode::{best_route, greedy_rollout, ranked_first_pickups};
use super::scorer::FitnessScorer;
use super::state::{compute_mask, DecodeState, MaskMode};
use crate::model::{Instance, Route};
use crate::scalar::Scalar;

/// Greedy construction on `r_j - c(i, j)` under the inference mask.
///
/// With `start_pickup` the first move is forced to that pickup when it is
/// admissible; otherwise it is ignored.
pub fn greedy_search<S: Scalar>(inst: &Instance<S>, start_pickup: Option<usize>) -> Route<S> {
    let mode = MaskMode::Inference2Opt;
    let mut state = DecodeState::new(inst);
    if let Some(p) = start_pickup {
        let mask = compute_mask(&state, inst, mode);
        if inst.is_pickup(p) && mask.is_allowed(p) {
            state.advance(inst, p, &mask);
        }
    }
    greedy_rollout(inst, &FitnessScorer, mode, state)
}

/// Routes of a multi-start greedy run.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiStart<S = f64> {
    /// One route per start, in first-pickup rank order.
    pub routes: Vec<Route<S>>,
    pub best: Route<S>,
}

/// Default number of starts: half the requests, at least one.
pub fn default_starts(n: usize) -> usize {
    (n / 2).max(1)
}

/// Greedy runs from the `m` best-ranked admissible first pickups.
///
/// `m` is clamped to `n`. When no pickup is admissible the single greedy
/// route is returned.
pub fn multi_start_greedy<S: Scalar>(inst: &Instance<S>, m: usize) -> MultiStart<S> {
    let mode = MaskMode::Inference2Opt;
    let (state, mask, pickups) = ranked_first_pickups(inst, &FitnessScorer, mode);
    let mut routes: Vec<Route<S>> = pickups
        .into_iter()
        .take(m.clamp(1, inst.n().max(1)))
        .map(|p| {
            let mut s = state.clone();
            s.advance(inst, p, &mask);
            greedy_rollout(inst, &FitnessScorer, mode, s)
        })
        .collect();
    if routes.is_empty() {
        routes.push(greedy_search(inst, None));
    }
    let best = best_route(&routes).cloned().expect("at least one route");
    MultiStart { routes, best }
}
