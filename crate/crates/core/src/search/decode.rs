use super::scorer::Scorer;
use super::state::{compute_mask, DecodeState, MaskMode, MaskVector};
use crate::error::{Error, Result};
use crate::model::{validate_route, Instance, Route};
use crate::scalar::Scalar;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMode {
    #[default]
    Greedy,
    Sample,
    Beam,
    Multistart,
}

impl FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(DecodeMode::Greedy),
            "sample" => Ok(DecodeMode::Sample),
            "beam" => Ok(DecodeMode::Beam),
            "multistart" | "ms" => Ok(DecodeMode::Multistart),
            other => Err(Error::Config(format!("unknown decode mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeConfig<S = f64> {
    pub mode: DecodeMode,
    /// Number of distinct first pickups in multi-start mode.
    pub starts: usize,
    pub beam_width: usize,
    pub samples: usize,
    pub mask_mode: MaskMode,
    /// Weight of the route-length overage in shaped objectives.
    pub rho: S,
    /// Logit clipping scale `C` in `softmax(C * tanh(score))`.
    pub softmax_scale: S,
}

impl<S: Scalar> Default for DecodeConfig<S> {
    fn default() -> Self {
        Self {
            mode: DecodeMode::Greedy,
            starts: 1,
            beam_width: 1,
            samples: 1,
            mask_mode: MaskMode::Inference2Opt,
            rho: S::lit(10.0),
            softmax_scale: S::lit(10.0),
        }
    }
}

/// `softmax(C * tanh(score))` over admissible vertices; masked vertices get
/// exactly zero.
pub fn action_probabilities<S: Scalar>(scores: &[S], mask: &MaskVector, scale: S) -> Vec<S> {
    let logits: Vec<S> = mask
        .allowed_vertices()
        .map(|v| scale * scores[v].tanh())
        .collect();
    let probs = crate::scalar::softmax(&logits, S::one());
    let mut out = vec![S::zero(); scores.len()];
    for (v, p) in mask.allowed_vertices().zip(probs) {
        out[v] = p;
    }
    out
}

/// Admissible vertex with the highest score; ties go to the lower index.
pub(crate) fn argmax_allowed<S: Scalar>(scores: &[S], mask: &MaskVector) -> Option<usize> {
    mask.allowed_vertices().fold(None, |best, v| match best {
        Some(b) if scores[b] >= scores[v] => Some(b),
        _ => Some(v),
    })
}

/// Action when nothing is admissible: close the route if nothing is owed,
/// otherwise serve the lowest pending delivery. Only reachable under the
/// lower-bound mask once the budget is overrun.
fn fallback_action<S: Scalar>(inst: &Instance<S>, state: &DecodeState<S>) -> usize {
    state
        .pending_deliveries()
        .iter()
        .next()
        .copied()
        .unwrap_or(inst.end())
}

/// Runs one rollout from `state`, choosing actions with `pick`.
pub(crate) fn rollout<S, F>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    mode: MaskMode,
    mut state: DecodeState<S>,
    mut pick: F,
) -> Route<S>
where
    S: Scalar,
    F: FnMut(&[S], &MaskVector) -> usize,
{
    while !state.is_done() {
        let mask = compute_mask(&state, inst, mode);
        let v = match mask.count() {
            0 => fallback_action(inst, &state),
            1 => mask.allowed_vertices().next().unwrap(),
            _ => {
                let scores = scorer.score(inst, &state);
                pick(&scores, &mask)
            }
        };
        state.advance(inst, v, &mask);
    }
    state.into_route(inst)
}

pub(crate) fn greedy_rollout<S: Scalar>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    mode: MaskMode,
    state: DecodeState<S>,
) -> Route<S> {
    rollout(inst, scorer, mode, state, |scores, mask| {
        argmax_allowed(scores, mask).expect("mask has admissible vertices")
    })
}

/// Best route of a non-empty slice under the total quality order.
pub fn best_route<S: Scalar>(routes: &[Route<S>]) -> Option<&Route<S>> {
    routes.iter().min_by(|a, b| a.quality_cmp(b))
}

/// Admissible first pickups ranked by initial score (best first).
pub(crate) fn ranked_first_pickups<S: Scalar>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    mode: MaskMode,
) -> (DecodeState<S>, MaskVector, Vec<usize>) {
    let state = DecodeState::new(inst);
    let mask = compute_mask(&state, inst, mode);
    let scores = scorer.score(inst, &state);
    let mut pickups: Vec<usize> = mask.allowed_vertices().filter(|&v| inst.is_pickup(v)).collect();
    pickups.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    (state, mask, pickups)
}

fn replay<S: Scalar>(
    inst: &Instance<S>,
    routes: &[Vec<usize>],
    mode: MaskMode,
) -> Result<Vec<Route<S>>> {
    routes
        .iter()
        .map(|seq| {
            let route = Route::new(inst, seq.clone())?;
            if mode == MaskMode::Inference2Opt {
                let eval = validate_route(inst, seq)?;
                if let Some(v) = eval.violation {
                    return Err(Error::Infeasible(v));
                }
            }
            Ok(route)
        })
        .collect()
}

/// Builds routes with the given scorer.
///
/// * greedy: one rollout taking the best admissible score each step;
/// * sample: `samples` rollouts drawn from `softmax(C * tanh(score))`;
/// * beam: width-`beam_width` search on cumulative log-probability, keeping
///   at most one partial per selected-request set at each depth; finished
///   routes are returned best first;
/// * multistart: greedy rollouts from the `starts` best-scored admissible
///   first pickups, in rank order.
///
/// Under [`MaskMode::Inference2Opt`] every returned route is feasible.
/// Scorers that carry fixed trajectories are replayed and validated instead.
pub fn decode<S: Scalar>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    cfg: &DecodeConfig<S>,
    seed: u64,
) -> Result<Vec<Route<S>>> {
    if let Some(routes) = scorer.trajectories() {
        return replay(inst, routes, cfg.mask_mode);
    }
    let mode = cfg.mask_mode;
    if mode == MaskMode::Inference2Opt && DecodeState::new(inst).witness().is_none() {
        return Err(Error::NoFeasibleRoute);
    }
    match cfg.mode {
        DecodeMode::Greedy => Ok(vec![greedy_rollout(inst, scorer, mode, DecodeState::new(inst))]),
        DecodeMode::Multistart => {
            let (state, mask, pickups) = ranked_first_pickups(inst, scorer, mode);
            if pickups.is_empty() {
                return Ok(vec![greedy_rollout(inst, scorer, mode, state)]);
            }
            Ok(pickups
                .into_iter()
                .take(cfg.starts.max(1))
                .map(|p| {
                    let mut s = state.clone();
                    s.advance(inst, p, &mask);
                    greedy_rollout(inst, scorer, mode, s)
                })
                .collect())
        }
        DecodeMode::Sample => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scale = cfg.softmax_scale;
            Ok((0..cfg.samples.max(1))
                .map(|_| {
                    rollout(inst, scorer, mode, DecodeState::new(inst), |scores, mask| {
                        let p: Vec<f64> = action_probabilities(scores, mask, scale)
                            .into_iter()
                            .map(Scalar::as_f64)
                            .collect();
                        WeightedIndex::new(&p)
                            .map(|w| w.sample(&mut rng))
                            .unwrap_or_else(|_| argmax_allowed(scores, mask).unwrap())
                    })
                })
                .collect())
        }
        DecodeMode::Beam => Ok(beam_search(inst, scorer, cfg, None)),
    }
}

/// Beam decoding that also returns the partial sequences kept at each depth.
pub fn beam_trace<S: Scalar>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    cfg: &DecodeConfig<S>,
) -> (Vec<Route<S>>, Vec<Vec<Vec<usize>>>) {
    let mut trace = Vec::new();
    let routes = beam_search(inst, scorer, cfg, Some(&mut trace));
    (routes, trace)
}

fn beam_search<S: Scalar>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    cfg: &DecodeConfig<S>,
    mut trace: Option<&mut Vec<Vec<Vec<usize>>>>,
) -> Vec<Route<S>> {
    let width = cfg.beam_width.max(1);
    let mut beams = vec![(DecodeState::new(inst), S::zero())];
    let mut finished: Vec<Route<S>> = Vec::new();

    while !beams.is_empty() {
        let mut children = Vec::new();
        for (state, logp) in &beams {
            let mask = compute_mask(state, inst, cfg.mask_mode);
            let actions: Vec<(usize, S)> = if mask.count() == 0 {
                vec![(fallback_action(inst, state), S::zero())]
            } else {
                let scores = scorer.score(inst, state);
                let probs = action_probabilities(&scores, &mask, cfg.softmax_scale);
                mask.allowed_vertices().map(|v| (v, probs[v].ln())).collect()
            };
            for (v, lp) in actions {
                let mut child = state.clone();
                child.advance(inst, v, &mask);
                children.push((child, *logp + lp));
            }
        }
        children.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.0.partial_seq().cmp(b.0.partial_seq()))
        });

        let mut seen: BTreeSet<(bool, BTreeSet<usize>)> = BTreeSet::new();
        let mut next = Vec::new();
        let mut kept = Vec::new();
        for (child, logp) in children {
            if next.len() + kept.len() >= width {
                break;
            }
            if !seen.insert((child.is_done(), child.picked(inst))) {
                continue;
            }
            if child.is_done() {
                kept.push(child.partial_seq().to_vec());
                finished.push(child.into_route(inst));
            } else {
                next.push((child, logp));
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            kept.extend(next.iter().map(|(s, _)| s.partial_seq().to_vec()));
            t.push(kept);
        }
        beams = next;
    }
    finished.sort_by(|a, b| a.quality_cmp(b));
    finished
}
