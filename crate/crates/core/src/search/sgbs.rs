use super::decode::greedy_rollout;
use super::scorer::Scorer;
use super::state::{compute_mask, DecodeState, MaskMode};
use crate::model::{Instance, Route};
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SgbsConfig {
    /// Beam width `beta`.
    pub beam_width: usize,
    /// Children expanded per node `gamma`.
    pub expansion: usize,
    pub mask_mode: MaskMode,
}

impl Default for SgbsConfig {
    fn default() -> Self {
        Self {
            beam_width: 5,
            expansion: 5,
            mask_mode: MaskMode::Inference2Opt,
        }
    }
}

/// Simulation-guided beam search.
///
/// Each node expands its `gamma` best-scored admissible children; each child
/// is valued by a greedy rollout under `rollout`. Children sharing a selected
/// request set are collapsed onto the best rollout before the beam is cut to
/// `beta`. Returns the best completed rollout seen.
pub fn sgbs<S: Scalar>(
    inst: &Instance<S>,
    scorer: &dyn Scorer<S>,
    rollout: &dyn Scorer<S>,
    cfg: &SgbsConfig,
) -> Route<S> {
    let mode = cfg.mask_mode;
    let beta = cfg.beam_width.max(1);
    let gamma = cfg.expansion.max(1);
    let root = DecodeState::new(inst);
    let mut best = greedy_rollout(inst, rollout, mode, root.clone());
    let mut beam = vec![root];

    while !beam.is_empty() {
        let mut children: Vec<(DecodeState<S>, Route<S>)> = Vec::new();
        for node in &beam {
            let mask = compute_mask(node, inst, mode);
            let mut actions: Vec<usize> = mask.allowed_vertices().collect();
            if actions.is_empty() {
                let fallback = node.pending_deliveries().iter().next().copied();
                actions.push(fallback.unwrap_or(inst.end()));
            }
            let scores = scorer.score(inst, node);
            actions.sort_by(|&a, &b| {
                scores[b]
                    .partial_cmp(&scores[a])
                    .unwrap_or(Ordering::Equal)
                    .then(a.cmp(&b))
            });
            for v in actions.into_iter().take(gamma) {
                let mut child = node.clone();
                child.advance(inst, v, &mask);
                let sim = if child.is_done() {
                    child.clone().into_route(inst)
                } else {
                    greedy_rollout(inst, rollout, mode, child.clone())
                };
                children.push((child, sim));
            }
        }
        children.sort_by(|a, b| {
            a.1.quality_cmp(&b.1)
                .then_with(|| a.0.partial_seq().cmp(b.0.partial_seq()))
        });
        if let Some((_, top)) = children.first() {
            if top.is_better_than(&best) {
                best = top.clone();
            }
        }
        let mut seen: BTreeSet<(bool, BTreeSet<usize>)> = BTreeSet::new();
        beam = children
            .into_iter()
            .filter(|(child, _)| seen.insert((child.is_done(), child.picked(inst))))
            .filter(|(child, _)| !child.is_done())
            .take(beta)
            .map(|(child, _)| child)
            .collect();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{gen_instance, GenSpec};
    use crate::model::RevenueSetting;
    use crate::search::{decode, DecodeConfig, FitnessScorer};

    #[test]
    fn unit_width_is_greedy() {
        for index in 0..30 {
            let inst: Instance<f64> =
                gen_instance(&GenSpec::new(6, RevenueSetting::Distance, 3, 1).unwrap(), index);
            let cfg = SgbsConfig {
                beam_width: 1,
                expansion: 1,
                ..SgbsConfig::default()
            };
            let s = sgbs(&inst, &FitnessScorer, &FitnessScorer, &cfg);
            let g = decode(&inst, &FitnessScorer, &DecodeConfig::default(), 0).unwrap();
            assert_eq!(s, g[0]);
        }
    }

    #[test]
    fn wide_search_never_worse_than_greedy() {
        for index in 0..50 {
            let inst: Instance<f64> =
                gen_instance(&GenSpec::new(6, RevenueSetting::Distance, 4, 1).unwrap(), index);
            let s = sgbs(&inst, &FitnessScorer, &FitnessScorer, &SgbsConfig::default());
            let g = &decode(&inst, &FitnessScorer, &DecodeConfig::default(), 0).unwrap()[0];
            assert!(s.is_feasible(&inst));
            assert!(s.revenue() >= g.revenue());
        }
    }
}
