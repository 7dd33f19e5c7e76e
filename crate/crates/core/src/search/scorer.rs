use super::state::DecodeState;
use super::trajectory::ExternalRecord;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::scalar::Scalar;

/// Pre-mask action scores for the next decode step, one per vertex.
///
/// Scores of masked vertices are ignored. Implementations are shared
/// read-only across threads.
pub trait Scorer<S: Scalar>: Send + Sync {
    fn score(&self, inst: &Instance<S>, state: &DecodeState<S>) -> Vec<S>;

    /// Fixed routes to replay instead of decoding.
    fn trajectories(&self) -> Option<&[Vec<usize>]> {
        None
    }
}

/// Immediate revenue minus travel: `r_j - c(cur, j)`.
///
/// Pickups and deliveries both carry their request's revenue; the depots
/// carry none.
#[derive(Clone, Copy, Debug, Default)]
pub struct FitnessScorer;

impl<S: Scalar> Scorer<S> for FitnessScorer {
    fn score(&self, inst: &Instance<S>, state: &DecodeState<S>) -> Vec<S> {
        let cur = state.current();
        (0..inst.num_vertices())
            .map(|j| {
                let r = inst.request_of(j).map_or(S::zero(), |h| inst.revenue_of(h));
                r - inst.dist(cur, j)
            })
            .collect()
    }
}

/// Scores or routes produced outside this crate, typically by a learned
/// policy.
#[derive(Clone, Debug, PartialEq)]
pub enum ExternalScorer<S = f64> {
    /// `logits[i][j]`: preference for moving from vertex `i` to `j`.
    Heatmap(Vec<Vec<S>>),
    /// Complete routes, replayed and validated rather than decoded.
    Trajectories(Vec<Vec<usize>>),
}

impl<S: Scalar> ExternalScorer<S> {
    pub fn from_record(inst: &Instance<S>, record: ExternalRecord<S>) -> Result<Self> {
        match record {
            ExternalRecord::Trajectories(t) => Ok(Self::Trajectories(t.routes)),
            ExternalRecord::Logits(l) => {
                let nv = inst.num_vertices();
                if l.logits.len() != nv || l.logits.iter().any(|row| row.len() != nv) {
                    return Err(Error::Config(format!(
                        "logit matrix for `{}` must be {nv}x{nv}",
                        l.instance_id
                    )));
                }
                Ok(Self::Heatmap(l.logits))
            }
        }
    }
}

impl<S: Scalar> Scorer<S> for ExternalScorer<S> {
    fn score(&self, inst: &Instance<S>, state: &DecodeState<S>) -> Vec<S> {
        match self {
            ExternalScorer::Heatmap(m) => m[state.current()].clone(),
            ExternalScorer::Trajectories(_) => vec![S::zero(); inst.num_vertices()],
        }
    }

    fn trajectories(&self) -> Option<&[Vec<usize>]> {
        match self {
            ExternalScorer::Trajectories(t) => Some(t),
            ExternalScorer::Heatmap(_) => None,
        }
    }
}
