use super::path::two_opt_path;
use crate::error::{Error, Result};
use crate::model::{Instance, Route};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// How the route-length part of the pickup mask is screened.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    /// O(1) lower bound through the pickup, its delivery and the end depot.
    /// Infeasible pickups may slip through; shaped objectives handle them.
    TrainLb,
    /// 2-Opt completion over all outstanding deliveries. Every admissible
    /// action comes with a certified feasible completion.
    #[default]
    #[serde(rename = "inference_2opt")]
    Inference2Opt,
}

impl fmt::Display for MaskMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaskMode::TrainLb => "train_lb",
            MaskMode::Inference2Opt => "inference_2opt",
        })
    }
}

impl FromStr for MaskMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train_lb" | "train" | "lb" => Ok(MaskMode::TrainLb),
            "inference_2opt" | "inference" | "2opt" => Ok(MaskMode::Inference2Opt),
            other => Err(Error::Config(format!("unknown mask mode `{other}`"))),
        }
    }
}

/// Partial route under construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeState<S = f64> {
    seq: Vec<usize>,
    visited: Vec<bool>,
    load: u32,
    capacity: u32,
    remaining_length: S,
    /// Deliveries owed for requests already picked up.
    pending: BTreeSet<usize>,
    /// Certified completion from the current vertex (excluded) to the end
    /// depot. Only maintained under [`MaskMode::Inference2Opt`].
    witness: Option<Vec<usize>>,
    done: bool,
}

impl<S: Scalar> DecodeState<S> {
    pub fn new(inst: &Instance<S>) -> Self {
        let mut visited = vec![false; inst.num_vertices()];
        visited[inst.start()] = true;
        let direct = inst.dist(inst.start(), inst.end());
        let witness =
            (direct <= inst.max_length() + S::length_tolerance()).then(|| vec![inst.end()]);
        Self {
            seq: vec![inst.start()],
            visited,
            load: 0,
            capacity: inst.capacity(),
            remaining_length: inst.max_length(),
            pending: BTreeSet::new(),
            witness,
            done: false,
        }
    }

    pub fn partial_seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn current(&self) -> usize {
        *self.seq.last().expect("decode state is never empty")
    }

    pub fn is_visited(&self, v: usize) -> bool {
        self.visited[v]
    }

    pub fn load(&self) -> u32 {
        self.load
    }

    /// Remaining capacity as a fraction of `Q`.
    pub fn remaining_capacity_frac(&self) -> S {
        S::lit(f64::from(self.capacity - self.load) / f64::from(self.capacity))
    }

    /// Route-length budget left; negative once the limit is overrun.
    pub fn remaining_length(&self) -> S {
        self.remaining_length
    }

    pub fn pending_deliveries(&self) -> &BTreeSet<usize> {
        &self.pending
    }

    pub fn witness(&self) -> Option<&[usize]> {
        self.witness.as_deref()
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Requests whose pickup has been visited.
    pub fn picked(&self, inst: &Instance<S>) -> BTreeSet<usize> {
        self.seq.iter().copied().filter(|&v| inst.is_pickup(v)).collect()
    }

    /// Appends `v`, taking its completion witness from `mask`.
    pub fn advance(&mut self, inst: &Instance<S>, v: usize, mask: &MaskVector) {
        debug_assert!(!self.done && !self.visited[v]);
        self.remaining_length -= inst.dist(self.current(), v);
        self.seq.push(v);
        self.visited[v] = true;
        if inst.is_pickup(v) {
            self.load += inst.demand_of(v);
            self.pending.insert(inst.delivery_of(v));
        } else if inst.is_delivery(v) {
            self.load -= inst.demand_of(v - inst.n());
            self.pending.remove(&v);
        } else if v == inst.end() {
            self.done = true;
        }
        self.witness = mask.witness.get(v).cloned().flatten();
    }

    pub fn into_route(self, inst: &Instance<S>) -> Route<S> {
        debug_assert!(self.done);
        Route::build(inst, self.seq)
    }
}

/// Per-vertex admissibility for the next step.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskVector {
    pub allowed: Vec<bool>,
    /// Completion path after each admissible vertex (inference mode only).
    pub witness: Vec<Option<Vec<usize>>>,
}

impl MaskVector {
    pub fn is_allowed(&self, v: usize) -> bool {
        self.allowed[v]
    }

    pub fn allowed_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.allowed
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
    }

    pub fn count(&self) -> usize {
        self.allowed.iter().filter(|&&a| a).count()
    }
}

pub fn compute_mask<S: Scalar>(
    state: &DecodeState<S>,
    inst: &Instance<S>,
    mode: MaskMode,
) -> MaskVector {
    let nv = inst.num_vertices();
    let mut mask = MaskVector {
        allowed: vec![false; nv],
        witness: vec![None; nv],
    };
    if state.done {
        return mask;
    }
    let cur = state.current();
    let end = inst.end();
    let budget = state.remaining_length + S::length_tolerance();
    let free = state.capacity - state.load;

    for j in 1..=inst.n() {
        if state.visited[j] || inst.demand_of(j) > free {
            continue;
        }
        let d = inst.delivery_of(j);
        match mode {
            MaskMode::TrainLb => {
                let lb = inst.dist(cur, j) + inst.dist(j, d) + inst.dist(d, end);
                mask.allowed[j] = lb <= budget;
            }
            MaskMode::Inference2Opt => {
                let mids: Vec<usize> = state.pending.iter().copied().chain([d]).collect();
                let (path, len) = two_opt_path(inst, j, end, &mids);
                if inst.dist(cur, j) + len <= budget {
                    mask.allowed[j] = true;
                    mask.witness[j] = Some(path[1..].to_vec());
                }
            }
        }
    }

    for &d in &state.pending {
        match mode {
            MaskMode::TrainLb => mask.allowed[d] = true,
            MaskMode::Inference2Opt => {
                if let Some(rest) = state.witness.as_ref().filter(|w| w.first() == Some(&d)) {
                    mask.allowed[d] = true;
                    mask.witness[d] = Some(rest[1..].to_vec());
                    continue;
                }
                let mids: Vec<usize> = state.pending.iter().copied().filter(|&x| x != d).collect();
                let (path, len) = two_opt_path(inst, d, end, &mids);
                if inst.dist(cur, d) + len <= budget {
                    mask.allowed[d] = true;
                    mask.witness[d] = Some(path[1..].to_vec());
                }
            }
        }
    }

    if state.pending.is_empty() {
        mask.allowed[end] = match mode {
            MaskMode::TrainLb => true,
            MaskMode::Inference2Opt => inst.dist(cur, end) <= budget,
        };
        if mask.allowed[end] {
            mask.witness[end] = Some(Vec::new());
        }
    }
    mask
}
