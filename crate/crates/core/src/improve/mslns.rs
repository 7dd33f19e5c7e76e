use super::budget::Budget;
use super::local::destroy_repair;
use super::require_feasible;
use super::two_opt::two_opt_route;
use crate::error::{Error, Result};
use crate::model::{dedup_by_served, Instance, Route};
use crate::scalar::{softmax, Scalar};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

/// How destroyed requests are drawn from the pool's request counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Removal {
    /// `softmax(alpha * count)`.
    #[default]
    Softmax,
    Uniform,
}

/// Destroy size per iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `min(i + 1, k_max)` at iteration `i` (1-based).
    #[default]
    Increasing,
    /// Always `k_max`.
    FixedK,
}

impl FromStr for Removal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softmax" => Ok(Removal::Softmax),
            "uniform" => Ok(Removal::Uniform),
            o => Err(Error::Config(format!("unknown removal rule `{o}`"))),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increasing" => Ok(Schedule::Increasing),
            "fixed_k" | "fixed" => Ok(Schedule::FixedK),
            o => Err(Error::Config(format!("unknown destroy schedule `{o}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MslnsConfig {
    /// Seeds used when the pool is built by multi-start greedy.
    pub starts: usize,
    /// Pool width `beta`.
    pub beta: usize,
    pub alpha: f64,
    pub k_max: usize,
    pub budget: Budget,
    pub removal: Removal,
    pub schedule: Schedule,
    /// With `false` only the first seed is kept.
    pub multistart: bool,
}

impl Default for MslnsConfig {
    fn default() -> Self {
        Self {
            starts: 5,
            beta: 3,
            alpha: 1.0,
            k_max: 4,
            budget: Budget::seconds(0.5),
            removal: Removal::Softmax,
            schedule: Schedule::Increasing,
            multistart: true,
        }
    }
}

/// Served requests across `routes` not yet in `memory`, with the number of
/// routes serving each.
pub fn count_unique<'a, S: Scalar + 'a>(
    routes: impl IntoIterator<Item = &'a Route<S>>,
    memory: &BTreeSet<usize>,
) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for r in routes {
        for &h in r.served().iter().filter(|h| !memory.contains(h)) {
            *counts.entry(h).or_insert(0) += 1;
        }
    }
    counts
}

/// Draws `k` distinct indices; each draw follows `softmax(scale * logits)`
/// restricted to the indices not yet drawn.
pub fn sample_without_replacement<R: rand::Rng>(
    logits: &[f64],
    scale: f64,
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut left: Vec<usize> = (0..logits.len()).collect();
    let mut out = Vec::with_capacity(k.min(left.len()));
    while out.len() < k && !left.is_empty() {
        let sub: Vec<f64> = left.iter().map(|&i| logits[i]).collect();
        let p = softmax(&sub, scale);
        let pos = WeightedIndex::new(&p).map_or(0, |d| d.sample(rng));
        out.push(left.remove(pos));
    }
    out
}

/// Record of one completed iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct MslnsStep<S = f64> {
    pub iteration: usize,
    pub removed: Vec<usize>,
    pub pool_size: usize,
    pub best_revenue: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MslnsOutcome<S = f64> {
    pub best: Route<S>,
    pub pool: Vec<Route<S>>,
    pub history: Vec<MslnsStep<S>>,
}

/// Iterative state of a multi-start LNS run.
#[derive(Clone, Debug)]
pub struct MslnsRun<'a, S: Scalar = f64> {
    inst: &'a Instance<S>,
    cfg: MslnsConfig,
    pool: Vec<Route<S>>,
    memory: BTreeSet<usize>,
    iteration: usize,
    best: Route<S>,
    history: Vec<MslnsStep<S>>,
    rng: ChaCha8Rng,
}

impl<'a, S: Scalar> MslnsRun<'a, S> {
    pub fn new(inst: &'a Instance<S>, seeds: &[Route<S>], cfg: &MslnsConfig, seed: u64) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::Config("multi-start LNS needs at least one seed route".into()));
        }
        if cfg.beta == 0 || cfg.k_max == 0 {
            return Err(Error::Config("pool width and destroy size must be positive".into()));
        }
        if !cfg.alpha.is_finite() {
            return Err(Error::Config("softmax temperature must be finite".into()));
        }
        for s in seeds {
            require_feasible(inst, s)?;
        }
        let kept = if cfg.multistart { seeds } else { &seeds[..1] };
        let pool = dedup_by_served(kept.iter().cloned());
        let best = pool[0].clone();
        Ok(Self {
            inst,
            cfg: *cfg,
            pool,
            memory: BTreeSet::new(),
            iteration: 1,
            best,
            history: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn pool(&self) -> &[Route<S>] {
        &self.pool
    }

    pub fn memory(&self) -> &BTreeSet<usize> {
        &self.memory
    }

    pub fn best(&self) -> &Route<S> {
        &self.best
    }

    fn destroy_size(&self) -> usize {
        match self.cfg.schedule {
            Schedule::Increasing => (self.iteration + 1).min(self.cfg.k_max),
            Schedule::FixedK => self.cfg.k_max,
        }
    }

    /// Requests to destroy this iteration; empty once every served request
    /// has been destroyed before.
    pub fn select_removals(&mut self) -> Vec<usize> {
        let counts = count_unique(&self.pool, &self.memory);
        let (ids, c): (Vec<usize>, Vec<f64>) = counts.into_iter().map(|(h, c)| (h, c as f64)).unzip();
        if ids.is_empty() {
            return Vec::new();
        }
        let scale = match self.cfg.removal {
            Removal::Softmax => self.cfg.alpha,
            Removal::Uniform => 0.0,
        };
        let mut picked: Vec<usize> = sample_without_replacement(&c, scale, self.destroy_size(), &mut self.rng)
            .into_iter()
            .map(|i| ids[i])
            .collect();
        picked.sort_unstable();
        picked
    }

    /// Runs one destroy / repair / 2-Opt / top-beta iteration. Returns `None`
    /// when nothing is left to destroy.
    pub fn step(&mut self) -> Option<&MslnsStep<S>> {
        let removed = self.select_removals();
        if removed.is_empty() {
            return None;
        }
        let set: BTreeSet<usize> = removed.iter().copied().collect();
        self.memory.extend(&set);
        let inst = self.inst;
        let fresh: Vec<Route<S>> = self
            .pool
            .par_iter()
            .map(|r| destroy_repair(inst, r, &set))
            .collect();
        let fresh: Vec<Route<S>> = dedup_by_served(fresh)
            .par_iter()
            .map(|r| two_opt_route(inst, r))
            .collect();
        let mut merged = dedup_by_served(self.pool.drain(..).chain(fresh));
        merged.truncate(self.cfg.beta);
        self.pool = merged;
        if self.pool[0].is_better_than(&self.best) {
            self.best = self.pool[0].clone();
            log::debug!(
                "mslns iteration {}: best revenue {}",
                self.iteration,
                self.best.revenue()
            );
        }
        self.history.push(MslnsStep {
            iteration: self.iteration,
            removed,
            pool_size: self.pool.len(),
            best_revenue: self.best.revenue(),
        });
        self.iteration += 1;
        self.history.last()
    }

    pub fn finish(self) -> MslnsOutcome<S> {
        MslnsOutcome {
            best: self.best,
            pool: self.pool,
            history: self.history,
        }
    }
}

/// Multi-start LNS over a pool of seed routes.
///
/// Each iteration draws not-yet-destroyed requests by how many pool routes
/// serve them, removes them from every pool route, repairs and 2-Opts the
/// results, and keeps the best `beta` distinct served sets. A request is
/// destroyed at most once, so the run ends when every served request has
/// been drawn or the budget is spent. An iteration in flight always
/// completes.
pub fn mslns<S: Scalar>(
    inst: &Instance<S>,
    seeds: &[Route<S>],
    cfg: &MslnsConfig,
    seed: u64,
) -> Result<MslnsOutcome<S>> {
    let mut run = MslnsRun::new(inst, seeds, cfg, seed)?;
    let mut clock = cfg.budget.start();
    while !clock.exhausted() {
        clock.tick();
        if run.step().is_none() {
            break;
        }
    }
    Ok(run.finish())
}
