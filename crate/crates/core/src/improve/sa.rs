use super::budget::Budget;
use super::require_feasible;
use crate::error::{Error, Result};
use crate::model::{validate_route, Instance, Route};
use crate::scalar::Scalar;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaConfig {
    pub t0: f64,
    pub cooling: f64,
    pub t_stop: f64,
    pub iters_per_temp: usize,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            t0: 10.0,
            cooling: 0.95,
            t_stop: 0.01,
            iters_per_temp: 20,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Config("cooling rate must lie in (0, 1)".into()));
        }
        if !(self.t0 > 0.0 && self.t_stop > 0.0) || self.iters_per_temp == 0 {
            return Err(Error::Config(
                "temperatures and iterations per level must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaMove {
    /// Exchange two visited vertices.
    Swap,
    /// Add an unserved request at random positions.
    Insert,
    /// Put an unserved request in place of a served one.
    Replace,
    /// Drop a served request.
    Destroy,
}

impl SaMove {
    pub const ALL: [SaMove; 4] = [SaMove::Swap, SaMove::Insert, SaMove::Replace, SaMove::Destroy];
}

/// Annealing state over feasible routes, stepped one move at a time.
#[derive(Clone, Debug)]
pub struct Annealer<'a, S: Scalar = f64> {
    inst: &'a Instance<S>,
    current: Route<S>,
    best: Route<S>,
    pub temperature: f64,
    rng: ChaCha8Rng,
}

impl<'a, S: Scalar> Annealer<'a, S> {
    pub fn new(inst: &'a Instance<S>, route: &Route<S>, temperature: f64, seed: u64) -> Result<Self> {
        require_feasible(inst, route)?;
        Ok(Self {
            inst,
            current: route.clone(),
            best: route.clone(),
            temperature,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn current(&self) -> &Route<S> {
        &self.current
    }

    pub fn best(&self) -> &Route<S> {
        &self.best
    }

    /// Applies `mv` at random; `None` if it does not apply or the result is
    /// infeasible.
    pub fn propose(&mut self, mv: SaMove) -> Option<Route<S>> {
        let inst = self.inst;
        let seq = self.current.seq();
        let served: Vec<usize> = self.current.served().iter().copied().collect();
        let unserved = (1..=inst.n()).filter(|h| !self.current.served().contains(h));
        let inner = seq.len() - 2;
        let cand = match mv {
            SaMove::Swap => {
                if inner < 2 {
                    return None;
                }
                let picks = (1..=inner).choose_multiple(&mut self.rng, 2);
                let mut s = seq.to_vec();
                s.swap(picks[0], picks[1]);
                s
            }
            SaMove::Insert => {
                let h = unserved.choose(&mut self.rng)?;
                let a = self.rng.gen_range(0..=inner);
                let b = self.rng.gen_range(a..=inner);
                let mut s = seq.to_vec();
                s.insert(b + 1, inst.delivery_of(h));
                s.insert(a + 1, h);
                s
            }
            SaMove::Replace => {
                let g = unserved.choose(&mut self.rng)?;
                let &h = served.choose(&mut self.rng)?;
                let (dh, dg) = (inst.delivery_of(h), inst.delivery_of(g));
                seq.iter()
                    .map(|&v| match v {
                        v if v == h => g,
                        v if v == dh => dg,
                        v => v,
                    })
                    .collect()
            }
            SaMove::Destroy => {
                let &h = served.choose(&mut self.rng)?;
                return Some(self.current.without(inst, &BTreeSet::from([h])))
                    .filter(|r| r.is_feasible(inst));
            }
        };
        validate_route(inst, &cand)
            .ok()
            .filter(|e| e.feasible)
            .map(|_| Route::build(inst, cand))
    }

    /// Metropolis test on `f = -revenue`.
    pub fn accepts(&mut self, cand: &Route<S>) -> bool {
        let delta = (self.current.revenue() - cand.revenue()).as_f64();
        delta <= 0.0 || self.rng.gen::<f64>() < (-delta / self.temperature).exp()
    }

    /// One move with a uniformly drawn operator; returns whether it was
    /// accepted.
    pub fn step(&mut self) -> bool {
        let mv = *SaMove::ALL.choose(&mut self.rng).expect("non-empty");
        let Some(cand) = self.propose(mv) else {
            return false;
        };
        if !self.accepts(&cand) {
            return false;
        }
        if cand.is_better_than(&self.best) {
            self.best = cand.clone();
        }
        self.current = cand;
        true
    }
}

/// Simulated annealing with SWAP / INSERT / REPLACE / DESTROY moves and a
/// geometric cooling schedule. Returns the best route seen.
pub fn simulated_annealing<S: Scalar>(
    inst: &Instance<S>,
    route: &Route<S>,
    cfg: &SaConfig,
    budget: Budget,
    seed: u64,
) -> Result<Route<S>> {
    cfg.validate()?;
    let mut sa = Annealer::new(inst, route, cfg.t0, seed)?;
    let mut clock = budget.start();
    'cooling: while sa.temperature > cfg.t_stop {
        for _ in 0..cfg.iters_per_temp {
            if clock.exhausted() {
                break 'cooling;
            }
            clock.tick();
            sa.step();
        }
        sa.temperature *= cfg.cooling;
    }
    Ok(sa.best.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{gen_instance, GenSpec};
    use crate::model::RevenueSetting;
    use crate::search::greedy_search;

    fn random(n: usize, index: usize) -> Instance<f64> {
        gen_instance(&GenSpec::new(n, RevenueSetting::Uniform, 41, 1).unwrap(), index)
    }

    #[test]
    fn equal_revenue_always_accepted() {
        let inst = random(5, 0);
        let gs = greedy_search(&inst, None);
        let mut sa = Annealer::new(&inst, &gs, 1e-12, 0).unwrap();
        for _ in 0..100 {
            assert!(sa.accepts(&gs));
        }
    }

    #[test]
    fn cold_limit_rejects_worse() {
        let inst = random(5, 0);
        let gs = greedy_search(&inst, None);
        assert!(!gs.served().is_empty());
        let worse = gs.without(&inst, &gs.served().iter().take(1).copied().collect());
        let mut sa = Annealer::new(&inst, &gs, 1e-12, 0).unwrap();
        for _ in 0..100 {
            assert!(!sa.accepts(&worse));
        }
    }

    #[test]
    fn accepted_states_stay_feasible() {
        for index in 0..10 {
            let inst = random(6, index);
            let mut sa = Annealer::new(&inst, &Route::empty(&inst), 10.0, index as u64).unwrap();
            for _ in 0..500 {
                sa.step();
                assert!(sa.current().is_feasible(&inst));
            }
        }
    }

    #[test]
    fn run_is_seeded_and_never_worse() {
        let inst = random(7, 2);
        let gs = greedy_search(&inst, None);
        let cfg = SaConfig::default();
        let a = simulated_annealing(&inst, &gs, &cfg, Budget::unlimited(), 5).unwrap();
        let b = simulated_annealing(&inst, &gs, &cfg, Budget::unlimited(), 5).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_better_than(&a) && !gs.is_better_than(&a));
        assert!(SaConfig { cooling: 1.0, ..cfg }.validate().is_err());
    }
}
