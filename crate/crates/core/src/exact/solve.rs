use crate::error::{Error, Result};
use crate::model::{Instance, Route};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_N: usize = 6;

/// Revenue-maximal feasible route by depth-first branch and bound.
///
/// Ties are broken by shorter length, then by lexicographically smaller
/// sequence, so the result is unique.
pub fn exhaustive_solve<S: Scalar>(inst: &Instance<S>, max_n: usize) -> Result<Route<S>> {
    if inst.n() > max_n {
        return Err(Error::TooLarge {
            n: inst.n(),
            max: max_n,
        });
    }
    let tol = S::length_tolerance();
    if inst.dist(inst.start(), inst.end()) > inst.max_length() + tol {
        return Err(Error::NoFeasibleRoute);
    }
    let mut search = BranchAndBound {
        inst,
        best: Route::empty(inst),
        seq: vec![inst.start()],
        visited: vec![false; inst.num_vertices()],
        pending: Vec::new(),
        load: 0,
        length: S::zero(),
        picked_revenue: S::zero(),
    };
    search.visited[inst.start()] = true;
    search.dfs();
    Ok(search.best)
}

struct BranchAndBound<'a, S> {
    inst: &'a Instance<S>,
    best: Route<S>,
    seq: Vec<usize>,
    visited: Vec<bool>,
    /// Deliveries owed for requests already picked up.
    pending: Vec<usize>,
    load: u32,
    length: S,
    picked_revenue: S,
}

impl<S: Scalar> BranchAndBound<'_, S> {
    fn current(&self) -> usize {
        *self.seq.last().unwrap()
    }

    /// Shortest conceivable remaining distance to the end depot from `from`
    /// with every pending delivery still to visit.
    fn completion_bound(&self, from: usize) -> S {
        let end = self.inst.end();
        self.pending
            .iter()
            .filter(|&&d| d != from)
            .map(|&d| self.inst.dist(from, d) + self.inst.dist(d, end))
            .fold(self.inst.dist(from, end), S::max)
    }

    fn pickup_reachable(&self, cur: usize, j: usize) -> bool {
        let inst = self.inst;
        let d = inst.delivery_of(j);
        self.length + inst.dist(cur, j) + inst.dist(j, d) + inst.dist(d, inst.end())
            <= inst.max_length() + S::length_tolerance()
    }

    fn dfs(&mut self) {
        let inst = self.inst;
        let cur = self.current();
        let tol = S::length_tolerance();
        let eps = S::improvement_eps();

        let mut upper = self.picked_revenue;
        for j in 1..=inst.n() {
            // load is ignored here: deliveries may free room for j later
            if !self.visited[j]
                && inst.demand_of(j) <= inst.capacity()
                && self.pickup_reachable(cur, j)
            {
                upper += inst.revenue_of(j);
            }
        }
        if upper + eps < self.best.revenue() {
            return;
        }
        if upper <= self.best.revenue() + eps
            && self.length + self.completion_bound(cur) > self.best.length() + eps
        {
            return;
        }

        if self.pending.is_empty() {
            let total = self.length + inst.dist(cur, inst.end());
            if total <= inst.max_length() + tol {
                let mut seq = self.seq.clone();
                seq.push(inst.end());
                let candidate = Route::build(inst, seq);
                if candidate.is_better_than(&self.best) {
                    self.best = candidate;
                }
            }
        }

        for v in 1..=2 * inst.n() {
            if self.visited[v] {
                continue;
            }
            if inst.is_pickup(v) {
                if self.load + inst.demand_of(v) > inst.capacity() || !self.pickup_reachable(cur, v) {
                    continue;
                }
            } else if !self.pending.contains(&v) {
                continue;
            }
            let step = inst.dist(cur, v);
            self.apply(v, step);
            if self.length + self.completion_bound(v) <= inst.max_length() + tol {
                self.dfs();
            }
            self.undo(v, step);
        }
    }

    fn apply(&mut self, v: usize, step: S) {
        let inst = self.inst;
        self.seq.push(v);
        self.visited[v] = true;
        self.length += step;
        if inst.is_pickup(v) {
            self.load += inst.demand_of(v);
            self.pending.push(inst.delivery_of(v));
            self.picked_revenue += inst.revenue_of(v);
        } else {
            self.load -= inst.demand_of(v - inst.n());
            self.pending.retain(|&d| d != v);
        }
    }

    fn undo(&mut self, v: usize, step: S) {
        let inst = self.inst;
        self.seq.pop();
        self.visited[v] = false;
        self.length -= step;
        if inst.is_pickup(v) {
            self.load -= inst.demand_of(v);
            self.pending.retain(|&d| d != inst.delivery_of(v));
            self.picked_revenue -= inst.revenue_of(v);
        } else {
            self.load += inst.demand_of(v - inst.n());
            self.pending.push(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_route, RevenueSetting};

    fn single(t: f64) -> Instance<f64> {
        Instance::new(
            1,
            vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],
            vec![2],
            vec![0.7],
            5,
            t,
            RevenueSetting::Uniform,
            0,
        )
        .unwrap()
    }

    #[test]
    fn single_request_served_iff_it_fits() {
        let served = exhaustive_solve(&single(3.0), 6).unwrap();
        assert_eq!(served.seq(), &[0, 1, 2, 3]);
        assert_eq!(served.revenue(), 0.7);

        let skipped = exhaustive_solve(&single(2.9), 6).unwrap();
        assert_eq!(skipped.seq(), &[0, 3]);
        assert_eq!(skipped.revenue(), 0.0);
    }

    #[test]
    fn no_requests_gives_empty_route() {
        let inst = Instance::new(
            0,
            vec![[0.1, 0.1], [0.9, 0.9]],
            vec![],
            vec![],
            8,
            2.0,
            RevenueSetting::Constant,
            0,
        )
        .unwrap();
        assert_eq!(exhaustive_solve(&inst, 6).unwrap().seq(), &[0, 1]);
    }

    #[test]
    fn refuses_large_instances() {
        let spec = crate::generator::GenSpec::new(7, RevenueSetting::Distance, 1, 1).unwrap();
        let inst: Instance<f64> = crate::generator::gen_instance(&spec, 0);
        assert!(matches!(
            exhaustive_solve(&inst, DEFAULT_MAX_N),
            Err(Error::TooLarge { n: 7, max: 6 })
        ));
    }

    #[test]
    fn capacity_forces_sequential_service() {
        // two requests side by side; Q only fits one at a time
        let inst = Instance::new(
            2,
            vec![[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [0.3, 0.0], [0.4, 0.0], [0.5, 0.0]],
            vec![3, 3],
            vec![0.5, 0.5],
            4,
            2.0,
            RevenueSetting::Uniform,
            0,
        )
        .unwrap();
        let best = exhaustive_solve(&inst, 6).unwrap();
        assert_eq!(best.served().len(), 2);
        assert!(validate_route(&inst, best.seq()).unwrap().feasible);
        assert_eq!(best.seq(), &[0, 1, 3, 2, 4, 5]);
    }

    #[test]
    fn unreachable_end_depot() {
        let inst = Instance::new(
            0,
            vec![[0.0, 0.0], [1.0, 1.0]],
            vec![],
            vec![],
            8,
            1.0,
            RevenueSetting::Constant,
            0,
        )
        .unwrap();
        assert!(matches!(exhaustive_solve(&inst, 6), Err(Error::NoFeasibleRoute)));
    }
}
