//! Improvers that map a feasible route (or a pool of routes) to a feasible
//! route of no lower revenue.

mod budget;
mod local;
mod mslns;
mod repair;
mod sa;
mod two_opt;

pub use budget::{Budget, BudgetClock};
pub use local::{bi_lns, destroy_repair, hill_climb, lns_random};
pub use mslns::{
    count_unique, mslns, sample_without_replacement, MslnsConfig, MslnsOutcome, MslnsRun,
    MslnsStep, Removal, Schedule,
};
pub use repair::{best_insertion, repair, Insertion};
pub use sa::{simulated_annealing, Annealer, SaConfig, SaMove};
pub use two_opt::two_opt_route;

use crate::error::{Error, Result};
use crate::model::{validate_route, Instance, Route};
use crate::scalar::Scalar;

/// Rejects routes that are not fully feasible.
pub(crate) fn require_feasible<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Result<()> {
    match validate_route(inst, route.seq())?.violation {
        None => Ok(()),
        Some(v) => Err(Error::Infeasible(v)),
    }
}

/// `a` beats `b` on revenue by more than rounding noise.
pub(crate) fn revenue_improves<S: Scalar>(a: &Route<S>, b: &Route<S>) -> bool {
    a.revenue() > b.revenue() + S::improvement_eps()
}
