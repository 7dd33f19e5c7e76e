//! Problem data model: instances, routes and the feasibility check every
//! solver relies on.

mod eval;
mod instance;
mod route;

pub use eval::{
    collected_revenue, load_profile, route_length, shaped_objective, validate_route, EvalResult,
    Violation,
};
pub use instance::{Instance, RevenueSetting};
pub use route::{Route, RouteJson};
pub(crate) use route::dedup_by_served;
