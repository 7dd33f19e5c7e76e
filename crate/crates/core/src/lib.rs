//! Solver suite for the multi-commodity one-to-one pickup-and-delivery
//! selective TSP: one capacitated vehicle picks a subset of paired
//! pickup/delivery requests and routes them under a length limit,
//! maximizing collected revenue.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below name the concrete instantiations.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod generator;
pub mod improve;
pub mod method;
pub mod search;
pub mod model;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{EvalResult, Instance, RevenueSetting, Route, Violation};
pub use scalar::Scalar;

pub type InstanceF64 = Instance<f64>;
pub type InstanceF32 = Instance<f32>;
pub type RouteF64 = Route<f64>;
pub type RouteF32 = Route<f32>;
