use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// How request revenues were drawn when the instance was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevenueSetting {
    Distance,
    TonDistance,
    Uniform,
    Constant,
}

impl fmt::Display for RevenueSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RevenueSetting::Distance => "distance",
            RevenueSetting::TonDistance => "ton_distance",
            RevenueSetting::Uniform => "uniform",
            RevenueSetting::Constant => "constant",
        })
    }
}

impl FromStr for RevenueSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "distance" => Ok(RevenueSetting::Distance),
            "ton_distance" => Ok(RevenueSetting::TonDistance),
            "uniform" => Ok(RevenueSetting::Uniform),
            "constant" => Ok(RevenueSetting::Constant),
            other => Err(Error::Config(format!("unknown revenue setting `{other}`"))),
        }
    }
}

/// Serialized layout of an [`Instance`]; validated on conversion.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "S: Scalar")]
struct InstanceRepr<S> {
    n: usize,
    coords: Vec<[S; 2]>,
    demand: Vec<u32>,
    revenue: Vec<S>,
    capacity: u32,
    max_length: S,
    revenue_setting: RevenueSetting,
    seed: u64,
}

/// A single-vehicle selective pickup-and-delivery instance.
///
/// Vertex layout: `0` is the start depot, `1..=n` are pickups, `n+1..=2n`
/// the matching deliveries (request `h` is picked up at `h` and delivered at
/// `h + n`) and `2n+1` is the end depot. Requests are identified by their
/// pickup vertex, so request ids run over `1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "InstanceRepr<S>",
    into = "InstanceRepr<S>",
    bound = "S: Scalar"
)]
pub struct Instance<S = f64> {
    n: usize,
    coords: Vec<[S; 2]>,
    demand: Vec<u32>,
    revenue: Vec<S>,
    capacity: u32,
    max_length: S,
    revenue_setting: RevenueSetting,
    seed: u64,
}

/// Largest normalized revenue accepted. Distance revenues may reach sqrt(2).
const REVENUE_CEILING: f64 = 1.5;

impl<S: Scalar> Instance<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        coords: Vec<[S; 2]>,
        demand: Vec<u32>,
        revenue: Vec<S>,
        capacity: u32,
        max_length: S,
        revenue_setting: RevenueSetting,
        seed: u64,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if coords.len() != 2 * n + 2 {
            return bad(format!("expected {} coordinates, got {}", 2 * n + 2, coords.len()));
        }
        if demand.len() != n || revenue.len() != n {
            return bad(format!(
                "expected {n} demands and revenues, got {} and {}",
                demand.len(),
                revenue.len()
            ));
        }
        let unit = |v: S| v >= S::zero() && v <= S::one();
        if let Some(i) = coords.iter().position(|p| !(unit(p[0]) && unit(p[1]))) {
            return bad(format!("coordinate {i} lies outside the unit square"));
        }
        if let Some(h) = demand.iter().position(|&q| q == 0) {
            return bad(format!("request {} has zero demand", h + 1));
        }
        let ceiling = S::lit(REVENUE_CEILING);
        if let Some(h) = revenue
            .iter()
            .position(|&r| !(r >= S::zero() && r <= ceiling))
        {
            return bad(format!("revenue of request {} is outside [0, 1.5]", h + 1));
        }
        if capacity == 0 {
            return bad("capacity must be positive".into());
        }
        if !(max_length > S::zero() && max_length.is_finite()) {
            return bad("route-length limit must be positive and finite".into());
        }
        Ok(Self {
            n,
            coords,
            demand,
            revenue,
            capacity,
            max_length,
            revenue_setting,
            seed,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization is infallible")
    }

    /// Number of requests.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        2 * self.n + 2
    }

    #[inline]
    pub fn start(&self) -> usize {
        0
    }

    #[inline]
    pub fn end(&self) -> usize {
        2 * self.n + 1
    }

    #[inline]
    pub fn is_pickup(&self, v: usize) -> bool {
        (1..=self.n).contains(&v)
    }

    #[inline]
    pub fn is_delivery(&self, v: usize) -> bool {
        v > self.n && v <= 2 * self.n
    }

    #[inline]
    pub fn delivery_of(&self, request: usize) -> usize {
        request + self.n
    }

    /// Request served by vertex `v`, if `v` is a pickup or delivery.
    #[inline]
    pub fn request_of(&self, v: usize) -> Option<usize> {
        if self.is_pickup(v) {
            Some(v)
        } else if self.is_delivery(v) {
            Some(v - self.n)
        } else {
            None
        }
    }

    pub fn coords(&self) -> &[[S; 2]] {
        &self.coords
    }

    pub fn demands(&self) -> &[u32] {
        &self.demand
    }

    pub fn revenues(&self) -> &[S] {
        &self.revenue
    }

    #[inline]
    pub fn demand_of(&self, request: usize) -> u32 {
        self.demand[request - 1]
    }

    #[inline]
    pub fn revenue_of(&self, request: usize) -> S {
        self.revenue[request - 1]
    }

    #[inline]
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    #[inline]
    pub fn max_length(&self) -> S {
        self.max_length
    }

    pub fn revenue_setting(&self) -> RevenueSetting {
        self.revenue_setting
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_demand(&self) -> u32 {
        self.demand.iter().copied().max().unwrap_or(0)
    }

    /// Some request can never be carried because its demand exceeds `Q`.
    pub fn is_degenerate(&self) -> bool {
        self.capacity < self.max_demand()
    }

    /// Euclidean distance between two vertices.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> S {
        let a = self.coords[i];
        let b = self.coords[j];
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// Revenue of a set of requests, summed in ascending id order so that the
    /// same set always yields the same bits.
    pub fn revenue_of_set(&self, requests: &BTreeSet<usize>) -> S {
        requests
            .iter()
            .fold(S::zero(), |acc, &h| acc + self.revenue_of(h))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.n })
        }
    }
}

impl<S: Scalar> TryFrom<InstanceRepr<S>> for Instance<S> {
    type Error = Error;

    fn try_from(r: InstanceRepr<S>) -> Result<Self> {
        Instance::new(
            r.n,
            r.coords,
            r.demand,
            r.revenue,
            r.capacity,
            r.max_length,
            r.revenue_setting,
            r.seed,
        )
    }
}

impl<S: Scalar> From<Instance<S>> for InstanceRepr<S> {
    fn from(i: Instance<S>) -> Self {
        InstanceRepr {
            n: i.n,
            coords: i.coords,
            demand: i.demand,
            revenue: i.revenue,
            capacity: i.capacity,
            max_length: i.max_length,
            revenue_setting: i.revenue_setting,
            seed: i.seed,
        }
    }
}
