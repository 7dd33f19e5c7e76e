//! Reproducible random instances.
//!
//! Points are uniform in the unit square, demands uniform on `{2,3,4,5}`,
//! capacity uniform on `{8,...,20}` and the length limit uniform on an
//! integer grid anchored to the depot-to-depot distance.

use crate::error::{Error, Result};
use crate::model::{Instance, RevenueSetting};
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub revenue_setting: RevenueSetting,
    pub seed: u64,
    pub count: usize,
}

impl GenSpec {
    pub fn new(n: usize, revenue_setting: RevenueSetting, seed: u64, count: usize) -> Result<Self> {
        if n == 0 || count == 0 {
            return Err(Error::Config(
                "request count and batch size must be at least 1".into(),
            ));
        }
        Ok(Self {
            n,
            revenue_setting,
            seed,
            count,
        })
    }
}

/// Per-instance seed: a SplitMix64 finalizer over `(seed, index)` so that any
/// instance of a batch can be generated on its own.
pub fn instance_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Inclusive bounds of the route-length grid for `n` requests and a
/// depot-to-depot distance `depot_gap`.
pub fn length_limit_bounds(n: usize, depot_gap: f64) -> (u64, u64) {
    let bound = |num: f64| 2f64.max((num * n as f64 / 20.0 * depot_gap).ceil()) as u64;
    (bound(3.0), bound(10.0))
}

pub fn gen_instance<S: Scalar>(spec: &GenSpec, index: usize) -> Instance<S> {
    let n = spec.n;
    let seed = instance_seed(spec.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let coords: Vec<[f64; 2]> = (0..2 * n + 2)
        .map(|_| [rng.gen::<f64>(), rng.gen::<f64>()])
        .collect();
    let dist = |i: usize, j: usize| (coords[i][0] - coords[j][0]).hypot(coords[i][1] - coords[j][1]);
    let demand: Vec<u32> = (0..n).map(|_| rng.gen_range(2..=5)).collect();
    let capacity: u32 = rng.gen_range(8..=20);
    let (lo, hi) = length_limit_bounds(n, dist(0, 2 * n + 1));
    let max_length = rng.gen_range(lo..=hi) as f64;

    let separation = |h: usize| dist(h, h + n);
    let revenue: Vec<f64> = match spec.revenue_setting {
        RevenueSetting::Distance => (1..=n).map(separation).collect(),
        RevenueSetting::TonDistance => {
            let raw: Vec<f64> = (1..=n)
                .map(|h| {
                    let discount = rng.gen_range(0.5..1.5);
                    f64::from(demand[h - 1]) * separation(h) * discount
                })
                .collect();
            let max = raw.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                raw.iter().map(|r| r / max).collect()
            } else {
                vec![1.0; n]
            }
        }
        RevenueSetting::Uniform => (0..n)
            .map(|_| f64::from(rng.gen_range(1u32..=100)) / 100.0)
            .collect(),
        RevenueSetting::Constant => vec![1.0; n],
    };

    Instance::new(
        n,
        coords.into_iter().map(|[x, y]| [S::lit(x), S::lit(y)]).collect(),
        demand,
        revenue.into_iter().map(S::lit).collect(),
        capacity,
        S::lit(max_length),
        spec.revenue_setting,
        seed,
    )
    .expect("generated instances satisfy every invariant")
}

pub fn gen_batch<S: Scalar>(spec: &GenSpec) -> Vec<Instance<S>> {
    (0..spec.count).map(|i| gen_instance(spec, i)).collect()
}
