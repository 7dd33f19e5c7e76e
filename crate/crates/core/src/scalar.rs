//! Floating-point abstraction shared by every solver in the crate.
//!
//! All geometry and objective arithmetic is written against [`Scalar`], which
//! is implemented for `f32` and `f64`. Demands and capacities stay integral.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::{Debug, Display};

/// Real number type used for coordinates, lengths and revenues.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Slack accepted when a route length is compared against its limit.
    fn length_tolerance() -> Self;

    /// Smallest change counted as an improvement by the local searches.
    fn improvement_eps() -> Self;

    /// Converts an `f64` constant. Panics only if the value is not representable,
    /// which cannot happen for the finite literals used in this crate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn length_tolerance() -> Self {
        1e-9
    }
    #[inline]
    fn improvement_eps() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn length_tolerance() -> Self {
        1e-5
    }
    #[inline]
    fn improvement_eps() -> Self {
        1e-5
    }
}

/// Numerically stable softmax of `scale * logits`.
///
/// With `scale = +inf`-like sharpness the mass collapses onto the maxima.
pub fn softmax<S: Scalar>(logits: &[S], scale: S) -> Vec<S> {
    if logits.is_empty() {
        return Vec::new();
    }
    let max = logits
        .iter()
        .map(|&x| x * scale)
        .fold(S::neg_infinity(), S::max);
    let exps: Vec<S> = logits.iter().map(|&x| (x * scale - max).exp()).collect();
    let total = exps.iter().fold(S::zero(), |a, &b| a + b);
    exps.into_iter().map(|e| e / total).collect()
}
