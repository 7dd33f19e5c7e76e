use crate::error::{Error, Result};
use crate::improve::destroy_repair;
use crate::model::{Instance, Route};
use crate::scalar::Scalar;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// Largest served count for which removal sets are enumerated.
pub const MAX_ENUMERATED_SERVED: usize = 12;

fn check<S: Scalar>(inst: &Instance<S>, route: &Route<S>) -> Result<()> {
    crate::improve::require_feasible(inst, route)?;
    let served = route.served().len();
    if served > MAX_ENUMERATED_SERVED {
        return Err(Error::EnumerationLimit {
            served,
            max: MAX_ENUMERATED_SERVED,
        });
    }
    Ok(())
}

/// Calls `f` on every subset of `items` with 1..=k elements until it
/// returns `false`; reports whether all calls returned `true`.
fn all_subsets(items: &[usize], k: usize, mut f: impl FnMut(&BTreeSet<usize>) -> bool) -> bool {
    fn rec(
        items: &[usize],
        from: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&BTreeSet<usize>) -> bool,
    ) -> bool {
        for i in from..items.len() {
            cur.push(items[i]);
            let ok = f(&cur.iter().copied().collect()) && (cur.len() == k || rec(items, i + 1, k, cur, f));
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    k == 0 || rec(items, 0, k, &mut Vec::new(), &mut f)
}

/// True iff no destroy of 1..=k served requests followed by greedy repair
/// raises the revenue of `route`.
pub fn is_k_attractor<S: Scalar>(inst: &Instance<S>, route: &Route<S>, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    check(inst, route)?;
    let served: Vec<usize> = route.served().iter().copied().collect();
    Ok(all_subsets(&served, k, |set| {
        !crate::improve::revenue_improves(&destroy_repair(inst, route, set), route)
    }))
}

/// Best-improvement k-destroy descent: every round evaluates all removal
/// sets of size 1..=k and moves to the best neighbour while it raises
/// revenue. The result is a k-attractor.
pub fn descend<S: Scalar>(inst: &Instance<S>, route: &Route<S>, k: usize) -> Result<Route<S>> {
    check(inst, route)?;
    let mut cur = route.clone();
    if k == 0 {
        return Ok(cur);
    }
    loop {
        let served: Vec<usize> = cur.served().iter().copied().collect();
        let mut best: Option<Route<S>> = None;
        all_subsets(&served, k, |set| {
            let cand = destroy_repair(inst, &cur, set);
            if best.as_ref().is_none_or(|b| cand.is_better_than(b)) {
                best = Some(cand);
            }
            true
        });
        match best {
            Some(next) if crate::improve::revenue_improves(&next, &cur) => {
                cur = next;
                check(inst, &cur)?;
            }
            _ => return Ok(cur),
        }
    }
}

fn same_attractor<S: Scalar>(a: &Route<S>, b: &Route<S>) -> bool {
    a.served() == b.served() && (a.revenue() - b.revenue()).abs() <= S::lit(1e-9)
}

/// Whether `route` lies in the k-attraction basin of `reference`.
///
/// Membership holds when best-improvement j-destroy descent from `route`
/// ends on `reference`'s served set for some `j <= k` (with `j = 0` meaning
/// `route` already serves that set). Taking the union over `j` keeps the
/// basin nested in `k`.
pub fn in_k_basin<S: Scalar>(
    inst: &Instance<S>,
    route: &Route<S>,
    reference: &Route<S>,
    k: usize,
) -> Result<bool> {
    check(inst, reference)?;
    for j in 0..=k {
        if same_attractor(&descend(inst, route, j)?, reference) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Fraction of instances, per method and per k, whose solution lies in the
/// k-basin of the instance's reference route.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinProfile {
    pub ks: Vec<usize>,
    /// `(method, fraction per k)`.
    pub rows: Vec<(String, Vec<f64>)>,
}

impl BasinProfile {
    pub fn fraction(&self, method: &str, k: usize) -> Option<f64> {
        let col = self.ks.iter().position(|&x| x == k)?;
        self.rows.iter().find(|(m, _)| m == method).map(|(_, f)| f[col])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,k,fraction\n");
        for (m, fr) in &self.rows {
            for (k, f) in self.ks.iter().zip(fr) {
                out.push_str(&format!("{m},{k},{f:.6}\n"));
            }
        }
        out
    }
}

/// `solutions[m].1[i]` is method `m`'s route on instance `i`.
pub fn basin_profile<S: Scalar>(
    instances: &[Instance<S>],
    references: &[Route<S>],
    solutions: &[(String, Vec<Route<S>>)],
    ks: &[usize],
) -> Result<BasinProfile> {
    if references.len() != instances.len()
        || solutions.iter().any(|(_, r)| r.len() != instances.len())
    {
        return Err(Error::Config("one route per instance is required for every method".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let rows = solutions
        .iter()
        .map(|(name, routes)| {
            let hits: Vec<Vec<bool>> = instances
                .par_iter()
                .zip(routes.par_iter().zip(references.par_iter()))
                .map(|(inst, (route, reference))| {
                    ks.iter()
                        .map(|&k| in_k_basin(inst, route, reference, k))
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<_>>()?;
            let total = instances.len().max(1) as f64;
            let fractions = (0..ks.len())
                .map(|c| hits.iter().filter(|h| h[c]).count() as f64 / total)
                .collect();
            Ok((name.clone(), fractions))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinProfile { ks, rows })
}
