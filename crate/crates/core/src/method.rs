//! `constructor[+improver]` pipelines, e.g. `msgs+mslns` or `gs+2opt`.

use crate::error::{Error, Result};
use crate::exact::{exhaustive_solve, DEFAULT_MAX_N};
use crate::improve::{
    bi_lns, hill_climb, lns_random, mslns, simulated_annealing, two_opt_route, Budget,
    MslnsConfig, Removal, SaConfig, Schedule,
};
use crate::model::{Instance, Route};
use crate::scalar::Scalar;
use crate::search::{
    best_route, decode, default_starts, greedy_search, multi_start_greedy, sgbs, DecodeConfig,
    DecodeMode, ExternalScorer, FitnessScorer, MaskMode, Scorer, SgbsConfig,
};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constructor {
    Gs,
    Msgs,
    Decode,
    Sgbs,
    Exact,
    /// Routes read from a trajectory file, replayed and validated.
    Seeds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Improver {
    Hc,
    TwoOpt,
    BiLns,
    Lns,
    Sa,
    Mslns,
}

impl Constructor {
    const TOKENS: [(&'static str, Constructor); 6] = [
        ("gs", Constructor::Gs),
        ("msgs", Constructor::Msgs),
        ("decode", Constructor::Decode),
        ("sgbs", Constructor::Sgbs),
        ("exact", Constructor::Exact),
        ("seeds", Constructor::Seeds),
    ];
}

impl Improver {
    const TOKENS: [(&'static str, Improver); 6] = [
        ("hc", Improver::Hc),
        ("2opt", Improver::TwoOpt),
        ("bilns", Improver::BiLns),
        ("lns", Improver::Lns),
        ("sa", Improver::Sa),
        ("mslns", Improver::Mslns),
    ];
}

fn token_of<T: PartialEq + Copy>(table: &[(&'static str, T)], value: T) -> &'static str {
    table.iter().find(|(_, v)| *v == value).map(|(t, _)| *t).expect("every variant has a token")
}

impl fmt::Display for Constructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(token_of(&Self::TOKENS, *self))
    }
}

impl fmt::Display for Improver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(token_of(&Self::TOKENS, *self))
    }
}

/// A parsed method string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    pub constructor: Constructor,
    pub improver: Option<Improver>,
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let mut parts = lower.split('+');
        let head = parts.next().unwrap_or_default();
        let constructor = Constructor::TOKENS
            .iter()
            .find(|(t, _)| *t == head)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::UnknownMethod(head.to_string()))?;
        let improver = match parts.next() {
            None => None,
            Some(tok) => Some(
                Improver::TOKENS
                    .iter()
                    .find(|(t, _)| *t == tok)
                    .map(|(_, i)| *i)
                    .ok_or_else(|| Error::UnknownMethod(tok.to_string()))?,
            ),
        };
        if let Some(extra) = parts.next() {
            return Err(Error::UnknownMethod(format!("+{extra}")));
        }
        Ok(Self {
            constructor,
            improver,
        })
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.improver {
            Some(i) => write!(f, "{}+{}", self.constructor, i),
            None => write!(f, "{}", self.constructor),
        }
    }
}

/// Iteration cap for open-ended improvers when wall-clock limits are off.
pub const DEFAULT_ITERATIONS: u64 = 1000;

/// Per-instance time limit scaled with instance size.
pub fn default_t_max(n: usize) -> f64 {
    match n {
        0..=10 => 0.5,
        11..=20 => 1.0,
        21..=40 => 4.0,
        _ => 10.0,
    }
}

/// Tunables shared by every pipeline. `None` picks a size-dependent default.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodParams {
    /// Starts `M` for multi-start construction.
    pub starts: Option<usize>,
    /// Pool width for MSLNS, beam width for decode and SGBS.
    pub beta: usize,
    /// SGBS expansion; defaults to `beta`.
    pub gamma: Option<usize>,
    pub alpha: f64,
    /// Destroy cap; defaults to 4 for MSLNS and 3 for random LNS.
    pub k_max: Option<usize>,
    pub t_max: Option<f64>,
    pub iterations: Option<u64>,
    /// Ignore wall-clock limits so results depend on the seed only.
    pub deterministic: bool,
    pub rho: f64,
    pub mask_mode: MaskMode,
    pub decode_mode: DecodeMode,
    pub samples: usize,
    pub removal: Removal,
    pub schedule: Schedule,
    pub multistart: bool,
    pub sa: SaConfig,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            starts: None,
            beta: 3,
            gamma: None,
            alpha: 1.0,
            k_max: None,
            t_max: None,
            iterations: None,
            deterministic: false,
            rho: 10.0,
            mask_mode: MaskMode::Inference2Opt,
            decode_mode: DecodeMode::Greedy,
            samples: 8,
            removal: Removal::Softmax,
            schedule: Schedule::Increasing,
            multistart: true,
            sa: SaConfig::default(),
        }
    }
}

impl MethodParams {
    pub fn budget(&self, n: usize) -> Budget {
        if self.deterministic {
            Budget::iterations(self.iterations.unwrap_or(DEFAULT_ITERATIONS))
        } else {
            let b = Budget::seconds(self.t_max.unwrap_or_else(|| default_t_max(n)));
            match self.iterations {
                Some(i) => b.with_iterations(i),
                None => b,
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta == 0 || self.samples == 0 || self.starts == Some(0) || self.gamma == Some(0) {
            return Err(Error::Config("widths, starts and sample counts must be positive".into()));
        }
        if self.k_max == Some(0) {
            return Err(Error::Config("k-max must be positive".into()));
        }
        if self.t_max.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
            return Err(Error::Config("t-max must be a non-negative number of seconds".into()));
        }
        if !self.alpha.is_finite() || !(self.rho.is_finite() && self.rho >= 0.0) {
            return Err(Error::Config("alpha and rho must be finite, rho non-negative".into()));
        }
        self.sa.validate()
    }
}

fn feasible_only<S: Scalar>(inst: &Instance<S>, routes: Vec<Route<S>>) -> Result<Vec<Route<S>>> {
    let mut kept: Vec<Route<S>> = routes.into_iter().filter(|r| r.is_feasible(inst)).collect();
    if kept.is_empty() {
        let empty = Route::empty(inst);
        if !empty.is_feasible(inst) {
            return Err(Error::NoFeasibleRoute);
        }
        kept.push(empty);
    }
    Ok(kept)
}

/// Runs the constructor and returns its feasible routes in construction
/// order.
///
/// `external` supplies fixed trajectories for `seeds`, or a logit heatmap
/// that replaces the rule-based scorer in `decode` and `sgbs`.
pub fn construct<S: Scalar>(
    inst: &Instance<S>,
    constructor: Constructor,
    params: &MethodParams,
    external: Option<&ExternalScorer<S>>,
    seed: u64,
) -> Result<Vec<Route<S>>> {
    let starts = params.starts.unwrap_or_else(|| default_starts(inst.n()));
    let scorer: &dyn Scorer<S> = match external {
        Some(h @ ExternalScorer::Heatmap(_)) => h,
        _ => &FitnessScorer,
    };
    let routes = match constructor {
        Constructor::Gs => vec![greedy_search(inst, None)],
        Constructor::Msgs => multi_start_greedy(inst, starts).routes,
        Constructor::Decode => {
            let cfg = DecodeConfig {
                mode: params.decode_mode,
                starts,
                beam_width: params.beta,
                samples: params.samples,
                mask_mode: params.mask_mode,
                rho: S::lit(params.rho),
                ..DecodeConfig::default()
            };
            decode(inst, scorer, &cfg, seed)?
        }
        Constructor::Sgbs => {
            let cfg = SgbsConfig {
                beam_width: params.beta,
                expansion: params.gamma.unwrap_or(params.beta),
                mask_mode: MaskMode::Inference2Opt,
            };
            vec![sgbs(inst, scorer, &FitnessScorer, &cfg)]
        }
        Constructor::Exact => vec![exhaustive_solve(inst, DEFAULT_MAX_N)?],
        Constructor::Seeds => match external {
            Some(t @ ExternalScorer::Trajectories(_)) => decode(inst, t, &DecodeConfig::default(), seed)?,
            _ => {
                return Err(Error::Config(
                    "the `seeds` constructor needs trajectories for every instance".into(),
                ))
            }
        },
    };
    feasible_only(inst, routes)
}

/// Runs a full pipeline on one instance and returns its best route.
///
/// Single-route improvers start from the constructor's best route; MSLNS
/// takes the whole constructed pool as seeds.
pub fn run_method<S: Scalar>(
    inst: &Instance<S>,
    spec: &MethodSpec,
    params: &MethodParams,
    external: Option<&ExternalScorer<S>>,
    seed: u64,
) -> Result<Route<S>> {
    params.validate()?;
    let pool = construct(inst, spec.constructor, params, external, seed)?;
    let start = best_route(&pool).expect("constructors yield a route").clone();
    let budget = params.budget(inst.n());
    let Some(improver) = spec.improver else {
        return Ok(start);
    };
    match improver {
        Improver::Hc => hill_climb(inst, &start),
        Improver::TwoOpt => Ok(two_opt_route(inst, &start)),
        Improver::BiLns => bi_lns(inst, &start, budget),
        Improver::Lns => lns_random(inst, &start, params.k_max.unwrap_or(3), budget, seed),
        Improver::Sa => simulated_annealing(inst, &start, &params.sa, budget, seed),
        Improver::Mslns => {
            let cfg = MslnsConfig {
                starts: params.starts.unwrap_or(pool.len()),
                beta: params.beta,
                alpha: params.alpha,
                k_max: params.k_max.unwrap_or(4),
                budget,
                removal: params.removal,
                schedule: params.schedule,
                multistart: params.multistart,
            };
            Ok(mslns(inst, &pool, &cfg, seed)?.best)
        }
    }
}
