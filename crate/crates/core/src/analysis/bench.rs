use crate::error::Result;
use crate::generator::instance_seed;
use crate::method::{run_method, MethodParams, MethodSpec};
use crate::model::Instance;
use crate::scalar::Scalar;
use crate::search::ExternalScorer;
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchConfig {
    /// Base seed; each instance gets its own stream derived from it.
    pub seed: u64,
    /// Write measured wall time; when off the column is zero so reruns are
    /// byte-identical.
    pub record_time: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: String,
    pub instance_id: String,
    pub time_s: f64,
    pub revenue: f64,
    pub profit: f64,
    pub length: f64,
    pub gap_pct: f64,
    pub is_winner: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub mean_time_s: f64,
    pub mean_revenue: f64,
    pub mean_profit: f64,
    pub mean_gap_pct: f64,
    pub win_rate_pct: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    /// Instance-major, methods in the order given.
    pub rows: Vec<BenchRow>,
    pub summary: Vec<MethodSummary>,
}

const TIE_TOLERANCE: f64 = 1e-9;

impl BenchReport {
    /// Per-run rows followed by a `# summary` block with per-method means.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,instance_id,time_s,revenue,profit,length,gap_pct,is_winner\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.9},{:.9},{:.9},{:.6},{}",
                r.method, r.instance_id, r.time_s, r.revenue, r.profit, r.length, r.gap_pct, r.is_winner
            );
        }
        out.push_str("\n# summary\nmethod,mean_time_s,mean_revenue,mean_profit,mean_gap_pct,win_rate_pct\n");
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{},{:.6},{:.9},{:.9},{:.6},{:.2}",
                s.method, s.mean_time_s, s.mean_revenue, s.mean_profit, s.mean_gap_pct, s.win_rate_pct
            );
        }
        out
    }

    /// Mean revenue against mean wall time, one point per method.
    pub fn plot_csv(&self) -> String {
        let mut out = String::from("method,mean_time_s,mean_revenue\n");
        for s in &self.summary {
            let _ = writeln!(out, "{},{:.6},{:.9}", s.method, s.mean_time_s, s.mean_revenue);
        }
        out
    }

    pub fn summary_of(&self, method: &str) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }
}

/// Runs every method on every instance and scores each run against the
/// best revenue any method reached on that instance.
///
/// Instance `i` is identified as `ids[i]`, which also keys `external`.
/// Instances run in parallel on the current rayon pool; methods on one
/// instance run back to back on a single worker so their timings stay
/// comparable.
pub fn run_benchmark<S: Scalar>(
    instances: &[Instance<S>],
    ids: &[String],
    methods: &[MethodSpec],
    params: &MethodParams,
    external: Option<&HashMap<String, ExternalScorer<S>>>,
    cfg: &BenchConfig,
) -> Result<BenchReport> {
    params.validate()?;
    assert_eq!(instances.len(), ids.len(), "one id per instance");
    let per_instance: Vec<Vec<BenchRow>> = instances
        .par_iter()
        .zip(ids.par_iter())
        .enumerate()
        .map(|(idx, (inst, id))| {
            let run_seed = instance_seed(cfg.seed, idx as u64);
            let inst_ext = external.and_then(|m| m.get(id));
            let mut rows = methods
                .iter()
                .map(|spec| {
                    let started = Instant::now();
                    let route = run_method(inst, spec, params, inst_ext, run_seed)?;
                    let time_s = if cfg.record_time { started.elapsed().as_secs_f64() } else { 0.0 };
                    Ok(BenchRow {
                        method: spec.to_string(),
                        instance_id: id.clone(),
                        time_s,
                        revenue: route.revenue().as_f64(),
                        profit: route.profit().as_f64(),
                        length: route.length().as_f64(),
                        gap_pct: 0.0,
                        is_winner: false,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let best = rows.iter().map(|r| r.revenue).fold(f64::NEG_INFINITY, f64::max);
            for r in &mut rows {
                r.gap_pct = if best > 0.0 { 100.0 * (best - r.revenue).max(0.0) / best } else { 0.0 };
                r.is_winner = r.revenue >= best - TIE_TOLERANCE;
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<BenchRow> = per_instance.into_iter().flatten().collect();

    let summary = methods
        .iter()
        .map(|spec| {
            let name = spec.to_string();
            let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.method == name).collect();
            let count = mine.len().max(1) as f64;
            let mean = |f: fn(&BenchRow) -> f64| mine.iter().map(|r| f(r)).sum::<f64>() / count;
            MethodSummary {
                method: name.clone(),
                mean_time_s: mean(|r| r.time_s),
                mean_revenue: mean(|r| r.revenue),
                mean_profit: mean(|r| r.profit),
                mean_gap_pct: mean(|r| r.gap_pct),
                win_rate_pct: 100.0 * mine.iter().filter(|r| r.is_winner).count() as f64 / count,
            }
        })
        .collect();
    Ok(BenchReport { rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{gen_batch, GenSpec};
    use crate::model::RevenueSetting;

    fn batch(count: usize) -> (Vec<Instance<f64>>, Vec<String>) {
        let insts = gen_batch(&GenSpec::new(5, RevenueSetting::Distance, 71, count).unwrap());
        let ids = (0..count).map(|i| i.to_string()).collect();
        (insts, ids)
    }

    fn det() -> MethodParams {
        MethodParams {
            deterministic: true,
            ..MethodParams::default()
        }
    }

    #[test]
    fn method_against_itself() {
        let (insts, ids) = batch(6);
        let m: MethodSpec = "gs".parse().unwrap();
        let r = run_benchmark(&insts, &ids, &[m], &det(), None, &BenchConfig::default()).unwrap();
        let s = r.summary_of("gs").unwrap();
        assert_eq!(s.mean_gap_pct, 0.0);
        assert_eq!(s.win_rate_pct, 100.0);
    }

    #[test]
    fn oracle_only_lowers_win_rates() {
        let (insts, ids) = batch(10);
        let base: Vec<MethodSpec> = ["gs", "gs+2opt"].iter().map(|m| m.parse().unwrap()).collect();
        let mut with_exact = base.clone();
        with_exact.push("exact".parse().unwrap());
        let a = run_benchmark(&insts, &ids, &base, &det(), None, &BenchConfig::default()).unwrap();
        let b = run_benchmark(&insts, &ids, &with_exact, &det(), None, &BenchConfig::default()).unwrap();
        for m in ["gs", "gs+2opt"] {
            assert!(b.summary_of(m).unwrap().win_rate_pct <= a.summary_of(m).unwrap().win_rate_pct);
        }
        let exact = b.summary_of("exact").unwrap();
        assert_eq!((exact.mean_gap_pct, exact.win_rate_pct), (0.0, 100.0));
        // every instance has a winner with zero gap
        for id in &ids {
            assert!(b.rows.iter().any(|r| &r.instance_id == id && r.is_winner && r.gap_pct == 0.0));
        }
    }

    #[test]
    fn csv_is_reproducible() {
        let (insts, ids) = batch(4);
        let ms: Vec<MethodSpec> = ["msgs+mslns", "gs+lns", "gs+sa"].iter().map(|m| m.parse().unwrap()).collect();
        let cfg = BenchConfig { seed: 3, record_time: false };
        let a = run_benchmark(&insts, &ids, &ms, &det(), None, &cfg).unwrap().to_csv();
        let b = run_benchmark(&insts, &ids, &ms, &det(), None, &cfg).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("method,instance_id,time_s,revenue,profit,length,gap_pct,is_winner\n"));
        assert!(a.contains("\n# summary\n"));
    }
}
