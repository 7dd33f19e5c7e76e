use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use pdstsp::analysis::{basin_profile, run_benchmark, BenchConfig};
use pdstsp::exact::{export_milp, exhaustive_solve, DEFAULT_MAX_N};
use pdstsp::generator::{gen_batch, GenSpec};
use pdstsp::improve::{Removal, SaConfig, Schedule};
use pdstsp::method::{run_method, MethodParams, MethodSpec};
use pdstsp::search::{
    multi_start_greedy, read_records, write_trajectories, DecodeMode, ExternalScorer, MaskMode,
    TrajectoryRecord,
};
use pdstsp::{Error, Instance, RevenueSetting, Route};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "pdstsp", version, about = "Selective pickup-and-delivery TSP toolkit")]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true, env = "PDSTSP_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for instance-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate random instances as JSONL.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "distance")]
        revenue: RevenueSetting,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve small instances to optimality.
    Exact {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Write the MILP of one instance in LP format.
    Milp {
        #[arg(long = "in")]
        input: PathBuf,
        /// Line of the instance file to export.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one method on every instance and write routes as JSONL.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `constructor[+improver]`, e.g. `msgs+mslns`.
        #[arg(long)]
        method: MethodSpec,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compare methods and write per-instance rows plus a summary as CSV.
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Repeatable or comma-separated list of methods.
        #[arg(long, required = true, value_delimiter = ',')]
        method: Vec<MethodSpec>,
        /// Also write mean revenue against mean time per method.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Use wall-clock budgets and record times. Output then varies
        /// between runs.
        #[arg(long)]
        timed: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Fraction of solutions inside the k-basin of a reference, per k.
    Basin {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, required = true, value_delimiter = ',')]
        method: Vec<MethodSpec>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
        ks: Vec<usize>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Export multi-start greedy routes in the seed-file format.
    Seeds {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "M")]
        starts: Option<usize>,
    },
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Number of starts for multi-start construction.
    #[arg(long = "M")]
    starts: Option<usize>,
    #[arg(long, default_value_t = 3)]
    beta: usize,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    k_max: Option<usize>,
    /// Improvement time limit in seconds.
    #[arg(long)]
    t_max: Option<f64>,
    /// Improvement iteration limit.
    #[arg(long)]
    iters: Option<u64>,
    /// Drop wall-clock limits; results then depend on the seed only.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value_t = 10.0)]
    rho: f64,
    #[arg(long, default_value = "inference_2opt")]
    mask_mode: MaskMode,
    #[arg(long, default_value = "greedy")]
    decode_mode: DecodeMode,
    #[arg(long, default_value_t = 8)]
    samples: usize,
    #[arg(long, default_value = "softmax")]
    removal: Removal,
    #[arg(long, default_value = "increasing")]
    schedule: Schedule,
    /// Keep only the first seed route in MSLNS.
    #[arg(long)]
    no_multistart: bool,
    /// JSONL with seed routes or logit heatmaps keyed by instance id.
    #[arg(long)]
    seeds_file: Option<PathBuf>,
}

impl ParamArgs {
    fn to_params(&self) -> MethodParams {
        MethodParams {
            starts: self.starts,
            beta: self.beta,
            gamma: self.gamma,
            alpha: self.alpha,
            k_max: self.k_max,
            t_max: self.t_max,
            iterations: self.iters,
            deterministic: self.deterministic,
            rho: self.rho,
            mask_mode: self.mask_mode,
            decode_mode: self.decode_mode,
            samples: self.samples,
            removal: self.removal,
            schedule: self.schedule,
            multistart: !self.no_multistart,
            sa: SaConfig::default(),
        }
    }
}

type Instances = (Vec<String>, Vec<Instance<f64>>);

fn read_instances(path: &Path) -> anyhow::Result<Instances> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut ids = Vec::new();
    let mut insts = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let inst = Instance::from_json(&line)
            .with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        ids.push(i.to_string());
        insts.push(inst);
    }
    log::info!("read {} instances from {}", insts.len(), path.display());
    Ok((ids, insts))
}

fn read_external(
    path: &Path,
    ids: &[String],
    insts: &[Instance<f64>],
) -> anyhow::Result<HashMap<String, ExternalScorer<f64>>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut out = HashMap::new();
    for record in read_records::<f64, _>(BufReader::new(file))? {
        let id = record.instance_id().to_string();
        let Some(&i) = index.get(id.as_str()) else {
            return Err(Error::Config(format!("seed file names unknown instance `{id}`")).into());
        };
        out.insert(id, ExternalScorer::from_record(&insts[i], record)?);
    }
    Ok(out)
}

fn writer(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_routes(
    out: &Option<PathBuf>,
    method: &str,
    ids: &[String],
    routes: &[Route<f64>],
) -> anyhow::Result<()> {
    let mut w = writer(out)?;
    for (id, r) in ids.iter().zip(routes) {
        let line = serde_json::json!({
            "instance_id": id,
            "method": method,
            "seq": r.seq(),
            "revenue": r.revenue(),
            "length": r.length(),
            "profit": r.profit(),
        });
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn solve_all(
    insts: &[Instance<f64>],
    ids: &[String],
    spec: &MethodSpec,
    params: &MethodParams,
    external: Option<&HashMap<String, ExternalScorer<f64>>>,
    seed: u64,
) -> anyhow::Result<Vec<Route<f64>>> {
    let routes = insts
        .par_iter()
        .zip(ids)
        .enumerate()
        .map(|(i, (inst, id))| {
            let ext = external.and_then(|m| m.get(id));
            run_method(inst, spec, params, ext, pdstsp::generator::instance_seed(seed, i as u64))
        })
        .collect::<pdstsp::Result<Vec<_>>>()?;
    Ok(routes)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Gen { n, count, revenue, out } => {
            let spec = GenSpec::new(n, revenue, seed, count)?;
            let mut w = writer(&out)?;
            for inst in gen_batch::<f64>(&spec) {
                writeln!(w, "{}", inst.to_json())?;
            }
            w.flush()?;
        }
        Command::Exact { input, out, max_n } => {
            let (ids, insts) = read_instances(&input)?;
            let routes = insts
                .par_iter()
                .map(|inst| exhaustive_solve(inst, max_n))
                .collect::<pdstsp::Result<Vec<_>>>()?;
            write_routes(&out, "exact", &ids, &routes)?;
        }
        Command::Milp { input, index, out } => {
            let (_, insts) = read_instances(&input)?;
            let Some(inst) = insts.get(index) else {
                bail!(Error::Config(format!(
                    "index {index} out of range for {} instances",
                    insts.len()
                )));
            };
            let mut w = writer(&out)?;
            w.write_all(export_milp(inst).to_lp().as_bytes())?;
            w.flush()?;
        }
        Command::Solve { input, out, method, params } => {
            let (ids, insts) = read_instances(&input)?;
            let external = match &params.seeds_file {
                Some(p) => Some(read_external(p, &ids, &insts)?),
                None => None,
            };
            let p = params.to_params();
            p.validate()?;
            let routes = solve_all(&insts, &ids, &method, &p, external.as_ref(), seed)?;
            write_routes(&out, &method.to_string(), &ids, &routes)?;
        }
        Command::Bench { input, out, method, plot, timed, params } => {
            let (ids, insts) = read_instances(&input)?;
            let external = match &params.seeds_file {
                Some(p) => Some(read_external(p, &ids, &insts)?),
                None => None,
            };
            let mut p = params.to_params();
            p.deterministic |= !timed;
            p.validate()?;
            let cfg = BenchConfig { seed, record_time: timed };
            let report = run_benchmark(&insts, &ids, &method, &p, external.as_ref(), &cfg)?;
            let mut w = writer(&out)?;
            w.write_all(report.to_csv().as_bytes())?;
            w.flush()?;
            if let Some(path) = plot {
                std::fs::write(&path, report.plot_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Basin { input, out, method, ks, params } => {
            let (ids, insts) = read_instances(&input)?;
            let external = match &params.seeds_file {
                Some(p) => Some(read_external(p, &ids, &insts)?),
                None => None,
            };
            let p = params.to_params();
            p.validate()?;
            let mut solutions = Vec::new();
            for spec in &method {
                let routes = solve_all(&insts, &ids, spec, &p, external.as_ref(), seed)?;
                solutions.push((spec.to_string(), routes));
            }
            let references = references(&insts, &solutions)?;
            let profile = basin_profile(&insts, &references, &solutions, &ks)?;
            let mut w = writer(&out)?;
            w.write_all(profile.to_csv().as_bytes())?;
            w.flush()?;
        }
        Command::Seeds { input, out, starts } => {
            let (ids, insts) = read_instances(&input)?;
            let records: Vec<TrajectoryRecord> = insts
                .par_iter()
                .zip(&ids)
                .map(|(inst, id)| {
                    let m = starts.unwrap_or_else(|| pdstsp::search::default_starts(inst.n()));
                    TrajectoryRecord {
                        instance_id: id.clone(),
                        routes: multi_start_greedy(inst, m)
                            .routes
                            .into_iter()
                            .map(Route::into_seq)
                            .collect(),
                    }
                })
                .collect();
            let mut w = writer(&out)?;
            write_trajectories(&mut w, &records)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Exact optimum when the instance is small enough, otherwise the best
/// route any compared method found.
fn references(
    insts: &[Instance<f64>],
    solutions: &[(String, Vec<Route<f64>>)],
) -> anyhow::Result<Vec<Route<f64>>> {
    insts
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            if inst.n() <= DEFAULT_MAX_N {
                return Ok(exhaustive_solve(inst, DEFAULT_MAX_N)?);
            }
            let best = solutions
                .iter()
                .map(|(_, r)| &r[i])
                .min_by(|a, b| a.quality_cmp(b))
                .cloned();
            best.ok_or_else(|| Error::Config("no method to compare against".into()).into())
        })
        .collect()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<Error>().is_some_and(Error::is_config);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
