//! Command-line front end: simulation, estimators, posterior chains, limit
//! oracles, and the experiment runners.

use boundary_lab::error::{Error, Result};
use boundary_lab::exp::config::{ExperimentConfig, PriorSpec};
use boundary_lab::exp::io::{configure_threads, fmt_f64, write_manifest, CsvTable};
use boundary_lab::exp::report;
use boundary_lab::mle::{histogram_mle, kjump_mle, monotone_mle};
use boundary_lab::point_set::{default_band_monotone, PointSet, PointSetMeta};
use boundary_lab::prior::CppPrior;
use boundary_lab::rjmcmc::{rjmcmc, RjConfig};
use boundary_lab::rng::stream_rng;
use boundary_lab::truth::Truth;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "bpl", version, about = "support boundary inference laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one band-restricted realization and write points.csv + meta.json.
    Simulate(SimulateArgs),
    /// Fit an estimator to a simulated point set.
    Mle(MleArgs),
    /// Run reversible-jump posterior chains and export traces.
    Posterior(PosteriorArgs),
    /// Print closed-form limit-law oracles as JSON.
    Limit(LimitArgs),
    /// Histogram-model coverage experiment.
    Coverage(RunArgs),
    /// Misspecified-linear negative experiment.
    NegativeLinear(RunArgs),
    /// Strong-signal CPP limit experiment.
    CppLimit(RunArgs),
    /// Kink-boundary negative experiment.
    NegativeKink(RunArgs),
    /// Contraction-slope experiment.
    Contract(RunArgs),
    /// Render aggregates, schemas and the scatter figure for an output dir.
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON truth spec; defaults to the kink boundary on [0, 1.5].
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 1000.0)]
    n: f64,
    #[arg(long, default_value_t = 1.5)]
    window: f64,
    /// Band height; defaults to the monotone-experiment band.
    #[arg(long)]
    band: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out/simulate")]
    out: PathBuf,
}

#[derive(Args)]
struct MleArgs {
    /// Directory produced by `simulate` (points.csv + meta.json).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = ["hist", "mono", "kjump"])]
    estimator: String,
    /// Comma-separated histogram grid, e.g. "0,0.25,0.5,0.75,1".
    #[arg(long)]
    grid: Option<String>,
    /// Jump budget for the kjump estimator.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct PosteriorArgs {
    #[arg(long)]
    input: PathBuf,
    /// Prior JSON ({"kind": "cpp", ...} or subordinator); defaults to the
    /// Exp(1)/Γ(2,1) CPP prior with intensity 3.
    #[arg(long)]
    prior: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    iters: usize,
    #[arg(long)]
    burnin: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Move weights "h:t:b:d".
    #[arg(long, default_value = "0.4:0.3:0.15:0.15")]
    moves: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out/posterior")]
    out: PathBuf,
    /// Keep every m-th draw in the JSON archive.
    #[arg(long, default_value_t = 50)]
    archive_stride: usize,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, value_parser = ["coverage", "vjn-mean", "thresholds"])]
    oracle: String,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 1e4)]
    n: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Master-seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output-directory override.
    #[arg(long)]
    outdir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Print the frozen CSV schemas and exit.
    #[arg(long)]
    schema: bool,
    /// Regenerate figure.svg from the manifest's config.
    #[arg(long)]
    figure: bool,
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn parse_moves(s: &str) -> Result<[f64; 4]> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.parse::<f64>().map_err(|_| Error::Config(format!("bad move weight {p}"))))
        .collect::<Result<_>>()?;
    if parts.len() != 4 {
        return Err(Error::Config("moves must be h:t:b:d".into()));
    }
    Ok([parts[0], parts[1], parts[2], parts[3]])
}

fn load_point_set(dir: &PathBuf) -> Result<PointSet> {
    let meta: PointSetMeta =
        serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json"))?)?;
    let csv = std::fs::read_to_string(dir.join("points.csv"))?;
    let mut pts = Vec::new();
    for (i, line) in csv.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let mut cells = line.split(',');
        let x: f64 = cells
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::Config(format!("bad csv row {i}")))?;
        let y: f64 = cells
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::Config(format!("bad csv row {i}")))?;
        pts.push((x, y));
    }
    PointSet::from_parts(meta, pts)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let truth: Truth = match &a.truth {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                None => Truth::kink(a.window),
            };
            let band = a.band.unwrap_or_else(|| default_band_monotone(a.n));
            let ps = PointSet::simulate_seeded(&truth, a.n, truth.window, band, a.seed)?;
            std::fs::create_dir_all(&a.out)?;
            let mut csv = Vec::new();
            ps.write_csv(&mut csv)?;
            std::fs::write(a.out.join("points.csv"), csv)?;
            std::fs::write(
                a.out.join("meta.json"),
                serde_json::to_string_pretty(&ps.meta())?,
            )?;
            println!("wrote {} points to {}", ps.len(), a.out.display());
            Ok(())
        }
        Command::Mle(a) => {
            let ps = load_point_set(&a.input)?;
            let result = match a.estimator.as_str() {
                "hist" => {
                    let grid_text = a
                        .grid
                        .ok_or_else(|| Error::Config("hist estimator needs --grid".into()))?;
                    let grid: Vec<f64> = grid_text
                        .split(',')
                        .map(|c| {
                            c.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Config(format!("bad grid node {c}")))
                        })
                        .collect::<Result<_>>()?;
                    histogram_mle(&ps, &grid)?
                }
                "mono" => monotone_mle(&ps)?,
                "kjump" => {
                    let k =
                        a.k.ok_or_else(|| Error::Config("kjump estimator needs --k".into()))?;
                    kjump_mle(&monotone_mle(&ps)?, k)?
                }
                _ => unreachable!("clap restricts the estimator values"),
            };
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(())
        }
        Command::Posterior(a) => {
            let ps = load_point_set(&a.input)?;
            let prior: CppPrior = match &a.prior {
                Some(p) => {
                    let spec: PriorSpec = serde_json::from_str(&std::fs::read_to_string(p)?)?;
                    match spec {
                        PriorSpec::Cpp(c) => c,
                        PriorSpec::Subordinator(s) => s.as_cpp_prior(),
                        PriorSpec::Hist(_) => {
                            return Err(Error::Config(
                                "posterior subcommand runs CPP/subordinator chains".into(),
                            ))
                        }
                    }
                }
                None => CppPrior::gamma21_exp(3.0),
            };
            let cfg = RjConfig {
                iters: a.iters,
                burnin: a.burnin,
                thin: a.thin,
                move_weights: parse_moves(&a.moves)?,
                ..Default::default()
            };
            std::fs::create_dir_all(&a.out)?;
            for chain_idx in 0..a.chains {
                let mut rng = stream_rng(a.seed, chain_idx as u64);
                let chain = rjmcmc(&ps, &prior, &cfg, &mut rng)?;
                let mut table = CsvTable::new(&["iter", "K", "theta01", "theta0T", "logpost"]);
                for i in 0..chain.draws.len() {
                    table.push_row(vec![
                        (chain.burnin + i * chain.thin).to_string(),
                        chain.k_trace[i].to_string(),
                        fmt_f64(chain.theta01[i]),
                        fmt_f64(chain.theta0t[i]),
                        fmt_f64(chain.log_post[i]),
                    ]);
                }
                table.write(&a.out.join(format!("chain_{chain_idx}.csv")))?;
                let archive: Vec<_> =
                    chain.draws.iter().step_by(a.archive_stride.max(1)).collect();
                std::fs::write(
                    a.out.join(format!("chain_{chain_idx}_draws.json")),
                    serde_json::to_string(&archive)?,
                )?;
                println!(
                    "chain {chain_idx}: {} retained draws, ESS(theta) = {:.1}, \
                     acceptance h/t/b/d = {:.2}/{:.2}/{:.2}/{:.2}",
                    chain.draws.len(),
                    chain.ess(boundary_lab::rjmcmc::ThetaKind::Integral0T),
                    chain.stats[0].rate(),
                    chain.stats[1].rate(),
                    chain.stats[2].rate(),
                    chain.stats[3].rate(),
                );
            }
            Ok(())
        }
        Command::Limit(a) => {
            let value = match a.oracle.as_str() {
                "coverage" => serde_json::json!({
                    "oracle": "coverage",
                    "k": a.k,
                    "alpha": a.alpha,
                    "coverage": boundary_lab::limitlaw::coverage_oracle_hist(a.k, a.alpha)?,
                }),
                "vjn-mean" => serde_json::json!({
                    "oracle": "vjn-mean",
                    "n": a.n,
                    "k": a.k,
                    "mean": boundary_lab::limitlaw::vjn_mean(a.n, a.k),
                    "second_moment": boundary_lab::limitlaw::vjn_second_moment(a.n, a.k),
                }),
                "thresholds" => {
                    let t = boundary_lab::limitlaw::misspec_thresholds(a.n, a.k);
                    serde_json::json!({
                        "oracle": "thresholds",
                        "n": a.n,
                        "k": a.k,
                        "rho": t.rho,
                        "bias_bound": t.bias_bound,
                    })
                }
                _ => unreachable!(),
            };
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(())
        }
        Command::Coverage(a) => run_experiment(a, ExpDispatch::Coverage),
        Command::NegativeLinear(a) => run_experiment(a, ExpDispatch::NegativeLinear),
        Command::CppLimit(a) => run_experiment(a, ExpDispatch::CppLimit),
        Command::NegativeKink(a) => run_experiment(a, ExpDispatch::NegativeKink),
        Command::Contract(a) => run_experiment(a, ExpDispatch::Contract),
        Command::Report(a) => {
            if a.schema {
                print!("{}", report::schema_text());
                return Ok(());
            }
            let dir = a
                .outdir
                .ok_or_else(|| Error::Config("report needs --outdir (or --schema)".into()))?;
            print!("{}", report::render_aggregates(&dir)?);
            if a.figure {
                let manifest: serde_json::Value =
                    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json"))?)?;
                let cfg: ExperimentConfig = serde_json::from_value(manifest["config"].clone())?;
                let svg = report::figure_for_config(&cfg)?;
                std::fs::write(dir.join("figure.svg"), svg)?;
                println!("wrote {}", dir.join("figure.svg").display());
            }
            Ok(())
        }
    }
}

enum ExpDispatch {
    Coverage,
    NegativeLinear,
    CppLimit,
    NegativeKink,
    Contract,
}

fn run_experiment(a: RunArgs, which: ExpDispatch) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.master_seed = seed;
    }
    if let Some(dir) = a.outdir {
        cfg.outdir = Some(dir);
    }
    let outdir = cfg
        .outdir
        .clone()
        .ok_or_else(|| Error::Config("config or --outdir must name an output directory".into()))?;
    std::fs::create_dir_all(&outdir)?;
    write_manifest(&outdir, &cfg, cfg.master_seed, cfg.replications)?;
    match which {
        ExpDispatch::Coverage => {
            let out = boundary_lab::exp::coverage_hist::run_coverage_hist(&cfg)?;
            out.replications.write(&outdir.join("replications.csv"))?;
            out.aggregate.write(&outdir.join("aggregate.csv"))?;
            std::fs::write(
                outdir.join("summary.json"),
                serde_json::to_string_pretty(&out.summary)?,
            )?;
        }
        ExpDispatch::NegativeLinear => {
            let out = boundary_lab::exp::negative_linear::run_negative_linear(&cfg)?;
            out.replications.write(&outdir.join("replications.csv"))?;
            out.aggregate.write(&outdir.join("aggregate.csv"))?;
            std::fs::write(
                outdir.join("summary.json"),
                serde_json::to_string_pretty(&out.summary)?,
            )?;
        }
        ExpDispatch::CppLimit => {
            let out = boundary_lab::exp::cpp_limit::run_cpp_limit(&cfg)?;
            out.replications.write(&outdir.join("replications.csv"))?;
            out.coverage.write(&outdir.join("coverage.csv"))?;
            out.aggregate.write(&outdir.join("aggregate.csv"))?;
            std::fs::write(
                outdir.join("summary.json"),
                serde_json::to_string_pretty(&out.summary)?,
            )?;
        }
        ExpDispatch::NegativeKink => {
            let out = boundary_lab::exp::negative_kink::run_negative_kink(&cfg)?;
            out.replications.write(&outdir.join("replications.csv"))?;
            out.aggregate.write(&outdir.join("aggregate.csv"))?;
            std::fs::write(
                outdir.join("summary.json"),
                serde_json::to_string_pretty(&out.summary)?,
            )?;
        }
        ExpDispatch::Contract => {
            let out = boundary_lab::exp::contraction::run_contraction(&cfg)?;
            out.replications.write(&outdir.join("replications.csv"))?;
            out.aggregate.write(&outdir.join("aggregate.csv"))?;
            std::fs::write(
                outdir.join("summary.json"),
                serde_json::to_string_pretty(&out.summary)?,
            )?;
        }
    }
    println!("experiment outputs written to {}", outdir.display());
    Ok(())
}
