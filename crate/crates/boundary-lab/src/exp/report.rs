//! Rendering of experiment outputs: aggregate tables to the terminal, the
//! documented column schemas, and the scatter figure (data, truth, MLE fit,
//! up to 50 posterior-draw overlays) regenerated deterministically from the
//! manifest.

use crate::error::{cfg_err, Result};
use crate::exp::config::{ExperimentConfig, ExperimentKind, PriorSpec};
use crate::exp::io::{render_figure, truth_polyline, FigureData};
use crate::mle::{histogram_mle, monotone_mle};
use crate::point_set::{default_band_histogram, default_band_monotone, PointSet};
use crate::posterior::HistPosterior;
use crate::prior::{CppPrior, HistDensity, HistPrior};
use crate::rjmcmc::{rjmcmc, RjConfig};
use crate::rng::stream_rng;
use crate::step_fn::StepFn;
use crate::truth::Truth;
use std::path::Path;

/// Documented column sets per experiment kind (`report --schema`).
pub fn schema_text() -> String {
    let mut out = String::new();
    out.push_str("schema v1 (all CSVs start with `# schema=v1`)\n\n");
    out.push_str("coverage/replications.csv:\n  ");
    out.push_str(&super::coverage_hist::REPLICATION_COLUMNS.join(", "));
    out.push_str("\n  cover_* are 0/1 indicators; ks_gauss is the one-sample KS of\n  posterior integral draws against the Gaussian functional limit.\n\n");
    out.push_str("negative-linear/replications.csv:\n  ");
    out.push_str(&super::negative_linear::REPLICATION_COLUMNS.join(", "));
    out.push_str("\n\ncpp-limit/replications.csv:\n  ");
    out.push_str(&super::cpp_limit::REPLICATION_COLUMNS.join(", "));
    out.push_str("\n\ncpp-limit/coverage.csv:\n  ");
    out.push_str(&super::cpp_limit::COVERAGE_COLUMNS.join(", "));
    out.push_str("\n\nnegative-kink/replications.csv:\n  ");
    out.push_str(&super::negative_kink::REPLICATION_COLUMNS.join(", "));
    out.push_str("\n\ncontract/replications.csv:\n  ");
    out.push_str(&super::contraction::REPLICATION_COLUMNS.join(", "));
    out.push_str("\n\nchain export (posterior subcommand):\n  iter, K, theta01, theta0T, logpost\n");
    out.push_str("\naggregate.csv files hold (metric, value, ...) rows recomputable from\nthe replication records.\n");
    out
}

/// Pretty-prints an aggregate CSV from an output directory.
pub fn render_aggregates(dir: &Path) -> Result<String> {
    let mut out = String::new();
    for name in ["aggregate.csv", "coverage.csv", "replications.csv"] {
        let path = dir.join(name);
        if !path.exists() {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        if name == "replications.csv" {
            let rows = text.lines().count().saturating_sub(2);
            out.push_str(&format!("{name}: {rows} replication rows\n"));
            continue;
        }
        out.push_str(&format!("== {name}\n"));
        for line in text.lines() {
            if line.starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            out.push_str(&format!("  {}\n", cells.join("\t")));
        }
    }
    if out.is_empty() {
        return cfg_err(format!("no report inputs found under {}", dir.display()));
    }
    Ok(out)
}

/// Regenerates the figure for replication 0 of a config: simulated data,
/// truth, MLE and up to 50 posterior draws.
pub fn figure_for_config(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let n = cfg.n_grid[0];
    let k = cfg.k_rule.k_for(n);
    let mut rng = stream_rng(cfg.master_seed, 0);
    match cfg.kind {
        ExperimentKind::Coverage | ExperimentKind::NegativeLinear => {
            let truth = match (&cfg.truth, cfg.kind) {
                (Some(t), _) => t.clone(),
                (None, ExperimentKind::NegativeLinear) => Truth::linear(1.0, 0.0, 1.0),
                (None, _) => Truth::step(super::coverage_hist::pcstar_truth(k, cfg.master_seed)),
            };
            let band = cfg.band.unwrap_or_else(|| default_band_histogram(n, k));
            let ps = PointSet::simulate(&truth, n, truth.window, band, &mut rng)?;
            let grid: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
            let mle = histogram_mle(&ps, &grid)?;
            let prior = match &cfg.prior {
                Some(PriorSpec::Hist(h)) => h.clone(),
                _ => HistPrior::new(grid.clone(), HistDensity::Uniform { r: 1e6 })?,
            };
            let post = HistPosterior::new(&ps, &prior)?;
            let mut draws = Vec::new();
            for _ in 0..50 {
                let levels = post.sample_levels(&mut rng)?;
                draws.push(StepFn::new(mle.fit.breaks().to_vec(), levels).unwrap_or_else(|_| {
                    StepFn::constant(truth.window, 0.0).unwrap()
                }));
            }
            Ok(render_figure(&FigureData {
                xs: ps.xs(),
                ys: ps.ys(),
                truth: truth_polyline(&truth),
                mle: Some(&mle.fit),
                posterior_draws: draws,
                window: truth.window,
            }))
        }
        ExperimentKind::CppLimit | ExperimentKind::NegativeKink | ExperimentKind::Contract => {
            let t_end = if cfg.window > 1.0 { cfg.window } else { 1.5 };
            let truth = match (&cfg.truth, cfg.kind) {
                (Some(t), _) => t.clone(),
                (None, ExperimentKind::NegativeKink) => Truth::kink(t_end),
                (None, ExperimentKind::Contract) => Truth::kink(t_end),
                (None, _) => Truth::step(crate::classes::make_ms_truth(
                    k, cfg.ms_r, n, t_end, cfg.ms_slack,
                )?),
            };
            let band = cfg.band.unwrap_or_else(|| default_band_monotone(n));
            let ps = PointSet::simulate(&truth, n, t_end, band, &mut rng)?;
            let stair = monotone_mle(&ps)?;
            let prior = match &cfg.prior {
                Some(PriorSpec::Cpp(p)) => p.clone(),
                Some(PriorSpec::Subordinator(s)) => s.as_cpp_prior(),
                _ => CppPrior::gamma21_exp(3.0),
            };
            let rj = RjConfig {
                iters: cfg.sampler.iters.min(20_000),
                ..Default::default()
            };
            let chain = rjmcmc(&ps, &prior, &rj, &mut rng)?;
            let stride = (chain.draws.len() / 50).max(1);
            let draws: Vec<StepFn> = chain
                .draws
                .iter()
                .step_by(stride)
                .take(50)
                .map(|d| d.to_step_fn(t_end))
                .collect::<Result<_>>()?;
            Ok(render_figure(&FigureData {
                xs: ps.xs(),
                ys: ps.ys(),
                truth: truth_polyline(&truth),
                mle: Some(&stair.fit),
                posterior_draws: draws,
                window: t_end,
            }))
        }
    }
}
