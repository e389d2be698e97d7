//! Negative result for the kink boundary `(x + 1/2) ∧ 3/2`: the posterior
//! integral mass sits below the true value, and the posterior jump count
//! grows sub-`√n`.

use crate::error::{cfg_err, Result};
use crate::exp::config::{ExperimentConfig, PriorSpec};
use crate::exp::io::{fmt_f64, CsvTable};
use crate::point_set::{default_band_monotone, PointSet};
use crate::prior::CppPrior;
use crate::rjmcmc::{rjmcmc, RjConfig, ThetaKind};
use crate::rng::stream_rng;
use crate::stats::{mean, quantile_type7};
use crate::truth::{Truth, TruthKind};
use rayon::prelude::*;

pub struct NegativeKinkOutput {
    pub replications: CsvTable,
    pub aggregate: CsvTable,
    pub summary: serde_json::Value,
}

pub const REPLICATION_COLUMNS: [&str; 7] = [
    "n", "rep", "mass_below_theta0", "k_q99", "theta_q95", "ctilde_emp", "ess_theta",
];

/// Exact `∫_0^1 (x + 1/2) ∧ 3/2 dx`: the minimum binds only at x = 1, so the
/// integral is `∫_0^1 (x + 1/2) dx = 1`.
pub const KINK_THETA0: f64 = 1.0;

pub fn run_negative_kink(cfg: &ExperimentConfig) -> Result<NegativeKinkOutput> {
    cfg.validate()?;
    match &cfg.truth {
        None | Some(Truth { kind: TruthKind::Kink, .. }) => {}
        Some(_) => return cfg_err("negative-kink experiment requires the kink truth"),
    }
    let t_end = if cfg.window > 1.0 { cfg.window } else { 1.5 };
    let prior = match &cfg.prior {
        Some(PriorSpec::Cpp(p)) => p.clone(),
        Some(_) => return cfg_err("negative-kink experiment needs a CPP prior"),
        None => CppPrior::gamma21_exp(3.0),
    };
    if !prior.is_monotone() {
        return cfg_err("the kink truth is monotone; use a positive-jump prior");
    }
    let truth = Truth::kink(t_end);

    let jobs: Vec<(f64, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|n| (0..cfg.replications as u64).map(move |r| (*n, r)))
        .collect();
    let rows: Result<Vec<Vec<String>>> = jobs
        .par_iter()
        .map(|(n, rep)| {
            let n = *n;
            let mut rng = stream_rng(cfg.master_seed ^ (n as u64), *rep);
            let band = cfg.band.unwrap_or_else(|| default_band_monotone(n));
            let ps = PointSet::simulate(&truth, n, t_end, band, &mut rng)?;
            let rj = RjConfig {
                iters: cfg.sampler.iters,
                burnin: cfg.sampler.burnin,
                thin: cfg.sampler.thin,
                move_weights: cfg.sampler.moves,
                height_scale: cfg.sampler.height_scale,
                time_window: cfg.sampler.time_window,
                ceiling: None,
                init: Default::default(),
            };
            let chain = rjmcmc(&ps, &prior, &rj, &mut rng)?;
            let thetas = chain.functional(ThetaKind::Integral01);
            let below =
                thetas.iter().filter(|t| **t < KINK_THETA0).count() as f64 / thetas.len() as f64;
            let mut sorted = thetas.to_vec();
            sorted.sort_by(f64::total_cmp);
            let q95 = quantile_type7(&sorted, 0.95);
            // largest c̃ with 95% of posterior mass below θ0 − c̃·sqrt(log n / n)
            let ctilde = (KINK_THETA0 - q95) / (n.ln() / n).sqrt();
            let kq: Vec<f64> = {
                let mut v: Vec<f64> = chain.k_trace.iter().map(|k| *k as f64).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            Ok(vec![
                fmt_f64(n),
                rep.to_string(),
                fmt_f64(below),
                fmt_f64(quantile_type7(&kq, 0.99)),
                fmt_f64(q95),
                fmt_f64(ctilde),
                fmt_f64(chain.ess(ThetaKind::Integral01)),
            ])
        })
        .collect();
    let mut replications = CsvTable::new(&REPLICATION_COLUMNS);
    for row in rows? {
        replications.push_row(row);
    }

    // per-n aggregates and the log-log growth of the K 99th percentile
    let ns = replications.column("n").unwrap();
    let below = replications.column("mass_below_theta0").unwrap();
    let kq99 = replications.column("k_q99").unwrap();
    let ctilde = replications.column("ctilde_emp").unwrap();
    let mut aggregate = CsvTable::new(&["n", "mass_below_mean", "k_q99_mean", "ctilde_mean"]);
    let mut log_n = Vec::new();
    let mut log_k = Vec::new();
    for n in &cfg.n_grid {
        let sel: Vec<usize> = ns
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == *n)
            .map(|(i, _)| i)
            .collect();
        let pick = |xs: &[f64]| sel.iter().map(|i| xs[*i]).collect::<Vec<f64>>();
        let kmean = mean(&pick(&kq99));
        aggregate.push_row(vec![
            fmt_f64(*n),
            fmt_f64(mean(&pick(&below))),
            fmt_f64(kmean),
            fmt_f64(mean(&pick(&ctilde))),
        ]);
        log_n.push(n.ln());
        log_k.push(kmean.max(1e-9).ln());
    }
    let k_slope = if log_n.len() >= 2 { slope(&log_n, &log_k) } else { f64::NAN };

    let main_n = *cfg.n_grid.last().unwrap();
    let main_sel: Vec<f64> = ns
        .iter()
        .zip(&below)
        .filter(|(x, _)| **x == main_n)
        .map(|(_, b)| *b)
        .collect();
    let summary = serde_json::json!({
        "theta0_unit_interval": KINK_THETA0,
        "n_grid": cfg.n_grid,
        "mass_below_at_largest_n": mean(&main_sel),
        "k_q99_loglog_slope": k_slope,
        "lambda": prior.lambda,
    });
    Ok(NegativeKinkOutput { replications, aggregate, summary })
}

/// Least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}
