//! Posterior contraction slopes across an intensity grid: posterior-mean L1
//! error against the truth, fitted on a log-log scale and compared to the
//! declared rate target.

use crate::error::{cfg_err, Result};
use crate::exp::config::{ExperimentConfig, PriorSpec, RateTarget};
use crate::exp::io::{fmt_f64, CsvTable};
use crate::exp::negative_kink::slope;
use crate::point_set::{default_band_monotone, PointSet};
use crate::prior::CppPrior;
use crate::rjmcmc::{rjmcmc, RjConfig};
use crate::rng::stream_rng;
use crate::stats::mean;
use crate::step_fn::StepFn;
use crate::truth::Truth;
use rayon::prelude::*;

/// Chain length grows with intensity as `(n/n_max)^0.55` (the posterior
/// dimension and its climb-in time grow with n); half of each chain is
/// discarded as burn-in.
const ITERS_EXPONENT: f64 = 0.55;

pub struct ContractionOutput {
    pub replications: CsvTable,
    pub aggregate: CsvTable,
    pub summary: serde_json::Value,
}

pub const REPLICATION_COLUMNS: [&str; 5] =
    ["n", "rep", "post_mean_l1", "mass_outside_2eps", "post_mean_k"];

/// Increasing staircase with `K` equispaced jumps summing to `r`; the
/// harder-growing-dimension truth for the piecewise-constant rate.
pub fn pc_truth(k: usize, r: f64, t_end: f64) -> Result<StepFn> {
    let height = r / (k as f64 + 1.0);
    let jumps: Vec<(f64, f64)> = (1..=k)
        .map(|j| (j as f64 / (k as f64 + 1.0), height))
        .collect();
    StepFn::from_jumps(t_end, height, &jumps)
}

fn rate_value(target: RateTarget, n: f64, k: usize) -> f64 {
    match target {
        RateTarget::SqrtLogNOverN => (n.ln() / n).sqrt(),
        RateTarget::Holder => (n.ln() / n).sqrt(),
        RateTarget::KnLogNOverN => k as f64 * n.ln() / n,
    }
}

pub fn run_contraction(cfg: &ExperimentConfig) -> Result<ContractionOutput> {
    cfg.validate()?;
    if cfg.n_grid.len() < 2 {
        return cfg_err("contraction slope needs an n-grid of length >= 2");
    }
    let t_end = if cfg.window > 1.0 { cfg.window } else { 1.5 };
    let target = cfg.rate_target.unwrap_or(RateTarget::SqrtLogNOverN);
    let base_prior = match &cfg.prior {
        Some(PriorSpec::Cpp(p)) => p.clone(),
        Some(PriorSpec::Subordinator(s)) => s.as_cpp_prior(),
        Some(PriorSpec::Hist(_)) => {
            return cfg_err("contraction experiment runs on CPP or subordinator priors")
        }
        None => CppPrior::gamma21_exp(3.0),
    };

    let jobs: Vec<(f64, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|n| (0..cfg.replications as u64).map(move |r| (*n, r)))
        .collect();
    let rows: Result<Vec<Vec<String>>> = jobs
        .par_iter()
        .map(|(n, rep)| {
            let n = *n;
            let k_n = cfg.k_rule.k_for(n);
            let truth = match &cfg.truth {
                Some(t) => t.clone(),
                None => match target {
                    RateTarget::KnLogNOverN => Truth::step(pc_truth(k_n, 2.0, t_end)?),
                    _ => Truth::kink(t_end),
                },
            };
            let mut rng = stream_rng(cfg.master_seed ^ (n as u64), *rep);
            let band = cfg.band.unwrap_or_else(|| default_band_monotone(n));
            let ps = PointSet::simulate(&truth, n, t_end, band, &mut rng)?;
            let n_max = *cfg.n_grid.last().unwrap();
            let iters = ((cfg.sampler.iters as f64 * (n / n_max).powf(ITERS_EXPONENT)) as usize)
                .max(cfg.sampler.iters / 16)
                .max(1000);
            let rj = RjConfig {
                iters,
                burnin: Some(cfg.sampler.burnin.unwrap_or(iters / 2)),
                thin: cfg.sampler.thin,
                move_weights: cfg.sampler.moves,
                height_scale: cfg.sampler.height_scale,
                time_window: cfg.sampler.time_window,
                ceiling: None,
                init: Default::default(),
            };
            let chain = rjmcmc(&ps, &base_prior, &rj, &mut rng)?;
            // L1 error of each retained draw against the truth, exactly
            let stride = (chain.draws.len() / 2000).max(1);
            let mut l1 = Vec::new();
            for d in chain.draws.iter().step_by(stride) {
                let f = d.to_step_fn(t_end)?;
                l1.push(truth.l1_dist(&f)?);
            }
            let eps = rate_value(target, n, k_n);
            let outside =
                l1.iter().filter(|e| **e > 2.0 * eps).count() as f64 / l1.len() as f64;
            let mean_k = mean(&chain.k_trace.iter().map(|k| *k as f64).collect::<Vec<_>>());
            Ok(vec![
                fmt_f64(n),
                rep.to_string(),
                fmt_f64(mean(&l1)),
                fmt_f64(outside),
                fmt_f64(mean_k),
            ])
        })
        .collect();
    let mut replications = CsvTable::new(&REPLICATION_COLUMNS);
    for row in rows? {
        replications.push_row(row);
    }

    let ns = replications.column("n").unwrap();
    let l1s = replications.column("post_mean_l1").unwrap();
    let mut aggregate = CsvTable::new(&["n", "k_n", "post_mean_l1", "rate_target"]);
    let mut log_n = Vec::new();
    let mut log_e = Vec::new();
    for n in &cfg.n_grid {
        let sel: Vec<f64> = ns
            .iter()
            .zip(&l1s)
            .filter(|(x, _)| **x == *n)
            .map(|(_, e)| *e)
            .collect();
        let m = mean(&sel);
        let k_n = cfg.k_rule.k_for(*n);
        aggregate.push_row(vec![
            fmt_f64(*n),
            k_n.to_string(),
            fmt_f64(m),
            fmt_f64(rate_value(target, *n, k_n)),
        ]);
        log_n.push(n.ln());
        log_e.push(m.ln());
    }
    let fitted = slope(&log_n, &log_e);

    let summary = serde_json::json!({
        "n_grid": cfg.n_grid,
        "slope": fitted,
        "rate_target": target,
        "lambda": base_prior.lambda,
    });
    Ok(ContractionOutput { replications, aggregate, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp::config::{ExperimentKind, KRule, SamplerConfig};

    #[test]
    fn single_n_grid_is_an_error() {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::Contract,
            truth: None,
            prior: None,
            n_grid: vec![500.0],
            k_rule: KRule::SqrtN,
            alpha: 0.05,
            replications: 1,
            master_seed: 1,
            window: 1.5,
            band: None,
            sampler: SamplerConfig { iters: 1000, ..Default::default() },
            coverage_replications: 0,
            ms_slack: 8.0,
            ms_r: 2.0,
            rate_target: None,
            outdir: None,
        };
        assert!(run_contraction(&cfg).is_err());
    }

    #[test]
    fn smoke_two_point_grid() {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::Contract,
            truth: None,
            prior: None,
            n_grid: vec![300.0, 900.0],
            k_rule: KRule::Power { exponent: 1.0 / 3.0 },
            alpha: 0.05,
            replications: 1,
            master_seed: 2,
            window: 1.5,
            band: None,
            sampler: SamplerConfig { iters: 4000, ..Default::default() },
            coverage_replications: 0,
            ms_slack: 8.0,
            ms_r: 2.0,
            rate_target: Some(RateTarget::SqrtLogNOverN),
            outdir: None,
        };
        let out = run_contraction(&cfg).unwrap();
        assert_eq!(out.aggregate.rows.len(), 2);
        let s = out.summary["slope"].as_f64().unwrap();
        assert!(s.is_finite());
    }
}
