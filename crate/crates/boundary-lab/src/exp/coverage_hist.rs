//! Coverage audit for the histogram model: plug-in interval, exact-posterior
//! quantile interval, and the blockwise Chebyshev interval, against the
//! finite-K Gamma oracle.

use crate::error::{cfg_err, Result};
use crate::exp::config::{ExperimentConfig, PriorSpec};
use crate::exp::io::{fmt_f64, CsvTable};
use crate::limitlaw::{coverage_oracle_hist, gauss_hist_limit};
use crate::mle::{freq_ci, histogram_mle, theta_bc, theta_block};
use crate::point_set::{default_band_histogram, PointSet};
use crate::posterior::{credible_interval, ialpha, HistPosterior};
use crate::prior::{HistDensity, HistPrior};
use crate::rng::stream_rng;
use crate::stats::{ks_one_sample, mc_se, mean, variance};
use crate::step_fn::StepFn;
use crate::truth::Truth;
use rayon::prelude::*;

pub struct CoverageOutput {
    pub replications: CsvTable,
    pub aggregate: CsvTable,
    pub summary: serde_json::Value,
}

pub const REPLICATION_COLUMNS: [&str; 10] = [
    "rep", "theta0", "theta_mle", "theta_bc", "theta_block", "cover_ialpha",
    "cover_quantile", "cover_calpha", "ks_gauss", "ci_len_quantile",
];

/// Equispaced-grid truth with seed-derived levels in [0, 1]; the coverage
/// event is pivotal, so any level choice verifies the same law.
pub fn pcstar_truth(k: usize, seed: u64) -> StepFn {
    let grid: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
    let values: Vec<f64> = (0..k)
        .map(|j| {
            crate::rng::splitmix64(seed ^ (j as u64 + 0x5bd1)) as f64 / u64::MAX as f64
        })
        .collect();
    StepFn::new(grid, values).expect("equispaced grid is valid")
}

pub fn run_coverage_hist(cfg: &ExperimentConfig) -> Result<CoverageOutput> {
    cfg.validate()?;
    if cfg.n_grid.len() != 1 {
        return cfg_err("coverage experiment uses a single n");
    }
    let n = cfg.n_grid[0];
    let k = cfg.k_rule.k_for(n);
    let truth_fn = match &cfg.truth {
        Some(Truth { kind: crate::truth::TruthKind::Step { step }, .. }) => step.clone(),
        Some(_) => return cfg_err("coverage experiment needs a piecewise-constant truth"),
        None => pcstar_truth(k, cfg.master_seed),
    };
    let truth = Truth::step(truth_fn.clone());
    let theta0 = truth.integral_to(truth.window);
    let band = cfg.band.unwrap_or_else(|| default_band_histogram(n, k));
    let prior = match &cfg.prior {
        Some(PriorSpec::Hist(h)) => h.clone(),
        Some(_) => return cfg_err("coverage experiment needs a histogram prior"),
        None => HistPrior::new(
            (0..=k).map(|j| j as f64 / k as f64).collect(),
            HistDensity::Uniform { r: 1e6 },
        )?,
    };
    if prior.k() != k {
        return cfg_err("prior grid does not match the K rule");
    }
    let alpha = cfg.alpha;
    let theta_draws = ((100.0 / alpha).ceil() as usize).max(2000);

    let rows: Result<Vec<Vec<String>>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(cfg.master_seed, rep);
            let ps = PointSet::simulate(&truth, n, truth.window, band, &mut rng)?;
            let mle = histogram_mle(&ps, &prior.grid)?;
            let t_mle = mle.integral();
            let t_bc = theta_bc(&mle, n);
            let i_alpha = ialpha(t_mle, k, n, alpha)?;
            let post = HistPosterior::new(&ps, &prior)?;
            let thetas = post.sample_theta(theta_draws, &mut rng)?;
            let quant = credible_interval(&thetas, alpha)?;
            let t_block = theta_block(&ps, k, n)?;
            let (c_lo, c_hi) = freq_ci(t_block, k, n, alpha)?;
            let gauss = gauss_hist_limit(t_mle, k, n);
            let ks = ks_one_sample(&thetas, |x| gauss.cdf(x))?;
            Ok(vec![
                rep.to_string(),
                fmt_f64(theta0),
                fmt_f64(t_mle),
                fmt_f64(t_bc),
                fmt_f64(t_block),
                (i_alpha.contains(theta0) as u8).to_string(),
                (quant.contains(theta0) as u8).to_string(),
                ((c_lo <= theta0 && theta0 <= c_hi) as u8).to_string(),
                fmt_f64(ks),
                fmt_f64(quant.length()),
            ])
        })
        .collect();

    let mut replications = CsvTable::new(&REPLICATION_COLUMNS);
    for row in rows? {
        replications.push_row(row);
    }
    let aggregate = aggregate_coverage(&replications, k, n, alpha)?;
    let oracle = coverage_oracle_hist(k, alpha)?;
    let summary = serde_json::json!({
        "n": n,
        "k": k,
        "alpha": alpha,
        "band": band,
        "theta0": theta0,
        "coverage_oracle": oracle,
        "replications": cfg.replications,
    });
    Ok(CoverageOutput { replications, aggregate, summary })
}

/// Aggregates are recomputed from the replication table itself so the two
/// files can never disagree.
pub fn aggregate_coverage(
    replications: &CsvTable,
    k: usize,
    n: f64,
    alpha: f64,
) -> Result<CsvTable> {
    let col = |name: &str| {
        replications
            .column(name)
            .ok_or_else(|| crate::error::Error::Data(format!("missing column {name}")))
    };
    let mut out = CsvTable::new(&["metric", "value", "mc_se", "oracle"]);
    let oracle = coverage_oracle_hist(k, alpha)?;
    for (metric, oracle_val) in [
        ("cover_ialpha", Some(oracle)),
        ("cover_quantile", Some(oracle)),
        ("cover_calpha", None),
    ] {
        let xs = col(metric)?;
        let p = mean(&xs);
        let se = (p * (1.0 - p) / xs.len() as f64).sqrt();
        out.push_row(vec![
            metric.to_string(),
            fmt_f64(p),
            fmt_f64(se),
            oracle_val.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    let tb = col("theta_block")?;
    let t0 = col("theta0")?[0];
    out.push_row(vec![
        "theta_block_bias".into(),
        fmt_f64(mean(&tb) - t0),
        fmt_f64(mc_se(&tb)),
        "0".into(),
    ]);
    out.push_row(vec![
        "theta_block_var".into(),
        fmt_f64(variance(&tb)),
        "".into(),
        fmt_f64(2.0 / (k as f64 * n) + k as f64 / (n * n)),
    ]);
    let ks = col("ks_gauss")?;
    let mut sorted = ks.clone();
    sorted.sort_by(f64::total_cmp);
    out.push_row(vec![
        "ks_gauss_median".into(),
        fmt_f64(crate::stats::quantile_type7(&sorted, 0.5)),
        "".into(),
        "".into(),
    ]);
    Ok(out)
}
