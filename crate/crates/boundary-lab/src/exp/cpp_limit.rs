//! Positive CPP-limit experiment on strong-signal truths: posterior model
//! selection, agreement of the chain with the explicit limit law and its
//! Gaussian functional, and coverage of the limit-based credible interval.

use crate::classes::make_ms_truth;
use crate::error::{cfg_err, Result};
use crate::exp::config::{ExperimentConfig, PriorSpec};
use crate::exp::io::{fmt_f64, CsvTable};
use crate::limitlaw::{coverage_oracle_hist, gauss_cpp_limit, majorant, sample_limit_cpp};
use crate::mle::{kjump_mle, monotone_mle};
use crate::point_set::{default_band_monotone, PointSet};
use crate::prior::CppPrior;
use crate::rjmcmc::{rjmcmc, RjConfig, ThetaKind};
use crate::rng::stream_rng;
use crate::stats::{ks_one_sample, ks_two_sample, mean, quantile_type7};
use crate::truth::Truth;
use rayon::prelude::*;

pub struct CppLimitOutput {
    pub replications: CsvTable,
    pub coverage: CsvTable,
    pub aggregate: CsvTable,
    pub summary: serde_json::Value,
}

pub const REPLICATION_COLUMNS: [&str; 8] = [
    "rep", "post_mass_ktrue", "k_mode", "ks_chain_vs_limit", "ks_chain_vs_gauss",
    "ess_theta", "acc_height", "acc_birth",
];

pub const COVERAGE_COLUMNS: [&str; 4] =
    ["rep", "cover_gauss_ci", "majorant_eq_kjump", "theta0_minus_center"];

pub fn run_cpp_limit(cfg: &ExperimentConfig) -> Result<CppLimitOutput> {
    cfg.validate()?;
    if cfg.n_grid.len() != 1 {
        return cfg_err("cpp-limit experiment uses a single n");
    }
    let n = cfg.n_grid[0];
    let k_true = cfg.k_rule.k_for(n);
    let t_end = if cfg.window > 1.0 { cfg.window } else { 1.5 };
    let truth_fn = match &cfg.truth {
        Some(Truth { kind: crate::truth::TruthKind::Step { step }, .. }) => step.clone(),
        Some(_) => return cfg_err("cpp-limit experiment needs a step truth"),
        None => make_ms_truth(k_true, cfg.ms_r, n, t_end, cfg.ms_slack)?,
    };
    let truth = Truth::step(truth_fn.clone());
    let theta0 = truth.integral_to(t_end);
    let band = cfg.band.unwrap_or_else(|| default_band_monotone(n));
    let prior = match &cfg.prior {
        Some(PriorSpec::Cpp(p)) => p.clone(),
        Some(_) => return cfg_err("cpp-limit experiment needs a CPP prior"),
        None => CppPrior::gamma21_exp(3.0),
    };
    if !prior.is_monotone() {
        return cfg_err("cpp-limit experiment expects a monotone (positive-jump) prior");
    }
    let alpha = cfg.alpha;
    let limit_draws = 10_000usize;

    // chain part
    let rows: Result<Vec<Vec<String>>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(cfg.master_seed, rep);
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
            let kdist = chain.k_distribution();
            let mass_true = kdist
                .iter()
                .find(|(k, _, _)| *k == k_true)
                .map(|(_, p, _)| *p)
                .unwrap_or(0.0);
            let k_mode = kdist
                .iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(k, _, _)| *k)
                .unwrap_or(0);
            let m = majorant(&ps, &truth_fn)?;
            let limit_thetas: Vec<f64> = (0..limit_draws)
                .map(|_| sample_limit_cpp(&m, n, &mut rng).map(|d| d.theta()))
                .collect::<Result<_>>()?;
            let chain_thetas = chain.functional(ThetaKind::Integral0T);
            let ks_limit = ks_two_sample(chain_thetas, &limit_thetas)?;
            let gauss = gauss_cpp_limit(m.majorant.integral(), k_true, n);
            let ks_gauss = ks_one_sample(chain_thetas, |x| gauss.cdf(x))?;
            Ok(vec![
                rep.to_string(),
                fmt_f64(mass_true),
                k_mode.to_string(),
                fmt_f64(ks_limit),
                fmt_f64(ks_gauss),
                fmt_f64(chain.ess(ThetaKind::Integral0T)),
                fmt_f64(chain.stats[0].rate()),
                fmt_f64(chain.stats[2].rate()),
            ])
        })
        .collect();
    let mut replications = CsvTable::new(&REPLICATION_COLUMNS);
    for row in rows? {
        replications.push_row(row);
    }

    // cheap coverage part: no MCMC, the credible interval comes from the
    // Gaussian limit with the K-jump MLE plugged in for the majorant
    let cov_reps = if cfg.coverage_replications > 0 {
        cfg.coverage_replications
    } else {
        cfg.replications
    };
    let cov_rows: Result<Vec<Vec<String>>> = (0..cov_reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(cfg.master_seed ^ 0x600d_c0de, rep);
            let ps = PointSet::simulate(&truth, n, t_end, band, &mut rng)?;
            let stair = monotone_mle(&ps)?;
            let kfit = kjump_mle(&stair, k_true)?;
            let m = majorant(&ps, &truth_fn)?;
            let agree = m.majorant == kfit.fit;
            let gauss = gauss_cpp_limit(kfit.fit.integral(), k_true, n);
            let z = crate::numeric::normal_quantile(1.0 - alpha / 2.0);
            let (lo, hi) = (gauss.mean - z * gauss.sd(), gauss.mean + z * gauss.sd());
            Ok(vec![
                rep.to_string(),
                ((lo <= theta0 && theta0 <= hi) as u8).to_string(),
                (agree as u8).to_string(),
                fmt_f64(theta0 - gauss.mean),
            ])
        })
        .collect();
    let mut coverage = CsvTable::new(&COVERAGE_COLUMNS);
    for row in cov_rows? {
        coverage.push_row(row);
    }

    let mass = replications.column("post_mass_ktrue").unwrap();
    let ks_lim = {
        let mut v = replications.column("ks_chain_vs_limit").unwrap();
        v.sort_by(f64::total_cmp);
        v
    };
    let ks_gauss = {
        let mut v = replications.column("ks_chain_vs_gauss").unwrap();
        v.sort_by(f64::total_cmp);
        v
    };
    let cover = mean(&coverage.column("cover_gauss_ci").unwrap());
    let agree = mean(&coverage.column("majorant_eq_kjump").unwrap());
    let gamma_analogue = coverage_oracle_hist(2 * k_true + 1, alpha)?;

    let mut aggregate = CsvTable::new(&["metric", "value", "oracle"]);
    aggregate.push_row(vec![
        "post_mass_ktrue_mean".into(),
        fmt_f64(mean(&mass)),
        "".into(),
    ]);
    aggregate.push_row(vec![
        "ks_chain_vs_limit_median".into(),
        fmt_f64(quantile_type7(&ks_lim, 0.5)),
        "".into(),
    ]);
    aggregate.push_row(vec![
        "ks_chain_vs_gauss_median".into(),
        fmt_f64(quantile_type7(&ks_gauss, 0.5)),
        "".into(),
    ]);
    aggregate.push_row(vec![
        "cover_gauss_ci".into(),
        fmt_f64(cover),
        fmt_f64(gamma_analogue),
    ]);
    aggregate.push_row(vec!["majorant_eq_kjump_rate".into(), fmt_f64(agree), "".into()]);

    let summary = serde_json::json!({
        "n": n,
        "k_true": k_true,
        "alpha": alpha,
        "band": band,
        "window": t_end,
        "theta0": theta0,
        "lambda": prior.lambda,
        "ms_slack": cfg.ms_slack,
        "post_mass_ktrue_mean": mean(&mass),
        "ks_chain_vs_limit_median": quantile_type7(&ks_lim, 0.5),
        "ks_chain_vs_gauss_median": quantile_type7(&ks_gauss, 0.5),
        "cover_gauss_ci": cover,
        "gamma_analogue_2k1": gamma_analogue,
        "majorant_eq_kjump_rate": agree,
    });
    Ok(CppLimitOutput { replications, coverage, aggregate, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp::config::{ExperimentKind, KRule, SamplerConfig};

    #[test]
    fn smoke_config_completes() {
        // n = 1e3, K = 1, R = 3 prior bound scale: feasible at slack 1
        let cfg = ExperimentConfig {
            kind: ExperimentKind::CppLimit,
            truth: None,
            prior: Some(PriorSpec::Cpp(CppPrior::gamma21_exp(3.0))),
            n_grid: vec![1000.0],
            k_rule: KRule::Fixed { k: 1 },
            alpha: 0.05,
            replications: 2,
            master_seed: 5,
            window: 1.5,
            band: None,
            sampler: SamplerConfig { iters: 4000, ..Default::default() },
            coverage_replications: 50,
            ms_slack: 1.0,
            ms_r: 3.0,
            rate_target: None,
            outdir: None,
        };
        let out = run_cpp_limit(&cfg).unwrap();
        assert_eq!(out.replications.rows.len(), 2);
        assert_eq!(out.coverage.rows.len(), 50);
        let mass = mean(&out.replications.column("post_mass_ktrue").unwrap());
        assert!(mass > 0.2, "posterior mass on true K during smoke: {mass}");
    }
}

/// Pinned-jump equivalence check: with birth/death/time moves disabled and
/// the single jump pinned on a histogram grid node, the chain's level
/// marginals must match the exact per-bin histogram posterior. Both sides
/// use effectively flat priors on the levels. Returns the per-level KS
/// statistics.
pub fn pinned_equivalence_ks(n: f64, iters: usize, seed: u64) -> Result<(f64, f64)> {
    use crate::posterior::HistPosterior;
    use crate::prior::{CppDraw, DensitySpec, HistDensity, HistPrior};
    use crate::rjmcmc::InitStrategy;

    let t_end = 1.5;
    let pin = 0.5;
    let truth_fn = crate::step_fn::StepFn::from_jumps(t_end, 1.0, &[(pin, 1.0)])?;
    let truth = Truth::step(truth_fn);
    let mut rng = stream_rng(seed, 0);
    let ps = PointSet::simulate(&truth, n, t_end, 1.5, &mut rng)?;

    // exact side: independent tilted-truncated bins on the same grid
    let hist = HistPrior::new(vec![0.0, pin, t_end], HistDensity::Uniform { r: 1e6 })?;
    let post = HistPosterior::new(&ps, &hist)?;
    let draws = iters;
    let mut exact0 = Vec::with_capacity(draws);
    let mut exact1 = Vec::with_capacity(draws);
    for _ in 0..draws {
        exact0.push(post.sample_coord_exact(0, &mut rng)?);
        exact1.push(post.sample_coord_exact(1, &mut rng)?);
    }

    // chain side: flat positive CPP prior, jump pinned at the grid node
    let flat = CppPrior::general(
        1.0,
        DensitySpec::Uniform { lo: 0.0, hi: 50.0 },
        DensitySpec::Uniform { lo: 0.0, hi: 50.0 },
    );
    let caps = post.caps();
    let init = CppDraw {
        times: vec![pin],
        heights: vec![0.9 * caps[0], 0.9 * caps[1] - 0.9 * caps[0]],
    };
    let rj = RjConfig {
        iters: iters * 2 + iters / 5,
        burnin: Some(iters / 5),
        thin: Some(2),
        move_weights: [1.0, 0.0, 0.0, 0.0],
        height_scale: 0.5,
        time_window: None,
        ceiling: None,
        init: InitStrategy::Fixed(init),
    };
    let chain = rjmcmc(&ps, &flat, &rj, &mut rng)?;
    let level0: Vec<f64> = chain.draws.iter().map(|d| d.heights[0]).collect();
    let level1: Vec<f64> = chain.draws.iter().map(|d| d.heights[0] + d.heights[1]).collect();
    Ok((
        ks_two_sample(&level0, &exact0)?,
        ks_two_sample(&level1, &exact1)?,
    ))
}
