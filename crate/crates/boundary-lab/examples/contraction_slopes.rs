//! Posterior contraction slopes over an intensity grid (small desk run).

use boundary_lab::exp::config::{
    ExperimentConfig, ExperimentKind, KRule, RateTarget, SamplerConfig,
};
use boundary_lab::exp::contraction::run_contraction;

fn main() -> boundary_lab::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::Contract,
        truth: None,
        prior: None,
        n_grid: vec![1000.0, 10_000.0],
        k_rule: KRule::Power { exponent: 1.0 / 3.0 },
        alpha: 0.05,
        replications: 2,
        master_seed: 18,
        window: 1.5,
        band: None,
        sampler: SamplerConfig { iters: 40_000, ..Default::default() },
        coverage_replications: 0,
        ms_slack: 8.0,
        ms_r: 2.0,
        rate_target: Some(RateTarget::SqrtLogNOverN),
        outdir: None,
    };
    let out = run_contraction(&cfg)?;
    println!("aggregate (n, K_n, posterior-mean L1, rate target):");
    for row in &out.aggregate.rows {
        println!("  {:?}", row);
    }
    println!("fitted log-log slope: {:.3}", out.summary["slope"].as_f64().unwrap());
    Ok(())
}
