//! The two negative results at desk scale: the misspecified-linear boundary
//! (credible interval centers off the truth as n grows) and the kink
//! boundary (posterior integral mass sits below the true value).

use boundary_lab::exp::config::{ExperimentConfig, ExperimentKind, KRule, SamplerConfig};
use boundary_lab::exp::negative_kink::run_negative_kink;
use boundary_lab::exp::negative_linear::run_negative_linear;

fn main() -> boundary_lab::Result<()> {
    let linear = ExperimentConfig {
        kind: ExperimentKind::NegativeLinear,
        truth: None,
        prior: None,
        n_grid: vec![20_000.0],
        k_rule: KRule::SqrtN,
        alpha: 0.05,
        replications: 300,
        master_seed: 6,
        window: 1.0,
        band: None,
        sampler: SamplerConfig::default(),
        coverage_replications: 10_000,
        ms_slack: 8.0,
        ms_r: 2.0,
        rate_target: None,
        outdir: None,
    };
    let out = run_negative_linear(&linear)?;
    println!("misspecified linear truth:");
    for row in &out.aggregate.rows {
        println!("  {:?}", row);
    }

    let kink = ExperimentConfig {
        kind: ExperimentKind::NegativeKink,
        truth: None,
        prior: None,
        n_grid: vec![1000.0, 10_000.0],
        k_rule: KRule::Fixed { k: 0 },
        alpha: 0.05,
        replications: 2,
        master_seed: 6,
        window: 1.5,
        band: None,
        sampler: SamplerConfig { iters: 50_000, ..Default::default() },
        coverage_replications: 0,
        ms_slack: 8.0,
        ms_r: 2.0,
        rate_target: None,
        outdir: None,
    };
    let out = run_negative_kink(&kink)?;
    println!("kink truth (n, mass below truth, K 99th pct, empirical c~):");
    for row in &out.aggregate.rows {
        println!("  {:?}", row);
    }
    Ok(())
}
