//! Desk-scale coverage audit for the histogram model: the empirical coverage
//! of the plug-in interval lands on the finite-K Gamma oracle, not on the
//! nominal level.

use boundary_lab::exp::config::{ExperimentConfig, ExperimentKind, KRule, SamplerConfig};
use boundary_lab::exp::coverage_hist::run_coverage_hist;

fn main() -> boundary_lab::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::Coverage,
        truth: None,
        prior: None,
        n_grid: vec![5000.0],
        k_rule: KRule::Fixed { k: 40 },
        alpha: 0.05,
        replications: 400,
        master_seed: 20,
        window: 1.0,
        band: None,
        sampler: SamplerConfig::default(),
        coverage_replications: 0,
        ms_slack: 8.0,
        ms_r: 2.0,
        rate_target: None,
        outdir: None,
    };
    let out = run_coverage_hist(&cfg)?;
    println!("aggregate (metric, value, mc_se, oracle):");
    for row in &out.aggregate.rows {
        println!("  {:?}", row);
    }
    println!("summary: {}", serde_json::to_string_pretty(&out.summary).unwrap());
    Ok(())
}
