//! Closed-form oracles: exact finite-K coverage of the plug-in interval, the
//! misspecification overshoot law, and its thresholds.

use boundary_lab::limitlaw::{
    coverage_oracle_hist, misspec_thresholds, vjn_mean, vjn_sample, vjn_second_moment,
    vjn_survival,
};
use boundary_lab::rng::seed_rng;
use boundary_lab::stats::{mc_se, mean};

fn main() -> boundary_lab::Result<()> {
    println!("exact coverage of the plug-in 95% interval:");
    for k in [1usize, 5, 20, 100, 1000] {
        println!("  K = {k:>5}: {:.5}", coverage_oracle_hist(k, 0.05)?);
    }

    let (n, k) = (1e5, 317usize);
    println!("\novershoot law at n = {n:.0}, K = {k} (slope-one misspecification):");
    println!("  survival at 1:       {:.6}", vjn_survival(n, k, 1.0));
    println!("  mean (quadrature):   {:.6}", vjn_mean(n, k));
    println!("  second moment:       {:.6}", vjn_second_moment(n, k));
    let mut rng = seed_rng(8);
    let draws: Vec<f64> = (0..200_000).map(|_| vjn_sample(n, k, &mut rng)).collect();
    println!("  mean (sampler):      {:.6} +- {:.6}", mean(&draws), mc_se(&draws));
    let t = misspec_thresholds(n, k);
    println!("  rho_n = {:.4}, bias bound = {:.6}", t.rho, t.bias_bound);
    Ok(())
}
