//! Exact posterior sampling for a random histogram prior, with the plug-in
//! credible interval and its finite-K coverage oracle.

use boundary_lab::limitlaw::{coverage_oracle_hist, gauss_hist_limit};
use boundary_lab::mle::histogram_mle;
use boundary_lab::point_set::{default_band_histogram, PointSet};
use boundary_lab::posterior::{credible_interval, ialpha, HistPosterior};
use boundary_lab::prior::{HistDensity, HistPrior};
use boundary_lab::rng::seed_rng;
use boundary_lab::step_fn::StepFn;
use boundary_lab::truth::Truth;

fn main() -> boundary_lab::Result<()> {
    let (n, k, alpha) = (10_000.0, 25usize, 0.05);
    let grid: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
    let values: Vec<f64> = (0..k).map(|j| 0.5 + 0.4 * (j as f64 * 0.9).sin()).collect();
    let truth = Truth::step(StepFn::new(grid.clone(), values)?);
    let theta0 = truth.integral_to(1.0);

    let mut rng = seed_rng(3);
    let ps = PointSet::simulate(&truth, n, 1.0, default_band_histogram(n, k), &mut rng)?;
    let mle = histogram_mle(&ps, &grid)?;
    let prior = HistPrior::new(grid, HistDensity::Uniform { r: 1e6 })?;
    let post = HistPosterior::new(&ps, &prior)?;

    let thetas = post.sample_theta(20_000, &mut rng)?;
    let quant = credible_interval(&thetas, alpha)?;
    let plug = ialpha(mle.integral(), k, n, alpha)?;
    let gauss = gauss_hist_limit(mle.integral(), k, n);
    println!("true integral                  {theta0:.6}");
    println!("MLE integral                   {:.6}", mle.integral());
    println!("quantile credible interval     [{:.6}, {:.6}]", quant.lower, quant.upper);
    println!("plug-in interval               [{:.6}, {:.6}]", plug.lower, plug.upper);
    println!("Gaussian functional limit      N({:.6}, {:.2e})", gauss.mean, gauss.var);
    println!(
        "finite-K coverage oracle       {:.4} (vs nominal {:.2})",
        coverage_oracle_hist(k, alpha)?,
        1.0 - alpha
    );
    Ok(())
}
