//! The K-jump estimator: keep the K staircase jumps that maximize the fitted
//! integral, checked against exhaustive subset search.

use boundary_lab::mle::{kjump_brute_force, kjump_mle, monotone_mle};
use boundary_lab::point_set::PointSet;
use boundary_lab::rng::seed_rng;
use boundary_lab::step_fn::StepFn;
use boundary_lab::truth::Truth;

fn main() -> boundary_lab::Result<()> {
    let truth_fn = StepFn::from_jumps(1.5, 0.5, &[(0.3, 0.7), (0.7, 0.9)])?;
    let truth = Truth::step(truth_fn);
    let mut rng = seed_rng(2);
    let ps = PointSet::simulate(&truth, 800.0, 1.5, 1.0, &mut rng)?;
    let stair = monotone_mle(&ps)?;
    println!("staircase has M = {} jumps, integral {:.4}", stair.model_dim, stair.integral());
    for k in 0..=4 {
        let dp = kjump_mle(&stair, k)?;
        let bf = kjump_brute_force(&stair, k)?;
        assert_eq!(dp.fit, bf.fit, "dynamic program must match exhaustive search");
        println!(
            "K = {k}: integral {:.4}, jumps at {:?}",
            dp.integral(),
            dp.fit.jump_times().iter().map(|t| (t * 1e3).round() / 1e3).collect::<Vec<_>>()
        );
    }
    Ok(())
}
