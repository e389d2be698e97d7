//! The blockwise integral estimator and its Chebyshev confidence interval on
//! a Lipschitz (linear) boundary.

use boundary_lab::mle::{freq_ci, theta_block};
use boundary_lab::point_set::{default_band_monotone, PointSet};
use boundary_lab::rng::stream_rng;
use boundary_lab::truth::Truth;

fn main() -> boundary_lab::Result<()> {
    let n: f64 = 10_000.0;
    let k = n.sqrt().ceil() as usize;
    let truth = Truth::linear(1.0, 0.0, 1.0);
    let mut hits = 0usize;
    let reps = 200;
    let mut last = (0.0, (0.0, 0.0));
    for rep in 0..reps {
        let mut rng = stream_rng(11, rep);
        let ps = PointSet::simulate(&truth, n, 1.0, default_band_monotone(n), &mut rng)?;
        let tb = theta_block(&ps, k, n)?;
        let ci = freq_ci(tb, k, n, 0.05)?;
        if ci.0 <= 0.5 && 0.5 <= ci.1 {
            hits += 1;
        }
        last = (tb, ci);
    }
    println!("blockwise estimate (last replication): {:.6}", last.0);
    println!("C(0.05) interval:                      [{:.6}, {:.6}]", last.1 .0, last.1 .1);
    println!(
        "coverage of the true integral ((0.5)) over {reps} replications: {:.3}",
        hits as f64 / reps as f64
    );
    Ok(())
}
