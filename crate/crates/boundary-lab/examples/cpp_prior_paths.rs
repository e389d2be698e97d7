//! Draw compound-Poisson prior paths and evaluate their joint density.

use boundary_lab::prior::{cpp_log_density, sample_cpp, CppPrior};
use boundary_lab::rng::seed_rng;

fn main() -> boundary_lab::Result<()> {
    let prior = CppPrior::gamma21_exp(3.0);
    let mut rng = seed_rng(1);
    for i in 0..5 {
        let (draw, path) = sample_cpp(&prior, 1.5, &mut rng)?;
        println!(
            "draw {i}: K = {}, log prior density = {:+.3}, integral = {:.3}",
            draw.k(),
            cpp_log_density(&prior, &draw),
            path.integral()
        );
        println!("  jump times   {:?}", draw.times.iter().map(|t| (t * 1e3).round() / 1e3).collect::<Vec<_>>());
        println!("  jump heights {:?}", draw.heights.iter().map(|a| (a * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    Ok(())
}
