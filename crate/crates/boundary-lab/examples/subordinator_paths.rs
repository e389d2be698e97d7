//! Gamma-subordinator prior paths via the small-jump truncation, with the
//! dropped drift mass reported rather than silently added back.

use boundary_lab::prior::{sample_subordinator, DensitySpec, GammaLevy, SubordinatorPrior};
use boundary_lab::rng::seed_rng;

fn main() -> boundary_lab::Result<()> {
    let mut rng = seed_rng(5);
    for delta in [1e-2, 1e-3, 1e-4] {
        let prior = SubordinatorPrior {
            levy: GammaLevy { c: 1.0, beta: 1.0 },
            delta,
            start: DensitySpec::Exponential { rate: 1.0 },
        };
        let (path, report) = sample_subordinator(&prior, 1.5, &mut rng)?;
        println!(
            "delta = {delta:.0e}: retained intensity {:.3}, dropped small-jump mass {:.5}, \
             sampled path has {} jumps",
            report.lambda,
            report.small_jump_mass,
            path.jump_count()
        );
    }
    Ok(())
}
