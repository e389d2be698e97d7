//! Prior specifications, samplers and log-densities.
//!
//! Three families:
//!
//! - random histogram priors: fixed grid, i.i.d. level density `g`,
//! - compound Poisson process priors: `K ~ Poisson(λ)` jumps at sorted
//!   uniform locations in `[0, 1]`, start value `a_0 ~ H`, jump sizes
//!   `a_ℓ ~ G`, extended to `[0, T]` by constancy on `(1, T]`. The joint
//!   density on `(K, t, a)` with respect to counting × Lebesgue is
//!   `e^{-λ} λ^K h(a_0) Π_ℓ g(a_ℓ) 1(0 < t_1 < … < t_K < 1)`,
//! - Gamma-subordinator priors approximated by the compound Poisson process
//!   of their jumps above a truncation level `δ`: intensity `λ_δ = ∫_δ^∞ ν`
//!   and normalized jump law `ν·1(·≥δ)/λ_δ`. The expected small-jump mass
//!   `∫_0^δ x ν(x) dx` is reported, never silently added back.

use crate::error::{cfg_err, Error, Result};
use crate::numeric::exp_int_e1;
use crate::step_fn::StepFn;
use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist, Normal as NormalDist, Poisson};
use serde::{Deserialize, Serialize};

/// Scalar density specification for CPP start values and jump sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    /// Normalized Gamma-process Lévy density above the truncation level:
    /// `ν(x) = c·x^{-1}·e^{-beta·x}` restricted to `x ≥ delta`.
    GammaLevyTail { c: f64, beta: f64, delta: f64 },
}

impl DensitySpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DensitySpec::Uniform { lo, hi } => lo < hi,
            DensitySpec::Gaussian { sigma, .. } => *sigma > 0.0,
            DensitySpec::Exponential { rate } => *rate > 0.0,
            DensitySpec::Gamma { shape, rate } => *shape > 0.0 && *rate > 0.0,
            DensitySpec::GammaLevyTail { c, beta, delta } => {
                *c > 0.0 && *beta > 0.0 && *delta > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            cfg_err(format!("invalid density spec {self:?}"))
        }
    }

    /// Supported only on the nonnegative axis (monotone prior paths)?
    pub fn is_nonnegative(&self) -> bool {
        match self {
            DensitySpec::Uniform { lo, .. } => *lo >= 0.0,
            DensitySpec::Gaussian { .. } => false,
            DensitySpec::Exponential { .. } | DensitySpec::Gamma { .. } => true,
            DensitySpec::GammaLevyTail { .. } => true,
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            DensitySpec::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            DensitySpec::Gaussian { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
            DensitySpec::Exponential { rate } => {
                if x >= 0.0 {
                    rate.ln() - rate * x
                } else {
                    f64::NEG_INFINITY
                }
            }
            DensitySpec::Gamma { shape, rate } => {
                if x > 0.0 {
                    shape * rate.ln() - statrs::function::gamma::ln_gamma(*shape)
                        + (shape - 1.0) * x.ln()
                        - rate * x
                } else {
                    f64::NEG_INFINITY
                }
            }
            DensitySpec::GammaLevyTail { c, beta, delta } => {
                if x >= *delta {
                    let lambda = c * exp_int_e1(beta * delta);
                    c.ln() - x.ln() - beta * x - lambda.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            DensitySpec::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DensitySpec::Gaussian { mu, sigma } => {
                NormalDist::new(*mu, *sigma).unwrap().sample(rng)
            }
            DensitySpec::Exponential { rate } => {
                rand_distr::Exp::new(*rate).unwrap().sample(rng)
            }
            DensitySpec::Gamma { shape, rate } => {
                GammaDist::new(*shape, 1.0 / rate).unwrap().sample(rng)
            }
            DensitySpec::GammaLevyTail { c: _, beta, delta } => {
                sample_gamma_levy_tail(*beta, *delta, rng)
            }
        }
    }
}

/// Inverse-CDF draw from `ν(x) ∝ x^{-1} e^{-βx}` on `[δ, ∞)` by bisection on
/// `E1(βx) = (1-U)·E1(βδ)`.
fn sample_gamma_levy_tail<R: Rng>(beta: f64, delta: f64, rng: &mut R) -> f64 {
    let total = exp_int_e1(beta * delta);
    let target = total * (1.0 - rng.random::<f64>());
    let mut lo = delta;
    let mut hi = delta.max(1.0 / beta);
    while exp_int_e1(beta * hi) > target {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if exp_int_e1(beta * mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + hi) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Optional exponential-tail declaration `P(|Δ| ≥ s) ≤ L^{-1} e^{-L s^γ}`;
/// recorded for configuration audits, consumed by nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub gamma: f64,
    pub l: f64,
}

/// Compound Poisson process prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppPrior {
    pub lambda: f64,
    pub start: DensitySpec,
    pub jump: DensitySpec,
    /// When set, the start is Exp(1) and the jumps are Γ(2,1) regardless of
    /// the `start`/`jump` fields.
    #[serde(default)]
    pub gamma21_exp: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailBound>,
}

impl CppPrior {
    /// The natural monotone prior: `a_0 ~ Exp(1)`, `a_ℓ ~ Γ(2,1)`.
    pub fn gamma21_exp(lambda: f64) -> CppPrior {
        CppPrior {
            lambda,
            start: DensitySpec::Exponential { rate: 1.0 },
            jump: DensitySpec::Gamma { shape: 2.0, rate: 1.0 },
            gamma21_exp: true,
            tail: None,
        }
    }

    pub fn general(lambda: f64, start: DensitySpec, jump: DensitySpec) -> CppPrior {
        CppPrior { lambda, start, jump, gamma21_exp: false, tail: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return cfg_err("CPP intensity must be positive and finite");
        }
        self.start_density().validate()?;
        self.jump_density().validate()
    }

    pub fn start_density(&self) -> DensitySpec {
        if self.gamma21_exp {
            DensitySpec::Exponential { rate: 1.0 }
        } else {
            self.start.clone()
        }
    }

    pub fn jump_density(&self) -> DensitySpec {
        if self.gamma21_exp {
            DensitySpec::Gamma { shape: 2.0, rate: 1.0 }
        } else {
            self.jump.clone()
        }
    }

    /// Paths are monotone increasing iff both densities are nonnegative.
    pub fn is_monotone(&self) -> bool {
        self.start_density().is_nonnegative() && self.jump_density().is_nonnegative()
    }
}

/// One draw from a CPP prior: jump count, sorted jump times in `[0, 1]`, and
/// heights `a_0..a_K` (start value first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppDraw {
    pub times: Vec<f64>,
    pub heights: Vec<f64>,
}

impl CppDraw {
    pub fn k(&self) -> usize {
        self.times.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.heights.len() != self.times.len() + 1 {
            return cfg_err("CPP draw needs K jump times and K+1 heights");
        }
        if !self.times.windows(2).all(|w| w[0] <= w[1]) {
            return cfg_err("CPP draw times must be sorted");
        }
        if self.times.iter().any(|t| *t < 0.0 || *t > 1.0) {
            return cfg_err("CPP jump times must lie in [0, 1]");
        }
        Ok(())
    }

    /// `f = Σ_ℓ a_ℓ 1(· ≥ t_ℓ)` extended constantly to `[0, T]`.
    pub fn to_step_fn(&self, t_end: f64) -> Result<StepFn> {
        let jumps: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(self.heights.iter().skip(1))
            .map(|(t, a)| (*t, *a))
            .collect();
        StepFn::from_jumps(t_end, self.heights[0], &jumps)
    }

    /// `∫_0^upto f = Σ_ℓ a_ℓ (upto − t_ℓ)_+` with `t_0 = 0`.
    pub fn integral_to(&self, upto: f64) -> f64 {
        let mut acc = self.heights[0] * upto;
        for (t, a) in self.times.iter().zip(self.heights.iter().skip(1)) {
            if *t < upto {
                acc += a * (upto - t);
            }
        }
        acc
    }
}

/// Samples a CPP draw and its path on `[0, T]`.
pub fn sample_cpp<R: Rng>(prior: &CppPrior, t_end: f64, rng: &mut R) -> Result<(CppDraw, StepFn)> {
    prior.validate()?;
    if t_end < 1.0 {
        return cfg_err("CPP paths are defined on [0, T] with T >= 1");
    }
    let k = Poisson::new(prior.lambda)
        .map_err(|e| Error::Config(format!("poisson: {e}")))?
        .sample(rng) as usize;
    let mut times: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    times.sort_by(f64::total_cmp);
    let start = prior.start_density();
    let jump = prior.jump_density();
    let mut heights = Vec::with_capacity(k + 1);
    heights.push(start.sample(rng));
    for _ in 0..k {
        heights.push(jump.sample(rng));
    }
    let draw = CppDraw { times, heights };
    let path = draw.to_step_fn(t_end)?;
    Ok((draw, path))
}

/// Log of the joint prior density of a draw, `-∞` off the support (unordered
/// times, times outside `[0,1]`, or heights outside the jump law's support).
pub fn cpp_log_density(prior: &CppPrior, draw: &CppDraw) -> f64 {
    if draw.heights.len() != draw.times.len() + 1 {
        return f64::NEG_INFINITY;
    }
    if !draw.times.windows(2).all(|w| w[0] <= w[1]) {
        return f64::NEG_INFINITY;
    }
    if draw.times.iter().any(|t| *t < 0.0 || *t > 1.0) {
        return f64::NEG_INFINITY;
    }
    let k = draw.k() as f64;
    let start = prior.start_density();
    let jump = prior.jump_density();
    let mut lp = -prior.lambda + k * prior.lambda.ln() + start.log_pdf(draw.heights[0]);
    for a in &draw.heights[1..] {
        lp += jump.log_pdf(*a);
    }
    lp
}

/// Gamma-process Lévy density `ν(x) = c·x^{-1}·e^{-βx}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLevy {
    pub c: f64,
    pub beta: f64,
}

impl GammaLevy {
    /// Tail mass `∫_s^∞ ν = c·E1(βs)`.
    pub fn tail_mass(&self, s: f64) -> f64 {
        self.c * exp_int_e1(self.beta * s)
    }

    /// First moment of the tail `∫_s^∞ x ν(x) dx = (c/β) e^{-βs}`.
    pub fn tail_first_moment(&self, s: f64) -> f64 {
        self.c / self.beta * (-self.beta * s).exp()
    }

    /// Expected small-jump mass per unit time `∫_0^δ x ν(x) dx`.
    pub fn small_jump_mass(&self, delta: f64) -> f64 {
        self.c / self.beta * (1.0 - (-self.beta * delta).exp())
    }
}

/// Randomly initialized Gamma-subordinator prior with small-jump truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorPrior {
    pub levy: GammaLevy,
    pub delta: f64,
    pub start: DensitySpec,
}

/// Reported facts about the truncation used for a subordinator draw.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TruncationReport {
    /// CPP intensity of the retained jumps, `∫_δ^∞ ν`.
    pub lambda: f64,
    /// Dropped drift estimate `∫_0^δ x ν(x) dx` per unit time.
    pub small_jump_mass: f64,
}

impl SubordinatorPrior {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return cfg_err("subordinator truncation delta must be positive");
        }
        if !(self.levy.c > 0.0 && self.levy.beta > 0.0) {
            return cfg_err("Gamma Levy density needs c > 0 and beta > 0");
        }
        if !self.levy.tail_mass(self.delta).is_finite() {
            return cfg_err("truncated Levy mass must be finite");
        }
        self.start.validate()
    }

    /// The finite-activity CPP surrogate: jumps above `δ` exactly.
    pub fn as_cpp_prior(&self) -> CppPrior {
        CppPrior::general(
            self.levy.tail_mass(self.delta),
            self.start.clone(),
            DensitySpec::GammaLevyTail {
                c: self.levy.c,
                beta: self.levy.beta,
                delta: self.delta,
            },
        )
    }

    pub fn truncation_report(&self) -> TruncationReport {
        TruncationReport {
            lambda: self.levy.tail_mass(self.delta),
            small_jump_mass: self.levy.small_jump_mass(self.delta),
        }
    }
}

/// Samples the truncated-subordinator path on `[0, T]` and reports what the
/// truncation dropped.
pub fn sample_subordinator<R: Rng>(
    prior: &SubordinatorPrior,
    t_end: f64,
    rng: &mut R,
) -> Result<(StepFn, TruncationReport)> {
    prior.validate()?;
    let cpp = prior.as_cpp_prior();
    let (_, path) = sample_cpp(&cpp, t_end, rng)?;
    Ok((path, prior.truncation_report()))
}

/// Level density for random histogram priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HistDensity {
    /// Uniform on `[-r, r]`.
    Uniform { r: f64 },
    Gaussian { mu: f64, sigma: f64 },
    /// Piecewise-linear density table with a declared Hölder exponent and
    /// constant; validated numerically at construction.
    Table { xs: Vec<f64>, ps: Vec<f64>, beta: f64, holder_const: f64 },
}

/// Random histogram prior: fixed grid, i.i.d. levels with density `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistPrior {
    pub grid: Vec<f64>,
    pub g: HistDensity,
}

impl HistPrior {
    pub fn new(grid: Vec<f64>, g: HistDensity) -> Result<HistPrior> {
        let p = HistPrior { grid, g };
        p.validate()?;
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 2 || !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return cfg_err("histogram grid must be strictly increasing");
        }
        if self.grid[0] != 0.0 {
            return cfg_err("histogram grid must start at 0");
        }
        match &self.g {
            HistDensity::Uniform { r } => {
                if !(*r > 0.0) {
                    return cfg_err("uniform level density needs R > 0");
                }
            }
            HistDensity::Gaussian { sigma, .. } => {
                if !(*sigma > 0.0) {
                    return cfg_err("gaussian level density needs sigma > 0");
                }
            }
            HistDensity::Table { xs, ps, beta, holder_const } => {
                if xs.len() < 2 || xs.len() != ps.len() {
                    return cfg_err("table density needs matching xs/ps with >= 2 nodes");
                }
                if !xs.windows(2).all(|w| w[0] < w[1]) {
                    return cfg_err("table density xs must be strictly increasing");
                }
                if ps.iter().any(|p| *p < 0.0) {
                    return cfg_err("table density must be nonnegative");
                }
                if !(*beta > 0.0 && *beta <= 1.0) {
                    return cfg_err("declared Hölder exponent must lie in (0, 1]");
                }
                // trapezoid mass of the piecewise-linear table
                let mass: f64 = xs
                    .windows(2)
                    .zip(ps.windows(2))
                    .map(|(x, p)| 0.5 * (p[0] + p[1]) * (x[1] - x[0]))
                    .sum();
                if (mass - 1.0).abs() > 1e-8 {
                    return cfg_err(format!("table density mass {mass} is not 1 within 1e-8"));
                }
                // numerical Hölder check on node pairs
                for i in 0..xs.len() {
                    for j in (i + 1)..xs.len() {
                        let bound = holder_const * (xs[j] - xs[i]).powf(*beta);
                        if (ps[j] - ps[i]).abs() > bound + 1e-12 {
                            return cfg_err(format!(
                                "table density violates declared Hölder bound between \
                                 x={} and x={}",
                                xs[i], xs[j]
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Support interval of the level density (±∞ for Gaussian).
    pub fn support(&self) -> (f64, f64) {
        match &self.g {
            HistDensity::Uniform { r } => (-r, *r),
            HistDensity::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            HistDensity::Table { xs, .. } => (xs[0], *xs.last().unwrap()),
        }
    }

    pub fn log_g(&self, a: f64) -> f64 {
        match &self.g {
            HistDensity::Uniform { r } => {
                if a.abs() <= *r {
                    -(2.0 * r).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            HistDensity::Gaussian { mu, sigma } => {
                DensitySpec::Gaussian { mu: *mu, sigma: *sigma }.log_pdf(a)
            }
            HistDensity::Table { xs, ps, .. } => {
                if a < xs[0] || a > *xs.last().unwrap() {
                    return f64::NEG_INFINITY;
                }
                let i = xs.partition_point(|x| *x < a).clamp(1, xs.len() - 1);
                let w = (a - xs[i - 1]) / (xs[i] - xs[i - 1]);
                let p = ps[i - 1] + w * (ps[i] - ps[i - 1]);
                p.ln()
            }
        }
    }

    /// Supremum of the level density (for rejection envelopes).
    pub fn sup_g(&self) -> f64 {
        match &self.g {
            HistDensity::Uniform { r } => 1.0 / (2.0 * r),
            HistDensity::Gaussian { sigma, .. } => {
                1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            HistDensity::Table { ps, .. } => ps.iter().fold(0.0f64, |m, p| m.max(*p)),
        }
    }
}

/// `Σ_j log g(a_j)`, `-∞` outside the support.
pub fn hist_prior_log_density(prior: &HistPrior, levels: &[f64]) -> f64 {
    levels.iter().map(|a| prior.log_g(*a)).sum()
}


#[cfg(test)]
mod draw_tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn integrals_differ_by_tail_level_times_extension() {
        // ∫_0^T f − ∫_0^1 f = (T − 1) · (level after the last jump)
        let prior = CppPrior::gamma21_exp(3.0);
        let mut rng = stream_rng(55, 0);
        for _ in 0..500 {
            let (d, path) = sample_cpp(&prior, 1.5, &mut rng).unwrap();
            let last_level: f64 = d.heights.iter().sum();
            let gap = d.integral_to(1.5) - d.integral_to(1.0);
            assert!((gap - 0.5 * last_level).abs() < 1e-12);
            assert!((path.integral() - d.integral_to(1.5)).abs() < 1e-9);
        }
    }
}
