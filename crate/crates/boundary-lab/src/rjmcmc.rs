//! Reversible-jump Metropolis–Hastings over compound-Poisson paths.
//!
//! Target density on `(K, t, a)` with respect to counting × Lebesgue:
//!
//! ```text
//! π̃(K, t, a) ∝ exp(n·Σ_k a_k (T − t_k)) · 1(∀i: f(X_i) ≤ Y_i)
//!              · λ^K h(a_0) Π_ℓ g(a_ℓ) · 1(0 ≤ t_1 ≤ … ≤ t_K ≤ 1)
//! ```
//!
//! Four move types:
//!
//! - (H) single-height multiplicative random walk `a_k ← a_k e^{σ_k ξ}`,
//!   where the per-coordinate scale `σ_k` shrinks with the conditional
//!   posterior width `1/(n (T − t_k) a_k)` (state-dependent proposal with
//!   the exact Hastings correction),
//! - (T) single-jump-time uniform window move, window `∝ 1/(n a_k)`,
//! - (B) birth: insert a jump at `u ~ U[0,1]`, splitting the height of the
//!   jump whose piece covers `u` by a uniform fraction `β` (the path is
//!   unchanged right of `u` and drops on `[t_j, u)`),
//! - (D) death: merge a uniformly chosen jump into its left neighbor, the
//!   exact inverse of birth.
//!
//! The birth Jacobian of `(a_j, u, β) ↦ (βa_j, (1−β)a_j, t_new)` is `a_j`.
//! Data-constraint checks touch only the pieces a move can raise, one
//! range-minimum query per piece. An optional ceiling step function joins
//! the constraint for priors whose paths are not monotone, where simulated
//! data above the band cannot veto spikes.

use crate::error::{cfg_err, Error, Result};
use crate::mle::monotone_mle;
use crate::point_set::PointSet;
use crate::prior::{CppDraw, CppPrior, DensitySpec};
use crate::step_fn::StepFn;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Coarse log-scale of the height-move mixture component.
const H_COARSE_SCALE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Height,
    Time,
    Birth,
    Death,
}

/// A fully specified proposal; `apply` is deterministic given the move.
#[derive(Debug, Clone)]
pub enum Move {
    Height { k: usize, factor: f64 },
    Time { k: usize, to: f64 },
    Birth { u: f64, beta: f64 },
    Death { ell: usize },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::Height { .. } => MoveKind::Height,
            Move::Time { .. } => MoveKind::Time,
            Move::Birth { .. } => MoveKind::Birth,
            Move::Death { .. } => MoveKind::Death,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RjConfig {
    pub iters: usize,
    /// Burn-in iteration count; default one fifth of `iters`.
    pub burnin: Option<usize>,
    /// Thinning stride; default keeps at least 10^4 retained draws.
    pub thin: Option<usize>,
    /// Move weights (H, T, B, D); birth and death must be both zero or both
    /// positive.
    pub move_weights: [f64; 4],
    /// Initial multiplicative height-step scale; adapted during burn-in to a
    /// 25–45% acceptance rate, then frozen.
    pub height_scale: f64,
    /// Time-move window base: the per-jump window is `base/(n·a_k)` clamped
    /// to `[1e-6, 0.2]`. `None` picks 3.
    pub time_window: Option<f64>,
    /// Ceiling constraint for non-monotone priors (band top in experiments).
    pub ceiling: Option<StepFn>,
    pub init: InitStrategy,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Start at the K-jump fit maximizing a Laplace-corrected posterior
    /// score, `log π̃(fit_K) − 2K·log n` (each jump carries a time and a
    /// height whose posterior widths scale like 1/n). Starting at the
    /// posterior's own model dimension skips the long descent from the full
    /// staircase, whose surplus jumps die only through rare slide-and-merge
    /// excursions.
    #[default]
    ModeKJump,
    /// Start at the full monotone staircase MLE.
    Staircase,
    /// Draw from the prior until the data constraint holds.
    PriorFeasible,
    Fixed(CppDraw),
}

impl Default for RjConfig {
    fn default() -> Self {
        RjConfig {
            iters: 100_000,
            burnin: None,
            thin: None,
            move_weights: [0.4, 0.3, 0.15, 0.15],
            height_scale: 0.5,
            time_window: None,
            ceiling: None,
            init: InitStrategy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct MoveStats {
    pub attempts: u64,
    pub accepts: u64,
}

impl MoveStats {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            f64::NAN
        } else {
            self.accepts as f64 / self.attempts as f64
        }
    }
}

/// A finalized chain: retained draws with functionals and diagnostics.
#[derive(Debug, Clone)]
pub struct Chain {
    pub draws: Vec<CppDraw>,
    pub k_trace: Vec<usize>,
    pub theta01: Vec<f64>,
    pub theta0t: Vec<f64>,
    pub log_post: Vec<f64>,
    pub stats: [MoveStats; 4],
    pub iters: usize,
    pub burnin: usize,
    pub thin: usize,
    pub height_scale_final: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaKind {
    Integral01,
    Integral0T,
}

impl Chain {
    /// Retained functional samples.
    pub fn functional(&self, which: ThetaKind) -> &[f64] {
        match which {
            ThetaKind::Integral01 => &self.theta01,
            ThetaKind::Integral0T => &self.theta0t,
        }
    }

    /// Empirical pmf of the jump count with autocorrelation-adjusted
    /// standard errors.
    pub fn k_distribution(&self) -> Vec<(usize, f64, f64)> {
        let n = self.k_trace.len() as f64;
        let kf: Vec<f64> = self.k_trace.iter().map(|k| *k as f64).collect();
        let ess = crate::stats::effective_sample_size(&kf).max(1.0);
        let max_k = self.k_trace.iter().copied().max().unwrap_or(0);
        (0..=max_k)
            .map(|k| {
                let p = self.k_trace.iter().filter(|x| **x == k).count() as f64 / n;
                (k, p, (p * (1.0 - p) / ess).sqrt())
            })
            .collect()
    }

    /// Effective sample size of a functional trace.
    pub fn ess(&self, which: ThetaKind) -> f64 {
        crate::stats::effective_sample_size(self.functional(which))
    }

    /// Re-validates the data constraint on every `stride`-th retained draw.
    pub fn validate_constraints(&self, ps: &PointSet, stride: usize) -> Result<()> {
        for (i, d) in self.draws.iter().enumerate().step_by(stride.max(1)) {
            let f = d.to_step_fn(self.t_end)?;
            if !ps.dominates(&f) {
                return Err(Error::Data(format!("retained draw {i} violates the data constraint")));
            }
            if !self.log_post[i].is_finite() {
                return Err(Error::Data(format!("retained draw {i} has non-finite log posterior")));
            }
        }
        Ok(())
    }
}

/// Effective target context shared by the sampler and the ratio probes.
pub struct RjContext<'a> {
    ps: &'a PointSet,
    pub lambda: f64,
    pub start: DensitySpec,
    pub jump: DensitySpec,
    pub t_end: f64,
    pub n: f64,
    ceiling: Option<StepFn>,
}

impl<'a> RjContext<'a> {
    pub fn new(ps: &'a PointSet, prior: &CppPrior, ceiling: Option<StepFn>) -> Result<Self> {
        prior.validate()?;
        if let Some(c) = &ceiling {
            if c.domain_end() != ps.window {
                return cfg_err("ceiling window does not match the data");
            }
        }
        Ok(RjContext {
            ps,
            lambda: prior.lambda,
            start: prior.start_density(),
            jump: prior.jump_density(),
            t_end: ps.window,
            n: ps.intensity,
            ceiling,
        })
    }

    fn levels(&self, d: &CppDraw) -> Vec<f64> {
        let mut acc = 0.0;
        d.heights
            .iter()
            .map(|a| {
                acc += a;
                acc
            })
            .collect()
    }

    /// Constraint over the left-open span `(lo, hi]` at `level`; pieces are
    /// left-open, matching the step-function convention, so a jump sitting
    /// exactly on its binding observation is constrained only by points
    /// strictly to the right.
    fn span_ok(&self, lo: f64, hi: f64, level: f64, to_end: bool) -> bool {
        let data_min = if to_end {
            self.ps.min_y_open_to_end_or_inf(lo)
        } else {
            self.ps.min_y_open_or_inf(lo, hi)
        };
        if level > data_min {
            return false;
        }
        if let Some(c) = &self.ceiling {
            if level > c.min_on(lo.max(0.0), hi) + 1e-12 {
                return false;
            }
        }
        true
    }

    fn constraint_ok(&self, d: &CppDraw) -> bool {
        let levels = self.levels(d);
        (0..=d.k()).all(|k| {
            let lo = if k == 0 { -1.0 } else { d.times[k - 1] };
            let hi = if k == d.k() { self.t_end } else { d.times[k] };
            self.span_ok(lo, hi, levels[k], k == d.k())
        })
    }

    /// Full unnormalized log posterior; `-∞` off the support.
    pub fn log_post(&self, d: &CppDraw) -> f64 {
        if d.heights.len() != d.times.len() + 1
            || !d.times.windows(2).all(|w| w[0] <= w[1])
            || d.times.iter().any(|t| *t < 0.0 || *t > 1.0)
        {
            return f64::NEG_INFINITY;
        }
        let mut lp = d.k() as f64 * self.lambda.ln() + self.start.log_pdf(d.heights[0]);
        for a in &d.heights[1..] {
            lp += self.jump.log_pdf(*a);
        }
        if !lp.is_finite() {
            return f64::NEG_INFINITY;
        }
        lp += self.n * d.heights[0] * self.t_end;
        for (t, a) in d.times.iter().zip(&d.heights[1..]) {
            lp += self.n * a * (self.t_end - t);
        }
        if !self.constraint_ok(d) {
            return f64::NEG_INFINITY;
        }
        lp
    }

    /// Applies a move; `None` when the proposal leaves the support
    /// (ordering violated, heights off-support handled via the ratio).
    pub fn apply(&self, d: &CppDraw, mv: &Move) -> Option<CppDraw> {
        match mv {
            Move::Height { k, factor } => {
                if *k >= d.heights.len() || *factor <= 0.0 {
                    return None;
                }
                let mut out = d.clone();
                out.heights[*k] *= factor;
                Some(out)
            }
            Move::Time { k, to } => {
                if *k == 0 || *k > d.k() {
                    return None;
                }
                let lo = if *k == 1 { 0.0 } else { d.times[k - 2] };
                let hi = if *k == d.k() { 1.0 } else { d.times[*k] };
                if *to < lo || *to > hi || *to < 0.0 || *to > 1.0 {
                    return None;
                }
                let mut out = d.clone();
                out.times[k - 1] = *to;
                Some(out)
            }
            Move::Birth { u, beta } => {
                if !(0.0..=1.0).contains(u) || !(0.0 < *beta && *beta < 1.0) {
                    return None;
                }
                let j = d.times.partition_point(|t| *t <= *u);
                let mut out = d.clone();
                let a = out.heights[j];
                out.heights[j] = beta * a;
                out.heights.insert(j + 1, (1.0 - beta) * a);
                out.times.insert(j, *u);
                Some(out)
            }
            Move::Death { ell } => {
                if *ell == 0 || *ell > d.k() {
                    return None;
                }
                let mut out = d.clone();
                let a = out.heights.remove(*ell);
                out.heights[ell - 1] += a;
                out.times.remove(ell - 1);
                Some(out)
            }
        }
    }

    /// Fine multiplicative height-step scale for a coordinate: the base
    /// scale damped by the coordinate's relative conditional width
    /// `1/(n (T − t_k) a_k)`, so heights pressed against their data caps
    /// take steps matched to the cap slack.
    pub fn h_fine_sigma(&self, base: f64, t_k: f64, a_k: f64) -> f64 {
        let width = 1.0 / (self.n * (self.t_end - t_k));
        (base * (width / a_k).min(1.0)).clamp(1e-8, 10.0)
    }

    /// Probability of drawing the coarse mixture component for a height at
    /// `a`: near one for heights below their conditional width (newborns
    /// that must cross orders of magnitude), small for established heights
    /// whose moves should stay inside the cap slack.
    fn h_coarse_prob(&self, t_k: f64, a: f64) -> f64 {
        let width = 1.0 / (self.n * (self.t_end - t_k));
        (8.0 * width / a).clamp(0.1, 0.9)
    }

    /// Log density (in the log-step variable) of the two-component height
    /// proposal: a state-weighted mixture of the fine scale and a unit
    /// coarse scale.
    fn h_step_log_density(&self, base: f64, t_k: f64, a_from: f64, d: f64) -> f64 {
        let sf = self.h_fine_sigma(base, t_k, a_from);
        let sc = H_COARSE_SCALE;
        let pc = self.h_coarse_prob(t_k, a_from);
        let comp = |s: f64| (-0.5 * d * d / (s * s)).exp() / s;
        ((1.0 - pc) * comp(sf) + pc * comp(sc)).ln()
    }

    /// Uniform window half-width for the time move of jump `k`; depends only
    /// on the (unchanged) height, keeping the proposal symmetric.
    pub fn t_window(&self, base: f64, a_k: f64) -> f64 {
        (base / (self.n * a_k)).clamp(1e-6, 0.2)
    }

    /// Log proposal-density correction `ln q(y→x) − ln q(x→y)` for a height
    /// move `a → a'` at jump time `t_k`.
    pub fn h_proposal_correction(&self, base: f64, t_k: f64, a: f64, a_new: f64) -> f64 {
        let d = (a_new / a).ln();
        self.h_step_log_density(base, t_k, a_new, d) - self.h_step_log_density(base, t_k, a, d)
            + (a_new / a).ln()
    }

    /// The move that exactly undoes `mv` applied at `d`.
    pub fn reverse(&self, d: &CppDraw, mv: &Move) -> Move {
        match mv {
            Move::Height { k, factor } => Move::Height { k: *k, factor: 1.0 / factor },
            Move::Time { k, to: _ } => Move::Time { k: *k, to: d.times[k - 1] },
            Move::Birth { u, .. } => {
                let j = d.times.partition_point(|t| *t <= *u);
                Move::Death { ell: j + 1 }
            }
            Move::Death { ell } => {
                let j = ell - 1;
                let a_merged = d.heights[j] + d.heights[*ell];
                Move::Birth { u: d.times[j], beta: d.heights[j] / a_merged }
            }
        }
    }

    /// Log acceptance ratio `log r` (before `min(0, ·)`), including prior,
    /// likelihood, proposal asymmetry and the reversible-jump Jacobian, but
    /// excluding the data constraint: the caller combines this with a
    /// constraint check on the raised region. `weights` are the (H, T, B, D)
    /// move probabilities and `h_base` the height-step base scale.
    pub fn log_ratio(
        &self,
        d: &CppDraw,
        mv: &Move,
        weights: &[f64; 4],
        h_base: f64,
    ) -> Option<f64> {
        match mv {
            Move::Height { k, factor } => {
                let a = d.heights[*k];
                let a_new = a * factor;
                let t_k = if *k == 0 { 0.0 } else { d.times[k - 1] };
                let dlik = self.n * (a_new - a) * (self.t_end - t_k);
                let dprior = if *k == 0 {
                    self.start.log_pdf(a_new) - self.start.log_pdf(a)
                } else {
                    self.jump.log_pdf(a_new) - self.jump.log_pdf(a)
                };
                Some(dlik + dprior + self.h_proposal_correction(h_base, t_k, a, a_new))
            }
            Move::Time { k, to } => {
                let a = d.heights[*k];
                Some(self.n * a * (d.times[k - 1] - to))
            }
            Move::Birth { u, beta } => {
                let j = d.times.partition_point(|t| *t <= *u);
                let a = d.heights[j];
                let t_j = if j == 0 { 0.0 } else { d.times[j - 1] };
                let dlik = -self.n * (1.0 - beta) * a * (u - t_j);
                let dprior = if j == 0 {
                    self.lambda.ln() + self.start.log_pdf(beta * a)
                        + self.jump.log_pdf((1.0 - beta) * a)
                        - self.start.log_pdf(a)
                } else {
                    self.lambda.ln() + self.jump.log_pdf(beta * a)
                        + self.jump.log_pdf((1.0 - beta) * a)
                        - self.jump.log_pdf(a)
                };
                let k_new = d.k() as f64 + 1.0;
                let dproposal = (weights[3] / k_new).ln() - weights[2].ln();
                Some(dlik + dprior + dproposal + a.ln())
            }
            Move::Death { .. } => {
                let fwd = self.reverse(d, mv);
                let merged = self.apply(d, mv)?;
                self.log_ratio(&merged, &fwd, weights, h_base).map(|r| -r)
            }
        }
    }

    /// Constraint check specialized to what each move can raise.
    fn move_constraint_ok(&self, old: &CppDraw, new: &CppDraw, mv: &Move) -> bool {
        match mv {
            Move::Height { k, factor } => {
                if *factor <= 1.0 {
                    return true;
                }
                let levels = self.levels(new);
                for p in *k..=new.k() {
                    let lo = if p == 0 { -1.0 } else { new.times[p - 1] };
                    let hi = if p == new.k() { self.t_end } else { new.times[p] };
                    if !self.span_ok(lo, hi, levels[p], p == new.k()) {
                        return false;
                    }
                }
                true
            }
            Move::Time { k, to } => {
                let t_old = old.times[k - 1];
                if *to >= t_old {
                    return true;
                }
                let level = self.levels(old)[*k];
                self.span_ok(*to, t_old, level, false)
            }
            Move::Birth { .. } => true,
            Move::Death { ell } => {
                // the merged piece rises to L_ell on [t_{ell-1}, t_ell)
                let lo = if *ell >= 2 { old.times[ell - 2] } else { 0.0 };
                let hi = old.times[ell - 1];
                let level = self.levels(old)[*ell];
                self.span_ok(lo, hi, level, false)
            }
        }
    }
}

/// Runs the sampler. Requires the monotone MLE to exist (`T > 1` with an
/// observation beyond 1) so the likelihood over monotone paths is bounded.
pub fn rjmcmc<R: Rng>(
    ps: &PointSet,
    prior: &CppPrior,
    cfg: &RjConfig,
    rng: &mut R,
) -> Result<Chain> {
    if cfg.iters == 0 {
        return cfg_err("rjmcmc needs iters > 0");
    }
    let w = cfg.move_weights;
    if w.iter().any(|x| *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
        return cfg_err("move weights must be nonnegative with positive sum");
    }
    if (w[2] > 0.0) != (w[3] > 0.0) {
        return cfg_err("birth and death weights must be enabled together");
    }
    let stair = monotone_mle(ps)?;
    let ctx = RjContext::new(ps, prior, cfg.ceiling.clone())?;

    let mut state = match &cfg.init {
        InitStrategy::Fixed(d) => d.clone(),
        InitStrategy::Staircase => fit_init(&stair, &ctx)?,
        InitStrategy::ModeKJump => {
            let m = stair.fit.jump_count();
            let penalty = 2.0 * ctx.n.ln();
            let mut best: Option<(f64, CppDraw)> = None;
            for (k, fit) in crate::mle::kjump_mle_all(&stair, m)?.iter().enumerate() {
                let Ok(d) = fit_init(fit, &ctx) else { continue };
                let score = ctx.log_post(&d) - penalty * k as f64;
                if score.is_finite() && best.as_ref().map_or(true, |(s, _)| score > *s) {
                    best = Some((score, d));
                }
            }
            best.map(|(_, d)| d)
                .ok_or_else(|| Error::Data("no feasible K-jump initialization".into()))?
        }
        InitStrategy::PriorFeasible => {
            let mut found = None;
            for _ in 0..10_000 {
                let (d, _) = crate::prior::sample_cpp(prior, ctx.t_end, rng)?;
                if ctx.log_post(&d).is_finite() {
                    found = Some(d);
                    break;
                }
            }
            found.ok_or_else(|| Error::Data("no feasible prior draw in 1e4 tries".into()))?
        }
    };
    let mut log_post = ctx.log_post(&state);
    if !log_post.is_finite() {
        return Err(Error::Data("initial state has non-finite log posterior".into()));
    }

    let burnin = cfg.burnin.unwrap_or(cfg.iters / 5).min(cfg.iters.saturating_sub(1));
    let post_iters = cfg.iters - burnin;
    let thin = cfg
        .thin
        .unwrap_or_else(|| (post_iters / 10_000).max(1))
        .max(1);
    let wsum: f64 = w.iter().sum();
    let time_window_base = cfg.time_window.unwrap_or(3.0);
    let mut scale = cfg.height_scale;
    let mut stats = [MoveStats::default(); 4];
    let mut adapt_attempts = 0u64;
    let mut adapt_accepts = 0u64;
    let mut adapt_batches = 0u64;

    let cap = post_iters / thin + 1;
    let mut draws = Vec::with_capacity(cap);
    let mut k_trace = Vec::with_capacity(cap);
    let mut theta01 = Vec::with_capacity(cap);
    let mut theta0t = Vec::with_capacity(cap);
    let mut lp_trace = Vec::with_capacity(cap);

    for it in 0..cfg.iters {
        let pick = rng.random::<f64>() * wsum;
        let kind = if pick < w[0] {
            MoveKind::Height
        } else if pick < w[0] + w[1] {
            MoveKind::Time
        } else if pick < w[0] + w[1] + w[2] {
            MoveKind::Birth
        } else {
            MoveKind::Death
        };
        let mv = match kind {
            MoveKind::Height => {
                let k = rng.random_range(0..state.heights.len());
                let t_k = if k == 0 { 0.0 } else { state.times[k - 1] };
                let sigma = if rng.random::<f64>() < ctx.h_coarse_prob(t_k, state.heights[k]) {
                    H_COARSE_SCALE
                } else {
                    ctx.h_fine_sigma(scale, t_k, state.heights[k])
                };
                let xi: f64 = StandardNormal.sample(rng);
                Some(Move::Height { k, factor: (sigma * xi).exp() })
            }
            MoveKind::Time => {
                if state.k() == 0 {
                    None
                } else {
                    let k = rng.random_range(1..=state.k());
                    let w = ctx.t_window(time_window_base, state.heights[k]);
                    let to = state.times[k - 1] + w * (2.0 * rng.random::<f64>() - 1.0);
                    Some(Move::Time { k, to })
                }
            }
            MoveKind::Birth => Some(Move::Birth { u: rng.random::<f64>(), beta: rng.random::<f64>() }),
            MoveKind::Death => {
                if state.k() == 0 {
                    None
                } else {
                    Some(Move::Death { ell: rng.random_range(1..=state.k()) })
                }
            }
        };
        let slot = kind as usize;
        stats[slot].attempts += 1;
        let mut accepted = false;
        if let Some(mv) = mv {
            if let Some(new_state) = ctx.apply(&state, &mv) {
                if let Some(lr) = ctx.log_ratio(&state, &mv, &w, scale) {
                    if lr.is_finite()
                        && rng.random::<f64>().ln() < lr
                        && ctx.move_constraint_ok(&state, &new_state, &mv)
                    {
                        // maintain the log posterior incrementally via the
                        // pure prior+likelihood part of the ratio
                        let proposal_part = match &mv {
                            Move::Height { k, factor } => {
                                let t_k = if *k == 0 { 0.0 } else { state.times[k - 1] };
                                let a = state.heights[*k];
                                ctx.h_proposal_correction(scale, t_k, a, a * factor)
                            }
                            Move::Time { .. } => 0.0,
                            Move::Birth { u, .. } => {
                                let j = state.times.partition_point(|t| *t <= *u);
                                let k_new = state.k() as f64 + 1.0;
                                (w[3] / k_new).ln() - w[2].ln() + state.heights[j].ln()
                            }
                            Move::Death { ell } => {
                                let a_merged = state.heights[ell - 1] + state.heights[*ell];
                                -((w[3] / state.k() as f64).ln() - w[2].ln() + a_merged.ln())
                            }
                        };
                        log_post += lr - proposal_part;
                        state = new_state;
                        accepted = true;
                    }
                }
            }
        }
        if accepted {
            stats[slot].accepts += 1;
        }
        // periodic full recompute keeps the incremental trace from drifting
        if it % 4096 == 4095 {
            log_post = ctx.log_post(&state);
        }
        // adapt the height scale during burn-in only
        if it < burnin && kind == MoveKind::Height {
            adapt_attempts += 1;
            if accepted {
                adapt_accepts += 1;
            }
            if adapt_attempts == 50 {
                adapt_batches += 1;
                let rate = adapt_accepts as f64 / adapt_attempts as f64;
                scale *= ((rate - 0.35) / (adapt_batches as f64).sqrt()).exp();
                scale = scale.clamp(1e-4, 10.0);
                adapt_attempts = 0;
                adapt_accepts = 0;
            }
        }
        if it >= burnin && (it - burnin) % thin == 0 {
            draws.push(state.clone());
            k_trace.push(state.k());
            theta01.push(state.integral_to(1.0));
            theta0t.push(state.integral_to(ctx.t_end));
            lp_trace.push(log_post);
        }
    }

    Ok(Chain {
        draws,
        k_trace,
        theta01,
        theta0t,
        log_post: lp_trace,
        stats,
        iters: cfg.iters,
        burnin,
        thin,
        height_scale_final: scale,
        t_end: ctx.t_end,
    })
}

/// Converts a monotone fit into a feasible initial draw. Fitted levels sit
/// exactly on binding observations, and rebuilding them from height
/// increments can round a level one ulp above its cap; shifting every level
/// down by half a mean tail overshoot keeps the start strictly feasible and
/// inside the posterior bulk.
fn fit_init(stair: &crate::mle::MleResult, ctx: &RjContext) -> Result<CppDraw> {
    let values = stair.fit.values();
    let breaks = stair.fit.breaks();
    let shift = 0.5 / ctx.n;
    let mut heights = vec![values[0] - shift];
    for w in values.windows(2) {
        heights.push(w[1] - w[0]);
    }
    let times: Vec<f64> = breaks[1..breaks.len() - 1].to_vec();
    let d = CppDraw { times, heights };
    if ctx.log_post(&d).is_finite() {
        return Ok(d);
    }
    // staircase off the prior support (e.g. negative data minima); fall back
    // to a constant at the global minimum when that is feasible
    let global_min = ctx.ps.range_min_to_end(0.0).map(|(_, _, y)| y);
    if let Some(m) = global_min {
        let d = CppDraw { times: vec![], heights: vec![m] };
        if ctx.log_post(&d).is_finite() {
            return Ok(d);
        }
    }
    Err(Error::Data(
        "staircase initialization is off the prior support; supply an explicit init".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_set::PointSetMeta;
    use crate::rng::stream_rng;
    use crate::truth::Truth;

    fn demo_ps(seed: u64) -> PointSet {
        let truth_fn = StepFn::from_jumps(1.5, 0.4, &[(0.5, 0.8)]).unwrap();
        let truth = Truth::step(truth_fn);
        PointSet::simulate_seeded(&truth, 400.0, 1.5, 0.8, seed).unwrap()
    }

    #[test]
    fn identity_proposal_has_ratio_one() {
        let ps = demo_ps(1);
        let prior = CppPrior::gamma21_exp(2.0);
        let ctx = RjContext::new(&ps, &prior, None).unwrap();
        let stair = monotone_mle(&ps).unwrap();
        let d = fit_init(&stair, &ctx).unwrap();
        let w = [0.4, 0.3, 0.15, 0.15];
        let lr = ctx
            .log_ratio(&d, &Move::Height { k: 0, factor: 1.0 }, &w, 0.4)
            .unwrap();
        assert!(lr.abs() < 1e-14);
        if d.k() > 0 {
            let lr = ctx
                .log_ratio(&d, &Move::Time { k: 1, to: d.times[0] }, &w, 0.4)
                .unwrap();
            assert!(lr.abs() < 1e-14);
        }
    }

    #[test]
    fn ratio_matches_full_log_posterior_difference() {
        // incremental ratio vs two full evaluations plus proposal terms
        let ps = demo_ps(2);
        let prior = CppPrior::gamma21_exp(2.0);
        let ctx = RjContext::new(&ps, &prior, None).unwrap();
        let w = [0.4, 0.3, 0.15, 0.15];
        let mut rng = stream_rng(61, 0);
        let stair = monotone_mle(&ps).unwrap();
        let mut state = fit_init(&stair, &ctx).unwrap();
        let mut checked = 0;
        while checked < 1000 {
            let mv = random_move(&state, &mut rng);
            let Some(new_state) = ctx.apply(&state, &mv) else { continue };
            let lp_old = ctx.log_post(&state);
            let lp_new = ctx.log_post(&new_state);
            if !lp_new.is_finite() {
                continue;
            }
            let lr = ctx.log_ratio(&state, &mv, &w, 0.4).unwrap();
            let proposal_part = match &mv {
                Move::Height { k, factor } => {
                    let t_k = if *k == 0 { 0.0 } else { state.times[k - 1] };
                    let a = state.heights[*k];
                    ctx.h_proposal_correction(0.4, t_k, a, a * factor)
                }
                Move::Time { .. } => 0.0,
                Move::Birth { u, .. } => {
                    let j = state.times.partition_point(|t| *t <= *u);
                    let k_new = state.k() as f64 + 1.0;
                    (w[3] / k_new).ln() - w[2].ln() + state.heights[j].ln()
                }
                Move::Death { ell } => {
                    let a_merged = state.heights[ell - 1] + state.heights[*ell];
                    -((w[3] / state.k() as f64).ln() - w[2].ln() + a_merged.ln())
                }
            };
            let want = lp_new - lp_old + proposal_part;
            assert!(
                (lr - want).abs() <= 1e-10 * (1.0 + want.abs()),
                "{mv:?}: incremental {lr} vs full {want}"
            );
            // occasionally walk so states vary
            if checked % 7 == 0 && ctx.move_constraint_ok(&state, &new_state, &mv) {
                state = new_state;
            }
            checked += 1;
        }
    }

    fn random_move<R: Rng>(state: &CppDraw, rng: &mut R) -> Move {
        loop {
            match rng.random_range(0..4) {
                0 => {
                    let k = rng.random_range(0..state.heights.len());
                    let xi: f64 = StandardNormal.sample(rng);
                    return Move::Height { k, factor: (0.4 * xi).exp() };
                }
                1 if state.k() > 0 => {
                    let k = rng.random_range(1..=state.k());
                    let to = state.times[k - 1] + 0.05 * (2.0 * rng.random::<f64>() - 1.0);
                    return Move::Time { k, to };
                }
                2 => {
                    return Move::Birth { u: rng.random::<f64>(), beta: rng.random::<f64>() };
                }
                3 if state.k() > 0 => {
                    return Move::Death { ell: rng.random_range(1..=state.k()) };
                }
                _ => {}
            }
        }
    }

    #[test]
    fn detailed_balance_identity_on_randomized_pairs() {
        // α(x→y)·π̃(x)·q(x→y) = α(y→x)·π̃(y)·q(y→x): in log form with the
        // Jacobian folded into the ratio, lr(x→y) + lr(y→x) = 0
        let ps = demo_ps(3);
        let prior = CppPrior::gamma21_exp(2.0);
        let ctx = RjContext::new(&ps, &prior, None).unwrap();
        let w = [0.25, 0.25, 0.25, 0.25];
        let mut rng = stream_rng(62, 0);
        let stair = monotone_mle(&ps).unwrap();
        let mut state = fit_init(&stair, &ctx).unwrap();
        let mut checked = 0;
        while checked < 1000 {
            let mv = random_move(&state, &mut rng);
            let Some(new_state) = ctx.apply(&state, &mv) else { continue };
            if !ctx.log_post(&new_state).is_finite() {
                continue;
            }
            let fwd = ctx.log_ratio(&state, &mv, &w, 0.4).unwrap();
            let rev_mv = ctx.reverse(&state, &mv);
            let rev = ctx.log_ratio(&new_state, &rev_mv, &w, 0.4).unwrap();
            assert!(
                (fwd + rev).abs() <= 1e-10 * (1.0 + fwd.abs()),
                "{mv:?}: fwd {fwd} rev {rev}"
            );
            // and the reverse move really does undo the forward one
            let back = ctx.apply(&new_state, &rev_mv).unwrap();
            for (a, b) in back.heights.iter().zip(&state.heights) {
                assert!((a - b).abs() < 1e-12);
            }
            if checked % 5 == 0 && ctx.move_constraint_ok(&state, &new_state, &mv) {
                state = new_state;
            }
            checked += 1;
        }
    }

    #[test]
    fn chain_runs_and_respects_constraints() {
        let ps = demo_ps(4);
        let prior = CppPrior::gamma21_exp(2.0);
        let cfg = RjConfig { iters: 20_000, ..RjConfig::default() };
        let mut rng = stream_rng(63, 0);
        let chain = rjmcmc(&ps, &prior, &cfg, &mut rng).unwrap();
        assert!(chain.draws.len() >= 10_000);
        chain.validate_constraints(&ps, 37).unwrap();
        // all paths stay below the staircase MLE
        let stair = monotone_mle(&ps).unwrap();
        for d in chain.draws.iter().step_by(83) {
            let f = d.to_step_fn(1.5).unwrap();
            assert!(f.le(&stair.fit), "path exceeds the monotone MLE");
        }
        // the height move acceptance was tuned into a sane band
        let r = chain.stats[MoveKind::Height as usize].rate();
        assert!(r > 0.1 && r < 0.7, "height acceptance {r}");
    }

    #[test]
    fn config_validation_errors() {
        let ps = demo_ps(5);
        let prior = CppPrior::gamma21_exp(2.0);
        let mut rng = stream_rng(64, 0);
        let bad = RjConfig { iters: 0, ..RjConfig::default() };
        assert!(rjmcmc(&ps, &prior, &bad, &mut rng).is_err());
        let bad = RjConfig { move_weights: [0.5, 0.3, 0.2, 0.0], ..RjConfig::default() };
        assert!(rjmcmc(&ps, &prior, &bad, &mut rng).is_err());
    }
}
