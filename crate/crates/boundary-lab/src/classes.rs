//! Function-class membership checks and experiment truth construction.
//!
//! The strong-signal subclass check evaluates, jump by jump, the minimal
//! rectangle areas `a_k·(t_{k+1}−t_k) ∧ a_k·(t_k−t_{k−1})`, minimal jump
//! heights and minimal gaps. Every threshold can be divided by a `slack`
//! multiplier ≥ 1: the thresholds carry large absolute constants that are
//! meant for asymptotic statements, and desk-scale experiments need room
//! below them while keeping the same shape of the condition.

use crate::error::{cfg_err, Result};
use crate::step_fn::StepFn;
use crate::truth::Truth;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ClassSpec {
    /// Piecewise constant with at most `k` pieces, values bounded by `r`.
    Pc { k: usize, r: f64 },
    /// Piecewise constant on the fixed grid, values bounded by `r`.
    PcStar { grid: Vec<f64>, r: f64 },
    /// Monotone increasing with `-r ≤ f(0) ≤ f(T) ≤ r`.
    Monotone { r: f64 },
    /// Monotone with at most `k` jumps in [0,1], jump sizes in [0, r].
    M { k: usize, r: f64 },
    /// Strong-signal subclass of `M(k, r)` at intensity `n`.
    Ms { k: usize, r: f64, n: f64, slack: f64 },
}

/// One checked inequality with its margin (`lhs - threshold`; pass iff ≥ 0).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    pub conditions: Vec<Condition>,
}

impl MembershipReport {
    fn new() -> Self {
        MembershipReport { member: true, conditions: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, lhs: f64, threshold: f64) {
        let pass = lhs >= threshold;
        self.member &= pass;
        self.conditions.push(Condition { name: name.into(), lhs, threshold, pass });
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.pass)
    }
}

impl ClassSpec {
    pub fn validate(&self) -> Result<()> {
        let r = match self {
            ClassSpec::Pc { r, .. }
            | ClassSpec::PcStar { r, .. }
            | ClassSpec::Monotone { r }
            | ClassSpec::M { r, .. }
            | ClassSpec::Ms { r, .. } => *r,
        };
        if !(r > 0.0) {
            return cfg_err("class bound R must be positive");
        }
        if let ClassSpec::PcStar { grid, .. } = self {
            if grid.len() < 2 || !grid.windows(2).all(|w| w[0] < w[1]) {
                return cfg_err("PC* grid must be strictly increasing with at least two nodes");
            }
        }
        if let ClassSpec::Ms { n, slack, .. } = self {
            if !(*n > 0.0) {
                return cfg_err("Ms intensity n must be positive");
            }
            if !(*slack >= 1.0) {
                return cfg_err("Ms slack must be >= 1");
            }
        }
        Ok(())
    }
}

/// Per-condition membership check of a step function against a class.
pub fn is_member(f: &StepFn, spec: &ClassSpec) -> Result<MembershipReport> {
    spec.validate()?;
    let mut rep = MembershipReport::new();
    match spec {
        ClassSpec::Pc { k, r } => {
            rep.check("piece_count", *k as f64 - f.values().len() as f64, 0.0);
            for (i, v) in f.values().iter().enumerate() {
                rep.check(format!("value_bound[{i}]"), r - v.abs(), 0.0);
            }
        }
        ClassSpec::PcStar { grid, r } => {
            for b in f.breaks() {
                let on_grid = grid.iter().any(|g| g == b);
                rep.check(format!("break_on_grid[{b}]"), if on_grid { 0.0 } else { -1.0 }, 0.0);
            }
            for (i, v) in f.values().iter().enumerate() {
                rep.check(format!("value_bound[{i}]"), r - v.abs(), 0.0);
            }
        }
        ClassSpec::Monotone { r } => {
            let mono = f.is_monotone_increasing();
            rep.check("monotone", if mono { 0.0 } else { -1.0 }, 0.0);
            rep.check("lower_bound", f.values()[0] + r, 0.0);
            rep.check("upper_bound", r - *f.values().last().unwrap(), 0.0);
        }
        ClassSpec::M { k, r } => {
            check_m(&mut rep, f, *k, *r);
        }
        ClassSpec::Ms { k, r, n, slack } => {
            check_m(&mut rep, f, *k, *r);
            rep.check("jump_count_exact", -((f.jump_count() as f64 - *k as f64).abs()), 0.0);
            let kk = *k as f64;
            let ln = n.ln();
            let area_thr = 2.0 * kk * (std::f64::consts::E * kk).ln() * ln.powi(3) / n / slack;
            let height_thr = 2.0 * ln / n.sqrt() / slack;
            let gap_thr = 2.0 / n.sqrt() / slack;
            // jump sizes a_0..a_K and gaps t_{j+1}-t_j with t_0 = 0, t_{K+1} = T
            let sizes = jump_sizes(f);
            let gaps: Vec<f64> = f.breaks().windows(2).map(|w| w[1] - w[0]).collect();
            for (j, a) in sizes.iter().enumerate() {
                rep.check(format!("height[{j}]"), *a, height_thr);
            }
            for (j, g) in gaps.iter().enumerate() {
                rep.check(format!("gap[{j}]"), *g, gap_thr);
            }
            for j in 1..sizes.len() {
                let a = sizes[j];
                let area = a * gaps[j].min(gaps[j - 1]);
                rep.check(format!("area[{j}]"), area, area_thr);
            }
        }
    }
    Ok(rep)
}

/// Membership check for a truth; only step truths can belong to the
/// piecewise-constant classes, otherwise membership is immediate geometry.
pub fn is_member_truth(t: &Truth, spec: &ClassSpec) -> Result<MembershipReport> {
    match (&t.kind, spec) {
        (crate::truth::TruthKind::Step { step }, _) => is_member(step, spec),
        (_, ClassSpec::Monotone { r }) => {
            let mut rep = MembershipReport::new();
            let segs = t.segments();
            let mono = segs.iter().all(|s| s.slope >= 0.0)
                && segs.windows(2).all(|w| {
                    w[0].slope * w[0].x1 + w[0].intercept <= w[1].slope * w[1].x1 + w[1].intercept
                });
            rep.check("monotone", if mono { 0.0 } else { -1.0 }, 0.0);
            rep.check("lower_bound", t.eval(0.0) + r, 0.0);
            rep.check("upper_bound", r - t.eval(t.window), 0.0);
            Ok(rep)
        }
        _ => cfg_err("membership for non-step truths is only defined for the monotone class"),
    }
}

fn check_m(rep: &mut MembershipReport, f: &StepFn, k: usize, r: f64) {
    rep.check("monotone", if f.is_monotone_increasing() { 0.0 } else { -1.0 }, 0.0);
    rep.check("jump_count", k as f64 - f.jump_count() as f64, 0.0);
    for (j, a) in jump_sizes(f).iter().enumerate() {
        rep.check(format!("jump_nonneg[{j}]"), *a, 0.0);
        rep.check(format!("jump_bound[{j}]"), r - a, 0.0);
    }
    for t in f.jump_times() {
        rep.check(format!("jump_in_unit[{t}]"), 1.0 - t, 0.0);
    }
}

/// Start value followed by the interior jump sizes.
fn jump_sizes(f: &StepFn) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.values().len());
    out.push(f.values()[0]);
    for w in f.values().windows(2) {
        out.push(w[1] - w[0]);
    }
    out
}

/// Builds the canonical strong-signal truth: equispaced jumps `t_j = j/(K+1)`
/// in `[0, 1]`, equal heights `R/(K+1)`, constant on `[1, T]`. Errors with
/// the first failing subclass condition if `(K, R, n, slack)` is infeasible.
pub fn make_ms_truth(k: usize, r: f64, n: f64, t_end: f64, slack: f64) -> Result<StepFn> {
    if !(t_end >= 1.0) {
        return cfg_err("Ms truths need T >= 1");
    }
    let height = r / (k as f64 + 1.0);
    let jumps: Vec<(f64, f64)> = (1..=k)
        .map(|j| (j as f64 / (k as f64 + 1.0), height))
        .collect();
    let f = StepFn::from_jumps(t_end, height, &jumps)?;
    if k == 0 {
        // constant R: the single "jump size" is the start value itself
        let f = StepFn::constant(t_end, r)?;
        let rep = is_member(&f, &ClassSpec::Ms { k, r, n, slack })?;
        return finish_ms(f, rep, k, r, n);
    }
    let rep = is_member(&f, &ClassSpec::Ms { k, r, n, slack })?;
    finish_ms(f, rep, k, r, n)
}

fn finish_ms(f: StepFn, rep: MembershipReport, k: usize, r: f64, n: f64) -> Result<StepFn> {
    match rep.first_failure() {
        None => Ok(f),
        Some(c) => Err(crate::error::Error::Config(format!(
            "(K={k}, R={r}, n={n}) infeasible for the strong-signal class: condition '{}' \
             has {:.6} < threshold {:.6}",
            c.name, c.lhs, c.threshold
        ))),
    }
}
