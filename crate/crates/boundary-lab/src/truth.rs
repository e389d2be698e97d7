//! Boundary truths used to drive simulations.
//!
//! All four variants are piecewise linear, so L1 distances against step
//! functions have exact closed forms (triangle/trapezoid areas piece by
//! piece); no quadrature is involved anywhere in the truth geometry.

use crate::error::{cfg_err, Result};
use crate::step_fn::StepFn;
use serde::{Deserialize, Serialize};

/// A boundary specification with exact evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthKind {
    /// Piecewise-constant truth.
    Step { step: StepFn },
    /// `f(x) = slope·x + intercept`.
    Linear { slope: f64, intercept: f64 },
    /// `f(x) = x + Σ_j offsets_j · 1(x ∈ [(j−1)/K, j/K))` on `[0,1]`,
    /// extended by its value at 1 beyond the unit interval.
    PiecewiseLinearGrid { offsets: Vec<f64> },
    /// The fixed kink boundary `(x + 1/2) ∧ 3/2`, constant on `[1, T]`.
    Kink,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub kind: TruthKind,
    /// Observation window end `T`.
    pub window: f64,
}

/// One maximal linear segment `slope·x + intercept` on `[x0, x1)`.
#[derive(Debug, Clone, Copy)]
pub struct LinSegment {
    pub x0: f64,
    pub x1: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Truth {
    pub fn step(step: StepFn) -> Truth {
        let window = step.domain_end();
        Truth { kind: TruthKind::Step { step }, window }
    }

    pub fn linear(slope: f64, intercept: f64, window: f64) -> Truth {
        Truth { kind: TruthKind::Linear { slope, intercept }, window }
    }

    pub fn piecewise_linear_grid(offsets: Vec<f64>, window: f64) -> Truth {
        Truth { kind: TruthKind::PiecewiseLinearGrid { offsets }, window }
    }

    pub fn kink(window: f64) -> Truth {
        Truth { kind: TruthKind::Kink, window }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0) {
            return cfg_err("truth window must be positive");
        }
        match &self.kind {
            TruthKind::Step { step } => {
                if step.domain_end() != self.window {
                    return cfg_err("step truth domain does not match window");
                }
            }
            TruthKind::PiecewiseLinearGrid { offsets } => {
                if offsets.is_empty() {
                    return cfg_err("piecewise linear grid truth needs K >= 1 offsets");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Exact evaluation at `x ∈ [0, T]`.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            TruthKind::Step { step } => step.eval(x).expect("x within window"),
            TruthKind::Linear { slope, intercept } => slope * x + intercept,
            TruthKind::PiecewiseLinearGrid { offsets } => {
                let k = offsets.len();
                if x >= 1.0 {
                    // constant continuation with the left limit at 1
                    return 1.0 + offsets[k - 1];
                }
                let j = ((x * k as f64).floor() as usize).min(k - 1);
                x + offsets[j]
            }
            TruthKind::Kink => (x + 0.5).min(1.5),
        }
    }

    /// Maximal linear segments covering `[0, T]` (step truths give slope-0
    /// segments in the closed-piece sense; boundary values on the null set of
    /// segment endpoints follow the segment owning the right endpoint).
    pub fn segments(&self) -> Vec<LinSegment> {
        let t_end = self.window;
        match &self.kind {
            TruthKind::Step { step } => step
                .values()
                .iter()
                .zip(step.breaks().windows(2))
                .map(|(v, w)| LinSegment { x0: w[0], x1: w[1], slope: 0.0, intercept: *v })
                .collect(),
            TruthKind::Linear { slope, intercept } => vec![LinSegment {
                x0: 0.0,
                x1: t_end,
                slope: *slope,
                intercept: *intercept,
            }],
            TruthKind::PiecewiseLinearGrid { offsets } => {
                let k = offsets.len();
                let mut segs = Vec::with_capacity(k + 1);
                for (j, off) in offsets.iter().enumerate() {
                    let x0 = j as f64 / k as f64;
                    let x1 = ((j + 1) as f64 / k as f64).min(t_end);
                    if x0 >= t_end {
                        break;
                    }
                    segs.push(LinSegment { x0, x1, slope: 1.0, intercept: *off });
                }
                if t_end > 1.0 {
                    segs.push(LinSegment {
                        x0: 1.0,
                        x1: t_end,
                        slope: 0.0,
                        intercept: 1.0 + offsets[k - 1],
                    });
                }
                segs
            }
            TruthKind::Kink => {
                if t_end <= 1.0 {
                    vec![LinSegment { x0: 0.0, x1: t_end, slope: 1.0, intercept: 0.5 }]
                } else {
                    vec![
                        LinSegment { x0: 0.0, x1: 1.0, slope: 1.0, intercept: 0.5 },
                        LinSegment { x0: 1.0, x1: t_end, slope: 0.0, intercept: 1.5 },
                    ]
                }
            }
        }
    }

    /// Exact `∫_0^upto truth`.
    pub fn integral_to(&self, upto: f64) -> f64 {
        let mut acc = 0.0;
        for s in self.segments() {
            if s.x0 >= upto {
                break;
            }
            let hi = s.x1.min(upto);
            acc += s.intercept * (hi - s.x0) + 0.5 * s.slope * (hi * hi - s.x0 * s.x0);
        }
        acc
    }

    /// Exact minimum over `[a, b)`; used for band-sufficiency checks.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let mut m = f64::INFINITY;
        for s in self.segments() {
            if s.x1 <= a || s.x0 >= b {
                continue;
            }
            let lo = s.x0.max(a);
            let hi = s.x1.min(b);
            let end = if s.slope >= 0.0 { lo } else { hi };
            m = m.min(s.slope * end + s.intercept);
        }
        m
    }

    /// Exact `∫ |truth − f|` using the closed form for |linear − constant| on
    /// every merged piece.
    pub fn l1_dist(&self, f: &StepFn) -> Result<f64> {
        if f.domain_end() != self.window {
            return cfg_err(format!(
                "window mismatch: truth on [0,{}], step fn on [0,{}]",
                self.window,
                f.domain_end()
            ));
        }
        let mut acc = 0.0;
        for s in self.segments() {
            // cut the segment at the step function's breaks
            let mut x0 = s.x0;
            for &b in f.breaks().iter().chain(std::iter::once(&s.x1)) {
                if b <= x0 {
                    continue;
                }
                let x1 = b.min(s.x1);
                let c = f.eval_mid(x0, x1);
                acc += l1_linear_vs_const(s.slope, s.intercept, c, x0, x1);
                x0 = x1;
                if x0 >= s.x1 {
                    break;
                }
            }
        }
        Ok(acc)
    }
}

/// Dense-grid step approximation of an arbitrary boundary together with a
/// reported L1 approximation bias bound (grid width times the function's
/// maximal oscillation per cell). Exact simulation is only available for
/// piecewise-affine truths; smooth boundaries enter experiments through
/// this surrogate with the bias carried alongside, never hidden.
pub fn dense_step_approx(
    f: impl Fn(f64) -> f64,
    t_end: f64,
    cells: usize,
) -> Result<(StepFn, f64)> {
    if cells < 1 || !(t_end > 0.0) {
        return cfg_err("dense approximation needs cells >= 1 and T > 0");
    }
    let width = t_end / cells as f64;
    let mut breaks = Vec::with_capacity(cells + 1);
    let mut values = Vec::with_capacity(cells);
    let mut bias = 0.0f64;
    breaks.push(0.0);
    for i in 0..cells {
        let lo = i as f64 * width;
        let hi = (lo + width).min(t_end);
        values.push(f(0.5 * (lo + hi)));
        // oscillation estimate on a 5-point stencil per cell
        let mut cell_min = f64::INFINITY;
        let mut cell_max = f64::NEG_INFINITY;
        for j in 0..=4 {
            let v = f(lo + (hi - lo) * j as f64 / 4.0);
            cell_min = cell_min.min(v);
            cell_max = cell_max.max(v);
        }
        bias += (cell_max - cell_min) * (hi - lo);
        breaks.push(hi);
    }
    Ok((StepFn::new(breaks, values)?, bias))
}

/// `∫_a^b |s·x + i − c| dx`, exactly.
fn l1_linear_vs_const(slope: f64, intercept: f64, c: f64, a: f64, b: f64) -> f64 {
    if slope == 0.0 {
        return (intercept - c).abs() * (b - a);
    }
    let area = |x0: f64, x1: f64| {
        let g0 = slope * x0 + intercept - c;
        let g1 = slope * x1 + intercept - c;
        0.5 * (g0 + g1) * (x1 - x0)
    };
    let root = (c - intercept) / slope;
    if root <= a || root >= b {
        area(a, b).abs()
    } else {
        area(a, root).abs() + area(root, b).abs()
    }
}

impl StepFn {
    /// Value on the piece containing the open interval `(x0, x1)`; helper for
    /// merged-grid sweeps where `x1` is a known piece endpoint.
    pub(crate) fn eval_mid(&self, _x0: f64, x1: f64) -> f64 {
        let i = self.breaks().partition_point(|b| *b < x1).max(1);
        self.values()[(i - 1).min(self.values().len() - 1)]
    }
}
