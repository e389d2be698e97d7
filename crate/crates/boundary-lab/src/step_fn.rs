//! Piecewise-constant functions on `[0, T]`.
//!
//! `StepFn` is the universal path representation: simulated truths, prior
//! draws, MLE fits and posterior paths are all stored this way. Piece `i`
//! holds its value on the left-open interval `(b_{i-1}, b_i]`, and the value
//! at `0` is the first piece's value. With this convention the observation
//! realizing a blockwise minimum evaluates exactly onto the fitted graph,
//! which keeps boundary-point counting an index operation rather than a
//! floating-point comparison.

use crate::error::{cfg_err, Error, Result};
use serde::{Deserialize, Serialize};

/// Canonical piecewise-constant function on `[0, T]`.
///
/// Invariants enforced by every constructor: breaks strictly increasing with
/// `breaks[0] == 0` and `breaks.last() == T > 0`, `values.len() + 1 ==
/// breaks.len()`, and no two adjacent values equal (equal neighbors are
/// merged).
#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepFnRepr {
    #[serde(rename = "T")]
    t: f64,
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl Serialize for StepFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepFnRepr {
            t: self.domain_end(),
            breaks: self.breaks.clone(),
            values: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StepFnRepr::deserialize(d)?;
        if (r.breaks.last().copied().unwrap_or(f64::NAN) - r.t).abs() > 1e-12 {
            return Err(serde::de::Error::custom("T does not match last break"));
        }
        StepFn::new(r.breaks, r.values).map_err(serde::de::Error::custom)
    }
}

impl StepFn {
    /// Builds a canonical step function; merges adjacent equal values.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 {
            return cfg_err("step function needs at least two breaks");
        }
        if breaks.len() != values.len() + 1 {
            return cfg_err(format!(
                "break/value length mismatch: {} breaks, {} values",
                breaks.len(),
                values.len()
            ));
        }
        if breaks[0] != 0.0 {
            return cfg_err("first break must be 0");
        }
        if !breaks.windows(2).all(|w| w[0] < w[1]) {
            return cfg_err("breaks must be strictly increasing");
        }
        if breaks.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return cfg_err("breaks and values must be finite");
        }
        let mut f = StepFn { breaks, values };
        f.merge_equal_neighbors();
        Ok(f)
    }

    /// Constant function `c` on `[0, T]`.
    pub fn constant(t_end: f64, c: f64) -> Result<Self> {
        StepFn::new(vec![0.0, t_end], vec![c])
    }

    /// Builds `f = a0 + Σ_ℓ a_ℓ 1(· ≥ t_ℓ)` on `[0, T]` from start value and
    /// (time, size) jumps; jump times need not be sorted or distinct.
    pub fn from_jumps(t_end: f64, a0: f64, jumps: &[(f64, f64)]) -> Result<Self> {
        let mut js: Vec<(f64, f64)> = jumps.to_vec();
        js.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breaks = vec![0.0];
        let mut values = vec![a0];
        let mut level = a0;
        let mut i = 0;
        while i < js.len() {
            let t = js[i].0;
            let mut size = 0.0;
            while i < js.len() && js[i].0 == t {
                size += js[i].1;
                i += 1;
            }
            if t <= 0.0 {
                level += size;
                values[0] = level;
                *values.last_mut().unwrap() = level;
                continue;
            }
            if t >= t_end {
                break;
            }
            level += size;
            breaks.push(t);
            values.push(level);
        }
        breaks.push(t_end);
        StepFn::new(breaks, values)
    }

    fn merge_equal_neighbors(&mut self) {
        let mut i = 0;
        while i + 1 < self.values.len() {
            if self.values[i] == self.values[i + 1] {
                self.values.remove(i + 1);
                self.breaks.remove(i + 1);
            } else {
                i += 1;
            }
        }
    }

    pub fn domain_end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of interior jumps.
    pub fn jump_count(&self) -> usize {
        self.values.len() - 1
    }

    /// Interior jump locations (excludes 0 and T).
    pub fn jump_times(&self) -> &[f64] {
        &self.breaks[1..self.breaks.len() - 1]
    }

    /// Value of the piece whose left-open interval contains `x`; `eval(0)`
    /// is the first value.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.domain_end()).contains(&x) {
            return Err(Error::Data(format!(
                "eval at x={x} outside [0, {}]",
                self.domain_end()
            )));
        }
        let i = self.breaks.partition_point(|b| *b < x).max(1);
        Ok(self.values[i - 1])
    }

    /// Value just after `x`, i.e. of the piece starting at `x` when `x` is a
    /// break (and `eval(x)` otherwise).
    pub fn value_after(&self, x: f64) -> f64 {
        let i = self.breaks.partition_point(|b| *b <= x);
        self.values[i.min(self.values.len())
            .max(1)
            - 1]
    }

    /// Exact integral over the domain.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breaks.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum()
    }

    /// Exact integral over `[0, upto]`.
    pub fn integral_to(&self, upto: f64) -> f64 {
        let mut acc = 0.0;
        for (v, w) in self.values.iter().zip(self.breaks.windows(2)) {
            if w[0] >= upto {
                break;
            }
            acc += v * (w[1].min(upto) - w[0]);
        }
        acc
    }

    /// Minimum value over pieces intersecting `[a, b)`.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let mut m = f64::INFINITY;
        for (v, w) in self.values.iter().zip(self.breaks.windows(2)) {
            if w[1] <= a {
                continue;
            }
            if w[0] >= b {
                break;
            }
            m = m.min(*v);
        }
        m
    }

    /// Merged breakpoints of `self` and `other` (same domain required).
    fn merged_breaks(&self, other: &StepFn) -> Vec<f64> {
        let mut grid: Vec<f64> = Vec::with_capacity(self.breaks.len() + other.breaks.len());
        let (a, b) = (&self.breaks, &other.breaks);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let x = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => {
                    if x <= y {
                        i += 1;
                        if x == y {
                            j += 1;
                        }
                        x
                    } else {
                        j += 1;
                        y
                    }
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => break,
            };
            if grid.last() != Some(&x) {
                grid.push(x);
            }
        }
        grid
    }

    /// Exact `∫ |self − other|` over the common domain.
    pub fn l1_dist(&self, other: &StepFn) -> Result<f64> {
        if self.domain_end() != other.domain_end() {
            return cfg_err(format!(
                "window mismatch: {} vs {}",
                self.domain_end(),
                other.domain_end()
            ));
        }
        let grid = self.merged_breaks(other);
        let mut acc = 0.0;
        for w in grid.windows(2) {
            let mid = w[1]; // pieces are left-open, right endpoint identifies the piece
            acc += (self.eval_unchecked(mid) - other.eval_unchecked(mid)).abs() * (w[1] - w[0]);
        }
        Ok(acc)
    }

    /// Pointwise `self ≤ other` (up to the common null set of breakpoints).
    pub fn le(&self, other: &StepFn) -> bool {
        if self.domain_end() != other.domain_end() {
            return false;
        }
        let grid = self.merged_breaks(other);
        grid.windows(2)
            .all(|w| self.eval_unchecked(w[1]) <= other.eval_unchecked(w[1]))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        let i = self.breaks.partition_point(|b| *b < x).max(1);
        self.values[(i - 1).min(self.values.len() - 1)]
    }

    /// Non-decreasing values check.
    pub fn is_monotone_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Reads the value of each bin of a refining grid back off a canonical
    /// function whose equal neighboring pieces may have been merged.
    pub fn values_on_grid(&self, grid: &[f64]) -> Vec<f64> {
        grid.windows(2)
            .map(|w| self.eval_mid(w[0], w[1].min(self.domain_end())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(breaks: &[f64], values: &[f64]) -> StepFn {
        StepFn::new(breaks.to_vec(), values.to_vec()).unwrap()
    }

    #[test]
    fn integral_examples() {
        assert_eq!(f(&[0.0, 0.5, 1.0], &[1.0, 2.0]).integral(), 1.5);
        assert_eq!(f(&[0.0, 1.0], &[0.0]).integral(), 0.0);
        assert_eq!(f(&[0.0, 0.25, 1.5], &[2.0, -1.0]).integral(), -0.75);
    }

    #[test]
    fn eval_left_open_convention() {
        let g = f(&[0.0, 0.5, 1.0], &[1.0, 2.0]);
        assert_eq!(g.eval(0.5).unwrap(), 1.0);
        assert_eq!(g.eval(0.50001).unwrap(), 2.0);
        assert_eq!(g.eval(0.0).unwrap(), 1.0);
        assert_eq!(g.eval(1.0).unwrap(), 2.0);
        assert!(g.eval(1.5).is_err());
        assert_eq!(g.value_after(0.5), 2.0);
        assert_eq!(g.value_after(0.0), 1.0);
    }

    #[test]
    fn l1_examples() {
        let g = f(&[0.0, 1.0], &[2.0]);
        assert_eq!(g.l1_dist(&g).unwrap(), 0.0);
        let h = f(&[0.0, 0.5, 1.0], &[1.0, 3.0]);
        assert_eq!(g.l1_dist(&h).unwrap(), 1.0);
        let a = f(&[0.0, 1.0], &[0.0]);
        let b = f(&[0.0, 0.3, 1.0], &[1.0, -1.0]);
        assert!((a.l1_dist(&b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l1_window_mismatch_is_error() {
        let g = f(&[0.0, 1.0], &[2.0]);
        let h = f(&[0.0, 1.5], &[2.0]);
        assert!(g.l1_dist(&h).is_err());
    }

    #[test]
    fn constructor_merges_and_validates() {
        let g = f(&[0.0, 0.4, 0.8, 1.0], &[1.0, 1.0, 2.0]);
        assert_eq!(g.values(), &[1.0, 2.0]);
        assert_eq!(g.breaks(), &[0.0, 0.8, 1.0]);
        assert!(StepFn::new(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(StepFn::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn from_jumps_builds_cadlag_levels() {
        // a0=1 with jumps +1 at 0.5 and +2 at 0.25 -> levels 1,3,4
        let g = StepFn::from_jumps(1.0, 1.0, &[(0.5, 1.0), (0.25, 2.0)]).unwrap();
        assert_eq!(g.breaks(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(g.values(), &[1.0, 3.0, 4.0]);
        // jump at or beyond T is dropped; jump at 0 folds into the start value
        let h = StepFn::from_jumps(1.0, 0.5, &[(1.0, 9.0), (0.0, 0.5)]).unwrap();
        assert_eq!(h.values(), &[1.0]);
    }

    #[test]
    fn integral_matches_riemann_refinement_exactly() {
        let g = f(&[0.0, 0.3, 0.7, 1.2], &[2.0, -1.0, 0.5]);
        // any grid refining the breaks reproduces the integral exactly
        let mut refine: Vec<f64> = (0..=120).map(|i| i as f64 * 0.01).collect();
        refine.extend_from_slice(g.breaks());
        refine.sort_by(f64::total_cmp);
        refine.dedup();
        let mut acc = 0.0;
        for w in refine.windows(2) {
            if w[1] > w[0] {
                acc += g.eval(w[1]).unwrap() * (w[1] - w[0]);
            }
        }
        assert!((acc - g.integral()).abs() < 1e-12);
    }

    #[test]
    fn le_and_min_on() {
        let g = f(&[0.0, 0.5, 1.0], &[1.0, 2.0]);
        let h = f(&[0.0, 0.5, 1.0], &[1.0, 3.0]);
        assert!(g.le(&h));
        assert!(!h.le(&g));
        assert_eq!(g.min_on(0.0, 0.5), 1.0);
        assert_eq!(g.min_on(0.6, 1.0), 2.0);
        assert_eq!(g.min_on(0.0, 1.0), 1.0);
    }

    #[test]
    fn serde_round_trip() {
        let g = f(&[0.0, 0.5, 1.5], &[1.0, 2.0]);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"T\":1.5"));
        let back: StepFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
