//! Exact simulation of the boundary observation model.
//!
//! The model is a Poisson point process on `[0, T] × ℝ` with intensity
//! `n·1(f(x) ≤ y)`. The full process has infinitely many points, so we
//! simulate exactly its restriction to the band `f(x) ≤ y ≤ f(x) + h`: the
//! band has constant vertical width `h`, hence the restriction is a shear of
//! a homogeneous process on `[0, T] × [0, h]` — draw a Poisson(n·T·h) count,
//! then `x ~ U[0, T]`, `y = f(x) + U[0, h]`. Every statistic in this crate
//! depends on the data only through points within band height of the truth;
//! experiments log `h` so results stay auditable.

use crate::error::{cfg_err, data_err, Result};
use crate::rmq::SparseRmq;
use crate::rng::seed_rng;
use crate::truth::Truth;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// A simulated realization: points sorted by x with a range-minimum index.
#[derive(Debug, Clone)]
pub struct PointSet {
    pub intensity: f64,
    pub window: f64,
    pub band: f64,
    pub truth: Truth,
    pub seed: Option<u64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    rmq: SparseRmq,
}

/// Sidecar metadata serialized next to the point CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSetMeta {
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub h: f64,
    pub truth: Truth,
    pub seed: Option<u64>,
}

impl PointSet {
    /// Exact draw of the band-restricted process.
    pub fn simulate<R: Rng>(truth: &Truth, n: f64, t_end: f64, h: f64, rng: &mut R) -> Result<PointSet> {
        truth.validate()?;
        if truth.window != t_end {
            return cfg_err("truth window does not match requested T");
        }
        if !(n > 0.0) || !(t_end > 0.0) || h < 0.0 {
            return cfg_err("simulate requires n > 0, T > 0, h >= 0");
        }
        let count = if h == 0.0 {
            0
        } else {
            Poisson::new(n * t_end * h)
                .map_err(|e| crate::error::Error::Config(format!("poisson: {e}")))?
                .sample(rng) as usize
        };
        let mut pts: Vec<(f64, f64)> = (0..count)
            .map(|_| {
                let x = rng.random::<f64>() * t_end;
                let y = truth.eval(x) + rng.random::<f64>() * h;
                (x, y)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        // x ties have probability zero but are possible in floating point;
        // redraw the offender so that argmins stay unique
        loop {
            let mut tie = None;
            for i in 1..pts.len() {
                if pts[i].0 == pts[i - 1].0 {
                    tie = Some(i);
                    break;
                }
            }
            match tie {
                None => break,
                Some(i) => {
                    let x = rng.random::<f64>() * t_end;
                    let y = truth.eval(x) + rng.random::<f64>() * h;
                    pts[i] = (x, y);
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                }
            }
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let rmq = SparseRmq::new(ys.clone());
        Ok(PointSet {
            intensity: n,
            window: t_end,
            band: h,
            truth: truth.clone(),
            seed: None,
            xs,
            ys,
            rmq,
        })
    }

    /// Seeded variant recording the seed for the serialization sidecar.
    pub fn simulate_seeded(truth: &Truth, n: f64, t_end: f64, h: f64, seed: u64) -> Result<PointSet> {
        let mut rng = seed_rng(seed);
        let mut ps = PointSet::simulate(truth, n, t_end, h, &mut rng)?;
        ps.seed = Some(seed);
        Ok(ps)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xs[i]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.ys[i]
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Index range of points with `x ∈ [a, b)`.
    pub fn index_range(&self, a: f64, b: f64) -> (usize, usize) {
        let lo = self.xs.partition_point(|x| *x < a);
        let hi = self.xs.partition_point(|x| *x < b);
        (lo, hi)
    }

    /// Point with minimal y among `x ∈ [a, b)`, or `None`.
    pub fn range_min(&self, a: f64, b: f64) -> Option<(usize, f64, f64)> {
        let (lo, hi) = self.index_range(a, b);
        self.rmq.argmin(lo, hi).map(|i| (i, self.xs[i], self.ys[i]))
    }

    /// Point with minimal y among `x ∈ [a, T]` (right endpoint included).
    pub fn range_min_to_end(&self, a: f64) -> Option<(usize, f64, f64)> {
        let lo = self.xs.partition_point(|x| *x < a);
        self.rmq.argmin(lo, self.xs.len()).map(|i| (i, self.xs[i], self.ys[i]))
    }

    /// Minimum y over the left-open interval `x ∈ (a, b]`, +inf when empty.
    /// This matches the piece convention of step functions, so a path whose
    /// jump sits exactly on an observation is constrained by the points
    /// strictly to the right of the jump.
    pub fn min_y_open_or_inf(&self, a: f64, b: f64) -> f64 {
        let lo = self.xs.partition_point(|x| *x <= a);
        let hi = self.xs.partition_point(|x| *x <= b);
        self.rmq.min(lo, hi).unwrap_or(f64::INFINITY)
    }

    /// Minimum y over `x ∈ (a, T]`, +inf when empty.
    pub fn min_y_open_to_end_or_inf(&self, a: f64) -> f64 {
        let lo = self.xs.partition_point(|x| *x <= a);
        self.rmq.min(lo, self.xs.len()).unwrap_or(f64::INFINITY)
    }

    /// Minimum y over `x ∈ [a, b)` or +inf when the range is empty.
    pub fn min_y_or_inf(&self, a: f64, b: f64) -> f64 {
        self.range_min(a, b).map_or(f64::INFINITY, |(_, _, y)| y)
    }

    /// Checks `fit(X_i) ≤ Y_i` for all points.
    pub fn dominates(&self, fit: &crate::step_fn::StepFn) -> bool {
        self.xs
            .iter()
            .zip(&self.ys)
            .all(|(x, y)| fit.eval(*x).map(|v| v <= *y).unwrap_or(false))
    }

    /// CSV with header `x,y`, rows sorted by x.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y")?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            writeln!(w, "{x},{y}")?;
        }
        Ok(())
    }

    pub fn meta(&self) -> PointSetMeta {
        PointSetMeta {
            n: self.intensity,
            t: self.window,
            h: self.band,
            truth: self.truth.clone(),
            seed: self.seed,
        }
    }

    /// Rebuilds a point set from raw parts (deserialization path).
    pub fn from_parts(meta: PointSetMeta, mut pts: Vec<(f64, f64)>) -> Result<PointSet> {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return data_err("duplicate x coordinates in point data");
            }
        }
        for (x, y) in &pts {
            if !(0.0..=meta.t).contains(x) {
                return data_err(format!("point x={x} outside [0, {}]", meta.t));
            }
            let f = meta.truth.eval(*x);
            if *y < f - 1e-9 || *y > f + meta.h + 1e-9 {
                return data_err(format!("point ({x}, {y}) outside the simulated band"));
            }
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let rmq = SparseRmq::new(ys.clone());
        Ok(PointSet {
            intensity: meta.n,
            window: meta.t,
            band: meta.h,
            truth: meta.truth,
            seed: meta.seed,
            xs,
            ys,
            rmq,
        })
    }
}

/// Default band height for monotone-class experiments: `20·sqrt(log n / n)`,
/// twenty times the contraction-rate scale.
pub fn default_band_monotone(n: f64) -> f64 {
    20.0 * (n.ln() / n).sqrt()
}

/// Default band height for fixed-grid histogram experiments:
/// `30·K·log n / n`, thirty times the per-bin overshoot scale.
pub fn default_band_histogram(n: f64, k: usize) -> f64 {
    30.0 * k as f64 * n.ln() / n
}
