//! Frequentist estimators.
//!
//! Everything here rests on blockwise minima of the point cloud:
//!
//! - the histogram MLE takes the per-bin minimum on a fixed grid,
//! - the monotone MLE is the pointwise-maximal monotone staircase below all
//!   points, constant on `[1, T]`,
//! - the K-jump MLE keeps the `K` staircase jumps that maximize the fitted
//!   integral (a dynamic program; optimal K-jump fits only ever jump at
//!   staircase jump locations),
//! - the integral estimators subtract `m/n`, with `m` the number of
//!   observations on the fitted graph, tracked by point index so the count
//!   is exact rather than a float comparison.

use crate::error::{data_err, Error, Result};
use crate::point_set::PointSet;
use crate::step_fn::StepFn;
use serde::{Deserialize, Serialize};

/// A fitted boundary together with the observations on its graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MleResult {
    pub fit: StepFn,
    /// Indices into the point set of observations lying exactly on the graph
    /// of `fit`.
    pub boundary_indices: Vec<usize>,
    /// Bin count for the histogram MLE, jump count for monotone/K-jump fits.
    pub model_dim: usize,
}

impl MleResult {
    /// `∫ fit` over the full window.
    pub fn integral(&self) -> f64 {
        self.fit.integral()
    }
}

/// Histogram MLE on a fixed grid: the per-bin minimum `â_j = min{Y_i : X_i ∈
/// [t_{j-1}, t_j)}` (last bin closed on the right).
pub fn histogram_mle(ps: &PointSet, grid: &[f64]) -> Result<MleResult> {
    if grid.len() < 2 || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("histogram grid must be strictly increasing".into()));
    }
    if grid[0] != 0.0 {
        return Err(Error::Config("histogram grid must start at 0".into()));
    }
    if *grid.last().unwrap() > ps.window + 1e-12 {
        return Err(Error::Config("histogram grid exceeds the observation window".into()));
    }
    let k = grid.len() - 1;
    let mut values = Vec::with_capacity(k);
    let mut boundary = Vec::with_capacity(k);
    for j in 0..k {
        let hit = if j + 1 == k {
            ps.range_min_to_end(grid[j])
        } else {
            ps.range_min(grid[j], grid[j + 1])
        };
        match hit {
            Some((idx, _, y)) => {
                values.push(y);
                boundary.push(idx);
            }
            None => {
                return data_err(format!(
                    "empty histogram bin {} = [{}, {}): band height or n too small",
                    j + 1,
                    grid[j],
                    grid[j + 1]
                ))
            }
        }
    }
    let mut breaks = grid.to_vec();
    if *breaks.last().unwrap() < ps.window {
        // extend the last bin's value to the window end
        *breaks.last_mut().unwrap() = ps.window;
    }
    Ok(MleResult {
        fit: StepFn::new(breaks, values)?,
        boundary_indices: boundary,
        model_dim: k,
    })
}

/// Monotone MLE: the pointwise-maximal monotone increasing step function
/// below all observations and constant on `[1, T]`. Errors when no
/// observation has `x ≥ 1` (the likelihood over monotone functions is then
/// unbounded).
pub fn monotone_mle(ps: &PointSet) -> Result<MleResult> {
    let t_end = ps.window;
    if t_end <= 1.0 {
        return Err(Error::Config(
            "monotone MLE needs T > 1 with the truth constant on [1, T]".into(),
        ));
    }
    let tail = ps.range_min_to_end(1.0);
    let Some((tail_idx, _, tail_min)) = tail else {
        return data_err("no observation with x >= 1: monotone likelihood unbounded");
    };
    let before_one = ps.xs().partition_point(|x| *x < 1.0);
    // scan right-to-left over x < 1 keeping the running minimum
    let mut bindings: Vec<usize> = Vec::new(); // left-to-right after reverse
    let mut current = tail_min;
    for i in (0..before_one).rev() {
        if ps.y(i) < current {
            current = ps.y(i);
            bindings.push(i);
        }
    }
    bindings.reverse();
    let mut breaks = vec![0.0];
    let mut values = Vec::new();
    for &i in &bindings {
        values.push(ps.y(i));
        breaks.push(ps.x(i));
    }
    values.push(tail_min);
    breaks.push(t_end);
    let mut boundary = bindings;
    boundary.push(tail_idx);
    let fit = StepFn::new(breaks, values)?;
    let model_dim = fit.jump_count();
    Ok(MleResult { fit, boundary_indices: boundary, model_dim })
}

/// MLE over monotone step functions with at most `K` jumps lying below the
/// staircase: selects jump locations among the staircase's jumps to maximize
/// the integral, O(M²K). Ties break toward the lexicographically smallest
/// jump-location set. `K ≥ M` returns the staircase itself.
pub fn kjump_mle(stair: &MleResult, k: usize) -> Result<MleResult> {
    Ok(kjump_mle_all(stair, k)?.pop().expect("k+1 fits"))
}

/// All K-jump fits for `K = 0..=k_max` from a single dynamic-program table;
/// the last entry is the `k_max` fit (the staircase itself once `K ≥ M`).
pub fn kjump_mle_all(stair: &MleResult, k_max: usize) -> Result<Vec<MleResult>> {
    let m = stair.fit.jump_count();
    let k = k_max.min(m);
    let mut fits = kjump_table(stair, k)?;
    while fits.len() < k_max + 1 {
        fits.push(stair.clone());
    }
    Ok(fits)
}

fn kjump_table(stair: &MleResult, k: usize) -> Result<Vec<MleResult>> {
    let m = stair.fit.jump_count();
    if k >= m && m == 0 {
        return Ok(vec![stair.clone()]);
    }
    let breaks = stair.fit.breaks();
    let values = stair.fit.values();
    let t_end = stair.fit.domain_end();
    // nodes 0..=m: node 0 is the base (always active), node i >= 1 is the
    // staircase jump at breaks[i] with post-jump value values[i]
    let node_x = |i: usize| if i == 0 { 0.0 } else { breaks[i] };
    let node_v = |i: usize| values[i];
    // best[i][c] = max integral on [x_i, T] with node i active and at most c
    // further jumps; choice[i][c] = next node picked (0 = stop)
    let n_nodes = m + 1;
    let mut best = vec![vec![f64::NEG_INFINITY; k + 1]; n_nodes];
    let mut choice = vec![vec![0usize; k + 1]; n_nodes];
    for i in (0..n_nodes).rev() {
        for c in 0..=k {
            let stop = node_v(i) * (t_end - node_x(i));
            let mut b = stop;
            let mut ch = 0usize;
            if c > 0 {
                for j in (i + 1)..n_nodes {
                    let cand = node_v(i) * (node_x(j) - node_x(i)) + best[j][c - 1];
                    // strict improvement keeps the earliest maximizing jump,
                    // which yields the lexicographically smallest jump set
                    if cand > b {
                        b = cand;
                        ch = j;
                    }
                }
            }
            best[i][c] = b;
            choice[i][c] = ch;
        }
    }
    let mut out = Vec::with_capacity(k + 1);
    for budget in 0..=k {
        // reconstruct the budget-jump maximizer
        let mut sel = Vec::with_capacity(budget);
        let mut i = 0usize;
        let mut c = budget;
        while c > 0 && choice[i][c] != 0 {
            let j = choice[i][c];
            sel.push(j);
            i = j;
            c -= 1;
        }
        let mut fit_breaks = vec![0.0];
        let mut fit_values = vec![node_v(0)];
        for &j in &sel {
            fit_breaks.push(node_x(j));
            fit_values.push(node_v(j));
        }
        fit_breaks.push(t_end);
        let fit = StepFn::new(fit_breaks, fit_values)?;
        // the observation realizing each active piece's value: the staircase
        // boundary point of the piece starting at the selected jump
        let mut boundary = Vec::with_capacity(sel.len() + 1);
        boundary.push(stair.boundary_indices[0]);
        for &j in &sel {
            boundary.push(stair.boundary_indices[j]);
        }
        let model_dim = fit.jump_count();
        out.push(MleResult { fit, boundary_indices: boundary, model_dim });
    }
    Ok(out)
}

/// Exhaustive reference for [`kjump_mle`]: enumerates all jump subsets.
/// Exposed for tests and experiment cross-checks; only usable for small `M`.
pub fn kjump_brute_force(stair: &MleResult, k: usize) -> Result<MleResult> {
    let m = stair.fit.jump_count();
    if k >= m {
        return Ok(stair.clone());
    }
    let breaks = stair.fit.breaks();
    let values = stair.fit.values();
    let t_end = stair.fit.domain_end();
    assert!(m <= 20, "brute force is exponential in the jump count");
    let mut best_int = f64::NEG_INFINITY;
    let mut best_sel: Vec<usize> = Vec::new();
    // iterate subsets of {1..m} of size <= k in lexicographic order
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let sel: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).map(|j| j + 1).collect();
        let mut integral = 0.0;
        let mut prev = 0usize;
        for &j in sel.iter().chain(std::iter::once(&(m + 1))) {
            let x0 = if prev == 0 { 0.0 } else { breaks[prev] };
            let x1 = if j == m + 1 { t_end } else { breaks[j] };
            integral += values[prev] * (x1 - x0);
            prev = j;
        }
        let sel_x: Vec<f64> = sel.iter().map(|j| breaks[*j]).collect();
        let best_x: Vec<f64> = best_sel.iter().map(|j| breaks[*j]).collect();
        if integral > best_int || (integral == best_int && sel_x < best_x) {
            best_int = integral;
            best_sel = sel;
        }
    }
    let mut fit_breaks = vec![0.0];
    let mut fit_values = vec![values[0]];
    let mut boundary = vec![stair.boundary_indices[0]];
    for &j in &best_sel {
        fit_breaks.push(breaks[j]);
        fit_values.push(values[j]);
        boundary.push(stair.boundary_indices[j]);
    }
    fit_breaks.push(t_end);
    let fit = StepFn::new(fit_breaks, fit_values)?;
    let model_dim = fit.jump_count();
    Ok(MleResult { fit, boundary_indices: boundary, model_dim })
}

/// Plain MLE of the integral: `∫ fit`.
pub fn theta_naive(r: &MleResult) -> f64 {
    r.fit.integral()
}

/// Bias-corrected integral estimator `∫ fit − m/n` with `m` the number of
/// observations on the fitted graph.
pub fn theta_bc(r: &MleResult, n: f64) -> f64 {
    r.fit.integral() - r.boundary_indices.len() as f64 / n
}

/// Blockwise integral estimator on `[0, 1]` with `K` blocks:
/// `θ̂_k = (Y*_k + 1/K) − (K/n)·#{i : X_i ∈ I_k, Y_i ≤ Y*_k + 1/K}`,
/// averaged over blocks. Errors on an empty block or when the simulation
/// band is too low for the count to be complete.
pub fn theta_block(ps: &PointSet, k: usize, n: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("theta_block needs K >= 1".into()));
    }
    if ps.window < 1.0 {
        return Err(Error::Config("theta_block runs on [0, 1]: need T >= 1".into()));
    }
    let kf = k as f64;
    let mut acc = 0.0;
    for block in 0..k {
        let lo = block as f64 / kf;
        let hi = (block + 1) as f64 / kf;
        let (ilo, ihi) = ps.index_range(lo, hi);
        let Some((_, _, ystar)) = ps.range_min(lo, hi) else {
            return data_err(format!("empty block {} = [{lo}, {hi})", block + 1));
        };
        let cut = ystar + 1.0 / kf;
        // the count must see every process point below the cut; points above
        // truth + band were not simulated, so the band must clear the cut
        let band_top = ps.truth.min_on(lo, hi) + ps.band;
        if cut > band_top {
            return data_err(format!(
                "band too small for blockwise count on block {}: cut {cut} exceeds \
                 guaranteed band top {band_top}",
                block + 1
            ));
        }
        let count = ps.ys()[ilo..ihi].iter().filter(|y| **y <= cut).count();
        acc += cut - kf / n * count as f64;
    }
    Ok(acc / kf)
}

/// Chebyshev confidence interval around the blockwise estimator:
/// `θ̂ ∓ α^{-1/2}·(2/(Kn) + K/n²)^{1/2}`.
pub fn freq_ci(theta_block: f64, k: usize, n: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Config("alpha must be in (0, 1)".into()));
    }
    let var = 2.0 / (k as f64 * n) + k as f64 / (n * n);
    let half = var.sqrt() / alpha.sqrt();
    Ok((theta_block - half, theta_block + half))
}
