//! Two-sample diagnostics and small statistical helpers.

use crate::error::{cfg_err, Result};

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|` by
/// merge scan over the sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return cfg_err("ks_two_sample requires nonempty samples");
    }
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        // advance past ties together so the ECDF gap is measured between atoms
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < xs.len() && xs[i] == x {
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample Kolmogorov–Smirnov statistic against a CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return cfg_err("ks_one_sample requires a nonempty sample");
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}

/// Default bin count for [`tv_binned`]: `ceil((|a|+|b|)^{1/3})`.
pub fn tv_default_bins(na: usize, nb: usize) -> usize {
    (((na + nb) as f64).powf(1.0 / 3.0).ceil() as usize).max(2)
}

/// Binned total-variation estimate `(1/2)·Σ|p̂_i − q̂_i|` over a common
/// equal-width grid spanning both samples. Biased; report-only, never a gate.
pub fn tv_binned(a: &[f64], b: &[f64], bins: usize) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return cfg_err("tv_binned requires nonempty samples");
    }
    if bins < 2 {
        return cfg_err("tv_binned requires bins >= 2");
    }
    let lo = a.iter().chain(b).fold(f64::INFINITY, |m, x| m.min(*x));
    let hi = a.iter().chain(b).fold(f64::NEG_INFINITY, |m, x| m.max(*x));
    if lo == hi {
        return Ok(0.0);
    }
    let width = (hi - lo) / bins as f64;
    let idx = |x: f64| (((x - lo) / width) as usize).min(bins - 1);
    let mut pa = vec![0.0f64; bins];
    let mut pb = vec![0.0f64; bins];
    for x in a {
        pa[idx(*x)] += 1.0 / a.len() as f64;
    }
    for x in b {
        pb[idx(*x)] += 1.0 / b.len() as f64;
    }
    Ok(0.5 * pa.iter().zip(&pb).map(|(p, q)| (p - q).abs()).sum::<f64>())
}

/// Type-7 interpolated quantile (the default of most statistical software).
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Monte Carlo standard error of the mean.
pub fn mc_se(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Chi-square goodness-of-fit of observed counts against a discrete pmf,
/// pooling cells from the right until every expected count is at least 5.
/// Returns `(statistic, degrees_of_freedom)`.
pub fn chi2_gof_counts(observed: &[u64], expected: &[f64]) -> (f64, usize) {
    assert_eq!(observed.len(), expected.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(expected) {
        obs_acc += *o as f64;
        exp_acc += *e;
        if exp_acc >= 5.0 {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if exp_acc > 0.0 || obs_acc > 0.0 {
        if let Some(last) = cells.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        } else {
            cells.push((obs_acc, exp_acc));
        }
    }
    let stat = cells
        .iter()
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum::<f64>();
    (stat, cells.len().saturating_sub(1))
}

/// Chi-square upper quantile via Wilson–Hilferty; adequate for GOF gating.
pub fn chi2_quantile(df: usize, p: f64) -> f64 {
    let k = df as f64;
    let z = crate::numeric::normal_quantile(p);
    let c = 1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt();
    k * c * c * c
}

/// Effective sample size from the autocorrelation of a chain trace, using
/// Geyer's initial positive sequence on lag pairs.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return n as f64;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return n as f64;
    }
    let acf = |lag: usize| -> f64 {
        xs.iter()
            .zip(&xs[lag..])
            .map(|(a, b)| (a - m) * (b - m))
            .sum::<f64>()
            / (n as f64 * var)
    };
    let mut sum = 0.0;
    let mut lag = 1;
    while lag + 1 < n / 2 {
        let pair = acf(lag) + acf(lag + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        lag += 2;
    }
    (n as f64 / (1.0 + 2.0 * sum)).min(n as f64)
}


#[cfg(test)]
mod trend_tests {
    use super::*;
    use rand_distr::{Distribution, Gamma, Normal};

    #[test]
    fn clt_in_tv_trend_over_k() {
        // binned TV between standardized Gamma(K) draws and normal draws
        // decreases over K in {10, 100, 1000}, with Monte Carlo slack
        let mut rng = crate::rng::seed_rng(99);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let draws = 60_000;
        let mut tvs = Vec::new();
        for k in [10usize, 100, 1000] {
            let gamma = Gamma::new(k as f64, 1.0).unwrap();
            let a: Vec<f64> = (0..draws)
                .map(|_| (gamma.sample(&mut rng) - k as f64) / (k as f64).sqrt())
                .collect();
            let b: Vec<f64> = (0..draws).map(|_| normal.sample(&mut rng)).collect();
            tvs.push(tv_binned(&a, &b, tv_default_bins(draws, draws)).unwrap());
        }
        let slack = 3.0 / (draws as f64).sqrt();
        assert!(tvs[1] < tvs[0] + slack, "TV trend broken at K=100: {tvs:?}");
        assert!(tvs[2] < tvs[1] + slack, "TV trend broken at K=1000: {tvs:?}");
        assert!(tvs[2] < tvs[0], "TV must decrease overall: {tvs:?}");
    }
}
