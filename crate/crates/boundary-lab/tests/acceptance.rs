//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured value and its gate.
//!
//! Tolerances follow a fixed discipline: exact finite-sample oracles where a
//! closed form exists (Gamma-CDF coverage, the overshoot law, exponential
//! overshoot marginals), Monte Carlo standard-error bands for sampled
//! quantities, and slope/floor assertions where the underlying statements
//! are purely asymptotic.

use boundary_lab::classes::make_ms_truth;
use boundary_lab::exp::config::{
    ExperimentConfig, ExperimentKind, KRule, PriorSpec, RateTarget, SamplerConfig,
};
use boundary_lab::exp::contraction::run_contraction;
use boundary_lab::exp::coverage_hist::{pcstar_truth, run_coverage_hist};
use boundary_lab::exp::cpp_limit::{pinned_equivalence_ks, run_cpp_limit};
use boundary_lab::exp::negative_kink::{run_negative_kink, slope, KINK_THETA0};
use boundary_lab::exp::negative_linear::run_negative_linear;
use boundary_lab::limitlaw::{
    coverage_oracle_hist, gauss_hist_limit, majorant, sample_limit_cpp, vjn_mean,
    vjn_second_moment,
};
use boundary_lab::mle::{
    freq_ci, histogram_mle, kjump_brute_force, kjump_mle, monotone_mle, theta_block,
};
use boundary_lab::numeric::{normal_cdf, normal_quantile};
use boundary_lab::point_set::{default_band_histogram, default_band_monotone, PointSet};
use boundary_lab::posterior::HistPosterior;
use boundary_lab::prior::{CppPrior, DensitySpec, GammaLevy, HistDensity, HistPrior, SubordinatorPrior};
use boundary_lab::rng::stream_rng;
use boundary_lab::stats::{ks_one_sample, ks_two_sample, mc_se, mean, variance};
use boundary_lab::step_fn::StepFn;
use boundary_lab::truth::Truth;

fn base_config(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        truth: None,
        prior: None,
        n_grid: vec![1e4],
        k_rule: KRule::SqrtN,
        alpha: 0.05,
        replications: 100,
        master_seed: 0xb0a2d,
        window: 1.0,
        band: None,
        sampler: SamplerConfig::default(),
        coverage_replications: 0,
        ms_slack: 8.0,
        ms_r: 2.0,
        rate_target: None,
        outdir: None,
    }
}

#[test]
fn criterion_01_histogram_overshoot_law() {
    // K = 50, n = 1e4, 2000 replications: pooled standardized overshoots
    // n·Δ_j·(â_j − a_j) against Exp(1), one-sample KS < 0.02.
    let k = 50usize;
    let n = 1e4;
    let reps = 2000u64;
    let grid: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
    let truth_fn = pcstar_truth(k, 11);
    let truth = Truth::step(truth_fn.clone());
    let truth_values = truth_fn.values_on_grid(&grid);
    let band = default_band_histogram(n, k);
    let mut pooled = Vec::with_capacity(reps as usize * k);
    for rep in 0..reps {
        let mut rng = stream_rng(101, rep);
        let ps = PointSet::simulate(&truth, n, 1.0, band, &mut rng).unwrap();
        let fit = histogram_mle(&ps, &grid).unwrap();
        let values = fit.fit.values_on_grid(&grid);
        for j in 0..k {
            let overshoot = values[j] - truth_values[j];
            pooled.push(n * (grid[j + 1] - grid[j]) * overshoot);
        }
    }
    let ks = ks_one_sample(&pooled, |x| 1.0 - (-x).exp()).unwrap();
    let pass = ks < 0.02;
    println!("criterion 1: {} — pooled overshoot KS {ks:.5} (gate < 0.02)", verdict(pass));
    assert!(pass);
}

#[test]
fn criterion_02_exact_coverage_of_plugin_interval() {
    // K = 100, n = 1e4, alpha = 0.05, 2000 replications: empirical coverage
    // within 3 binomial SEs of the Gamma-CDF oracle, and within 0.03 of 0.95.
    let mut cfg = base_config(ExperimentKind::Coverage);
    cfg.k_rule = KRule::Fixed { k: 100 };
    cfg.replications = 2000;
    cfg.master_seed = 102;
    let out = run_coverage_hist(&cfg).unwrap();
    let cover = mean(&out.replications.column("cover_ialpha").unwrap());
    let oracle = coverage_oracle_hist(100, 0.05).unwrap();
    let se = (oracle * (1.0 - oracle) / 2000.0).sqrt();
    let pass_oracle = (cover - oracle).abs() <= 3.0 * se;
    let pass_nominal = (cover - 0.95).abs() <= 0.03;
    println!(
        "criterion 2: {} — coverage {cover:.4} vs oracle {oracle:.4} (3 SE = {:.4}); \
         |cover − 0.95| = {:.4} (gate ≤ 0.03)",
        verdict(pass_oracle && pass_nominal),
        3.0 * se,
        (cover - 0.95).abs()
    );
    assert!(pass_oracle && pass_nominal);
}

#[test]
fn criterion_03_functional_bvm_histogram() {
    // K = 200: 1e5 exact-posterior draws of the integral against the
    // Gaussian functional limit, KS < 0.05.
    let k = 200usize;
    let n = 1e4;
    let grid: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
    let truth = Truth::step(pcstar_truth(k, 3));
    let mut rng = stream_rng(103, 0);
    let ps = PointSet::simulate(&truth, n, 1.0, default_band_histogram(n, k), &mut rng).unwrap();
    let prior = HistPrior::new(grid, HistDensity::Uniform { r: 1e6 }).unwrap();
    let post = HistPosterior::new(&ps, &prior).unwrap();
    let thetas = post.sample_theta(100_000, &mut rng).unwrap();
    let gauss = gauss_hist_limit(post.theta_mle(), k, n);
    let ks = ks_one_sample(&thetas, |x| gauss.cdf(x)).unwrap();
    let pass = ks < 0.05;
    println!(
        "criterion 3: {} — KS(exact posterior ϑ, Gaussian limit) {ks:.5} at K = 200 \
         (gate < 0.05)",
        verdict(pass)
    );
    assert!(pass);
}

#[test]
fn criterion_04_negative_linear_coverage() {
    // Truth f0(x) = x, n = 1e5, K = 317, alpha = 0.05, 500 replications.
    let mut cfg = base_config(ExperimentKind::NegativeLinear);
    cfg.n_grid = vec![1e5];
    cfg.k_rule = KRule::SqrtN;
    cfg.replications = 500;
    cfg.coverage_replications = 10_000;
    cfg.master_seed = 104;
    let out = run_negative_linear(&cfg).unwrap();
    let cover = out.summary["cover_ialpha"].as_f64().unwrap();
    let predicted = out.summary["predicted_coverage_clt"].as_f64().unwrap();
    let ks: Vec<f64> = out.summary["ks_vjn"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let v_mc = out.summary["vjn_mean_mc"].as_f64().unwrap();
    let v_quad = out.summary["vjn_mean_quadrature"].as_f64().unwrap();
    let v_se = out.summary["vjn_mean_mc_se"].as_f64().unwrap();

    let pass_ks = ks.iter().all(|d| *d < 0.02);
    println!(
        "criterion 4b: {} — overshoot-law reconstruction vs direct simulation, \
         per-coordinate KS {:?} (gate < 0.02)",
        verdict(pass_ks),
        ks.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>()
    );
    let pass_mean = (v_mc - v_quad).abs() <= 3.0 * v_se;
    println!(
        "criterion 4c: {} — sampler mean {v_mc:.5} vs quadrature {v_quad:.5} \
         (3 SE = {:.5})",
        verdict(pass_mean),
        3.0 * v_se
    );
    let pass_cover = cover <= 0.10;
    println!(
        "criterion 4a: {} — I(α) coverage {cover:.4} (gate ≤ 0.10). The exact \
         finite-n law of the overshoot predicts coverage {predicted:.4} at \
         n = 1e5, K = 317: the interval center misses the truth by only \
         ~0.3 standard deviations at this scale, and the asymptotic collapse \
         of coverage needs n beyond roughly 5e7. The gate is kept as stated \
         and this clause is expected to fail; the reconstruction and moment \
         oracles above verify the law the asymptotic argument rests on.",
        verdict(pass_cover)
    );
    assert!(pass_ks);
    assert!(pass_mean);
    assert!(pass_cover, "coverage {cover:.4} > 0.10 as predicted by the finite-n oracle ({predicted:.4})");
}

#[test]
fn criterion_05_blockwise_estimator() {
    // Lipschitz truth f0(x) = x, K = 100, n = 1e4, 2000 replications.
    let n = 1e4;
    let k = 100usize;
    let alpha = 0.05;
    let reps = 2000u64;
    let truth = Truth::linear(1.0, 0.0, 1.0);
    let band = default_band_monotone(n);
    let mut tb = Vec::with_capacity(reps as usize);
    let mut covered = 0u64;
    for rep in 0..reps {
        let mut rng = stream_rng(105, rep);
        let ps = PointSet::simulate(&truth, n, 1.0, band, &mut rng).unwrap();
        let t = theta_block(&ps, k, n).unwrap();
        let (lo, hi) = freq_ci(t, k, n, alpha).unwrap();
        if lo <= 0.5 && 0.5 <= hi {
            covered += 1;
        }
        tb.push(t);
    }
    let bias = mean(&tb) - 0.5;
    let se = mc_se(&tb);
    let pass_bias = bias.abs() < 3.0 * se;
    println!(
        "criterion 5a: {} — blockwise bias {bias:+.2e} (3 MC SE = {:.2e})",
        verdict(pass_bias),
        3.0 * se
    );

    let var_emp = variance(&tb);
    let var_formula = 2.0 / (k as f64 * n) + k as f64 / (n * n);
    // exact finite-n variance for the slope-one truth by quadrature of the
    // overshoot law: Var θ̂ = Var(g(V))/K³ + E[ψ(V)]/(Kn) with
    // ψ(v) = 1 − (1−v)₊²/2 and g(v) = v − 1 + (1−v)₊²/2
    let var_exact = exact_blockwise_variance(n, k);
    let ratio = var_emp / var_formula;
    let pass_var = (ratio - 1.0).abs() <= 0.10;
    println!(
        "criterion 5b: {} — empirical variance {var_emp:.3e} vs stated formula \
         {var_formula:.3e} (ratio {ratio:.3}, gate within 10%). The formula \
         2/(Kn) + K/n² is an upper bound, not an equality: the exact \
         finite-n variance for this truth is {var_exact:.3e} (ratio to \
         formula {:.3}), and the empirical value matches the exact one to \
         {:.1}%. The gate is kept as stated and this clause is expected to \
         fail.",
        verdict(pass_var),
        var_exact / var_formula,
        100.0 * (var_emp / var_exact - 1.0).abs()
    );

    let cover = covered as f64 / reps as f64;
    let se_cover = (0.95f64 * 0.05 / reps as f64).sqrt();
    let pass_cover = cover >= 0.95 - 3.0 * se_cover;
    println!(
        "criterion 5c: {} — C(0.05) coverage {cover:.4} (gate ≥ {:.4})",
        verdict(pass_cover),
        0.95 - 3.0 * se_cover
    );
    assert!(pass_bias);
    assert!(pass_cover);
    assert!(
        pass_var,
        "variance ratio {ratio:.3} outside 10% of the stated formula; exact oracle ratio {:.3}",
        var_exact / var_formula
    );
}

/// Exact variance of the blockwise estimator under the slope-one truth,
/// by quadrature against the overshoot density (body) plus closed-form
/// tails above the kink of the survival function.
fn exact_blockwise_variance(n: f64, k: usize) -> f64 {
    use boundary_lab::numeric::adaptive_simpson;
    let kf = k as f64;
    let r = n / (2.0 * kf * kf);
    let density = move |v: f64| 2.0 * r * v * (-r * v * v).exp();
    let psi = |v: f64| 1.0 - (1.0 - v).max(0.0).powi(2) / 2.0;
    let g = |v: f64| v - 1.0 + (1.0 - v).max(0.0).powi(2) / 2.0;
    let tail = (-r).exp();
    // tail moments for V > 1 where V − 1 ~ Exp(2r)
    let e_psi = adaptive_simpson(&|v| psi(v) * density(v), 0.0, 1.0, 1e-13) + tail;
    let e_g = adaptive_simpson(&|v| g(v) * density(v), 0.0, 1.0, 1e-13) + tail / (2.0 * r);
    let e_g2 = adaptive_simpson(&|v| g(v) * g(v) * density(v), 0.0, 1.0, 1e-13)
        + tail / (2.0 * r * r);
    let var_g = e_g2 - e_g * e_g;
    var_g / kf.powi(3) + e_psi / (kf * n)
}

#[test]
fn criterion_06_majorant_equals_kjump_mle() {
    // Strong-signal truths with K ∈ {1, 3, 5} at n = 1e5: the majorant equals
    // the K-jump MLE on ≥ 95% of replications; the dynamic program matches
    // exhaustive subset search on every instance with M ≤ 15 jumps.
    let n = 1e5;
    let t_end = 1.5;
    let band = default_band_monotone(n);
    let mut all_pass = true;
    let mut dp_checked = 0usize;
    for &k in &[1usize, 3, 5] {
        let truth_fn = make_ms_truth(k, 2.0, n, t_end, 8.0).unwrap();
        let truth = Truth::step(truth_fn.clone());
        let mut agree = 0usize;
        let reps = 200u64;
        for rep in 0..reps {
            let mut rng = stream_rng(106 + k as u64, rep);
            let ps = PointSet::simulate(&truth, n, t_end, band, &mut rng).unwrap();
            let stair = monotone_mle(&ps).unwrap();
            let kfit = kjump_mle(&stair, k).unwrap();
            let m = majorant(&ps, &truth_fn).unwrap();
            if m.majorant == kfit.fit {
                agree += 1;
            }
            if stair.fit.jump_count() <= 15 {
                let bf = kjump_brute_force(&stair, k).unwrap();
                assert_eq!(kfit.fit, bf.fit, "DP disagrees with brute force");
                dp_checked += 1;
            }
        }
        let rate = agree as f64 / reps as f64;
        let pass = rate >= 0.95;
        all_pass &= pass;
        println!(
            "criterion 6 (K = {k}): {} — majorant = K-jump MLE on {rate:.3} of \
             replications (gate ≥ 0.95)",
            verdict(pass)
        );
    }
    // the acceptance data rarely yields staircases that small, so add
    // randomized small staircases to exercise the exhaustive cross-check
    let mut rng = stream_rng(1061, 0);
    use rand::Rng;
    for _ in 0..200 {
        let m = rng.random_range(1..=10usize);
        let mut x = 0.0;
        let mut breaks = vec![0.0];
        for _ in 0..m {
            x += 0.02 + rng.random::<f64>() * 0.1;
            breaks.push(x);
        }
        breaks.push(x + 0.2 + rng.random::<f64>());
        let mut v = 0.0;
        let values: Vec<f64> = (0..=m)
            .map(|_| {
                v += 0.01 + rng.random::<f64>();
                v
            })
            .collect();
        let fit = StepFn::new(breaks, values).unwrap();
        let dim = fit.jump_count();
        let stair = boundary_lab::mle::MleResult {
            fit,
            boundary_indices: (0..=dim).collect(),
            model_dim: dim,
        };
        for k in 0..=m {
            let dp = kjump_mle(&stair, k).unwrap();
            let bf = kjump_brute_force(&stair, k).unwrap();
            assert_eq!(dp.fit, bf.fit);
            dp_checked += 1;
        }
    }
    println!(
        "criterion 6 (DP): PASS — dynamic program identical to brute force on \
         {dp_checked} instances with M ≤ 15"
    );
    assert!(all_pass);
    assert!(dp_checked > 200);
}

fn cpp_limit_config() -> ExperimentConfig {
    let mut cfg = base_config(ExperimentKind::CppLimit);
    cfg.n_grid = vec![1e4];
    cfg.k_rule = KRule::Fixed { k: 3 };
    cfg.window = 1.5;
    cfg.replications = 20;
    cfg.coverage_replications = 2000;
    cfg.master_seed = 107;
    cfg.prior = Some(PriorSpec::Cpp(CppPrior::gamma21_exp(3.0)));
    cfg.sampler = SamplerConfig { iters: 100_000, ..Default::default() };
    cfg
}

#[test]
fn criteria_07_08_cpp_limit_shape() {
    let out = run_cpp_limit(&cpp_limit_config()).unwrap();
    let mass = out.summary["post_mass_ktrue_mean"].as_f64().unwrap();
    let pass_mass = mass >= 0.9;
    println!(
        "criterion 7a: {} — mean posterior mass on K = 3: {mass:.4} over 20 \
         replications × 1e5 iterations (gate ≥ 0.9)",
        verdict(pass_mass)
    );

    let (ks0, ks1) = pinned_equivalence_ks(1000.0, 400_000, 1071).unwrap();
    let pass_pinned = ks0 < 0.03 && ks1 < 0.03;
    println!(
        "criterion 7b: {} — pinned-jump chain vs exact histogram sampler, \
         level KS {ks0:.4} / {ks1:.4} (gate < 0.03)",
        verdict(pass_pinned)
    );

    let ks_limit = out.summary["ks_chain_vs_limit_median"].as_f64().unwrap();
    let ks_gauss = out.summary["ks_chain_vs_gauss_median"].as_f64().unwrap();
    let pass_limit = ks_limit < 0.1;
    let pass_gauss = ks_gauss < 0.12;
    println!(
        "criterion 8a: {} — median KS(chain ϑ, explicit limit ϑ) {ks_limit:.4} \
         (gate < 0.1)",
        verdict(pass_limit)
    );
    println!(
        "criterion 8b: {} — median KS(chain ϑ, Gaussian limit) {ks_gauss:.4} \
         (gate < 0.12)",
        verdict(pass_gauss)
    );

    let cover = out.summary["cover_gauss_ci"].as_f64().unwrap();
    let analogue = out.summary["gamma_analogue_2k1"].as_f64().unwrap();
    let pass_cover = (cover - analogue).abs() <= 0.05;
    println!(
        "criterion 8c: {} — limit-interval coverage {cover:.4} vs Gamma \
         analogue with 2K+1 degrees {analogue:.4} (gate within ±0.05)",
        verdict(pass_cover)
    );
    let agree = out.summary["majorant_eq_kjump_rate"].as_f64().unwrap();
    println!("  (majorant = K-jump MLE agreement rate in the coverage sweep: {agree:.4})");
    assert!(pass_mass && pass_pinned && pass_limit && pass_gauss && pass_cover);
}

#[test]
fn criterion_09_contraction_slopes() {
    // monotone truth (kink) + CPP prior over n ∈ {1e3, 1e4, 1e5}
    let mut cfg = base_config(ExperimentKind::Contract);
    cfg.n_grid = vec![1e3, 1e4, 1e5];
    cfg.k_rule = KRule::Power { exponent: 1.0 / 3.0 };
    cfg.window = 1.5;
    cfg.replications = 4;
    cfg.master_seed = 109;
    cfg.rate_target = Some(RateTarget::SqrtLogNOverN);
    cfg.sampler = SamplerConfig { iters: 400_000, ..Default::default() };
    let mono = run_contraction(&cfg).unwrap().summary["slope"].as_f64().unwrap();
    let pass_mono = (-0.6..=-0.4).contains(&mono);
    println!(
        "criterion 9a: {} — monotone truth + CPP prior slope {mono:.4} \
         (gate in [−0.6, −0.4])",
        verdict(pass_mono)
    );

    // piecewise-constant truth with K_n = ceil(n^{1/3}) jumps
    let mut cfg_pc = cfg.clone();
    cfg_pc.n_grid = vec![1e4, 31623.0, 1e5];
    cfg_pc.rate_target = Some(RateTarget::KnLogNOverN);
    cfg_pc.sampler.iters = 150_000;
    let pc = run_contraction(&cfg_pc).unwrap().summary["slope"].as_f64().unwrap();
    let pass_pc = (-0.8..=-0.5).contains(&pc);
    println!(
        "criterion 9b: {} — growing-K piecewise-constant truth slope {pc:.4} \
         (gate in [−0.8, −0.5])",
        verdict(pass_pc)
    );

    // Gamma-subordinator prior at truncation 1e-3, with a delta-halving check
    let mk_sub = |delta: f64| {
        PriorSpec::Subordinator(SubordinatorPrior {
            levy: GammaLevy { c: 1.0, beta: 1.0 },
            delta,
            start: DensitySpec::Exponential { rate: 1.0 },
        })
    };
    let mut cfg_sub = cfg.clone();
    cfg_sub.replications = 3;
    cfg_sub.prior = Some(mk_sub(1e-3));
    cfg_sub.sampler.iters = 1_200_000;
    let sub = run_contraction(&cfg_sub).unwrap().summary["slope"].as_f64().unwrap();
    let mut cfg_sub2 = cfg_sub.clone();
    cfg_sub2.prior = Some(mk_sub(5e-4));
    let sub_half = run_contraction(&cfg_sub2).unwrap().summary["slope"].as_f64().unwrap();
    let pass_sub = (-0.6..=-0.4).contains(&sub);
    let pass_stab = (sub - sub_half).abs() < 0.05;
    println!(
        "criterion 9c: {} — subordinator prior slope {sub:.4} (gate in \
         [−0.6, −0.4]); delta-halving shift {:.4} (gate < 0.05)",
        verdict(pass_sub && pass_stab),
        (sub - sub_half).abs()
    );
    assert!(pass_mono && pass_pc && pass_sub && pass_stab);
}

#[test]
fn criterion_10_kink_negative_result() {
    let mut cfg = base_config(ExperimentKind::NegativeKink);
    cfg.n_grid = vec![1e3, 1e4, 1e5];
    cfg.window = 1.5;
    cfg.replications = 4;
    cfg.master_seed = 110;
    cfg.sampler = SamplerConfig { iters: 100_000, ..Default::default() };
    let out = run_negative_kink(&cfg).unwrap();
    // mass below the pinned exact integral at n = 1e4
    let ns = out.replications.column("n").unwrap();
    let below = out.replications.column("mass_below_theta0").unwrap();
    let at_1e4: Vec<f64> = ns
        .iter()
        .zip(&below)
        .filter(|(n, _)| **n == 1e4)
        .map(|(_, b)| *b)
        .collect();
    let mass = mean(&at_1e4);
    let pass_mass = mass >= 0.95;
    println!(
        "criterion 10a: {} — posterior mass below ∫₀¹ f₀ = {KINK_THETA0} at \
         n = 1e4: {mass:.4} (gate ≥ 0.95)",
        verdict(pass_mass)
    );
    let k_slope = out.summary["k_q99_loglog_slope"].as_f64().unwrap();
    let pass_slope = k_slope < 0.5;
    println!(
        "criterion 10b: {} — posterior-K 99th percentile log-log growth \
         {k_slope:.4} (gate < 0.5)",
        verdict(pass_slope)
    );
    assert!(pass_mass && pass_slope);
}

#[test]
fn criterion_11_oracle_equivalence_suite() {
    // (a) exact vs rejection histogram samplers
    let truth = Truth::step(pcstar_truth(4, 9));
    let mut rng = stream_rng(111, 0);
    let ps = PointSet::simulate(&truth, 2000.0, 1.0, 1.5, &mut rng).unwrap();
    let grid: Vec<f64> = (0..=4).map(|j| j as f64 / 4.0).collect();
    let prior = HistPrior::new(grid, HistDensity::Uniform { r: 3.0 }).unwrap();
    let post = HistPosterior::new(&ps, &prior).unwrap();
    let n_draws = 100_000;
    let exact: Vec<f64> =
        (0..n_draws).map(|_| post.sample_coord_exact(1, &mut rng).unwrap()).collect();
    let rejection: Vec<f64> =
        (0..n_draws).map(|_| post.sample_coord_rejection(1, &mut rng).unwrap()).collect();
    let ks = ks_two_sample(&exact, &rejection).unwrap();
    let pass_a = ks < 0.02;
    println!(
        "criterion 11a: {} — exact vs rejection sampler KS {ks:.4} at 1e5 draws \
         (gate < 0.02)",
        verdict(pass_a)
    );

    // (b) merge-scan KS equals the quadratic brute force on sizes ≤ 200
    use rand::Rng;
    let mut max_diff: f64 = 0.0;
    for _ in 0..60 {
        let na = rng.random_range(1..=200);
        let nb = rng.random_range(1..=200);
        let a: Vec<f64> = (0..na).map(|_| (rng.random::<f64>() * 6.0).round() / 3.0).collect();
        let b: Vec<f64> = (0..nb).map(|_| (rng.random::<f64>() * 6.0).round() / 3.0).collect();
        let fast = ks_two_sample(&a, &b).unwrap();
        let ecdf = |s: &[f64], x: f64| s.iter().filter(|v| **v <= x).count() as f64 / s.len() as f64;
        let brute = a
            .iter()
            .chain(&b)
            .map(|x| (ecdf(&a, *x) - ecdf(&b, *x)).abs())
            .fold(0.0f64, f64::max);
        max_diff = max_diff.max((fast - brute).abs());
    }
    let pass_b = max_diff < 1e-12;
    println!(
        "criterion 11b: {} — merge-scan KS vs brute force, max |Δ| = {max_diff:.2e}",
        verdict(pass_b)
    );

    // (c) reversible-jump detailed balance on randomized proposal pairs
    let max_rel = detailed_balance_max_violation();
    let pass_c = max_rel <= 1e-10;
    println!(
        "criterion 11c: {} — detailed-balance identity, max relative violation \
         {max_rel:.2e} over 1000 proposal pairs (gate ≤ 1e-10)",
        verdict(pass_c)
    );

    // (d) the integral decomposition identity holds exactly per limit draw
    let n = 5e4;
    let truth_fn = make_ms_truth(3, 2.0, n, 1.5, 8.0).unwrap();
    let truth = Truth::step(truth_fn.clone());
    let mut rng = stream_rng(112, 0);
    let ps = PointSet::simulate(&truth, n, 1.5, default_band_monotone(n), &mut rng).unwrap();
    let m = majorant(&ps, &truth_fn).unwrap();
    let mut max_err: f64 = 0.0;
    for _ in 0..2000 {
        let d = sample_limit_cpp(&m, n, &mut rng).unwrap();
        let rel = (d.theta() - d.theta_decomposed(&m)).abs() / (1.0 + d.theta().abs());
        max_err = max_err.max(rel);
    }
    let pass_d = max_err <= 1e-12;
    println!(
        "criterion 11d: {} — integral decomposition identity, max relative error \
         {max_err:.2e} over 2000 draws (gate ≤ 1e-12)",
        verdict(pass_d)
    );
    assert!(pass_a && pass_b && pass_c && pass_d);
}

/// Max relative violation of `lr(x→y) + lr(y→x) = 0` over randomized valid
/// proposal pairs, the log form of the reversible-jump balance identity
/// `α(x→y)·π̃(x)·q(x→y) = α(y→x)·π̃(y)·q(y→x)` with the Jacobian folded in.
fn detailed_balance_max_violation() -> f64 {
    use boundary_lab::rjmcmc::{Move, RjContext};
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};
    let truth_fn = StepFn::from_jumps(1.5, 0.4, &[(0.5, 0.8)]).unwrap();
    let truth = Truth::step(truth_fn);
    let ps = PointSet::simulate_seeded(&truth, 400.0, 1.5, 0.8, 113).unwrap();
    let prior = CppPrior::gamma21_exp(2.0);
    let ctx = RjContext::new(&ps, &prior, None).unwrap();
    let stair = monotone_mle(&ps).unwrap();
    let kfit = kjump_mle(&stair, 1).unwrap();
    let mut state = boundary_lab::prior::CppDraw {
        times: kfit.fit.jump_times().to_vec(),
        heights: {
            let v = kfit.fit.values();
            let mut h = vec![v[0] - 1e-3];
            h.extend(v.windows(2).map(|w| w[1] - w[0]));
            h
        },
    };
    let w = [0.25; 4];
    let mut rng = stream_rng(114, 0);
    let mut max_rel: f64 = 0.0;
    let mut checked = 0;
    while checked < 1000 {
        let mv = match rng.random_range(0..4) {
            0 => {
                let k = rng.random_range(0..state.heights.len());
                let xi: f64 = StandardNormal.sample(&mut rng);
                Move::Height { k, factor: (0.5 * xi).exp() }
            }
            1 if state.k() > 0 => {
                let k = rng.random_range(1..=state.k());
                Move::Time { k, to: state.times[k - 1] + 0.04 * (2.0 * rng.random::<f64>() - 1.0) }
            }
            2 => Move::Birth { u: rng.random::<f64>(), beta: rng.random::<f64>() },
            3 if state.k() > 0 => Move::Death { ell: rng.random_range(1..=state.k()) },
            _ => continue,
        };
        let Some(new_state) = ctx.apply(&state, &mv) else { continue };
        if !ctx.log_post(&new_state).is_finite() {
            continue;
        }
        let fwd = ctx.log_ratio(&state, &mv, &w, 0.5).unwrap();
        let rev_mv = ctx.reverse(&state, &mv);
        let rev = ctx.log_ratio(&new_state, &rev_mv, &w, 0.5).unwrap();
        max_rel = max_rel.max((fwd + rev).abs() / (1.0 + fwd.abs()));
        if checked % 3 == 0 {
            state = new_state;
        }
        checked += 1;
    }
    max_rel
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
