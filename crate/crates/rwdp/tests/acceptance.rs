//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them). Every
//! tolerance is fixed here, not tuned at runtime; all randomness is seeded,
//! so the suite is deterministic for a given build.

use rayon::prelude::*;

use rwdp::analytic::{self, GapScenario};
use rwdp::couplings;
use rwdp::estimators::{self, BlockMoments, Verdict};
use rwdp::rng::{exp_time, substream};
use rwdp::walker::{self, PlainConfig};
use rwdp::Params;

/// 20x20 grid over (mu, p) in (0.1, 3) x (0.05, 0.95).
fn grid() -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(400);
    for i in 0..20 {
        for j in 0..20 {
            g.push((
                0.1 + 2.9 * (i as f64 + 0.5) / 20.0,
                0.05 + 0.9 * (j as f64 + 0.5) / 20.0,
            ));
        }
    }
    g
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Criterion 1: closed-form identity suite over the 400-point grid.
#[test]
fn criterion_01_closed_form_identities() {
    let t0 = std::time::Instant::now();
    let mut max_row = 0.0f64;
    let mut max_xq = 0.0f64;
    let mut max_marginal = 0.0f64;
    let mut max_resid = 0.0f64;
    let mut max_c1_crit = 0.0f64;
    for (mu, p) in grid() {
        let chain = analytic::projection_chain(mu, p);
        for row in &chain.rate_matrix {
            max_row = max_row.max(row.iter().sum::<f64>().abs());
        }
        for k in 0..4 {
            let dot: f64 = (0..4)
                .map(|i| chain.stationary[i] * chain.rate_matrix[i][k])
                .sum();
            max_xq = max_xq.max(dot.abs());
        }
        max_marginal =
            max_marginal.max((chain.right_open_marginal() - analytic::tarwdp_speed(mu, p)).abs());
        max_resid = max_resid.max(analytic::c_consistency_residual(mu, p).abs());
        let c = analytic::c_mu_p(mu, p);
        assert!(c > 0.0 && c < 2.0, "C out of (0,2) at mu={mu} p={p}");
        max_c1_crit = max_c1_crit.max(
            analytic::c1_coefficient(2, analytic::critical_mu(p), p)
                .unwrap()
                .abs(),
        );
    }
    assert!(max_row <= 1e-12, "row sums {max_row:e}");
    assert!(max_xq <= 1e-12, "xQ residual {max_xq:e}");
    assert!(max_marginal <= 1e-12, "marginal identity {max_marginal:e}");
    assert!(max_resid <= 1e-9, "consistency residual {max_resid:e}");
    assert!(max_c1_crit <= 1e-12, "c1 on critical curve {max_c1_crit:e}");
    let c_large = analytic::c_mu_p(1e3, 0.5);
    assert!((c_large - 2.0).abs() <= 0.02, "C(1e3, 0.5) = {c_large}");
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 1.0, "closed-form suite took {dt:.3}s");
    println!(
        "criterion 1: PASS - grid identities: max row sum {max_row:.1e}, max xQ {max_xq:.1e}, \
         max marginal {max_marginal:.1e}, max residual {max_resid:.1e}, C(1e3,.5)={c_large:.4} ({dt:.2}s)"
    );
}

/// Criterion 2: racing n rate-1 arrivals against a rate-mu clock: the
/// empirical win probability is within 4 sigma of (mu+1)^-n at one million
/// draws per pair.
#[test]
fn criterion_02_gamma_vs_exponential() {
    let t0 = std::time::Instant::now();
    let draws = 1_000_000u64;
    let mut lines = Vec::new();
    for (ni, &n) in [1u32, 2, 5].iter().enumerate() {
        for (mi, &mu) in [0.5f64, 1.0, 2.0].iter().enumerate() {
            let mut rng = substream(0x0201, (ni * 3 + mi) as u64);
            let mut hits = 0u64;
            for _ in 0..draws {
                let gamma: f64 = (0..n).map(|_| exp_time(&mut rng, 1.0)).sum();
                let exp = exp_time(&mut rng, mu);
                if gamma < exp {
                    hits += 1;
                }
            }
            let frac = hits as f64 / draws as f64;
            let expect = analytic::gamma_vs_exp(n, mu).unwrap();
            let se = (expect * (1.0 - expect) / draws as f64).sqrt();
            assert!(
                (frac - expect).abs() < 4.0 * se,
                "n={n} mu={mu}: {frac} vs {expect}"
            );
            lines.push(format!("({n},{mu}):{:.1}s.e.", (frac - expect).abs() / se));
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 10.0, "gamma-vs-exp took {dt:.1}s");
    println!(
        "criterion 2: PASS - P[Gamma(n,1)<Exp(mu)] within 4 s.e. on all 9 pairs [{}] ({dt:.1}s)",
        lines.join(" ")
    );
}

/// Criterion 3: regeneration-time law: mean block length e^{1/mu},
/// negligible lag-1 autocorrelation, invariance in (lambda, p).
#[test]
fn criterion_03_regeneration_times() {
    let t0 = std::time::Instant::now();
    let blocks = 100_000u64;
    let mut msg = Vec::new();
    for (mu, seed) in [(0.5f64, 0x0301u64), (1.0, 0x0302)] {
        // the reference run: lambda = inf, p = 0.5
        let params = Params::tarwdp(1, 0.5, mu).unwrap();
        let mut dts = Vec::with_capacity(blocks as usize);
        walker::run_regen_with(&params, blocks, seed, 0, |b| dts.push(b.dt)).unwrap();
        let (mean, sd) = mean_sd(&dts);
        let expect = analytic::expected_tau1(mu);
        let se = sd / (blocks as f64).sqrt();
        assert!(
            (mean - expect).abs() < 4.0 * se,
            "mu={mu}: mean {mean} vs {expect}"
        );
        // lag-1 autocorrelation of the block lengths
        let mut num = 0.0;
        for w in dts.windows(2) {
            num += (w[0] - mean) * (w[1] - mean);
        }
        let rho = num / ((blocks - 1) as f64 * sd * sd);
        assert!(
            rho.abs() < 4.0 / (blocks as f64).sqrt(),
            "mu={mu}: lag-1 autocorrelation {rho}"
        );
        // invariance: a different bias and density must give the same law
        let params2 = Params::new(1, 0.3, mu, 2.0).unwrap();
        let mut dts2 = Vec::with_capacity(blocks as usize);
        walker::run_regen_with(&params2, blocks, seed ^ 0xff, 0, |b| dts2.push(b.dt)).unwrap();
        let (mean2, sd2) = mean_sd(&dts2);
        let z = (mean - mean2).abs()
            / (se * se + sd2 * sd2 / blocks as f64).sqrt();
        assert!(z < 4.0, "mu={mu}: (lambda,p) dependence z = {z}");
        msg.push(format!(
            "mu={mu}: mean {mean:.4} (e^(1/mu) {expect:.4}), rho1 {rho:.4}, invariance z {z:.2}"
        ));
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 60.0, "regeneration suite took {dt:.1}s");
    println!("criterion 3: PASS - {} ({dt:.1}s)", msg.join("; "));
}

/// Criterion 4: totally asymmetric speed 1/3 at mu=1, p=0.5, from both
/// estimators, which also agree with each other.
#[test]
fn criterion_04_tarwdp_speed() {
    let t0 = std::time::Instant::now();
    let params = Params::tarwdp(1, 0.5, 1.0).unwrap();
    let horizon = 1e5;
    let replicas = 10u64;
    let runs: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let run = walker::run_plain(&params, &PlainConfig::new(horizon), 0x0401, r).unwrap();
            run.state.pos[0] as f64 / horizon
        })
        .collect();
    let (mean, sd) = mean_sd(&runs);
    let se_plain = sd / (replicas as f64).sqrt();
    let v = analytic::tarwdp_speed(1.0, 0.5);
    let tol = (4.0 * se_plain).max(0.003 * v);
    assert!(
        (mean - v).abs() < tol,
        "plain speed {mean} vs {v} (tol {tol})"
    );

    let mut m = BlockMoments::default();
    walker::run_regen_with(&params, 200_000, 0x0402, 0, |b| m.push_block(b)).unwrap();
    let regen = estimators::regen_speed_from_moments(&m).unwrap();
    assert!(
        (regen.value - v).abs() < (4.0 * regen.std_error).max(0.003 * v),
        "regen speed {} vs {v}",
        regen.value
    );
    let joint = (se_plain.powi(2) + regen.std_error.powi(2)).sqrt();
    assert!(
        (mean - regen.value).abs() < 4.0 * joint,
        "estimators disagree: {mean} vs {}",
        regen.value
    );
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 60.0, "speed suite took {dt:.1}s");
    println!(
        "criterion 4: PASS - plain {mean:.6}+-{se_plain:.1e}, regen {:.6}+-{:.1e}, target 1/3 ({dt:.1}s)",
        regen.value, regen.std_error
    );
}

/// Criterion 5: stationary projection occupancy within +-0.005 of the
/// closed-form stationary vector; far-edge marginal at i=2 within 4 sigma
/// of p.
#[test]
fn criterion_05_stationary_projection() {
    let t0 = std::time::Instant::now();
    let params = Params::tarwdp(1, 0.5, 1.0).unwrap();
    // rate 2 over (horizon - burn_in) = 500000 gives one million samples
    let mut cfg = PlainConfig::new(500_100.0);
    cfg.inspection_rate = 2.0;
    let run = walker::run_plain(&params, &cfg, 0x0501, 0).unwrap();
    let frac = walker::occupancy_fractions(&run.samples, 100.0).unwrap();
    let n: usize = run.samples.iter().filter(|s| s.t > 100.0).count();
    assert!(n >= 990_000, "only {n} samples");
    let chain = analytic::projection_chain(1.0, 0.5);
    for (i, (f, x)) in frac.iter().zip(chain.stationary).enumerate() {
        assert!((f - x).abs() <= 0.005, "state {i}: {f} vs {x}");
    }
    let reps = 100_000u64;
    let far = walker::far_edge_marginal(&params, 2, 200.0, reps, 0x0502).unwrap();
    let se = (0.5 * 0.5 / reps as f64).sqrt();
    assert!((far - 0.5).abs() < 4.0 * se, "far edge {far}");
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 120.0, "stationary suite took {dt:.1}s");
    println!(
        "criterion 5: PASS - occupancy ({:.4} {:.4} {:.4} {:.4}) vs (0.2619 0.4048 0.1190 0.2143), \
         far edge {far:.4} vs 0.5, {n} samples ({dt:.1}s)",
        frac[0], frac[1], frac[2], frac[3]
    );
}

fn regen_speed_parallel(
    params: &Params,
    blocks_total: u64,
    replicas: u64,
    seed: u64,
) -> estimators::SpeedEstimate {
    let per = blocks_total / replicas;
    let moments: Vec<BlockMoments> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut m = BlockMoments::default();
            walker::run_regen_with(params, per, seed, r, |b| m.push_block(b)).unwrap();
            m
        })
        .collect();
    let mut m = BlockMoments::default();
    for x in &moments {
        m.merge(x);
    }
    estimators::regen_speed_from_moments(&m).unwrap()
}

/// Criterion 6: second-order expansion of the one-dimensional speed at
/// lambda in {2, 2.5}: 2e8 attempted jumps per lambda, agreement within
/// max(4 sigma, 7e-4) (the slack covers the e^{-4 lambda} remainder).
#[test]
fn criterion_06_second_order_expansion_1d() {
    let t0 = std::time::Instant::now();
    let (mu, p) = (1.0, 0.5);
    // 2e8 attempts, e^{1/mu} attempts per block
    let blocks_total = (2e8 / analytic::expected_tau1(mu)).round() as u64;
    let mut msg = Vec::new();
    for (i, &lambda) in [2.0f64, 2.5].iter().enumerate() {
        let params = Params::new(1, p, mu, lambda).unwrap();
        let est = regen_speed_parallel(&params, blocks_total, 8, 0x0601 + i as u64);
        let predict = analytic::speed_expansion_1d(mu, p, lambda);
        let tol = (4.0 * est.std_error).max(7e-4);
        assert!(
            (est.value - predict).abs() <= tol,
            "lambda={lambda}: {} vs {predict} (tol {tol:.1e})",
            est.value
        );
        msg.push(format!(
            "v({lambda})={:.6}+-{:.1e} vs {predict:.6}",
            est.value, est.std_error
        ));
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("criterion 6: PASS - {} ({dt:.0}s)", msg.join(", "));
}

/// Criterion 7: monotone disparity coupling: zero order violations over
/// 1e5 coupled pairs, mean gap -2/3, crossing-time means (4, 2).
#[test]
fn criterion_07_disparity_coupling() {
    let t0 = std::time::Instant::now();
    let reps = 100_000u64;
    let runs: Vec<couplings::DisparityRun> = (0..reps)
        .into_par_iter()
        .map(|r| couplings::disparity_run(1.0, 0.5, 0.0, 1.0, 50.0, 0x0701, r).unwrap())
        .collect();
    assert!(runs.iter().all(|r| !r.order_violation));
    assert!(runs.iter().all(|r| r.s_x >= r.s_y), "crossing order broken");
    let gaps: Vec<f64> = runs.iter().map(|r| r.final_gap as f64).collect();
    let (gap, sd) = mean_sd(&gaps);
    let se = sd / (reps as f64).sqrt();
    let target = analytic::speed_disparity(1.0, 0.5, 0.0, 1.0).unwrap();
    assert!((gap - target).abs() < 4.0 * se, "gap {gap} vs {target}");
    let sx: Vec<f64> = runs.iter().map(|r| r.s_x).collect();
    let sy: Vec<f64> = runs.iter().map(|r| r.s_y).collect();
    let (mx, sdx) = mean_sd(&sx);
    let (my, sdy) = mean_sd(&sy);
    assert!(
        (mx - 4.0).abs() < 4.0 * sdx / (reps as f64).sqrt(),
        "mean s_x {mx}"
    );
    assert!(
        (my - 2.0).abs() < 4.0 * sdy / (reps as f64).sqrt(),
        "mean s_y {my}"
    );
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 120.0, "disparity suite took {dt:.1}s");
    println!(
        "criterion 7: PASS - 0 violations, gap {gap:.4} vs {target:.4}, \
         crossings ({mx:.3}, {my:.3}) vs (4, 2) ({dt:.1}s)"
    );
}

/// Criterion 8: planted gap scenarios: means within 4 sigma of the
/// closed forms (A: 1/p, B: 4.6, C: 1.4) and D identically zero.
#[test]
fn criterion_08_gap_scenarios() {
    let t0 = std::time::Instant::now();
    let reps = 100_000u64;
    let (mu, p) = (1.0, 0.5);
    let mut msg = Vec::new();
    for (scenario, seed) in [
        (GapScenario::A, 0x0801u64),
        (GapScenario::B, 0x0802),
        (GapScenario::C, 0x0803),
    ] {
        let ss: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|r| couplings::gap_run(scenario, mu, p, seed, r).unwrap().s)
            .collect();
        let (mean, sd) = mean_sd(&ss);
        let se = sd / (reps as f64).sqrt();
        let expect = analytic::gap_scenario_expectation(scenario, mu, p);
        assert!(
            (mean - expect).abs() < 4.0 * se,
            "{scenario}: {mean} vs {expect} (se {se:.1e})"
        );
        msg.push(format!("{scenario}: {mean:.4} vs {expect}"));
    }
    for r in 0..1000 {
        assert_eq!(
            couplings::gap_run(GapScenario::D, mu, p, 0x0804, r).unwrap().s,
            0.0
        );
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 120.0, "gap suite took {dt:.1}s");
    println!(
        "criterion 8: PASS - {}; D = 0 exactly ({dt:.1}s)",
        msg.join(", ")
    );
}

/// Criterion 9: backward-attempt decomposition over k-block windows at
/// lambda=3, k=5: P[E1] within 4 sigma plus the documented second-order
/// slack 5 e^{-4 lambda} (k e^{1/mu})^2 of the leading-order prediction;
/// P[E2] consistent with the e^{-4 lambda} scale.
#[test]
fn criterion_09_event_decomposition() {
    let t0 = std::time::Instant::now();
    let (mu, p, lambda, k) = (1.0, 0.5, 3.0, 5u32);
    let reps = 100_000u64;
    // parallel super-block chunks on independent streams
    let chunks = 8u64;
    let per = reps / chunks;
    let counts: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| couplings::event_decomposition(mu, p, lambda, k, per, 0x0901 + c).unwrap())
        .collect();
    let n = chunks as f64;
    let p0 = counts.iter().map(|c| c.0).sum::<f64>() / n;
    let p1 = counts.iter().map(|c| c.1).sum::<f64>() / n;
    let p2 = counts.iter().map(|c| c.2).sum::<f64>() / n;
    let pred = analytic::p_e1_prediction(mu, lambda, k).unwrap();
    let sigma = (pred * (1.0 - pred) / reps as f64).sqrt();
    let slack = 5.0 * (-4.0 * lambda).exp() * (k as f64 * analytic::expected_tau1(mu)).powi(2);
    assert!(
        (p1 - pred).abs() < 4.0 * sigma + slack,
        "P[E1] {p1} vs {pred} (tol {:.2e})",
        4.0 * sigma + slack
    );
    assert!(p2 <= 10.0 * pred * pred, "P[E2] {p2} vs {:.2e}", 10.0 * pred * pred);
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 300.0, "event suite took {dt:.1}s");
    println!(
        "criterion 9: PASS - P[E0] {p0:.4}, P[E1] {p1:.5} vs {pred:.5} \
         (4 sigma {:.1e} + slack {slack:.1e}), P[E2] {p2:.5} ({dt:.1}s)",
        4.0 * sigma
    );
}

/// Criterion 10: dichotomy sign test in d=2 at p=0.5: increasing at mu=1,
/// decreasing at mu=0.25, both at |z| >= 3; on the critical curve mu=0.5
/// the a1 nullity check |z| < 3 plus the second-order sign z_a2 <= -2 (if
/// the a2 power is not reached, the criterion degrades to a1 nullity plus
/// the analytic c1-vanishing identity, reported explicitly).
#[test]
fn criterion_10_dichotomy_sign_test() {
    let t0 = std::time::Instant::now();
    let lams = [1.5f64, 2.0, 2.5, 3.0];
    let p = 0.5;
    let events_budget = 2e8;
    let fit_for = |mu: f64, seed: u64| {
        let blocks_total =
            (events_budget / (2.0 * analytic::expected_tau1(mu))).round() as u64;
        let pts: Vec<(f64, f64, f64)> = lams
            .iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let params = Params::new(2, p, mu, lambda).unwrap();
                let est = regen_speed_parallel(&params, blocks_total, 8, seed + 16 * i as u64);
                (lambda, est.value, est.std_error)
            })
            .collect();
        estimators::fit_exponential(&pts).unwrap()
    };

    let fit1 = fit_for(1.0, 0x0a01);
    let fit2 = fit_for(0.25, 0x0a41);
    // critical curve mu = sqrt(p(1-p)) = 0.5
    let fit3 = fit_for(0.5, 0x0a81);
    let c1_crit = analytic::c1_coefficient(2, analytic::critical_mu(p), p).unwrap();

    let a2_report = if fit3.z_a2 <= -2.0 {
        format!("z_a2 {:.1} <= -2 confirms the negative second order", fit3.z_a2)
    } else {
        format!(
            "a2 power not reached at this budget (z_a2 {:.2}); degrading to the a1 nullity \
             check plus the analytic c1-vanishing identity (c1 = {c1_crit:.1e})",
            fit3.z_a2
        )
    };
    let dt = t0.elapsed().as_secs_f64();
    let nullity_ok = fit3.z_a1.abs() < 3.0;
    println!(
        "criterion 10: {} - mu=1 {} (z_a1 {:.1}, a1 {:.4}), mu=0.25 {} (z_a1 {:.1}, a1 {:.4}); \
         mu=0.5 critical curve: a1 {:.4}+-{:.4} (z_a1 {:.1}) {} the |z|<3 nullity check; \
         {a2_report}; analytic c1 vanishes ({:.1e}) ({dt:.0}s)",
        if nullity_ok { "PASS" } else { "FAIL" },
        estimators::dichotomy_sign_test(&fit1),
        fit1.z_a1,
        fit1.a1,
        estimators::dichotomy_sign_test(&fit2),
        fit2.z_a1,
        fit2.a1,
        fit3.a1,
        fit3.se_a1(),
        fit3.z_a1,
        if nullity_ok { "meets" } else { "misses" },
        c1_crit
    );

    assert_eq!(
        estimators::dichotomy_sign_test(&fit1),
        Verdict::Increasing,
        "mu=1: z_a1 {}",
        fit1.z_a1
    );
    assert!(fit1.z_a1 <= -3.0);
    assert_eq!(
        estimators::dichotomy_sign_test(&fit2),
        Verdict::Decreasing,
        "mu=0.25: z_a1 {}",
        fit2.z_a1
    );
    assert!(fit2.z_a1 >= 3.0);
    assert!(fit3.z_a2 <= -2.0, "second-order sign not resolved: z_a2 {}", fit3.z_a2);
    assert!(c1_crit.abs() <= 1e-12);
    // Known red: the order-3 remainder of the expansion biases the fitted
    // a1 on the critical curve by roughly 40 standard errors at this budget
    // (measured a1 ~= -0.11 against a true first-order coefficient of 0),
    // so a 3-sigma nullity test cannot pass at this precision with this
    // lambda grid. The magnitude collapse relative to the off-critical fits
    // and the analytic c1 identity above carry the substantive content.
    assert!(
        nullity_ok,
        "critical curve: a1 = {} +- {} (z {}) is not within 3 sigma of 0; the fitted a1 is \
         dominated by the order-3 remainder of the expansion, not by a first-order term \
         (compare |a1| here against {:.3} and {:.3} off the curve)",
        fit3.a1,
        fit3.se_a1(),
        fit3.z_a1,
        fit1.a1.abs(),
        fit2.a1.abs()
    );
}

/// Criterion 11: determinism: identical config and seed give byte-identical
/// data rows for every command, and 1e4 replica substreams never collide.
#[test]
fn criterion_11_determinism() {
    use rand::RngCore;
    use rwdp::cli::{self, CommonArgs};
    let t0 = std::time::Instant::now();

    let common = |seed: u64| CommonArgs {
        d: Some(1),
        p: Some(0.5),
        mu: Some(1.0),
        lambda: Some(f64::INFINITY),
        seed: Some(seed),
        threads: Some(2),
        ..Default::default()
    };
    let render: Vec<(&str, Box<dyn Fn() -> Vec<u8>>)> = vec![
        (
            "formulas",
            Box::new(|| {
                let mut b = Vec::new();
                let mut c = common(1);
                c.lambda = Some(2.0);
                cli::cmd_formulas(&cli::FormulasArgs { common: c }, &mut b).unwrap();
                b
            }),
        ),
        (
            "simulate-plain",
            Box::new(|| {
                let mut b = Vec::new();
                cli::cmd_simulate(
                    &cli::SimulateArgs {
                        common: common(2),
                        mode: Some("plain".into()),
                        horizon: Some(2000.0),
                        replicas: Some(4),
                        ..Default::default()
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
        (
            "simulate-regen",
            Box::new(|| {
                let mut b = Vec::new();
                cli::cmd_simulate(
                    &cli::SimulateArgs {
                        common: common(3),
                        mode: Some("regen".into()),
                        blocks: Some(2000),
                        replicas: Some(4),
                        ..Default::default()
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
        (
            "stationary",
            Box::new(|| {
                let mut b = Vec::new();
                cli::cmd_stationary(
                    &cli::StationaryArgs {
                        common: common(4),
                        horizon: Some(3000.0),
                        inspection_rate: Some(1.0),
                        burn_in: Some(50.0),
                        far_edge: Some(2),
                        far_reps: Some(2000),
                        far_time: Some(30.0),
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
        (
            "coupling-disparity",
            Box::new(|| {
                let mut b = Vec::new();
                cli::cmd_coupling(
                    &cli::CouplingArgs {
                        common: common(5),
                        experiment: Some("disparity".into()),
                        reps: Some(3000),
                        horizon: Some(50.0),
                        ..Default::default()
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
        (
            "coupling-gap",
            Box::new(|| {
                let mut b = Vec::new();
                cli::cmd_coupling(
                    &cli::CouplingArgs {
                        common: common(6),
                        experiment: Some("gap".into()),
                        scenario: Some("B".into()),
                        reps: Some(3000),
                        ..Default::default()
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
        (
            "events",
            Box::new(|| {
                let mut b = Vec::new();
                let mut c = common(7);
                c.lambda = Some(3.0);
                cli::cmd_events(
                    &cli::EventsArgs {
                        common: c,
                        k: Some(5),
                        reps: Some(3000),
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
        (
            "fit",
            Box::new(|| {
                let dir = std::env::temp_dir().join("rwdp_acc_fit");
                std::fs::create_dir_all(&dir).unwrap();
                let path = dir.join("pts.csv");
                std::fs::write(&path, "1.5,0.3044,0.0003\n2,0.3225,0.0003\n2.5,0.3297,0.0003\n")
                    .unwrap();
                let mut b = Vec::new();
                cli::cmd_fit(
                    &cli::FitArgs {
                        common: CommonArgs::default(),
                        input: Some(path),
                    },
                    &mut b,
                )
                .unwrap();
                b
            }),
        ),
    ];
    for (name, f) in &render {
        let a = f();
        let b = f();
        assert_eq!(a, b, "{name} output not byte-identical on rerun");
        assert!(!a.is_empty());
    }

    // substream smoke test: 1e4 streams, first 64 outputs each, no dupes
    let mut seen = std::collections::HashSet::new();
    for stream in 0..10_000u64 {
        let mut rng = substream(0x0b01, stream);
        let sig: Vec<u64> = (0..64).map(|_| rng.next_u64()).collect();
        assert!(seen.insert(sig), "duplicate stream at {stream}");
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 60.0, "determinism suite took {dt:.1}s");
    println!(
        "criterion 11: PASS - byte-identical reruns across {} commands, 10^4 distinct substreams ({dt:.1}s)",
        render.len()
    );
}
