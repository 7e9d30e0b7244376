//! The monotonicity dichotomy in d=2: fit measured speeds to
//! a0 + a1 e^{-lambda} + a2 e^{-2 lambda} and read the sign of a1.
//! The speed is eventually increasing when mu^2 > p(1-p), decreasing when
//! mu^2 < p(1-p); the critical curve mu = sqrt(p(1-p)) separates them.
//!
//! Budgets here are demo-sized (~2e7 events per point); the acceptance
//! suite runs the full-budget version.
//!
//! ```sh
//! cargo run --release --example dichotomy_fit
//! ```

use rayon::prelude::*;
use rwdp::estimators::{self, BlockMoments};
use rwdp::{analytic, walker, Params};

fn speed(d: u32, mu: f64, p: f64, lambda: f64, blocks: u64, seed: u64) -> (f64, f64) {
    let params = Params::new(d, p, mu, lambda).unwrap();
    let replicas = 4u64;
    let ms: Vec<BlockMoments> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut m = BlockMoments::default();
            walker::run_regen_with(&params, blocks / replicas, seed, r, |b| m.push_block(b))
                .unwrap();
            m
        })
        .collect();
    let mut m = BlockMoments::default();
    for x in &ms {
        m.merge(x);
    }
    let est = estimators::regen_speed_from_moments(&m).unwrap();
    (est.value, est.std_error)
}

fn main() {
    let p = 0.5;
    let lams = [1.5f64, 2.0, 2.5, 3.0];
    println!("critical update rate at p={p}: mu* = {}\n", analytic::critical_mu(p));
    for (mu, seed) in [(1.0, 41u64), (0.25, 42), (0.5, 43)] {
        let blocks = (2e7 / (2.0 * analytic::expected_tau1(mu))) as u64;
        let pts: Vec<(f64, f64, f64)> = lams
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let (v, se) = speed(2, mu, p, l, blocks, seed + 8 * i as u64);
                (l, v, se)
            })
            .collect();
        let fit = estimators::fit_exponential(&pts).unwrap();
        let c1 = analytic::c1_coefficient(2, mu, p).unwrap();
        println!(
            "mu = {mu}: a1 = {:+.4} +- {:.4} (z {:+.1})  verdict: {}  [first-order coefficient c1 = {:+.4}]",
            fit.a1,
            fit.se_a1(),
            fit.z_a1,
            estimators::dichotomy_sign_test(&fit),
            c1
        );
    }
    println!(
        "\n(on the critical curve the fitted a1 retains an order e^(-3 lambda) remainder;\n\
         only its collapse relative to the off-critical values is meaningful at demo budgets)"
    );
}
