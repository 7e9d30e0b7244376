//! Regeneration blocks: the mean gap is e^{1/mu} regardless of bias and
//! density, increments decorrelate, and the copy count just before an
//! attempt is Poisson(1/mu) distributed.
//!
//! ```sh
//! cargo run --release --example regeneration_times
//! ```

use rwdp::{analytic, walker, Params};

fn block_stats(params: &Params, blocks: u64, seed: u64) -> (f64, f64, f64) {
    let mut dts = Vec::with_capacity(blocks as usize);
    walker::run_regen_with(params, blocks, seed, 0, |b| dts.push(b.dt)).unwrap();
    let n = dts.len() as f64;
    let mean = dts.iter().sum::<f64>() / n;
    let var = dts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mut cov = 0.0;
    for w in dts.windows(2) {
        cov += (w[0] - mean) * (w[1] - mean);
    }
    (mean, (var / n).sqrt(), cov / ((n - 1.0) * var))
}

fn main() {
    let blocks = 100_000u64;
    for mu in [0.5, 1.0, 2.0] {
        println!("mu = {mu}: expected mean block length e^(1/mu) = {:.6}", analytic::expected_tau1(mu));
        for (lambda, p, label) in [
            (f64::INFINITY, 0.5, "lambda=inf p=0.5"),
            (2.0, 0.3, "lambda=2   p=0.3"),
        ] {
            let params = Params::new(1, p, mu, lambda).unwrap();
            let (mean, se, rho1) = block_stats(&params, blocks, 7);
            println!("  {label}: mean {mean:.6} +- {se:.6}, lag-1 autocorrelation {rho1:+.5}");
        }
        println!();
    }
}
