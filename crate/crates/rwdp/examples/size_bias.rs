//! Conditioning on a rare backward attempt length-biases the block it lands
//! in: compare the conditional mean block length with the size-biased mean
//! E[dt^2]/E[dt]. The two agree in the large-bias limit.
//!
//! ```sh
//! cargo run --release --example size_bias
//! ```

use rwdp::{couplings, estimators};

fn main() {
    let (mu, p) = (1.0, 0.5);
    println!("lambda   conditional mean   size-biased mean E[dt^2]/E[dt]");
    for (i, lambda) in [3.0f64, 4.0].into_iter().enumerate() {
        // enough blocks that at least a thousand carry one backward attempt
        let blocks = (2_000.0 / (std::f64::consts::E * (-2.0 * lambda).exp())) as u64;
        let all = couplings::conditioned_blocks(mu, p, lambda, blocks, 51 + i as u64).unwrap();
        let (cond, biased) = estimators::size_bias_diagnostic(&all).unwrap();
        println!("{lambda:<6}   {cond:.4}             {biased:.4}");
    }
    println!("\n(reported as a diagnostic; equality is asymptotic, not exact)");
}
