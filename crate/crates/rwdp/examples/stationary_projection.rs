//! Occupancy fractions of the two edges adjacent to the totally asymmetric
//! walker against the closed-form stationary law of the projection chain,
//! plus the marginals of edges further ahead.
//!
//! ```sh
//! cargo run --release --example stationary_projection
//! ```

use rwdp::walker::{self, PlainConfig};
use rwdp::{analytic, Params};

fn main() {
    let (mu, p) = (1.0, 0.5);
    let params = Params::tarwdp(1, p, mu).unwrap();

    let mut cfg = PlainConfig::new(100_100.0);
    cfg.inspection_rate = 2.0;
    let run = walker::run_plain(&params, &cfg, 3, 0).unwrap();
    let frac = walker::occupancy_fractions(&run.samples, 100.0).unwrap();
    let chain = analytic::projection_chain(mu, p);

    println!("state (left,right)   empirical   stationary");
    for (i, name) in ["(0,0)", "(1,0)", "(0,1)", "(1,1)"].iter().enumerate() {
        println!("  {name}            {:.5}     {:.5}", frac[i], chain.stationary[i]);
    }
    println!(
        "\nright-open marginal: empirical {:.5}, analytic {:.5} (= the speed)",
        frac[2] + frac[3],
        chain.right_open_marginal()
    );

    println!("\nmarginals of the relative edges ahead (t = 200, 20000 replicas):");
    for i in 1..=3 {
        let m = walker::far_edge_marginal(&params, i, 200.0, 20_000, 11 + i as u64).unwrap();
        let expect = if i == 1 { chain.right_open_marginal() } else { p };
        println!("  e_{i}: empirical {m:.4}, expected {expect:.4}");
    }
}
