//! Tour of the closed-form layer at one parameter point.
//!
//! ```sh
//! cargo run --release --example formulas
//! ```

use rwdp::analytic::{self, GapScenario};
use rwdp::Params;

fn main() {
    let (d, p, mu, lambda) = (1u32, 0.5, 1.0, 2.0);
    let params = Params::new(d, p, mu, lambda).unwrap();
    println!("parameters: d={d} p={p} mu={mu} lambda={lambda}\n");

    println!("direction normalizer Z = {}", analytic::z_lambda(&params).unwrap());
    println!("asymptotic speed (lambda=inf)  v_inf = {}", analytic::tarwdp_speed(mu, p));
    println!("second-order coefficient       C     = {}", analytic::c_mu_p(mu, p));
    println!(
        "second-order speed truncation  v({lambda}) ~= {}  (valid: {})",
        analytic::speed_expansion_1d(mu, p, lambda),
        analytic::speed_expansion_1d_valid(lambda)
    );
    println!("mean regeneration time         E[tau1] = {}", analytic::expected_tau1(mu));
    println!("critical update rate           mu*(p)  = {}", analytic::critical_mu(p));

    let chain = analytic::projection_chain(mu, p);
    println!("\nadjacent-edge projection chain, states [(0,0) (1,0) (0,1) (1,1)]:");
    for (i, row) in chain.rate_matrix.iter().enumerate() {
        println!("  Q[{i}] = {row:?}");
    }
    println!("  stationary = {:?}", chain.stationary);
    println!("  left-open marginal  = {}", chain.left_open_marginal());
    println!(
        "  right-open marginal = {} (equals v_inf identically)",
        chain.right_open_marginal()
    );

    println!("\ngap-time expectations at the disagreement instant:");
    for s in [GapScenario::A, GapScenario::B, GapScenario::C, GapScenario::D] {
        println!("  E[S|{s}] = {}", analytic::gap_scenario_expectation(s, mu, p));
    }
    println!(
        "  consistency residual (weighted sum minus C) = {:e}",
        analytic::c_consistency_residual(mu, p)
    );

    println!("\nracing n rate-1 arrivals against one rate-mu clock:");
    for n in [1, 2, 5] {
        println!("  P[Gamma({n},1) < Exp(mu)] = {}", analytic::gamma_vs_exp(n, mu).unwrap());
    }

    println!(
        "\nfirst-order dichotomy coefficient in d=2: c1 = {}",
        analytic::c1_coefficient(2, mu, p).unwrap()
    );
    println!(
        "one-backward-attempt probability over k=5 blocks: {}",
        analytic::p_e1_prediction(mu, 3.0, 5).unwrap()
    );
}
