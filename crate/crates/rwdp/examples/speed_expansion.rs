//! Second-order expansion of the one-dimensional speed in e^{-2 lambda}:
//! measure v(lambda) by the regeneration ratio and compare with
//! v_inf (1 - C e^{-2 lambda}).
//!
//! ```sh
//! cargo run --release --example speed_expansion
//! ```

use rwdp::estimators::{self, BlockMoments};
use rwdp::{analytic, walker, Params};

fn main() {
    let (mu, p) = (1.0, 0.5);
    println!(
        "v_inf = {:.6}, C = {:.6}\n",
        analytic::tarwdp_speed(mu, p),
        analytic::c_mu_p(mu, p)
    );
    println!("lambda   measured v          predicted v   deviation");
    for (i, lambda) in [1.5f64, 2.0, 2.5, 3.0].into_iter().enumerate() {
        let params = Params::new(1, p, mu, lambda).unwrap();
        let mut m = BlockMoments::default();
        walker::run_regen_with(&params, 2_000_000, 5 + i as u64, 0, |b| m.push_block(b)).unwrap();
        let est = estimators::regen_speed_from_moments(&m).unwrap();
        let predict = analytic::speed_expansion_1d(mu, p, lambda);
        println!(
            "{lambda:<6}   {:.6} +- {:.1e}   {predict:.6}      {:+.2e} ({:+.1} s.e.)",
            est.value,
            est.std_error,
            est.value - predict,
            (est.value - predict) / est.std_error
        );
    }
    println!("\n(the remainder of the truncation is of order e^(-4 lambda))");
}
