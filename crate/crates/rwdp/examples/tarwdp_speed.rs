//! Estimate the speed of the totally asymmetric walk two independent ways
//! and compare with the closed form mu p / (mu + 1 - p).
//!
//! ```sh
//! cargo run --release --example tarwdp_speed
//! ```

use rwdp::estimators::{self, BlockMoments};
use rwdp::walker::{self, PlainConfig};
use rwdp::{analytic, Params};

fn main() {
    let (mu, p) = (1.0, 0.5);
    let params = Params::tarwdp(1, p, mu).unwrap();
    let v = analytic::tarwdp_speed(mu, p);
    println!("target speed: mu p/(mu+1-p) = {v}\n");

    // one long trajectory split into 20 batches
    let mut cfg = PlainConfig::new(400_000.0);
    cfg.checkpoints = 20;
    let run = walker::run_plain(&params, &cfg, 1, 0).unwrap();
    let batch = estimators::batch_speed(&run.checkpoints, cfg.horizon).unwrap();
    println!(
        "batch means  ({} batches over T={}):  v = {:.6} +- {:.6}",
        batch.budget, cfg.horizon, batch.value, batch.std_error
    );

    // regeneration ratio over i.i.d. blocks
    let mut m = BlockMoments::default();
    walker::run_regen_with(&params, 150_000, 2, 0, |b| m.push_block(b)).unwrap();
    let regen = estimators::regen_speed_from_moments(&m).unwrap();
    println!(
        "regen ratio  ({} blocks):             v = {:.6} +- {:.6}",
        regen.budget, regen.value, regen.std_error
    );

    let joint = (batch.std_error.powi(2) + regen.std_error.powi(2)).sqrt();
    println!(
        "\nagreement: |batch - regen| = {:.2e}  ({:.2} joint s.e.)",
        (batch.value - regen.value).abs(),
        (batch.value - regen.value).abs() / joint
    );
}
