//! The lazy edge field: states materialize only when queried, yet every
//! marginal matches the always-on refresh process exactly.
//!
//! ```sh
//! cargo run --release --example lazy_environment
//! ```

use rwdp::environment::{EdgeKey, Environment, Point};
use rwdp::Params;

fn key(x: i64) -> EdgeKey {
    EdgeKey {
        base: Point::from_slice(&[x]),
        axis: 0,
    }
}

fn main() {
    let (mu, p) = (0.7, 0.35);
    let params = Params::tarwdp(1, p, mu).unwrap();
    let mut env = Environment::new(params, 99, 1);

    println!("two-point function of a planted open edge, {} reps per gap:", 100_000);
    println!("gap      P[still open]   exact e^(-mu t) + (1-e^(-mu t)) p");
    for dt in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let reps = 100_000;
        let mut open = 0u64;
        for i in 0..reps {
            let k = key(i as i64);
            env.plant(&k, true, 0.0);
            if env.query(&k, dt) {
                open += 1;
            }
        }
        env.clear();
        let exact = (-mu * dt).exp() + (1.0 - (-mu * dt).exp()) * p;
        println!("{dt:<5}    {:.4}          {exact:.4}", open as f64 / reps as f64);
    }

    // freezing pins a state against any amount of elapsed time
    let k = key(-1);
    let s = env.freeze(&k, 0.0);
    let later = env.query(&k, 1e6);
    println!("\nfrozen edge: state {s} at t=0, still {later} at t=1e6");
    env.unfreeze(&k, 1e6);
    println!("after unfreeze the lazy refresh resumes from the unfreeze time");
    println!("\ncache holds {} records: only what was touched", env.cache_len());
}
