//! Decompose k-block windows of a biased one-dimensional run by backward
//! attempt count: the one-backward-attempt window has probability
//! k e^{1/mu} e^{-2 lambda} to leading order, and two or more attempts are
//! an order e^{-4 lambda} event.
//!
//! ```sh
//! cargo run --release --example event_decomposition
//! ```

use rwdp::{analytic, couplings};

fn main() {
    let (mu, p, k) = (1.0, 0.5, 5u32);
    let reps = 50_000u64;
    println!("k = {k}, {reps} windows per bias\n");
    println!("lambda   P[none]   P[one]     predicted P[one]   P[two+]");
    for (i, lambda) in [2.5f64, 3.0, 3.5, 4.0].into_iter().enumerate() {
        let (p0, p1, p2) =
            couplings::event_decomposition(mu, p, lambda, k, reps, 31 + i as u64).unwrap();
        let pred = analytic::p_e1_prediction(mu, lambda, k).unwrap();
        println!("{lambda:<6}   {p0:.4}    {p1:.5}    {pred:.5}            {p2:.5}");
    }
    println!("\n(the prediction is the leading order; the remainder scales like e^(-4 lambda))");
}
