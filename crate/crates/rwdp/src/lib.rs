//! Event-driven Monte Carlo laboratory for biased random walks on dynamical
//! percolation on `Z^d`.
//!
//! Each lattice edge refreshes at rate `mu`, coming up open with probability
//! `p`; a walker attempts jumps at rate 1 with direction law tilted by
//! `exp(+/-lambda)` along the first axis (`lambda = inf` gives the totally
//! asymmetric walk that only attempts `+e1`). The crate provides:
//!
//! - [`analytic`] — closed forms: the asymptotic speed and its second-order
//!   expansion, the 4-state projection chain of the environment seen from the
//!   walker, regeneration and gap-time expectations, and the critical-curve
//!   coefficient. These serve as oracles for everything below.
//! - [`environment`] — exact lazy simulation of the infinite edge field:
//!   an edge is materialized only when queried, which is exact because the
//!   refresh process is memoryless.
//! - [`infected_set`] — the copy bookkeeping that yields regeneration times
//!   with i.i.d. increments.
//! - [`walker`] — plain and regenerative event loops producing trajectories,
//!   regeneration blocks, and occupancy samples.
//! - [`estimators`] — ratio and batch-means speed estimators with standard
//!   errors, and weighted least squares for `a0 + a1 e^-lam + a2 e^-2lam`.
//! - [`couplings`] — two-walker coupled experiments: monotone disparity runs
//!   and the planted local gap scenarios.
//! - [`cli`] — experiment orchestration, deterministic replica fan-out, and
//!   CSV emission; the `rwdp` binary is a thin wrapper over it.
//!
//! Everything is deterministic given a 64-bit seed: replicas draw from
//! ChaCha8 substreams derived from (seed, replica index).
//!
//! See the crate examples for one runnable demonstration per capability,
//! e.g. `cargo run --release --example tarwdp_speed`.

pub mod analytic;
pub mod cli;
pub mod couplings;
pub mod environment;
pub mod error;
pub mod estimators;
pub mod infected_set;
pub mod params;
pub mod rng;
pub mod walker;

pub use error::{Error, Result};
pub use params::Params;
