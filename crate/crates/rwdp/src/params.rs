//! Model parameter bundle, validated once at construction.

use crate::error::{Error, Result};

/// Parameters of a biased random walk on dynamical percolation.
///
/// `lambda` is an extended real: any finite value `>= 0`, or
/// `f64::INFINITY` for the totally asymmetric walk (TARWDP) that only
/// attempts jumps in the `+e1` direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Lattice dimension, `d >= 1`.
    pub d: u32,
    /// Probability that a refreshed edge comes up open, `0 < p < 1`.
    pub p: f64,
    /// Edge refresh rate, `mu > 0`.
    pub mu: f64,
    /// Bias along the first axis, `lambda >= 0` or `+inf`.
    pub lambda: f64,
}

impl Params {
    pub fn new(d: u32, p: f64, mu: f64, lambda: f64) -> Result<Self> {
        if d < 1 {
            return Err(Error::invalid("d must be a positive integer"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p must lie in (0,1)"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu must be positive"));
        }
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::invalid("lambda must be nonnegative or inf"));
        }
        Ok(Params { d, p, mu, lambda })
    }

    /// The `lambda = inf` specialization attempting only `+e1` jumps.
    pub fn tarwdp(d: u32, p: f64, mu: f64) -> Result<Self> {
        Params::new(d, p, mu, f64::INFINITY)
    }

    pub fn is_totally_asymmetric(&self) -> bool {
        self.lambda.is_infinite()
    }
}
