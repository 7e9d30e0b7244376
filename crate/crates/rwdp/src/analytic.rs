//! Closed-form quantities for the walk and its environment.
//!
//! These are pure functions of the model parameters and serve as oracles for
//! the simulation modules: every Monte Carlo estimate in this crate is tested
//! against a value computed here.

use crate::error::{Error, Result};
use crate::params::Params;

/// Normalizing constant of the direction law,
/// `Z_lambda = e^lambda + e^-lambda + 2d - 2`.
///
/// Undefined for `lambda = inf`; the degenerate direction law is handled
/// by the walker directly.
pub fn z_lambda(params: &Params) -> Result<f64> {
    if params.lambda.is_infinite() {
        return Err(Error::invalid("z_lambda requires finite lambda"));
    }
    Ok(params.lambda.exp() + (-params.lambda).exp() + 2.0 * params.d as f64 - 2.0)
}

/// Speed of the rate-1 totally asymmetric walk: `mu p / (mu + 1 - p)`.
pub fn tarwdp_speed(mu: f64, p: f64) -> f64 {
    mu * p / (mu + 1.0 - p)
}

/// Second-order coefficient of the one-dimensional speed expansion,
/// `C = (4 mu^3 + 2(p+5) mu^2 + 8 mu + 2(1-p)^2)
///      / ((2mu+1+p)(mu+1-p)(mu+p+1))`.
///
/// Lies in (0, 2) for all valid parameters and tends to 2 as `mu -> inf`.
pub fn c_mu_p(mu: f64, p: f64) -> f64 {
    let num = 4.0 * mu.powi(3) + 2.0 * (p + 5.0) * mu.powi(2) + 8.0 * mu + 2.0 * (1.0 - p).powi(2);
    let den = (2.0 * mu + 1.0 + p) * (mu + 1.0 - p) * (mu + p + 1.0);
    num / den
}

/// Smallest bias for which the second-order truncation is considered valid:
/// below this the correction term is not smaller than the leading term.
pub const EXPANSION_VALID_MIN_LAMBDA: f64 = 1.0;

/// Whether [`speed_expansion_1d`] is inside its documented validity range.
pub fn speed_expansion_1d_valid(lambda: f64) -> bool {
    lambda >= EXPANSION_VALID_MIN_LAMBDA
}

/// Second-order truncation of the one-dimensional speed,
/// `v(lambda) ~= v_inf - v_inf * C * e^{-2 lambda}` with
/// `v_inf = mu p/(mu+1-p)` and `C` from [`c_mu_p`].
///
/// The omitted remainder is `O(e^{-4 lambda})`. The truncation is returned
/// for every finite `lambda`, but it is an asymptotic expansion: use
/// [`speed_expansion_1d_valid`] to check `lambda >= 1`.
pub fn speed_expansion_1d(mu: f64, p: f64, lambda: f64) -> f64 {
    let v = tarwdp_speed(mu, p);
    v - v * c_mu_p(mu, p) * (-2.0 * lambda).exp()
}

/// The 4-state projection of the environment seen from the totally
/// asymmetric walker onto the two adjacent edges.
///
/// State order is `[(0,0), (1,0), (0,1), (1,1)]` where the pair is
/// (left edge open?, right edge open?). Every consumer in this crate uses
/// this order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionChain {
    /// Conservative rate matrix `Q`; rows sum to zero.
    pub rate_matrix: [[f64; 4]; 4],
    /// Stationary distribution, the solution of `x Q = 0`, `sum x = 1`.
    pub stationary: [f64; 4],
}

impl ProjectionChain {
    /// Stationary probability that the edge behind the walker is open:
    /// `x_(1,0) + x_(1,1)`.
    pub fn left_open_marginal(&self) -> f64 {
        self.stationary[1] + self.stationary[3]
    }

    /// Stationary probability that the edge ahead of the walker is open:
    /// `x_(0,1) + x_(1,1)`, identically `mu p/(mu+1-p)`.
    pub fn right_open_marginal(&self) -> f64 {
        self.stationary[2] + self.stationary[3]
    }
}

/// Rate matrix and stationary law of the adjacent-edge projection chain.
///
/// The stationary vector is evaluated from its closed forms; solving
/// `x Q = 0` numerically is left to tests as an independent oracle.
pub fn projection_chain(mu: f64, p: f64) -> ProjectionChain {
    let q = p; // open probability on refresh
    let rate_matrix = [
        [-2.0 * mu * q, mu * q, mu * q, 0.0],
        [mu * (1.0 - q), -mu, 0.0, mu * q],
        [mu * (1.0 - q), 1.0 - q, -mu - 1.0, (mu + 1.0) * q],
        [
            0.0,
            (mu + 1.0) * (1.0 - q),
            mu * (1.0 - q),
            -(1.0 - q) * (2.0 * mu + 1.0),
        ],
    ];
    let den = 2.0 * mu * mu - mu * p - p * p + 3.0 * mu + 1.0;
    let x00 = (2.0 * mu * mu * p * p - mu * p.powi(3) - 4.0 * mu * mu * p + 5.0 * mu * p * p
        + 2.0 * mu * mu
        - 7.0 * mu * p
        + p * p
        + 3.0 * mu
        - 2.0 * p
        + 1.0)
        / den;
    let x10 = -(2.0 * mu * mu * p - mu * p * p - 2.0 * mu * mu + 6.0 * mu * p - 5.0 * mu + 2.0 * p
        - 2.0)
        * p
        / den;
    let x01 = -mu * p * (2.0 * mu * p - p * p - 2.0 * mu + 2.0 * p - 1.0) / den;
    let x11 = p * p * mu * (2.0 * mu - p + 3.0) / den;
    ProjectionChain {
        rate_matrix,
        stationary: [x00, x10, x01, x11],
    }
}

/// `P[Gamma(n,1) < Exp(mu)] = (mu+1)^-n`: the chance that n consecutive
/// rate-1 arrivals all land before an independent rate-mu clock rings.
pub fn gamma_vs_exp(n: u32, mu: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("gamma_vs_exp requires n >= 1"));
    }
    Ok((mu + 1.0).powi(-(n as i32)))
}

/// Mean regeneration time `E[tau_1] = e^{1/mu}`; independent of `lambda`,
/// `p`, and the dimension.
pub fn expected_tau1(mu: f64) -> f64 {
    (1.0 / mu).exp()
}

/// The four local configurations at the unique backward attempt, in the
/// state order of the projection chain: `A = (0,1)`, `B = (1,1)`,
/// `C = (1,0)`, `D = (0,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapScenario {
    A,
    B,
    C,
    D,
}

impl std::str::FromStr for GapScenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(GapScenario::A),
            "B" | "b" => Ok(GapScenario::B),
            "C" | "c" => Ok(GapScenario::C),
            "D" | "d" => Ok(GapScenario::D),
            _ => Err(Error::invalid("scenario must be one of A, B, C, D")),
        }
    }
}

impl std::fmt::Display for GapScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            GapScenario::A => "A",
            GapScenario::B => "B",
            GapScenario::C => "C",
            GapScenario::D => "D",
        };
        f.write_str(c)
    }
}

/// Expected gap time `E[S | scenario]`:
///
/// - `A`: `1/p` (one open edge to compensate),
/// - `B`: `1/p + (mu^2 + 3mu - p + 3)/(p (1+mu)(mu+p+1))` (two open edges),
/// - `C`: `(mu^2 + 2mu - p + 1)/(p (1+mu)(mu+p+1))` (open then closed,
///   net of the other walker's own crossing time),
/// - `D`: `0` (neither walker moved).
pub fn gap_scenario_expectation(scenario: GapScenario, mu: f64, p: f64) -> f64 {
    match scenario {
        GapScenario::A => 1.0 / p,
        GapScenario::B => {
            1.0 / p + (mu * mu + 3.0 * mu - p + 3.0) / (p * (1.0 + mu) * (mu + p + 1.0))
        }
        GapScenario::C => (mu * mu + 2.0 * mu - p + 1.0) / (p * (1.0 + mu) * (mu + p + 1.0)),
        GapScenario::D => 0.0,
    }
}

/// Residual of the consistency identity
/// `x_(0,1) E[S|A] + x_(1,1) E[S|B] + x_(1,0) E[S|C] - C_{mu,p}`,
/// which vanishes identically (to 1e-10 in doubles).
pub fn c_consistency_residual(mu: f64, p: f64) -> f64 {
    let chain = projection_chain(mu, p);
    let weighted = chain.stationary[2] * gap_scenario_expectation(GapScenario::A, mu, p)
        + chain.stationary[3] * gap_scenario_expectation(GapScenario::B, mu, p)
        + chain.stationary[1] * gap_scenario_expectation(GapScenario::C, mu, p);
    weighted - c_mu_p(mu, p)
}

/// Long-run expected lag `(p1 - p2)/(mu + 1 - p)` between two coupled
/// totally asymmetric walkers whose distinguished edge `{0,1}` starts open
/// with probabilities `p1 < p2`.
pub fn speed_disparity(mu: f64, p: f64, p1: f64, p2: f64) -> Result<f64> {
    check_disparity_probs(p1, p2)?;
    Ok((p1 - p2) / (mu + 1.0 - p))
}

/// Mean time for a walker to cross an edge that is initially open with
/// probability `p_init` and refreshes to open with probability `p`:
/// `(mu + 1 - p_init)/(mu p)`.
pub fn crossing_time_mean(mu: f64, p: f64, p_init: f64) -> f64 {
    (mu + 1.0 - p_init) / (mu * p)
}

pub(crate) fn check_disparity_probs(p1: f64, p2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
        return Err(Error::invalid("p1 and p2 must lie in [0,1]"));
    }
    if p1 >= p2 {
        return Err(Error::invalid("p1 must be strictly smaller than p2"));
    }
    Ok(())
}

/// The critical update rate `mu(p) = sqrt(p(1-p))` separating eventually
/// increasing from eventually decreasing speed in `d >= 2`.
pub fn critical_mu(p: f64) -> f64 {
    (p * (1.0 - p)).sqrt()
}

/// First-order derivative coefficient
/// `c1 = (2d-2) p (mu^2 - p(1-p)) / (1-p+mu)^2`.
///
/// Has the sign of `mu^2 - p(1-p)` and vanishes exactly on the critical
/// curve. Requires `d >= 2`: in one dimension there are no orthogonal
/// directions and the coefficient is not defined.
pub fn c1_coefficient(d: u32, mu: f64, p: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("c1_coefficient requires d >= 2"));
    }
    let dd = (2 * d - 2) as f64;
    Ok(dd * p * (mu * mu - p * (1.0 - p)) / (1.0 - p + mu).powi(2))
}

/// Leading order of the probability of exactly one backward attempt over a
/// k-block window in one dimension: `k e^{1/mu} e^{-2 lambda}`.
///
/// The omitted remainder is `O(e^{-4 lambda})`; callers should stay in the
/// regime `lambda >= 1` where the leading term dominates.
pub fn p_e1_prediction(mu: f64, lambda: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("p_e1_prediction requires k >= 1"));
    }
    if !(lambda >= 1.0) {
        return Err(Error::invalid("p_e1_prediction requires lambda >= 1"));
    }
    Ok(k as f64 * (1.0 / mu).exp() * (-2.0 * lambda).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: f64 = std::f64::consts::E;

    /// 20x20 grid over (mu, p) in (0.1, 3) x (0.05, 0.95), cell midpoints.
    pub(crate) fn parameter_grid() -> Vec<(f64, f64)> {
        let mut grid = Vec::with_capacity(400);
        for i in 0..20 {
            for j in 0..20 {
                let mu = 0.1 + (3.0 - 0.1) * (i as f64 + 0.5) / 20.0;
                let p = 0.05 + (0.95 - 0.05) * (j as f64 + 0.5) / 20.0;
                grid.push((mu, p));
            }
        }
        grid
    }

    #[test]
    fn z_lambda_values() {
        let z = |d, l| z_lambda(&Params::new(d, 0.5, 1.0, l).unwrap()).unwrap();
        assert_eq!(z(1, 0.0), 2.0);
        assert_eq!(z(2, 0.0), 4.0);
        assert!((z(1, 2.0f64.ln()) - 2.5).abs() < 1e-15);
        assert!(z_lambda(&Params::tarwdp(1, 0.5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn tarwdp_speed_values() {
        assert!((tarwdp_speed(1.0, 0.5) - 1.0 / 3.0).abs() < 1e-15);
        // fast-update limit accepts each jump with probability p
        assert!((tarwdp_speed(1e9, 0.5) - 0.5).abs() < 1e-9);
        // no open edges, no motion
        assert!(tarwdp_speed(1.0, 1e-12) < 1e-11);
    }

    #[test]
    fn c_mu_p_values() {
        // 23.5 / (3.5 * 1.5 * 2.5) = 188/105
        assert!((c_mu_p(1.0, 0.5) - 188.0 / 105.0).abs() < 1e-12);
        assert!((c_mu_p(1e3, 0.5) - 2.0).abs() < 0.02);
        for &(mu, p) in &parameter_grid() {
            let c = c_mu_p(mu, p);
            assert!(c > 0.0 && c < 2.0, "C out of (0,2) at mu={mu} p={p}: {c}");
        }
        // increasing toward 2 along mu at fixed p
        let mut prev = 0.0;
        for mu in [1.0, 10.0, 100.0, 1000.0] {
            let c = c_mu_p(mu, 0.5);
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn speed_expansion_values() {
        // 1/3 - (188/315) e^-4, frozen from exact evaluation
        assert!((speed_expansion_1d(1.0, 0.5, 2.0) - 0.322402094885454).abs() < 1e-14);
        assert!((speed_expansion_1d(1.0, 0.5, 2.5) - 0.329311955441816).abs() < 1e-14);
        assert!((speed_expansion_1d(1.0, 0.5, 50.0) - 1.0 / 3.0).abs() < 1e-15);
        // outside validity the truncation goes negative and is flagged
        assert!(speed_expansion_1d(1.0, 0.5, 0.0) < 0.0);
        assert!(!speed_expansion_1d_valid(0.0));
        assert!(speed_expansion_1d_valid(1.5));
    }

    #[test]
    fn projection_chain_closed_forms() {
        let chain = projection_chain(1.0, 0.5);
        let expected = [11.0 / 42.0, 17.0 / 42.0, 5.0 / 42.0, 9.0 / 42.0];
        for (a, b) in chain.stationary.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(chain.rate_matrix[0], [-1.0, 0.5, 0.5, 0.0]);
    }

    /// Independent oracle: solve x Q = 0 with sum(x) = 1 by Gaussian
    /// elimination and compare against the closed forms.
    fn solve_stationary(q: &[[f64; 4]; 4]) -> [f64; 4] {
        // unknown x (row vector): Q^T x^T = 0 plus normalization replaces
        // the last equation.
        let mut a = [[0.0f64; 5]; 4];
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] = q[j][i];
            }
        }
        for j in 0..4 {
            a[3][j] = 1.0;
        }
        a[3][4] = 1.0;
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
                .unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            assert!(d.abs() > 1e-14);
            for j in col..5 {
                a[col][j] /= d;
            }
            for r in 0..4 {
                if r != col {
                    let f = a[r][col];
                    for j in col..5 {
                        a[r][j] -= f * a[col][j];
                    }
                }
            }
        }
        [a[0][4], a[1][4], a[2][4], a[3][4]]
    }

    #[test]
    fn projection_chain_identities_on_grid() {
        for &(mu, p) in &parameter_grid() {
            let chain = projection_chain(mu, p);
            for (i, row) in chain.rate_matrix.iter().enumerate() {
                let s: f64 = row.iter().sum();
                assert!(s.abs() <= 1e-12, "row sum {s} at mu={mu} p={p}");
                for (j, &v) in row.iter().enumerate() {
                    if i != j {
                        assert!(v >= 0.0, "negative off-diagonal at mu={mu} p={p}");
                    }
                }
            }
            let x = chain.stationary;
            assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for k in 0..4 {
                let dot: f64 = (0..4).map(|i| x[i] * chain.rate_matrix[i][k]).sum();
                assert!(dot.abs() <= 1e-12, "xQ component {dot} at mu={mu} p={p}");
            }
            assert!((chain.right_open_marginal() - tarwdp_speed(mu, p)).abs() <= 1e-12);
            let left = p * (2.0 * mu * mu - 3.0 * mu * p + 5.0 * mu - 2.0 * p + 2.0)
                / (2.0 * mu * mu + (3.0 - p) * mu - p * p + 1.0);
            assert!((chain.left_open_marginal() - left).abs() <= 1e-12);
            let solved = solve_stationary(&chain.rate_matrix);
            for (a, b) in x.iter().zip(solved) {
                assert!((a - b).abs() < 1e-10, "solver mismatch at mu={mu} p={p}");
            }
        }
    }

    #[test]
    fn gamma_vs_exp_values() {
        assert!((gamma_vs_exp(1, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((gamma_vs_exp(2, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((gamma_vs_exp(3, 0.5).unwrap() - 8.0 / 27.0).abs() < 1e-15);
        assert!(gamma_vs_exp(0, 1.0).is_err());
        // telescoping: (mu+1) * P_n = P_{n-1}
        for n in 2..6 {
            for mu in [0.3, 1.0, 2.5] {
                let lhs = gamma_vs_exp(n, mu).unwrap() * (mu + 1.0);
                let rhs = gamma_vs_exp(n - 1, mu).unwrap();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn expected_tau1_values() {
        assert!((expected_tau1(1.0) - E).abs() < 1e-15);
        assert!((expected_tau1(0.5) - E * E).abs() < 1e-12);
        assert!((expected_tau1(1e6) - 1.0 - 1e-6).abs() < 1e-9);
    }

    #[test]
    fn gap_scenario_values() {
        assert!((gap_scenario_expectation(GapScenario::A, 1.0, 0.5) - 2.0).abs() < 1e-15);
        assert!((gap_scenario_expectation(GapScenario::B, 1.0, 0.5) - 4.6).abs() < 1e-14);
        assert!((gap_scenario_expectation(GapScenario::C, 1.0, 0.5) - 1.4).abs() < 1e-14);
        assert_eq!(gap_scenario_expectation(GapScenario::D, 1.0, 0.5), 0.0);
    }

    #[test]
    fn consistency_residual_vanishes() {
        assert!(c_consistency_residual(1.0, 0.5).abs() < 1e-10);
        assert!(c_consistency_residual(0.5, 0.5).abs() < 1e-10);
        let max = parameter_grid()
            .iter()
            .map(|&(mu, p)| c_consistency_residual(mu, p).abs())
            .fold(0.0, f64::max);
        assert!(max < 1e-9, "max residual {max}");
    }

    #[test]
    fn speed_disparity_values() {
        assert!((speed_disparity(1.0, 0.5, 0.0, 1.0).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!((speed_disparity(1.0, 0.5, 0.25, 0.75).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!((crossing_time_mean(1.0, 0.5, 0.0) - 4.0).abs() < 1e-15);
        assert!((crossing_time_mean(1.0, 0.5, 1.0) - 2.0).abs() < 1e-15);
        assert!(speed_disparity(1.0, 0.5, 0.7, 0.7).is_err());
        assert!(speed_disparity(1.0, 0.5, 0.9, 0.2).is_err());
        // p1 -> p2 gives a vanishing gap
        let eps = 1e-9;
        assert!(speed_disparity(1.0, 0.5, 0.5 - eps, 0.5).unwrap().abs() < 1e-8);
    }

    #[test]
    fn critical_mu_values() {
        assert!((critical_mu(0.5) - 0.5).abs() < 1e-15);
        assert!((critical_mu(0.9) - 0.3).abs() < 1e-15);
        assert!(critical_mu(1e-12) < 2e-6);
    }

    #[test]
    fn c1_coefficient_values() {
        assert!(c1_coefficient(2, critical_mu(0.5), 0.5).unwrap().abs() < 1e-15);
        assert!((c1_coefficient(2, 1.0, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // 2 * 0.5 * (0.0625 - 0.25) / (1 - 0.5 + 0.25)^2 = -0.1875/0.5625
        assert!((c1_coefficient(2, 0.25, 0.5).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!(c1_coefficient(1, 1.0, 0.5).is_err());
        for &(mu, p) in &parameter_grid() {
            let c1 = c1_coefficient(3, mu, p).unwrap();
            let sign = mu * mu - p * (1.0 - p);
            assert!(c1 * sign >= 0.0, "sign mismatch at mu={mu} p={p}");
            let crit = c1_coefficient(3, critical_mu(p), p).unwrap();
            assert!(crit.abs() < 1e-14);
        }
    }

    #[test]
    fn p_e1_values() {
        assert!((p_e1_prediction(1.0, 3.0, 5).unwrap() - 0.033689734995427335).abs() < 1e-15);
        assert!((p_e1_prediction(1.0, 6.0, 1).unwrap() - 1.6701700790245659e-5).abs() < 1e-18);
        assert!(p_e1_prediction(1.0, 3.0, 0).is_err());
        assert!(p_e1_prediction(1.0, 0.5, 1).is_err());
    }
}
