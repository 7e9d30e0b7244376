//! Statistical layer: speed estimators with standard errors and weighted
//! least squares for the exponential expansion in the bias.

use crate::error::{Error, Result};
use crate::walker::RegenerationBlock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedMethod {
    BatchMeans,
    RegenerationRatio,
}

impl std::fmt::Display for SpeedMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpeedMethod::BatchMeans => "batch_means",
            SpeedMethod::RegenerationRatio => "regeneration_ratio",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpeedEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: SpeedMethod,
    /// Number of blocks or batches behind the estimate.
    pub budget: u64,
}

/// Sufficient statistics of a stream of regeneration blocks; the pooled
/// ratio estimator needs only these, so huge runs never materialize their
/// blocks.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockMoments {
    pub n: u64,
    pub sum_dx: f64,
    pub sum_dt: f64,
    pub sum_dx2: f64,
    pub sum_dt2: f64,
    pub sum_dxdt: f64,
}

impl BlockMoments {
    pub fn push(&mut self, dx: f64, dt: f64) {
        self.n += 1;
        self.sum_dx += dx;
        self.sum_dt += dt;
        self.sum_dx2 += dx * dx;
        self.sum_dt2 += dt * dt;
        self.sum_dxdt += dx * dt;
    }

    pub fn push_block(&mut self, b: &RegenerationBlock) {
        self.push(b.dx as f64, b.dt);
    }

    pub fn merge(&mut self, other: &BlockMoments) {
        self.n += other.n;
        self.sum_dx += other.sum_dx;
        self.sum_dt += other.sum_dt;
        self.sum_dx2 += other.sum_dx2;
        self.sum_dt2 += other.sum_dt2;
        self.sum_dxdt += other.sum_dxdt;
    }
}

/// Ratio-of-means speed estimate `sum(dx)/sum(dt)` with the delta-method
/// standard error `sd(dx - R dt) / (sqrt(n) * mean(dt))`.
pub fn regen_speed_from_moments(m: &BlockMoments) -> Result<SpeedEstimate> {
    if m.n < 30 {
        return Err(Error::InsufficientData(format!(
            "{} regeneration blocks; the ratio estimator needs at least 30",
            m.n
        )));
    }
    let n = m.n as f64;
    let mean_dt = m.sum_dt / n;
    let value = m.sum_dx / m.sum_dt;
    // sum over blocks of (dx_i - R dt_i)^2; the mean of dx - R dt is 0 by
    // construction of R, so this is (n-1) times its sample variance.
    let ss = m.sum_dx2 - 2.0 * value * m.sum_dxdt + value * value * m.sum_dt2;
    let var = (ss / (n - 1.0)).max(0.0);
    let std_error = (var / n).sqrt() / mean_dt;
    Ok(SpeedEstimate {
        value,
        std_error,
        method: SpeedMethod::RegenerationRatio,
        budget: m.n,
    })
}

/// Ratio estimator over materialized blocks (see [`regen_speed_from_moments`]).
pub fn regen_speed(blocks: &[RegenerationBlock]) -> Result<SpeedEstimate> {
    let mut m = BlockMoments::default();
    for b in blocks {
        m.push_block(b);
    }
    regen_speed_from_moments(&m)
}

/// Leave-one-out jackknife standard error of the block ratio, a cross-check
/// for the delta method (they agree within a few percent at realistic n).
pub fn jackknife_ratio_se(blocks: &[RegenerationBlock]) -> Result<f64> {
    if blocks.len() < 30 {
        return Err(Error::InsufficientData(
            "jackknife needs at least 30 blocks".into(),
        ));
    }
    let n = blocks.len() as f64;
    let (sx, st) = blocks
        .iter()
        .fold((0.0, 0.0), |(sx, st), b| (sx + b.dx as f64, st + b.dt));
    let mut mean = 0.0;
    let mut loo = Vec::with_capacity(blocks.len());
    for b in blocks {
        let r = (sx - b.dx as f64) / (st - b.dt);
        loo.push(r);
        mean += r;
    }
    mean /= n;
    let ssq: f64 = loo.iter().map(|r| (r - mean).powi(2)).sum();
    Ok(((n - 1.0) / n * ssq).sqrt())
}

/// Batch-means speed estimate from axis-0 positions at `B+1` equally spaced
/// boundary times spanning `horizon` (the first entry is the start
/// position). Value is total displacement over horizon; the standard error
/// comes from the scatter of per-batch speeds.
pub fn batch_speed(positions: &[i64], horizon: f64) -> Result<SpeedEstimate> {
    if positions.len() < 11 {
        return Err(Error::InsufficientData(format!(
            "{} batch boundaries; batch means needs at least 10 batches",
            positions.len().saturating_sub(1)
        )));
    }
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let b = positions.len() - 1;
    let dt = horizon / b as f64;
    let speeds: Vec<f64> = positions
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 / dt)
        .collect();
    let n = b as f64;
    let mean = speeds.iter().sum::<f64>() / n;
    let var = speeds.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(SpeedEstimate {
        value: (positions[b] - positions[0]) as f64 / horizon,
        std_error: (var / n).sqrt(),
        method: SpeedMethod::BatchMeans,
        budget: b as u64,
    })
}

/// Weighted least-squares fit of `value ~= a0 + a1 e^-lambda + a2 e^-2lambda`.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// Inverse of the normal-equations matrix (parameter covariance).
    pub covariance: [[f64; 3]; 3],
    pub z_a1: f64,
    pub z_a2: f64,
}

impl FitResult {
    pub fn se_a0(&self) -> f64 {
        self.covariance[0][0].sqrt()
    }
    pub fn se_a1(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }
    pub fn se_a2(&self) -> f64 {
        self.covariance[2][2].sqrt()
    }

    pub fn predict(&self, lambda: f64) -> f64 {
        self.a0 + self.a1 * (-lambda).exp() + self.a2 * (-2.0 * lambda).exp()
    }
}

const CONDITION_LIMIT: f64 = 1e10;

/// Fit the 3-term exponential model to `(lambda, value, sigma)` points with
/// weights `1/sigma^2`, by the normal equations with a conditioning guard.
/// Needs at least 3 distinct lambda values; three points interpolate
/// exactly.
pub fn fit_exponential(points: &[(f64, f64, f64)]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = Vec::new();
    for &(lam, _, sigma) in points {
        if !(sigma > 0.0) {
            return Err(Error::invalid("every sigma must be positive"));
        }
        if !distinct.contains(&lam) {
            distinct.push(lam);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::SingularDesign(format!(
            "{} distinct lambda values; the 3-parameter model needs 3",
            distinct.len()
        )));
    }
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(lam, y, sigma) in points {
        let w = 1.0 / (sigma * sigma);
        let x = [1.0, (-lam).exp(), (-2.0 * lam).exp()];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += w * x[i] * x[j];
            }
            b[i] += w * x[i] * y;
        }
    }
    let inv = invert3(&a).ok_or_else(|| {
        Error::SingularDesign("normal equations are numerically singular".into())
    })?;
    // A nearly singular design can yield a finite cofactor inverse whose
    // condition estimate looks tame, so validate A * inv = I first.
    let mut residual = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let entry: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
            residual = residual.max((entry - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    if !residual.is_finite() || residual > 1e-6 {
        return Err(Error::SingularDesign(format!(
            "inverse residual {residual:.2e}; lambda values too close"
        )));
    }
    // one-norm condition estimate
    let norm = |m: &[[f64; 3]; 3]| -> f64 {
        (0..3)
            .map(|j| (0..3).map(|i| m[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let cond = norm(&a) * norm(&inv);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::SingularDesign(format!(
            "condition number {cond:.2e} exceeds {CONDITION_LIMIT:.0e}; lambda values too close"
        )));
    }
    let coef = [
        inv[0][0] * b[0] + inv[0][1] * b[1] + inv[0][2] * b[2],
        inv[1][0] * b[0] + inv[1][1] * b[1] + inv[1][2] * b[2],
        inv[2][0] * b[0] + inv[2][1] * b[1] + inv[2][2] * b[2],
    ];
    Ok(FitResult {
        a0: coef[0],
        a1: coef[1],
        a2: coef[2],
        covariance: inv,
        z_a1: coef[1] / inv[1][1].sqrt(),
        z_a2: coef[2] / inv[2][2].sqrt(),
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = [
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det,
        ],
    ];
    Some(inv)
}

/// Sign verdict on the fitted `a1` at the `|z| >= 3` level. The speed is
/// eventually increasing in lambda iff the first-order coefficient `c1` is
/// positive, and `a1 = -c1`, so a significantly negative `a1` means
/// increasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Increasing,
    Decreasing,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Increasing => "increasing",
            Verdict::Decreasing => "decreasing",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

pub const SIGN_Z_THRESHOLD: f64 = 3.0;

pub fn dichotomy_sign_test(fit: &FitResult) -> Verdict {
    if fit.z_a1 <= -SIGN_Z_THRESHOLD {
        Verdict::Increasing
    } else if fit.z_a1 >= SIGN_Z_THRESHOLD {
        Verdict::Decreasing
    } else {
        Verdict::Inconclusive
    }
}

/// The verdict a conclusive test must produce: the sign of `mu^2 - p(1-p)`.
/// `None` on the critical curve, where only inconclusive is consistent.
pub fn expected_verdict(mu: f64, p: f64) -> Option<Verdict> {
    let s = mu * mu - p * (1.0 - p);
    if s > 0.0 {
        Some(Verdict::Increasing)
    } else if s < 0.0 {
        Some(Verdict::Decreasing)
    } else {
        None
    }
}

/// Mean block length conditioned on exactly one backward attempt, next to
/// the size-biased mean `E[dt^2]/E[dt]`. Both are reported; no equality is
/// asserted (the two agree only in the large-bias limit).
pub fn size_bias_diagnostic(blocks: &[RegenerationBlock]) -> Result<(f64, f64)> {
    let mut cond_sum = 0.0;
    let mut cond_n = 0u64;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for b in blocks {
        sum += b.dt;
        sum2 += b.dt * b.dt;
        if b.backward_attempts == 1 {
            cond_sum += b.dt;
            cond_n += 1;
        }
    }
    if cond_n < 1000 {
        return Err(Error::InsufficientData(format!(
            "{cond_n} blocks with exactly one backward attempt; need at least 1000"
        )));
    }
    Ok((cond_sum / cond_n as f64, sum2 / sum))
}
