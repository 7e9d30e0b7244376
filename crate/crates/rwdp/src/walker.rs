//! Event-driven simulation of the walk itself.
//!
//! Plain mode couples a walker to a lazy [`Environment`] only; regeneration
//! mode additionally runs the [`InfectedSet`] and emits one block per
//! regeneration. Both modes are exact: event times come from competing
//! exponential clocks, never from time discretization.

use rand::Rng;

use crate::environment::{origin, EdgeKey, Environment, Point, PruneConfig};
use crate::error::{Error, Result};
use crate::infected_set::InfectedSet;
use crate::params::Params;
use crate::rng::{exp_time, worker_rngs};

/// Walker position and attempt bookkeeping. Attempts split into forward
/// (`+e1`), backward (`-e1`) and orthogonal (any `+-e_i`, `i >= 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    pub pos: Point,
    pub t: f64,
    pub attempts: u64,
    pub successes: u64,
    pub backward_attempts: u64,
    pub orthogonal_attempts: u64,
}

impl WalkerState {
    fn new(d: u32) -> WalkerState {
        WalkerState {
            pos: origin(d),
            t: 0.0,
            attempts: 0,
            successes: 0,
            backward_attempts: 0,
            orthogonal_attempts: 0,
        }
    }

    pub fn forward_attempts(&self) -> u64 {
        self.attempts - self.backward_attempts - self.orthogonal_attempts
    }
}

/// One i.i.d. regeneration block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegenerationBlock {
    /// Block duration `tau_i - tau_{i-1}`.
    pub dt: f64,
    /// First-coordinate displacement over the block.
    pub dx: i64,
    pub attempts: u32,
    pub backward_attempts: u32,
    pub orthogonal_attempts: u32,
}

/// Projection observation at one inspection time. The left/right edges are
/// the axis-0 edges adjacent to the walker; each sample has unit weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancySample {
    pub t: f64,
    pub left_open: bool,
    pub right_open: bool,
}

/// Direction law `p(+e1) = e^lam/Z`, `p(-e1) = e^-lam/Z`,
/// `p(+-e_i) = 1/Z` for `i >= 2`, with `Z = e^lam + e^-lam + 2d-2`;
/// degenerates to "always `+e1`" at `lambda = inf`.
pub struct DirectionSampler {
    d: u32,
    /// cumulative P[forward], P[forward or backward]; NaN-free
    cum_forward: f64,
    cum_backward: f64,
    totally_asymmetric: bool,
}

impl DirectionSampler {
    pub fn new(params: &Params) -> DirectionSampler {
        if params.lambda.is_infinite() {
            return DirectionSampler {
                d: params.d,
                cum_forward: 1.0,
                cum_backward: 1.0,
                totally_asymmetric: true,
            };
        }
        let z = params.lambda.exp() + (-params.lambda).exp() + 2.0 * params.d as f64 - 2.0;
        DirectionSampler {
            d: params.d,
            cum_forward: params.lambda.exp() / z,
            cum_backward: (params.lambda.exp() + (-params.lambda).exp()) / z,
            totally_asymmetric: false,
        }
    }

    /// Draw `(axis, sign)`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u8, i8) {
        if self.totally_asymmetric {
            return (0, 1);
        }
        let u = rng.random::<f64>();
        if u < self.cum_forward {
            (0, 1)
        } else if u < self.cum_backward {
            (0, -1)
        } else {
            // uniform over the 2d-2 orthogonal directions
            let rest = (u - self.cum_backward) / (1.0 - self.cum_backward);
            let k = ((rest * (2 * self.d - 2) as f64) as u32).min(2 * self.d - 3);
            (1 + (k / 2) as u8, if k % 2 == 0 { 1 } else { -1 })
        }
    }
}

/// Convenience wrapper over [`DirectionSampler`].
pub fn sample_direction<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> (u8, i8) {
    DirectionSampler::new(params).sample(rng)
}

/// Result of a plain-mode run.
pub struct PlainRun {
    pub state: WalkerState,
    pub samples: Vec<OccupancySample>,
    /// Axis-0 positions at the `checkpoints + 1` equally spaced times
    /// `j * horizon / checkpoints`, `j = 0..=checkpoints` (for batch means).
    pub checkpoints: Vec<i64>,
}

/// Options for [`run_plain`].
pub struct PlainConfig {
    pub horizon: f64,
    /// Rate of the independent Poisson inspection clock; 0 disables
    /// occupancy sampling. Inspections are real lazy queries: they condition
    /// subsequent refreshes correctly and do not bias the law.
    pub inspection_rate: f64,
    /// Number of batch-mean checkpoints to record (0 disables).
    pub checkpoints: usize,
    pub prune: Option<PruneConfig>,
}

impl PlainConfig {
    pub fn new(horizon: f64) -> PlainConfig {
        PlainConfig {
            horizon,
            inspection_rate: 0.0,
            checkpoints: 0,
            prune: None,
        }
    }
}

/// Simulate the walk without the infected set up to a fixed horizon.
/// Attempts arrive at rate 1; when the examined edge is open the walker
/// moves. Replica `stream` of `seed` fixes all randomness.
pub fn run_plain(params: &Params, cfg: &PlainConfig, seed: u64, stream: u64) -> Result<PlainRun> {
    if !(cfg.horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let (mut rng, env_rng) = worker_rngs(seed, stream);
    let mut env = Environment::from_rng(*params, env_rng);
    env.set_prune(cfg.prune);
    let dir = DirectionSampler::new(params);
    let mut state = WalkerState::new(params.d);
    let mut samples = Vec::new();
    let mut checkpoints = Vec::with_capacity(cfg.checkpoints + 1);
    let cp_dt = if cfg.checkpoints > 0 {
        checkpoints.push(0i64);
        cfg.horizon / cfg.checkpoints as f64
    } else {
        f64::INFINITY
    };
    let mut next_cp = cp_dt;

    let mut next_attempt = exp_time(&mut rng, 1.0);
    let mut next_inspect = if cfg.inspection_rate > 0.0 {
        exp_time(&mut rng, cfg.inspection_rate)
    } else {
        f64::INFINITY
    };
    loop {
        let t = next_attempt.min(next_inspect);
        if t > cfg.horizon {
            break;
        }
        // positions are piecewise constant: checkpoints in (prev, t) see the
        // current position
        while next_cp < t && checkpoints.len() <= cfg.checkpoints {
            checkpoints.push(state.pos[0]);
            next_cp += cp_dt;
        }
        if next_attempt <= next_inspect {
            state.attempts += 1;
            let (axis, sign) = dir.sample(&mut rng);
            if axis == 0 {
                if sign < 0 {
                    state.backward_attempts += 1;
                }
            } else {
                state.orthogonal_attempts += 1;
            }
            let key = EdgeKey::from_step(&state.pos, axis, sign);
            if env.query(&key, t) {
                state.pos[axis as usize] += sign as i64;
                state.successes += 1;
            }
            if cfg.prune.is_some() && state.attempts % 4096 == 0 {
                env.maybe_prune(t, &state.pos);
            }
            next_attempt = t + exp_time(&mut rng, 1.0);
        } else {
            let left = env.query(&EdgeKey::relative(&state.pos, -1), t);
            let right = env.query(&EdgeKey::relative(&state.pos, 1), t);
            samples.push(OccupancySample {
                t,
                left_open: left,
                right_open: right,
            });
            next_inspect = t + exp_time(&mut rng, cfg.inspection_rate);
        }
    }
    while checkpoints.len() <= cfg.checkpoints && cfg.checkpoints > 0 {
        checkpoints.push(state.pos[0]);
    }
    state.t = cfg.horizon;
    Ok(PlainRun {
        state,
        samples,
        checkpoints,
    })
}

/// Streaming regeneration run: the embedded-chain event loop (attempts at
/// rate 1, deaths at rate `mu |I|`) delivers each completed block to `sink`
/// until `blocks` regenerations have occurred.
///
/// From a state with `|I| = n` the next event arrives after
/// `Exp(1 + mu n)` and is a walker attempt with probability `1/(1 + mu n)`,
/// otherwise a death; ties have probability zero. At every regeneration the
/// environment cache is dropped, which is exact (each touched edge is a
/// fresh Bernoulli(p) there) and keeps memory bounded by one block's
/// footprint.
pub fn run_regen_with<F: FnMut(&RegenerationBlock)>(
    params: &Params,
    blocks: u64,
    seed: u64,
    stream: u64,
    mut sink: F,
) -> Result<WalkerState> {
    if blocks < 1 {
        return Err(Error::invalid("blocks must be at least 1"));
    }
    let (mut rng, env_rng) = worker_rngs(seed, stream);
    let mut env = Environment::from_rng(*params, env_rng);
    let dir = DirectionSampler::new(params);
    let mut iset = InfectedSet::new();
    let mut state = WalkerState::new(params.d);
    let mut t = 0.0f64;
    let mut done = 0u64;

    let mut block_start_t = 0.0f64;
    let mut block_start_x = 0i64;
    let mut attempts = 0u32;
    let mut backward = 0u32;
    let mut orthogonal = 0u32;

    let mu = params.mu;
    while done < blocks {
        let n = iset.total();
        let rate = 1.0 + mu * n as f64;
        t += exp_time(&mut rng, rate);
        if rng.random::<f64>() * rate < 1.0 {
            // walker attempt
            attempts += 1;
            let (axis, sign) = dir.sample(&mut rng);
            if axis == 0 {
                if sign < 0 {
                    backward += 1;
                }
            } else {
                orthogonal += 1;
            }
            let key = EdgeKey::from_step(&state.pos, axis, sign);
            if iset.on_examine(&mut env, &key, t) {
                state.pos[axis as usize] += sign as i64;
                state.successes += 1;
            }
        } else {
            iset.death(&mut env, &mut rng, t);
            if iset.is_empty() {
                let block = RegenerationBlock {
                    dt: t - block_start_t,
                    dx: state.pos[0] - block_start_x,
                    attempts,
                    backward_attempts: backward,
                    orthogonal_attempts: orthogonal,
                };
                sink(&block);
                done += 1;
                state.attempts += attempts as u64;
                state.backward_attempts += backward as u64;
                state.orthogonal_attempts += orthogonal as u64;
                block_start_t = t;
                block_start_x = state.pos[0];
                attempts = 0;
                backward = 0;
                orthogonal = 0;
                env.clear();
            }
        }
    }
    state.t = t;
    Ok(state)
}

/// Collect `blocks` regeneration blocks (convenience form of
/// [`run_regen_with`] for budgets where materializing the vector is fine).
pub fn run_regen(params: &Params, blocks: u64, seed: u64, stream: u64) -> Result<Vec<RegenerationBlock>> {
    let mut out = Vec::with_capacity(blocks.min(1 << 24) as usize);
    run_regen_with(params, blocks, seed, stream, |b| out.push(*b))?;
    Ok(out)
}

/// Empirical frequencies of the adjacent-edge states in the order
/// `[(0,0), (1,0), (0,1), (1,1)]` over the samples after `burn_in`.
///
/// Only meaningful for a `d = 1`, `lambda = inf` run, where the projection
/// is itself Markov. Errors if fewer than 1000 samples survive the burn-in.
pub fn occupancy_fractions(samples: &[OccupancySample], burn_in: f64) -> Result<[f64; 4]> {
    let mut counts = [0u64; 4];
    let mut n = 0u64;
    for s in samples {
        if s.t <= burn_in {
            continue;
        }
        let idx = match (s.left_open, s.right_open) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (true, true) => 3,
        };
        counts[idx] += 1;
        n += 1;
    }
    if n < 1000 {
        return Err(Error::InsufficientData(format!(
            "{n} occupancy samples after burn-in; need at least 1000"
        )));
    }
    Ok(counts.map(|c| c as f64 / n as f64))
}

/// Empirical probability that the relative edge `e_i` is open at time
/// `t_inspect`, over independent replicas of a totally asymmetric run.
/// In the long run this is `mu p/(mu+1-p)` for `i = 1` and `p` for `i > 1`.
pub fn far_edge_marginal(
    params: &Params,
    i: i64,
    t_inspect: f64,
    reps: u64,
    seed: u64,
) -> Result<f64> {
    if params.d != 1 || !params.is_totally_asymmetric() {
        return Err(Error::invalid(
            "far_edge_marginal requires d = 1 and lambda = inf",
        ));
    }
    if i < 1 {
        return Err(Error::invalid("far_edge_marginal requires i >= 1"));
    }
    if reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    let dir = DirectionSampler::new(params);
    let mut open = 0u64;
    for rep in 0..reps {
        let (mut rng, env_rng) = worker_rngs(seed, rep);
        let mut env = Environment::from_rng(*params, env_rng);
        let mut pos = origin(params.d);
        let mut t = exp_time(&mut rng, 1.0);
        while t <= t_inspect {
            let (axis, sign) = dir.sample(&mut rng);
            let key = EdgeKey::from_step(&pos, axis, sign);
            if env.query(&key, t) {
                pos[axis as usize] += sign as i64;
            }
            t += exp_time(&mut rng, 1.0);
        }
        if env.query(&EdgeKey::relative(&pos, i), t_inspect) {
            open += 1;
        }
    }
    Ok(open as f64 / reps as f64)
}
