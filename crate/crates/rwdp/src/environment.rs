//! Exact lazy simulation of the dynamical percolation environment on `Z^d`.
//!
//! The lattice is infinite, so edges are materialized only when queried.
//! This is exact: the refresh process is Poisson, hence memoryless, and any
//! refresh resamples the state to Bernoulli(p) independently of history.
//! For an edge last seen in state `s` at time `t0`, the state at `t > t0` is
//! `s` with probability `e^{-mu (t-t0)}` (no refresh) and a fresh
//! Bernoulli(p) draw otherwise. An edge never seen before is Bernoulli(p)
//! at any time, because the initial product law is stationary for the
//! refresh dynamics.
//!
//! Edges that currently carry infected-set copies are frozen: their state is
//! mutated only by the infected-set module (copy-1 removals), never by the
//! lazy clock.

use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::params::Params;
use crate::rng::{bernoulli, substream, FxHashMap};

/// Lattice site. Inline up to four dimensions, heap beyond.
pub type Point = SmallVec<[i64; 4]>;

/// Origin of `Z^d`.
pub fn origin(d: u32) -> Point {
    SmallVec::from_elem(0, d as usize)
}

/// Canonical identity of an undirected lattice edge: the lexicographically
/// smaller endpoint plus the axis along which the edge extends.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeKey {
    pub base: Point,
    pub axis: u8,
}

impl EdgeKey {
    /// The edge examined when stepping from `pos` along `axis` with `sign`.
    /// A negative step shifts the base so that one key per undirected edge
    /// results.
    pub fn from_step(pos: &Point, axis: u8, sign: i8) -> EdgeKey {
        let mut base = pos.clone();
        if sign < 0 {
            base[axis as usize] -= 1;
        }
        EdgeKey { base, axis }
    }

    /// Relative edge `e_i` on the first axis: `i >= 1` is the i-th edge
    /// ahead of `pos`, `i <= -1` the (-i)-th edge behind.
    pub fn relative(pos: &Point, i: i64) -> EdgeKey {
        debug_assert!(i != 0);
        let mut base = pos.clone();
        base[0] += if i >= 1 { i - 1 } else { i };
        EdgeKey { base, axis: 0 }
    }
}

/// Last known state of a materialized edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub open: bool,
    pub stamped_at: f64,
    /// True iff the edge currently carries infected-set copies; frozen
    /// records are mutated only through [`Environment::force_state`] /
    /// [`Environment::unfreeze`].
    pub frozen: bool,
}

/// Optional cache relief. Dropping a record is exact only when it is stale
/// enough that a refresh is near-certain (`mu * t_keep` large), so the
/// default horizon is `50/mu` (miss probability `e^-50`). Records near the
/// walker are kept regardless, frozen records always.
#[derive(Debug, Clone, Copy)]
pub struct PruneConfig {
    /// Drop only records with `stamped_at < t - t_keep`.
    pub t_keep: f64,
    /// Keep every record within this L-infinity distance of the walker.
    pub radius: i64,
    /// Run a pruning pass only when the cache exceeds this size.
    pub min_cache: usize,
}

impl PruneConfig {
    pub fn recommended(mu: f64) -> PruneConfig {
        PruneConfig {
            t_keep: 50.0 / mu,
            radius: 64,
            min_cache: 1 << 16,
        }
    }
}

/// Lazy edge field confined to one worker.
pub struct Environment {
    params: Params,
    cache: FxHashMap<EdgeKey, EdgeRecord>,
    rng: ChaCha8Rng,
    prune: Option<PruneConfig>,
    frozen_count: usize,
}

impl Environment {
    /// Environment drawing its edge states from stream `stream` of `seed`.
    pub fn new(params: Params, seed: u64, stream: u64) -> Environment {
        Environment::from_rng(params, substream(seed, stream))
    }

    pub fn from_rng(params: Params, rng: ChaCha8Rng) -> Environment {
        Environment {
            params,
            cache: FxHashMap::default(),
            rng,
            prune: None,
            frozen_count: 0,
        }
    }

    /// Enable the (off-by-default) pruning pass; see [`PruneConfig`].
    pub fn set_prune(&mut self, cfg: Option<PruneConfig>) {
        self.prune = cfg;
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Number of materialized edges.
    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    /// State of edge `key` at time `t`, materializing or refreshing the
    /// record as needed. Frozen records are returned unchanged.
    ///
    /// Panics on time regression (`t` before the record's stamp): queries
    /// must be issued in nondecreasing time order per edge.
    pub fn query(&mut self, key: &EdgeKey, t: f64) -> bool {
        let p = self.params.p;
        let mu = self.params.mu;
        if let Some(rec) = self.cache.get_mut(key) {
            if rec.frozen {
                return rec.open;
            }
            assert!(
                t >= rec.stamped_at,
                "time regression: query at t={t} before stamp {}",
                rec.stamped_at
            );
            let dt = t - rec.stamped_at;
            if dt > 0.0 {
                // refreshed at least once with probability 1 - e^{-mu dt};
                // in that case the state is a fresh Bernoulli(p) draw.
                if bernoulli(&mut self.rng, -(-mu * dt).exp_m1()) {
                    rec.open = bernoulli(&mut self.rng, p);
                }
                rec.stamped_at = t;
            }
            rec.open
        } else {
            let open = bernoulli(&mut self.rng, p);
            self.cache.insert(
                key.clone(),
                EdgeRecord {
                    open,
                    stamped_at: t,
                    frozen: false,
                },
            );
            open
        }
    }

    /// Read-only peek at a materialized record.
    pub fn state_of(&self, key: &EdgeKey) -> Option<&EdgeRecord> {
        self.cache.get(key)
    }

    /// Bring the edge current at `t` and freeze it there. Returns the frozen
    /// state. Panics on double freeze.
    pub fn freeze(&mut self, key: &EdgeKey, t: f64) -> bool {
        let open = self.query(key, t);
        let rec = self.cache.get_mut(key).expect("query materialized the key");
        assert!(!rec.frozen, "double freeze of {key:?}");
        rec.frozen = true;
        self.frozen_count += 1;
        open
    }

    /// Clear the frozen flag and restamp at `t` so lazy refresh resumes
    /// from now. Panics if the record is absent or not frozen.
    pub fn unfreeze(&mut self, key: &EdgeKey, t: f64) {
        let rec = self
            .cache
            .get_mut(key)
            .unwrap_or_else(|| panic!("unfreeze of absent edge {key:?}"));
        assert!(rec.frozen, "unfreeze of unfrozen edge {key:?}");
        rec.frozen = false;
        rec.stamped_at = t;
        self.frozen_count -= 1;
    }

    /// Overwrite the state of a materialized edge and restamp it at `t`;
    /// the frozen flag is preserved. Panics if the key is absent.
    pub fn force_state(&mut self, key: &EdgeKey, open: bool, t: f64) {
        let rec = self
            .cache
            .get_mut(key)
            .unwrap_or_else(|| panic!("force_state of absent edge {key:?}"));
        rec.open = open;
        rec.stamped_at = t;
    }

    /// Fresh Bernoulli(p) resample of a materialized edge at time `t`
    /// (the copy-1 removal hook of the infected set).
    pub fn resample(&mut self, key: &EdgeKey, t: f64) {
        let open = bernoulli(&mut self.rng, self.params.p);
        self.force_state(key, open, t);
    }

    /// Materialize an edge at time `t` in a chosen state (planting hook for
    /// coupled experiments): a query followed by `force_state`.
    pub fn plant(&mut self, key: &EdgeKey, open: bool, t: f64) {
        self.query(key, t);
        self.force_state(key, open, t);
    }

    /// Drop the whole cache. Exact only at instants when every materialized
    /// edge is an independent Bernoulli(p) draw — in regenerative runs this
    /// holds exactly at regeneration times, because each edge's last copy
    /// removal left it either freshly resampled or untouched-frozen since
    /// its own resample. Panics if any edge is still frozen.
    pub fn clear(&mut self) {
        assert!(
            self.frozen_count == 0,
            "clear with {} frozen edges",
            self.frozen_count
        );
        self.cache.clear();
    }

    /// Pruning pass; a no-op unless enabled and the cache is large.
    pub fn maybe_prune(&mut self, t: f64, walker: &Point) {
        let Some(cfg) = self.prune else { return };
        if self.cache.len() <= cfg.min_cache {
            return;
        }
        let cutoff = t - cfg.t_keep;
        self.cache.retain(|key, rec| {
            if rec.frozen || rec.stamped_at >= cutoff {
                return true;
            }
            let near = key
                .base
                .iter()
                .zip(walker.iter())
                .all(|(a, b)| (a - b).abs() <= cfg.radius);
            near
        });
    }
}
