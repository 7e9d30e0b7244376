//! Infected-set construction driving regeneration times.
//!
//! Every examined edge gains an indexed copy (smallest absent index,
//! starting from 1); the first copy freezes the edge in the environment.
//! Copies die at total rate `mu * |I|`, each pick uniform. Removing copy 1
//! resamples the edge to Bernoulli(p); removing an edge's last copy
//! unfreezes it. The instants when the set empties after having been
//! occupied are regeneration times: the walk increments between them are
//! i.i.d., and every edge the walker ever examined is again an independent
//! Bernoulli(p) draw at those instants.
//!
//! `|I_t|` is a birth-death chain with birth rate 1 (walker attempts) and
//! death rate `mu i`, so callers schedule one death event at rate
//! `mu * total()` and call [`InfectedSet::death`].

use rand::Rng;
use smallvec::SmallVec;

use crate::environment::{EdgeKey, Environment};
use crate::rng::FxHashMap;

type CopySet = SmallVec<[u32; 4]>;

/// Multiset of indexed edge copies with O(1) uniform removal.
#[derive(Default)]
pub struct InfectedSet {
    /// Sorted per-edge copy indices; sets stay tiny (|I| is Poisson(1/mu)
    /// in stationarity).
    copies: FxHashMap<EdgeKey, CopySet>,
    /// Every copy once, for uniform picks via swap-remove.
    flat: Vec<(EdgeKey, u32)>,
}

impl InfectedSet {
    pub fn new() -> InfectedSet {
        InfectedSet::default()
    }

    /// Total number of copies `|I_t|`.
    pub fn total(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// Copy indices currently held by `key` (sorted), for inspection.
    pub fn copies_of(&self, key: &EdgeKey) -> &[u32] {
        self.copies.get(key).map(|s| s.as_slice()).unwrap_or(&[])
    }

    /// Register an examination of `key` at time `t`: add the copy with the
    /// smallest absent index; the first copy brings the edge current and
    /// freezes it. Returns the edge's (frozen) state so the caller can
    /// decide the move.
    pub fn on_examine(&mut self, env: &mut Environment, key: &EdgeKey, t: f64) -> bool {
        match self.copies.entry(key.clone()) {
            std::collections::hash_map::Entry::Vacant(v) => {
                let open = env.freeze(key, t);
                v.insert(SmallVec::from_slice(&[1]));
                self.flat.push((key.clone(), 1));
                open
            }
            std::collections::hash_map::Entry::Occupied(mut o) => {
                let set = o.get_mut();
                let mut idx = 1u32;
                let mut at = 0usize;
                for (i, &c) in set.iter().enumerate() {
                    if c == idx {
                        idx += 1;
                        at = i + 1;
                    } else {
                        break;
                    }
                }
                set.insert(at, idx);
                self.flat.push((key.clone(), idx));
                env.state_of(key)
                    .expect("edge with copies is materialized")
                    .open
            }
        }
    }

    /// Remove one copy chosen uniformly at random at time `t`. An index-1
    /// removal resamples the edge to Bernoulli(p); a removal that empties
    /// the edge's copy set unfreezes it. Panics on an empty set.
    pub fn death<R: Rng + ?Sized>(&mut self, env: &mut Environment, rng: &mut R, t: f64) {
        assert!(!self.flat.is_empty(), "death on empty infected set");
        let pick = rng.random_range(0..self.flat.len());
        let (key, idx) = self.flat.swap_remove(pick);
        let set = self.copies.get_mut(&key).expect("copy set exists");
        let pos = set.iter().position(|&c| c == idx).expect("copy listed");
        set.remove(pos);
        let emptied = set.is_empty();
        if emptied {
            self.copies.remove(&key);
        }
        if idx == 1 {
            env.resample(&key, t);
        }
        if emptied {
            env.unfreeze(&key, t);
        }
    }

    /// True iff the set is empty now and was occupied since the previous
    /// regeneration: the definition of a regeneration time.
    pub fn is_regeneration(&self, was_nonempty: bool) -> bool {
        self.flat.is_empty() && was_nonempty
    }
}
