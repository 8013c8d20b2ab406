//! Word problems, growth counting, and random-walk constants for four
//! families of finitely generated groups and monoids: free groups, free
//! abelian groups, locally free groups (chain partial commutation), and
//! locally free monoids (the corresponding trace monoids).
//!
//! The crate is organized around one invariant: every element is represented
//! by a unique canonical word, maintained incrementally by
//! [`group::GroupPresentation::append`]. On top of that sit exact sphere and
//! ball enumeration ([`enumeration`]), exact convolution powers and sampled
//! trajectories of symmetric random walks ([`walks`]), and the derived
//! numeric constants and their comparison machinery ([`inequality`]): growth
//! in bits per step `v`, escape rate `l`, entropy rate `h`, and the ratio
//! `q = h / (l v)`, which is at most 1 for every symmetric walk and equals 1
//! exactly for the extremal systems.
//!
//! All entropies and growth rates are measured in bits (logarithms base 2).
//!
//! Everything is deterministic: sampling is seeded (ChaCha8 streams split
//! per trial), parallel reductions preserve trial order, and hash tables use
//! a fixed hasher so float accumulation order does not vary between runs.

pub mod enumeration;
pub mod group;
pub mod inequality;
pub mod walks;

use std::collections::{HashMap, HashSet};
use std::hash::BuildHasherDefault;

/// Hash map with a fixed (non-randomized) hasher.
///
/// Iteration order is a pure function of the key type and insertion
/// sequence, which keeps float summations and serialized output identical
/// across runs. Everything here inserts in a deterministic order, so the
/// whole pipeline is reproducible bit for bit.
pub type DetHashMap<K, V> =
    HashMap<K, V, BuildHasherDefault<std::collections::hash_map::DefaultHasher>>;

/// Hash set counterpart of [`DetHashMap`].
pub type DetHashSet<K> =
    HashSet<K, BuildHasherDefault<std::collections::hash_map::DefaultHasher>>;
