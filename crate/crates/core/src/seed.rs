//! Deterministic seed derivation for nested searches.
//!
//! Every randomized component takes an explicit `u64` seed. When one seeded
//! task spawns several independent sub-tasks (layers of a model, cells of an
//! experiment grid), each sub-task gets `derive(parent_seed, index)` so results
//! never depend on scheduling or iteration order.

/// SplitMix64 output function; a full-period bijection on `u64`.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a parent seed and a stream index.
///
/// Children of the same parent are decorrelated from each other and from the
/// parent stream itself; the map is pure, so any (parent, index) pair always
/// yields the same child seed.
pub fn derive(parent: u64, stream: u64) -> u64 {
    splitmix64(parent ^ splitmix64(stream.wrapping_add(0x1234_5678_9abc_def0)))
}
