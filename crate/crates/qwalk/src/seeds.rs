//! Sub-seed derivation so independent random streams (graph topology, trap
//! placement, ensemble realizations) can be drawn from one base seed without
//! correlating with each other.

/// Stream tag for the graph-topology RNG.
pub const STREAM_GRAPH: u64 = 1;
/// Stream tag for the trap-placement RNG.
pub const STREAM_TRAPS: u64 = 2;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent sub-seed for `stream` from `base`.
pub fn derive(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// Seed for realization `index` of stream `stream` under `base`.
pub fn realization(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(derive(base, stream) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}
