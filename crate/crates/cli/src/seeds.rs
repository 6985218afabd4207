//! Counter-based seed derivation.
//!
//! A seed is a pure function of the root seed and a path of counters
//! (stream, sweep point, replication, dataset), so work items can run in any
//! order on any thread and still draw the same numbers.

/// Streams separate unrelated consumers of randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Noise = 1,
    Chain = 2,
    Map = 3,
}

/// SplitMix64 finalizer.
pub fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(root: u64, stream: Stream, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix(root ^ mix(stream as u64)), |acc, &p| mix(acc ^ mix(p)))
}
