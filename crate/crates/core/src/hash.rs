//! Small, platform-stable hash functions.
//!
//! Everything here is pinned: the same input produces the same value on every
//! platform and every release, since hashes feed file formats and seeds.

const FNV32_OFFSET: u32 = 0x811c_9dc5;
const FNV32_PRIME: u32 = 0x0100_0193;
const FNV64_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV64_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 32-bit FNV-1a, as used for character n-gram bucketing.
pub fn fnv1a_32(bytes: &[u8]) -> u32 {
    let mut h = FNV32_OFFSET;
    for &b in bytes {
        h ^= u32::from(b);
        h = h.wrapping_mul(FNV32_PRIME);
    }
    h
}

/// 64-bit FNV-1a continuing from `state`.
pub fn fnv1a_64_from(state: u64, bytes: &[u8]) -> u64 {
    let mut h = state;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV64_PRIME);
    }
    h
}

pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    fnv1a_64_from(FNV64_OFFSET, bytes)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives an independent seed for a named pipeline substream.
///
/// Re-running one stage never perturbs the random stream of another because
/// each stage draws from `substream_seed(seed, "<stage>")`.
pub fn substream_seed(seed: u64, name: &str) -> u64 {
    splitmix64(seed ^ fnv1a_64(name.as_bytes()))
}
