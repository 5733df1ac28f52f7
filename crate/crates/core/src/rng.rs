//! Counter-based random streams for reproducible parallel bootstraps.
//!
//! Every multiplier is a pure function of (master seed, domain, draw index,
//! axis, within-axis index), so serial and data-parallel runs produce
//! bit-identical results regardless of worker count or scheduling order.

/// Domain tags keep the engines' streams disjoint under a shared seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    Separable = 1,
    Joint = 2,
    Density = 3,
    Lasso = 4,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer: full-avalanche 64-bit mixer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Absorb a sequence of words into a 64-bit key with avalanche between
/// absorptions, so positional swaps yield unrelated keys.
#[inline]
fn absorb(seed: u64, words: &[u64]) -> u64 {
    let mut h = mix(seed ^ GOLDEN);
    for &w in words {
        h = mix(h.wrapping_add(GOLDEN).wrapping_add(w));
    }
    h
}

#[inline]
fn to_unit_interval(x: u64) -> f64 {
    // 53 random bits, offset by half a step: strictly inside (0, 1)
    ((x >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal multiplier for (seed, domain, draw, axis, index).
///
/// Box-Muller on two derived uniforms; rejection-free, so consumption per
/// counter is constant.
#[inline]
pub fn multiplier(seed: u64, domain: StreamDomain, draw: usize, axis: usize, index: usize) -> f64 {
    let key = absorb(
        seed,
        &[domain as u64, draw as u64, axis as u64, index as u64],
    );
    let u1 = to_unit_interval(mix(key.wrapping_add(1)));
    let u2 = to_unit_interval(mix(key.wrapping_add(2)));
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Derive an independent 64-bit sub-seed, e.g. one per Monte Carlo
/// replication.
#[inline]
pub fn subseed(seed: u64, words: &[u64]) -> u64 {
    absorb(seed, words)
}
