//! Seed derivation.
//!
//! Every run seed is a fixed function of the master seed and three stream
//! coordinates. The mapping below is part of the on-disk contract: changing
//! it changes every recorded `run_seed`.
//!
//! ```text
//! h0 = mix(master)
//! h1 = mix(h0 ^ instance_id)
//! h2 = mix(h1 ^ algorithm_id)
//! seed = mix(h2 ^ run_index)
//! ```
//!
//! `mix` is the SplitMix64 step (add the golden-ratio increment, then the
//! 64-bit finalizer). String coordinates are mapped to integers with 64-bit
//! FNV-1a.

use crate::instance::InstanceRef;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[inline]
fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a of `s`.
pub fn stable_id(s: &str) -> u64 {
    s.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Stream coordinate of an instance, from its generator inputs.
pub fn instance_id(inst: &InstanceRef) -> u64 {
    stable_id(&format!(
        "L{}-n{}-{}-s{}",
        inst.length, inst.n, inst.height_mode, inst.seed
    ))
}

pub fn derive_seed(master: u64, instance_id: u64, algorithm_id: u64, run_index: u64) -> u64 {
    let h = mix(master);
    let h = mix(h ^ instance_id);
    let h = mix(h ^ algorithm_id);
    mix(h ^ run_index)
}
