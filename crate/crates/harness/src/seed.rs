/// SplitMix64 finaliser.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under the user seed `seed`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn mixing_is_deterministic_and_spreads() {
        assert_eq!(mix(7, 3), mix(7, 3));
        let seeds: HashSet<u64> = (0..10_000).map(|i| mix(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(mix(0, 1), mix(1, 0));
    }
}
