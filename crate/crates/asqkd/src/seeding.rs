//! Derivation of independent per-stream seeds from one base seed.

/// Mixes `(seed, stream)` into an independent 64-bit seed (SplitMix64
/// finalizer). Trials, sweep rows and search restarts each get their own
/// stream index so they can run concurrently and stay bit-reproducible.
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_and_are_stable() {
        assert_eq!(split_seed(42, 0), split_seed(42, 0));
        assert_ne!(split_seed(42, 0), split_seed(42, 1));
        assert_ne!(split_seed(42, 0), split_seed(43, 0));
    }
}
