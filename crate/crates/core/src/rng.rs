//! Seedable counter-based random number generator with a fixed output
//! contract: the same seed yields the same u64 stream on every platform.
//!
//! The generator is SplitMix64: the state advances by the golden-ratio
//! increment and each output is a bijective mix of the counter. Floats are
//! derived by fixed transforms documented on the methods, so independent
//! implementations can reproduce the streams from the integer level up.

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`: the top 53 bits of one draw scaled by 2⁻⁵³.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`: `(top53 + 1)·2⁻⁵³`. Used where log(0) must be
    /// impossible.
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal pair via the Box–Muller transform:
    /// `r = √(−2·ln u₁)`, `θ = 2π·u₂`, returning `(r·cos θ, r·sin θ)`.
    /// `u₁` is drawn from `(0, 1]`, `u₂` from `[0, 1)`, in that order.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// Seed for one point of a parallel sweep: `base ⊕ index`, so results do
/// not depend on scheduling order.
pub fn sweep_point_seed(base: u64, index: usize) -> u64 {
    base ^ index as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_stream() {
        // Frozen from an independent implementation of the same constants.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(rng.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(rng.next_u64(), 0x06c45d188009454f);

        let mut rng = SplitMix64::new(1);
        assert_eq!(rng.next_u64(), 0x910a2dec89025cc1);
        assert_eq!(rng.next_u64(), 0xbeeb8da1658eec67);
        assert_eq!(rng.next_u64(), 0xf893a2eefb32555e);

        let mut rng = SplitMix64::new(0xDEADBEEF);
        assert_eq!(rng.next_u64(), 0x4adfb90f68c9eb9b);
    }

    #[test]
    fn uniform_transform_is_fixed() {
        let mut rng = SplitMix64::new(1);
        assert_eq!(rng.next_f64(), 0.5665615751722809);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let (za, zb) = a.next_normal_pair();
        let (ya, yb) = b.next_normal_pair();
        assert_eq!((za, zb), (ya, yb));
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut rng = SplitMix64::new(7);
        let n = 50_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let (a, b) = rng.next_normal_pair();
            sum += a + b;
            sum_sq += a * a + b * b;
        }
        let count = (2 * n) as f64;
        let mean = sum / count;
        let var = sum_sq / count - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "variance {var}");
    }
}
