//! Seeded normal variates with per-index substreams.
//!
//! Generator, fixed so that independent implementations agree bit for bit:
//!
//! * `mix64(z)`: the SplitMix64 output function
//!   `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`
//!   (wrapping arithmetic).
//! * Substream `index` of `seed` is a SplitMix64 generator with initial state
//!   `mix64(seed) ^ mix64(index + 0x9E3779B97F4A7C15)`. Each step adds
//!   `0x9E3779B97F4A7C15` to the state and returns `mix64(state)`.
//! * Uniforms on (0, 1): `((next >> 11) + 0.5) * 2^-53`.
//! * Normals by Box–Muller: from uniforms `u1, u2` (in that order),
//!   `r = sqrt(-2 ln u1)`, `t = 2 pi u2`, emitting `r cos t` then `r sin t`.
//!   A slice of odd length discards the final `r sin t`.
//!
//! Sampled latent `i` of a batch uses substream `i`; a Monte Carlo trial `t`
//! uses substream `t` and draws its latents one after another from it.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        Self { state }
    }

    /// Substream `index` of `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self::new(mix64(seed) ^ mix64(index.wrapping_add(GOLDEN)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    #[inline]
    fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open01();
        let u2 = self.next_open01();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// Fills `out` with standard normal variates.
    pub fn fill_normal(&mut self, out: &mut [f64]) {
        let mut chunks = out.chunks_exact_mut(2);
        for pair in &mut chunks {
            let (a, b) = self.normal_pair();
            pair[0] = a;
            pair[1] = b;
        }
        if let [last] = chunks.into_remainder() {
            *last = self.normal_pair().0;
        }
    }
}
