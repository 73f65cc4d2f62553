//! The pinned instance generator.
//!
//! * `SplitMix64`: `state += 0x9E3779B97F4A7C15`, then the standard
//!   xor-shift/multiply finalizer.
//! * Uniform doubles in `[0, 1)`: the top 53 bits of one output times `2⁻⁵³`.
//! * Normals: Box–Muller on two consecutive uniforms `u1, u2`,
//!   `r = √(−2 ln(1 − u1))`, `θ = 2π u2`; the cosine value is returned first
//!   and the sine value on the following call.

pub const GENERATOR_NAME: &str = "splitmix64-box-muller";

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }
}

#[derive(Debug, Clone)]
pub struct NormalSampler {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl NormalSampler {
    pub fn new(seed: u64) -> Self {
        NormalSampler {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.rng.next_uniform();
        let u2 = self.rng.next_uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = self.next_normal());
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.next_uniform()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniforms_lie_in_unit_interval() {
        let mut r = SplitMix64::new(0);
        for _ in 0..1000 {
            let u = r.next_uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normals_have_plausible_moments() {
        let mut s = NormalSampler::new(3);
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|_| s.next_normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }
}
