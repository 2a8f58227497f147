use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Which component of the sampling mixture produced a frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Uniform,
    SmallBall,
    Sparse,
}

/// Seeded sampler of frequencies in `[-1/2, 1/2)^d`.
///
/// The default mixture puts equal weight on the uniform law, on the ball
/// `|ξ| ≤ 1/(2N)` and on points with `k ∈ {1, 2, d}` nonzero coordinates,
/// since the extremes of the symbol bounds sit near `ξ = 0` and near
/// coordinate subspaces.
pub struct FrequencySampler {
    dim: usize,
    rng: ChaCha8Rng,
}

impl FrequencySampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        FrequencySampler {
            dim,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// One draw of the mixture adapted to scale `n`.
    pub fn mixture(&mut self, n: f64, out: &mut [f64]) -> SampleMode {
        match self.rng.gen_range(0..3) {
            0 => {
                self.uniform(out);
                SampleMode::Uniform
            }
            1 => {
                self.small_ball(0.5 / n.max(1.0), out);
                SampleMode::SmallBall
            }
            _ => {
                let choices = [1, 2.min(self.dim), self.dim];
                let k = choices[self.rng.gen_range(0..3)];
                self.sparse(k, out);
                SampleMode::Sparse
            }
        }
    }

    pub fn uniform(&mut self, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.rng.gen_range(-0.5..0.5);
        }
    }

    /// Uniform in the Euclidean ball of the given radius (at most `1/2`).
    pub fn small_ball(&mut self, radius: f64, out: &mut [f64]) {
        let r = radius.min(0.5) * self.rng.gen::<f64>().powf(1.0 / self.dim as f64);
        self.on_sphere(r, out);
    }

    /// Random direction with `ln |ξ|` uniform on `[ln lo, ln hi]`, `hi ≤ 1/2`.
    pub fn log_radial(&mut self, lo: f64, hi: f64, out: &mut [f64]) {
        let r = self.rng.gen_range(lo.ln()..hi.min(0.5).ln()).exp();
        self.on_sphere(r, out);
    }

    /// `k` distinct random coordinates drawn uniformly, the rest zero.
    pub fn sparse(&mut self, k: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for i in index::sample(&mut self.rng, self.dim, k.min(self.dim)) {
            out[i] = self.rng.gen_range(-0.5..0.5);
        }
    }

    fn on_sphere(&mut self, r: f64, out: &mut [f64]) {
        loop {
            for x in out.iter_mut() {
                *x = self.rng.sample(StandardNormal);
            }
            let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                out.iter_mut().for_each(|x| *x *= r / norm);
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::euclidean_norm;

    #[test]
    fn draws_stay_in_the_torus_and_repeat() {
        let mut a = FrequencySampler::new(5, 42);
        let mut b = FrequencySampler::new(5, 42);
        let (mut x, mut y) = (vec![0.0; 5], vec![0.0; 5]);
        let mut modes = [0; 3];
        for _ in 0..3000 {
            let m = a.mixture(8.0, &mut x);
            b.mixture(8.0, &mut y);
            assert_eq!(x, y);
            assert!(x.iter().all(|v| (-0.5..0.5).contains(v)));
            modes[m as usize] += 1;
            if m == SampleMode::SmallBall {
                assert!(euclidean_norm(&x) <= 1.0 / 16.0 + 1e-15);
            }
        }
        assert!(modes.iter().all(|&c| c > 800));
    }

    #[test]
    fn sparse_and_radial_shapes() {
        let mut s = FrequencySampler::new(6, 1);
        let mut x = vec![0.0; 6];
        s.sparse(2, &mut x);
        assert!(x.iter().filter(|v| **v != 0.0).count() <= 2);
        s.log_radial(1e-5, 1e-3, &mut x);
        let r = euclidean_norm(&x);
        assert!((1e-5..=1e-3 * (1.0 + 1e-12)).contains(&r));
    }
}
