use std::f64::consts::PI;

use num_complex::Complex64;

use super::apply_multiplier;
use crate::error::{Error, Result};
use crate::lattice::{fft_forward_in_place, fft_inverse_in_place, GridFunction};
use crate::multipliers::xi_sin_norm;
use crate::par::Execution;

/// `L f = Σ_k (½ f(x) − ¼(f(x+e_k) + f(x−e_k)))`, periodic stencil.
pub fn laplacian(f: &GridFunction) -> GridFunction {
    let (dim, m) = (f.dim(), f.side());
    let mut out = f.clone();
    out.scale(0.5 * dim as f64);
    let v = f.values();
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        for (i, o) in out.values_mut().iter_mut().enumerate() {
            let c = (i / stride) % m;
            let up = if c + 1 == m {
                i + stride - m * stride
            } else {
                i + stride
            };
            let down = if c == 0 {
                i + (m - 1) * stride
            } else {
                i - stride
            };
            *o -= 0.25 * (v[up] + v[down]);
        }
    }
    out
}

/// `L` through its symbol `|ξ|_sin²`.
pub fn laplacian_spectral(f: &GridFunction) -> GridFunction {
    apply_multiplier(f, |xi| {
        let s = xi_sin_norm(xi);
        Complex64::new(s * s, 0.0)
    })
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "semigroup time must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}

/// `P_t f`, symbol `e^{−t|ξ|_sin}`.
pub fn poisson(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply_multiplier(f, |xi| {
        Complex64::new((-t * xi_sin_norm(xi)).exp(), 0.0)
    }))
}

/// Spatial kernel of `P_t` on `(Z/m)^d`.
pub fn poisson_kernel(dim: usize, side: usize, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    // The transform of δ_0 is identically 1.
    let mut k = GridFunction::constant(dim, side, Complex64::new(1.0, 0.0))?;
    k.apply_symbol(|xi| Complex64::new((-t * xi_sin_norm(xi)).exp(), 0.0));
    fft_inverse_in_place(&mut k, Execution::default());
    Ok(k)
}

/// `S_n f = P_{a^n} f − P_{a^{n−1}} f`.
pub fn littlewood_paley(f: &GridFunction, n: i32, a: f64) -> Result<GridFunction> {
    if !(a > 1.0) {
        return Err(Error::Domain(format!("lacunarity must exceed 1, got {a}")));
    }
    let (hi, lo) = (a.powi(n), a.powi(n - 1));
    Ok(apply_multiplier(f, |xi| {
        let s = xi_sin_norm(xi);
        Complex64::new((-hi * s).exp() - (-lo * s).exp(), 0.0)
    }))
}

/// `Σ_{n=−N+1}^{N} S_n f`, summed term by term.
pub fn lp_partial_sum(f: &GridFunction, big_n: i32, a: f64) -> Result<GridFunction> {
    let mut acc = GridFunction::zeros(f.dim(), f.side())?;
    for n in (-big_n + 1)..=big_n {
        acc.add_assign(&littlewood_paley(f, n, a)?, 1.0)?;
    }
    Ok(acc)
}

/// Log-spaced trapezoid rule on `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub nodes: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid {
            t_min: 1e-4,
            t_max: 1e4,
            nodes: 400,
        }
    }
}

impl LogGrid {
    /// Nodes `t_i` and weights `w_i` with `∫ h(t) dt ≈ Σ w_i h(t_i)`.
    pub fn rule(&self) -> Result<Vec<(f64, f64)>> {
        if !(self.t_min > 0.0) || !(self.t_max > self.t_min) || self.nodes < 2 {
            return Err(Error::Domain(format!("invalid quadrature {self:?}")));
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let h = (b - a) / (self.nodes - 1) as f64;
        Ok((0..self.nodes)
            .map(|i| {
                let t = (a + h * i as f64).exp();
                let end = i == 0 || i + 1 == self.nodes;
                (t, if end { 0.5 * h * t } else { h * t })
            })
            .collect())
    }
}

/// `g(f)(x) = (∫_0^∞ t |∂_t P_t f(x)|² dt)^{1/2}`.
///
/// The derivative is exact on the symbol side. Fails with a precondition
/// error if the upper tail `e^{−2Ts}(2Ts+1)/4` at the smallest nonzero
/// `|ξ|_sin` of the grid is not below `1e−8`.
pub fn square_function(f: &GridFunction, quad: &LogGrid) -> Result<GridFunction> {
    let rule = quad.rule()?;
    let s_min = (PI / f.side() as f64).sin();
    let x = 2.0 * quad.t_max * s_min;
    let tail = (-x).exp() * (x + 1.0);
    if tail >= 1e-8 {
        return Err(Error::Precondition(format!(
            "quadrature upper tail {tail:e} too large for side {}; raise t_max",
            f.side()
        )));
    }
    let exec = Execution::default();
    let mut fhat = f.clone();
    fft_forward_in_place(&mut fhat, exec);
    let mut sin_norm = GridFunction::constant(f.dim(), f.side(), Complex64::new(1.0, 0.0))?;
    sin_norm.apply_symbol(|xi| Complex64::new(xi_sin_norm(xi), 0.0));

    let blocks = 8usize;
    let per = rule.len().div_ceil(blocks);
    let partial = exec.map_range(blocks, |b| {
        let mut acc = vec![0.0f64; f.len()];
        let mut h = fhat.clone();
        for &(t, w) in rule.iter().skip(b * per).take(per) {
            for ((o, fv), s) in h
                .values_mut()
                .iter_mut()
                .zip(fhat.values())
                .zip(sin_norm.values())
            {
                *o = fv * (-s.re * (-t * s.re).exp());
            }
            fft_inverse_in_place(&mut h, Execution::Sequential);
            for (a, v) in acc.iter_mut().zip(h.values()) {
                *a += w * t * v.norm_sqr();
            }
        }
        acc
    });
    let mut total = vec![0.0f64; f.len()];
    for p in partial {
        for (a, v) in total.iter_mut().zip(p) {
            *a += v;
        }
    }
    GridFunction::from_values(
        f.dim(),
        f.side(),
        total
            .into_iter()
            .map(|v| Complex64::new(v.sqrt(), 0.0))
            .collect(),
    )
}

/// `∫_0^∞ e^{−t²σ²/(4u)} (πu)^{−1/2} e^{−u} du`, which equals `e^{−tσ}`.
///
/// Substituting `u = v²` and `v = e^w` gives a smooth integrand with
/// double-exponential decay, integrated by the trapezoid rule in `w`.
pub fn subordination_integral(sigma: f64, t: f64) -> f64 {
    let c = t * t * sigma * sigma / 4.0;
    let (a, b) = (-20.0f64, 4.0f64);
    let n = 4000;
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let v = (a + h * i as f64).exp();
        let v2 = v * v;
        let g = 2.0 * v * (-v2 - c / v2).exp() / PI.sqrt();
        sum += if i == 0 || i == n { 0.5 * g } else { g };
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LpNorm;
    use crate::operators::mean_zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(dim: usize, side: usize, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = side.pow(dim as u32);
        GridFunction::from_values(
            dim,
            side,
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let d = GridFunction::delta(1, 8, &[0]).unwrap();
        let l = laplacian(&d);
        assert_eq!(l.get(&[0]).unwrap().re, 0.5);
        assert_eq!(l.get(&[1]).unwrap().re, -0.25);
        assert_eq!(l.get(&[-1]).unwrap().re, -0.25);
        let c = GridFunction::constant(3, 4, Complex64::new(2.0, 0.0)).unwrap();
        assert!(laplacian(&c).max_abs() < 1e-15);
        for (dim, side) in [(1, 16), (2, 8), (3, 8)] {
            let f = random_grid(dim, side, 3);
            assert!(laplacian(&f).max_abs_diff(&laplacian_spectral(&f)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn poisson_basics() {
        let f = random_grid(2, 8, 1);
        assert_eq!(poisson(&f, 0.0).unwrap(), f);
        let c = GridFunction::constant(2, 8, Complex64::new(3.0, 0.0)).unwrap();
        assert!(poisson(&c, 5.0).unwrap().max_abs_diff(&c).unwrap() < 1e-14);
        let st = poisson(&poisson(&f, 0.7).unwrap(), 1.9).unwrap();
        assert!(st.max_abs_diff(&poisson(&f, 2.6).unwrap()).unwrap() < 1e-10);
        assert!(poisson(&f, -1.0).is_err());
    }

    #[test]
    fn poisson_kernel_is_a_probability() {
        for t in [0.01, 0.5, 3.0, 40.0] {
            let k = poisson_kernel(3, 8, t).unwrap();
            assert!(k.values().iter().all(|v| v.re >= -1e-12));
            assert!((k.sum().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn littlewood_paley_examples() {
        let c = GridFunction::constant(1, 16, Complex64::new(1.0, 0.0)).unwrap();
        assert!(littlewood_paley(&c, 2, 2.0).unwrap().max_abs() < 1e-15);
        let f = random_grid(2, 8, 8);
        let sum = lp_partial_sum(&f, 5, 2.0).unwrap();
        let mut tele = poisson(&f, 32.0).unwrap();
        tele.add_assign(&poisson(&f, 1.0 / 32.0).unwrap(), -1.0)
            .unwrap();
        assert!(sum.max_abs_diff(&tele).unwrap() < 1e-12);
    }

    #[test]
    fn square_function_of_a_single_mode() {
        // f(x) = e^{-2πi x·k/m}: a single frequency with |ξ|_sin = s, so g(f) = |f|/2.
        let m = 16;
        let f = GridFunction::from_fn(2, m, |x| {
            Complex64::from_polar(1.0, -2.0 * PI * (3 * x[0] - 2 * x[1]) as f64 / m as f64)
        })
        .unwrap();
        let g = square_function(&f, &LogGrid::default()).unwrap();
        for v in g.values() {
            assert!((v.re - 0.5).abs() < 1e-6);
        }
        assert!(
            square_function(
                &GridFunction::constant(1, 8, Complex64::new(1.0, 0.0)).unwrap(),
                &LogGrid::default()
            )
            .unwrap()
            .max_abs()
                < 1e-15
        );
    }

    #[test]
    fn square_function_norm_identity() {
        let f = mean_zero(&random_grid(3, 8, 5));
        let g = square_function(&f, &LogGrid::default()).unwrap();
        let lhs = g.lp_norm(2.0).unwrap();
        let rhs = 0.5 * f.lp_norm(2.0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6 * rhs);
    }

    #[test]
    fn square_function_tail_guard() {
        let f = GridFunction::zeros(1, 1 << 16).unwrap();
        assert!(matches!(
            square_function(&f, &LogGrid::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn subordination_reproduces_the_exponential() {
        for sigma in [0.0, 1e-3, 0.2, 1.0, 3.0f64.sqrt(), 2.8] {
            for t in [0.0, 0.1, 1.0, 5.0, 20.0] {
                let lhs = subordination_integral(sigma, t);
                assert!(
                    (lhs - (-t * sigma).exp()).abs() < 1e-8,
                    "σ={sigma} t={t}: {lhs}"
                );
            }
        }
    }
}
