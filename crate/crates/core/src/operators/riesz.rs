use num_complex::Complex64;

use super::apply_multiplier;
use crate::error::{Error, Result};
use crate::lattice::{GridFunction, LpNorm};
use crate::multipliers::{riesz_symbol, xi_sin_norm};

/// `|Σ_x f(x)| ≤ 1e−12 ‖f‖_1`, i.e. the zero mode is numerically absent.
pub fn is_mean_zero(f: &GridFunction) -> bool {
    let l1 = f.lp_norm(1.0).expect("p = 1 is valid");
    f.sum().norm() <= 1e-12 * l1
}

/// `f` minus its grid mean.
pub fn mean_zero(f: &GridFunction) -> GridFunction {
    let mean = f.sum() / f.len() as f64;
    let mut g = f.clone();
    g.values_mut().iter_mut().for_each(|v| *v -= mean);
    g
}

fn require_mean_zero(f: &GridFunction, what: &str) -> Result<()> {
    if !is_mean_zero(f) {
        return Err(Error::Singularity(format!(
            "{what} needs a mean-zero input; mean mode is {:e}",
            f.sum().norm()
        )));
    }
    Ok(())
}

/// `R_j f = ½ Δ_j L^{−1/2} f`, `j` counted from 1, zero mode removed.
pub fn riesz(f: &GridFunction, j: usize) -> Result<GridFunction> {
    require_mean_zero(f, "the Riesz transform")?;
    if j == 0 || j > f.dim() {
        return Err(Error::Domain(format!(
            "Riesz index {j} outside 1..={}",
            f.dim()
        )));
    }
    Ok(apply_multiplier(f, |xi| {
        riesz_symbol(j, xi).unwrap_or(Complex64::new(0.0, 0.0))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPower {
    /// `L^{1/2}`.
    Plus,
    /// `L^{−1/2}` on mean-zero functions.
    Minus,
}

/// `L^{±1/2} f` through the symbol `|ξ|_sin^{±1}`.
pub fn half_laplacian(f: &GridFunction, power: HalfPower) -> Result<GridFunction> {
    match power {
        HalfPower::Plus => Ok(apply_multiplier(f, |xi| {
            Complex64::new(xi_sin_norm(xi), 0.0)
        })),
        HalfPower::Minus => {
            require_mean_zero(f, "L^{-1/2}")?;
            Ok(apply_multiplier(f, |xi| {
                let s = xi_sin_norm(xi);
                Complex64::new(if s == 0.0 { 0.0 } else { 1.0 / s }, 0.0)
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::laplacian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_mean_zero(dim: usize, side: usize, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = side.pow(dim as u32);
        let f = GridFunction::from_values(
            dim,
            side,
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                .collect(),
        )
        .unwrap();
        mean_zero(&f)
    }

    fn l2(f: &GridFunction) -> f64 {
        f.lp_norm(2.0).unwrap()
    }

    #[test]
    fn one_dimensional_riesz_is_an_isometry() {
        let f = random_mean_zero(1, 64, 2);
        assert!((l2(&riesz(&f, 1).unwrap()) - l2(&f)).abs() < 1e-12 * l2(&f));
    }

    #[test]
    fn riesz_partition_of_unity_in_l2() {
        let f = random_mean_zero(3, 8, 4);
        let total: f64 = (1..=3).map(|j| l2(&riesz(&f, j).unwrap()).powi(2)).sum();
        assert!((total - l2(&f).powi(2)).abs() < 1e-10 * l2(&f).powi(2));
    }

    #[test]
    fn riesz_rejects_a_mean() {
        let f = GridFunction::delta(2, 8, &[0, 0]).unwrap();
        assert!(matches!(riesz(&f, 1), Err(Error::Singularity(_))));
        assert!(matches!(
            half_laplacian(&f, HalfPower::Minus),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn riesz_of_half_laplacian_is_half_difference() {
        for (dim, side) in [(1, 16), (2, 8), (4, 4)] {
            let mut delta = GridFunction::zeros(dim, side).unwrap();
            delta.values_mut()[0] = Complex64::new(1.0, 0.0);
            let f = half_laplacian(&delta, HalfPower::Plus).unwrap();
            for j in 1..=dim {
                let r = riesz(&f, j).unwrap();
                let mut e = vec![0i64; dim];
                e[j - 1] = -1;
                let expect = GridFunction::from_fn(dim, side, |x| {
                    let at_zero = x.iter().all(|v| *v == 0);
                    let at_minus = x == e.as_slice();
                    Complex64::new(0.5 * (at_zero as i32 - at_minus as i32) as f64, 0.0)
                })
                .unwrap();
                assert!(r.max_abs_diff(&expect).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn half_powers_compose() {
        let f = random_mean_zero(2, 8, 6);
        let h = half_laplacian(&f, HalfPower::Plus).unwrap();
        let hh = half_laplacian(&h, HalfPower::Plus).unwrap();
        assert!(hh.max_abs_diff(&laplacian(&f)).unwrap() < 1e-10);
        let back = half_laplacian(&h, HalfPower::Minus).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }

    #[test]
    fn half_laplacian_of_delta_norm() {
        let m = 32;
        let d = GridFunction::delta(1, m, &[0]).unwrap();
        let h = half_laplacian(&d, HalfPower::Plus).unwrap();
        let expect: f64 = (0..m)
            .map(|k| (PI * k as f64 / m as f64).sin().powi(2))
            .sum::<f64>()
            / m as f64;
        assert!((l2(&h).powi(2) - expect).abs() < 1e-14);
    }
}
