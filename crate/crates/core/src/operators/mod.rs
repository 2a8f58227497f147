//! Operators acting on periodic grids: lattice averages and their maximal
//! function, the discrete Laplacian, the Poisson semigroup with its
//! Littlewood–Paley pieces and square function, and the Riesz transforms.
//!
//! Everything except the averaging kernels and the Laplacian stencil is
//! applied on the frequency side with the exact symbol.

mod average;
mod riesz;
mod semigroup;

pub use average::{
    average, average_cube_spectral, average_periodic, averages, kernel_radius, maximal,
    OperatorOutput,
};
pub use riesz::{half_laplacian, is_mean_zero, mean_zero, riesz, HalfPower};
pub use semigroup::{
    laplacian, laplacian_spectral, littlewood_paley, lp_partial_sum, poisson, poisson_kernel,
    square_function, subordination_integral, LogGrid,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{fft_forward_in_place, fft_inverse_in_place, GridFunction};
use crate::par::Execution;

/// Multiplies `f̂` by `symbol(ξ)` and transforms back.
pub fn apply_multiplier<F>(f: &GridFunction, symbol: F) -> GridFunction
where
    F: Fn(&[f64]) -> Complex64,
{
    let exec = Execution::default();
    let mut g = f.clone();
    fft_forward_in_place(&mut g, exec);
    g.apply_symbol(symbol);
    fft_inverse_in_place(&mut g, exec);
    g
}

/// How a [`ScaleSet`] was built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleKind {
    Full,
    /// `a ≤ t_{k+1}/t_k ≤ a²`.
    Lacunary(f64),
    /// The integers of `[2^n, 2^{n+1})`.
    DyadicBlock(u32),
}

/// A finite, strictly increasing set of positive scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSet {
    scales: Vec<f64>,
    kind: ScaleKind,
}

impl ScaleSet {
    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() || scales.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Domain(
                "scales must be a nonempty list of positive numbers".into(),
            ));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("scales must be strictly increasing".into()));
        }
        Ok(ScaleSet {
            scales,
            kind: ScaleKind::Full,
        })
    }

    pub fn lacunary(a: f64, scales: Vec<f64>) -> Result<Self> {
        if !(a > 1.0) {
            return Err(Error::Domain(format!("lacunarity must exceed 1, got {a}")));
        }
        let mut s = Self::new(scales)?;
        for w in s.scales.windows(2) {
            let q = w[1] / w[0];
            if q < a * (1.0 - 1e-12) || q > a * a * (1.0 + 1e-12) {
                return Err(Error::Domain(format!("ratio {q} outside [{a}, {}]", a * a)));
            }
        }
        s.kind = ScaleKind::Lacunary(a);
        Ok(s)
    }

    /// `{a^k : lo ≤ k ≤ hi}`.
    pub fn geometric(a: f64, lo: i32, hi: i32) -> Result<Self> {
        Self::lacunary(a, (lo..=hi).map(|k| a.powi(k)).collect())
    }

    /// `{1, 2, 4, …, 2^k}`.
    pub fn dyadic(k: u32) -> Self {
        Self::geometric(2.0, 0, k as i32).expect("powers of two are lacunary")
    }

    pub fn dyadic_block(n: u32) -> Self {
        let lo = 1u64 << n;
        ScaleSet {
            scales: (lo..2 * lo).map(|t| t as f64).collect(),
            kind: ScaleKind::DyadicBlock(n),
        }
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// First scale of each class `⌊t⌋`; cube sections only see `⌊t⌋`.
    pub fn floor_representatives(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &t in &self.scales {
            if out.last().is_none_or(|l| l.floor() != t.floor()) {
                out.push(t);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_set_validation() {
        assert!(ScaleSet::new(vec![]).is_err());
        assert!(ScaleSet::new(vec![1.0, 1.0]).is_err());
        assert!(ScaleSet::new(vec![-1.0, 1.0]).is_err());
        assert!(ScaleSet::lacunary(2.0, vec![1.0, 3.0, 9.0]).is_ok());
        assert!(ScaleSet::lacunary(2.0, vec![1.0, 5.0]).is_err());
        assert!(ScaleSet::lacunary(2.0, vec![1.0, 1.5]).is_err());
        assert_eq!(ScaleSet::dyadic(3).scales(), &[1.0, 2.0, 4.0, 8.0]);
        assert_eq!(ScaleSet::dyadic_block(2).scales(), &[4.0, 5.0, 6.0, 7.0]);
        let s = ScaleSet::new(vec![0.5, 1.0, 1.5, 2.2, 2.9, 3.0]).unwrap();
        assert_eq!(s.floor_representatives(), vec![0.5, 1.0, 2.2, 3.0]);
    }
}
