//! Fourier symbols of the averaging, Poisson and Riesz operators on `T^d`,
//! and samplers that measure the constants in their pointwise bounds.
//!
//! Frequencies are plain slices `&[f64]` in `[-1/2, 1/2)^d` here so the
//! evaluators can run in tight loops; [`FrequencyPoint`] converts via
//! [`FrequencyPoint::entries`].
//!
//! [`FrequencyPoint`]: crate::lattice::FrequencyPoint
//! [`FrequencyPoint::entries`]: crate::lattice::FrequencyPoint::entries

mod checks;
mod report;
mod sample;

pub use checks::{
    check_annulus_sum, check_box_bounds, check_chain_bound, check_decay_bound, check_enj_bound,
    check_lipschitz_bounds, check_product_bound, log_slope, product_functional, relative_change,
    CheckConfig,
};
pub use report::{Bound, BoundReport, WorstPoint};
pub use sample::{FrequencySampler, SampleMode};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Below this `|sin πξ_k|` the Dirichlet quotient switches to its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-8;

/// One-dimensional normalized Dirichlet kernel
/// `sin((2N+1)πx) / ((2N+1) sin πx)`.
pub fn dirichlet(n: u64, x: f64) -> f64 {
    let k = (2 * n + 1) as f64;
    let y = PI * x;
    let s = y.sin();
    if s.abs() < SERIES_THRESHOLD {
        dirichlet_series(k, y)
    } else {
        (k * y).sin() / (k * s)
    }
}

/// `sin(Ky)/(K sin y)` to fourth order in `y`.
fn dirichlet_series(k: f64, y: f64) -> f64 {
    let k2 = k * k;
    let y2 = y * y;
    1.0 - (k2 - 1.0) * y2 / 6.0 + (3.0 * k2 * k2 - 10.0 * k2 + 7.0) * y2 * y2 / 360.0
}

/// Symbol of the cube average `M_N`: `Π_k dirichlet(N, ξ_k)`.
pub fn cube_symbol(n: u64, xi: &[f64]) -> f64 {
    xi.iter().map(|&x| dirichlet(n, x)).product()
}

/// `m_N(ξ)` for every `N` in `1..=n_max` at once (entry `N - 1`).
///
/// Uses the angle-addition ladder `sin((2N+3)θ) = sin((2N+1)θ)cos 2θ +
/// cos((2N+1)θ) sin 2θ` per coordinate.
pub fn cube_symbol_ladder(n_max: u64, xi: &[f64]) -> Vec<f64> {
    let n_max = n_max as usize;
    let mut out = vec![1.0; n_max];
    for &x in xi {
        let theta = PI * x;
        let st = theta.sin();
        if st.abs() < SERIES_THRESHOLD {
            for (i, o) in out.iter_mut().enumerate() {
                *o *= dirichlet_series((2 * i + 3) as f64, theta);
            }
            continue;
        }
        let (s2, c2) = (2.0 * theta).sin_cos();
        // Start at N = 1: angle 3θ.
        let (mut s, mut c) = (3.0 * theta).sin_cos();
        for (i, o) in out.iter_mut().enumerate() {
            let k = (2 * i + 3) as f64;
            *o *= s / (k * st);
            let ns = s * c2 + c * s2;
            c = c * c2 - s * s2;
            s = ns;
        }
    }
    out
}

/// `sin(πu)/(πu)` with the removable singularity filled in.
fn sinc(u: f64) -> f64 {
    let y = PI * u;
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

/// Symbol of the continuous box average `ν_t(ξ) = Π_k sinc((2t+1)ξ_k)`.
pub fn box_symbol(t: f64, xi: &[f64]) -> f64 {
    let k = 2.0 * t + 1.0;
    xi.iter().map(|&x| sinc(k * x)).product()
}

/// `|ξ|_sin = (Σ_k sin²(πξ_k))^{1/2}`.
pub fn xi_sin_norm(xi: &[f64]) -> f64 {
    xi.iter()
        .map(|&x| (PI * x).sin().powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn euclidean_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Poisson symbol `e^{-t|ξ|_sin}`.
pub fn poisson_symbol(t: f64, xi: &[f64]) -> f64 {
    (-t * xi_sin_norm(xi)).exp()
}

/// Riesz symbol `r_j(ξ) = (1 − e^{−2πiξ_j}) / (2|ξ|_sin)`, `j` counted from 1.
pub fn riesz_symbol(j: usize, xi: &[f64]) -> Result<Complex64> {
    if j == 0 || j > xi.len() {
        return Err(Error::Domain(format!(
            "Riesz index {j} outside 1..={}",
            xi.len()
        )));
    }
    let s = xi_sin_norm(xi);
    if s == 0.0 {
        return Err(Error::Singularity(
            "Riesz symbol is undefined at ξ = 0".into(),
        ));
    }
    let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -2.0 * PI * xi[j - 1]);
    Ok(num / (2.0 * s))
}

/// The five families of symbols, tagged with their parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SymbolKind {
    CubeDirichlet(u64),
    ContinuousBox(f64),
    Poisson(f64),
    CubeMinusPoisson(f64),
    Riesz(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Symbol {
    dim: usize,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(dim: usize, kind: SymbolKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Structural(
                "symbol dimension must be positive".into(),
            ));
        }
        let ok = match kind {
            SymbolKind::CubeDirichlet(n) => n >= 1,
            SymbolKind::ContinuousBox(t) | SymbolKind::Poisson(t) => t >= 0.0 && t.is_finite(),
            SymbolKind::CubeMinusPoisson(t) => t > 0.0 && t.is_finite(),
            SymbolKind::Riesz(j) => (1..=dim).contains(&j),
        };
        if !ok {
            return Err(Error::Domain(format!(
                "invalid symbol parameter {kind:?} in dimension {dim}"
            )));
        }
        Ok(Symbol { dim, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim {
            return Err(Error::Structural(format!(
                "frequency of length {} for a symbol in dimension {}",
                xi.len(),
                self.dim
            )));
        }
        let re = |v: f64| Ok(Complex64::new(v, 0.0));
        match self.kind {
            SymbolKind::CubeDirichlet(n) => re(cube_symbol(n, xi)),
            SymbolKind::ContinuousBox(t) => re(box_symbol(t, xi)),
            SymbolKind::Poisson(t) => re(poisson_symbol(t, xi)),
            SymbolKind::CubeMinusPoisson(t) => {
                re(cube_symbol(t.floor().max(0.0) as u64, xi) - poisson_symbol(t, xi))
            }
            SymbolKind::Riesz(j) => riesz_symbol(j, xi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cube_symbol_examples() {
        assert!((cube_symbol(1, &[0.25]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cube_symbol(5, &[0.0, 0.0, 0.0]), 1.0);
        assert!(cube_symbol(1, &[1.0 / 3.0, 1.0 / 3.0]).abs() < 1e-15);
    }

    #[test]
    fn series_branch_is_continuous() {
        for n in [1, 7, 64, 1000] {
            let near = 1.0001e-8 / PI;
            let inside = 0.9999e-8 / PI;
            let a = dirichlet(n, near);
            let b = dirichlet(n, inside);
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn ladder_matches_direct_evaluation() {
        let pts: [&[f64]; 4] = [
            &[0.1, -0.37, 0.49],
            &[0.0, 1e-10],
            &[-0.5],
            &[0.003, 0.2, -0.1, 0.45],
        ];
        for xi in pts {
            let lad = cube_symbol_ladder(200, xi);
            for (i, v) in lad.iter().enumerate() {
                let direct = cube_symbol(i as u64 + 1, xi);
                assert!((v - direct).abs() < 1e-12, "N={} xi={xi:?}", i + 1);
            }
        }
    }

    #[test]
    fn box_symbol_examples() {
        assert_eq!(box_symbol(0.0, &[0.0]), 1.0);
        assert!(box_symbol(1.0, &[1.0 / 3.0]).abs() < 1e-15);
        assert!((box_symbol(0.0, &[0.5]) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sin_norm_and_poisson_examples() {
        for d in [1, 3, 8] {
            let xi = vec![0.5; d];
            assert!((xi_sin_norm(&xi) - (d as f64).sqrt()).abs() < 1e-14);
            assert!((poisson_symbol(1.0, &xi) - (-(d as f64).sqrt()).exp()).abs() < 1e-15);
        }
        assert_eq!(xi_sin_norm(&[0.0, 0.0]), 0.0);
        assert_eq!(poisson_symbol(7.0, &[0.0]), 1.0);
        let x = (0.5f64).asin() / PI;
        assert!((poisson_symbol(2.0, &[x]) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn riesz_examples() {
        for x in [0.1, -0.3, 0.49, -0.5] {
            assert!((riesz_symbol(1, &[x]).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        for j in 1..=2 {
            let r = riesz_symbol(j, &[0.5, 0.5]).unwrap();
            assert!((r.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        }
        assert!(matches!(
            riesz_symbol(1, &[0.0, 0.0]),
            Err(Error::Singularity(_))
        ));
        assert!(riesz_symbol(3, &[0.1, 0.1]).is_err());
    }

    #[test]
    fn symbol_dispatch() {
        let xi = [0.2, -0.1];
        let n = Symbol::new(2, SymbolKind::CubeMinusPoisson(3.7)).unwrap();
        let expect = cube_symbol(3, &xi) - poisson_symbol(3.7, &xi);
        assert!((n.eval(&xi).unwrap().re - expect).abs() < 1e-15);
        assert!(Symbol::new(2, SymbolKind::CubeDirichlet(0)).is_err());
        assert!(Symbol::new(2, SymbolKind::Riesz(3)).is_err());
        assert!(n.eval(&[0.1]).is_err());
    }

    fn freq(d: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-0.5f64..0.5, d)
    }

    proptest! {
        #[test]
        fn cube_symbol_bounded_and_even(xi in freq(4), n in 1u64..200) {
            let v = cube_symbol(n, &xi);
            prop_assert!(v.abs() <= 1.0 + 1e-15);
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            prop_assert!((cube_symbol(n, &neg) - v).abs() < 1e-15);
        }

        #[test]
        fn sin_norm_sandwich(xi in freq(6)) {
            let e = euclidean_norm(&xi);
            let s = xi_sin_norm(&xi);
            // |sin πx| ≥ 2|x| on [-1/2, 1/2] gives the lower bound with room to spare.
            prop_assert!(e <= s);
            prop_assert!(s <= PI * e);
        }

        #[test]
        fn riesz_partition_of_unity(xi in freq(5)) {
            prop_assume!(xi_sin_norm(&xi) > 0.0);
            let total: f64 = (1..=5).map(|j| riesz_symbol(j, &xi).unwrap().norm_sqr()).sum();
            prop_assert!((total - 1.0).abs() < 1e-14);
        }
    }
}
