//! Desk-scale experiments: counterexample growth, the discrete/continuous
//! comparison, operator-norm scans, Riesz growth and short variations.
//!
//! Randomized experiments take a base seed; every ensemble member derives its
//! own seed from `(base, d, index)`, so results do not depend on scheduling.

mod comparison;
mod counterexample;
mod norm_scan;
mod riesz_growth;
mod short_variation;

pub use comparison::{comparison_check, comparison_factor, factor_check, ComparisonReport};
pub use counterexample::{
    counterexample_direct, counterexample_exact_ratio, enumerate_parity_counts, parity_counts,
    CounterexampleBound, CounterexampleSpec, DirectRatio, ParityCounts, DIRECT_SIDE,
    MAX_BLOCK_EXPONENT,
};
pub use norm_scan::{norm_growth_scan, BodyFamily, ScanPoint, ScanResult};
pub use riesz_growth::{riesz_growth, riesz_lower_constant, RieszConfig, RieszPoint, RieszResult};
pub use short_variation::{
    short_variation_bound, short_variation_field, short_variation_ratio, ShortVariationPoint,
    ShortVariationResult,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BoxFunction, Coord, SparseFunction};
use crate::par::derive_seed;

/// A curve `d ↦ ratio` with a fitted trend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub fit: f64,
}

impl GrowthCurve {
    /// Fits `y ≈ a + fit·ln x`.
    pub fn log_linear(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Self::validate(&xs, &ys)?;
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let fit = least_squares_slope(&lx, &ys);
        Ok(Self { xs, ys, fit })
    }

    /// Fits `ln y ≈ a + fit·ln x`.
    pub fn log_log(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Self::validate(&xs, &ys)?;
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let fit = least_squares_slope(&lx, &ly);
        Ok(Self { xs, ys, fit })
    }

    fn validate(xs: &[f64], ys: &[f64]) -> Result<()> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Structural(format!(
                "curve with {} abscissae and {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if let Some(y) = ys.iter().find(|y| !(**y > 0.0 && y.is_finite())) {
            return Err(Error::Domain(format!("curve ordinate {y} is not positive")));
        }
        if let Some(x) = xs.iter().find(|x| !(**x > 0.0)) {
            return Err(Error::Domain(format!("curve abscissa {x} is not positive")));
        }
        Ok(())
    }

    pub fn strictly_increasing(&self) -> bool {
        self.ys.windows(2).all(|w| w[1] > w[0])
    }

    /// `max y / min y`.
    pub fn spread(&self) -> f64 {
        let max = self.ys.iter().copied().fold(f64::MIN, f64::max);
        let min = self.ys.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Ordinary least-squares slope; zero for fewer than two distinct abscissae.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}

/// Kinds of test functions in the seeded ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MemberKind {
    Delta,
    BoxIndicator,
    SparseNonnegative,
    DenseNonnegative,
    DenseSigned,
}

/// A labelled ensemble member on a finite box.
#[derive(Debug, Clone)]
pub struct Member {
    pub kind: MemberKind,
    pub index: usize,
    pub f: BoxFunction,
}

/// Deterministic ensemble of `size` functions on `Z^d`.
///
/// Member 0 is `δ_0`, members 1..=3 are centred cube indicators of radius
/// 1..=3, and the rest cycle through random sparse nonnegative, dense
/// nonnegative and dense signed functions supported in `[-2, 2]^d`.
pub fn ensemble(dim: usize, size: usize, seed: u64) -> Result<Vec<Member>> {
    (0..size).map(|i| member(dim, i, seed)).collect()
}

fn member(dim: usize, index: usize, seed: u64) -> Result<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[dim as u64, index as u64]));
    let (kind, f) = match index {
        0 => (
            MemberKind::Delta,
            BoxFunction::from_sparse(&SparseFunction::delta(dim))?,
        ),
        1..=3 => {
            let r = index as i64;
            let side = (2 * r + 1) as usize;
            (
                MemberKind::BoxIndicator,
                BoxFunction::from_fn(vec![-r; dim], vec![side; dim], |_| 1.0)?,
            )
        }
        _ => match (index - 4) % 3 {
            0 => (
                MemberKind::SparseNonnegative,
                BoxFunction::from_sparse(&random_sparse_nonnegative(dim, 6, 2, &mut rng)?)?,
            ),
            1 => (
                MemberKind::DenseNonnegative,
                random_dense(dim, &mut rng, |r| r.gen::<f64>())?,
            ),
            _ => (
                MemberKind::DenseSigned,
                random_dense(dim, &mut rng, |r| r.gen_range(-1.0..1.0))?,
            ),
        },
    };
    Ok(Member { kind, index, f })
}

fn random_dense<F>(dim: usize, rng: &mut ChaCha8Rng, draw: F) -> Result<BoxFunction>
where
    F: Fn(&mut ChaCha8Rng) -> f64,
{
    let mut f = BoxFunction::zeros(vec![-2; dim], vec![5; dim])?;
    f.values_mut().iter_mut().for_each(|v| *v = draw(rng));
    Ok(f)
}

/// `count` random points of `[-radius, radius]^d` with weights in `(0, 1]`.
pub fn random_sparse_nonnegative<R: Rng>(
    dim: usize,
    count: usize,
    radius: i64,
    rng: &mut R,
) -> Result<SparseFunction> {
    let mut f = SparseFunction::new(dim);
    for _ in 0..count {
        let c = Coord::new((0..dim).map(|_| rng.gen_range(-radius..=radius)).collect());
        let w = 1.0 - rng.gen::<f64>();
        let prev = f.get(&c).re;
        f.insert(c, (prev + w).into())?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        assert!((least_squares_slope(&xs, &ys) - 2.0).abs() < 1e-12);
        assert_eq!(least_squares_slope(&[1.0, 1.0], &[0.0, 5.0]), 0.0);
    }

    #[test]
    fn curve_fits() {
        let xs = vec![1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.5)).collect();
        let c = GrowthCurve::log_log(xs.clone(), ys.clone()).unwrap();
        assert!((c.fit - 0.5).abs() < 1e-12);
        assert!(c.strictly_increasing());
        let flat = GrowthCurve::log_linear(xs, vec![1.0; 4]).unwrap();
        assert_eq!(flat.fit, 0.0);
        assert_eq!(flat.spread(), 1.0);
        assert!(GrowthCurve::log_linear(vec![1.0], vec![0.0]).is_err());
        assert!(GrowthCurve::log_linear(vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn ensembles_are_reproducible() {
        let a = ensemble(2, 10, 5).unwrap();
        let b = ensemble(2, 10, 5).unwrap();
        let c = ensemble(2, 10, 6).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.f, y.f);
            assert_eq!(x.kind, y.kind);
        }
        assert!(a.iter().zip(&c).skip(4).any(|(x, y)| x.f != y.f));
        assert_eq!(a[0].kind, MemberKind::Delta);
        assert_eq!(a[0].f.values(), &[1.0]);
    }
}
