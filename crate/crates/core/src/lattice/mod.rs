//! Functions on `Z^d`: exact sparse maps, dense boxes, and periodic grids
//! with their multidimensional FFT.

mod boxed;
mod fft;
mod grid;
mod sparse;

pub use boxed::BoxFunction;
pub use fft::{
    circular_convolve, fft_forward, fft_forward_in_place, fft_inverse, fft_inverse_in_place,
};
pub use grid::{embed, FrequencyPoint, GridFunction, MAX_GRID_LOG2};
pub use sparse::{Coord, SparseFunction};

use crate::error::{Error, Result};

/// `ℓ^p` norm of a finite family of magnitudes; `p = f64::INFINITY` gives the max.
///
/// Values are rescaled by their maximum before powering, so large `p` does
/// not overflow.
pub fn lp_norm_of<I>(magnitudes: I, p: f64) -> Result<f64>
where
    I: IntoIterator<Item = f64>,
{
    check_exponent(p)?;
    let mags: Vec<f64> = magnitudes.into_iter().map(f64::abs).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(max);
    }
    if p == 1.0 {
        return Ok(mags.iter().sum());
    }
    if p == 2.0 {
        let s: f64 = mags.iter().map(|m| (m / max) * (m / max)).sum();
        return Ok(max * s.sqrt());
    }
    let s: f64 = mags.iter().map(|m| (m / max).powf(p)).sum();
    Ok(max * s.powf(1.0 / p))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("lp exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// Types carrying an `ℓ^p(Z^d)` norm.
pub trait LpNorm {
    fn lp_norm(&self, p: f64) -> Result<f64>;
}

impl LpNorm for SparseFunction {
    fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_of(self.iter().map(|(_, v)| v.norm()), p)
    }
}

impl LpNorm for GridFunction {
    fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_of(self.values().iter().map(|v| v.norm()), p)
    }
}

impl LpNorm for BoxFunction {
    fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_of(self.values().iter().copied(), p)
    }
}
