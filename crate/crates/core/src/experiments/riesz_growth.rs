//! Growth of the vector Riesz transform on `ℓ^q`, `q < 2`, tested on
//! `f = L^{1/2} δ_0`, for which `R_j f = ½ Δ_j δ_0` exactly.

use num_complex::Complex64;
use serde::Serialize;

use super::GrowthCurve;
use crate::error::{Error, Result};
use crate::lattice::{fft_inverse_in_place, lp_norm_of, GridFunction, LpNorm, MAX_GRID_LOG2};
use crate::operators::{half_laplacian, riesz, HalfPower};
use crate::par::Execution;

/// `B = (2^q + 2)^{-1/(2q)}`.
pub fn riesz_lower_constant(q: f64) -> f64 {
    (2f64.powf(q) + 2.0).powf(-1.0 / (2.0 * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszConfig {
    pub q: f64,
    /// First grid side; doubled until the ratio settles.
    pub start_side: usize,
    /// Relative change below which the ratio counts as settled.
    pub tolerance: f64,
}

impl RieszConfig {
    pub fn new(q: f64) -> Self {
        Self {
            q,
            start_side: 4,
            tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RieszPoint {
    pub d: usize,
    /// Side at which the ratio settled.
    pub side: usize,
    pub ratio: f64,
    pub previous: f64,
    /// `B d^{1/q - 1/2}`.
    pub bound: f64,
    /// `‖L^{1/2} δ_0‖_q` on the final grid.
    pub half_norm: f64,
    /// `d^{1/2} (2^q + 2)^{1/(2q)}`.
    pub half_norm_bound: f64,
    /// `max_j ‖R_j L^{1/2} δ_0 − ½ Δ_j δ_0‖_∞` on a small grid.
    pub identity_error: f64,
}

impl RieszPoint {
    pub fn passes(&self) -> bool {
        self.ratio >= self.bound && self.half_norm <= self.half_norm_bound
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RieszResult {
    pub q: f64,
    pub points: Vec<RieszPoint>,
    pub curve: GrowthCurve,
}

/// Runs the truncation schedule for every `d` in `dims`.
pub fn riesz_growth(cfg: &RieszConfig, dims: &[usize], exec: Execution) -> Result<RieszResult> {
    let q = cfg.q;
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::Domain(format!("q must lie in (1, 2), got {q}")));
    }
    if cfg.start_side < 4 || !cfg.start_side.is_power_of_two() {
        return Err(Error::Domain(format!(
            "start side must be a power of two >= 4, got {}",
            cfg.start_side
        )));
    }
    let points = dims
        .iter()
        .map(|&d| riesz_point(cfg, d, exec))
        .collect::<Result<Vec<_>>>()?;
    let xs = points.iter().map(|p| p.d as f64).collect();
    let ys = points.iter().map(|p| p.ratio).collect();
    Ok(RieszResult {
        q,
        points,
        curve: GrowthCurve::log_log(xs, ys)?,
    })
}

fn riesz_point(cfg: &RieszConfig, d: usize, exec: Execution) -> Result<RieszPoint> {
    let q = cfg.q;
    let numerator = vector_gradient_norm(d, q)?;
    let fits = |side: usize| (side.trailing_zeros() as u64) * d as u64 <= MAX_GRID_LOG2 as u64;
    if !fits(cfg.start_side) {
        return Err(Error::Capacity {
            what: "riesz grid points",
            requested: (cfg.start_side as u128).pow(d as u32),
            limit: 1 << MAX_GRID_LOG2,
        });
    }
    let mut side = cfg.start_side;
    let mut half_norm = half_root_delta(d, side, exec)?.lp_norm(q)?;
    let mut ratio = numerator / half_norm;
    loop {
        let next = side * 2;
        if !fits(next) {
            return Err(Error::NonConvergence {
                side,
                last: ratio,
                previous: f64::NAN,
            });
        }
        let norm = half_root_delta(d, next, exec)?.lp_norm(q)?;
        let r = numerator / norm;
        let previous = ratio;
        side = next;
        ratio = r;
        half_norm = norm;
        if (r - previous).abs() < cfg.tolerance * previous.abs() {
            return Ok(RieszPoint {
                d,
                side,
                ratio,
                previous,
                bound: riesz_lower_constant(q) * (d as f64).powf(1.0 / q - 0.5),
                half_norm,
                half_norm_bound: (d as f64).sqrt() * (2f64.powf(q) + 2.0).powf(1.0 / (2.0 * q)),
                identity_error: identity_error(d)?,
            });
        }
        if !fits(side * 2) {
            return Err(Error::NonConvergence {
                side,
                last: ratio,
                previous,
            });
        }
    }
}

/// `‖(Σ_j |½ Δ_j δ_0|²)^{1/2}‖_q`: the field is `√d/2` at 0 and `1/2` at each `−e_j`.
fn vector_gradient_norm(d: usize, q: f64) -> Result<f64> {
    let mut mags = vec![0.5; d];
    mags.push(0.5 * (d as f64).sqrt());
    lp_norm_of(mags, q)
}

/// `L^{1/2} δ_0` on the torus of the given side: the inverse transform of `|ξ|_sin`.
fn half_root_delta(d: usize, side: usize, exec: Execution) -> Result<GridFunction> {
    let mut g = GridFunction::zeros(d, side)?;
    let sin2: Vec<f64> = (0..side)
        .map(|k| {
            (std::f64::consts::PI * k as f64 / side as f64)
                .sin()
                .powi(2)
        })
        .collect();
    let row = side;
    exec.for_each_chunk_mut(g.values_mut(), row * 64, |chunk, vals| {
        let start = chunk * row * 64;
        for (index, v) in (start..).zip(vals.iter_mut()) {
            let mut rest = index;
            let mut s = 0.0;
            for _ in 0..d {
                s += sin2[rest % side];
                rest /= side;
            }
            *v = Complex64::new(s.sqrt(), 0.0);
        }
    });
    fft_inverse_in_place(&mut g, exec);
    Ok(g)
}

/// Checks `R_j L^{1/2} δ_0 = ½ Δ_j δ_0` through the spectral operators.
fn identity_error(d: usize) -> Result<f64> {
    let side = if 8usize.pow(d as u32) <= 1 << 20 {
        8
    } else {
        4
    };
    let delta = GridFunction::delta(d, side, &vec![0; d])?;
    let f = half_laplacian(&delta, HalfPower::Plus)?;
    let mut worst: f64 = 0.0;
    for j in 1..=d {
        let rj = riesz(&f, j)?;
        let mut target = GridFunction::zeros(d, side)?;
        let mut minus = vec![0i64; d];
        minus[j - 1] = -1;
        let i0 = target.index_of(&vec![0; d])?;
        let i1 = target.index_of(&minus)?;
        target.values_mut()[i0] = Complex64::new(0.5, 0.0);
        target.values_mut()[i1] = Complex64::new(-0.5, 0.0);
        worst = worst.max(rj.max_abs_diff(&target)?);
    }
    Ok(worst)
}
