//! Discrete cube averages against continuous averages of the box extension
//! `F(x) = Σ_n f(n) 1_{Q_{1/2}}(x - n)`.

use serde::Serialize;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::lattice::{BoxFunction, SparseFunction};

/// `(1 + 6/d)^d`.
pub fn comparison_factor(d: usize) -> f64 {
    let d = d as f64;
    (d * (6.0 / d).ln_1p()).exp()
}

/// `(1 + 6/d)^d ≤ e^6` for every `d ≤ d_max`, checked in log form.
pub fn factor_check(d_max: usize) -> bool {
    (1..=d_max).all(|d| {
        let d = d as f64;
        d * (6.0 / d).ln_1p() <= 6.0
    })
}

/// Outcome of a comparison run at one scale.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub d: usize,
    pub t: f64,
    pub factor: f64,
    pub functions: usize,
    /// `(n, x)` pairs evaluated.
    pub points: usize,
    pub violations: usize,
    /// Smallest `RHS / LHS` over points with `LHS > 0`.
    pub min_ratio: f64,
    /// Lattice point and sample point attaining `min_ratio`.
    pub worst: Option<(Vec<i64>, Vec<f64>)>,
}

impl ComparisonReport {
    pub fn passes(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `M_t f(n) ≤ (1+6/d)^d M_{t+2c} F(x)` for `x` at the corners and the
/// centre of `n + Q_{1/2}` and every `n` where the left side is nonzero.
///
/// Only the cube is supported: there the continuous average is a product of
/// interval overlaps and can be evaluated exactly.
pub fn comparison_check(
    body: &Body,
    t: f64,
    ensemble: &[SparseFunction],
) -> Result<ComparisonReport> {
    if !body.is_cube() {
        return Err(Error::Unsupported(format!(
            "continuous comparison is implemented for the cube only, got {}",
            body.label()
        )));
    }
    let d = body.dim();
    let c = body.comparison_constant();
    if t < c * d as f64 {
        return Err(Error::Precondition(format!(
            "scale {t} is below c(G)·d = {}",
            c * d as f64
        )));
    }
    let factor = comparison_factor(d);
    let s = t + 2.0 * c;
    let volume = (2.0 * s).powi(d as i32);
    let k = t.floor() as i64;
    let offsets = sample_offsets(d);

    let mut report = ComparisonReport {
        d,
        t,
        factor,
        functions: ensemble.len(),
        points: 0,
        violations: 0,
        min_ratio: f64::INFINITY,
        worst: None,
    };
    let mut x = vec![0.0; d];
    for f in ensemble {
        if f.dim() != d {
            return Err(Error::Structural(
                "ensemble member of wrong dimension".into(),
            ));
        }
        if f.iter().any(|(_, v)| v.re < 0.0 || v.im != 0.0) {
            return Err(Error::Domain(
                "comparison needs nonnegative functions".into(),
            ));
        }
        if f.is_empty() {
            continue;
        }
        let support: Vec<(Vec<i64>, f64)> = f
            .iter()
            .map(|(m, v)| (m.entries().to_vec(), v.re))
            .collect();
        let reach = BoxFunction::from_sparse(f)?;
        let lo: Vec<i64> = reach.lo().iter().map(|l| l - k).collect();
        let shape: Vec<usize> = reach.shape().iter().map(|s| s + 2 * k as usize).collect();
        let cells = BoxFunction::zeros(lo, shape)?;
        let width = ((2 * k + 1) as f64).powi(d as i32);
        for i in 0..cells.len() {
            let n = cells.coord_of(i);
            // Exact finite sum; sliding sums would leave rounding residue.
            let left = support
                .iter()
                .filter(|(m, _)| m.iter().zip(&n).all(|(a, b)| (a - b).abs() <= k))
                .map(|(_, v)| v)
                .sum::<f64>()
                / width;
            if left <= 0.0 {
                continue;
            }
            for off in &offsets {
                for (xk, (nk, ok)) in x.iter_mut().zip(n.iter().zip(off)) {
                    *xk = *nk as f64 + ok;
                }
                let integral: f64 = support
                    .iter()
                    .map(|(m, v)| v * overlap_volume(m, &x, s))
                    .sum();
                let right = factor * integral / volume;
                report.points += 1;
                let ratio = right / left;
                if ratio < report.min_ratio {
                    report.min_ratio = ratio;
                    report.worst = Some((n.clone(), x.clone()));
                }
                if left > right * (1.0 + 1e-12) {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}

/// `|(m + Q_{1/2}) ∩ (x + [-s, s]^d)|`.
fn overlap_volume(m: &[i64], x: &[f64], s: f64) -> f64 {
    m.iter()
        .zip(x)
        .map(|(&mk, &xk)| {
            let mk = mk as f64;
            let lo = (mk - 0.5).max(xk - s);
            let hi = (mk + 0.5).min(xk + s);
            (hi - lo).max(0.0)
        })
        .product()
}

/// The centre and the `2^d` corners of `Q_{1/2}`.
fn sample_offsets(d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; d]];
    for mask in 0..1usize << d {
        out.push(
            (0..d)
                .map(|k| if mask >> k & 1 == 1 { 0.5 } else { -0.5 })
                .collect(),
        );
    }
    out
}
