//! Ergodic averages on the cyclic product system `(Z/m)^d` with the coordinate
//! shifts `S_j^y(x) = x - y e_j`, and the transference to lattice averages.

use serde::Serialize;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::lattice::{lp_norm_of, BoxFunction, Coord};
use crate::operators::{kernel_radius, ScaleSet};
use crate::par::Execution;
use crate::variation::{v_r, ScalarPath};

/// A real state on `(Z/m)^d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSystem {
    dim: usize,
    modulus: usize,
    state: Vec<f64>,
}

impl CyclicSystem {
    pub fn new(dim: usize, modulus: usize, state: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if modulus < 2 {
            return Err(Error::Domain(format!(
                "modulus must be >= 2, got {modulus}"
            )));
        }
        let n = (modulus as u128)
            .checked_pow(dim as u32)
            .unwrap_or(u128::MAX);
        if n != state.len() as u128 {
            return Err(Error::Structural(format!(
                "state of length {} on a system of {n} points",
                state.len()
            )));
        }
        Ok(Self {
            dim,
            modulus,
            state,
        })
    }

    pub fn from_fn<F: FnMut(&[usize]) -> f64>(
        dim: usize,
        modulus: usize,
        mut f: F,
    ) -> Result<Self> {
        let n = modulus.checked_pow(dim as u32).ok_or(Error::Capacity {
            what: "cyclic system points",
            requested: u128::MAX,
            limit: usize::MAX as u128,
        })?;
        let mut x = vec![0usize; dim];
        let state = (0..n)
            .map(|i| {
                decode(i, modulus, &mut x);
                f(&x)
            })
            .collect();
        Self::new(dim, modulus, state)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    /// Linear index of `x` reduced modulo `m`.
    pub fn index_of(&self, x: &[i64]) -> usize {
        let m = self.modulus as i64;
        x.iter().fold(0usize, |acc, &v| {
            acc * self.modulus + v.rem_euclid(m) as usize
        })
    }

    pub fn value_at(&self, x: &[i64]) -> f64 {
        self.state[self.index_of(x)]
    }

    /// The state composed with `S_axis^y`: `x ↦ f(x - y e_axis)`.
    pub fn shifted(&self, axis: usize, y: i64) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::Domain(format!(
                "axis {axis} outside 0..{}",
                self.dim
            )));
        }
        let mut x = vec![0usize; self.dim];
        let mut c = vec![0i64; self.dim];
        let state = (0..self.len())
            .map(|i| {
                decode(i, self.modulus, &mut x);
                for (ck, xk) in c.iter_mut().zip(&x) {
                    *ck = *xk as i64;
                }
                c[axis] -= y;
                self.value_at(&c)
            })
            .collect();
        Ok(Self {
            state,
            ..self.clone()
        })
    }

    /// `Σ_x f(x)`.
    pub fn total(&self) -> f64 {
        self.state.iter().sum()
    }
}

fn decode(mut i: usize, m: usize, out: &mut [usize]) {
    for k in (0..out.len()).rev() {
        out[k] = i % m;
        i /= m;
    }
}

/// `A_t f(x) = |G_t ∩ Z^d|^{-1} Σ_{y ∈ G_t ∩ Z^d} f(x - y)`, all shifts mod `m`.
pub fn ergodic_average(sys: &CyclicSystem, body: &Body, t: f64) -> Result<CyclicSystem> {
    ergodic_average_with(sys, body, t, Execution::default())
}

pub fn ergodic_average_with(
    sys: &CyclicSystem,
    body: &Body,
    t: f64,
    exec: Execution,
) -> Result<CyclicSystem> {
    if body.dim() != sys.dim {
        return Err(Error::Structural(format!(
            "body of dimension {} on a {}-dimensional system",
            body.dim(),
            sys.dim
        )));
    }
    let section = body.lattice_points(t)?;
    average_over(sys, section.points(), exec)
}

fn average_over(sys: &CyclicSystem, kernel: &[Coord], exec: Execution) -> Result<CyclicSystem> {
    let m = sys.modulus as i64;
    let offsets: Vec<Vec<i64>> = kernel
        .iter()
        .map(|y| y.entries().iter().map(|v| (-v).rem_euclid(m)).collect())
        .collect();
    let w = 1.0 / kernel.len() as f64;
    let mut out = vec![0.0; sys.len()];
    let chunk = 1024;
    exec.for_each_chunk_mut(&mut out, chunk, |ci, vals| {
        let mut x = vec![0usize; sys.dim];
        let mut c = vec![0i64; sys.dim];
        for (k, v) in vals.iter_mut().enumerate() {
            decode(ci * chunk + k, sys.modulus, &mut x);
            let mut s = 0.0;
            for off in &offsets {
                for ((ck, xk), ok) in c.iter_mut().zip(&x).zip(off) {
                    *ck = *xk as i64 + ok;
                }
                s += sys.value_at(&c);
            }
            *v = s * w;
        }
    });
    Ok(CyclicSystem {
        state: out,
        ..sys.clone()
    })
}

/// Parameters of a transference check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferenceConfig {
    /// Radius of the inner cube `Q_R` of sampled offsets `z`.
    pub inner_radius: i64,
    pub scales: Vec<f64>,
    pub r: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferenceReport {
    /// `W = R + max kernel radius`, the localization radius of `φ_x`.
    pub window: i64,
    /// `max |A_t f(x - z) - M_t φ_x(z)|` over all `x`, `z ∈ Q_R` and scales.
    pub identity_error: f64,
    /// `‖V_r(A_t f)‖_p / ‖f‖_p` on the system.
    pub system_ratio: f64,
    /// `max_x ‖V_r(M_t φ_x)‖_p / ‖φ_x‖_p` on `Z^d`.
    pub lattice_constant: f64,
    /// `((2W+1)/(2R+1))^{d/p}`.
    pub window_factor: f64,
    /// `system_ratio - lattice_constant · window_factor`.
    pub excess: f64,
}

impl TransferenceReport {
    pub fn passes(&self, identity_tol: f64, excess_tol: f64) -> bool {
        self.identity_error <= identity_tol && self.excess <= excess_tol
    }
}

/// Compares ergodic averages with lattice averages of the localized functions
/// `φ_x(y) = f(x - y) 1_{|y|_∞ ≤ W}` and checks the transferred variation bound
///
/// `‖V_r(A_t f)‖_p ≤ C ((2W+1)/(2R+1))^{d/p} ‖f‖_p`,
///
/// where `C` is the largest lattice ratio over the `φ_x`.
pub fn transference_check(
    sys: &CyclicSystem,
    body: &Body,
    cfg: &TransferenceConfig,
    exec: Execution,
) -> Result<TransferenceReport> {
    let scales = ScaleSet::new(cfg.scales.clone())?;
    if !(cfg.r >= 1.0) || !(cfg.p >= 1.0) || cfg.p.is_infinite() {
        return Err(Error::Domain(format!(
            "need r >= 1 and finite p >= 1, got r = {}, p = {}",
            cfg.r, cfg.p
        )));
    }
    if cfg.inner_radius < 0 {
        return Err(Error::Domain("inner radius must be >= 0".into()));
    }
    let d = sys.dim;
    let t_max = *scales.scales().last().expect("nonempty");
    let reach = kernel_radius(body, t_max)?;
    let window = cfg.inner_radius + reach;
    if 2 * window + 1 > sys.modulus as i64 {
        return Err(Error::Precondition(format!(
            "window 2·{window}+1 exceeds modulus {}; averages would wrap",
            sys.modulus
        )));
    }
    let kernels = scales
        .scales()
        .iter()
        .map(|&t| body.lattice_points(t).map(|s| s.points().to_vec()))
        .collect::<Result<Vec<_>>>()?;

    // System side.
    let averages = kernels
        .iter()
        .map(|k| average_over(sys, k, exec))
        .collect::<Result<Vec<_>>>()?;
    let system_variation = pointwise_variation(
        &averages.iter().map(|a| a.state()).collect::<Vec<_>>(),
        scales.scales(),
        cfg.r,
    )?;
    let f_norm = lp_norm_of(sys.state.iter().copied(), cfg.p)?;
    let system_ratio = if f_norm == 0.0 {
        0.0
    } else {
        lp_norm_of(system_variation, cfg.p)? / f_norm
    };

    // Lattice side, one localized function per base point.
    let per_point = exec.map_range(sys.len(), |i| -> Result<(f64, f64)> {
        let mut xu = vec![0usize; d];
        decode(i, sys.modulus, &mut xu);
        let x: Vec<i64> = xu.iter().map(|&v| v as i64).collect();
        let side = (2 * window + 1) as usize;
        let mut phi = BoxFunction::zeros(vec![-window; d], vec![side; d])?;
        let mut y = vec![0i64; d];
        for j in 0..phi.len() {
            let c = phi.coord_of(j);
            for k in 0..d {
                y[k] = x[k] - c[k];
            }
            phi.values_mut()[j] = sys.value_at(&y);
        }
        let lat = kernels
            .iter()
            .map(|k| phi.average_with(k))
            .collect::<Result<Vec<_>>>()?;
        // Identity on Q_R.
        let mut err: f64 = 0.0;
        let inner = (2 * cfg.inner_radius + 1) as usize;
        let probe = BoxFunction::zeros(vec![-cfg.inner_radius; d], vec![inner; d])?;
        for j in 0..probe.len() {
            let z = probe.coord_of(j);
            for k in 0..d {
                y[k] = x[k] - z[k];
            }
            let at = sys.index_of(&y);
            for (a, l) in averages.iter().zip(&lat) {
                err = err.max((a.state[at] - l.get(&z)).abs());
            }
        }
        // Lattice variation ratio on the common box.
        let lo = lat.last().expect("nonempty").lo().to_vec();
        let shape = lat.last().expect("nonempty").shape().to_vec();
        let aligned = lat
            .iter()
            .map(|l| l.resized(lo.clone(), shape.clone()))
            .collect::<Result<Vec<_>>>()?;
        let v = pointwise_variation(
            &aligned.iter().map(|a| a.values()).collect::<Vec<_>>(),
            scales.scales(),
            cfg.r,
        )?;
        let phi_norm = lp_norm_of(phi.values().iter().copied(), cfg.p)?;
        let ratio = if phi_norm == 0.0 {
            0.0
        } else {
            lp_norm_of(v, cfg.p)? / phi_norm
        };
        Ok((err, ratio))
    });
    let mut identity_error: f64 = 0.0;
    let mut lattice_constant: f64 = 0.0;
    for item in per_point {
        let (e, r) = item?;
        identity_error = identity_error.max(e);
        lattice_constant = lattice_constant.max(r);
    }
    let window_factor =
        ((2 * window + 1) as f64 / (2 * cfg.inner_radius + 1) as f64).powf(d as f64 / cfg.p);
    Ok(TransferenceReport {
        window,
        identity_error,
        system_ratio,
        lattice_constant,
        window_factor,
        excess: system_ratio - lattice_constant * window_factor,
    })
}

/// `V_r` of `t ↦ fields[t][i]` for every index `i`.
fn pointwise_variation(fields: &[&[f64]], times: &[f64], r: f64) -> Result<Vec<f64>> {
    let n = fields[0].len();
    let mut out = Vec::with_capacity(n);
    let mut vals = vec![0.0; fields.len()];
    for i in 0..n {
        for (v, f) in vals.iter_mut().zip(fields) {
            *v = f[i];
        }
        if vals.iter().all(|v| *v == vals[0]) {
            out.push(0.0);
            continue;
        }
        let path = ScalarPath::new(times.to_vec(), vals.iter().map(|&v| v.into()).collect())?;
        out.push(v_r(&path, r)?.value);
    }
    Ok(out)
}
