use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::{Coord, SparseFunction};
use crate::error::{Error, Result};

/// Upper bound on `dim · log2(side)`, i.e. at most `2^24` grid points.
pub const MAX_GRID_LOG2: u32 = 24;

/// Dense complex function on the torus `(Z/mZ)^d`, row-major with the last
/// axis contiguous.
///
/// Index `i` along an axis stands for the integer `i` when `i < m/2` and for
/// `i - m` otherwise. The same array read on the frequency side stands for
/// `ξ = i/m` folded into `[-1/2, 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dim: usize,
    side: usize,
    values: Vec<Complex64>,
}

fn check_shape(dim: usize, side: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::Structural("grid dimension must be positive".into()));
    }
    if side < 4 || !side.is_power_of_two() {
        return Err(Error::Structural(format!(
            "grid side must be a power of two >= 4, got {side}"
        )));
    }
    let log2 = side.trailing_zeros() as u128 * dim as u128;
    if log2 > MAX_GRID_LOG2 as u128 {
        return Err(Error::Capacity {
            what: "grid points (log2)",
            requested: log2,
            limit: MAX_GRID_LOG2 as u128,
        });
    }
    Ok(side.pow(dim as u32))
}

#[inline]
pub(crate) fn fold(i: usize, side: usize) -> i64 {
    if i < side / 2 {
        i as i64
    } else {
        i as i64 - side as i64
    }
}

#[inline]
pub(crate) fn unfold(x: i64, side: usize) -> usize {
    x.rem_euclid(side as i64) as usize
}

impl GridFunction {
    pub fn zeros(dim: usize, side: usize) -> Result<Self> {
        let n = check_shape(dim, side)?;
        Ok(GridFunction {
            dim,
            side,
            values: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn from_values(dim: usize, side: usize, values: Vec<Complex64>) -> Result<Self> {
        let n = check_shape(dim, side)?;
        if values.len() != n {
            return Err(Error::Structural(format!(
                "expected {n} values for side {side} in dimension {dim}, got {}",
                values.len()
            )));
        }
        Ok(GridFunction { dim, side, values })
    }

    /// Tabulates `f` at the folded integer coordinates.
    pub fn from_fn<F>(dim: usize, side: usize, f: F) -> Result<Self>
    where
        F: Fn(&[i64]) -> Complex64,
    {
        let mut g = Self::zeros(dim, side)?;
        let mut c = vec![0i64; dim];
        for i in 0..g.values.len() {
            g.coord_into(i, &mut c);
            g.values[i] = f(&c);
        }
        Ok(g)
    }

    pub fn constant(dim: usize, side: usize, c: Complex64) -> Result<Self> {
        let n = check_shape(dim, side)?;
        Ok(GridFunction {
            dim,
            side,
            values: vec![c; n],
        })
    }

    pub fn delta(dim: usize, side: usize, at: &[i64]) -> Result<Self> {
        let mut g = Self::zeros(dim, side)?;
        let i = g.index_of(at)?;
        g.values[i] = Complex64::new(1.0, 0.0);
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Folded integer coordinate of a linear index.
    pub fn coord_of(&self, index: usize) -> Vec<i64> {
        let mut c = vec![0; self.dim];
        self.coord_into(index, &mut c);
        c
    }

    pub(crate) fn coord_into(&self, mut index: usize, out: &mut [i64]) {
        for k in (0..self.dim).rev() {
            out[k] = fold(index % self.side, self.side);
            index /= self.side;
        }
    }

    /// Linear index of an integer coordinate, reduced modulo the side.
    pub fn index_of(&self, coord: &[i64]) -> Result<usize> {
        if coord.len() != self.dim {
            return Err(Error::Structural(format!(
                "coordinate of length {} on a {}-dimensional grid",
                coord.len(),
                self.dim
            )));
        }
        Ok(coord
            .iter()
            .fold(0usize, |acc, &x| acc * self.side + unfold(x, self.side)))
    }

    pub fn get(&self, coord: &[i64]) -> Result<Complex64> {
        Ok(self.values[self.index_of(coord)?])
    }

    /// Frequency represented by a linear index of a transformed array.
    pub fn frequency_of(&self, index: usize) -> FrequencyPoint {
        let mut c = vec![0; self.dim];
        self.coord_into(index, &mut c);
        FrequencyPoint(c.iter().map(|&j| j as f64 / self.side as f64).collect())
    }

    /// Multiplies a frequency-side array by `symbol(ξ)`.
    pub fn apply_symbol<F>(&mut self, symbol: F)
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut c = vec![0i64; self.dim];
        let mut xi = vec![0f64; self.dim];
        let m = self.side as f64;
        for i in 0..self.values.len() {
            self.coord_into(i, &mut c);
            for (x, &j) in xi.iter_mut().zip(&c) {
                *x = j as f64 / m;
            }
            self.values[i] *= symbol(&xi);
        }
    }

    /// `max ‖x‖_∞` over entries with magnitude above `tol`.
    pub fn support_radius(&self, tol: f64) -> Option<i64> {
        let mut c = vec![0i64; self.dim];
        let mut best: Option<i64> = None;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() > tol {
                self.coord_into(i, &mut c);
                let r = c.iter().map(|x| x.abs()).max().unwrap_or(0);
                best = Some(best.map_or(r, |b| b.max(r)));
            }
        }
        best
    }

    pub fn same_shape(&self, other: &GridFunction) -> Result<()> {
        if self.dim != other.dim || self.side != other.side {
            return Err(Error::Structural(format!(
                "grid shapes differ: (d={}, m={}) vs (d={}, m={})",
                self.dim, self.side, other.dim, other.side
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ_x f(x) conj(g(x))`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn add_assign(&mut self, other: &GridFunction, c: f64) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * c;
        }
        Ok(())
    }

    /// Restriction to the nonzero entries, as a function on `Z^d`.
    pub fn to_sparse(&self) -> SparseFunction {
        let mut f = SparseFunction::new(self.dim);
        for (i, v) in self.values.iter().enumerate() {
            if *v != Complex64::new(0.0, 0.0) {
                f.insert(Coord::new(self.coord_of(i)), *v)
                    .expect("grid coordinates have grid dimension");
            }
        }
        f
    }
}

/// A frequency `ξ ∈ [-1/2, 1/2)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint(Vec<f64>);

impl FrequencyPoint {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Structural("frequency of dimension zero".into()));
        }
        if let Some(x) = entries.iter().find(|x| !(-0.5..0.5).contains(*x)) {
            return Err(Error::Domain(format!(
                "frequency coordinate {x} outside [-1/2, 1/2)"
            )));
        }
        Ok(FrequencyPoint(entries))
    }

    /// Reduces arbitrary reals into `[-1/2, 1/2)`.
    pub fn wrapped(entries: Vec<f64>) -> Self {
        FrequencyPoint(
            entries
                .into_iter()
                .map(|x| {
                    let y = x - x.round();
                    if y >= 0.5 {
                        y - 1.0
                    } else {
                        y
                    }
                })
                .collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        FrequencyPoint(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean norm `|ξ|`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

/// Places a finitely supported function into a grid of the given side,
/// keeping `margin` free lattice layers for later convolutions.
///
/// The support must lie in the centred box of radius `side/2 - 1 - margin`.
pub fn embed(f: &SparseFunction, side: usize, margin: i64) -> Result<GridFunction> {
    let mut g = GridFunction::zeros(f.dim(), side)?;
    let radius = f.support_radius().unwrap_or(0);
    let limit = side as i64 / 2 - 1 - margin;
    if radius > limit {
        let need = (2 * (radius + margin + 1)).max(4) as usize;
        return Err(Error::Padding {
            radius,
            margin,
            side,
            required_side: need.next_power_of_two(),
        });
    }
    for (c, v) in f.iter() {
        let i = g.index_of(c.entries())?;
        g.values[i] = *v;
    }
    Ok(g)
}
