use super::sparse::{Coord, SparseFunction};
use crate::error::{Error, Result};

/// Maximum number of cells in a dense box.
pub const MAX_BOX_CELLS: usize = 1 << 26;

/// Dense real function on a box `lo + [0, shape)` of `Z^d`, zero outside.
///
/// Unlike [`GridFunction`](super::GridFunction) nothing wraps: averaging
/// grows the box by the kernel radius, so results are exact on `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxFunction {
    lo: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

fn cell_count(shape: &[usize]) -> Result<usize> {
    let mut n: u128 = 1;
    for &s in shape {
        if s == 0 {
            return Err(Error::Structural("box sides must be positive".into()));
        }
        n = n.saturating_mul(s as u128);
    }
    if n > MAX_BOX_CELLS as u128 {
        return Err(Error::Capacity {
            what: "box cells",
            requested: n,
            limit: MAX_BOX_CELLS as u128,
        });
    }
    Ok(n as usize)
}

impl BoxFunction {
    pub fn zeros(lo: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        if lo.is_empty() || lo.len() != shape.len() {
            return Err(Error::Structural(format!(
                "box corner has {} entries but shape has {}",
                lo.len(),
                shape.len()
            )));
        }
        let n = cell_count(&shape)?;
        Ok(BoxFunction {
            lo,
            shape,
            values: vec![0.0; n],
        })
    }

    /// Centred cube `[-r, r]^d`.
    pub fn centred(dim: usize, radius: i64) -> Result<Self> {
        Self::zeros(vec![-radius; dim], vec![(2 * radius + 1) as usize; dim])
    }

    pub fn from_fn<F>(lo: Vec<i64>, shape: Vec<usize>, f: F) -> Result<Self>
    where
        F: Fn(&[i64]) -> f64,
    {
        let mut b = Self::zeros(lo, shape)?;
        let mut c = vec![0i64; b.dim()];
        for i in 0..b.values.len() {
            b.coord_into(i, &mut c);
            b.values[i] = f(&c);
        }
        Ok(b)
    }

    /// Real part of `f` on the bounding box of its support.
    pub fn from_sparse(f: &SparseFunction) -> Result<Self> {
        let d = f.dim();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for c in f.support() {
            for (k, &x) in c.entries().iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        if f.is_empty() {
            return Self::zeros(vec![0; d], vec![1; d]);
        }
        let shape = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (b - a + 1) as usize)
            .collect();
        let mut b = Self::zeros(lo, shape)?;
        for (c, v) in f.iter() {
            if v.im != 0.0 {
                return Err(Error::Domain("dense boxes hold real values only".into()));
            }
            let i = b
                .index_of(c.entries())
                .expect("point lies in its bounding box");
            b.values[i] = v.re;
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn coord_into(&self, mut index: usize, out: &mut [i64]) {
        for k in (0..self.dim()).rev() {
            let s = self.shape[k];
            out[k] = self.lo[k] + (index % s) as i64;
            index /= s;
        }
    }

    pub fn coord_of(&self, index: usize) -> Vec<i64> {
        let mut c = vec![0; self.dim()];
        self.coord_into(index, &mut c);
        c
    }

    /// Flat index of `x`, or `None` outside the box.
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut i = 0usize;
        for ((&xk, &lo), &len) in x.iter().zip(&self.lo).zip(&self.shape) {
            let off = xk - lo;
            if off < 0 || off as usize >= len {
                return None;
            }
            i = i * len + off as usize;
        }
        Some(i)
    }

    pub fn get(&self, x: &[i64]) -> f64 {
        self.index_of(x).map_or(0.0, |i| self.values[i])
    }

    pub fn to_sparse(&self) -> SparseFunction {
        let items = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (Coord::new(self.coord_of(i)), *v));
        SparseFunction::from_real(self.dim(), items).expect("box coordinates match box dimension")
    }

    /// The same function on the box `lo + [0, shape)`; values outside are dropped.
    pub fn resized(&self, lo: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        let mut out = Self::zeros(lo, shape)?;
        if out.dim() != self.dim() {
            return Err(Error::Structural("box dimensions differ".into()));
        }
        let mut c = vec![0i64; self.dim()];
        for i in 0..self.values.len() {
            if self.values[i] != 0.0 {
                self.coord_into(i, &mut c);
                if let Some(j) = out.index_of(&c) {
                    out.values[j] = self.values[i];
                }
            }
        }
        Ok(out)
    }

    /// `A f(x) = |K|^{-1} Σ_{y∈K} f(x - y)` for a finite kernel set `K`.
    ///
    /// The output box is grown by the per-axis extent of `K`. Rows along the
    /// last axis are added as contiguous slices.
    pub fn average_with(&self, kernel: &[Coord]) -> Result<Self> {
        if kernel.is_empty() {
            return Err(Error::Domain("averaging kernel is empty".into()));
        }
        let d = self.dim();
        let mut klo = vec![i64::MAX; d];
        let mut khi = vec![i64::MIN; d];
        for y in kernel {
            if y.dim() != d {
                return Err(Error::Structural("kernel point of wrong dimension".into()));
            }
            for (k, &v) in y.entries().iter().enumerate() {
                klo[k] = klo[k].min(v);
                khi[k] = khi[k].max(v);
            }
        }
        let lo: Vec<i64> = (0..d).map(|k| self.lo[k] + klo[k]).collect();
        let shape: Vec<usize> = (0..d)
            .map(|k| self.shape[k] + (khi[k] - klo[k]) as usize)
            .collect();
        let mut out = Self::zeros(lo, shape)?;
        let row = self.shape[d - 1];
        let rows = self.values.len() / row;
        let mut c = vec![0i64; d];
        let mut shifted = vec![0i64; d];
        let w = 1.0 / kernel.len() as f64;
        for r in 0..rows {
            let src = &self.values[r * row..(r + 1) * row];
            if src.iter().all(|v| *v == 0.0) {
                continue;
            }
            self.coord_into(r * row, &mut c);
            for y in kernel {
                for k in 0..d {
                    shifted[k] = c[k] + y.entries()[k];
                }
                let start = out
                    .index_of(&shifted)
                    .expect("shifted row lies in grown box");
                for (o, s) in out.values[start..start + row].iter_mut().zip(src) {
                    *o += s;
                }
            }
        }
        out.values.iter_mut().for_each(|v| *v *= w);
        Ok(out)
    }

    /// Average over the cube `[-n, n]^d`, one separable pass per axis.
    pub fn cube_average(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return Err(Error::Domain(format!("cube radius must be >= 0, got {n}")));
        }
        let width = (2 * n + 1) as usize;
        let mut cur = self.clone();
        for axis in 0..self.dim() {
            cur = cur.moving_sum(axis, width)?;
        }
        let w = (width as f64).powi(self.dim() as i32);
        cur.values.iter_mut().for_each(|v| *v /= w);
        Ok(cur)
    }

    /// Sums of `width` consecutive entries along `axis`, centred, box grown.
    fn moving_sum(&self, axis: usize, width: usize) -> Result<Self> {
        let half = (width / 2) as i64;
        let mut lo = self.lo.clone();
        let mut shape = self.shape.clone();
        lo[axis] -= half;
        shape[axis] += width - 1;
        let mut out = Self::zeros(lo, shape)?;
        let len = self.shape[axis];
        let new_len = out.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut line = vec![0.0; len];
        for o in 0..outer {
            for j in 0..inner {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = self.values[(o * len + i) * inner + j];
                }
                let mut acc = 0.0;
                for i in 0..new_len {
                    if i < len {
                        acc += line[i];
                    }
                    if i >= width {
                        acc -= line[i - width];
                    }
                    out.values[(o * new_len + i) * inner + j] = acc;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LpNorm;

    fn cube_points(dim: usize, n: i64) -> Vec<Coord> {
        let mut pts = vec![vec![]];
        for _ in 0..dim {
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-n..=n).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        pts.into_iter().map(Coord::new).collect()
    }

    #[test]
    fn sparse_round_trip() {
        let f = SparseFunction::from_real(
            2,
            [
                (Coord::new(vec![-2, 1]), 1.5),
                (Coord::new(vec![3, -1]), -2.0),
            ],
        )
        .unwrap();
        let b = BoxFunction::from_sparse(&f).unwrap();
        assert_eq!(b.lo(), &[-2, -1]);
        assert_eq!(b.shape(), &[6, 3]);
        assert_eq!(b.get(&[3, -1]), -2.0);
        assert_eq!(b.get(&[10, 10]), 0.0);
        assert_eq!(b.to_sparse(), f);
    }

    #[test]
    fn average_of_delta_is_normalized_kernel() {
        let delta = BoxFunction::from_sparse(&SparseFunction::delta(2)).unwrap();
        let a = delta.average_with(&cube_points(2, 1)).unwrap();
        assert_eq!(a.shape(), &[3, 3]);
        assert!(a.values().iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-16));
        assert!((a.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separable_cube_average_matches_direct() {
        let f = BoxFunction::from_fn(vec![-2, 0, 1], vec![4, 3, 5], |x| {
            (x[0] * 7 + x[1] * 3 - x[2]) as f64 % 5.0
        })
        .unwrap();
        for n in 0..3 {
            let direct = f.average_with(&cube_points(3, n)).unwrap();
            let fast = f.cube_average(n).unwrap();
            assert_eq!(direct.lo(), fast.lo());
            assert_eq!(direct.shape(), fast.shape());
            for (a, b) in direct.values().iter().zip(fast.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn averaging_preserves_mass_and_contracts_norms() {
        let f = BoxFunction::from_fn(vec![0, 0], vec![5, 4], |x| (x[0] - 2 * x[1]) as f64).unwrap();
        let a = f.cube_average(2).unwrap();
        let s0: f64 = f.values().iter().sum();
        let s1: f64 = a.values().iter().sum();
        assert!((s0 - s1).abs() < 1e-12);
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            assert!(a.lp_norm(p).unwrap() <= f.lp_norm(p).unwrap() + 1e-12);
        }
    }

    #[test]
    fn resized_keeps_overlap() {
        let f = BoxFunction::from_fn(vec![0], vec![4], |x| x[0] as f64 + 1.0).unwrap();
        let g = f.resized(vec![-1], vec![3]).unwrap();
        assert_eq!(g.values(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            BoxFunction::zeros(vec![0; 4], vec![100; 4]),
            Err(Error::Capacity { .. })
        ));
    }
}
