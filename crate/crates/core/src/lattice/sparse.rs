use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point in `Z^d`. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord(Vec<i64>);

impl Coord {
    pub fn new(entries: Vec<i64>) -> Self {
        Coord(entries)
    }

    pub fn origin(dim: usize) -> Self {
        Coord(vec![0; dim])
    }

    /// `±e_k` (zero-based axis).
    pub fn unit(dim: usize, axis: usize, sign: i64) -> Self {
        let mut v = vec![0; dim];
        v[axis] = sign;
        Coord(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Coord {
        Coord(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Coord) -> Coord {
        Coord(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Coord) -> Coord {
        Coord(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64).collect()
    }
}

impl From<Vec<i64>> for Coord {
    fn from(v: Vec<i64>) -> Self {
        Coord(v)
    }
}

/// Finitely supported complex function on `Z^d`; zero values are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFunction {
    dim: usize,
    entries: BTreeMap<Coord, Complex64>,
}

impl SparseFunction {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "lattice dimension must be positive");
        SparseFunction {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn delta(dim: usize) -> Self {
        let mut f = SparseFunction::new(dim);
        f.entries
            .insert(Coord::origin(dim), Complex64::new(1.0, 0.0));
        f
    }

    /// Builds from real values; zeros are dropped.
    pub fn from_real<I>(dim: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Coord, f64)>,
    {
        let mut f = SparseFunction::new(dim);
        for (c, v) in items {
            f.insert(c, Complex64::new(v, 0.0))?;
        }
        Ok(f)
    }

    /// Indicator of a set of points.
    pub fn indicator<'a, I>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Coord>,
    {
        Self::from_real(dim, points.into_iter().map(|c| (c.clone(), 1.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sets `f(c) = v`; storing zero removes the entry.
    pub fn insert(&mut self, c: Coord, v: Complex64) -> Result<()> {
        if c.dim() != self.dim {
            return Err(Error::Structural(format!(
                "coordinate of length {} in dimension {}",
                c.dim(),
                self.dim
            )));
        }
        if v == Complex64::new(0.0, 0.0) {
            self.entries.remove(&c);
        } else {
            self.entries.insert(c, v);
        }
        Ok(())
    }

    pub fn get(&self, c: &Coord) -> Complex64 {
        self.entries.get(c).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Coord, &Complex64)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Coord> {
        self.entries.keys()
    }

    /// `max ‖x‖_∞` over the support, `None` for the zero function.
    pub fn support_radius(&self) -> Option<i64> {
        self.entries.keys().map(Coord::sup_norm).max()
    }

    pub fn sum(&self) -> Complex64 {
        self.entries.values().sum()
    }
}
