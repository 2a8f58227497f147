//! Symmetric convex bodies `G ⊂ R^d` and their dilated lattice sections.
//!
//! Three shapes are supported: the cube `[-1,1]^d`, the `ℓ^q` unit ball and
//! the axis-parallel ellipsoid `{Σ λ_j² x_j² ≤ 1}`. Each has a coordinatewise
//! monotone gauge, which is what makes the corner formula for
//! [`Body::comparison_constant`] valid.

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Coord, SparseFunction};
use crate::par::Execution;

/// Default cap on enumerated lattice points.
pub const DEFAULT_POINT_CAP: usize = 10_000_000;

/// Relative slack on `gauge(x) ≤ t`, so boundary points such as `λ_j e_j`
/// at `t = λ_j` are kept despite rounding.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Shape {
    Cube,
    LqBall(f64),
    Ellipsoid(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Body {
    dim: usize,
    shape: Shape,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Structural("body dimension must be positive".into()));
    }
    Ok(())
}

impl Body {
    pub fn cube(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Body {
            dim,
            shape: Shape::Cube,
        })
    }

    /// Unit ball of `|x|_q`; `q = ∞` is accepted and behaves like the cube.
    pub fn lq_ball(dim: usize, q: f64) -> Result<Self> {
        check_dim(dim)?;
        if q.is_nan() || q < 1.0 {
            return Err(Error::Domain(format!(
                "ball exponent must be >= 1, got {q}"
            )));
        }
        Ok(Body {
            dim,
            shape: Shape::LqBall(q),
        })
    }

    /// Ellipsoid with semi-axis reciprocals `1 ≤ λ_1 < … < λ_d < √2`.
    pub fn ellipsoid(lambdas: Vec<f64>) -> Result<Self> {
        check_dim(lambdas.len())?;
        if lambdas[0] < 1.0 {
            return Err(Error::Domain(format!("λ_1 = {} is below 1", lambdas[0])));
        }
        if lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "ellipsoid λ must be strictly increasing".into(),
            ));
        }
        if lambdas.iter().any(|l| !(*l < std::f64::consts::SQRT_2)) {
            return Err(Error::Domain("ellipsoid λ must stay below √2".into()));
        }
        Ok(Body {
            dim: lambdas.len(),
            shape: Shape::Ellipsoid(lambdas),
        })
    }

    /// The ellipsoid with `λ_j = √(2 − 1/j)`.
    pub fn default_ellipsoid(dim: usize) -> Result<Self> {
        Self::ellipsoid(default_lambdas(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_cube(&self) -> bool {
        matches!(self.shape, Shape::Cube)
            || matches!(self.shape, Shape::LqBall(q) if q.is_infinite())
    }

    /// Short label used in tables.
    pub fn label(&self) -> String {
        match &self.shape {
            Shape::Cube => "cube".into(),
            Shape::LqBall(q) => format!("l{q}-ball"),
            Shape::Ellipsoid(_) => "ellipsoid".into(),
        }
    }

    /// Minkowski gauge `|x|_G`.
    ///
    /// # Panics
    /// If `x.len()` differs from the body dimension.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "gauge argument has wrong dimension");
        match &self.shape {
            Shape::Cube => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            Shape::LqBall(q) if q.is_infinite() => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            Shape::LqBall(q) => crate::lattice::lp_norm_of(x.iter().copied(), *q)
                .expect("exponent validated at construction"),
            Shape::Ellipsoid(l) => l
                .iter()
                .zip(x)
                .map(|(l, v)| (l * v) * (l * v))
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn gauge_of(&self, x: &Coord) -> f64 {
        self.gauge(&x.as_f64())
    }

    /// `c(G) = sup{|s|_G : s ∈ Q_{1/2}}`, attained at a corner.
    pub fn comparison_constant(&self) -> f64 {
        match &self.shape {
            Shape::Cube => 0.5,
            Shape::LqBall(q) if q.is_infinite() => 0.5,
            Shape::LqBall(q) => 0.5 * (self.dim as f64).powf(1.0 / q),
            Shape::Ellipsoid(l) => 0.5 * l.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// `G_t ∩ Z^d` with the default point cap.
    pub fn lattice_points(&self, t: f64) -> Result<LatticeSection> {
        self.lattice_points_capped(t, DEFAULT_POINT_CAP, Execution::default())
    }

    /// `G_t ∩ Z^d` in lexicographic order, failing once more than `cap`
    /// points have been produced.
    pub fn lattice_points_capped(
        &self,
        t: f64,
        cap: usize,
        exec: Execution,
    ) -> Result<LatticeSection> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "scale must be positive and finite, got {t}"
            )));
        }
        let points = match &self.shape {
            Shape::Cube => self.cube_points(t, cap)?,
            Shape::LqBall(q) if q.is_infinite() => self.cube_points(t, cap)?,
            _ => self.pruned_points(t, cap, exec)?,
        };
        Ok(LatticeSection {
            body: self.clone(),
            t,
            points,
        })
    }

    fn cube_points(&self, t: f64, cap: usize) -> Result<Vec<Coord>> {
        let n = t.floor() as i64;
        let count = count_cube(t, self.dim);
        if count > BigUint::from(cap) {
            return Err(Error::Capacity {
                what: "lattice points",
                requested: u128::try_from(&count).unwrap_or(u128::MAX),
                limit: cap as u128,
            });
        }
        let side = (2 * n + 1) as usize;
        let total = side.pow(self.dim as u32);
        Ok((0..total)
            .map(|mut i| {
                let mut c = vec![0i64; self.dim];
                for k in (0..self.dim).rev() {
                    c[k] = (i % side) as i64 - n;
                    i /= side;
                }
                Coord::new(c)
            })
            .collect())
    }

    /// Per-coordinate cost and total budget: `x ∈ G_t` iff `Σ cost_k(x_k) ≤ budget`.
    fn cost(&self, axis: usize, x: i64) -> f64 {
        let a = x.unsigned_abs() as f64;
        match &self.shape {
            Shape::LqBall(q) => a.powf(*q),
            Shape::Ellipsoid(l) => (l[axis] * a) * (l[axis] * a),
            Shape::Cube => unreachable!("cube sections are produced directly"),
        }
    }

    fn budget(&self, t: f64) -> f64 {
        let t = t * (1.0 + BOUNDARY_TOL);
        match &self.shape {
            Shape::LqBall(q) => t.powf(*q),
            Shape::Ellipsoid(_) => t * t,
            Shape::Cube => unreachable!("cube sections are produced directly"),
        }
    }

    fn pruned_points(&self, t: f64, cap: usize, exec: Execution) -> Result<Vec<Coord>> {
        let budget = self.budget(t);
        let first = self.axis_range(0, budget);
        let parts = exec.map(&first, |&x0| {
            let mut out = Vec::new();
            let mut prefix = vec![x0];
            let rest = budget - self.cost(0, x0);
            self.recurse(1, rest, &mut prefix, &mut out, cap)?;
            Ok::<_, Error>(out)
        });
        let mut points = Vec::new();
        for part in parts {
            points.extend(part?);
            if points.len() > cap {
                return Err(self.capacity_error(points.len(), cap));
            }
        }
        Ok(points)
    }

    fn axis_range(&self, axis: usize, budget: f64) -> Vec<i64> {
        let mut r = 0i64;
        while self.cost(axis, r + 1) <= budget {
            r += 1;
        }
        (-r..=r).collect()
    }

    fn recurse(
        &self,
        axis: usize,
        budget: f64,
        prefix: &mut Vec<i64>,
        out: &mut Vec<Coord>,
        cap: usize,
    ) -> Result<()> {
        if axis == self.dim {
            out.push(Coord::new(prefix.clone()));
            if out.len() > cap {
                return Err(self.capacity_error(out.len(), cap));
            }
            return Ok(());
        }
        for x in self.axis_range(axis, budget) {
            prefix.push(x);
            self.recurse(axis + 1, budget - self.cost(axis, x), prefix, out, cap)?;
            prefix.pop();
        }
        Ok(())
    }

    fn capacity_error(&self, at_least: usize, cap: usize) -> Error {
        Error::Capacity {
            what: "lattice points",
            requested: at_least as u128,
            limit: cap as u128,
        }
    }

    /// Uniform probability on `G_t ∩ Z^d`.
    pub fn kernel(&self, t: f64) -> Result<SparseFunction> {
        Ok(self.lattice_points(t)?.kernel())
    }
}

/// `λ_j = √(2 − 1/j)` for `j = 1..=dim`.
pub fn default_lambdas(dim: usize) -> Vec<f64> {
    (1..=dim).map(|j| (2.0 - 1.0 / j as f64).sqrt()).collect()
}

/// `|Q_t ∩ Z^d| = (2⌊t⌋ + 1)^d`.
pub fn count_cube(t: f64, dim: usize) -> BigUint {
    let side = 2 * t.floor().max(0.0) as u64 + 1;
    BigUint::from(side).pow(dim as u32)
}

/// The points of `G_t ∩ Z^d`, sorted lexicographically.
#[derive(Debug, Clone)]
pub struct LatticeSection {
    body: Body,
    t: f64,
    points: Vec<Coord>,
}

impl LatticeSection {
    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn points(&self) -> &[Coord] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, c: &Coord) -> bool {
        self.points.binary_search(c).is_ok()
    }

    pub fn kernel(&self) -> SparseFunction {
        let w = Complex64::new(1.0 / self.points.len() as f64, 0.0);
        let mut k = SparseFunction::new(self.body.dim());
        for p in &self.points {
            k.insert(p.clone(), w)
                .expect("section points match body dimension");
        }
        k
    }
}
