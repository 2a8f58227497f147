//! Lower bounds for the maximal function over the slowly growing ellipsoids.
//!
//! Coordinates are split into blocks `I_s` of size `2^s`, `s = 0..=r`, so
//! `d = 2^{r+1} - 1`. `A_s` is the set of points of `[-M, M]^{I_s}` with odd
//! coordinate sum and `A'_s` the set with even sum. The test function is the
//! indicator of `A_0 × … × A_r`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::bodies::{default_lambdas, Body};
use crate::error::{Error, Result};
use crate::lattice::{BoxFunction, LpNorm, SparseFunction};
use crate::operators::{maximal, ScaleSet};

/// Largest block exponent accepted by the exact path.
pub const MAX_BLOCK_EXPONENT: u32 = 16;

/// Parameters of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleSpec {
    r: u32,
    m: u32,
    p: f64,
}

impl CounterexampleSpec {
    pub fn new(r: u32, m: u32, p: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("block exponent r must be >= 1".into()));
        }
        if r > MAX_BLOCK_EXPONENT {
            return Err(Error::Capacity {
                what: "block exponent",
                requested: r as u128,
                limit: MAX_BLOCK_EXPONENT as u128,
            });
        }
        if m == 0 {
            return Err(Error::Domain("box radius M must be >= 1".into()));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p must lie in (1, inf), got {p}")));
        }
        Ok(Self { r, m, p })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `d = 2^{r+1} - 1`.
    pub fn dim(&self) -> usize {
        (1usize << (self.r + 1)) - 1
    }

    /// Zero-based coordinate range of block `s`.
    pub fn block(&self, s: u32) -> std::ops::Range<usize> {
        ((1usize << s) - 1)..((1usize << (s + 1)) - 1)
    }

    /// Membership in `supp f = A_0 × … × A_r`.
    pub fn in_support(&self, x: &[i64]) -> bool {
        let m = self.m as i64;
        x.len() == self.dim()
            && x.iter().all(|v| v.abs() <= m)
            && (0..=self.r).all(|s| x[self.block(s)].iter().sum::<i64>().rem_euclid(2) == 1)
    }

    /// The test function as a sparse indicator.
    pub fn test_function(&self) -> Result<SparseFunction> {
        let d = self.dim();
        let side = 2 * self.m as u64 + 1;
        let total = (side as u128).pow(d as u32);
        let limit = 1u128 << 26;
        if total > limit {
            return Err(Error::Capacity {
                what: "counterexample box",
                requested: total,
                limit,
            });
        }
        let boxed = BoxFunction::from_fn(vec![-(self.m as i64); d], vec![side as usize; d], |x| {
            if self.in_support(x) {
                1.0
            } else {
                0.0
            }
        })?;
        Ok(boxed.to_sparse())
    }
}

/// `|A_s|` (odd sums) and `|A'_s|` (even sums).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityCounts {
    #[serde(serialize_with = "as_decimal")]
    pub odd: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub even: BigUint,
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// Closed form: with `N = (2M+1)^{2^s}` and `σ = (-1)^{M·2^s}`, the odd count
/// is `(N - σ)/2` and the even count `(N + σ)/2`.
pub fn parity_counts(m: u32, s: u32) -> ParityCounts {
    let n = BigUint::from(2 * m as u64 + 1).pow(1u32 << s);
    // σ = +1 unless both M is odd and s = 0.
    let sigma_positive = m.is_multiple_of(2) || s > 0;
    let half = &n >> 1usize;
    let (odd, even) = if sigma_positive {
        (half.clone(), half + 1u32)
    } else {
        (half.clone() + 1u32, half)
    };
    ParityCounts { odd, even }
}

/// Counts by enumerating `[-M, M]^{2^s}`; small cases only.
pub fn enumerate_parity_counts(m: u32, s: u32) -> Result<(u64, u64)> {
    let k = 1usize << s;
    let side = 2 * m as u64 + 1;
    let total = (side as u128).pow(k as u32);
    if total > 1 << 24 {
        return Err(Error::Capacity {
            what: "parity enumeration",
            requested: total,
            limit: 1 << 24,
        });
    }
    let (mut odd, mut even) = (0u64, 0u64);
    for mut idx in 0..total as u64 {
        let mut sum = 0i64;
        for _ in 0..k {
            sum += (idx % side) as i64 - m as i64;
            idx /= side;
        }
        if sum.rem_euclid(2) == 1 {
            odd += 1;
        } else {
            even += 1;
        }
    }
    Ok((odd, even))
}

/// Exact counts and the resulting lower bounds for `‖M_* f‖_p / ‖f‖_p`.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleBound {
    pub spec: CounterexampleSpec,
    pub dim: usize,
    /// Counts for `s = 0..=r`.
    pub counts: Vec<ParityCounts>,
    /// `‖f‖_p^p = Π_s |A_s|`.
    #[serde(serialize_with = "as_decimal")]
    pub norm_p_pow: BigUint,
    /// `Σ_{s<r} |A'_s| / |A_s|`, exact.
    #[serde(serialize_with = "ratio_as_string")]
    pub block_sum: BigRational,
    /// `((1/3)^p + (1/5)^p Σ_{s<r} |A'_s|/|A_s|)^{1/p}`.
    pub ratio_lower: f64,
    /// `(1/5)(Σ_{s<r} |A'_s|/|A_s|)^{1/p}`, the blocks alone.
    pub blocks_only: f64,
    /// `(1/5) r^{1/p}`.
    pub target: f64,
    /// `3^{-1/p} 5^{-1} r^{1/p}`.
    pub chain_constant: f64,
}

fn ratio_as_string<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CounterexampleBound {
    pub fn passes(&self) -> bool {
        self.ratio_lower >= self.target && self.target >= self.chain_constant
    }
}

/// Exact lower bound from disjoint supports.
///
/// On `B_s = A_0 × … × A'_s × … × A_r` (`s < r`) the average over `Ω_{2^{s+1}}`
/// is at least `1/5`; on `supp f` the average over `Ω_1` is at least `1/3`.
/// These `r + 1` sets are pairwise disjoint and `|B_s| = ‖f‖_p^p |A'_s|/|A_s|`.
pub fn counterexample_exact_ratio(spec: &CounterexampleSpec) -> CounterexampleBound {
    let counts: Vec<ParityCounts> = (0..=spec.r).map(|s| parity_counts(spec.m, s)).collect();
    let norm_p_pow = counts.iter().fold(BigUint::one(), |acc, c| acc * &c.odd);
    let block_sum = counts[..spec.r as usize]
        .iter()
        .fold(BigRational::zero(), |acc, c| {
            acc + BigRational::new(c.even.clone().into(), c.odd.clone().into())
        });
    let sum = block_sum.to_f64().expect("block sum is finite");
    let p = spec.p;
    let ratio_lower = ((1.0f64 / 3.0).powf(p) + (0.2f64).powf(p) * sum).powf(1.0 / p);
    let r = spec.r as f64;
    CounterexampleBound {
        spec: *spec,
        dim: spec.dim(),
        counts,
        norm_p_pow,
        block_sum,
        ratio_lower,
        blocks_only: 0.2 * sum.powf(1.0 / p),
        target: 0.2 * r.powf(1.0 / p),
        chain_constant: 3f64.powf(-1.0 / p) * 0.2 * r.powf(1.0 / p),
    }
}

/// Direct evaluation of `‖max_j |K_{Ω_j} * f|‖_p / ‖f‖_p` on a grid of side 8.
#[derive(Debug, Clone, Serialize)]
pub struct DirectRatio {
    pub dim: usize,
    pub ratio: f64,
    /// Largest deviation between the spectral and the exact sparse maximal function.
    pub cross_check: f64,
    /// `Σ |f|^p` counted on the grid.
    pub norm_p_pow: f64,
}

pub const DIRECT_SIDE: usize = 8;

pub fn counterexample_direct(spec: &CounterexampleSpec) -> Result<DirectRatio> {
    if spec.r > 2 || spec.m != 1 {
        return Err(Error::Capacity {
            what: "direct counterexample grid (needs r <= 2, M = 1)",
            requested: spec.dim() as u128,
            limit: 7,
        });
    }
    let d = spec.dim();
    let body = Body::default_ellipsoid(d)?;
    let lambdas = default_lambdas(d);
    let f = spec.test_function()?;
    let grid = crate::lattice::embed(&f, DIRECT_SIDE, 1)?;
    let scales = ScaleSet::new(lambdas.clone())?;
    let spectral = maximal(&grid, &body, &scales)?;

    // Exact box values where the box reaches, zero elsewhere on the grid.
    let exact = sparse_maximal(&f, &body, &lambdas)?;
    let mut cross_check: f64 = 0.0;
    for (i, v) in spectral.values().iter().enumerate() {
        let c = spectral.coord_of(i);
        let expected = exact.index_of(&c).map_or(0.0, |j| exact.values()[j]);
        cross_check = cross_check.max((v.re - expected).abs() + v.im.abs());
    }

    let p = spec.p;
    let num = spectral.lp_norm(p)?;
    let den = f.lp_norm(p)?;
    Ok(DirectRatio {
        dim: d,
        ratio: num / den,
        cross_check,
        norm_p_pow: den.powf(p),
    })
}

/// `max_j K_{Ω_j} * f` by exact finite sums on a box.
fn sparse_maximal(f: &SparseFunction, body: &Body, lambdas: &[f64]) -> Result<BoxFunction> {
    let base = BoxFunction::from_sparse(f)?;
    let mut best: Option<BoxFunction> = None;
    for &t in lambdas {
        let section = body.lattice_points(t)?;
        let avg = base.average_with(section.points())?;
        best = Some(match best {
            None => avg,
            Some(b) => {
                let b = b.resized(avg.lo().to_vec(), avg.shape().to_vec())?;
                let mut out = avg;
                for (o, v) in out.values_mut().iter_mut().zip(b.values()) {
                    *o = o.abs().max(v.abs());
                }
                out
            }
        });
    }
    Ok(best.expect("at least one scale"))
}
