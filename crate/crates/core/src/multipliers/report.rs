use std::collections::BTreeMap;

use serde::Serialize;

use super::{box_symbol, cube_symbol, euclidean_norm, xi_sin_norm};

/// A pointwise inequality `|LHS(ξ)| ≤ C · majorant(ξ)` with its parameters.
///
/// [`Bound::ratio`] is `LHS/majorant`; the checkers take suprema of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum Bound {
    /// `N|ξ| |m_N(ξ)|`.
    CubeDecay { n: u64 },
    /// `|m_N(ξ) − 1| / (N|ξ|)`.
    CubeLipschitz { n: u64 },
    /// `|m_{N1} − m_{N2}| / (|N1 − N2| max(1/N1, 1/N2))`.
    CubeDifference { n1: u64, n2: u64 },
    /// `|ν_t(ξ)| / min(1, 1/(t|ξ|))`.
    BoxDecay { t: f64 },
    /// `|ν_t(ξ) − 1| / ((2t+1)|ξ|)`.
    BoxLipschitz { t: f64 },
    /// `|⟨ξ, ∇ν_0(ξ)⟩|` by central differences along `ξ`.
    BoxGradient { step: f64 },
    /// `|ν_{N1} − ν_{N2}| / (|N1 − N2| max(1/N1, 1/N2))`.
    BoxDifference { n1: u64, n2: u64 },
    /// `|m_N − ν_N| / (min(1, 1/(N|ξ|)) |ξ|)`.
    CubeVersusBox { n: u64 },
    /// `E_{n,j}(ξ) / (a^{−|j|/2} min((a_n|ξ|)^{1/2}, (a_n|ξ|)^{−1/2}))` with `a_n = a^n`.
    Enj { a: f64, n: i32, j: i32 },
    /// `(a_1 + … + a_d) Π_j (1 − a_j/10)` with `a` stored in the frequency slot.
    Product,
    /// `2^{(1−ε)l} Σ_k |m_{2^n+2^{n−l}(k+1)} − m_{2^n+2^{n−l}k}|^{2−ε}`.
    Annulus { n: u32, l: u32, epsilon: f64 },
}

fn pair_scale(n1: u64, n2: u64) -> f64 {
    (n1 as f64 - n2 as f64).abs() * (1.0 / n1 as f64).max(1.0 / n2 as f64)
}

impl Bound {
    pub fn name(&self) -> &'static str {
        match self {
            Bound::CubeDecay { .. } => "cube_decay",
            Bound::CubeLipschitz { .. } => "cube_lipschitz",
            Bound::CubeDifference { .. } => "cube_difference",
            Bound::BoxDecay { .. } => "box_decay",
            Bound::BoxLipschitz { .. } => "box_lipschitz",
            Bound::BoxGradient { .. } => "box_gradient",
            Bound::BoxDifference { .. } => "box_difference",
            Bound::CubeVersusBox { .. } => "cube_versus_box",
            Bound::Enj { .. } => "enj",
            Bound::Annulus { .. } => "annulus_sum",
            Bound::Product => "product_functional",
        }
    }

    /// Ratio of the left side to the majorant at `ξ`; `0` where the majorant vanishes
    /// together with the left side.
    pub fn ratio(&self, xi: &[f64]) -> f64 {
        let r = euclidean_norm(xi);
        match *self {
            Bound::CubeDecay { n } => n as f64 * r * cube_symbol(n, xi).abs(),
            Bound::CubeLipschitz { n } => {
                if r == 0.0 {
                    return 0.0;
                }
                (cube_symbol(n, xi) - 1.0).abs() / (n as f64 * r)
            }
            Bound::CubeDifference { n1, n2 } => {
                if n1 == n2 {
                    return 0.0;
                }
                (cube_symbol(n1, xi) - cube_symbol(n2, xi)).abs() / pair_scale(n1, n2)
            }
            Bound::BoxDecay { t } => {
                let m = if t * r <= 1.0 { 1.0 } else { 1.0 / (t * r) };
                box_symbol(t, xi).abs() / m
            }
            Bound::BoxLipschitz { t } => {
                if r == 0.0 {
                    return 0.0;
                }
                (box_symbol(t, xi) - 1.0).abs() / ((2.0 * t + 1.0) * r)
            }
            Bound::BoxGradient { step } => {
                if r == 0.0 {
                    return 0.0;
                }
                let shift =
                    |s: f64| -> Vec<f64> { xi.iter().map(|x| x * (1.0 + s * step / r)).collect() };
                let dv = box_symbol(0.0, &shift(1.0)) - box_symbol(0.0, &shift(-1.0));
                (dv / (2.0 * step) * r).abs()
            }
            Bound::BoxDifference { n1, n2 } => {
                if n1 == n2 {
                    return 0.0;
                }
                (box_symbol(n1 as f64, xi) - box_symbol(n2 as f64, xi)).abs() / pair_scale(n1, n2)
            }
            Bound::CubeVersusBox { n } => {
                if r == 0.0 {
                    return 0.0;
                }
                let nr = n as f64 * r;
                let m = if nr <= 1.0 { 1.0 } else { 1.0 / nr };
                (cube_symbol(n, xi) - box_symbol(n as f64, xi)).abs() / (m * r)
            }
            Bound::Enj { a, n, j } => {
                if r == 0.0 {
                    return 0.0;
                }
                let s = xi_sin_norm(xi);
                let an = a.powi(n);
                let u = an * r;
                let e = u.min(1.0 / u)
                    * ((-a.powi(n + j) * s).exp() - (-a.powi(n + j - 1) * s).exp()).abs();
                e / (a.powf(-(j.abs() as f64) / 2.0) * u.sqrt().min(1.0 / u.sqrt()))
            }
            Bound::Product => super::product_functional(xi),
            Bound::Annulus { n, l, epsilon } => {
                let base = 1u64 << n;
                let step = 1u64 << (n - l);
                let sum: f64 = (0..(1u64 << l))
                    .map(|k| {
                        let hi = cube_symbol(base + step * (k + 1), xi);
                        let lo = cube_symbol(base + step * k, xi);
                        (hi - lo).abs().powf(2.0 - epsilon)
                    })
                    .sum();
                sum * 2f64.powf((1.0 - epsilon) * l as f64)
            }
        }
    }
}

/// Where a supremum was attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPoint {
    pub d: usize,
    pub bound: Bound,
    pub xi: Vec<f64>,
}

/// Empirical constant of one inequality in one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub d: usize,
    pub params: BTreeMap<String, f64>,
    pub samples: usize,
    pub observed_constant: f64,
    pub worst_point: Option<WorstPoint>,
    pub seed: u64,
}

impl BoundReport {
    pub fn new(bound_name: &str, d: usize, seed: u64) -> Self {
        BoundReport {
            bound_name: bound_name.to_string(),
            d,
            params: BTreeMap::new(),
            samples: 0,
            observed_constant: 0.0,
            worst_point: None,
            seed,
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Records one evaluated ratio; strict `>` keeps the earliest maximizer.
    pub fn observe(&mut self, value: f64, bound: Bound, xi: &[f64]) {
        if value > self.observed_constant {
            self.observed_constant = value;
            self.worst_point = Some(WorstPoint {
                d: self.d,
                bound,
                xi: xi.to_vec(),
            });
        }
    }

    /// Folds another partial report for the same bound into this one.
    pub fn merge(&mut self, other: BoundReport) {
        self.samples += other.samples;
        if other.observed_constant > self.observed_constant {
            self.observed_constant = other.observed_constant;
            self.worst_point = other.worst_point;
        }
    }

    /// Recomputes the ratio at the stored worst point.
    pub fn reevaluate(&self) -> f64 {
        self.worst_point
            .as_ref()
            .map_or(0.0, |w| w.bound.ratio(&w.xi))
    }
}
