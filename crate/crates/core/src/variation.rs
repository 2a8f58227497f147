//! `r`-variation seminorms of scalar paths.
//!
//! `V_r(a_t : t ∈ Z) = sup (Σ_j |a_{t_{j+1}} − a_{t_j}|^r)^{1/r}` over finite
//! increasing `t_0 < … < t_J` in `Z`. For a path with `n` samples the
//! supremum is a longest-path problem on the DAG of index pairs, solved
//! exactly in `O(n²)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Longest path accepted by [`v_r_bruteforce`].
pub const BRUTE_FORCE_MAX_LEN: usize = 18;

/// Values `a_t` sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPath {
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl ScalarPath {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Structural(format!(
                "path needs matching nonempty times and values, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Structural(
                "path times must be strictly increasing".into(),
            ));
        }
        Ok(ScalarPath { times, values })
    }

    /// Real values at times `0, 1, …, n − 1`.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(
            (0..values.len()).map(|i| i as f64).collect(),
            values.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        )
    }

    /// Real values at integer times `start, start + 1, …`.
    pub fn integer_times(start: i64, values: &[f64]) -> Result<Self> {
        Self::new(
            (0..values.len())
                .map(|i| (start + i as i64) as f64)
                .collect(),
            values.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        )
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The samples whose times satisfy `keep`; `None` if none do.
    pub fn restrict<F: Fn(f64) -> bool>(&self, keep: F) -> Option<ScalarPath> {
        let (times, values): (Vec<f64>, Vec<Complex64>) = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| keep(**t))
            .map(|(t, v)| (*t, *v))
            .unzip();
        if times.is_empty() {
            None
        } else {
            Some(ScalarPath { times, values })
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationResult {
    pub r: f64,
    pub value: f64,
    /// Indices of the maximizing increasing subsequence.
    pub argmax_subsequence: Vec<usize>,
}

impl VariationResult {
    /// `Σ |Δa|^r` along the stored subsequence (the max step for `r = ∞`).
    pub fn resum(&self, path: &ScalarPath) -> f64 {
        let v = path.values();
        let steps = self
            .argmax_subsequence
            .windows(2)
            .map(|w| (v[w[1]] - v[w[0]]).norm());
        if self.r.is_infinite() {
            steps.fold(0.0, f64::max)
        } else {
            steps.map(|s| s.powf(self.r)).sum()
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::Domain(format!(
            "variation exponent must be >= 1, got {r}"
        )));
    }
    Ok(())
}

/// Exact `V_r` with its maximizing subsequence.
///
/// `best[j] = max(0, max_{i<j} best[i] + |a_j − a_i|^r)`; the earliest
/// maximizing predecessor is kept so the subsequence is deterministic.
pub fn v_r(path: &ScalarPath, r: f64) -> Result<VariationResult> {
    check_r(r)?;
    let a = path.values();
    let n = a.len();
    if r.is_infinite() {
        let mut best = (0.0, vec![0]);
        for j in 0..n {
            for i in 0..j {
                let d = (a[j] - a[i]).norm();
                if d > best.0 {
                    best = (d, vec![i, j]);
                }
            }
        }
        return Ok(VariationResult {
            r,
            value: best.0,
            argmax_subsequence: best.1,
        });
    }
    let mut best = vec![0.0f64; n];
    let mut prev = vec![usize::MAX; n];
    for j in 1..n {
        for i in 0..j {
            let cand = best[i] + (a[j] - a[i]).norm().powf(r);
            if cand > best[j] {
                best[j] = cand;
                prev[j] = i;
            }
        }
    }
    let mut end = 0;
    for j in 1..n {
        if best[j] > best[end] {
            end = j;
        }
    }
    let mut seq = vec![end];
    while prev[*seq.last().expect("nonempty")] != usize::MAX {
        seq.push(prev[*seq.last().expect("nonempty")]);
    }
    seq.reverse();
    Ok(VariationResult {
        r,
        value: best[end].powf(1.0 / r),
        argmax_subsequence: seq,
    })
}

/// Exhaustive maximum over all increasing subsequences.
pub fn v_r_bruteforce(path: &ScalarPath, r: f64) -> Result<f64> {
    check_r(r)?;
    let n = path.len();
    if n > BRUTE_FORCE_MAX_LEN {
        return Err(Error::Capacity {
            what: "brute-force path length",
            requested: n as u128,
            limit: BRUTE_FORCE_MAX_LEN as u128,
        });
    }
    let a = path.values();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << n) {
        let mut last: Option<usize> = None;
        let mut acc = 0.0f64;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                if let Some(l) = last {
                    let d = (a[i] - a[l]).norm();
                    acc = if r.is_infinite() {
                        acc.max(d)
                    } else {
                        acc + d.powf(r)
                    };
                }
                last = Some(i);
            }
        }
        best = best.max(acc);
    }
    Ok(if r.is_infinite() {
        best
    } else {
        best.powf(1.0 / r)
    })
}

/// Constant in `V_r ≤ C (long + short)` when every occupied dyadic block
/// `[2^n, 2^{n+1})` has its left endpoint among the path's times.
pub const LONG_SHORT_CONSTANT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongShort {
    pub full: f64,
    pub long: f64,
    pub short: f64,
    /// `full / (long + short)`, zero when all three vanish.
    pub ratio: f64,
    /// `full ≤ LONG_SHORT_CONSTANT · (long + short)`.
    pub bound_ok: bool,
}

fn dyadic_block(t: f64) -> i32 {
    t.log2().floor() as i32
}

fn is_dyadic(t: f64) -> bool {
    t > 0.0 && t == 2f64.powi(dyadic_block(t))
}

/// Splits `V_r` into the long part over times `2^n` and the short part
/// `(Σ_n V_r(a restricted to [2^n, 2^{n+1}))^r)^{1/r}`. Times must be positive.
pub fn long_short_split(path: &ScalarPath, r: f64) -> Result<LongShort> {
    check_r(r)?;
    if r.is_infinite() {
        return Err(Error::Domain("the long/short split needs finite r".into()));
    }
    if path.times()[0] <= 0.0 {
        return Err(Error::Domain(
            "dyadic splitting needs positive times".into(),
        ));
    }
    let full = v_r(path, r)?.value;
    let long = path
        .restrict(is_dyadic)
        .map(|p| v_r(&p, r).map(|v| v.value))
        .transpose()?
        .unwrap_or(0.0);
    let first = dyadic_block(path.times()[0]);
    let last = dyadic_block(*path.times().last().expect("nonempty"));
    let mut sum = 0.0;
    for n in first..=last {
        if let Some(p) = path.restrict(|t| dyadic_block(t) == n) {
            sum += v_r(&p, r)?.value.powf(r);
        }
    }
    let short = sum.powf(1.0 / r);
    let denom = long + short;
    let ratio = if denom == 0.0 { 0.0 } else { full / denom };
    Ok(LongShort {
        full,
        long,
        short,
        ratio,
        bound_ok: full <= LONG_SHORT_CONSTANT * denom * (1.0 + 1e-12),
    })
}

/// Validates that `path` samples exactly the integers of `[2^n, 2^{n+1}]`; returns `n`.
fn block_exponent(path: &ScalarPath) -> Result<u32> {
    let t0 = path.times()[0];
    let len = path.len();
    if len < 2 || !is_dyadic(t0) || t0 < 1.0 {
        return Err(Error::Structural(
            "block must start at 2^n with n >= 0".into(),
        ));
    }
    let n = dyadic_block(t0) as u32;
    let expected = (1usize << n) + 1;
    let integral = path
        .times()
        .iter()
        .enumerate()
        .all(|(i, t)| *t == t0 + i as f64);
    if len != expected || !integral {
        return Err(Error::Structural(format!(
            "block starting at {t0} must list the {expected} integers of [2^{n}, 2^{}]",
            n + 1
        )));
    }
    Ok(n)
}

/// `2^{1−1/r} Σ_{l=0}^{n} (Σ_{k<2^l} |a(2^n + 2^{n−l}(k+1)) − a(2^n + 2^{n−l}k)|^r)^{1/r}`
/// for a path on the integers of `[2^n, 2^{n+1}]`.
pub fn rademacher_menshov_rhs(path: &ScalarPath, r: f64) -> Result<f64> {
    check_r(r)?;
    let n = block_exponent(path)?;
    let a = path.values();
    let mut total = 0.0;
    for l in 0..=n {
        let step = 1usize << (n - l);
        let diffs = (0..(1usize << l)).map(|k| (a[step * (k + 1)] - a[step * k]).norm());
        total += if r.is_infinite() {
            diffs.fold(0.0, f64::max)
        } else {
            diffs.map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r)
        };
    }
    let pre = if r.is_infinite() {
        2.0
    } else {
        2f64.powf(1.0 - 1.0 / r)
    };
    Ok(pre * total)
}

/// `V_r` over the half-open block `[2^n, 2^{n+1})` of a path accepted by
/// [`rademacher_menshov_rhs`].
pub fn block_variation(path: &ScalarPath, r: f64) -> Result<f64> {
    let n = block_exponent(path)?;
    let end = 2f64.powi(n as i32 + 1);
    let inner = path
        .restrict(|t| t < end)
        .expect("block has interior points");
    Ok(v_r(&inner, r)?.value)
}
