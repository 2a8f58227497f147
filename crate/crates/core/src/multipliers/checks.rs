use super::report::{Bound, BoundReport};
use super::sample::FrequencySampler;
use rand::Rng;

use super::{box_symbol, cube_symbol_ladder};
use crate::error::{Error, Result};
use crate::par::{derive_seed, Execution};

/// Samples per independent task; fixes the partition so results do not
/// depend on the thread count.
const CHUNK: usize = 1000;

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    /// Frequency draws per (dimension, scale).
    pub samples: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl CheckConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        CheckConfig {
            samples,
            seed,
            exec: Execution::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        Ok(())
    }
}

/// `|a − b| / max(a, b)`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// Least-squares slope of `ln y` against `x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `F(a) = (Σ a_k) Π_j (1 − a_j/10)`.
pub fn product_functional(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() * a.iter().map(|x| 1.0 - x / 10.0).product::<f64>()
}

/// Runs `body` over `samples` draws for every scale, split into fixed chunks
/// with derived seeds, and merges the partial reports of each name in order.
fn sweep<F>(
    names: &[&str],
    d: usize,
    scales: &[u64],
    cfg: &CheckConfig,
    tag: u64,
    body: F,
) -> Vec<BoundReport>
where
    F: Fn(&mut FrequencySampler, u64, &mut [BoundReport], &mut [f64]) + Sync + Send,
{
    let chunks = cfg.samples.div_ceil(CHUNK);
    let tasks: Vec<(usize, usize)> = (0..scales.len())
        .flat_map(|s| (0..chunks).map(move |c| (s, c)))
        .collect();
    let parts = cfg.exec.map(&tasks, |&(s, c)| {
        let n = scales[s];
        let seed = derive_seed(cfg.seed, &[tag, d as u64, n, c as u64]);
        let mut sampler = FrequencySampler::new(d, seed);
        let mut reports: Vec<BoundReport> = names
            .iter()
            .map(|name| BoundReport::new(name, d, cfg.seed))
            .collect();
        let mut xi = vec![0.0; d];
        let count = CHUNK.min(cfg.samples - c * CHUNK);
        for _ in 0..count {
            body(&mut sampler, n, &mut reports, &mut xi);
        }
        for r in reports.iter_mut() {
            r.samples = count;
        }
        reports
    });
    let mut out: Vec<BoundReport> = names
        .iter()
        .map(|name| BoundReport::new(name, d, cfg.seed))
        .collect();
    for part in parts {
        for (acc, p) in out.iter_mut().zip(part) {
            acc.merge(p);
        }
    }
    out
}

fn scale_params(r: BoundReport, scales: &[u64]) -> BoundReport {
    r.with_param("n_min", *scales.iter().min().unwrap_or(&0) as f64)
        .with_param("n_max", *scales.iter().max().unwrap_or(&0) as f64)
}

fn check_scales(dims: &[usize], ns: &[u64]) -> Result<()> {
    if dims.contains(&0) || ns.contains(&0) || dims.is_empty() || ns.is_empty() {
        return Err(Error::Domain(
            "dimensions and scales must be nonempty and positive".into(),
        ));
    }
    Ok(())
}

/// Sup of `N|ξ||m_N(ξ)|`, one report per dimension.
pub fn check_decay_bound(
    dims: &[usize],
    ns: &[u64],
    cfg: &CheckConfig,
) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    check_scales(dims, ns)?;
    Ok(dims
        .iter()
        .flat_map(|&d| {
            sweep(&["cube_decay"], d, ns, cfg, 1, |s, n, reps, xi| {
                s.mixture(n as f64, xi);
                let b = Bound::CubeDecay { n };
                reps[0].observe(b.ratio(xi), b, xi);
            })
        })
        .map(|r| scale_params(r, ns))
        .collect())
}

/// Sups of `|m_N − 1|/(N|ξ|)` and of the pairwise difference ratio; two
/// reports per dimension, in that order.
pub fn check_lipschitz_bounds(
    dims: &[usize],
    ns: &[u64],
    cfg: &CheckConfig,
) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    check_scales(dims, ns)?;
    let n_max = *ns.iter().max().expect("nonempty");
    Ok(dims
        .iter()
        .flat_map(|&d| {
            sweep(
                &["cube_lipschitz", "cube_difference"],
                d,
                ns,
                cfg,
                2,
                |s, n1, reps, xi| {
                    s.mixture(n1 as f64, xi);
                    let lip = Bound::CubeLipschitz { n: n1 };
                    reps[0].observe(lip.ratio(xi), lip, xi);
                    let m = cube_symbol_ladder(n_max, xi);
                    let a = m[n1 as usize - 1];
                    for &n2 in ns {
                        if n2 == n1 {
                            continue;
                        }
                        let scale = (n1 as f64 - n2 as f64).abs() / (n1.min(n2) as f64);
                        let v = (a - m[n2 as usize - 1]).abs() / scale;
                        reps[1].observe(v, Bound::CubeDifference { n1, n2 }, xi);
                    }
                },
            )
        })
        .map(|r| scale_params(r, ns))
        .collect())
}

/// The continuous-box bounds: decay, Lipschitz, radial derivative and
/// pairwise difference; four reports per dimension.
pub fn check_box_bounds(dims: &[usize], ns: &[u64], cfg: &CheckConfig) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    check_scales(dims, ns)?;
    let names = [
        "box_decay",
        "box_lipschitz",
        "box_gradient",
        "box_difference",
    ];
    Ok(dims
        .iter()
        .flat_map(|&d| {
            sweep(&names, d, ns, cfg, 3, |s, n1, reps, xi| {
                s.mixture(n1 as f64, xi);
                let t = n1 as f64;
                let singles = [
                    Bound::BoxDecay { t },
                    Bound::BoxLipschitz { t },
                    Bound::BoxGradient { step: 1e-5 },
                ];
                for (rep, b) in reps.iter_mut().zip(singles) {
                    rep.observe(b.ratio(xi), b, xi);
                }
                let a = box_symbol(t, xi);
                for &n2 in ns {
                    if n2 == n1 {
                        continue;
                    }
                    let scale = (n1 as f64 - n2 as f64).abs() / (n1.min(n2) as f64);
                    let v = (a - box_symbol(n2 as f64, xi)).abs() / scale;
                    reps[3].observe(v, Bound::BoxDifference { n1, n2 }, xi);
                }
            })
        })
        .map(|r| scale_params(r, ns))
        .collect())
}

/// Sup of `|m_N − ν_N| / (min(1, 1/(N|ξ|))|ξ|)`.
pub fn check_chain_bound(
    dims: &[usize],
    ns: &[u64],
    cfg: &CheckConfig,
) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    check_scales(dims, ns)?;
    Ok(dims
        .iter()
        .flat_map(|&d| {
            sweep(&["cube_versus_box"], d, ns, cfg, 4, |s, n, reps, xi| {
                s.mixture(n as f64, xi);
                let b = Bound::CubeVersusBox { n };
                reps[0].observe(b.ratio(xi), b, xi);
            })
        })
        .map(|r| scale_params(r, ns))
        .collect())
}

/// Sup of `F(a)` over `a` uniform in `[0, 2]^d` with `d` uniform in `1..=d_max`.
///
/// The report's `d` is the dimension of the maximizing draw.
pub fn check_product_bound(samples: usize, d_max: usize, seed: u64) -> Result<BoundReport> {
    if samples == 0 || d_max == 0 {
        return Err(Error::Domain(
            "need at least one draw in dimension >= 1".into(),
        ));
    }
    let mut sampler = FrequencySampler::new(1, derive_seed(seed, &[5]));
    let mut report =
        BoundReport::new("product_functional", d_max, seed).with_param("d_max", d_max as f64);
    let mut a = Vec::with_capacity(d_max);
    for _ in 0..samples {
        let rng = sampler.rng();
        let d = rng.gen_range(1..=d_max);
        a.clear();
        a.extend((0..d).map(|_| rng.gen_range(0.0..=2.0)));
        report.observe(product_functional(&a), Bound::Product, &a);
    }
    report.samples = samples;
    if let Some(w) = report.worst_point.as_mut() {
        w.d = w.xi.len();
        report.d = w.d;
    }
    Ok(report)
}

/// Sup over `n ∈ ns` and log-uniform `|ξ|` of the `E_{n,j}` ratio, one report per `j`.
pub fn check_enj_bound(
    d: usize,
    js: &[i32],
    ns: &[i32],
    a: f64,
    cfg: &CheckConfig,
) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    if !(a > 1.0) {
        return Err(Error::Domain(format!("lacunarity must exceed 1, got {a}")));
    }
    if d == 0 || js.is_empty() || ns.is_empty() {
        return Err(Error::Domain(
            "need a dimension and nonempty index ranges".into(),
        ));
    }
    let reach = ns.iter().map(|n| n.abs()).max().unwrap_or(0)
        + js.iter().map(|j| j.abs()).max().unwrap_or(0);
    let lo = a.powi(-(reach + 4));
    let names: Vec<String> = js.iter().map(|j| format!("enj[j={j}]")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let reports = sweep(&name_refs, d, &[1], cfg, 6, |s, _, reps, xi| {
        s.log_radial(lo, 0.5, xi);
        for (k, &j) in js.iter().enumerate() {
            for &n in ns {
                let b = Bound::Enj { a, n, j };
                reps[k].observe(b.ratio(xi), b, xi);
            }
        }
    });
    Ok(reports
        .into_iter()
        .zip(js)
        .map(|(r, &j)| r.with_param("j", j as f64).with_param("a", a))
        .collect())
}

/// Sup of the normalized annulus sum, one report per `l`.
pub fn check_annulus_sum(
    d: usize,
    ls: &[u32],
    n: u32,
    epsilon: f64,
    cfg: &CheckConfig,
) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain(format!(
            "ε must lie in [0, 1), got {epsilon}"
        )));
    }
    if n > 12 || ls.iter().any(|&l| l > n) || d == 0 {
        return Err(Error::Domain("need l ≤ n ≤ 12 and d ≥ 1".into()));
    }
    let base = 1u64 << n;
    let names: Vec<String> = ls.iter().map(|l| format!("annulus_sum[l={l}]")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let scale = 2f64.powi(-(n as i32));
    let reports = sweep(&name_refs, d, &[base], cfg, 7, |s, _, reps, xi| {
        if s.rng().gen_bool(0.5) {
            s.log_radial(scale / 8.0, 8.0 * scale, xi);
        } else {
            s.mixture(base as f64, xi);
        }
        let m = cube_symbol_ladder(2 * base, xi);
        let at = |t: u64| m[t as usize - 1];
        for (k, &l) in ls.iter().enumerate() {
            let step = 1u64 << (n - l);
            let sum: f64 = (0..(1u64 << l))
                .map(|i| {
                    (at(base + step * (i + 1)) - at(base + step * i))
                        .abs()
                        .powf(2.0 - epsilon)
                })
                .sum();
            let v = sum * 2f64.powf((1.0 - epsilon) * l as f64);
            reps[k].observe(v, Bound::Annulus { n, l, epsilon }, xi);
        }
    });
    Ok(reports
        .into_iter()
        .zip(ls)
        .map(|(r, &l)| {
            r.with_param("n", n as f64)
                .with_param("l", l as f64)
                .with_param("epsilon", epsilon)
        })
        .collect())
}
