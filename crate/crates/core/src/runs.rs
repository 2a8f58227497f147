//! Parameterized runs behind the command-line subcommands.
//!
//! Each run returns rows `(d, param, value, bound, pass)`, structured results
//! for the JSON summary, and a witness string per row where one exists.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::bodies::Body;
use crate::ergodic::{transference_check, CyclicSystem, TransferenceConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    comparison_check, comparison_factor, counterexample_direct, counterexample_exact_ratio,
    factor_check, norm_growth_scan, random_sparse_nonnegative, riesz_growth, short_variation_bound,
    BodyFamily, CounterexampleSpec, RieszConfig,
};
use crate::lattice::{GridFunction, LpNorm, SparseFunction};
use crate::multipliers::{
    check_box_bounds, check_chain_bound, check_decay_bound, check_lipschitz_bounds,
    check_product_bound, poisson_symbol, relative_change, xi_sin_norm, BoundReport, CheckConfig,
};
use crate::operators::{
    mean_zero, poisson, poisson_kernel, riesz, square_function, subordination_integral, LogGrid,
    ScaleSet,
};
use crate::output::Row;
use crate::par::{derive_seed, Execution};
use crate::variation::{
    block_variation, long_short_split, rademacher_menshov_rhs, v_r, v_r_bruteforce, ScalarPath,
    LONG_SHORT_CONSTANT,
};

/// Rows, results and witnesses of one run.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub witnesses: Vec<Option<String>>,
    pub results: serde_json::Value,
}

impl RunOutput {
    fn push(&mut self, row: Row) {
        self.push_with(row, None);
    }

    fn push_with(&mut self, row: Row, witness: Option<String>) {
        self.rows.push(row);
        self.witnesses.push(witness);
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// The failing row with the largest relative violation, with its witness.
    pub fn worst(&self) -> Option<(&Row, Option<&str>)> {
        self.rows
            .iter()
            .zip(&self.witnesses)
            .filter(|(r, _)| !r.pass)
            .max_by(|a, b| a.0.violation().total_cmp(&b.0.violation()))
            .map(|(r, w)| (r, w.as_deref()))
    }
}

fn rng_for(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

fn witness(report: &BoundReport) -> Option<String> {
    report
        .worst_point
        .as_ref()
        .map(|w| format!("{:?} at xi = {:?}", w.bound, w.xi))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MultiplierParams {
    pub dims: Vec<usize>,
    pub n_max: u64,
    pub samples: usize,
    pub product_draws: usize,
    pub threshold: f64,
    pub stability: f64,
}

impl Default for MultiplierParams {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 4, 8],
            n_max: 64,
            samples: 10_000,
            product_draws: 100_000,
            threshold: 50.0,
            stability: 0.1,
        }
    }
}

/// Symbol bounds over `N = 1..=n_max` in every dimension.
pub fn run_multipliers(p: &MultiplierParams, seed: u64, exec: Execution) -> Result<RunOutput> {
    let ns: Vec<u64> = (1..=p.n_max).collect();
    let cfg = CheckConfig {
        samples: p.samples,
        seed,
        exec,
    };
    let mut reports = check_decay_bound(&p.dims, &ns, &cfg)?;
    reports.extend(check_lipschitz_bounds(&p.dims, &ns, &cfg)?);
    reports.extend(check_box_bounds(&p.dims, &ns, &cfg)?);
    reports.extend(check_chain_bound(&p.dims, &ns, &cfg)?);
    let product = check_product_bound(p.product_draws, *p.dims.iter().max().unwrap_or(&1), seed)?;

    let mut out = RunOutput::default();
    for r in &reports {
        let ok = r.observed_constant.is_finite();
        let mut row = Row::upper(r.d, r.bound_name.clone(), r.observed_constant, p.threshold);
        row.pass &= ok;
        out.push_with(row, witness(r));
    }
    if p.dims.contains(&4) && p.dims.contains(&8) {
        for name in ["cube_decay", "cube_lipschitz", "cube_difference"] {
            let at = |d: usize| {
                reports
                    .iter()
                    .find(|r| r.d == d && r.bound_name == name)
                    .map(|r| r.observed_constant)
                    .unwrap_or(f64::NAN)
            };
            let change = relative_change(at(4), at(8));
            let mut row = Row::upper(8, format!("{name}:change_4_8"), change, p.stability);
            row.pass &= change.is_finite();
            out.push(row);
        }
    }
    out.push_with(
        Row::upper(
            product.d,
            "product_functional",
            product.observed_constant,
            10.0,
        ),
        witness(&product),
    );
    out.results = json!({ "reports": reports, "product": product });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SemigroupParams {
    pub dim: usize,
    pub side: usize,
    pub trials: usize,
    pub times: Vec<f64>,
    pub frequencies: usize,
}

impl Default for SemigroupParams {
    fn default() -> Self {
        Self {
            dim: 3,
            side: 16,
            trials: 20,
            times: vec![0.5, 1.0, 2.0],
            frequencies: 200,
        }
    }
}

fn random_grid(dim: usize, side: usize, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let n = side.pow(dim as u32);
    GridFunction::from_values(
        dim,
        side,
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect(),
    )
}

/// Semigroup law, positivity, conservation, symmetry, subordination and the
/// square-function identity for the Poisson semigroup.
pub fn run_semigroup(p: &SemigroupParams, seed: u64) -> Result<RunOutput> {
    let (d, m) = (p.dim, p.side);
    if p.times.is_empty() || p.trials == 0 {
        return Err(Error::Domain("need at least one time and one trial".into()));
    }
    let mut law: f64 = 0.0;
    let mut adjoint: f64 = 0.0;
    let mut square: f64 = 0.0;
    let quad = LogGrid::default();
    for trial in 0..p.trials {
        let mut rng = rng_for(seed, &[1, trial as u64]);
        let f = random_grid(d, m, &mut rng)?;
        let g = random_grid(d, m, &mut rng)?;
        for &s in &p.times {
            let ps = poisson(&f, s)?;
            for &t in &p.times {
                let two = poisson(&ps, t)?;
                let one = poisson(&f, s + t)?;
                law = law.max(two.max_abs_diff(&one)?);
            }
            let lhs = ps.inner(&g)?;
            let rhs = f.inner(&poisson(&g, s)?)?;
            let scale = f.lp_norm(2.0)? * g.lp_norm(2.0)?;
            adjoint = adjoint.max((lhs - rhs).norm() / scale);
        }
        let h = mean_zero(&f);
        let gh = square_function(&h, &quad)?;
        let norm = h.lp_norm(2.0)?;
        square = square.max((gh.lp_norm(2.0)? - 0.5 * norm).abs() / norm);
    }
    let mut kernel_min = f64::INFINITY;
    let mut kernel_mass: f64 = 0.0;
    let mut conservation: f64 = 0.0;
    let zero = vec![0.0; d];
    for &t in &p.times {
        let k = poisson_kernel(d, m, t)?;
        kernel_min = k.values().iter().map(|v| v.re).fold(kernel_min, f64::min);
        kernel_mass = kernel_mass.max((k.sum().re - 1.0).abs());
        conservation = conservation.max((poisson_symbol(t, &zero) - 1.0).abs());
    }
    let mut rng = rng_for(seed, &[2]);
    let mut subordination: f64 = 0.0;
    for _ in 0..p.frequencies {
        let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let sigma = xi_sin_norm(&xi);
        for &t in &p.times {
            let exact = (-t * sigma).exp();
            subordination = subordination.max((subordination_integral(sigma, t) - exact).abs());
        }
    }

    let mut out = RunOutput::default();
    out.push(Row::upper(d, "semigroup_law", law, 1e-10));
    out.push(Row::lower(d, "kernel_min", kernel_min, -1e-12));
    out.push(Row::upper(d, "conservation_symbol", conservation, 0.0));
    out.push(Row::upper(d, "kernel_mass", kernel_mass, 1e-12));
    out.push(Row::upper(d, "self_adjoint", adjoint, 1e-12));
    out.push(Row::upper(d, "subordination", subordination, 1e-8));
    out.push(Row::upper(d, "square_function", square, 1e-6));
    out.results = json!({
        "semigroup_law": law,
        "kernel_min": kernel_min,
        "kernel_mass": kernel_mass,
        "conservation_symbol": conservation,
        "self_adjoint": adjoint,
        "subordination": subordination,
        "square_function_relative_error": square,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct VariationParams {
    pub brute_paths: usize,
    pub brute_max_len: usize,
    pub calculus_paths: usize,
    pub rm_blocks: usize,
    pub rm_max_n: u32,
    pub short_dims: Vec<usize>,
    pub short_ps: Vec<f64>,
    pub short_blocks: u32,
    pub short_size: usize,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            brute_paths: 500,
            brute_max_len: 12,
            calculus_paths: 1000,
            rm_blocks: 1000,
            rm_max_n: 6,
            short_dims: vec![1, 2, 3],
            short_ps: vec![1.6, 2.0],
            short_blocks: 4,
            short_size: 50,
        }
    }
}

fn random_path(rng: &mut ChaCha8Rng, len: usize, start: f64) -> Result<ScalarPath> {
    let complex = rng.gen_bool(0.3);
    let mut t = start;
    let mut times = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        times.push(t);
        t += rng.gen_range(0.1..2.0);
        let im = if complex {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        };
        values.push(Complex64::new(rng.gen_range(-2.0..2.0), im));
    }
    ScalarPath::new(times, values)
}

/// Violation counts of the five calculus properties on one path.
fn calculus_violations(path: &ScalarPath, rng: &mut ChaCha8Rng) -> Result<[usize; 5]> {
    let tol = 1e-12;
    let r1 = rng.gen_range(1.0..4.0);
    let r2 = r1 + rng.gen_range(0.0..3.0);
    let v1 = v_r(path, r1)?.value;
    let v2 = v_r(path, r2)?.value;
    let mut out = [0usize; 5];
    out[0] = usize::from(v2 > v1 * (1.0 + tol) + tol);

    let keep: Vec<bool> = (0..path.len()).map(|_| rng.gen_bool(0.5)).collect();
    let times = path.times().to_vec();
    if let Some(sub) =
        path.restrict(|t| keep[times.iter().position(|s| *s == t).expect("own time")])
    {
        out[1] = usize::from(v_r(&sub, r1)?.value > v1 * (1.0 + tol) + tol);
    }

    let sup = path.sup_abs();
    if path.len() >= 2 {
        let cut = times[rng.gen_range(1..path.len())];
        let head = path.restrict(|t| t < cut).expect("nonempty head");
        let tail = path.restrict(|t| t >= cut).expect("nonempty tail");
        let rhs = v_r(&head, r1)?.value + v_r(&tail, r1)?.value + 2.0 * sup;
        out[2] = usize::from(v1 > rhs * (1.0 + tol) + tol);
    }

    let first = path.values()[0].norm();
    out[3] = usize::from(sup > (first + 2.0 * v1) * (1.0 + tol) + tol);

    let lr: f64 = path
        .values()
        .iter()
        .map(|v| v.norm().powf(r1))
        .sum::<f64>()
        .powf(1.0 / r1);
    out[4] = usize::from(v1 > 2.0 * lr * (1.0 + tol) + tol);
    Ok(out)
}

/// Dynamic programme against exhaustion, the variation calculus, the
/// Rademacher–Menshov bound, the long/short split and short variations of
/// cube averages.
pub fn run_variation(p: &VariationParams, seed: u64, exec: Execution) -> Result<RunOutput> {
    let mut out = RunOutput::default();

    let brute = exec
        .map_range(p.brute_paths, |i| -> Result<f64> {
            let mut rng = rng_for(seed, &[10, i as u64]);
            let len = rng.gen_range(1..=p.brute_max_len);
            let path = random_path(&mut rng, len, 0.0)?;
            let r = rng.gen_range(1.0..4.0);
            Ok((v_r(&path, r)?.value - v_r_bruteforce(&path, r)?).abs())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let brute_err = brute.iter().copied().fold(0.0, f64::max);
    out.push(Row::upper(1, "dp_vs_bruteforce", brute_err, 1e-12));

    let calculus = exec
        .map_range(p.calculus_paths, |i| -> Result<[usize; 5]> {
            let mut rng = rng_for(seed, &[11, i as u64]);
            let len = rng.gen_range(1..=24);
            let path = random_path(&mut rng, len, 0.0)?;
            calculus_violations(&path, &mut rng)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let names = [
        "monotone_in_r",
        "subset_monotone",
        "splitting",
        "sup_bound",
        "lr_bound",
    ];
    let mut counts = [0usize; 5];
    for c in &calculus {
        for k in 0..5 {
            counts[k] += c[k];
        }
    }
    for (name, c) in names.iter().zip(counts) {
        out.push(Row::upper(1, *name, c as f64, 0.0));
    }

    let rm = exec
        .map_range(p.rm_blocks, |i| -> Result<(usize, f64)> {
            let mut rng = rng_for(seed, &[12, i as u64]);
            let n = rng.gen_range(0..=p.rm_max_n);
            let r = [1.0, 2.0, 3.0][rng.gen_range(0..3)];
            let len = (1usize << n) + 1;
            let vals: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let path = ScalarPath::integer_times(1i64 << n, &vals)?;
            let lhs = block_variation(&path, r)?;
            let rhs = rademacher_menshov_rhs(&path, r)?;
            let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
            Ok((usize::from(lhs > rhs * (1.0 + 1e-12)), ratio))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rm_viol: usize = rm.iter().map(|x| x.0).sum();
    let rm_max = rm.iter().map(|x| x.1).fold(0.0, f64::max);
    out.push(Row::upper(1, "rademacher_menshov", rm_viol as f64, 0.0));

    let split = exec
        .map_range(p.calculus_paths, |i| -> Result<(bool, f64)> {
            let mut rng = rng_for(seed, &[13, i as u64]);
            let len = rng.gen_range(1..=40);
            let vals: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let path = ScalarPath::integer_times(1, &vals)?;
            let s = long_short_split(&path, rng.gen_range(1.0..4.0))?;
            Ok((s.bound_ok, s.ratio))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let c_r = split.iter().map(|x| x.1).fold(0.0, f64::max);
    let mut row = Row::upper(1, "long_short_constant", c_r, LONG_SHORT_CONSTANT);
    row.pass &= split.iter().all(|x| x.0);
    out.push(row);

    let short = short_variation_bound(
        &p.short_dims,
        &p.short_ps,
        p.short_blocks,
        p.short_size,
        seed,
        exec,
    )?;
    for pt in &short.points {
        out.push(Row::record(
            pt.d,
            format!("short_variation[p={}]", pt.p),
            pt.ratio,
        ));
    }
    for (curve, sp) in short.curves.iter().zip(&p.short_ps) {
        let d = *p.short_dims.iter().max().unwrap_or(&1);
        out.push(Row::upper(
            d,
            format!("short_variation_spread[p={sp}]"),
            curve.spread(),
            2.0,
        ));
    }

    out.results = json!({
        "dp_vs_bruteforce_max_error": brute_err,
        "calculus_violations": names.iter().zip(counts).map(|(n, c)| (n.to_string(), c)).collect::<std::collections::BTreeMap<_, _>>(),
        "rademacher_menshov": { "violations": rm_viol, "max_ratio": rm_max },
        "long_short": { "empirical_constant": c_r, "constant": LONG_SHORT_CONSTANT },
        "short_variation": short,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleParams {
    pub r: u32,
    pub p: f64,
    #[serde(rename = "M")]
    pub m: u32,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self { r: 4, p: 1.5, m: 1 }
    }
}

/// Exact lower bound, plus the grid evaluation when `r ≤ 2` and `M = 1`.
pub fn run_counterexample(p: &CounterexampleParams) -> Result<RunOutput> {
    let spec = CounterexampleSpec::new(p.r, p.m, p.p)?;
    let b = counterexample_exact_ratio(&spec);
    let d = b.dim;
    let mut out = RunOutput::default();
    out.push(Row::lower(d, "ratio_lower", b.ratio_lower, b.target));
    out.push(Row::lower(
        d,
        "ratio_lower_vs_chain",
        b.ratio_lower,
        b.chain_constant,
    ));
    out.push(Row::lower(
        d,
        "blocks_only_vs_chain",
        b.blocks_only,
        b.chain_constant,
    ));
    let mut direct = None;
    if p.r <= 2 && p.m == 1 {
        let dr = counterexample_direct(&spec)?;
        out.push(Row::lower(d, "direct", dr.ratio, b.ratio_lower - 1e-10));
        out.push(Row::upper(d, "direct_cross_check", dr.cross_check, 1e-10));
        direct = Some(dr);
    }
    out.results = json!({ "exact": b, "direct": direct });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonParams {
    pub dims: Vec<usize>,
    pub functions: usize,
    pub points: usize,
    pub radius: i64,
    pub factor_dims: usize,
}

impl Default for ComparisonParams {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 3],
            functions: 100,
            points: 5,
            radius: 3,
            factor_dims: 1_000_000,
        }
    }
}

/// Discrete-to-continuous comparison for the cube at `t = c·d` and `t = 2c·d`.
pub fn run_comparison(p: &ComparisonParams, seed: u64, exec: Execution) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let mut reports = Vec::new();
    for &d in &p.dims {
        let body = Body::cube(d)?;
        let fs: Vec<SparseFunction> = (0..p.functions)
            .map(|i| {
                let mut rng = rng_for(seed, &[20, d as u64, i as u64]);
                random_sparse_nonnegative(d, p.points, p.radius, &mut rng)
            })
            .collect::<Result<_>>()?;
        let c = body.comparison_constant() * d as f64;
        let runs = exec
            .map(&[(1.0, "t=c*d"), (2.0, "t=2c*d")], |(k, _)| {
                comparison_check(&body, k * c, &fs)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for (rep, name) in runs.into_iter().zip(["t=c*d", "t=2c*d"]) {
            let mut row = Row::lower(d, format!("{name}:min_ratio"), rep.min_ratio, 1.0);
            row.pass = rep.passes();
            let w = rep
                .worst
                .as_ref()
                .map(|(n, x)| format!("n = {n:?}, x = {x:?}"));
            out.push_with(row, w);
            out.push(Row::upper(
                d,
                format!("{name}:violations"),
                rep.violations as f64,
                0.0,
            ));
            reports.push(rep);
        }
    }
    let ok = factor_check(p.factor_dims);
    let mut row = Row::upper(
        p.factor_dims,
        "factor_le_e6",
        comparison_factor(p.factor_dims),
        6f64.exp(),
    );
    row.pass &= ok;
    out.push(row);
    out.results = json!({ "reports": reports, "factor_check": ok });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct NormScanParams {
    pub dims: Vec<usize>,
    pub p: f64,
    pub size: usize,
    pub dyadic_exponent: u32,
    pub ellipsoid_dims: Vec<usize>,
    pub slope_bound: f64,
}

impl Default for NormScanParams {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 3, 4],
            p: 2.0,
            size: 50,
            dyadic_exponent: 2,
            ellipsoid_dims: vec![3, 7, 15, 31],
            slope_bound: 0.05,
        }
    }
}

/// Cube scan over a seeded ensemble and the ellipsoid curve at construction dimensions.
pub fn run_norm_scan(p: &NormScanParams, seed: u64, exec: Execution) -> Result<RunOutput> {
    let scales = ScaleSet::dyadic(p.dyadic_exponent);
    let cube = norm_growth_scan(BodyFamily::Cube, p.p, &p.dims, &scales, p.size, seed, exec)?;
    let ell = norm_growth_scan(
        BodyFamily::Ellipsoid,
        p.p,
        &p.ellipsoid_dims,
        &scales,
        p.size,
        seed,
        exec,
    )?;
    let mut out = RunOutput::default();
    for pt in &cube.points {
        out.push_with(
            Row::record(pt.d, "cube_ratio", pt.ratio),
            Some(format!("member {} ({:?})", pt.best, pt.best_kind)),
        );
    }
    let d_max = *p.dims.iter().max().unwrap_or(&1);
    out.push(Row::upper(
        d_max,
        "cube_slope",
        cube.curve.fit,
        p.slope_bound,
    ));
    for pt in &ell.points {
        let reference = pt.reference.unwrap_or(0.0);
        out.push(Row::lower(pt.d, "ellipsoid_ratio", pt.ratio, reference));
    }
    let min_step = ell
        .curve
        .ys
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let e_max = *p.ellipsoid_dims.iter().max().unwrap_or(&1);
    let mut row = Row::lower(e_max, "ellipsoid_min_increment", min_step, 0.0);
    row.pass = ell.curve.strictly_increasing();
    out.push(row);
    out.results = json!({ "cube": cube, "ellipsoid": ell });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RieszParams {
    pub q: f64,
    pub dims: Vec<usize>,
    pub start_side: usize,
    pub tolerance: f64,
    pub partition_trials: usize,
    pub partition_dim: usize,
    pub partition_side: usize,
}

impl Default for RieszParams {
    fn default() -> Self {
        Self {
            q: 1.5,
            dims: vec![1, 2, 4, 8],
            start_side: 4,
            tolerance: 0.01,
            partition_trials: 20,
            partition_dim: 3,
            partition_side: 8,
        }
    }
}

/// `Σ_j ‖R_j f‖_2² = ‖f‖_2²` on random mean-zero grids and the `ℓ^q` growth curve.
pub fn run_riesz(p: &RieszParams, seed: u64, exec: Execution) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let mut partition: f64 = 0.0;
    for trial in 0..p.partition_trials {
        let mut rng = rng_for(seed, &[30, trial as u64]);
        let f = mean_zero(&random_grid(p.partition_dim, p.partition_side, &mut rng)?);
        let total = f.lp_norm(2.0)?.powi(2);
        let mut sum = 0.0;
        for j in 1..=p.partition_dim {
            sum += riesz(&f, j)?.lp_norm(2.0)?.powi(2);
        }
        partition = partition.max((sum - total).abs() / total);
    }
    out.push(Row::upper(
        p.partition_dim,
        "riesz_partition",
        partition,
        1e-10,
    ));

    let cfg = RieszConfig {
        q: p.q,
        start_side: p.start_side,
        tolerance: p.tolerance,
    };
    let growth = riesz_growth(&cfg, &p.dims, exec)?;
    for pt in &growth.points {
        out.push_with(
            Row::lower(pt.d, "ratio", pt.ratio, pt.bound),
            Some(format!("side {} previous {}", pt.side, pt.previous)),
        );
        out.push(Row::upper(
            pt.d,
            "half_norm",
            pt.half_norm,
            pt.half_norm_bound,
        ));
        out.push(Row::upper(pt.d, "identity", pt.identity_error, 1e-12));
    }
    out.results = json!({ "partition_relative_error": partition, "growth": growth });
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TransferenceParams {
    pub dim: usize,
    pub modulus: usize,
    pub cases: usize,
    pub r: f64,
    pub p: f64,
    pub scales: Vec<f64>,
    pub inner_radius: i64,
}

impl Default for TransferenceParams {
    fn default() -> Self {
        Self {
            dim: 2,
            modulus: 32,
            cases: 50,
            r: 3.0,
            p: 2.0,
            scales: vec![1.0, 2.0],
            inner_radius: 8,
        }
    }
}

/// Case 0 is `δ_0`, case 1 a constant, the rest random signed or nonnegative states.
pub fn transference_case(p: &TransferenceParams, seed: u64, case: usize) -> Result<CyclicSystem> {
    let mut rng = rng_for(seed, &[40, case as u64]);
    match case {
        0 => CyclicSystem::from_fn(p.dim, p.modulus, |x| {
            if x.iter().all(|v| *v == 0) {
                1.0
            } else {
                0.0
            }
        }),
        1 => CyclicSystem::from_fn(p.dim, p.modulus, |_| 1.0),
        c if c % 2 == 0 => CyclicSystem::from_fn(p.dim, p.modulus, |_| rng.gen_range(-1.0..1.0)),
        _ => CyclicSystem::from_fn(p.dim, p.modulus, |_| rng.gen::<f64>()),
    }
}

/// Transference identity and variation bound over seeded cases.
pub fn run_transference(p: &TransferenceParams, seed: u64, exec: Execution) -> Result<RunOutput> {
    let body = Body::cube(p.dim)?;
    let cfg = TransferenceConfig {
        inner_radius: p.inner_radius,
        scales: p.scales.clone(),
        r: p.r,
        p: p.p,
    };
    let mut out = RunOutput::default();
    let mut reports = Vec::new();
    for case in 0..p.cases {
        let sys = transference_case(p, seed, case)?;
        let rep = transference_check(&sys, &body, &cfg, exec)?;
        out.push(Row::upper(
            p.dim,
            format!("identity[{case}]"),
            rep.identity_error,
            1e-14,
        ));
        out.push(Row::upper(
            p.dim,
            format!("excess[{case}]"),
            rep.excess,
            1e-9,
        ));
        reports.push(rep);
    }
    out.results = json!({ "reports": reports });
    Ok(out)
}
