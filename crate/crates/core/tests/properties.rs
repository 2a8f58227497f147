//! Property tests across the public API.

use latmax::bodies::Body;
use latmax::ergodic::{ergodic_average, CyclicSystem};
use latmax::experiments::parity_counts;
use latmax::lattice::{circular_convolve, fft_forward, lp_norm_of, GridFunction, LpNorm};
use latmax::multipliers::{cube_symbol, riesz_symbol};
use latmax::operators::{average_periodic, maximal, poisson, ScaleSet};
use latmax::variation::{v_r, ScalarPath};
use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = GridFunction> {
    (1usize..=3, prop_oneof![Just(4usize), Just(8)]).prop_flat_map(|(d, m)| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m.pow(d as u32)).prop_map(
            move |v| {
                let values = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
                GridFunction::from_values(d, m, values).unwrap()
            },
        )
    })
}

fn real_grid(d: usize, m: usize) -> impl Strategy<Value = GridFunction> {
    proptest::collection::vec(-1.0f64..1.0, m.pow(d as u32)).prop_map(move |v| {
        GridFunction::from_values(
            d,
            m,
            v.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        )
        .unwrap()
    })
}

fn shift(f: &GridFunction, by: &[i64]) -> GridFunction {
    let mut g = f.clone();
    for i in 0..f.len() {
        let x: Vec<i64> = f.coord_of(i).iter().zip(by).map(|(a, b)| a + b).collect();
        let j = f.index_of(&x).unwrap();
        g.values_mut()[j] = f.values()[i];
    }
    g
}

fn body(kind: u8, d: usize) -> Body {
    match kind {
        0 => Body::cube(d).unwrap(),
        1 => Body::lq_ball(d, 1.0).unwrap(),
        2 => Body::lq_ball(d, 2.0).unwrap(),
        _ => Body::default_ellipsoid(d).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(f in grid()) {
        let lhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = fft_forward(&f).values().iter().map(|v| v.norm_sqr()).sum::<f64>()
            / f.len() as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn convolution_theorem(f in real_grid(2, 8), g in real_grid(2, 8)) {
        let lhs = fft_forward(&circular_convolve(&f, &g).unwrap());
        let (ff, fg) = (fft_forward(&f), fft_forward(&g));
        for ((a, b), c) in lhs.values().iter().zip(ff.values()).zip(fg.values()) {
            prop_assert!((a - b * c).norm() <= 1e-10);
        }
    }

    #[test]
    fn lp_norm_order_and_triangle(
        a in proptest::collection::vec(-5.0f64..5.0, 1..40),
        shrink in proptest::collection::vec(0.0f64..1.0, 40),
        p in 1.0f64..6.0,
    ) {
        let smaller: Vec<f64> = a.iter().zip(&shrink).map(|(x, s)| x * s).collect();
        prop_assert!(lp_norm_of(smaller.clone(), p).unwrap() <= lp_norm_of(a.clone(), p).unwrap() * (1.0 + 1e-12));
        let sum: Vec<f64> = a.iter().zip(&smaller).map(|(x, y)| x - 2.0 * y).collect();
        let bound = lp_norm_of(a.clone(), p).unwrap() + 2.0 * lp_norm_of(smaller, p).unwrap();
        prop_assert!(lp_norm_of(sum, p).unwrap() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn lattice_points_match_box_scan(kind in 0u8..4, d in 1usize..=3, t in 0.0f64..5.0) {
        let b = body(kind, d);
        let section = b.lattice_points(t).unwrap();
        let r = t.ceil() as i64 + 1;
        let side = (2 * r + 1) as usize;
        let mut count = 0;
        for i in 0..side.pow(d as u32) {
            let mut rest = i;
            let x: Vec<f64> = (0..d).map(|_| {
                let v = (rest % side) as i64 - r;
                rest /= side;
                v as f64
            }).collect();
            if b.gauge(&x) <= t * (1.0 + 1e-12) {
                count += 1;
            }
        }
        prop_assert_eq!(section.len(), count);
        for p in section.points() {
            prop_assert!(b.gauge_of(p) <= t * (1.0 + 1e-12));
        }
    }

    #[test]
    fn kernel_mass_is_one(kind in 0u8..4, d in 1usize..=3, t in 0.0f64..4.0) {
        let k = body(kind, d).kernel(t).unwrap();
        prop_assert!((k.sum().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cube_average_depends_on_floor(f in real_grid(2, 16), t in 1.0f64..4.0) {
        let cube = Body::cube(2).unwrap();
        let a = average_periodic(&f, &cube, t).unwrap();
        let b = average_periodic(&f, &cube, t.floor()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn averages_commute_with_translations(
        f in real_grid(2, 16),
        kind in 0u8..4,
        t in 0.5f64..3.0,
        by in proptest::collection::vec(-20i64..20, 2),
    ) {
        let b = body(kind, 2);
        let lhs = average_periodic(&shift(&f, &by), &b, t).unwrap();
        let rhs = shift(&average_periodic(&f, &b, t).unwrap(), &by);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        let scales = ScaleSet::dyadic(1);
        let m1 = maximal(&shift(&f, &by), &b, &scales);
        if let Ok(m1) = m1 {
            let m2 = shift(&maximal(&f, &b, &scales).unwrap(), &by);
            prop_assert!(m1.max_abs_diff(&m2).unwrap() < 1e-12);
        }
    }

    #[test]
    fn poisson_contracts(f in real_grid(2, 8), t in 0.1f64..3.0) {
        let g = poisson(&f, t).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            prop_assert!(g.lp_norm(p).unwrap() <= f.lp_norm(p).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn symbol_bounds(xi in proptest::collection::vec(-0.5f64..0.5, 1..6), n in 1u64..100) {
        let m = cube_symbol(n, &xi);
        prop_assert!(m.abs() <= 1.0);
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        prop_assert_eq!(m, cube_symbol(n, &neg));
        if xi.iter().any(|v| *v != 0.0) {
            let total: f64 = (1..=xi.len()).map(|j| riesz_symbol(j, &xi).unwrap().norm_sqr()).sum();
            prop_assert!((total - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn variation_calculus(
        vals in proptest::collection::vec(-3.0f64..3.0, 2..20),
        keep in proptest::collection::vec(any::<bool>(), 20),
        cut in 1usize..19,
        r in 1.0f64..4.0,
    ) {
        let path = ScalarPath::from_real(&vals).unwrap();
        let v = v_r(&path, r).unwrap().value;
        let tol = |x: f64| x * (1.0 + 1e-12) + 1e-12;
        let times = path.times().to_vec();
        if let Some(sub) = path.restrict(|t| keep[times.iter().position(|s| *s == t).unwrap()]) {
            prop_assert!(v_r(&sub, r).unwrap().value <= tol(v));
        }
        let cut = times[cut.min(times.len() - 1)];
        let head = path.restrict(|t| t < cut).unwrap();
        let tail = path.restrict(|t| t >= cut).unwrap();
        let split = v_r(&head, r).unwrap().value + v_r(&tail, r).unwrap().value + 2.0 * path.sup_abs();
        prop_assert!(v <= tol(split));
        prop_assert!(path.sup_abs() <= tol(path.values()[0].norm() + 2.0 * v));
        prop_assert!(v <= tol(2.0 * lp_norm_of(vals.clone(), r).unwrap()));
    }

    #[test]
    fn parity_cardinalities(m in 1u32..6, s in 0u32..4) {
        let c = parity_counts(m, s);
        let n = BigUint::from(2 * m + 1).pow(1 << s);
        prop_assert_eq!(&c.odd + &c.even, n.clone());
        for part in [&c.odd, &c.even] {
            prop_assert!(BigUint::from(3u32) * part >= n);
            prop_assert!(part <= &n);
        }
    }

    #[test]
    fn ergodic_mean_and_shifts(
        state in proptest::collection::vec(-1.0f64..1.0, 64),
        t in 0.0f64..3.0,
        a in -10i64..10,
        b in -10i64..10,
    ) {
        let sys = CyclicSystem::new(2, 8, state).unwrap();
        let cube = Body::cube(2).unwrap();
        let avg = ergodic_average(&sys, &cube, t).unwrap();
        prop_assert!((avg.total() - sys.total()).abs() < 1e-12);
        let ab = sys.shifted(0, a).unwrap().shifted(1, b).unwrap();
        let ba = sys.shifted(1, b).unwrap().shifted(0, a).unwrap();
        prop_assert_eq!(ergodic_average(&ab, &cube, t).unwrap(), ergodic_average(&ba, &cube, t).unwrap());
    }
}
