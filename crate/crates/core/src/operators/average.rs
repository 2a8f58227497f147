use num_complex::Complex64;

use super::ScaleSet;
use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::lattice::{embed, fft_forward_in_place, fft_inverse_in_place, GridFunction};
use crate::multipliers::cube_symbol;
use crate::par::Execution;

/// One grid per scale, all of the same shape.
#[derive(Debug, Clone)]
pub struct OperatorOutput {
    pub per_scale: Vec<GridFunction>,
    pub scales: ScaleSet,
}

/// `max ‖y‖_∞` over `G_t ∩ Z^d`.
pub fn kernel_radius(body: &Body, t: f64) -> Result<i64> {
    if body.is_cube() {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {t}")));
        }
        return Ok(t.floor() as i64);
    }
    let s = body.lattice_points(t)?;
    Ok(s.points().iter().map(|p| p.sup_norm()).max().unwrap_or(0))
}

fn check_padding(f: &GridFunction, radius: i64) -> Result<()> {
    let support = f.support_radius(0.0).unwrap_or(0);
    let limit = f.side() as i64 / 2 - 1;
    if support + radius > limit {
        let need = (2 * (support + radius + 1)).max(4) as usize;
        return Err(Error::Padding {
            radius: support,
            margin: radius,
            side: f.side(),
            required_side: need.next_power_of_two(),
        });
    }
    Ok(())
}

fn check_body(f: &GridFunction, body: &Body) -> Result<()> {
    if f.dim() != body.dim() {
        return Err(Error::Structural(format!(
            "grid of dimension {} with a body of dimension {}",
            f.dim(),
            body.dim()
        )));
    }
    Ok(())
}

/// `M_t^G f` on `Z^d`, computed on the grid; fails if the result would wrap.
pub fn average(f: &GridFunction, body: &Body, t: f64) -> Result<GridFunction> {
    check_body(f, body)?;
    check_padding(f, kernel_radius(body, t)?)?;
    average_periodic(f, body, t)
}

/// `M_t^G f` on the torus `(Z/m)^d`, wrap-around included.
pub fn average_periodic(f: &GridFunction, body: &Body, t: f64) -> Result<GridFunction> {
    check_body(f, body)?;
    let k = kernel_grid(body, t, f.side())?;
    let exec = Execution::default();
    let mut a = f.clone();
    fft_forward_in_place(&mut a, exec);
    let mut b = k;
    fft_forward_in_place(&mut b, exec);
    for (x, y) in a.values_mut().iter_mut().zip(b.values()) {
        *x *= y;
    }
    fft_inverse_in_place(&mut a, exec);
    Ok(a)
}

/// The averaging kernel on the torus, folded if it exceeds the grid.
fn kernel_grid(body: &Body, t: f64, side: usize) -> Result<GridFunction> {
    let kernel = body.kernel(t)?;
    if let Ok(g) = embed(&kernel, side, 0) {
        return Ok(g);
    }
    let mut g = GridFunction::zeros(body.dim(), side)?;
    for (c, v) in kernel.iter() {
        let i = g.index_of(c.entries())?;
        g.values_mut()[i] += v;
    }
    Ok(g)
}

/// Cube average through its symbol `m_⌊t⌋`.
pub fn average_cube_spectral(f: &GridFunction, t: f64) -> Result<GridFunction> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {t}")));
    }
    let n = t.floor() as i64;
    check_padding(f, n)?;
    Ok(super::apply_multiplier(f, |xi| {
        Complex64::new(cube_symbol(n as u64, xi), 0.0)
    }))
}

/// `M_t^G f` for every scale, sharing one forward transform of `f`.
pub fn averages(f: &GridFunction, body: &Body, scales: &ScaleSet) -> Result<OperatorOutput> {
    check_body(f, body)?;
    let largest = *scales.scales().last().expect("scale sets are nonempty");
    check_padding(f, kernel_radius(body, largest)?)?;
    let exec = Execution::default();
    let mut fhat = f.clone();
    fft_forward_in_place(&mut fhat, exec);
    let per_scale = exec
        .map(scales.scales(), |&t| -> Result<GridFunction> {
            let mut k = kernel_grid(body, t, f.side())?;
            fft_forward_in_place(&mut k, Execution::Sequential);
            for (x, y) in k.values_mut().iter_mut().zip(fhat.values()) {
                *x *= y;
            }
            fft_inverse_in_place(&mut k, Execution::Sequential);
            Ok(k)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorOutput {
        per_scale,
        scales: scales.clone(),
    })
}

/// `sup_{t ∈ scales} |M_t^G f|`, pointwise; cube scales are reduced to one per `⌊t⌋`.
pub fn maximal(f: &GridFunction, body: &Body, scales: &ScaleSet) -> Result<GridFunction> {
    let reduced;
    let scales = if body.is_cube() {
        reduced = ScaleSet::new(scales.floor_representatives())?;
        &reduced
    } else {
        scales
    };
    let out = averages(f, body, scales)?;
    let mut m = GridFunction::zeros(f.dim(), f.side())?;
    for a in &out.per_scale {
        for (x, y) in m.values_mut().iter_mut().zip(a.values()) {
            if y.norm() > x.re {
                *x = Complex64::new(y.norm(), 0.0);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Coord, SparseFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_local(dim: usize, side: usize, radius: i64, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = GridFunction::zeros(dim, side).unwrap();
        for i in 0..g.len() {
            if g.coord_of(i).iter().all(|v| v.abs() <= radius) {
                g.values_mut()[i] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            }
        }
        g
    }

    #[test]
    fn delta_average_is_the_kernel() {
        let d = GridFunction::delta(1, 8, &[0]).unwrap();
        let a = average(&d, &Body::cube(1).unwrap(), 1.0).unwrap();
        for x in -4i64..4 {
            let expect = if x.abs() <= 1 { 1.0 / 3.0 } else { 0.0 };
            assert!((a.get(&[x]).unwrap().re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn constants_are_preserved_on_the_torus() {
        let one = GridFunction::constant(2, 8, Complex64::new(1.0, 0.0)).unwrap();
        for body in [
            Body::cube(2).unwrap(),
            Body::lq_ball(2, 1.0).unwrap(),
            Body::default_ellipsoid(2).unwrap(),
        ] {
            let a = average_periodic(&one, &body, 2.0).unwrap();
            assert!(a.max_abs_diff(&one).unwrap() < 1e-14);
        }
    }

    #[test]
    fn spatial_and_spectral_cube_paths_agree() {
        let f = random_local(2, 16, 3, 4);
        let body = Body::cube(2).unwrap();
        for t in [1.0, 2.0, 2.5, 4.0] {
            let a = average(&f, &body, t).unwrap();
            let b = average_cube_spectral(&f, t).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
            let c = average(&f, &body, t.floor()).unwrap();
            assert!(a.max_abs_diff(&c).unwrap() == 0.0);
        }
    }

    #[test]
    fn padding_is_enforced() {
        let f = random_local(1, 8, 2, 1);
        let err = average(&f, &Body::cube(1).unwrap(), 2.0).unwrap_err();
        assert!(matches!(
            err,
            Error::Padding {
                required_side: 16,
                ..
            }
        ));
        assert!(average(&f, &Body::cube(1).unwrap(), 1.0).is_ok());
    }

    #[test]
    fn grid_average_matches_sparse_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let body = Body::lq_ball(2, 1.0).unwrap();
        let pts: Vec<(Coord, f64)> = (0..6)
            .map(|_| {
                (
                    Coord::new(vec![rng.gen_range(-3..=3), rng.gen_range(-3..=3)]),
                    rng.gen_range(0.0..1.0),
                )
            })
            .collect();
        let f = SparseFunction::from_real(2, pts).unwrap();
        let g = embed(&f, 16, 3).unwrap();
        let a = average(&g, &body, 3.0).unwrap();
        let kernel = body.lattice_points(3.0).unwrap();
        for x in -7..8 {
            for y in -7..8 {
                let direct: f64 = kernel
                    .points()
                    .iter()
                    .map(|k| {
                        f.get(&Coord::new(vec![x - k.entries()[0], y - k.entries()[1]]))
                            .re
                    })
                    .sum::<f64>()
                    / kernel.len() as f64;
                assert!((a.get(&[x, y]).unwrap().re - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn maximal_examples() {
        let d = GridFunction::delta(1, 32, &[0]).unwrap();
        let body = Body::cube(1).unwrap();
        let m = maximal(&d, &body, &ScaleSet::dyadic(2)).unwrap();
        assert!((m.get(&[0]).unwrap().re - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.get(&[3]).unwrap().re - 1.0 / 9.0).abs() < 1e-15);

        let single = maximal(&d, &body, &ScaleSet::new(vec![2.0]).unwrap()).unwrap();
        let avg = average(&d, &body, 2.0).unwrap();
        for (a, b) in single.values().iter().zip(avg.values()) {
            assert!((a.re - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn maximal_dominates_and_commutes_with_translation() {
        let f = random_local(2, 16, 2, 11);
        let pos = GridFunction::from_values(
            2,
            16,
            f.values()
                .iter()
                .map(|v| Complex64::new(v.re.abs(), 0.0))
                .collect(),
        )
        .unwrap();
        let body = Body::default_ellipsoid(2).unwrap();
        let scales = ScaleSet::new(vec![1.0, 1.3, 2.0, 3.5]).unwrap();
        let m = maximal(&pos, &body, &scales).unwrap();
        for t in scales.scales() {
            let a = average(&pos, &body, *t).unwrap();
            for (x, y) in m.values().iter().zip(a.values()) {
                assert!(x.re + 1e-14 >= y.re);
            }
        }
        let shift = [1i64, -1];
        let moved = GridFunction::from_fn(2, 16, |x| {
            pos.get(&[x[0] - shift[0], x[1] - shift[1]]).unwrap()
        })
        .unwrap();
        let mm = maximal(&moved, &body, &scales).unwrap();
        for i in 0..mm.len() {
            let x = mm.coord_of(i);
            let back = m.get(&[x[0] - shift[0], x[1] - shift[1]]).unwrap();
            assert!((mm.values()[i] - back).norm() < 1e-13);
        }
    }
}
