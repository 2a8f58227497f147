use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::GridFunction;
use crate::error::Result;
use crate::par::Execution;

/// Columns gathered per batch when transforming a strided axis.
const COLUMN_BATCH: usize = 64;

/// Unnormalized transform `f̂(ξ) = Σ_x f(x) e^{2πi⟨ξ,x⟩}` on the grid.
pub fn fft_forward(f: &GridFunction) -> GridFunction {
    let mut g = f.clone();
    fft_forward_in_place(&mut g, Execution::default());
    g
}

/// Inverse of [`fft_forward`], including the `1/m^d` factor.
pub fn fft_inverse(f: &GridFunction) -> GridFunction {
    let mut g = f.clone();
    fft_inverse_in_place(&mut g, Execution::default());
    g
}

pub fn fft_forward_in_place(g: &mut GridFunction, exec: Execution) {
    // rustfft's inverse direction carries the e^{+2πi..} kernel.
    transform(g, FftDirection::Inverse, exec);
}

pub fn fft_inverse_in_place(g: &mut GridFunction, exec: Execution) {
    transform(g, FftDirection::Forward, exec);
    let n = g.len() as f64;
    g.scale(1.0 / n);
}

fn transform(g: &mut GridFunction, direction: FftDirection, exec: Execution) {
    let (dim, side) = (g.dim(), g.side());
    let fft = FftPlanner::<f64>::new().plan_fft(side, direction);
    for axis in 0..dim {
        let stride = side.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            let lines = (1 << 14) / side;
            let fft = &fft;
            exec.for_each_chunk_mut(g.values_mut(), side * lines.max(1), |_, chunk| {
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
        } else {
            let fft = &fft;
            exec.for_each_chunk_mut(g.values_mut(), stride * side, |_, block| {
                strided_block(fft.as_ref(), block, side, stride);
            });
        }
    }
}

/// Transforms the `stride` interleaved lines of one block.
fn strided_block(fft: &dyn Fft<f64>, block: &mut [Complex64], side: usize, stride: usize) {
    let batch = COLUMN_BATCH.min(stride);
    let mut buf = vec![Complex64::default(); batch * side];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut start = 0;
    while start < stride {
        let width = batch.min(stride - start);
        for i in 0..side {
            let row = &block[i * stride + start..i * stride + start + width];
            for (j, v) in row.iter().enumerate() {
                buf[j * side + i] = *v;
            }
        }
        fft.process_with_scratch(&mut buf[..width * side], &mut scratch);
        for i in 0..side {
            let row = &mut block[i * stride + start..i * stride + start + width];
            for (j, v) in row.iter_mut().enumerate() {
                *v = buf[j * side + i];
            }
        }
        start += width;
    }
}

/// Periodic convolution `h(x) = Σ_y f(y) g(x - y)` on the grid.
///
/// The caller pads so that supports do not wrap.
pub fn circular_convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_shape(g)?;
    let exec = Execution::default();
    let mut a = f.clone();
    let mut b = g.clone();
    fft_forward_in_place(&mut a, exec);
    fft_forward_in_place(&mut b, exec);
    for (x, y) in a.values_mut().iter_mut().zip(b.values()) {
        *x *= y;
    }
    fft_inverse_in_place(&mut a, exec);
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_grid(dim: usize, side: usize, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = side.pow(dim as u32);
        let v = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GridFunction::from_values(dim, side, v).unwrap()
    }

    /// O(m^{2d}) reference transform with the same sign convention.
    fn direct_dft(f: &GridFunction) -> GridFunction {
        let mut out = GridFunction::zeros(f.dim(), f.side()).unwrap();
        let m = f.side() as f64;
        for k in 0..f.len() {
            let xi = f.coord_of(k);
            let mut acc = Complex64::default();
            for x in 0..f.len() {
                let c = f.coord_of(x);
                let phase: f64 = xi.iter().zip(&c).map(|(a, b)| (a * b) as f64).sum();
                acc += f.values()[x] * Complex64::from_polar(1.0, 2.0 * PI * phase / m);
            }
            out.values_mut()[k] = acc;
        }
        out
    }

    fn direct_convolution(f: &GridFunction, g: &GridFunction) -> GridFunction {
        let mut out = GridFunction::zeros(f.dim(), f.side()).unwrap();
        for x in 0..f.len() {
            let cx = f.coord_of(x);
            let mut acc = Complex64::default();
            for y in 0..f.len() {
                let cy = f.coord_of(y);
                let diff: Vec<i64> = cx.iter().zip(&cy).map(|(a, b)| a - b).collect();
                acc += f.values()[y] * g.get(&diff).unwrap();
            }
            out.values_mut()[x] = acc;
        }
        out
    }

    #[test]
    fn delta_transforms_to_constant() {
        let d = GridFunction::delta(1, 8, &[0]).unwrap();
        let h = fft_forward(&d);
        assert!(h.values().iter().all(|v| (*v - 1.0).norm() < 1e-15));
    }

    #[test]
    fn constant_transforms_to_scaled_delta() {
        let c = GridFunction::constant(2, 4, Complex64::new(1.0, 0.0)).unwrap();
        let h = fft_forward(&c);
        assert!((h.values()[0] - 16.0).norm() < 1e-13);
        assert!(h.values()[1..].iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn matches_direct_dft_and_round_trips() {
        for (dim, side) in [(1, 8), (2, 4), (2, 8), (3, 4)] {
            let f = random_grid(dim, side, 11 + dim as u64);
            let fast = fft_forward(&f);
            let slow = direct_dft(&f);
            assert!(fast.max_abs_diff(&slow).unwrap() < 1e-11 * f.len() as f64);
            let back = fft_inverse(&fast);
            assert!(back.max_abs_diff(&f).unwrap() <= 1e-12 * f.max_abs());
        }
    }

    #[test]
    fn sequential_and_parallel_transforms_agree() {
        let f = random_grid(3, 16, 5);
        let mut a = f.clone();
        let mut b = f.clone();
        fft_forward_in_place(&mut a, Execution::Sequential);
        fft_forward_in_place(&mut b, Execution::Parallel);
        assert_eq!(a, b);
    }

    #[test]
    fn parseval() {
        for (dim, side) in [(1, 64), (2, 16), (3, 8), (4, 4)] {
            let f = random_grid(dim, side, 3);
            let h = fft_forward(&f);
            let lhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
            let rhs: f64 = h.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / f.len() as f64;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }

    #[test]
    fn convolution_identity_and_translation() {
        let g = random_grid(2, 8, 9);
        let d0 = GridFunction::delta(2, 8, &[0, 0]).unwrap();
        assert!(
            circular_convolve(&d0, &g)
                .unwrap()
                .max_abs_diff(&g)
                .unwrap()
                < 1e-14
        );

        let a = GridFunction::delta(1, 8, &[3]).unwrap();
        let b = GridFunction::delta(1, 8, &[2]).unwrap();
        let h = circular_convolve(&a, &b).unwrap();
        let expect = GridFunction::delta(1, 8, &[5]).unwrap();
        assert!(h.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn convolution_matches_direct_sum_and_theorem() {
        let f = random_grid(2, 8, 21);
        let g = random_grid(2, 8, 22);
        let fast = circular_convolve(&f, &g).unwrap();
        let slow = direct_convolution(&f, &g);
        assert!(fast.max_abs_diff(&slow).unwrap() < 1e-10);

        let lhs = fft_forward(&fast);
        let (ff, gg) = (fft_forward(&f), fft_forward(&g));
        for i in 0..lhs.len() {
            assert!((lhs.values()[i] - ff.values()[i] * gg.values()[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let f = GridFunction::zeros(2, 8).unwrap();
        let g = GridFunction::zeros(2, 4).unwrap();
        assert!(matches!(
            circular_convolve(&f, &g),
            Err(Error::Structural(_))
        ));
    }
}
