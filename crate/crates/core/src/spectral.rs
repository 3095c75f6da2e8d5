//! FFT plumbing on periodic grids.
//!
//! Transforms run axis by axis with `rustfft`. Mode `m` on an axis of `n`
//! cells has wavenumber `2π m / L` with `m` taken in `(−n/2, n/2]`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::measure::Grid;

/// Signed mode numbers of one axis in FFT order.
pub fn mode_numbers(n: usize) -> Vec<i64> {
    (0..n)
        .map(|i| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 })
        .collect()
}

/// Whether mode `m` is the unpaired Nyquist mode of an even-length axis.
pub fn is_nyquist(m: i64, n: usize) -> bool {
    n.is_multiple_of(2) && m == (n / 2) as i64
}

fn transform_axes(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total = data.len();
    let mut stride = 1usize;
    let mut buffer = Vec::new();
    for axis in (0..shape.len()).rev() {
        let n = shape[axis];
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        buffer.resize(n, Complex64::default());
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, b) in buffer.iter_mut().enumerate() {
                    *b = data[base + i * stride];
                }
                fft.process(&mut buffer);
                for (i, b) in buffer.iter().enumerate() {
                    data[base + i * stride] = *b;
                }
            }
        }
        stride *= n;
    }
    if inverse {
        let scale = 1.0 / total as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

pub fn forward(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_axes(&mut data, grid.shape(), false);
    data
}

/// Inverse transform, keeping the real part.
pub fn inverse_real(grid: &Grid, mut spectrum: Vec<Complex64>) -> Vec<f64> {
    transform_axes(&mut spectrum, grid.shape(), true);
    spectrum.into_iter().map(|z| z.re).collect()
}

/// Multiplies every mode by `multiplier(mode_numbers, wavevector)`.
pub fn apply_multiplier(
    grid: &Grid,
    values: &[f64],
    multiplier: impl Fn(&[i64], &[f64]) -> Complex64,
) -> Vec<f64> {
    let mut spectrum = forward(grid, values);
    let modes: Vec<Vec<i64>> = grid.shape().iter().map(|&n| mode_numbers(n)).collect();
    let side = grid.side();
    let tau = std::f64::consts::TAU;
    let mut m = vec![0i64; grid.dim()];
    let mut k = vec![0f64; grid.dim()];
    for (flat, z) in spectrum.iter_mut().enumerate() {
        for (axis, &i) in grid.unflat(flat).iter().enumerate() {
            m[axis] = modes[axis][i];
            k[axis] = tau * m[axis] as f64 / side;
        }
        *z *= multiplier(&m, &k);
    }
    inverse_real(grid, spectrum)
}

/// Cyclic convolution `(a ⊛ b)[x] = Σ_y a[x − y] b[y]`.
pub fn cyclic_convolve(grid: &Grid, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut fa = forward(grid, a);
    let fb = forward(grid, b);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse_real(grid, fa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::integer;
    use crate::measure::Domain;

    #[test]
    fn round_trip() {
        let g = Grid::new(Domain::torus(2, integer(1)).unwrap(), vec![4, 6]).unwrap();
        let v: Vec<f64> = (0..24).map(|i| (i as f64).sin()).collect();
        let back = inverse_real(&g, forward(&g, &v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mode_layout() {
        assert_eq!(mode_numbers(4), vec![0, 1, 2, -1]);
        assert_eq!(mode_numbers(5), vec![0, 1, 2, -2, -1]);
        assert!(is_nyquist(2, 4));
        assert!(!is_nyquist(2, 5));
    }

    #[test]
    fn convolution_with_delta_is_identity() {
        let g = Grid::cubic(Domain::torus(1, integer(1)).unwrap(), 8).unwrap();
        let v: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let mut delta = vec![0.0; 8];
        delta[0] = 1.0;
        let out = cyclic_convolve(&g, &v, &delta);
        for (a, b) in v.iter().zip(&out) {
            assert!((a - b).abs() < 1e-12);
        }
        delta[0] = 0.0;
        delta[1] = 1.0;
        let shifted = cyclic_convolve(&g, &v, &delta);
        assert!((shifted[1] - v[0]).abs() < 1e-12);
    }
}
