//! Crate-internal FFT plumbing: forward/inverse transforms on grid data,
//! radial Fourier multipliers, and periodic convolution.
//!
//! Samples live at cell centers of `[-L, L]^n`, so the discrete modes are
//! `exp(i ξ·x)` with `ξ = (π/L) k̃` per axis and `k̃ = k` for `k < M/2`,
//! `k - M` otherwise. Real radial multipliers are insensitive to the
//! center-offset phase, which is why the semigroup and convolution code can
//! work directly on the unshifted DFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::sampled::{GridSpec, SampledFunction};
use crate::{Error, Result};

/// `|ξ|` for every flat grid index, in the same layout as sample values.
pub(crate) fn xi_magnitudes(grid: GridSpec) -> Vec<f64> {
    let m = grid.points_per_axis;
    let base = std::f64::consts::PI / grid.half_width;
    let axis: Vec<f64> = (0..m)
        .map(|k| {
            let signed = if k < m / 2 {
                k as f64
            } else {
                k as f64 - m as f64
            };
            base * signed
        })
        .collect();
    match grid.dim {
        1 => axis.iter().map(|x| x.abs()).collect(),
        _ => {
            let mut out = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    out.push(axis[i].hypot(axis[j]));
                }
            }
            out
        }
    }
}

fn transpose(data: &mut [Complex<f64>], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

fn transform(grid: GridSpec, data: &mut [Complex<f64>], inverse: bool) {
    debug_assert_eq!(data.len(), grid.len());
    let m = grid.points_per_axis;
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    // rustfft transforms each consecutive length-m chunk, i.e. every row.
    fft.process(data);
    if grid.dim == 2 {
        transpose(data, m);
        fft.process(data);
        transpose(data, m);
    }
}

/// Unnormalized forward DFT of the sample values.
pub(crate) fn forward(f: &SampledFunction) -> Vec<Complex<f64>> {
    let mut data: Vec<Complex<f64>> = f.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    transform(f.grid, &mut data, false);
    data
}

/// Inverse DFT with `1/len` normalization, keeping the real part.
pub(crate) fn inverse_real(grid: GridSpec, mut spectrum: Vec<Complex<f64>>) -> Vec<f64> {
    transform(grid, &mut spectrum, true);
    let scale = 1.0 / grid.len() as f64;
    spectrum.iter().map(|c| c.re * scale).collect()
}

/// Multiply a spectrum entrywise by precomputed real multipliers.
pub(crate) fn apply_multipliers(spectrum: &mut [Complex<f64>], multipliers: &[f64]) {
    debug_assert_eq!(spectrum.len(), multipliers.len());
    for (c, &m) in spectrum.iter_mut().zip(multipliers) {
        *c *= m;
    }
}

/// Periodic convolution `(f ⊛ g)(x) = ∫_box f(y) g(x - y) dy` of the
/// piecewise-constant representatives, via FFT: pointwise spectral product
/// scaled by the cell measure.
pub(crate) fn circular_convolution(
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(
            "convolution needs both functions on one grid".into(),
        ));
    }
    let mut ff = forward(f);
    let gg = forward(g);
    for (a, b) in ff.iter_mut().zip(&gg) {
        *a *= b;
    }
    let cell = f.grid.cell_measure();
    let values = inverse_real(f.grid, ff)
        .into_iter()
        .map(|v| v * cell)
        .collect();
    SampledFunction::from_values(f.grid, values)
}
