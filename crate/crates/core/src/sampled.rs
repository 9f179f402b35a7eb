//! Uniform periodic grids and the grid functions built on them.
//!
//! A grid covers the box `[-L, L]^n` (n = 1 or 2) with `M` cells per axis,
//! sampling at cell centers. Grid functions are interpreted as piecewise
//! constant on the cells: integrals are cell sums, rearrangements assign one
//! cell measure to each value, and the spectral transforms in
//! [`crate::kernel`] act on the same samples.

use crate::{Error, Result};

/// Geometry of a uniform periodic grid on `[-half_width, half_width]^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Spatial dimension, 1 or 2.
    pub dim: usize,
    /// Half the box edge, `L` in `[-L, L]^dim`.
    pub half_width: f64,
    /// Cells per axis; a power of two so FFT lengths stay friendly.
    pub points_per_axis: usize,
}

impl GridSpec {
    /// Build a grid, validating dimension, box size, and cell count.
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid("dim", format!("must be 1 or 2, got {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(
                "half_width",
                format!("must be positive and finite, got {half_width}"),
            ));
        }
        let m = points_per_axis;
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::invalid(
                "points_per_axis",
                format!("must be a power of two >= 8, got {m}"),
            ));
        }
        Ok(GridSpec {
            dim,
            half_width,
            points_per_axis,
        })
    }

    /// Cell edge length `2L / M`.
    #[inline]
    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Lebesgue measure of one cell, `h^dim`.
    #[inline]
    pub fn cell_measure(&self) -> f64 {
        let h = self.cell_width();
        match self.dim {
            1 => h,
            _ => h * h,
        }
    }

    /// Total number of cells.
    #[inline]
    pub fn len(&self) -> usize {
        match self.dim {
            1 => self.points_per_axis,
            _ => self.points_per_axis * self.points_per_axis,
        }
    }

    /// Whether the grid has no cells (never true for a validated grid).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Measure of the whole box, `(2L)^dim`.
    #[inline]
    pub fn box_measure(&self) -> f64 {
        self.cell_measure() * self.len() as f64
    }

    /// Center coordinate of cell `i` along one axis.
    #[inline]
    pub fn axis_center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.cell_width()
    }

    /// Closed interval `[lo, hi]` spanned by cell `i` along one axis.
    #[inline]
    pub fn axis_bounds(&self, i: usize) -> (f64, f64) {
        let h = self.cell_width();
        let lo = -self.half_width + i as f64 * h;
        (lo, lo + h)
    }

    /// Coordinates of the center of flat cell `idx` (row-major in 2-D).
    pub fn center(&self, idx: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.axis_center(idx), 0.0],
            _ => {
                let m = self.points_per_axis;
                [self.axis_center(idx / m), self.axis_center(idx % m)]
            }
        }
    }

    /// Flat indices of all cells whose closure contains the origin.
    ///
    /// With an even number of cells the origin sits on a cell boundary, so
    /// this is two cells in 1-D and four in 2-D. Singular profiles assign
    /// these cells their exact cell average instead of a center sample.
    pub fn origin_adjacent_cells(&self) -> Vec<usize> {
        let m = self.points_per_axis;
        let lo = m / 2 - 1;
        let hi = m / 2;
        match self.dim {
            1 => vec![lo, hi],
            _ => vec![lo * m + lo, lo * m + hi, hi * m + lo, hi * m + hi],
        }
    }
}

/// A grid function: one `f64` per cell, row-major in 2-D, understood as the
/// piecewise-constant function taking `values[i]` on cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    /// The grid the samples live on.
    pub grid: GridSpec,
    /// Cell values, `grid.len()` of them.
    pub values: Vec<f64>,
}

impl SampledFunction {
    /// Wrap an existing value vector, checking length and finiteness.
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} cells, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let c = grid.center(i);
            return Err(Error::NonFinite(format!(
                "sample at cell {i} (center {:?}) is {}",
                &c[..grid.dim],
                values[i]
            )));
        }
        Ok(SampledFunction { grid, values })
    }

    /// The zero function on `grid`.
    pub fn zeros(grid: GridSpec) -> Self {
        SampledFunction {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Sample a pointwise map at all cell centers.
    ///
    /// The closure receives the center coordinates; in 1-D the second entry
    /// is zero. Non-finite samples are rejected with the offending node.
    pub fn sample<F: Fn(&[f64]) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let dim = grid.dim;
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let c = grid.center(i);
            let v = f(&c[..dim]);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "sample at cell {i} (center {:?}) is {v}",
                    &c[..dim]
                )));
            }
            values.push(v);
        }
        Ok(SampledFunction { grid, values })
    }

    /// Convenience wrapper for 1-D profiles.
    pub fn sample_1d<F: Fn(f64) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        if grid.dim != 1 {
            return Err(Error::invalid("grid", "sample_1d needs a 1-D grid"));
        }
        Self::sample(grid, |x| f(x[0]))
    }

    /// `∫ f dx` over the box: cell measure times the compensated sum of
    /// values. Exact for the piecewise-constant representative.
    pub fn integral(&self) -> f64 {
        self.grid.cell_measure() * neumaier_sum(self.values.iter().copied())
    }

    /// `L^q` norm of the piecewise-constant representative; `q = ∞` gives
    /// the maximum absolute value.
    pub fn lp_norm(&self, q: f64) -> f64 {
        assert!(q >= 1.0, "lp_norm needs q >= 1, got {q}");
        if q.is_infinite() {
            return self.values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        let sum = neumaier_sum(self.values.iter().map(|v| v.abs().powf(q)));
        (self.grid.cell_measure() * sum).powf(1.0 / q)
    }

    /// Pointwise combination `self + c * other` on a shared grid.
    pub fn axpy(&self, c: f64, other: &SampledFunction) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        SampledFunction::from_values(self.grid, values)
    }

    /// Pointwise product on a shared grid.
    pub fn product(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        SampledFunction::from_values(self.grid, values)
    }

    /// Map every value through `f` (no grid change).
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `|u|^{p-1} u`, the odd power nonlinearity. `p >= 1`.
    pub fn signed_power(&self, p: f64) -> SampledFunction {
        assert!(p >= 1.0, "signed_power needs p >= 1, got {p}");
        self.map(|v| v.abs().powf(p - 1.0) * v)
    }

    /// Values on cells whose centers lie in the closed Euclidean ball
    /// `B(center, radius)`, in grid order. Zero-valued cells are skipped:
    /// they carry no mass in any rearrangement-based norm.
    pub fn values_in_ball(&self, center: &[f64], radius: f64) -> Vec<f64> {
        let g = &self.grid;
        let m = g.points_per_axis;
        let mut out = Vec::new();
        match g.dim {
            1 => {
                let z = center[0];
                let (lo, hi) = axis_range(g, z, radius);
                for i in lo..hi {
                    let v = self.values[i];
                    if v != 0.0 && (g.axis_center(i) - z).abs() <= radius {
                        out.push(v);
                    }
                }
            }
            _ => {
                let (z1, z2) = (center[0], center[1]);
                let (ilo, ihi) = axis_range(g, z1, radius);
                for i in ilo..ihi {
                    let dx = g.axis_center(i) - z1;
                    let rem = radius * radius - dx * dx;
                    if rem < 0.0 {
                        continue;
                    }
                    let half = rem.sqrt();
                    let (jlo, jhi) = axis_range(g, z2, half);
                    for j in jlo..jhi {
                        let v = self.values[i * m + j];
                        let dy = g.axis_center(j) - z2;
                        if v != 0.0 && dx * dx + dy * dy <= radius * radius {
                            out.push(v);
                        }
                    }
                }
            }
        }
        out
    }

    /// Bounding box `[lo, hi]` per axis of the cells with nonzero value, or
    /// `None` for the zero function.
    pub fn support_bbox(&self) -> Option<Vec<(f64, f64)>> {
        let g = &self.grid;
        let m = g.points_per_axis;
        match g.dim {
            1 => {
                let first = self.values.iter().position(|&v| v != 0.0)?;
                let last = self.values.iter().rposition(|&v| v != 0.0).unwrap();
                Some(vec![(g.axis_center(first), g.axis_center(last))])
            }
            _ => {
                let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
                for (idx, &v) in self.values.iter().enumerate() {
                    if v != 0.0 {
                        let (i, j) = (idx / m, idx % m);
                        i0 = i0.min(i);
                        i1 = i1.max(i);
                        j0 = j0.min(j);
                        j1 = j1.max(j);
                    }
                }
                if i0 == usize::MAX {
                    return None;
                }
                Some(vec![
                    (g.axis_center(i0), g.axis_center(i1)),
                    (g.axis_center(j0), g.axis_center(j1)),
                ])
            }
        }
    }

    /// Write the samples as CSV: header `x1[,x2],value`, one row per cell in
    /// grid order, coordinates and values at full precision.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        let dim = self.grid.dim;
        if dim == 1 {
            writeln!(w, "x1,value")?;
        } else {
            writeln!(w, "x1,x2,value")?;
        }
        for (i, &v) in self.values.iter().enumerate() {
            let c = self.grid.center(i);
            if dim == 1 {
                writeln!(w, "{},{}", fmt_f64(c[0]), fmt_f64(v))?;
            } else {
                writeln!(w, "{},{},{}", fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(v))?;
            }
        }
        Ok(())
    }

    fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }
}

/// Half-open index range of axis cells whose centers may lie within
/// `radius` of `z` (a superset; callers re-check the exact distance).
fn axis_range(g: &GridSpec, z: f64, radius: f64) -> (usize, usize) {
    let h = g.cell_width();
    let m = g.points_per_axis as f64;
    let lo = ((z - radius + g.half_width) / h - 0.5).floor().max(0.0);
    let hi = ((z + radius + g.half_width) / h + 1.5).ceil().min(m);
    if hi <= lo {
        return (0, 0);
    }
    (lo as usize, hi as usize)
}

/// Compensated (Neumaier) summation: exact reordering-insensitive sums for
/// the mass identities the rearrangement module asserts at `1e-12`.
pub fn neumaier_sum<I: Iterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in iter {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Format a float with 17 significant digits, enough to round-trip `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
