//! Non-increasing rearrangements of grid functions and the classical
//! inequalities that control convolutions and products through them.
//!
//! The rearrangement `f*` of a grid function is the right-continuous step
//! function obtained by sorting `|values|` in decreasing order and giving
//! each value one cell of measure; equal values merge into one piece. The
//! maximal average `f**(s) = s^{-1} ∫_0^s f*` is then piecewise `a + b/s`
//! and everything downstream (norms, convolution bounds) integrates those
//! pieces in closed form.

use crate::sampled::{neumaier_sum, SampledFunction};
use crate::{Error, Result};

/// A non-increasing right-continuous step function on `[0, ∞)` vanishing
/// beyond its last breakpoint: the rearrangement of some grid function, or
/// an analytically prescribed profile used by the norm modules.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    /// Right endpoints of the constant pieces, strictly ascending, positive.
    breaks: Vec<f64>,
    /// Piece values: `levels[k]` on `[breaks[k-1], breaks[k])`, strictly
    /// decreasing and positive (zeros are dropped, they carry nothing).
    levels: Vec<f64>,
    /// Running `∫_0^{breaks[k]} f*`, same length as `breaks`.
    cum: Vec<f64>,
}

impl Rearrangement {
    /// The rearrangement of the zero function: no pieces.
    pub fn empty() -> Self {
        Rearrangement {
            breaks: Vec::new(),
            levels: Vec::new(),
            cum: Vec::new(),
        }
    }

    /// Build from explicit pieces: `levels[k]` on `[breaks[k-1], breaks[k])`.
    ///
    /// Breaks must be strictly ascending and positive; levels non-negative
    /// and non-increasing. Equal consecutive levels merge, zero levels drop.
    pub fn from_steps(breaks: &[f64], levels: &[f64]) -> Result<Self> {
        if breaks.len() != levels.len() {
            return Err(Error::invalid(
                "levels",
                format!("{} breaks but {} levels", breaks.len(), levels.len()),
            ));
        }
        let mut prev_break = 0.0;
        let mut prev_level = f64::INFINITY;
        for (&b, &v) in breaks.iter().zip(levels) {
            if !(b.is_finite() && b > prev_break) {
                return Err(Error::invalid(
                    "breaks",
                    format!("must be finite, positive, strictly ascending; got {b} after {prev_break}"),
                ));
            }
            if !(v.is_finite() && v >= 0.0 && v <= prev_level) {
                return Err(Error::invalid(
                    "levels",
                    format!("must be finite, non-negative, non-increasing; got {v} after {prev_level}"),
                ));
            }
            prev_break = b;
            prev_level = v;
        }
        let mut out_breaks: Vec<f64> = Vec::with_capacity(breaks.len());
        let mut out_levels: Vec<f64> = Vec::with_capacity(levels.len());
        for (&b, &v) in breaks.iter().zip(levels) {
            if v == 0.0 {
                break;
            }
            if let Some(last) = out_levels.last().copied() {
                if last == v {
                    *out_breaks.last_mut().unwrap() = b;
                    continue;
                }
            }
            out_breaks.push(b);
            out_levels.push(v);
        }
        Ok(Self::finish(out_breaks, out_levels))
    }

    fn finish(breaks: Vec<f64>, levels: Vec<f64>) -> Self {
        let mut cum = Vec::with_capacity(breaks.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (&b, &v) in breaks.iter().zip(&levels) {
            acc += v * (b - prev);
            cum.push(acc);
            prev = b;
        }
        Rearrangement {
            breaks,
            levels,
            cum,
        }
    }

    /// Right endpoints of the constant pieces.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Piece values, strictly decreasing.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Measure of the support of `f*`: the last breakpoint, 0 if empty.
    pub fn total_measure(&self) -> f64 {
        self.breaks.last().copied().unwrap_or(0.0)
    }

    /// `∫_0^∞ f* = ‖f‖_{L^1}` of the underlying function.
    pub fn mass(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    /// Essential supremum, `f*(0)`.
    pub fn sup(&self) -> f64 {
        self.levels.first().copied().unwrap_or(0.0)
    }

    /// `f*(s)`, right-continuous: the level of the piece whose half-open
    /// interval contains `s`; 0 at and beyond the last breakpoint.
    pub fn value(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        match self.breaks.partition_point(|&b| b <= s) {
            k if k < self.levels.len() => self.levels[k],
            _ => 0.0,
        }
    }

    /// `μ_f(λ) = |{ |f| > λ }|` recovered from the rearrangement.
    pub fn distribution(&self, lambda: f64) -> f64 {
        assert!(lambda >= 0.0, "distribution needs λ >= 0");
        // Levels are strictly decreasing: find the last piece with level > λ.
        match self.levels.partition_point(|&v| v > lambda) {
            0 => 0.0,
            k => self.breaks[k - 1],
        }
    }

    /// `∫_0^s f*(τ) dτ`, piecewise linear in `s`, constant beyond support.
    pub fn cum_integral(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        let k = self.breaks.partition_point(|&b| b <= s);
        if k >= self.levels.len() {
            return self.mass();
        }
        let left = if k == 0 { 0.0 } else { self.breaks[k - 1] };
        let base = if k == 0 { 0.0 } else { self.cum[k - 1] };
        base + self.levels[k] * (s - left)
    }

    /// Maximal average `f**(s) = s^{-1} ∫_0^s f*`, defined for `s > 0`;
    /// equals `mass/s` beyond the support.
    pub fn maximal_average(&self, s: f64) -> f64 {
        assert!(s > 0.0, "maximal average needs s > 0, got {s}");
        self.cum_integral(s) / s
    }

    /// The constant pieces as `(s_lo, s_hi, level)` triples.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks.iter().enumerate().map(move |(k, &hi)| {
            let lo = if k == 0 { 0.0 } else { self.breaks[k - 1] };
            (lo, hi, self.levels[k])
        })
    }

    /// On the piece containing `s` (or the region beyond support), the
    /// maximal average is `a + b/s`; returns `(a, b)`.
    pub(crate) fn avg_coefficients(&self, s: f64) -> (f64, f64) {
        let k = self.breaks.partition_point(|&b| b <= s);
        if k >= self.levels.len() {
            return (0.0, self.mass());
        }
        let left = if k == 0 { 0.0 } else { self.breaks[k - 1] };
        let base = if k == 0 { 0.0 } else { self.cum[k - 1] };
        let v = self.levels[k];
        (v, base - v * left)
    }

    /// The rearrangement of `|f|^q`: same pieces, levels raised to `q`.
    pub fn powered(&self, q: f64) -> Rearrangement {
        assert!(q > 0.0 && q.is_finite(), "powered needs q > 0, got {q}");
        Self::finish(
            self.breaks.clone(),
            self.levels.iter().map(|v| v.powf(q)).collect(),
        )
    }

    /// Step minorant of a decreasing profile on `(0, s_max]`: geometric
    /// breakpoints from `s_min` to `s_max` with `pts_per_decade` per decade,
    /// each piece taking the profile's value at its right endpoint. The
    /// leading piece `[0, s_min)` is capped at `profile(s_min)`, so the
    /// result lies below the profile everywhere; refining `s_min` exhibits
    /// any divergence the profile's norm hides below the cutoff.
    pub fn from_profile<F: Fn(f64) -> f64>(
        profile: F,
        s_min: f64,
        s_max: f64,
        pts_per_decade: usize,
    ) -> Result<Self> {
        if !(s_min > 0.0 && s_max > s_min && s_max.is_finite()) {
            return Err(Error::invalid(
                "s_min",
                format!("need 0 < s_min < s_max finite, got [{s_min}, {s_max}]"),
            ));
        }
        if pts_per_decade == 0 {
            return Err(Error::invalid("pts_per_decade", "must be positive"));
        }
        let decades = (s_max / s_min).log10();
        let n = ((pts_per_decade as f64 * decades).ceil() as usize).max(1);
        let ratio = (s_max / s_min).powf(1.0 / n as f64);
        let mut breaks = Vec::with_capacity(n + 1);
        let mut levels = Vec::with_capacity(n + 1);
        for i in 0..=n {
            // Hit the endpoints exactly; geometric in between.
            let b = if i == n {
                s_max
            } else {
                s_min * ratio.powi(i as i32)
            };
            breaks.push(b);
            levels.push(profile(b));
        }
        Self::from_steps(&breaks, &levels)
    }

    /// Write the pieces as CSV with header `s_break,level`: each row is the
    /// right endpoint of a constant piece and the value taken on it.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        use crate::sampled::fmt_f64;
        writeln!(w, "s_break,level")?;
        for (&b, &v) in self.breaks.iter().zip(&self.levels) {
            writeln!(w, "{},{}", fmt_f64(b), fmt_f64(v))?;
        }
        Ok(())
    }
}

/// `μ_f(λ)`: total measure of cells with `|value| > λ`.
pub fn distribution_function(f: &SampledFunction, lambda: f64) -> f64 {
    assert!(lambda >= 0.0, "distribution_function needs λ >= 0");
    let count = f.values.iter().filter(|v| v.abs() > lambda).count();
    count as f64 * f.grid.cell_measure()
}

/// The non-increasing rearrangement of a grid function: `|values|` sorted
/// descending, one cell measure per value, equal values merged.
pub fn rearrange(f: &SampledFunction) -> Rearrangement {
    rearrange_values(f.values.iter().map(|v| v.abs()), f.grid.cell_measure())
}

/// Rearrange an explicit multiset of magnitudes, each occupying `cell`.
pub fn rearrange_values<I: Iterator<Item = f64>>(values: I, cell: f64) -> Rearrangement {
    let mut mags: Vec<f64> = values.filter(|&v| v != 0.0).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut breaks = Vec::with_capacity(mags.len());
    let mut levels: Vec<f64> = Vec::with_capacity(mags.len());
    for (i, &v) in mags.iter().enumerate() {
        let hi = (i + 1) as f64 * cell;
        if levels.last() == Some(&v) {
            *breaks.last_mut().unwrap() = hi;
        } else {
            breaks.push(hi);
            levels.push(v);
        }
    }
    Rearrangement::finish(breaks, levels)
}

/// Outcome of sweeping a two-sided inequality over an `s`-grid.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    /// `(s, lhs, rhs)` rows in sweep order.
    pub rows: Vec<(f64, f64, f64)>,
    /// Max over rows of `lhs - rhs` (positive means violated).
    pub max_violation_abs: f64,
    /// Max over rows of `(lhs - rhs) / rhs` where `rhs > 0`.
    pub max_violation_rel: f64,
}

impl InequalityReport {
    fn from_rows(rows: Vec<(f64, f64, f64)>) -> Self {
        let mut max_abs = f64::NEG_INFINITY;
        let mut max_rel = f64::NEG_INFINITY;
        for &(_, lhs, rhs) in &rows {
            let d = lhs - rhs;
            max_abs = max_abs.max(d);
            if rhs > 0.0 {
                max_rel = max_rel.max(d / rhs);
            } else if lhs > 0.0 {
                max_rel = f64::INFINITY;
            } else {
                max_rel = max_rel.max(0.0);
            }
        }
        InequalityReport {
            rows,
            max_violation_abs: max_abs,
            max_violation_rel: max_rel,
        }
    }
}

/// Convolution bound: verifies `(f∗g)**(s) ≤ ∫_s^∞ f**(τ) g**(τ) dτ` over
/// `s_grid`.
///
/// The convolution is circular on the torus (experiments choose the box so
/// wrap-around mass is negligible); the right-hand side is integrated in
/// closed form piece by piece, so any genuine violation beyond rounding is
/// an implementation bug.
pub fn check_oneil(
    f: &SampledFunction,
    g: &SampledFunction,
    s_grid: &[f64],
) -> Result<InequalityReport> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(
            "check_oneil needs both functions on one grid".into(),
        ));
    }
    let conv = crate::fft::circular_convolution(f, g)?;
    let conv_r = rearrange(&conv);
    let rf = rearrange(f);
    let rg = rearrange(g);
    let tail = DoubleStarTail::new(&rf, &rg);
    let rows = s_grid
        .iter()
        .map(|&s| {
            assert!(s > 0.0, "s grid must be positive");
            (s, conv_r.maximal_average(s), tail.integral_from(s))
        })
        .collect();
    Ok(InequalityReport::from_rows(rows))
}

/// Product bound: verifies `(f1 f2)**(s) ≤ s^{-1} ∫_0^s f1*(τ) f2*(τ) dτ`
/// over `s_grid`. Exact for piecewise-constant representatives, so the
/// violation should be at rounding level.
pub fn check_product(
    f1: &SampledFunction,
    f2: &SampledFunction,
    s_grid: &[f64],
) -> Result<InequalityReport> {
    if f1.grid != f2.grid {
        return Err(Error::GridMismatch(
            "check_product needs both functions on one grid".into(),
        ));
    }
    let prod = f1.product(f2)?;
    let prod_r = rearrange(&prod);
    let r1 = rearrange(f1);
    let r2 = rearrange(f2);
    let cum = StarProductCum::new(&r1, &r2);
    let rows = s_grid
        .iter()
        .map(|&s| {
            assert!(s > 0.0, "s grid must be positive");
            (s, prod_r.maximal_average(s), cum.integral_to(s) / s)
        })
        .collect();
    Ok(InequalityReport::from_rows(rows))
}

/// Closed-form evaluator for `∫_s^∞ f**(τ) g**(τ) dτ`.
///
/// On each merged piece both maximal averages have the form `a + b/τ`, so
/// each piece integrates to `A Δτ + B log + C (1/lo - 1/hi)` exactly; the
/// region beyond both supports contributes `mass_f · mass_g / s`.
struct DoubleStarTail {
    /// Merged breakpoints, ascending; pieces are `[B[j], B[j+1]]`.
    breaks: Vec<f64>,
    /// Per piece: `(a_f, b_f, a_g, b_g)`.
    coeffs: Vec<(f64, f64, f64, f64)>,
    /// `suffix[j] = ∫_{B[j]}^∞`, including the tail beyond the last break.
    suffix: Vec<f64>,
    mass_product: f64,
}

impl DoubleStarTail {
    fn new(rf: &Rearrangement, rg: &Rearrangement) -> Self {
        let mut breaks: Vec<f64> = Vec::with_capacity(rf.breaks.len() + rg.breaks.len() + 1);
        breaks.push(0.0);
        breaks.extend_from_slice(&rf.breaks);
        breaks.extend_from_slice(&rg.breaks);
        breaks.sort_unstable_by(f64::total_cmp);
        breaks.dedup();
        let mass_product = rf.mass() * rg.mass();
        let n = breaks.len().saturating_sub(1);
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            let probe = breaks[j];
            let (af, bf) = rf.avg_coefficients(probe);
            let (ag, bg) = rg.avg_coefficients(probe);
            coeffs.push((af, bf, ag, bg));
        }
        let last = breaks.last().copied().unwrap_or(0.0);
        let tail = if last > 0.0 { mass_product / last } else { 0.0 };
        let mut suffix = vec![0.0; n + 1];
        suffix[n] = tail;
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] + piece_integral(coeffs[j], breaks[j], breaks[j + 1]);
        }
        DoubleStarTail {
            breaks,
            coeffs,
            suffix,
            mass_product,
        }
    }

    fn integral_from(&self, s: f64) -> f64 {
        let last = self.breaks.last().copied().unwrap_or(0.0);
        if s >= last {
            return if s > 0.0 { self.mass_product / s } else { 0.0 };
        }
        // First piece index with right endpoint > s.
        let j = self.breaks.partition_point(|&b| b <= s).min(self.coeffs.len());
        let j = j.saturating_sub(if self.breaks[0] == 0.0 { 1 } else { 0 });
        // `breaks[j] <= s < breaks[j+1]`.
        piece_integral(self.coeffs[j], s.max(self.breaks[j]), self.breaks[j + 1])
            + self.suffix[j + 1]
    }
}

/// `∫_lo^hi (a_f + b_f/τ)(a_g + b_g/τ) dτ` in closed form.
fn piece_integral((af, bf, ag, bg): (f64, f64, f64, f64), lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let aa = af * ag;
    let ab = af * bg + ag * bf;
    let bb = bf * bg;
    let mut total = aa * (hi - lo);
    if ab != 0.0 {
        total += ab * (hi / lo).ln();
    }
    if bb != 0.0 {
        total += bb * (1.0 / lo - 1.0 / hi);
    }
    total
}

/// Exact evaluator for `∫_0^s f1*(τ) f2*(τ) dτ` (product of two step
/// functions: piecewise constant, prefix sums at merged breakpoints).
struct StarProductCum {
    breaks: Vec<f64>,
    prefix: Vec<f64>,
    levels: Vec<f64>,
}

impl StarProductCum {
    fn new(r1: &Rearrangement, r2: &Rearrangement) -> Self {
        let mut breaks: Vec<f64> = r1
            .breaks
            .iter()
            .chain(r2.breaks.iter())
            .copied()
            .collect();
        breaks.sort_unstable_by(f64::total_cmp);
        breaks.dedup();
        let mut prefix = Vec::with_capacity(breaks.len());
        let mut levels = Vec::with_capacity(breaks.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &b in &breaks {
            let level = r1.value(prev) * r2.value(prev);
            acc += level * (b - prev);
            levels.push(level);
            prefix.push(acc);
            prev = b;
        }
        StarProductCum {
            breaks,
            prefix,
            levels,
        }
    }

    fn integral_to(&self, s: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b <= s);
        if k >= self.breaks.len() {
            return self.prefix.last().copied().unwrap_or(0.0);
        }
        let left = if k == 0 { 0.0 } else { self.breaks[k - 1] };
        let base = if k == 0 { 0.0 } else { self.prefix[k - 1] };
        base + self.levels[k] * (s - left)
    }
}

/// Total `∫ |f|^q` computed from the rearrangement, for the mass identity
/// `∫ |f|^q dx = ∫_0^∞ (f*)^q ds`.
pub fn q_mass(r: &Rearrangement, q: f64) -> f64 {
    assert!(q > 0.0 && q.is_finite());
    neumaier_sum(r.segments().map(|(lo, hi, v)| v.powf(q) * (hi - lo)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid1(l: f64, m: usize) -> GridSpec {
        GridSpec::new(1, l, m).unwrap()
    }

    fn ball_indicator(g: GridSpec, r: f64) -> SampledFunction {
        SampledFunction::sample_1d(g, |x| if x.abs() < r { 1.0 } else { 0.0 }).unwrap()
    }

    fn random_nonneg(g: GridSpec, seed: u64) -> SampledFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..g.len()).map(|_| rng.random::<f64>()).collect();
        SampledFunction::from_values(g, values).unwrap()
    }

    #[test]
    fn indicator_rearranges_to_interval() {
        // (χ_E)* = χ_{[0,|E|)} exactly for a cell-aligned set.
        let g = grid1(8.0, 256);
        let f = ball_indicator(g, 1.0);
        let r = rearrange(&f);
        assert_eq!(r.levels(), &[1.0]);
        assert_eq!(r.breaks(), &[2.0]);
        assert_eq!(r.value(0.0), 1.0);
        assert_eq!(r.value(1.999), 1.0);
        assert_eq!(r.value(2.0), 0.0);
    }

    #[test]
    fn distribution_function_layers() {
        let g = grid1(8.0, 256);
        let f = SampledFunction::sample_1d(g, |x| {
            if x.abs() < 1.0 {
                2.0
            } else if x.abs() < 2.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(distribution_function(&f, 0.0), 4.0);
        assert_eq!(distribution_function(&f, 1.0), 2.0);
        assert_eq!(distribution_function(&f, 2.5), 0.0);
        // Consistency with the rearrangement's inverse view.
        let r = rearrange(&f);
        assert_eq!(r.distribution(0.0), 4.0);
        assert_eq!(r.distribution(1.0), 2.0);
        assert_eq!(r.distribution(2.5), 0.0);
    }

    #[test]
    fn scaling_and_power_commute_with_rearrangement() {
        let g = grid1(8.0, 256);
        let f = random_nonneg(g, 7);
        let r = rearrange(&f);
        // (3f)* = 3 f*.
        let r3 = rearrange(&f.map(|v| 3.0 * v));
        for (a, b) in r3.levels().iter().zip(r.levels()) {
            assert!((a - 3.0 * b).abs() <= 1e-15 * a.abs());
        }
        assert_eq!(r3.breaks(), r.breaks());
        // (|f|^q)* = (f*)^q with identical breakpoints.
        let q = 2.5;
        let rq = rearrange(&f.map(|v| v.abs().powf(q)));
        assert_eq!(rq.breaks(), r.breaks());
        for (a, b) in rq.levels().iter().zip(r.levels()) {
            assert!((a - b.powf(q)).abs() <= 1e-14 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn sup_and_mass_identities() {
        let g = grid1(8.0, 256);
        for seed in 0..20 {
            let f = random_nonneg(g, seed);
            let r = rearrange(&f);
            // f*(0) = ‖f‖_∞.
            assert_eq!(r.sup(), f.lp_norm(f64::INFINITY));
            // ∫ |f|^q dx = ∫ (f*)^q ds for the exponents the solver uses.
            for q in [1.0, 2.0, 3.0] {
                let lhs = f.lp_norm(q).powf(q);
                let rhs = q_mass(&r, q);
                assert!(
                    ((lhs - rhs) / lhs.max(1e-300)).abs() < 1e-12,
                    "q={q}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn maximal_average_of_indicator() {
        let g = grid1(8.0, 256);
        let f = ball_indicator(g, 1.0); // |E| = 2
        let r = rearrange(&f);
        assert!((r.maximal_average(1.0) - 1.0).abs() < 1e-15);
        assert!((r.maximal_average(2.0) - 1.0).abs() < 1e-15);
        // Beyond the support the average decays like mass/s.
        assert!((r.maximal_average(4.0) - 0.5).abs() < 1e-15);
        assert!((r.maximal_average(8.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn maximal_average_dominates_and_s_fss_is_monotone() {
        let g = grid1(8.0, 256);
        let f = random_nonneg(g, 11);
        let r = rearrange(&f);
        let mut prev_s_avg = 0.0;
        for k in 1..400 {
            let s = 16.0 * k as f64 / 400.0;
            let avg = r.maximal_average(s);
            assert!(
                avg >= r.value(s) - 1e-12,
                "f** >= f* fails at s={s}: {avg} < {}",
                r.value(s)
            );
            let s_avg = s * avg;
            assert!(
                s_avg + 1e-12 >= prev_s_avg,
                "s f**(s) must be non-decreasing"
            );
            prev_s_avg = s_avg;
        }
    }

    #[test]
    fn largest_average_over_sets_matches_fss() {
        // f**(s) equals the best mean of |f| over sets of measure s; for a
        // step function the best set is the top cells, so compare directly.
        let g = grid1(8.0, 256);
        let f = random_nonneg(g, 3);
        let r = rearrange(&f);
        let h = g.cell_measure();
        let mut sorted: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        let k = 37;
        let s = k as f64 * h;
        let best: f64 = sorted[..k].iter().sum::<f64>() * h / s;
        assert!(((r.maximal_average(s) - best) / best).abs() < 1e-13);
    }

    #[test]
    fn from_steps_validates_and_merges() {
        assert!(Rearrangement::from_steps(&[1.0, 0.5], &[2.0, 1.0]).is_err());
        assert!(Rearrangement::from_steps(&[0.5, 1.0], &[1.0, 2.0]).is_err());
        let r = Rearrangement::from_steps(&[0.5, 1.0, 2.0], &[2.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.levels(), &[2.0, 1.0]);
        assert_eq!(r.breaks(), &[1.0, 2.0]);
        assert!((r.mass() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_bound_on_cell_aligned_set() {
        // (fχ_E)**(s) ≤ s^{-1} ∫_0^{min(s,|E|)} (fχ_E)*.
        let g = grid1(8.0, 256);
        let f = random_nonneg(g, 19);
        let e = ball_indicator(g, 1.5);
        let fe = f.product(&e).unwrap();
        let r = rearrange(&fe);
        let e_measure = 3.0;
        for k in 1..100 {
            let s = 10.0 * k as f64 / 100.0;
            let lhs = r.maximal_average(s);
            let rhs = r.cum_integral(s.min(e_measure)) / s;
            assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15, "s={s}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn oneil_indicator_pair_has_no_violation() {
        let g = grid1(8.0, 256);
        let f = ball_indicator(g, 1.0);
        let s_grid: Vec<f64> = (0..48).map(|k| 1e-2 * 1.25f64.powi(k)).collect();
        let rep = check_oneil(&f, &f, &s_grid).unwrap();
        assert!(
            rep.max_violation_rel <= 1e-10,
            "violation {}",
            rep.max_violation_rel
        );
        // Spot-check the right-hand side against direct quadrature.
        let rf = rearrange(&f);
        let tail = DoubleStarTail::new(&rf, &rf);
        for &s in &[0.5, 2.0, 5.0] {
            let oracle = crate::quad::integrate_to_infinity(
                &|t: f64| rf.maximal_average(t) * rf.maximal_average(t),
                s,
                1e-12,
            );
            let got = tail.integral_from(s);
            assert!(
                ((got - oracle) / oracle).abs() < 1e-9,
                "s={s}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn oneil_random_pairs_hold() {
        let g = grid1(8.0, 256);
        let s_grid: Vec<f64> = (0..32).map(|k| 2e-2 * 1.3f64.powi(k)).collect();
        for seed in 0..20 {
            let f = random_nonneg(g, 100 + seed);
            let h = random_nonneg(g, 200 + seed);
            let rep = check_oneil(&f, &h, &s_grid).unwrap();
            assert!(
                rep.max_violation_rel <= 1e-8,
                "seed {seed}: violation {}",
                rep.max_violation_rel
            );
        }
    }

    #[test]
    fn product_bound_is_exact_for_steps() {
        let g = grid1(8.0, 256);
        let s_grid: Vec<f64> = (0..32).map(|k| 2e-2 * 1.3f64.powi(k)).collect();
        for seed in 0..10 {
            let f = random_nonneg(g, 300 + seed);
            let h = random_nonneg(g, 400 + seed);
            let rep = check_product(&f, &h, &s_grid).unwrap();
            assert!(
                rep.max_violation_rel <= 1e-12,
                "seed {seed}: violation {}",
                rep.max_violation_rel
            );
        }
        // f2 ≡ 1 degenerates to the tautology (f)** ≤ (f)**.
        let f = random_nonneg(g, 5);
        let one = SampledFunction::sample_1d(g, |_| 1.0).unwrap();
        let rep = check_product(&f, &one, &s_grid).unwrap();
        assert!(rep.max_violation_abs.abs() <= 1e-12);
    }

    #[test]
    fn powered_matches_pointwise_power() {
        let g = grid1(8.0, 256);
        let f = random_nonneg(g, 41);
        let q = 1.7;
        let via_values = rearrange(&f.map(|v| v.abs().powf(q)));
        let via_levels = rearrange(&f).powered(q);
        assert_eq!(via_values.breaks(), via_levels.breaks());
        for (a, b) in via_values.levels().iter().zip(via_levels.levels()) {
            assert!((a - b).abs() <= 1e-15 * a.max(1e-300));
        }
    }

    #[test]
    fn profile_steps_minorize_the_profile() {
        // 1/sqrt(s) on (0, 1]: mass 2; the right-endpoint steps sit below.
        let r = Rearrangement::from_profile(|s| 1.0 / s.sqrt(), 1e-6, 1.0, 32).unwrap();
        assert_eq!(r.total_measure(), 1.0);
        for k in 1..200 {
            let s = k as f64 / 200.0;
            assert!(r.value(s) <= 1.0 / s.sqrt() + 1e-12);
        }
        assert!(r.mass() < 2.0 && r.mass() > 2.0 * 0.95, "mass {}", r.mass());
        // Refining the cutoff only adds mass.
        let finer = Rearrangement::from_profile(|s| 1.0 / s.sqrt(), 1e-8, 1.0, 32).unwrap();
        assert!(finer.mass() > r.mass());
        // Increasing profiles cannot be rearrangements.
        assert!(Rearrangement::from_profile(|s| s, 0.1, 1.0, 8).is_err());
    }

    #[test]
    fn rearrangement_ignores_translation_and_shuffle() {
        let g = grid1(8.0, 256);
        let f = random_nonneg(g, 23);
        let mut shuffled = f.values.clone();
        // Deterministic shuffle: reverse then swap strided pairs.
        shuffled.reverse();
        shuffled.swap(3, 77);
        shuffled.swap(10, 200);
        let fs = SampledFunction::from_values(g, shuffled).unwrap();
        assert_eq!(rearrange(&f), rearrange(&fs));
    }
}
