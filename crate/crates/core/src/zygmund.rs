//! Four families of logarithmically refined rearrangement norms, their
//! uniformly local variants, and the algebra (Hölder, power identity, log
//! interpolation) connecting them.
//!
//! With `w(s) = log(e + 1/s)` and `f*` the non-increasing rearrangement:
//!
//! * `frak`:        `sup_{s>0} { w(s)^α ∫_0^s f*(τ)^q dτ }^{1/q}`
//! * `zygmund`:     `{ ∫_0^∞ w(s)^α f*(s)^q ds }^{1/q}`
//! * `weak`:        `sup_{s>0} { w(s)^α s f*(s)^q }^{1/q}`
//! * `doublestar`:  `sup_{s>0} { w(s)^α s f**(s)^q }^{1/q}`
//!
//! `q = ∞` collapses every family to the essential supremum. The suprema
//! are evaluated over all rearrangement breakpoints, a geometric refinement
//! grid, and per-segment golden-section maxima; the Zygmund integral is
//! done segment by segment with adaptive quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::quad::{adaptive_gk, golden_max, integrate_left_singular};
use crate::rearrange::{rearrange, rearrange_values, Rearrangement};
use crate::sampled::{GridSpec, SampledFunction};
use crate::{log_weight, Error, Result};

/// Which of the four norm families to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFamily {
    FrakWeak,
    Zygmund,
    WeakZygmund,
    DoublestarWeak,
}

impl NormFamily {
    /// Stable lowercase label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            NormFamily::FrakWeak => "frak",
            NormFamily::Zygmund => "zygmund",
            NormFamily::WeakZygmund => "weak_zygmund",
            NormFamily::DoublestarWeak => "doublestar",
        }
    }
}

impl std::str::FromStr for NormFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frak" => Ok(NormFamily::FrakWeak),
            "zygmund" => Ok(NormFamily::Zygmund),
            "weak_zygmund" | "weak" => Ok(NormFamily::WeakZygmund),
            "doublestar" => Ok(NormFamily::DoublestarWeak),
            other => Err(Error::invalid(
                "family",
                format!("unknown norm family {other:?} (frak|zygmund|weak_zygmund|doublestar)"),
            )),
        }
    }
}

/// A fully specified norm: family, integrability index `q` (∞ allowed),
/// logarithmic exponent `α ≥ 0`, and an optional ball radius activating the
/// uniformly local variant (frak family only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub family: NormFamily,
    pub q: f64,
    pub alpha: f64,
    pub rho: Option<f64>,
}

impl NormSpec {
    pub fn new(family: NormFamily, q: f64, alpha: f64, rho: Option<f64>) -> Result<Self> {
        validate_indices(q, alpha)?;
        if let Some(r) = rho {
            if family != NormFamily::FrakWeak {
                return Err(Error::invalid(
                    "rho",
                    "the uniformly local variant exists only for the frak family",
                ));
            }
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("rho", format!("must be positive, got {r}")));
            }
        }
        Ok(NormSpec {
            family,
            q,
            alpha,
            rho,
        })
    }

    /// Evaluate this norm on a grid function.
    pub fn evaluate(&self, f: &SampledFunction) -> Result<f64> {
        match (self.family, self.rho) {
            (NormFamily::FrakWeak, Some(rho)) => ul_frak_norm(f, self.q, self.alpha, rho),
            (NormFamily::FrakWeak, None) => frak_norm(f, self.q, self.alpha),
            (NormFamily::Zygmund, _) => zygmund_norm(f, self.q, self.alpha),
            (NormFamily::WeakZygmund, _) => weak_zygmund_norm(f, self.q, self.alpha),
            (NormFamily::DoublestarWeak, _) => doublestar_norm(f, self.q, self.alpha),
        }
    }
}

/// The weight `s ↦ [log(e + 1/s)]^α`.
#[derive(Debug, Clone, Copy)]
pub struct LogWeight {
    pub alpha: f64,
}

impl LogWeight {
    pub fn eval(&self, s: f64) -> f64 {
        log_weight(s).powf(self.alpha)
    }
}

fn validate_indices(q: f64, alpha: f64) -> Result<()> {
    if !(q >= 1.0) {
        return Err(Error::invalid("q", format!("must be >= 1, got {q}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(
            "alpha",
            format!("must be finite and >= 0, got {alpha}"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Norms on grid functions (spec'd entry points).
// ---------------------------------------------------------------------------

/// `sup_{s>0} { w(s)^α ∫_0^s f*(τ)^q dτ }^{1/q}`; essential sup for q = ∞.
pub fn frak_norm(f: &SampledFunction, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(f.lp_norm(f64::INFINITY));
    }
    Ok(frak_value(&rearrange(f), q, alpha))
}

/// `{ ∫_0^∞ w(s)^α f*(s)^q ds }^{1/q}`; essential sup for q = ∞.
pub fn zygmund_norm(f: &SampledFunction, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(f.lp_norm(f64::INFINITY));
    }
    Ok(zygmund_value(&rearrange(f), q, alpha))
}

/// `sup_{s>0} { w(s)^α s f*(s)^q }^{1/q}`; essential sup for q = ∞.
pub fn weak_zygmund_norm(f: &SampledFunction, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(f.lp_norm(f64::INFINITY));
    }
    Ok(weak_value(&rearrange(f), q, alpha))
}

/// `sup_{s>0} { w(s)^α s f**(s)^q }^{1/q}`; essential sup for q = ∞.
pub fn doublestar_norm(f: &SampledFunction, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(f.lp_norm(f64::INFINITY));
    }
    Ok(doublestar_value(&rearrange(f), q, alpha))
}

/// Uniformly local frak norm: `sup_z ‖f·χ_{B(z,ρ)}‖` over a lattice of
/// centers of spacing `ρ/2` covering the support bounding box inflated by
/// `ρ`.
pub fn ul_frak_norm(f: &SampledFunction, q: f64, alpha: f64, rho: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", format!("must be positive, got {rho}")));
    }
    if q.is_infinite() {
        // Every nonzero cell lies in some ball, so this is the global sup.
        return Ok(f.lp_norm(f64::INFINITY));
    }
    let centers = match ball_centers(f, rho) {
        Some(c) => c,
        None => return Ok(0.0),
    };
    let cell = f.grid.cell_measure();
    let best = centers
        .par_iter()
        .map(|z| {
            let vals = f.values_in_ball(z, rho);
            let r = rearrange_values(vals.into_iter().map(f64::abs), cell);
            frak_value(&r, q, alpha)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Ball-center lattice: spacing `ρ/2`, covering the support bounding box
/// inflated by `ρ` per axis. `None` for the zero function.
fn ball_centers(f: &SampledFunction, rho: f64) -> Option<Vec<[f64; 2]>> {
    let bbox = f.support_bbox()?;
    let step = rho / 2.0;
    let axis_points = |lo: f64, hi: f64| -> Vec<f64> {
        let start = lo - rho;
        let end = hi + rho;
        let count = ((end - start) / step).ceil() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    };
    let xs = axis_points(bbox[0].0, bbox[0].1);
    match f.grid.dim {
        1 => Some(xs.into_iter().map(|x| [x, 0.0]).collect()),
        _ => {
            let ys = axis_points(bbox[1].0, bbox[1].1);
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    out.push([x, y]);
                }
            }
            Some(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Norms on rearrangements (analytic profiles enter here).
// ---------------------------------------------------------------------------

/// [`frak_norm`] evaluated directly on a rearrangement.
pub fn frak_norm_of(r: &Rearrangement, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(r.sup());
    }
    Ok(frak_value(r, q, alpha))
}

/// [`zygmund_norm`] evaluated directly on a rearrangement.
pub fn zygmund_norm_of(r: &Rearrangement, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(r.sup());
    }
    Ok(zygmund_value(r, q, alpha))
}

/// [`weak_zygmund_norm`] evaluated directly on a rearrangement.
pub fn weak_zygmund_norm_of(r: &Rearrangement, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(r.sup());
    }
    Ok(weak_value(r, q, alpha))
}

/// [`doublestar_norm`] evaluated directly on a rearrangement.
pub fn doublestar_norm_of(r: &Rearrangement, q: f64, alpha: f64) -> Result<f64> {
    validate_indices(q, alpha)?;
    if q.is_infinite() {
        return Ok(r.sup());
    }
    Ok(doublestar_value(r, q, alpha))
}

// ---------------------------------------------------------------------------
// Internal evaluators (indices already validated, q finite).
// ---------------------------------------------------------------------------

fn frak_value(r: &Rearrangement, q: f64, alpha: f64) -> f64 {
    let prof = r.powered(q);
    let phi = |s: f64| log_weight(s).powf(alpha) * prof.cum_integral(s);
    sup_piecewise(&prof, |_k, s| phi(s), &phi).powf(1.0 / q)
}

fn weak_value(r: &Rearrangement, q: f64, alpha: f64) -> f64 {
    let prof = r.powered(q);
    let levels: Vec<f64> = prof.levels().to_vec();
    let seg = move |k: usize, s: f64| log_weight(s).powf(alpha) * s * levels[k];
    // Right-continuous global version for the refinement grid; it never
    // exceeds the per-segment sup but adds candidates between breakpoints.
    let global = |s: f64| log_weight(s).powf(alpha) * s * prof.value(s);
    sup_piecewise(&prof, seg, &global).powf(1.0 / q)
}

fn doublestar_value(r: &Rearrangement, q: f64, alpha: f64) -> f64 {
    let coeffs: Vec<(f64, f64)> = r
        .segments()
        .map(|(lo, _, _)| r.avg_coefficients(lo))
        .collect();
    let seg = move |k: usize, s: f64| {
        let (a, b) = coeffs[k];
        log_weight(s).powf(alpha) * s * (a + b / s).powf(q)
    };
    let global = |s: f64| log_weight(s).powf(alpha) * s * r.maximal_average(s).powf(q);
    sup_piecewise(r, seg, &global)
        .max(beyond_support_sup(r, q, alpha))
        .powf(1.0 / q)
}

/// For `s` beyond the support, `f**(s) = mass/s`, so the doublestar
/// integrand is `w(s)^α s^{1-q} mass^q`: non-increasing for `q ≥ 1`, hence
/// maximal at the support edge.
fn beyond_support_sup(r: &Rearrangement, q: f64, alpha: f64) -> f64 {
    let total = r.total_measure();
    if total == 0.0 {
        return 0.0;
    }
    log_weight(total).powf(alpha) * total.powf(1.0 - q) * r.mass().powf(q)
}

fn zygmund_value(r: &Rearrangement, q: f64, alpha: f64) -> f64 {
    let mut total = 0.0;
    for (lo, hi, v) in r.segments() {
        let vq = v.powf(q);
        let piece = if lo == 0.0 {
            // w^α has an integrable log singularity at the origin.
            integrate_left_singular(
                &|tau: f64, u: f64| tau * crate::log_weight_u(u).powf(alpha),
                hi,
                1e-13,
            )
        } else {
            adaptive_gk(&|t: f64| log_weight(t).powf(alpha), lo, hi, 0.0, 1e-13)
        };
        total += vq * piece;
    }
    total.powf(1.0 / q)
}

/// Maximize a piecewise-defined integrand over `(0, ∞)`.
///
/// `seg(k, s)` is the closed-segment extension of the integrand on segment
/// `k` (right endpoints evaluated with the segment's own level, so suprema
/// attained at a jump are not lost to right-continuity); `global` is the
/// honest pointwise integrand used on the geometric refinement grid.
fn sup_piecewise<S, G>(r: &Rearrangement, seg: S, global: &G) -> f64
where
    S: Fn(usize, f64) -> f64,
    G: Fn(f64) -> f64,
{
    let total = r.total_measure();
    if total == 0.0 {
        return 0.0;
    }
    let mut best = 0.0f64;
    for (k, (lo, hi, _)) in r.segments().enumerate() {
        // The integrands vanish as s -> 0+, so clipping the first segment's
        // open end loses nothing.
        let lo_eff = if lo == 0.0 { hi * 1e-9 } else { lo };
        let f = |s: f64| seg(k, s);
        let (_, peak) = golden_max(&f, lo_eff, hi);
        best = best.max(peak).max(f(lo_eff)).max(f(hi));
    }
    let mut min_gap = f64::INFINITY;
    let mut prev = 0.0;
    for &b in r.breaks() {
        min_gap = min_gap.min(b - prev);
        prev = b;
    }
    let lo = (min_gap / 10.0).max(1e-300);
    let hi = total * 10.0;
    let n = (64.0 * (hi / lo).log10()).ceil().max(1.0) as usize;
    let ratio = (hi / lo).powf(1.0 / n as f64);
    for i in 0..=n {
        let s = lo * ratio.powi(i as i32);
        best = best.max(global(s));
    }
    best
}

// ---------------------------------------------------------------------------
// Calculus checks.
// ---------------------------------------------------------------------------

/// Hölder bound `‖f1 f2‖_{frak,1,α} ≤ ‖f1‖_{frak,q1,α1} ‖f2‖_{frak,q2,α2}`
/// under `1 = 1/q1 + 1/q2`, `α = α1/q1 + α2/q2`. Returns `(lhs, rhs)`.
pub fn holder_product_check(
    f1: &SampledFunction,
    f2: &SampledFunction,
    q1: f64,
    q2: f64,
    alpha1: f64,
    alpha2: f64,
) -> Result<(f64, f64)> {
    validate_indices(q1, alpha1)?;
    validate_indices(q2, alpha2)?;
    let inv = |q: f64| if q.is_infinite() { 0.0 } else { 1.0 / q };
    if (inv(q1) + inv(q2) - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(
            "q2",
            format!("need 1/q1 + 1/q2 = 1, got 1/{q1} + 1/{q2}"),
        ));
    }
    let alpha = alpha1 * inv(q1) + alpha2 * inv(q2);
    let lhs = frak_norm(&f1.product(f2)?, 1.0, alpha)?;
    let rhs = frak_norm(f1, q1, alpha1)? * frak_norm(f2, q2, alpha2)?;
    Ok((lhs, rhs))
}

/// Power identity `‖|f|^r‖_{frak,q,α} = ‖f‖_{frak,rq,α}^r`, `rq ≥ 1`.
/// Returns `(lhs, rhs)`; the two sides agree to rounding.
pub fn power_identity_check(f: &SampledFunction, r: f64, q: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && q > 0.0 && r * q >= 1.0) {
        return Err(Error::invalid(
            "r",
            format!("need r, q > 0 with r*q >= 1, got r={r}, q={q}"),
        ));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("must be >= 0, got {alpha}")));
    }
    // q itself may drop below 1 here while rq >= 1 keeps the right side a
    // genuine norm; evaluate the functional directly.
    let rr = rearrange(f);
    let lhs = frak_value(&rr.powered(r), q, alpha);
    let rhs = frak_value(&rr, r * q, alpha).powf(r);
    Ok((lhs, rhs))
}

/// Log interpolation on balls: `|||f|||_{1,α;ρ} ≤ w(m)^{α-β} |||f|||_{1,β;ρ}`
/// for `0 ≤ α ≤ β`, with the weight factor taken at `m`, the ball measure
/// (inflated by half a cell diagonal so the discretized mask never exceeds
/// it). Returns `(lhs, rhs)` with the factor already folded into `rhs`.
///
/// In this form the constant is exactly 1: on each ball the supremum lives
/// on `s ≤ m`, where `w(s)^{α-β} ≤ w(m)^{α-β}`. Evaluating the factor at
/// the radius instead would need the comparability constant between
/// `w(ρ)` and `w(|B_ρ|)`, which is what the usual statement hides in `C`.
pub fn log_interpolation(
    f: &SampledFunction,
    alpha: f64,
    beta: f64,
    rho: f64,
) -> Result<(f64, f64)> {
    if !(0.0 <= alpha && alpha <= beta && beta.is_finite()) {
        return Err(Error::invalid(
            "alpha",
            format!("need 0 <= alpha <= beta, got alpha={alpha}, beta={beta}"),
        ));
    }
    let lhs = ul_frak_norm(f, 1.0, alpha, rho)?;
    let dim = f.grid.dim;
    let omega = if dim == 1 { 2.0 } else { std::f64::consts::PI };
    let half_diag = 0.5 * f.grid.cell_width() * (dim as f64).sqrt();
    let measure = omega * (rho + half_diag).powi(dim as i32);
    let factor = log_weight(measure).powf(alpha - beta);
    let rhs = factor * ul_frak_norm(f, 1.0, beta, rho)?;
    Ok((lhs, rhs))
}

/// The analytic witness family with rearrangement
/// `f_n*(s) = n [log(e+n)]^{-α-1} χ_{(0,1/n)}(s)`, for which
/// `frak_norm(f_n, 1, α) = [log(e+n)]^{-1}` exactly while the weak norm at
/// weight `α+1` stays of order one — the family whose ratio collapses to
/// zero as `n` grows.
pub fn log_witness(n: f64, alpha: f64) -> Result<Rearrangement> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::invalid("n", format!("must be >= 1, got {n}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("must be >= 0, got {alpha}")));
    }
    let level = n * (std::f64::consts::E + n).ln().powf(-alpha - 1.0);
    Rearrangement::from_steps(&[1.0 / n], &[level])
}

/// A deterministic thirty-item corpus on `grid`: ten centered ball
/// indicators, ten truncated power-log profiles
/// `min(cap, |x|^{-a} w(|x|)^{-b})`, and ten seeded random step functions.
/// Byte-identical for a fixed `(grid, seed)`.
pub fn inclusion_corpus(grid: GridSpec, seed: u64) -> Result<Vec<SampledFunction>> {
    let radius = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut corpus = Vec::with_capacity(30);
    let l = grid.half_width;
    for k in 0..10 {
        let r = l * (k as f64 + 0.5) / 10.0;
        corpus.push(SampledFunction::sample(grid, |x| {
            if radius(x) < r {
                1.0
            } else {
                0.0
            }
        })?);
    }
    for k in 0..10u32 {
        let a = 0.2 + 0.1 * f64::from(k);
        let b = f64::from(k % 3) - 1.0;
        let cap = 2f64.powi(k as i32 % 5 + 1);
        corpus.push(SampledFunction::sample(grid, |x| {
            let rad = radius(x);
            if rad == 0.0 {
                cap
            } else {
                cap.min(rad.powf(-a) * log_weight(rad).powf(-b))
            }
        })?);
    }
    for k in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
        let values = (0..grid.len()).map(|_| rng.random::<f64>() - 0.3).collect();
        corpus.push(SampledFunction::from_values(grid, values)?);
    }
    Ok(corpus)
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

    fn random_fn(g: GridSpec, seed: u64) -> SampledFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..g.len()).map(|_| rng.random::<f64>() - 0.3).collect();
        SampledFunction::from_values(g, values).unwrap()
    }

    fn indicator(g: GridSpec, r: f64) -> SampledFunction {
        SampledFunction::sample_1d(g, |x| if x.abs() < r { 1.0 } else { 0.0 }).unwrap()
    }

    /// The analytic family with `f_n*(s) = n[log(e+n)]^{-α-1} χ_{(0,1/n)}`.
    fn fn_family(n: f64, alpha: f64) -> Rearrangement {
        log_witness(n, alpha).unwrap()
    }

    #[test]
    fn frak_fn_family_matches_analytic_value() {
        // frak_norm(f_n, 1, α) = [log(e+n)]^{-1} exactly.
        for alpha in [0.5, 1.0] {
            for n in [2.0, 8.0, 64.0, 256.0] {
                let r = fn_family(n, alpha);
                let got = frak_norm_of(&r, 1.0, alpha).unwrap();
                let want = (std::f64::consts::E + n).ln().recip();
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "n={n}, α={alpha}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn frak_alpha_zero_is_lq_norm() {
        let g = grid1(8.0, 256);
        for seed in 0..5 {
            let f = random_fn(g, seed);
            for q in [1.0, 2.0, 3.0] {
                let got = frak_norm(&f, q, 0.0).unwrap();
                let want = f.lp_norm(q);
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "q={q}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let f = SampledFunction::zeros(grid1(8.0, 256));
        assert_eq!(frak_norm(&f, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(zygmund_norm(&f, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(weak_zygmund_norm(&f, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(doublestar_norm(&f, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(ul_frak_norm(&f, 1.0, 0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn indicator_norms_match_oracles() {
        // χ_E with |E| = 1, cell aligned.
        let g = grid1(8.0, 256);
        let f = indicator(g, 0.5);
        let (q, alpha) = (2.0, 1.0);
        // Zygmund: ∫_0^1 w(τ)^α dτ via an independent quadrature oracle.
        let zyg = zygmund_norm(&f, q, alpha).unwrap();
        let oracle = integrate_left_singular(
            &|tau: f64, u: f64| tau * crate::log_weight_u(u).powf(alpha),
            1.0,
            1e-13,
        );
        assert!(
            (zyg - oracle.powf(1.0 / q)).abs() < 1e-10,
            "{zyg} vs {}",
            oracle.powf(1.0 / q)
        );
        // frak: the weighted cumulative peaks at s = |E| = 1 for α ≤ 1.
        let frak = frak_norm(&f, q, alpha).unwrap();
        let want = log_weight(1.0).powf(alpha).powf(1.0 / q);
        assert!((frak - want).abs() < 1e-12, "{frak} vs {want}");
        // weak: dense-scan oracle of w(s)^α s over (0, 1].
        let weak = weak_zygmund_norm(&f, q, alpha).unwrap();
        let mut scan = 0.0f64;
        for k in 1..=400_000 {
            let s = k as f64 / 400_000.0;
            scan = scan.max(log_weight(s).powf(alpha) * s);
        }
        assert!(
            (weak - scan.powf(1.0 / q)).abs() < 1e-8,
            "{weak} vs {}",
            scan.powf(1.0 / q)
        );
    }

    #[test]
    fn alpha_zero_q_one_equals_l1_on_big_box() {
        // On E = [-8, 8] the weight is ~1 over almost all of (0, 16].
        let g = grid1(8.0, 256);
        let f = SampledFunction::sample_1d(g, |_| 1.0).unwrap();
        let l1 = f.lp_norm(1.0);
        assert!((frak_norm(&f, 1.0, 0.0).unwrap() - l1).abs() < 1e-10);
        assert!((zygmund_norm(&f, 1.0, 0.0).unwrap() - l1).abs() < 1e-9);
    }

    #[test]
    fn frak_is_a_norm() {
        let g = grid1(8.0, 256);
        let (q, alpha) = (2.0, 1.0);
        // Absolute homogeneity.
        let f = random_fn(g, 3);
        let a = frak_norm(&f.map(|v| -2.5 * v), q, alpha).unwrap();
        let b = 2.5 * frak_norm(&f, q, alpha).unwrap();
        assert!((a - b).abs() <= 1e-13 * b);
        // Triangle inequality on random pairs.
        for seed in 0..20 {
            let f = random_fn(g, 100 + seed);
            let h = random_fn(g, 200 + seed);
            let sum = frak_norm(&f.axpy(1.0, &h).unwrap(), q, alpha).unwrap();
            let parts = frak_norm(&f, q, alpha).unwrap() + frak_norm(&h, q, alpha).unwrap();
            assert!(
                sum <= parts * (1.0 + 1e-12),
                "seed {seed}: {sum} vs {parts}"
            );
        }
    }

    #[test]
    fn inclusion_chain_weak_frak_zygmund() {
        let g = grid1(8.0, 256);
        let corpus = inclusion_corpus(g, 500).unwrap();
        assert_eq!(corpus.len(), 30);
        for (i, f) in corpus.iter().enumerate() {
            for &(q, alpha) in &[(1.0, 1.0), (2.0, 0.5), (3.0, 2.0)] {
                let weak = weak_zygmund_norm(f, q, alpha).unwrap();
                let frak = frak_norm(f, q, alpha).unwrap();
                let zyg = zygmund_norm(f, q, alpha).unwrap();
                assert!(
                    weak <= frak * (1.0 + 1e-10),
                    "item {i} q={q} α={alpha}: weak {weak} > frak {frak}"
                );
                assert!(
                    frak <= zyg * (1.0 + 1e-10),
                    "item {i} q={q} α={alpha}: frak {frak} > zygmund {zyg}"
                );
            }
        }
    }

    #[test]
    fn corpus_is_deterministic_and_nontrivial() {
        let g = grid1(8.0, 256);
        let a = inclusion_corpus(g, 7).unwrap();
        let b = inclusion_corpus(g, 7).unwrap();
        for (f, h) in a.iter().zip(&b) {
            assert_eq!(f.values, h.values);
        }
        // Every item has mass, and each of the three families is present.
        for (i, f) in a.iter().enumerate() {
            assert!(f.lp_norm(1.0) > 0.0, "item {i} is identically zero");
        }
        let c = inclusion_corpus(g, 8).unwrap();
        assert_ne!(a[20].values, c[20].values, "random block must follow seed");
        assert_eq!(a[0].values, c[0].values, "deterministic block is seed-free");
    }

    #[test]
    fn frak_bounded_by_shifted_weak() {
        // frak(·, q, α) ≤ C · weak(·, q, α+1); the ratio stays modest.
        let g = grid1(8.0, 256);
        for seed in 0..10 {
            let f = random_fn(g, 700 + seed);
            for &(q, alpha) in &[(1.0, 1.0), (2.0, 1.0)] {
                let frak = frak_norm(&f, q, alpha).unwrap();
                let weak = weak_zygmund_norm(&f, q, alpha + 1.0).unwrap();
                let ratio = frak / weak;
                assert!(ratio.is_finite() && ratio < 10.0, "ratio {ratio}");
            }
        }
    }

    #[test]
    fn ratio_collapse_on_fn_family() {
        // frak(f_n,1,α)/weak(f_n,1,α+1) decreases monotonically, dropping
        // at least 3x from n = 2 to n = 256.
        let alpha = 1.0;
        let mut prev = f64::INFINITY;
        let mut first = 0.0;
        let mut last = 0.0;
        for k in 1..=8 {
            let n = 2f64.powi(k);
            let r = fn_family(n, alpha);
            let frak = frak_norm_of(&r, 1.0, alpha).unwrap();
            let weak = weak_zygmund_norm_of(&r, 1.0, alpha + 1.0).unwrap();
            let ratio = frak / weak;
            assert!(ratio < prev, "n={n}: ratio {ratio} did not decrease");
            prev = ratio;
            if k == 1 {
                first = ratio;
            }
            last = ratio;
        }
        assert!(
            first / last >= 3.0,
            "collapse factor {} < 3",
            first / last
        );
    }

    #[test]
    fn weak_witness_normalizes_to_one() {
        // f* = s^{-1/q} w(s)^{-α/q} on (0, δ) has weak norm exactly 1.
        for &(q, alpha) in &[(1.0, 0.0), (1.0, 1.0), (2.0, 0.5)] {
            let profile =
                move |s: f64| s.powf(-1.0 / q) * log_weight(s).powf(-alpha / q);
            let r = Rearrangement::from_profile(profile, 1e-6, 1.0, 64).unwrap();
            let weak = weak_zygmund_norm_of(&r, q, alpha).unwrap();
            assert!(
                weak <= 1.0 + 1e-9 && weak > 0.999,
                "q={q} α={alpha}: weak {weak}"
            );
        }
    }

    #[test]
    fn strictness_witness_frak_explodes_over_weak() {
        // Same witness at α = 0: weak stays 1 while frak grows like
        // log(δ/s_min) as the cutoff refines — the two norms are not
        // comparable without the +1 weight shift.
        let mut prev_frak = 0.0;
        for s_min in [1e-2, 1e-4, 1e-6, 1e-8] {
            let r = Rearrangement::from_profile(|s: f64| 1.0 / s, s_min, 1.0, 64).unwrap();
            let weak = weak_zygmund_norm_of(&r, 1.0, 0.0).unwrap();
            let frak = frak_norm_of(&r, 1.0, 0.0).unwrap();
            assert!(weak <= 1.0 + 1e-9);
            assert!(frak > prev_frak, "frak must grow under refinement");
            prev_frak = frak;
        }
        assert!(
            prev_frak >= 10.0,
            "frak/weak separation only reached {prev_frak}"
        );
    }

    #[test]
    fn strictness_witness_zygmund_explodes_over_frak() {
        // g* = s^{-1} w(s)^{-α-1} at q = 1: frak stays bounded (the
        // cumulative integral converges) while zygmund grows log-log.
        let alpha = 1.0;
        let profile = move |s: f64| log_weight(s).powf(-alpha - 1.0) / s;
        let mut prev_zyg = 0.0;
        let mut fraks = Vec::new();
        for s_min in [1e-2, 1e-4, 1e-6, 1e-8] {
            let r = Rearrangement::from_profile(profile, s_min, 1.0, 64).unwrap();
            let frak = frak_norm_of(&r, 1.0, alpha).unwrap();
            let zyg = zygmund_norm_of(&r, 1.0, alpha).unwrap();
            assert!(zyg > prev_zyg, "zygmund must grow under refinement");
            prev_zyg = zyg;
            fraks.push(frak);
        }
        // frak saturates: the last two refinements change it by < 2%.
        let k = fraks.len();
        assert!(
            (fraks[k - 1] - fraks[k - 2]).abs() < 0.02 * fraks[k - 1],
            "frak kept moving: {fraks:?}"
        );
    }

    #[test]
    fn doublestar_reverse_power_inequality() {
        let g = grid1(8.0, 256);
        let (p, alpha) = (3.0, 0.5);
        for seed in 0..10 {
            let f = random_fn(g, 900 + seed);
            let lhs = doublestar_norm(&f.map(|v| v.abs().powf(p)), 1.0, alpha).unwrap();
            let rhs = doublestar_norm(&f, p, alpha).unwrap().powf(p);
            assert!(
                lhs >= rhs * (1.0 - 1e-10),
                "seed {seed}: {lhs} < {rhs}"
            );
        }
    }

    #[test]
    fn doublestar_coincides_with_frak_at_q_one() {
        // s·f**(s) = ∫_0^s f*, so the two integrands are identical.
        let g = grid1(8.0, 256);
        for seed in 0..5 {
            let f = random_fn(g, 1100 + seed);
            for alpha in [0.0, 0.5, 1.0] {
                let a = doublestar_norm(&f, 1.0, alpha).unwrap();
                let b = frak_norm(&f, 1.0, alpha).unwrap();
                assert!(((a - b) / b).abs() < 1e-9, "α={alpha}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn power_identity_exact() {
        let g = grid1(8.0, 256);
        // r = 1 is trivially exact.
        let f = random_fn(g, 1300);
        let (lhs, rhs) = power_identity_check(&f, 1.0, 2.0, 1.0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        // χ_E with r = 2, q = 1.
        let e = indicator(g, 1.0);
        let (lhs, rhs) = power_identity_check(&e, 2.0, 1.0, 1.0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{lhs} vs {rhs}");
        // Random data at the solver's exponent p = 3 (θ = 2, n = 1).
        for seed in 0..10 {
            let f = random_fn(g, 1400 + seed);
            let (lhs, rhs) = power_identity_check(&f, 3.0, 1.0, 0.5).unwrap();
            assert!(
                ((lhs - rhs) / rhs).abs() < 1e-12,
                "seed {seed}: {lhs} vs {rhs}"
            );
        }
        // rq < 1 must be rejected.
        assert!(power_identity_check(&f, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn holder_examples() {
        let g = grid1(8.0, 256);
        // f2 ≡ 1, q2 = ∞: rhs collapses to ‖f1‖ · sup|f2|.
        let f1 = random_fn(g, 1500);
        let one = SampledFunction::sample_1d(g, |_| 1.0).unwrap();
        let (lhs, rhs) = holder_product_check(&f1, &one, 1.0, f64::INFINITY, 1.0, 0.0).unwrap();
        let direct = frak_norm(&f1, 1.0, 1.0).unwrap();
        assert!((rhs - direct).abs() < 1e-12 * direct);
        assert!(lhs <= rhs * (1.0 + 1e-10));
        // χ_E against itself with q1 = q2 = 2.
        let e = indicator(g, 1.0);
        let (lhs, rhs) = holder_product_check(&e, &e, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-10), "{lhs} vs {rhs}");
        // Random pairs at the solver's conjugate pair (p', p), p = 3.
        let (q1, q2) = (1.5, 3.0);
        for seed in 0..20 {
            let a = random_fn(g, 1600 + seed);
            let b = random_fn(g, 1700 + seed);
            let (lhs, rhs) = holder_product_check(&a, &b, q1, q2, 0.5, 0.5).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-10), "seed {seed}: {lhs} vs {rhs}");
        }
        // Mismatched exponents are rejected.
        assert!(holder_product_check(&f1, &one, 2.0, 3.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn log_interpolation_examples() {
        let g = grid1(8.0, 512);
        // A profile with an integrable singularity at the origin keeps the
        // ball suprema in the small-s regime where the bound is sharp.
        let f = SampledFunction::sample_1d(g, |x| {
            let a = x.abs().max(1e-12);
            if a < 1.0 {
                1.0 / (a * log_weight(a).powi(2))
            } else {
                0.0
            }
        })
        .unwrap();
        // α = β: factor 1, identical norms.
        let (lhs, rhs) = log_interpolation(&f, 0.5, 0.5, 1.0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        // α < β on the singular profile.
        let (lhs, rhs) = log_interpolation(&f, 0.0, 0.5, 1.0).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-8), "{lhs} vs {rhs}");
        // Shrinking balls: the α-norm itself decays to zero.
        let mut prev = f64::INFINITY;
        for rho in [1.0, 0.5, 0.25, 0.125] {
            let (lhs, _) = log_interpolation(&f, 0.0, 0.5, rho).unwrap();
            assert!(lhs < prev, "ρ={rho}: {lhs} did not shrink");
            prev = lhs;
        }
        // α > β is rejected.
        assert!(log_interpolation(&f, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn ul_frak_captures_compact_support_exactly() {
        let g = grid1(8.0, 256);
        let rho = 2.0;
        // Support inside B(0, ρ/4): one ball sees all of f.
        let f = SampledFunction::sample_1d(g, |x| if x.abs() < 0.5 { 1.0 + x } else { 0.0 })
            .unwrap();
        let ul = ul_frak_norm(&f, 1.0, 1.0, rho).unwrap();
        let plain = frak_norm(&f, 1.0, 1.0).unwrap();
        assert!(((ul - plain) / plain).abs() < 1e-12, "{ul} vs {plain}");
    }

    #[test]
    fn ul_frak_translation_stability() {
        let g = grid1(8.0, 256);
        let f = SampledFunction::sample_1d(g, |x| (-(x * x) / 0.1).exp()).unwrap();
        let base = ul_frak_norm(&f, 1.0, 1.0, 1.0).unwrap();
        // Shift by 5 cells = 0.3125, incommensurate with the ρ/2 lattice.
        let mut shifted = f.values.clone();
        shifted.rotate_right(5);
        let fs = SampledFunction::from_values(g, shifted).unwrap();
        let moved = ul_frak_norm(&fs, 1.0, 1.0, 1.0).unwrap();
        assert!(
            ((moved - base) / base).abs() < 0.05,
            "base {base}, moved {moved}"
        );
    }

    #[test]
    fn ul_frak_radius_doubling_comparable() {
        // A 2ρ-ball splits into at most 9 lattice ρ-balls in 1-D, so the
        // doubled norm is bounded by 9 times the original.
        let g = grid1(8.0, 256);
        for seed in 0..5 {
            let f = random_fn(g, 1900 + seed);
            let small = ul_frak_norm(&f, 1.0, 1.0, 0.5).unwrap();
            let big = ul_frak_norm(&f, 1.0, 1.0, 1.0).unwrap();
            assert!(big >= small * (1.0 - 1e-12), "monotone in ρ");
            assert!(big <= 9.0 * small, "covering bound: {big} vs {small}");
        }
    }

    #[test]
    fn q_infinity_is_sup_everywhere() {
        let g = grid1(8.0, 256);
        let f = random_fn(g, 2000);
        let sup = f.lp_norm(f64::INFINITY);
        for fam in [
            NormFamily::FrakWeak,
            NormFamily::Zygmund,
            NormFamily::WeakZygmund,
            NormFamily::DoublestarWeak,
        ] {
            let spec = NormSpec::new(fam, f64::INFINITY, 1.0, None).unwrap();
            assert_eq!(spec.evaluate(&f).unwrap(), sup);
        }
        assert_eq!(ul_frak_norm(&f, f64::INFINITY, 0.0, 1.0).unwrap(), sup);
    }

    #[test]
    fn norm_spec_validation() {
        use NormFamily::*;
        assert!(NormSpec::new(FrakWeak, 0.5, 0.0, None).is_err());
        assert!(NormSpec::new(FrakWeak, 1.0, -1.0, None).is_err());
        assert!(NormSpec::new(Zygmund, 1.0, 0.0, Some(1.0)).is_err());
        assert!(NormSpec::new(FrakWeak, 1.0, 0.0, Some(0.0)).is_err());
        assert!(NormSpec::new(FrakWeak, 1.0, 0.0, Some(1.0)).is_ok());
        assert!("frak".parse::<NormFamily>().is_ok());
        assert!("nope".parse::<NormFamily>().is_err());
    }

    #[test]
    fn log_weight_type_invariants() {
        let w = LogWeight { alpha: 2.0 };
        let at_one = (1.0f64 + std::f64::consts::E).ln().powi(2);
        assert!((w.eval(1.0) - at_one).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for k in -20..10 {
            let v = w.eval(10f64.powi(k));
            assert!(v <= prev);
            prev = v;
        }
    }
}
