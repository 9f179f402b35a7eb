//! Verification harness for the weighted-integral bounds and the semigroup
//! decay estimates.
//!
//! Every check here turns an existence-of-a-constant claim into a falsifiable
//! number: the left-hand side is computed by quadrature or by evolving a
//! profile spectrally, the right-hand side shape is evaluated from its exact
//! exponents, and the worst ratio over a sweep is reported. A bound "holds"
//! when the ratio trace is finite, positive, and flat at the tail; nothing is
//! ever clamped to make that so.

use rayon::prelude::*;

use crate::error::Error;
use crate::frackernel::{recip, semigroup_apply};
use crate::Result;
use crate::quad;
use crate::sampled::{GridSpec, SampledFunction};
use crate::zygmund::{frak_norm, ul_frak_norm};
use crate::{log_weight, log_weight_u};

/// Measured decay of an evolved profile against its predicted envelope
/// `t^{-(n/θ)(1/r - 1/q)} [log(e + 1/t)]^{-α/r + β/q}`.
#[derive(Debug, Clone)]
pub struct DecayTrace {
    /// Sweep times, ascending.
    pub t: Vec<f64>,
    /// Measured norm of the evolved profile at each time.
    pub measured: Vec<f64>,
    /// Envelope shape evaluated at each time (without the constant).
    pub envelope: Vec<f64>,
    /// `measured / (envelope · source norm)` — the empirical constant.
    pub ratio: Vec<f64>,
}

impl DecayTrace {
    fn build(t: Vec<f64>, measured: Vec<f64>, envelope: Vec<f64>, source: f64) -> Result<Self> {
        let ratio: Vec<f64> = measured
            .iter()
            .zip(&envelope)
            .map(|(m, e)| m / (e * source))
            .collect();
        for (i, &r) in ratio.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::NonFinite(format!(
                    "decay ratio at t = {} came out {r}",
                    t[i]
                )));
            }
        }
        Ok(DecayTrace {
            t,
            measured,
            envelope,
            ratio,
        })
    }

    /// Largest ratio over the sweep — the empirical constant.
    pub fn max_ratio(&self) -> f64 {
        self.ratio.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest ratio over the sweep; positive when the envelope is sharp.
    pub fn min_ratio(&self) -> f64 {
        self.ratio.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether the running maximum has stopped growing: the maximum over the
    /// last quarter of the sweep must carry at least half the overall
    /// maximum, i.e. the extremal ratio is not still climbing at the edge.
    pub fn stabilized(&self) -> bool {
        let overall = self.max_ratio();
        if !(overall > 0.0) {
            return false;
        }
        let start = self.ratio.len() - self.ratio.len().div_ceil(4);
        let tail = self.ratio[start..].iter().copied().fold(0.0, f64::max);
        tail / overall >= 0.5
    }

    /// Least-squares slope of `log ratio` against `log t` over the last
    /// decade of the sweep (`t ≥ t_max / 10`). A bounded trace is flat: the
    /// slope sits within ±0.1 of zero.
    pub fn tail_slope(&self) -> f64 {
        let t_max = self.t.iter().copied().fold(0.0, f64::max);
        let pts: Vec<(f64, f64)> = self
            .t
            .iter()
            .zip(&self.ratio)
            .filter(|(&t, _)| t >= t_max / 10.0)
            .map(|(&t, &r)| (t.ln(), r.ln()))
            .collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        sxy / sxx
    }

    /// The empirical meaning of "there exists C": every ratio is finite (by
    /// construction) and the tail of the trace is flat.
    pub fn is_bounded(&self) -> bool {
        self.tail_slope().abs() <= 0.1
    }
}

/// Default sweep: 40 geometric points on `[1e-4, t_max]`.
pub fn default_t_grid(t_max: f64) -> Result<Vec<f64>> {
    const T_LO: f64 = 1e-4;
    const POINTS: usize = 40;
    if !(t_max > T_LO && t_max.is_finite()) {
        return Err(Error::invalid(
            "t_max",
            format!("sweep end must exceed {T_LO}, got {t_max}"),
        ));
    }
    let grow = (t_max / T_LO).powf(1.0 / (POINTS - 1) as f64);
    Ok((0..POINTS).map(|k| T_LO * grow.powi(k as i32)).collect())
}

fn unit_ball_volume(n: usize) -> Result<f64> {
    match n {
        1 => Ok(2.0),
        2 => Ok(std::f64::consts::PI),
        _ => Err(Error::invalid(
            "n",
            format!("dimension must be 1 or 2, got {n}"),
        )),
    }
}

fn check_positive_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(name, "sweep grid is empty"));
    }
    for &v in grid {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(
                name,
                format!("sweep points must be positive and finite, got {v}"),
            ));
        }
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 2.0) {
        return Err(Error::invalid(
            "theta",
            format!("order must lie in (0, 2], got {theta}"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Weighted-integral bounds.
// ---------------------------------------------------------------------------

/// Verify one of the three weighted-integral bounds, returning the largest
/// `lhs / rhs-shape` over `s_grid`:
///
/// 1. `∫_0^s τ^q w(τ)^α dτ ≤ C s^{q+1} w(s)^α` for `q > -1`;
/// 2. `∫_0^s τ^{-1} w(τ)^α dτ ≤ C w(s)^{α+1}` for `α < -1`, `s < S`;
/// 3. `∫_s^∞ τ^q w(τ)^α dτ ≤ C s^{q+1} w(s)^α` for `q < -1`;
///
/// with `w(s) = log(e + 1/s)`. The left-hand sides are adaptive quadratures
/// (log-substituted at the singular end), the right-hand shapes are exact.
pub fn lemma31_check(variant: u8, q: f64, alpha: f64, s_upper: f64, s_grid: &[f64]) -> Result<f64> {
    let rows = lemma31_rows(variant, q, alpha, s_upper, s_grid)?;
    bounded_max_ratio(&rows, "weighted-integral")
}

/// Per-point rows `(s, lhs, rhs)` of [`lemma31_check`], for callers that
/// archive the comparison rather than just its supremum.
pub fn lemma31_rows(
    variant: u8,
    q: f64,
    alpha: f64,
    s_upper: f64,
    s_grid: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    check_positive_grid("s_grid", s_grid)?;
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be finite, got {alpha}")));
    }
    match variant {
        1 => {
            if !(q > -1.0) {
                return Err(Error::invalid(
                    "q",
                    format!("variant 1 needs q > -1, got {q}"),
                ));
            }
        }
        2 => {
            if !(alpha < -1.0) {
                return Err(Error::invalid(
                    "alpha",
                    format!("variant 2 needs alpha < -1, got {alpha}"),
                ));
            }
            if q != -1.0 {
                return Err(Error::invalid(
                    "q",
                    format!("variant 2 integrates τ^{{-1}}; pass q = -1, got {q}"),
                ));
            }
            if let Some(&bad) = s_grid.iter().find(|&&s| s >= s_upper) {
                return Err(Error::invalid(
                    "s_grid",
                    format!("variant 2 needs s < S = {s_upper}, got {bad}"),
                ));
            }
        }
        3 => {
            if !(q < -1.0) {
                return Err(Error::invalid(
                    "q",
                    format!("variant 3 needs q < -1, got {q}"),
                ));
            }
        }
        other => {
            return Err(Error::invalid(
                "variant",
                format!("must be 1, 2, or 3, got {other}"),
            ));
        }
    }

    Ok(s_grid
        .par_iter()
        .map(|&s| {
            let (lhs, rhs) = match variant {
                1 => {
                    let rhs = s.powf(q + 1.0) * log_weight(s).powf(alpha);
                    let density =
                        |_tau: f64, u: f64| (-(1.0 + q) * u).exp() * log_weight_u(u).powf(alpha);
                    (quad::integrate_left_singular(&density, s, 1e-12 * rhs), rhs)
                }
                2 => {
                    let rhs = log_weight(s).powf(alpha + 1.0);
                    let density = |_tau: f64, u: f64| log_weight_u(u).powf(alpha);
                    (quad::integrate_left_singular(&density, s, 1e-12 * rhs), rhs)
                }
                _ => {
                    let rhs = s.powf(q + 1.0) * log_weight(s).powf(alpha);
                    let f = |tau: f64| tau.powf(q) * log_weight(tau).powf(alpha);
                    (quad::integrate_to_infinity(&f, s, 1e-12 * rhs), rhs)
                }
            };
            (s, lhs, rhs)
        })
        .collect())
}

/// Max of `lhs/rhs` over rows, rejecting non-finite or degenerate sweeps.
fn bounded_max_ratio(rows: &[(f64, f64, f64)], label: &str) -> Result<f64> {
    let max = rows.iter().map(|r| r.1 / r.2).fold(0.0, f64::max);
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::NonFinite(format!("{label} ratio {max}")));
    }
    Ok(max)
}

/// Exact rearrangement of the kernel majorant: `h_t` is radial decreasing,
/// so `h_t*(s) = h_t((s/ω_n)^{1/n} e_1)` with `ω_n` the unit-ball volume.
fn majorant_rearranged(n: usize, theta: f64, omega: f64, t: f64, s: f64) -> f64 {
    let nf = n as f64;
    t.powf(-nf / theta) * (1.0 + t.powf(-1.0 / theta) * (s / omega).powf(1.0 / nf)).powf(-nf - theta)
}

/// Verify the rearranged-kernel integral bound
/// `∫_0^∞ τ^{q(1-1/r)} w(τ)^γ (h_t*(τ))^q dτ ≤ C t^{-(nq/θ)(1/r-1/q)} w(t)^γ`,
/// returning the largest `lhs / rhs-shape` over `t_grid`.
///
/// `h_t*` enters analytically (the majorant is radial decreasing, so its
/// rearrangement is its radial profile reparameterized by ball volume);
/// no grid sampling is involved.
pub fn lemma32_check(
    n: usize,
    theta: f64,
    r: f64,
    q: f64,
    gamma: f64,
    t_grid: &[f64],
) -> Result<f64> {
    let rows = lemma32_rows(n, theta, r, q, gamma, t_grid)?;
    bounded_max_ratio(&rows, "rearranged-kernel")
}

/// Per-point rows `(t, lhs, rhs)` of [`lemma32_check`].
pub fn lemma32_rows(
    n: usize,
    theta: f64,
    r: f64,
    q: f64,
    gamma: f64,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    check_theta(theta)?;
    check_positive_grid("t_grid", t_grid)?;
    let omega = unit_ball_volume(n)?;
    if !(1.0 <= r && r <= q && q.is_finite()) {
        return Err(Error::invalid(
            "r",
            format!("need 1 <= r <= q < ∞, got r = {r}, q = {q}"),
        ));
    }
    if r == q && gamma < 0.0 {
        return Err(Error::invalid(
            "gamma",
            format!("need gamma >= 0 when r = q, got {gamma}"),
        ));
    }
    let nf = n as f64;
    let a = q * (1.0 - 1.0 / r);
    Ok(t_grid
        .par_iter()
        .map(|&t| {
            let rhs = t.powf(-(nf * q / theta) * (1.0 / r - 1.0 / q)) * log_weight(t).powf(gamma);
            let density = |tau: f64, u: f64| {
                (-(1.0 + a) * u).exp()
                    * log_weight_u(u).powf(gamma)
                    * majorant_rearranged(n, theta, omega, t, tau).powf(q)
            };
            let knee = omega * t.powf(nf / theta);
            (t, quad::integrate_zero_to_infinity(&density, knee, 1e-10 * rhs), rhs)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Semigroup decay sweeps.
// ---------------------------------------------------------------------------

fn check_decay_indices(r: f64, q: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(1.0 <= r && r <= q) {
        return Err(Error::invalid(
            "r",
            format!("need 1 <= r <= q, got r = {r}, q = {q}"),
        ));
    }
    if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::invalid(
            "alpha",
            format!("weights must be finite and >= 0, got alpha = {alpha}, beta = {beta}"),
        ));
    }
    if r == q && alpha > beta {
        return Err(Error::invalid(
            "alpha",
            format!("need alpha <= beta when r = q, got alpha = {alpha}, beta = {beta}"),
        ));
    }
    Ok(())
}

fn decay_envelope(n: usize, theta: f64, r: f64, q: f64, alpha: f64, beta: f64, t: f64) -> f64 {
    let nf = n as f64;
    t.powf(-(nf / theta) * (recip(r) - recip(q)))
        * log_weight(t).powf(-alpha * recip(r) + beta * recip(q))
}

/// Sweep the global decay estimate
/// `‖S(t)φ‖_{q,β} ≤ C t^{-(n/θ)(1/r-1/q)} w(t)^{-α/r+β/q} ‖φ‖_{r,α}`
/// in the weighted weak norms, evolving `φ` spectrally at each `t`.
pub fn prop31_check(
    phi: &SampledFunction,
    r: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    theta: f64,
    t_grid: &[f64],
) -> Result<DecayTrace> {
    check_theta(theta)?;
    check_decay_indices(r, q, alpha, beta)?;
    check_positive_grid("t_grid", t_grid)?;
    let n = phi.grid.dim;
    let source = frak_norm(phi, r, alpha)?;
    if !(source > 0.0 && source.is_finite()) {
        return Err(Error::invalid(
            "phi",
            format!("source norm must be positive and finite, got {source}"),
        ));
    }
    let rows: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|&t| -> Result<(f64, f64)> {
            let evolved = semigroup_apply(theta, t, phi)?;
            let measured = frak_norm(&evolved, q, beta)?;
            Ok((measured, decay_envelope(n, theta, r, q, alpha, beta, t)))
        })
        .collect::<Result<_>>()?;
    let (measured, envelope) = rows.into_iter().unzip();
    DecayTrace::build(t_grid.to_vec(), measured, envelope, source)
}

/// Sweep the uniformly-local decay estimate: as [`prop31_check`] but in the
/// windowed norms `|||·|||_{·,·;ρ}` with window radius `ρ = T^{1/θ}`, valid
/// for `t ≤ T`.
pub fn prop32_check(
    phi: &SampledFunction,
    r: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    theta: f64,
    t_cap: f64,
    t_grid: &[f64],
) -> Result<DecayTrace> {
    check_theta(theta)?;
    check_decay_indices(r, q, alpha, beta)?;
    check_positive_grid("t_grid", t_grid)?;
    if !(t_cap > 0.0 && t_cap.is_finite()) {
        return Err(Error::invalid(
            "t_cap",
            format!("window horizon must be positive, got {t_cap}"),
        ));
    }
    if let Some(&bad) = t_grid.iter().find(|&&t| t > t_cap) {
        return Err(Error::invalid(
            "t_grid",
            format!("sweep point {bad} exceeds the horizon {t_cap}"),
        ));
    }
    let n = phi.grid.dim;
    let rho = t_cap.powf(1.0 / theta);
    let source = ul_frak_norm(phi, r, alpha, rho)?;
    if !(source > 0.0 && source.is_finite()) {
        return Err(Error::invalid(
            "phi",
            format!("source norm must be positive and finite, got {source}"),
        ));
    }
    let rows: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|&t| -> Result<(f64, f64)> {
            let evolved = semigroup_apply(theta, t, phi)?;
            let measured = ul_frak_norm(&evolved, q, beta, rho)?;
            Ok((measured, decay_envelope(n, theta, r, q, alpha, beta, t)))
        })
        .collect::<Result<_>>()?;
    let (measured, envelope) = rows.into_iter().unzip();
    DecayTrace::build(t_grid.to_vec(), measured, envelope, source)
}

// ---------------------------------------------------------------------------
// The critical profile.
// ---------------------------------------------------------------------------

/// `∫_0^c x^{-1} w(x)^{-κ} dx` — the radial log-integral behind every exact
/// cell average of the critical profile (`κ > 1` makes it converge).
fn radial_log_integral(c: f64, kappa: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let density = |_tau: f64, u: f64| log_weight_u(u).powf(-kappa);
    quad::integrate_left_singular(&density, c, 1e-13)
}

/// `∫∫_{[0,X]×[0,Y]} |x|^{-2} w(|x|)^{-κ} dx` for a rectangle cornered at
/// the origin, in polar form: the inner radial integral is
/// [`radial_log_integral`], the outer angle integral is smooth.
fn corner_rectangle_integral(x: f64, y: f64, kappa: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    let split = (y / x).atan();
    let lo = quad::adaptive_gk(
        &|phi: f64| radial_log_integral(x / phi.cos(), kappa),
        0.0,
        split,
        1e-13,
        1e-10,
    );
    let hi = quad::adaptive_gk(
        &|phi: f64| radial_log_integral(y / phi.sin(), kappa),
        split,
        std::f64::consts::FRAC_PI_2,
        1e-13,
        1e-10,
    );
    lo + hi
}

/// Sample the critical profile `φ_c(x) = |x|^{-n} w(|x|)^{-n/θ-1}` on a
/// grid: cell centers away from the origin, exact cell averages on the
/// origin-adjacent cells (where the point value is meaningless but the cell
/// integral converges).
pub fn phi_c(n: usize, theta: f64, grid: GridSpec) -> Result<SampledFunction> {
    check_theta(theta)?;
    unit_ball_volume(n)?;
    if grid.dim != n {
        return Err(Error::GridMismatch(format!(
            "profile dimension {n} vs grid dimension {}",
            grid.dim
        )));
    }
    let nf = n as f64;
    let kappa = nf / theta + 1.0;
    let mut values: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let c = grid.center(idx);
            let rad = (c[0] * c[0] + c[1] * c[1]).sqrt();
            rad.powf(-nf) * log_weight(rad).powf(-kappa)
        })
        .collect();
    let h = grid.cell_width();
    for idx in grid.origin_adjacent_cells() {
        let c = grid.center(idx);
        values[idx] = match n {
            1 => {
                let (a, b) = (c[0] - h / 2.0, c[0] + h / 2.0);
                (radial_log_integral(-a.min(0.0), kappa) + radial_log_integral(b.max(0.0), kappa))
                    / h
            }
            _ => {
                let (a, b) = (c[0] - h / 2.0, c[0] + h / 2.0);
                let (cc, d) = (c[1] - h / 2.0, c[1] + h / 2.0);
                let (xn, xp) = (-a.min(0.0), b.max(0.0));
                let (yn, yp) = (-cc.min(0.0), d.max(0.0));
                (corner_rectangle_integral(xn, yn, kappa)
                    + corner_rectangle_integral(xn, yp, kappa)
                    + corner_rectangle_integral(xp, yn, kappa)
                    + corner_rectangle_integral(xp, yp, kappa))
                    / (h * h)
            }
        };
    }
    SampledFunction::from_values(grid, values)
}

/// The analytic rearrangement of the critical profile against its predicted
/// shape: `φ_c` is radial decreasing, so
/// `(φ_c)*(s) = φ_c((s/ω_n)^{1/n} e_1)`, and the bound says this sits under
/// `C s^{-1} w(s)^{-n/θ-1}`. Returns the largest ratio over `s_grid`.
pub fn phi_c_rearrangement_bound(n: usize, theta: f64, s_grid: &[f64]) -> Result<f64> {
    check_theta(theta)?;
    check_positive_grid("s_grid", s_grid)?;
    let omega = unit_ball_volume(n)?;
    let nf = n as f64;
    let kappa = nf / theta + 1.0;
    let max = s_grid
        .iter()
        .map(|&s| {
            let star = (omega / s) * log_weight((s / omega).powf(1.0 / nf)).powf(-kappa);
            let bound = s.recip() * log_weight(s).powf(-kappa);
            star / bound
        })
        .fold(0.0, f64::max);
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::NonFinite(format!("rearrangement-bound ratio {max}")));
    }
    Ok(max)
}
