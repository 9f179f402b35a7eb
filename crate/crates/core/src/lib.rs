//! Numerical toolkit for rearrangement-based function norms and the
//! fractional heat flow on periodic grids.
//!
//! The crate is organised bottom-up:
//!
//! * [`sampled`] — uniform periodic grids in one and two dimensions and the
//!   piecewise-constant grid functions everything else consumes.
//! * [`rearrange`] — non-increasing rearrangements, distribution functions,
//!   maximal averages, and the classical convolution/product inequalities.
//! * [`zygmund`] — four families of log-refined Lorentz/Zygmund norms built
//!   on rearrangements, their uniformly local variants, and the algebraic
//!   identities (Hölder, power, log-interpolation) they satisfy.
//! * [`frackernel`] — the fractional heat kernel `exp(-t(-Δ)^{θ/2})`:
//!   closed forms, Fourier inversion, a polynomial majorant, and the
//!   spectral semigroup on the torus.
//! * [`estimates`] — quantitative weighted-integral and semigroup decay
//!   estimates turned into bounded-ratio sweeps, plus the critical
//!   singular profile they are sharp on.
//! * [`solver`] — Picard iteration for the critical semilinear heat
//!   equation `∂_t u + (-Δ)^{θ/2} u = |u|^{p-1} u` at `p = 1 + θ/n`.
//!
//! All floating-point work is `f64`. Functions that can fail return
//! [`Result`] with [`Error`]; purely numeric maps return values directly.

pub mod error;
pub mod estimates;
mod fft;
pub mod frackernel;
pub mod quad;
pub mod rearrange;
pub mod sampled;
pub mod solver;
pub mod zygmund;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// `log(e + 1/s)`, the slowly varying weight attached to every norm family
/// in [`zygmund`]. Decreasing in `s`, tends to `1` as `s → ∞` and to `+∞`
/// logarithmically as `s → 0+`.
#[inline]
pub fn log_weight(s: f64) -> f64 {
    debug_assert!(s > 0.0, "log weight needs s > 0, got {s}");
    (std::f64::consts::E + 1.0 / s).ln()
}

/// [`log_weight`] expressed through `u = log(1/s)`: `log(e + e^u) =
/// u + log(1 + e^{1-u})`.
///
/// Stays accurate where `s = e^{-u}` itself underflows, which the
/// origin-singular integrals in [`quad`] rely on.
#[inline]
pub fn log_weight_u(u: f64) -> f64 {
    if u > 0.0 {
        u + (1.0 - u).exp().ln_1p()
    } else {
        // e^{1-u} would overflow for very negative u; here s >= 1 and the
        // direct form is exact.
        (std::f64::consts::E + u.exp()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::{log_weight, log_weight_u};

    #[test]
    fn weight_limits_and_monotonicity() {
        // w(s) -> 1 as s -> ∞, grows like log(1/s) as s -> 0, decreasing.
        assert!((log_weight(1e12) - 1.0).abs() < 1e-11);
        assert!((log_weight(1e-12) - (1e12f64).ln()).abs() < 1e-10);
        // Strictly decreasing while 1/s is resolvable against e; once the
        // sum saturates the weight is constant at ~1.
        let mut prev = f64::INFINITY;
        for k in -60..=14 {
            let w = log_weight(10f64.powi(k));
            assert!(w < prev && w >= 1.0 - 1e-15, "k={k}: {w} vs {prev}");
            prev = w;
        }
    }

    #[test]
    fn weight_u_form_matches_direct_form() {
        for &s in &[1e-8, 1e-3, 0.5, 1.0, 3.0, 1e4] {
            let direct = log_weight(s);
            let via_u = log_weight_u((1.0 / s).ln());
            assert!(
                ((direct - via_u) / direct).abs() < 1e-15,
                "s={s}: {direct} vs {via_u}"
            );
        }
        // Beyond underflow only the u form survives; check the asymptote.
        assert!((log_weight_u(800.0) - 800.0).abs() < 1e-12);
    }
}
