//! One-dimensional quadrature used throughout the crate.
//!
//! The workhorse is an adaptive Gauss–Kronrod 7–15 rule. On top of it sit
//! helpers for the improper integrals the norm and estimate modules need:
//! integrals over `(0, b]` whose integrand has an integrable logarithmic
//! singularity at the origin, integrals over `[a, ∞)` with power-law decay,
//! and slowly convergent oscillatory series summed by repeated averaging.

/// Gauss–Kronrod 15-point abscissae on `[-1, 1]`, non-negative half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_4,
    0.209_482_141_084_727_828_0,
];

/// Embedded Gauss 7-point weights (odd-index abscissae of [`XGK`]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_945_0,
    0.417_959_183_673_469_387_8,
];

/// One Gauss–Kronrod 7–15 evaluation on `[a, b]`.
///
/// Returns the 15-point estimate and the absolute difference to the embedded
/// 7-point estimate, which serves as the local error indicator.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptively integrate `f` over `[a, b]`.
///
/// Bisects until each panel's Kronrod/Gauss discrepancy is below its share
/// of `tol_abs + tol_rel * |integral|`. The recursion depth is capped; on
/// pathological integrands the best available estimate is returned rather
/// than looping forever.
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol_abs: f64, tol_rel: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _) = gk15(f, a, b);
    let budget = tol_abs + tol_rel * whole.abs();
    refine(f, a, b, whole, budget.max(f64::MIN_POSITIVE), 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
    const MAX_DEPTH: usize = 30;
    let mid = 0.5 * (a + b);
    let (left, le) = gk15(f, a, mid);
    let (right, re) = gk15(f, mid, b);
    let err = le + re + (left + right - whole).abs();
    // Below a few ulps of the panel values the discrepancy estimate is
    // rounding noise; chasing a tolerance under that floor only burns an
    // exponential number of panels without gaining accuracy.
    let noise = 4.0 * f64::EPSILON * (left.abs() + right.abs());
    if err <= tol.max(noise) || depth >= MAX_DEPTH || mid <= a || mid >= b {
        return left + right;
    }
    refine(f, a, mid, left, 0.5 * tol, depth + 1) + refine(f, mid, b, right, 0.5 * tol, depth + 1)
}

/// Integrate `f` over `(0, b]` when `f` may blow up (integrably) at the
/// origin, e.g. `τ^{-1} [log(e + 1/τ)]^α` with `α < -1`.
///
/// Substitutes `τ = e^{-u}`, turning the singular end into a slowly
/// decaying tail at `u → ∞` handled by [`integrate_to_infinity`]. The
/// caller supplies the transformed density `τ·f(τ)` as a function of
/// `(τ, u)` with `u = log(1/τ)`: near the origin `τ` underflows to zero
/// while `u` stays informative, so integrands must be written in terms of
/// whichever argument is numerically robust (log weights via `u`, see
/// [`crate::log_weight_u`]).
pub fn integrate_left_singular<F: Fn(f64, f64) -> f64>(density: &F, b: f64, tol: f64) -> f64 {
    assert!(b > 0.0, "upper limit must be positive");
    let g = |u: f64| density((-u).exp(), u);
    integrate_to_infinity(&g, (1.0 / b).ln(), tol)
}

/// Integrate `f` over `[a, ∞)` for integrands with eventual monotone decay
/// (power-law or faster).
///
/// Sums geometrically growing panels, each integrated adaptively, and stops
/// once consecutive panel contributions are negligible; a geometric
/// extrapolation of the remaining tail is added so slowly decaying tails
/// (`u^{-1.2}` and the like) still come out to full accuracy.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> f64 {
    let mut lo = a;
    let mut width = if a.abs() > 1.0 { a.abs() } else { 1.0 };
    let mut total = 0.0;
    let mut prev_panel: Option<f64> = None;
    for _ in 0..200 {
        let hi = lo + width;
        let panel = adaptive_gk(f, lo, hi, 0.05 * tol, 0.05 * tol);
        total += panel;
        if let Some(prev) = prev_panel {
            let scale = total.abs().max(1e-300);
            if panel.abs() < tol * scale && prev.abs() < tol * scale {
                break;
            }
            // Geometric tail estimate once the decay ratio settles below 1.
            if panel.abs() < prev.abs() {
                let r = panel.abs() / prev.abs();
                if r < 0.9 && panel.abs() * r / (1.0 - r) < 0.5 * tol * scale {
                    total += panel * r / (1.0 - r);
                    break;
                }
            }
        }
        prev_panel = Some(panel);
        lo = hi;
        width *= 2.0;
    }
    total
}

/// Integrate over `(0, ∞)` with a possible integrable singularity at 0.
///
/// Takes the same `(τ, u) ↦ τ·f(τ)` density as
/// [`integrate_left_singular`]; `scale` splits the two regimes, choose it
/// near where the integrand peaks.
pub fn integrate_zero_to_infinity<F: Fn(f64, f64) -> f64>(density: &F, scale: f64, tol: f64) -> f64 {
    assert!(scale > 0.0 && scale.is_finite());
    let upper = |t: f64| density(t, (1.0 / t).ln()) / t;
    integrate_left_singular(density, scale, tol) + integrate_to_infinity(&upper, scale, tol)
}

/// Locate the maximum of a continuous `f` on `[a, b]` by golden-section
/// search, returning `(argmax, max)`.
///
/// Golden section assumes unimodality; callers that cannot guarantee it
/// combine this with a scan over a candidate grid, so a local maximum is
/// acceptable here.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    if lo == hi {
        return (lo, f(lo));
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if f1 >= f2 && f1 >= fm {
        (x1, f1)
    } else if f2 >= fm {
        (x2, f2)
    } else {
        (mid, fm)
    }
}

/// Sum an eventually alternating, slowly decaying series of panel
/// contributions by repeated pairwise averaging of partial sums (an Euler
/// transformation).
///
/// `terms` are the raw panel integrals in order. Returns the accelerated
/// sum. With a few dozen terms this reaches near machine precision on
/// series whose direct summation would need millions of terms.
pub fn euler_sum(terms: &[f64]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let mut row: Vec<f64> = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for &t in terms {
        acc += t;
        row.push(acc);
    }
    // Candidate estimates are the final entries of successive averaged rows;
    // keep the one whose step from the previous candidate is smallest. The
    // raw partial sum must be allowed to win outright: for a fast-decaying
    // series it is already within its last term of the limit, and deeper
    // averaging only drags early terms back in.
    let mut best = *row.last().unwrap();
    let mut best_spread = if row.len() > 1 {
        (row[row.len() - 1] - row[row.len() - 2]).abs()
    } else {
        0.0
    };
    let mut prev_last = best;
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
        let last = *row.last().unwrap();
        let spread = (last - prev_last).abs();
        prev_last = last;
        if spread < best_spread {
            best_spread = spread;
            best = last;
        }
    }
    best
}
