//! Picard construction of mild solutions to the critical semilinear
//! fractional heat problem `∂_t u + (-Δ)^{θ/2} u = |u|^{p-1} u` with
//! `p = 1 + θ/n` — the exponent at which the nonlinearity exactly matches
//! the smoothing of the semigroup.
//!
//! The fixed point of `Φ(u)(t) = S_θ(t)φ + ∫_0^t S_θ(t-s) F_p(u(s)) ds`
//! is approached by sweeps `u^{(k+1)} = Φ(u^{(k)})` starting from the
//! linear flow `u^{(0)}(t) = S_θ(t)φ`. Each sweep is evaluated in Fourier
//! space with a first-order exponential product rule: on a uniform time
//! grid of step `Δt` the panel `[t_j, t_{j+1}]` contributes
//! `S_θ(t_k - t_{j+1}) · M(Δt) · F_p(u(t_j))`, where `M` is the exact
//! multiplier `(1 - e^{-Δt|ξ|^θ})/|ξ|^θ` (value `Δt` at `ξ = 0`), so the
//! kernel's stiffness as `s → t` is absorbed analytically.
//!
//! Convergence, stagnation, and divergence are reported through a status
//! flag rather than errors: iterates whose sup norm passes a configurable
//! multiple of the initial one (or turn non-finite) mark the trajectory
//! `Blowup`, which is how the threshold scan separates small data from
//! large.

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::fft;
use crate::frackernel::{semigroup_apply, KernelSpec};
use crate::sampled::{GridSpec, SampledFunction};
use crate::zygmund::ul_frak_norm;
use crate::{log_weight, Error, Result};

/// Validated inputs of a Picard run. `p` is always the critical
/// `1 + θ/n`; it is derived, never configured.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub kernel: KernelSpec,
    pub grid: GridSpec,
    /// Time horizon `T`.
    pub horizon: f64,
    /// Number of uniform time steps; snapshots live at `t_k = kT/N_t`.
    pub time_steps: usize,
    /// Secondary norm exponent `γ ∈ [0, n/θ)` of the middle metric.
    pub gamma: f64,
    /// Picard sweep budget.
    pub max_sweeps: usize,
    /// Stop once the full metric distance between sweeps drops below this.
    pub tolerance: f64,
    /// Sup-norm cap as a multiple of `‖φ‖_∞`; crossing it flags blow-up.
    pub blowup_factor: f64,
}

impl SolverConfig {
    pub fn new(
        kernel: KernelSpec,
        grid: GridSpec,
        horizon: f64,
        time_steps: usize,
        gamma: f64,
    ) -> Result<Self> {
        if kernel.dim() != grid.dim {
            return Err(Error::GridMismatch(format!(
                "kernel dimension {} vs grid dimension {}",
                kernel.dim(),
                grid.dim
            )));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(
                "horizon",
                format!("must be positive and finite, got {horizon}"),
            ));
        }
        if time_steps == 0 {
            return Err(Error::invalid("time_steps", "need at least one step"));
        }
        let alpha = kernel.dim() as f64 / kernel.theta();
        if !(0.0 <= gamma && gamma < alpha) {
            return Err(Error::invalid(
                "gamma",
                format!("need 0 <= gamma < n/theta = {alpha}, got {gamma}"),
            ));
        }
        Ok(SolverConfig {
            kernel,
            grid,
            horizon,
            time_steps,
            gamma,
            max_sweeps: 15,
            tolerance: 1e-9,
            blowup_factor: 1e8,
        })
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Result<Self> {
        if max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps", "need at least one sweep"));
        }
        self.max_sweeps = max_sweeps;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::invalid(
                "tolerance",
                format!("must be positive and finite, got {tolerance}"),
            ));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_blowup_factor(mut self, factor: f64) -> Result<Self> {
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(Error::invalid(
                "blowup_factor",
                format!("must exceed 1, got {factor}"),
            ));
        }
        self.blowup_factor = factor;
        Ok(self)
    }

    /// The critical exponent `p = 1 + θ/n`.
    pub fn p(&self) -> f64 {
        1.0 + self.kernel.theta() / self.kernel.dim() as f64
    }

    /// The primary weight exponent `α = n/θ`.
    pub fn alpha(&self) -> f64 {
        self.kernel.dim() as f64 / self.kernel.theta()
    }

    /// Ball radius `T^{1/θ}` of the uniformly local norms.
    pub fn rho(&self) -> f64 {
        self.horizon.powf(1.0 / self.kernel.theta())
    }

    /// Uniform time step `T/N_t`.
    pub fn dt(&self) -> f64 {
        self.horizon / self.time_steps as f64
    }

    /// The snapshot times `0, T/N_t, …, T`; metrics skip the first entry.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.time_steps)
            .map(|k| self.horizon * k as f64 / self.time_steps as f64)
            .collect()
    }

    fn check_phi(&self, phi: &SampledFunction) -> Result<()> {
        if phi.grid != self.grid {
            return Err(Error::GridMismatch(
                "initial data sampled on a different grid".into(),
            ));
        }
        if !phi.values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("initial data has non-finite values".into()));
        }
        Ok(())
    }
}

/// How a Picard run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    MaxSweeps,
    Blowup,
}

impl SolverStatus {
    /// Stable uppercase label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            SolverStatus::Converged => "CONVERGED",
            SolverStatus::MaxSweeps => "MAX_SWEEPS",
            SolverStatus::Blowup => "BLOWUP",
        }
    }
}

/// A time-gridded iterate with its metric traces and sweep history.
///
/// `times` and `snapshots` have `N_t + 1` entries starting at `t = 0`;
/// the metric traces `m1`, `m2`, `m3` start at `t_1` and run over the
/// longest prefix on which the snapshots are finite (all of them except
/// on a `Blowup` trajectory).
#[derive(Debug, Clone)]
pub struct SolutionTrajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<SampledFunction>,
    /// `|||u(t)|||_{1,α;T^{1/θ}}`.
    pub m1: Vec<f64>,
    /// `t^{(n/θ)(1-1/p)} w(t)^{-γ/p+α} |||u(t)|||_{p,γ;T^{1/θ}}`.
    pub m2: Vec<f64>,
    /// `t^{n/θ} w(t)^α ‖u(t)‖_∞`.
    pub m3: Vec<f64>,
    /// Per-sweep metric distances `(d¹, d², d³)` between iterates.
    pub sweep_distances: Vec<[f64; 3]>,
    pub status: SolverStatus,
    /// First time at which blow-up was flagged, when `status` is `Blowup`.
    pub event_time: Option<f64>,
}

impl SolutionTrajectory {
    /// Largest of the three metric suprema traces, each over its prefix.
    pub fn metric_suprema(&self) -> [f64; 3] {
        [sup(&self.m1), sup(&self.m2), sup(&self.m3)]
    }

    /// Sup norm at each snapshot time, `t = 0` included.
    pub fn sup_norms(&self) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(|u| u.lp_norm(f64::INFINITY))
            .collect()
    }

    /// Ratios of successive total sweep distances; an exact-zero
    /// predecessor (already at the fixed point) contributes no ratio.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        let totals: Vec<f64> = self
            .sweep_distances
            .iter()
            .map(|d| d[0] + d[1] + d[2])
            .collect();
        totals
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }

    /// Worst contraction ratio over the final `count` sweep pairs, or
    /// `None` when the run produced no ratios at all.
    pub fn final_contraction(&self, count: usize) -> Option<f64> {
        let ratios = self.contraction_ratios();
        if ratios.is_empty() {
            return None;
        }
        Some(
            ratios[ratios.len().saturating_sub(count)..]
                .iter()
                .fold(0.0, |m, r| m.max(*r)),
        )
    }
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(*v))
}

/// The linear flow `u(t_k) = S_θ(t_k)φ` as a trajectory (the Picard
/// starting iterate, and the exact solution of the `F_p ≡ 0` problem).
pub fn linear_flow(cfg: &SolverConfig, phi: &SampledFunction) -> Result<SolutionTrajectory> {
    cfg.check_phi(phi)?;
    let theta = cfg.kernel.theta();
    let snapshots = cfg
        .times()
        .into_par_iter()
        .map(|t| semigroup_apply(theta, t, phi))
        .collect::<Result<Vec<_>>>()?;
    finish(cfg, snapshots, Vec::new(), SolverStatus::Converged, None)
}

/// One application of the Duhamel map `Φ` to a trajectory. Non-finite
/// input values (or a nonlinearity that overflows) propagate as a
/// `Blowup` status, never as an error.
pub fn duhamel_map(
    cfg: &SolverConfig,
    phi: &SampledFunction,
    u: &SolutionTrajectory,
) -> Result<SolutionTrajectory> {
    cfg.check_phi(phi)?;
    if u.snapshots.len() != cfg.time_steps + 1 {
        return Err(Error::invalid(
            "u",
            format!(
                "trajectory has {} snapshots, config wants {}",
                u.snapshots.len(),
                cfg.time_steps + 1
            ),
        ));
    }
    for snap in &u.snapshots {
        if snap.grid != cfg.grid {
            return Err(Error::GridMismatch(
                "trajectory snapshot on a different grid".into(),
            ));
        }
    }
    let propagator = Propagator::new(cfg);
    match propagator.sweep(cfg, phi, &u.snapshots) {
        Ok(snapshots) => finish(cfg, snapshots, u.sweep_distances.clone(), u.status, u.event_time),
        Err(bad) => finish(
            cfg,
            u.snapshots.clone(),
            u.sweep_distances.clone(),
            SolverStatus::Blowup,
            Some(cfg.times()[bad]),
        ),
    }
}

/// Iterates `u^{(k+1)} = Φ(u^{(k)})` from the linear flow until the full
/// metric distance between sweeps drops below the configured tolerance,
/// the sweep budget runs out, or the iterate blows past the sup-norm cap.
pub fn picard_solve(cfg: &SolverConfig, phi: &SampledFunction) -> Result<SolutionTrajectory> {
    cfg.check_phi(phi)?;
    let initial_sup = phi.lp_norm(f64::INFINITY);
    let cap = cfg.blowup_factor * initial_sup;
    let propagator = Propagator::new(cfg);
    let theta = cfg.kernel.theta();
    let mut current: Vec<SampledFunction> = cfg
        .times()
        .into_par_iter()
        .map(|t| semigroup_apply(theta, t, phi))
        .collect::<Result<Vec<_>>>()?;
    let mut distances: Vec<[f64; 3]> = Vec::new();
    for _ in 0..cfg.max_sweeps {
        let next = match propagator.sweep(cfg, phi, &current) {
            Ok(next) => next,
            Err(bad) => {
                let t = cfg.times()[bad];
                return finish(cfg, current, distances, SolverStatus::Blowup, Some(t));
            }
        };
        if initial_sup > 0.0 {
            if let Some(bad) = first_excess(&next, cap) {
                let t = cfg.times()[bad];
                return finish(cfg, next, distances, SolverStatus::Blowup, Some(t));
            }
        }
        let d = metric_distance(cfg, &next, &current)?;
        distances.push(d);
        current = next;
        if d[0] + d[1] + d[2] < cfg.tolerance {
            return finish(cfg, current, distances, SolverStatus::Converged, None);
        }
    }
    finish(cfg, current, distances, SolverStatus::MaxSweeps, None)
}

/// Index of the first snapshot that is non-finite or beyond the cap.
fn first_excess(snapshots: &[SampledFunction], cap: f64) -> Option<usize> {
    snapshots.iter().position(|snap| {
        !snap.values.iter().all(|v| v.is_finite()) || snap.lp_norm(f64::INFINITY) > cap
    })
}

/// The three weighted norm traces of a finite trajectory, `t = 0`
/// excluded, together with their suprema.
#[derive(Debug, Clone)]
pub struct MetricTraces {
    pub times: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub m3: Vec<f64>,
}

impl MetricTraces {
    pub fn suprema(&self) -> [f64; 3] {
        [sup(&self.m1), sup(&self.m2), sup(&self.m3)]
    }
}

/// Evaluates the three metric traces of `u` on the full time grid.
/// Requires every snapshot to be finite.
pub fn xt_metrics(cfg: &SolverConfig, u: &SolutionTrajectory) -> Result<MetricTraces> {
    if u.snapshots.len() != cfg.time_steps + 1 {
        return Err(Error::invalid(
            "u",
            "trajectory and config disagree on the time grid",
        ));
    }
    for (k, snap) in u.snapshots.iter().enumerate() {
        if !snap.values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "snapshot at t = {} has non-finite values",
                cfg.times()[k]
            )));
        }
    }
    let rows = metric_rows(cfg, &u.snapshots, u.snapshots.len())?;
    let times = cfg.times()[1..].to_vec();
    Ok(MetricTraces {
        times,
        m1: rows.iter().map(|r| r[0]).collect(),
        m2: rows.iter().map(|r| r[1]).collect(),
        m3: rows.iter().map(|r| r[2]).collect(),
    })
}

/// How the fixed point attaches to its data as `t → 0`: the uniformly
/// local norm of `u*(t) - S_θ(t)φ` and the pairing gap
/// `|⟨u*(t) - φ, η⟩|` against a fixed smooth bump, over the first decade
/// of the time grid (`t ≤ T/10`), in increasing `t`.
#[derive(Debug, Clone)]
pub struct InitialTrace {
    pub times: Vec<f64>,
    pub norm_gap: Vec<f64>,
    pub pairing_gap: Vec<f64>,
}

impl InitialTrace {
    /// Gap at the earliest time over gap at the decade's edge; the trace
    /// vanishes toward `t = 0` when this is small. A trace that is zero
    /// throughout (linear data) reports 0.
    pub fn limit_ratio(&self) -> f64 {
        ratio_toward_zero(&self.norm_gap)
    }

    /// Same ratio for the distributional pairing gap.
    pub fn pairing_ratio(&self) -> f64 {
        ratio_toward_zero(&self.pairing_gap)
    }
}

fn ratio_toward_zero(trace: &[f64]) -> f64 {
    let first = trace.first().copied().unwrap_or(0.0);
    let last = trace.last().copied().unwrap_or(0.0);
    if last == 0.0 {
        if first == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        first / last
    }
}

/// Traces how a converged trajectory attains its initial data: the
/// uniformly local `(1, β)` norm of `u(t) - S_θ(t)φ` and the smooth-bump
/// pairing gap over the first decade of the grid. Errors unless `u`
/// converged and `β ∈ [0, n/θ)`.
pub fn initial_trace_check(
    cfg: &SolverConfig,
    phi: &SampledFunction,
    u: &SolutionTrajectory,
    beta: f64,
) -> Result<InitialTrace> {
    cfg.check_phi(phi)?;
    if u.status != SolverStatus::Converged {
        return Err(Error::NotConverged(format!(
            "initial trace needs a converged trajectory, status is {}",
            u.status.label()
        )));
    }
    let alpha = cfg.alpha();
    if !(0.0 <= beta && beta < alpha) {
        return Err(Error::invalid(
            "beta",
            format!("need 0 <= beta < n/theta = {alpha}, got {beta}"),
        ));
    }
    let times = cfg.times();
    let edge = cfg.horizon / 10.0;
    let window: Vec<usize> = (1..times.len()).filter(|&k| times[k] <= edge).collect();
    if window.len() < 2 {
        return Err(Error::invalid(
            "time_steps",
            format!(
                "the first decade t <= {edge} holds {} grid points; need at least 2",
                window.len()
            ),
        ));
    }
    let theta = cfg.kernel.theta();
    let rho = cfg.rho();
    let eta = bump(cfg.grid);
    let phi_pairing = phi.product(&eta)?.integral();
    let rows = window
        .par_iter()
        .map(|&k| {
            let t = times[k];
            let diff = u.snapshots[k].axpy(-1.0, &semigroup_apply(theta, t, phi)?)?;
            let gap = ul_frak_norm(&diff, 1.0, beta, rho)?;
            let pairing =
                (u.snapshots[k].product(&eta)?.integral() - phi_pairing).abs();
            Ok((t, gap, pairing))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InitialTrace {
        times: rows.iter().map(|r| r.0).collect(),
        norm_gap: rows.iter().map(|r| r.1).collect(),
        pairing_gap: rows.iter().map(|r| r.2).collect(),
    })
}

/// A fixed smooth compactly supported bump, `1` at the origin and
/// vanishing to all orders at `|x| = L/2`.
fn bump(grid: GridSpec) -> SampledFunction {
    let radius = grid.half_width * 0.5;
    let profile = move |x: &[f64]| {
        let r2 = x.iter().map(|v| v * v).sum::<f64>() / (radius * radius);
        if r2 < 1.0 {
            (1.0 - 1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    };
    SampledFunction::sample(grid, profile).expect("bump sampling cannot fail on a valid grid")
}

/// The refined small/large-data bracket of a threshold scan, with the
/// trajectories archived at both endpoints.
#[derive(Debug, Clone)]
pub struct ThresholdBracket {
    pub epsilon_ok: f64,
    pub epsilon_blow: f64,
    pub converged: SolutionTrajectory,
    pub diverged: SolutionTrajectory,
}

/// Which side of the dichotomy a run lands on. `MaxSweeps` runs are
/// classified by whether the sweep distances were still shrinking.
fn converging_side(traj: &SolutionTrajectory) -> bool {
    match traj.status {
        SolverStatus::Converged => true,
        SolverStatus::Blowup => false,
        SolverStatus::MaxSweeps => {
            let totals: Vec<f64> = traj
                .sweep_distances
                .iter()
                .map(|d| d[0] + d[1] + d[2])
                .collect();
            match (totals.first(), totals.last()) {
                (Some(first), Some(last)) => last <= first,
                _ => false,
            }
        }
    }
}

/// Runs `picard_solve` on `ε · profile` across the ascending grid, then
/// bisects geometrically until the bracket `[ε_ok, ε_blow]` around the
/// small/large-data threshold is tighter than a factor 3.5. Errors with a
/// widen-grid message when the grid never changes side.
pub fn epsilon_threshold_scan(
    cfg: &SolverConfig,
    profile: &SampledFunction,
    eps_grid: &[f64],
) -> Result<ThresholdBracket> {
    cfg.check_phi(profile)?;
    if !(profile.lp_norm(f64::INFINITY) > 0.0) {
        return Err(Error::invalid("profile", "threshold scan needs nonzero data"));
    }
    if eps_grid.is_empty() {
        return Err(Error::invalid("eps_grid", "need at least one epsilon"));
    }
    if !eps_grid.iter().all(|e| e.is_finite() && *e > 0.0) {
        return Err(Error::invalid(
            "eps_grid",
            "epsilons must be positive and finite",
        ));
    }
    if !eps_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("eps_grid", "epsilons must be strictly ascending"));
    }
    let mut ok: Option<(f64, SolutionTrajectory)> = None;
    let mut blow: Option<(f64, SolutionTrajectory)> = None;
    for &eps in eps_grid {
        let traj = picard_solve(cfg, &profile.map(|v| eps * v))?;
        if converging_side(&traj) {
            if blow.is_some() {
                return Err(Error::ScanRange(format!(
                    "epsilon = {eps} converges above a blowing-up point; dichotomy not monotone on this grid"
                )));
            }
            ok = Some((eps, traj));
        } else if blow.is_none() {
            blow = Some((eps, traj));
        }
    }
    let (mut eps_ok, mut ok_traj) = ok.ok_or_else(|| {
        Error::ScanRange("every epsilon blows up; widen the grid downward".into())
    })?;
    let (mut eps_blow, mut blow_traj) = blow.ok_or_else(|| {
        Error::ScanRange("every epsilon converges; widen the grid upward".into())
    })?;
    while eps_blow / eps_ok > 3.5 {
        let mid = (eps_ok * eps_blow).sqrt();
        let traj = picard_solve(cfg, &profile.map(|v| mid * v))?;
        if converging_side(&traj) {
            eps_ok = mid;
            ok_traj = traj;
        } else {
            eps_blow = mid;
            blow_traj = traj;
        }
    }
    Ok(ThresholdBracket {
        epsilon_ok: eps_ok,
        epsilon_blow: eps_blow,
        converged: ok_traj,
        diverged: blow_traj,
    })
}

/// Re-runs the solver at five audit amplitudes — three strictly below
/// `ε_ok`, two strictly above `ε_blow` — and reports each status. A
/// monotone dichotomy converges below the bracket and blows up above it.
pub fn threshold_audit(
    cfg: &SolverConfig,
    profile: &SampledFunction,
    bracket: &ThresholdBracket,
) -> Result<Vec<(f64, SolverStatus)>> {
    cfg.check_phi(profile)?;
    let points = [
        0.3 * bracket.epsilon_ok,
        0.6 * bracket.epsilon_ok,
        0.9 * bracket.epsilon_ok,
        1.5 * bracket.epsilon_blow,
        3.0 * bracket.epsilon_blow,
    ];
    points
        .into_iter()
        .map(|eps| {
            let traj = picard_solve(cfg, &profile.map(|v| eps * v))?;
            Ok((eps, traj.status))
        })
        .collect()
}

/// Frozen spectral data of one time step: the semigroup multiplier
/// `e^{-Δt|ξ|^θ}` and the Duhamel panel weight `(1 - e^{-Δt|ξ|^θ})/|ξ|^θ`.
struct Propagator {
    step: Vec<f64>,
    weight: Vec<f64>,
}

impl Propagator {
    fn new(cfg: &SolverConfig) -> Propagator {
        let dt = cfg.dt();
        let theta = cfg.kernel.theta();
        let mut step = Vec::new();
        let mut weight = Vec::new();
        for xi in fft::xi_magnitudes(cfg.grid) {
            let sigma = xi.powf(theta);
            step.push((-dt * sigma).exp());
            weight.push(if sigma == 0.0 {
                dt
            } else {
                -(-dt * sigma).exp_m1() / sigma
            });
        }
        Propagator { step, weight }
    }

    /// One full Duhamel sweep in Fourier space. The running sums
    /// `L_k = E^k φ̂` (linear flow) and `W_{k+1} = E·W_k + M·F̂_k`
    /// (accumulated panels) reproduce the product rule with one forward
    /// transform per nonlinearity snapshot and one inverse per target
    /// time. Returns the index of the first snapshot whose nonlinearity
    /// is non-finite instead of propagating garbage spectra.
    fn sweep(
        &self,
        cfg: &SolverConfig,
        phi: &SampledFunction,
        snapshots: &[SampledFunction],
    ) -> std::result::Result<Vec<SampledFunction>, usize> {
        let p = cfg.p();
        let n_t = cfg.time_steps;
        let forced: Vec<std::result::Result<Vec<Complex<f64>>, usize>> = snapshots[..n_t]
            .par_iter()
            .enumerate()
            .map(|(j, snap)| {
                let force = snap.signed_power(p);
                if force.values.iter().all(|v| v.is_finite()) {
                    Ok(fft::forward(&force))
                } else {
                    Err(j)
                }
            })
            .collect();
        let mut force_spectra = Vec::with_capacity(n_t);
        for item in forced {
            force_spectra.push(item?);
        }
        let mut linear = fft::forward(phi);
        let mut panels = vec![Complex::new(0.0, 0.0); linear.len()];
        let mut out = Vec::with_capacity(n_t + 1);
        out.push(phi.clone());
        for (k, force) in force_spectra.iter().enumerate() {
            for i in 0..linear.len() {
                linear[i] *= self.step[i];
                panels[i] = panels[i] * self.step[i] + force[i] * self.weight[i];
            }
            let spectrum: Vec<Complex<f64>> =
                linear.iter().zip(&panels).map(|(l, w)| l + w).collect();
            let values = fft::inverse_real(cfg.grid, spectrum);
            out.push(
                SampledFunction::from_values(cfg.grid, values)
                    .expect("spectral sweep preserves the grid"),
            );
            let _ = k;
        }
        Ok(out)
    }
}

/// The three metric distances between two snapshot sets, suprema over
/// the discrete time grid (`t = 0` excluded, where both iterates agree).
fn metric_distance(
    cfg: &SolverConfig,
    a: &[SampledFunction],
    b: &[SampledFunction],
) -> Result<[f64; 3]> {
    let times = cfg.times();
    let rows = (1..times.len())
        .into_par_iter()
        .map(|k| {
            let diff = a[k].axpy(-1.0, &b[k])?;
            weighted_norms(cfg, times[k], &diff)
        })
        .collect::<Result<Vec<[f64; 3]>>>()?;
    Ok(rows.iter().fold([0.0; 3], |m, r| {
        [m[0].max(r[0]), m[1].max(r[1]), m[2].max(r[2])]
    }))
}

/// Metric rows for snapshots `1..limit`; the internal path lets a
/// blow-up trajectory report the finite prefix of its traces.
fn metric_rows(
    cfg: &SolverConfig,
    snapshots: &[SampledFunction],
    limit: usize,
) -> Result<Vec<[f64; 3]>> {
    let times = cfg.times();
    (1..limit)
        .into_par_iter()
        .map(|k| weighted_norms(cfg, times[k], &snapshots[k]))
        .collect()
}

/// The triple `(m1, m2, m3)` of one snapshot at time `t`.
fn weighted_norms(cfg: &SolverConfig, t: f64, f: &SampledFunction) -> Result<[f64; 3]> {
    let alpha = cfg.alpha();
    let p = cfg.p();
    let rho = cfg.rho();
    let w = log_weight(t);
    let m1 = ul_frak_norm(f, 1.0, alpha, rho)?;
    let m2 = t.powf(alpha * (1.0 - 1.0 / p))
        * w.powf(-cfg.gamma / p + alpha)
        * ul_frak_norm(f, p, cfg.gamma, rho)?;
    let m3 = t.powf(alpha) * w.powf(alpha) * f.lp_norm(f64::INFINITY);
    Ok([m1, m2, m3])
}

/// Assembles a trajectory, computing metric traces over the longest
/// finite snapshot prefix.
fn finish(
    cfg: &SolverConfig,
    snapshots: Vec<SampledFunction>,
    sweep_distances: Vec<[f64; 3]>,
    status: SolverStatus,
    event_time: Option<f64>,
) -> Result<SolutionTrajectory> {
    let finite_prefix = snapshots
        .iter()
        .position(|snap| !snap.values.iter().all(|v| v.is_finite()))
        .unwrap_or(snapshots.len());
    let rows = metric_rows(cfg, &snapshots, finite_prefix)?;
    Ok(SolutionTrajectory {
        times: cfg.times(),
        snapshots,
        m1: rows.iter().map(|r| r[0]).collect(),
        m2: rows.iter().map(|r| r[1]).collect(),
        m3: rows.iter().map(|r| r[2]).collect(),
        sweep_distances,
        status,
        event_time,
    })
}
