//! Local-unitary switching: X-preserving unitaries, ESD-time search, and
//! sweeps over the switching time.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::qstate::{self, DensityMatrix, XState};
use crate::thermal::{self, ReservoirParams};

/// Angle tolerance for the X-preservation test.
pub const TAU_ANGLE: f64 = 1e-12;

/// Angles of one single-qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalUnitaryParams {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
}

impl LocalUnitaryParams {
    pub fn identity() -> Self {
        Self::default()
    }

    /// θ = π/2 with all phases zero: the real matrix (0, −1; 1, 0).
    pub fn flip() -> Self {
        Self {
            theta: FRAC_PI_2,
            ..Self::default()
        }
    }

    fn is_finite(&self) -> bool {
        [self.theta, self.alpha, self.beta, self.omega].iter().all(|x| x.is_finite())
    }
}

/// `[[cosθ e^{iα}, −sinθ e^{i(α−ω)}], [sinθ e^{i(β+ω)}, cosθ e^{iβ}]]`
pub fn unitary2(p: &LocalUnitaryParams) -> Mat2 {
    let (s, c) = p.theta.sin_cos();
    let e = |phi: f64| Complex64::from_polar(1.0, phi);
    [
        [c * e(p.alpha), -s * e(p.alpha - p.omega)],
        [s * e(p.beta + p.omega), c * e(p.beta)],
    ]
}

fn is_half_pi_multiple(theta: f64) -> bool {
    let r = theta / FRAC_PI_2;
    (r - r.round()).abs() * FRAC_PI_2 <= TAU_ANGLE
}

/// Both θ are integer multiples of π/2.
pub fn is_x_preserving(a: &LocalUnitaryParams, b: &LocalUnitaryParams) -> bool {
    is_half_pi_multiple(a.theta) && is_half_pi_multiple(b.theta)
}

/// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`
pub fn apply_switch(rho: &DensityMatrix, a: &LocalUnitaryParams, b: &LocalUnitaryParams) -> Result<DensityMatrix> {
    rho.ensure_valid()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParams("unitary angles must be finite".into()));
    }
    Ok(conjugate(rho, a, b))
}

fn conjugate(rho: &DensityMatrix, a: &LocalUnitaryParams, b: &LocalUnitaryParams) -> DensityMatrix {
    let u = linalg::kron2(&unitary2(a), &unitary2(b));
    let out = linalg::mul4(&linalg::mul4(&u, rho.elements()), &linalg::adjoint4(&u));
    DensityMatrix::new(out)
}

/// A single instantaneous switch at `t_sw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchSchedule {
    pub t_sw: f64,
    pub unitary_a: LocalUnitaryParams,
    pub unitary_b: LocalUnitaryParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchKind {
    /// Flip on both qubits: ρ₁₁↔ρ₄₄, ρ₂₂↔ρ₃₃.
    #[serde(rename = "11-44")]
    Swap1144,
    /// Flip on qubit B only: ρ₁₁↔ρ₂₂, ρ₃₃↔ρ₄₄, ρ₁₄↔ρ₂₃.
    BOnly,
}

impl SwitchKind {
    pub fn unitaries(&self) -> (LocalUnitaryParams, LocalUnitaryParams) {
        match self {
            SwitchKind::Swap1144 => (LocalUnitaryParams::flip(), LocalUnitaryParams::flip()),
            SwitchKind::BOnly => (LocalUnitaryParams::identity(), LocalUnitaryParams::flip()),
        }
    }

    pub fn at(&self, t_sw: f64) -> SwitchSchedule {
        let (unitary_a, unitary_b) = self.unitaries();
        SwitchSchedule {
            t_sw,
            unitary_a,
            unitary_b,
        }
    }
}

impl std::str::FromStr for SwitchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "11-44" => Ok(SwitchKind::Swap1144),
            "b-only" => Ok(SwitchKind::BOnly),
            other => Err(Error::Format(format!("unknown switch '{other}', expected 11-44 or b-only"))),
        }
    }
}

impl SwitchSchedule {
    pub fn swap_11_44(t_sw: f64) -> Self {
        SwitchKind::Swap1144.at(t_sw)
    }

    pub fn b_only(t_sw: f64) -> Self {
        SwitchKind::BOnly.at(t_sw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EsdTime {
    At(f64),
    NoDeath { horizon: f64 },
}

impl EsdTime {
    pub fn time(&self) -> Option<f64> {
        match *self {
            EsdTime::At(t) => Some(t),
            EsdTime::NoDeath { .. } => None,
        }
    }
}

impl fmt::Display for EsdTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EsdTime::At(t) => write!(f, "{t}"),
            EsdTime::NoDeath { horizon } => write!(f, "no-death({horizon})"),
        }
    }
}

/// Scan and bisection settings for [`find_esd_time`], in absolute time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub h_scan: f64,
    pub tau_t: f64,
    pub verify_window: f64,
    pub horizon: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            h_scan: 0.01,
            tau_t: 1e-6,
            verify_window: 0.5,
            horizon: 30.0,
        }
    }
}

impl SearchConfig {
    /// Defaults measured in units of 1/γ: the step-like settings use the
    /// faster rate, the horizon the slower one.
    pub fn for_params(params: &ReservoirParams) -> Self {
        let fast = params.gamma1.max(params.gamma2);
        let slow = params.gamma1.min(params.gamma2);
        let d = Self::default();
        Self {
            h_scan: d.h_scan / fast,
            tau_t: d.tau_t / fast,
            verify_window: d.verify_window / fast,
            horizon: d.horizon / slow,
        }
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }

    fn check(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidHorizon(self.horizon));
        }
        for (name, v) in [("h_scan", self.h_scan), ("tau_t", self.tau_t), ("verify_window", self.verify_window)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Entanglement predicate used for death detection: the exact sign of the
/// smallest principal minor of the partial transpose.
fn entangled(rho: &DensityMatrix) -> bool {
    match qstate::as_x_state(rho) {
        Ok(x) => x.is_entangled(),
        Err(_) => qstate::min_seven_minors(rho).map(|(p, _)| p < 0.0).unwrap_or(false),
    }
}

/// ρ(t) under the thermal dynamics with an optional instantaneous switch.
struct Trajectory {
    rho0: DensityMatrix,
    params: ReservoirParams,
    switched: Option<(f64, DensityMatrix)>,
}

impl Trajectory {
    fn new(rho0: &DensityMatrix, params: &ReservoirParams, schedule: Option<&SwitchSchedule>) -> Self {
        let switched = schedule.map(|s| {
            let before = thermal::evolve_unchecked(rho0, params, s.t_sw);
            (s.t_sw, conjugate(&before, &s.unitary_a, &s.unitary_b))
        });
        Self {
            rho0: *rho0,
            params: *params,
            switched,
        }
    }

    fn at(&self, t: f64) -> DensityMatrix {
        match &self.switched {
            Some((t_sw, after)) if t >= *t_sw => thermal::evolve_unchecked(after, &self.params, t - t_sw),
            _ => thermal::evolve_unchecked(&self.rho0, &self.params, t),
        }
    }

    fn alive(&self, t: f64) -> bool {
        entangled(&self.at(t))
    }
}

/// First time entanglement vanishes and stays vanished for the verification
/// window.
///
/// Death means the partial transpose has no negative principal minor
/// (equivalently, zero negativity). A coarse scan locates a sign change,
/// bisection refines it to `tau_t`, and the trailing window is sampled at
/// the scan step to reject transient zeros. Revivals restart the scan.
pub fn find_esd_time(
    rho0: &DensityMatrix,
    params: &ReservoirParams,
    schedule: Option<&SwitchSchedule>,
    config: &SearchConfig,
) -> Result<EsdTime> {
    rho0.ensure_valid()?;
    params.check()?;
    config.check()?;
    if let Some(s) = schedule {
        if !(s.t_sw >= 0.0 && s.t_sw.is_finite()) {
            return Err(Error::NegativeTime(s.t_sw));
        }
        if !(s.unitary_a.is_finite() && s.unitary_b.is_finite()) {
            return Err(Error::InvalidParams("unitary angles must be finite".into()));
        }
    }
    if !qstate::is_entangled(rho0)? {
        return Err(Error::SeparableInput);
    }
    let traj = Trajectory::new(rho0, params, schedule);
    Ok(search(&traj, config))
}

fn search(traj: &Trajectory, config: &SearchConfig) -> EsdTime {
    let horizon = config.horizon;
    let n_scan = (horizon / config.h_scan).ceil() as usize;
    let grid = |k: usize| (k as f64 * config.h_scan).min(horizon);
    let mut k = 1;
    while k <= n_scan {
        let t = grid(k);
        if traj.alive(t) {
            k += 1;
            continue;
        }
        let (mut lo, mut hi) = (grid(k - 1), t);
        while hi - lo > config.tau_t {
            let mid = 0.5 * (lo + hi);
            if traj.alive(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let death = hi;
        let end = (death + config.verify_window).min(horizon);
        let revived = (k + 1..=n_scan).take_while(|&j| grid(j) <= end).find(|&j| traj.alive(grid(j)));
        match revived {
            None => return EsdTime::At(death),
            Some(j) => {
                log::debug!("entanglement revived at t = {} after vanishing at {death}", grid(j));
                k = j + 1;
            }
        }
    }
    EsdTime::NoDeath { horizon }
}

/// One point of a switching-time sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSample {
    pub t_sw: f64,
    pub t_end: EsdTime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub samples: Vec<SweepSample>,
    pub t_esd_no_switch: EsdTime,
    /// Largest finite t_end on the grid.
    pub t_end_max: Option<f64>,
    /// True when some switching time avoids death within the horizon.
    pub any_no_death: bool,
    /// Largest switching time that still delays death beyond the unswitched
    /// ESD time, refined between grid points.
    pub t_b: Option<f64>,
}

/// Margin by which t_end must exceed the unswitched ESD time to count as a
/// delay.
pub const DELAY_MARGIN: f64 = 1e-4;

fn delays(t_end: &EsdTime, reference: f64) -> bool {
    match t_end {
        EsdTime::At(t) => *t > reference + DELAY_MARGIN,
        EsdTime::NoDeath { .. } => true,
    }
}

#[cfg(feature = "parallel")]
fn map_grid<F: Fn(f64) -> EsdTime + Sync>(grid: &[f64], f: F) -> Vec<EsdTime> {
    use rayon::prelude::*;
    grid.par_iter().map(|&t| f(t)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_grid<F: Fn(f64) -> EsdTime>(grid: &[f64], f: F) -> Vec<EsdTime> {
    grid.iter().map(|&t| f(t)).collect()
}

/// `t_end` as a function of switching time over `t_sw_grid`.
///
/// `t_b` is found on the grid as the last point whose t_end exceeds the
/// unswitched death time by [`DELAY_MARGIN`], then refined by bisection
/// against the next grid point.
pub fn sweep_switch(
    rho0: &DensityMatrix,
    params: &ReservoirParams,
    switch: SwitchKind,
    t_sw_grid: &[f64],
    config: &SearchConfig,
) -> Result<SweepResult> {
    let (a, b) = switch.unitaries();
    sweep_switch_with(rho0, params, &a, &b, t_sw_grid, config)
}

/// As [`sweep_switch`] with arbitrary local unitaries.
pub fn sweep_switch_with(
    rho0: &DensityMatrix,
    params: &ReservoirParams,
    a: &LocalUnitaryParams,
    b: &LocalUnitaryParams,
    t_sw_grid: &[f64],
    config: &SearchConfig,
) -> Result<SweepResult> {
    if t_sw_grid.is_empty() {
        return Err(Error::InvalidGrid("switching-time grid is empty".into()));
    }
    if t_sw_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("switching-time grid must be strictly increasing".into()));
    }
    if let Some(&bad) = t_sw_grid.iter().find(|&&t| !(t >= 0.0 && t <= config.horizon)) {
        return Err(Error::InvalidGrid(format!("switching time {bad} outside [0, {}]", config.horizon)));
    }
    let t_esd_no_switch = find_esd_time(rho0, params, None, config)?;
    let schedule = |t_sw: f64| SwitchSchedule {
        t_sw,
        unitary_a: *a,
        unitary_b: *b,
    };
    let end_at = |t_sw: f64| search(&Trajectory::new(rho0, params, Some(&schedule(t_sw))), config);
    let ends = map_grid(t_sw_grid, end_at);
    let samples: Vec<SweepSample> = t_sw_grid
        .iter()
        .zip(ends)
        .map(|(&t_sw, t_end)| SweepSample { t_sw, t_end })
        .collect();
    let t_end_max = samples.iter().filter_map(|s| s.t_end.time()).fold(None, |acc: Option<f64>, t| {
        Some(acc.map_or(t, |m| m.max(t)))
    });
    let any_no_death = samples.iter().any(|s| s.t_end.time().is_none());

    let t_b = t_esd_no_switch.time().and_then(|reference| {
        let last = samples.iter().rposition(|s| delays(&s.t_end, reference))?;
        let Some(next) = samples.get(last + 1) else {
            return Some(samples[last].t_sw);
        };
        let (mut lo, mut hi) = (samples[last].t_sw, next.t_sw);
        while hi - lo > config.tau_t {
            let mid = 0.5 * (lo + hi);
            if delays(&end_at(mid), reference) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    });

    Ok(SweepResult {
        samples,
        t_esd_no_switch,
        t_end_max,
        any_no_death,
        t_b,
    })
}

impl SweepResult {
    /// `t_sw,t_end` with a header row; `no-death` marks samples that survive
    /// the horizon.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_sw,t_end\n");
        for s in &self.samples {
            match s.t_end {
                EsdTime::At(t) => out.push_str(&format!("{},{}\n", s.t_sw, t)),
                EsdTime::NoDeath { .. } => out.push_str(&format!("{},no-death\n", s.t_sw)),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep result is always serializable")
    }
}

/// Result of [`avoidance_window`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AvoidanceWindow {
    /// A ρ₁₁↔ρ₄₄ switch before this time averts ESD.
    Until(f64),
    /// No switch time averts ESD.
    Never,
    /// The unswitched state already decays only asymptotically.
    NotNeeded,
}

/// Latest ρ₁₁↔ρ₄₄ switching time after which the vacuum ESD test reports
/// asymptotic decay, found by bisection on that verdict.
///
/// After the flip the (14) condition reads ρ₄₄(t) > |ρ₂₃(t)|², which only
/// becomes easier to satisfy as ρ₄₄ grows and the coherence decays, so the
/// averting switch times form an interval starting at 0.
pub fn avoidance_window(rho0: &XState, params: &ReservoirParams, tau_t: f64) -> Result<AvoidanceWindow> {
    params.check()?;
    if !params.is_zero_temperature() {
        return Err(Error::FiniteTemperature {
            m: params.m,
            n: params.n,
        });
    }
    if rho0.minor14() >= 0.0 {
        return Err(Error::CaseMismatch("rho11*rho44 < |rho23|^2"));
    }
    if !criteria::esd_zero_temperature(rho0)?.will_die {
        return Ok(AvoidanceWindow::NotNeeded);
    }
    let rho = rho0.to_density_matrix();
    let config = SearchConfig::for_params(params);
    let Some(t_death) = find_esd_time(&rho, params, None, &config)?.time() else {
        return Ok(AvoidanceWindow::NotNeeded);
    };
    let (ua, ub) = SwitchKind::Swap1144.unitaries();
    let averted = |t: f64| {
        let flipped = conjugate(&thermal::evolve_unchecked(&rho, params, t), &ua, &ub);
        match qstate::as_x_state(&flipped) {
            Ok(x) if x.is_entangled() => criteria::esd_zero_temperature(&x).map(|v| !v.will_die).unwrap_or(false),
            _ => false,
        }
    };
    if !averted(0.0) {
        return Ok(AvoidanceWindow::Never);
    }
    let (mut lo, mut hi) = (0.0, t_death);
    while hi - lo > tau_t {
        let mid = 0.5 * (lo + hi);
        if averted(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(AvoidanceWindow::Until(0.5 * (lo + hi)))
}
