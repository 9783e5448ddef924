//! ESD predicates and closed-form entanglement formulas for X-states.
//!
//! * [`esd_zero_temperature`]: sign test on two minors of the asymptotic
//!   matrix, valid for vacuum reservoirs.
//! * [`negativity_case1`] / [`negativity_case2`]: closed-form negativity of
//!   the evolving state in vacuum reservoirs with equal rates. These follow
//!   the convention `N = 2 · Σ|λ⁻|`, i.e. twice [`crate::qstate::negativity`].
//! * [`finite_temperature_minors`]: exponential polynomials for the two
//!   decisive minors when m = n and γ₁ = γ₂.
//! * [`esd_finite_temperature`]: any non-zero photon number forces ESD.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{self, DensityMatrix, EntanglementCase, XState, TAU_PSD};
use crate::thermal::{self, asymptotic_matrix, ReservoirParams};

/// Default γt used as "asymptotically long" for numerical minor checks.
pub const DEFAULT_ASYMPTOTIC_HORIZON: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
}

impl Condition {
    fn new(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
        }
    }
}

/// Outcome of an ESD test.
///
/// `will_die` is true iff every entry of `conditions` is strictly positive
/// (beyond [`TAU_PSD`]). When some condition lies within `TAU_PSD` of zero
/// the verdict is flagged as `boundary` and `will_die` is false.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsdVerdict {
    pub will_die: bool,
    pub boundary: bool,
    pub conditions: Vec<Condition>,
    /// Decisive minors of the evolved state at a long time, if evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic_check: Option<AsymptoticCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticCheck {
    pub horizon: f64,
    pub minor14: f64,
    pub minor23: f64,
    /// Both minors strictly positive.
    pub both_positive: bool,
}

impl EsdVerdict {
    fn from_conditions(conditions: Vec<Condition>) -> Self {
        let boundary = conditions.iter().any(|c| c.value.abs() <= TAU_PSD);
        let will_die = conditions.iter().all(|c| c.value > TAU_PSD);
        Self {
            will_die,
            boundary,
            conditions,
            asymptotic_check: None,
        }
    }
}

fn require_entangled(x: &XState) -> Result<()> {
    if x.is_entangled() {
        Ok(())
    } else {
        Err(Error::SeparableInput)
    }
}

/// ESD test for vacuum reservoirs:
/// `[ρ̃(14)] = ρ₁₁ − |ρ₂₃|² > 0` and
/// `[ρ̃(23)] = (ρ₁₁+ρ₂₂)(ρ₁₁+ρ₃₃) − |ρ₁₄|² > 0`.
///
/// The minors are taken from [`asymptotic_matrix`]. The exponents of the
/// two minors depend on γ₁ and γ₂ only through a common positive factor, so
/// the verdict holds for unequal rates as well.
pub fn esd_zero_temperature(rho0: &XState) -> Result<EsdVerdict> {
    require_entangled(rho0)?;
    let tilde = asymptotic_matrix(&rho0.to_density_matrix());
    let m14 = qstate::principal_minor(&tilde, &[1, 4])?;
    let m23 = qstate::principal_minor(&tilde, &[2, 3])?;
    Ok(EsdVerdict::from_conditions(vec![
        Condition::new("rho11 - |rho23|^2", m14),
        Condition::new("(rho11 + rho22)(rho11 + rho33) - |rho14|^2", m23),
    ]))
}

fn check_decay_factor(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDecayFactor(p))
    }
}

/// Closed-form negativity for ρ₁₁ρ₄₄ < |ρ₂₃|² at decay factor `p = e^{−γt}`
/// (vacuum reservoirs, γ₁ = γ₂ = γ).
pub fn negativity_case1(rho0: &XState, p: f64) -> Result<f64> {
    check_decay_factor(p)?;
    if rho0.minor14() >= 0.0 {
        return Err(Error::CaseMismatch("rho11*rho44 < |rho23|^2"));
    }
    let XState { p11, p22, p33, p44, c23, .. } = *rho0;
    let c2 = c23.norm_sqr();
    let f = (1.0 - 2.0 * p + 2.0 * p * p) * p11 + (1.0 - p) * (p22 + p33) + p44;
    let disc = f * f - 4.0 * p * p * (p11 * f - p * p * p11 * p11 - c2);
    Ok((disc.max(0.0).sqrt() - f).max(0.0))
}

/// Closed-form negativity for ρ₂₂ρ₃₃ < |ρ₁₄|², same regime and convention
/// as [`negativity_case1`].
pub fn negativity_case2(rho0: &XState, p: f64) -> Result<f64> {
    check_decay_factor(p)?;
    if rho0.minor23() >= 0.0 {
        return Err(Error::CaseMismatch("rho22*rho33 < |rho14|^2"));
    }
    let XState { p11, p22, p33, c14, .. } = *rho0;
    let root = ((p22 - p33) * (p22 - p33) + 4.0 * c14.norm_sqr()).sqrt();
    Ok((p * (root - (p22 + p33) - (2.0 - 2.0 * p) * p11)).max(0.0))
}

/// Whichever of the two closed forms applies to `rho0`.
pub fn closed_form_negativity(rho0: &XState, p: f64) -> Result<f64> {
    match rho0.entanglement_case() {
        Some(EntanglementCase::Case1) => negativity_case1(rho0, p),
        Some(EntanglementCase::Case2) => negativity_case2(rho0, p),
        None => Err(Error::SeparableInput),
    }
}

/// A printed coefficient that disagrees with the exact expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientDiscrepancy {
    pub label: String,
    pub printed: f64,
    pub exact: f64,
}

/// `scale · (constant + Σᵢ coeffs[i−1] · exp(−i · decay_base · t))`.
///
/// `constant` and `coeffs` are on the unnormalised scale where the constant
/// term is m²(m+1)²; `scale = 1/(2m+1)⁴` converts to the actual minor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorPolynomial {
    pub constant: f64,
    pub coeffs: [f64; 4],
    pub decay_base: f64,
    pub scale: f64,
    pub discrepancies: Vec<CoefficientDiscrepancy>,
}

impl MinorPolynomial {
    pub fn eval(&self, t: f64) -> f64 {
        let x = (-self.decay_base * t).exp();
        let mut acc = self.constant;
        let mut xp = 1.0;
        for c in self.coeffs {
            xp *= x;
            acc += c * xp;
        }
        self.scale * acc
    }
}

/// Coefficients exactly as printed for `[ρᴾᵀ(14)]` (the F family) and
/// `[ρᴾᵀ(23)]` (the G family), unnormalised, for m = n.
pub fn printed_coefficients(x: &XState, m: f64) -> ([f64; 4], [f64; 4]) {
    let XState { p11: r11, p22: r22, p33: r33, p44: r44, .. } = *x;
    let a23 = x.c23.norm_sqr();
    let a14 = x.c14.norm_sqr();
    let m2 = m * m;
    let m3 = m2 * m;
    let m4 = m3 * m;
    let mp1 = m + 1.0;

    let f1 = m * mp1 * ((2.0 * m + 1.0) * r11 + r22 + r33 - 2.0 * m * r44);
    let f2 = -2.0 * m4 * (2.0 * r44 * r44 - r44 + r22 + 8.0 * a23 + r33)
        + 2.0 * m3 * (-2.0 * r44 * r44 + 2.0 * r33 * r44 + r44 - 16.0 * a23 - 2.0 * r33 + 2.0 * r22 * (r44 - 1.0))
        - m2 * (r22 * r22 + (2.0 * r33 - 4.0 * r44 + 3.0) * r22 + r33 * r33 + 24.0 * a23 + 3.0 * r33
            - 4.0 * r33 * r44
            - r44)
        - 4.0 * m * mp1.powi(3) * r11 * r11
        - m * (r22 * r22 + 2.0 * r33 * r22 + r22 + r33 * r33 + 8.0 * a23 + r33)
        - a23
        + mp1 * mp1 * r11 * ((8.0 * r44 + 2.0) * m2 + (-4.0 * r22 - 4.0 * r33 + 2.0) * m + 1.0);
    let f3 = -2.0 * r11 * r11 * mp1.powi(3)
        + mp1 * r11 * ((2.0 * m2 + m - 1.0) * (r22 + r33) + 2.0 * m * r44)
        + m * (mp1 * r22 * r22
            + (2.0 * mp1 * r33 - m * (2.0 * m + 3.0) * r44) * r22
            + mp1 * r33 * r33
            + 2.0 * m2 * r44 * r44
            - m * (2.0 * m + 3.0) * r33 * r44);
    let f4 = {
        let inner = m2 * (r11 - r22 - r33 + r44) + m * (2.0 * r11 - r22 - r33) + r11;
        inner * inner
    };

    let g1 = f1;
    let g2 = -2.0 * m4 * (2.0 * r22 * r22 - 4.0 * r33 * r22 - r22 + 2.0 * r33 * r33 + r11 - r33 + 8.0 * a14 + r44)
        - 2.0 * m3 * (4.0 * r22 * r22 - 8.0 * r33 * r22 - 2.0 * r22 + 4.0 * r33 * r33 + 3.0 * r11 - 2.0 * r33
            + 16.0 * a14
            + r44)
        + m2 * (r11 * r11 - 2.0 * (r44 + 3.0) * r11 - 6.0 * r22 * r22 - 6.0 * r33 * r33 + r44 * r44 + 2.0 * r22
            + 12.0 * r22 * r33
            + 2.0 * r33
            - 24.0 * a14)
        + m * (2.0 * r11 * r11 + (r22 + r33 - 2.0 * r44 - 2.0) * r11 - 2.0 * r22 * r22 - 2.0 * r33 * r33
            + 4.0 * r22 * r33
            - 8.0 * a14
            - r22 * r44
            - r33 * r44)
        + r11 * r11
        + r22 * r33
        + r11 * (r22 + r33)
        - a14;
    let g3 = f3;
    let g4 = f4;

    ([f1, f2, f3, f4], [g1, g2, g3, g4])
}

// Polynomial product, coefficients in ascending powers.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact coefficients of the two minors in powers of `x = e^{−(2m+1)γt}`,
/// on the same unnormalised scale as [`printed_coefficients`]. Index 0 is
/// the constant term.
pub fn exact_coefficients(x: &XState, m: f64) -> ([f64; 5], [f64; 5]) {
    let d = (2.0 * m + 1.0) * (2.0 * m + 1.0);
    let modes = thermal::population_modes(x.populations(), m, m);
    // numerators D·ρᵢᵢ(x) as quadratics in x
    let num: Vec<[f64; 3]> = modes
        .iter()
        .map(|md| [d * md.steady, d * (md.qubit_a + md.qubit_b), d * md.joint])
        .collect();
    let n44 = [d - num[0][0] - num[1][0] - num[2][0], -(num[0][1] + num[1][1] + num[2][1]), -(num[0][2] + num[1][2] + num[2][2])];
    let mut f = poly_mul(&num[0], &n44);
    f[2] -= d * d * x.c23.norm_sqr();
    let mut g = poly_mul(&num[1], &num[2]);
    g[2] -= d * d * x.c14.norm_sqr();
    let to5 = |v: Vec<f64>| [v[0], v[1], v[2], v[3], v[4]];
    (to5(f), to5(g))
}

fn reconcile(family: &str, printed: [f64; 4], exact: [f64; 5], m: f64, gamma: f64) -> MinorPolynomial {
    let mut discrepancies = Vec::new();
    for i in 0..4 {
        let (p, e) = (printed[i], exact[i + 1]);
        let tol = 1e-12 * 1.0_f64.max(p.abs()).max(e.abs());
        if (p - e).abs() > tol {
            let label = format!("{family}({})", i + 1);
            log::warn!("printed coefficient {label} = {p:.15e} disagrees with exact expansion {e:.15e}; using exact");
            discrepancies.push(CoefficientDiscrepancy {
                label,
                printed: p,
                exact: e,
            });
        }
    }
    let constant = m * m * (m + 1.0) * (m + 1.0);
    if (constant - exact[0]).abs() > 1e-12 * 1.0_f64.max(constant) {
        log::warn!("constant term m^2(m+1)^2 = {constant:.15e} disagrees with exact {:.15e}", exact[0]);
        discrepancies.push(CoefficientDiscrepancy {
            label: format!("{family}(0)"),
            printed: constant,
            exact: exact[0],
        });
    }
    MinorPolynomial {
        constant: exact[0],
        coeffs: [exact[1], exact[2], exact[3], exact[4]],
        decay_base: (2.0 * m + 1.0) * gamma,
        scale: (2.0 * m + 1.0).powi(-4),
        discrepancies,
    }
}

/// Exponential polynomials for `[ρᴾᵀ(14)](t)` and `[ρᴾᵀ(23)](t)` with
/// m = n and γ₁ = γ₂ = `gamma`.
///
/// The printed coefficient families are compared term by term with the
/// exact expansion of the propagated populations. Any disagreement is
/// logged and recorded in `discrepancies`, and the exact value is used.
pub fn finite_temperature_minors(rho0: &XState, m: f64, gamma: f64) -> Result<(MinorPolynomial, MinorPolynomial)> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::InvalidParams(format!("photon number must be non-negative, got {m}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!("decay rate must be positive, got {gamma}")));
    }
    let (pf, pg) = printed_coefficients(rho0, m);
    let (ef, eg) = exact_coefficients(rho0, m);
    Ok((reconcile("F", pf, ef, m, gamma), reconcile("G", pg, eg, m, gamma)))
}

/// Decisive minors `[ρᴾᵀ(14)]`, `[ρᴾᵀ(23)]` of the state evolved to `t`,
/// for any reservoir parameters.
pub fn decisive_minors_at(rho0: &XState, params: &ReservoirParams, t: f64) -> Result<(f64, f64)> {
    let rho_t = thermal::evolve(&rho0.to_density_matrix(), params, t)?;
    let x = qstate::as_x_state(&rho_t)?;
    Ok((x.minor14(), x.minor23()))
}

/// ESD test at arbitrary reservoir temperatures, using
/// [`DEFAULT_ASYMPTOTIC_HORIZON`] for the numerical cross-check.
pub fn esd_finite_temperature(rho0: &XState, params: &ReservoirParams) -> Result<EsdVerdict> {
    esd_finite_temperature_with_horizon(rho0, params, DEFAULT_ASYMPTOTIC_HORIZON)
}

/// As [`esd_finite_temperature`], with the long-time point given as γt
/// (scaled by the slower of the two rates).
pub fn esd_finite_temperature_with_horizon(
    rho0: &XState,
    params: &ReservoirParams,
    horizon: f64,
) -> Result<EsdVerdict> {
    params.check()?;
    require_entangled(rho0)?;
    let t_inf = horizon / params.gamma1.min(params.gamma2);
    let (minor14, minor23) = decisive_minors_at(rho0, params, t_inf)?;
    let check = AsymptoticCheck {
        horizon: t_inf,
        minor14,
        minor23,
        both_positive: minor14 > 0.0 && minor23 > 0.0,
    };
    let mut verdict = if params.is_zero_temperature() {
        esd_zero_temperature(rho0)?
    } else {
        // any thermal occupation makes both asymptotic minors positive
        EsdVerdict {
            will_die: true,
            boundary: false,
            conditions: vec![Condition::new("m + n", params.m + params.n)],
            asymptotic_check: None,
        }
    };
    if !params.is_zero_temperature() && !check.both_positive {
        log::warn!(
            "asymptotic minors at t = {t_inf} are not both positive ({minor14:.3e}, {minor23:.3e}); horizon may be too short"
        );
    }
    verdict.asymptotic_check = Some(check);
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WernerKind {
    /// Mixture with the singlet `(|01⟩ − |10⟩)/√2`.
    Singlet,
    /// Mixture with `(|00⟩ + |11⟩)/√2`.
    Triplet,
}

impl WernerKind {
    pub fn state(&self, a: f64) -> DensityMatrix {
        match self {
            WernerKind::Singlet => crate::presets::werner_singlet(a),
            WernerKind::Triplet => crate::presets::werner_triplet(a),
        }
    }
}

/// Werner weights at which the vacuum-reservoir verdict changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerTransitions {
    /// Smallest weight with an entangled state.
    pub onset: f64,
    /// Weight above which entanglement decays only asymptotically, if the
    /// ESD region ends before a = 1.
    pub esd_boundary: Option<f64>,
}

fn bisect_predicate(mut lo: f64, mut hi: f64, tol: f64, pred_hi: impl Fn(f64) -> bool) -> f64 {
    // pred_hi(hi) is true, pred_hi(lo) is false
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred_hi(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate the entanglement onset and the ESD/asymptotic-decay boundary by
/// bisection on the verdicts themselves.
pub fn werner_transitions(kind: WernerKind, tol: f64) -> Result<WernerTransitions> {
    let entangled = |a: f64| qstate::is_entangled(&kind.state(a)).unwrap_or(false);
    if !entangled(1.0) {
        return Err(Error::SeparableInput);
    }
    let onset = bisect_predicate(0.0, 1.0, tol, entangled);
    let survives = |a: f64| {
        let x = qstate::as_x_state(&kind.state(a)).expect("Werner states are X-states");
        match esd_zero_temperature(&x) {
            Ok(v) => !v.will_die,
            Err(_) => false,
        }
    };
    // the ESD region starts just above the onset
    let start = onset + 10.0 * tol;
    let esd_boundary = if survives(start) {
        None
    } else {
        let mut grid_hi = None;
        let steps = 1000;
        for k in 1..=steps {
            let a = start + (1.0 - start) * k as f64 / steps as f64;
            if survives(a) {
                grid_hi = Some((start + (1.0 - start) * (k - 1) as f64 / steps as f64, a));
                break;
            }
        }
        match grid_hi {
            Some((lo, hi)) if hi < 1.0 => Some(bisect_predicate(lo, hi, tol, survives)),
            _ => None,
        }
    };
    Ok(WernerTransitions { onset, esd_boundary })
}
