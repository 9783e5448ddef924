//! Closed-form evolution of two qubits, each damped by its own thermal
//! reservoir.
//!
//! Every element of ρ(t) is a fixed linear combination of the initial
//! elements and a handful of exponentials; [`evolve`] evaluates those
//! combinations directly, so there is no time stepping and no truncation
//! error.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4};
use crate::qstate::DensityMatrix;

/// Decay rates and mean thermal photon numbers of the two reservoirs.
/// `m`/`gamma1` belong to qubit A, `n`/`gamma2` to qubit B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub m: f64,
    pub n: f64,
}

impl ReservoirParams {
    pub fn new(gamma1: f64, gamma2: f64, m: f64, n: f64) -> Result<Self> {
        let p = Self { gamma1, gamma2, m, n };
        p.check()?;
        Ok(p)
    }

    /// Equal unit rates, so times read as γt.
    pub fn symmetric(m: f64, n: f64) -> Self {
        Self {
            gamma1: 1.0,
            gamma2: 1.0,
            m,
            n,
        }
    }

    pub fn vacuum() -> Self {
        Self::symmetric(0.0, 0.0)
    }

    pub fn check(&self) -> Result<()> {
        let ok_rate = |g: f64| g.is_finite() && g > 0.0;
        let ok_occ = |x: f64| x.is_finite() && x >= 0.0;
        if !ok_rate(self.gamma1) || !ok_rate(self.gamma2) {
            return Err(Error::InvalidParams(format!(
                "decay rates must be positive, got gamma1 = {}, gamma2 = {}",
                self.gamma1, self.gamma2
            )));
        }
        if !ok_occ(self.m) || !ok_occ(self.n) {
            return Err(Error::InvalidParams(format!(
                "photon numbers must be non-negative, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        Ok(())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.m == 0.0 && self.n == 0.0
    }

    /// Decay rate of ρ₁₄ and ρ₂₃: (m + ½)γ₁ + (n + ½)γ₂.
    pub fn coherence_rate(&self) -> f64 {
        (self.m + 0.5) * self.gamma1 + (self.n + 0.5) * self.gamma2
    }

    /// Largest population relaxation rate, max((2m+1)γ₁, (2n+1)γ₂).
    pub fn max_rate(&self) -> f64 {
        ((2.0 * self.m + 1.0) * self.gamma1).max((2.0 * self.n + 1.0) * self.gamma2)
    }
}

/// Elapsed time with helpers for the decay factor `p = exp(−γt)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TimePoint(pub f64);

impl TimePoint {
    pub fn from_decay_factor(p: f64, gamma: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidDecayFactor(p));
        }
        Ok(TimePoint(-p.ln() / gamma))
    }

    pub fn decay_factor(&self, gamma: f64) -> f64 {
        (-gamma * self.0).exp()
    }
}

/// Coefficients of one population in the four relaxation modes:
/// `steady + qubit_b·e₂ + qubit_a·e₁ + joint·e₁e₂`, where
/// `e₁ = exp(−(2m+1)γ₁t)` and `e₂ = exp(−(2n+1)γ₂t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PopulationModes {
    pub steady: f64,
    pub qubit_b: f64,
    pub qubit_a: f64,
    pub joint: f64,
}

impl PopulationModes {
    fn eval(&self, e1: f64, e2: f64) -> f64 {
        self.steady + self.qubit_b * e2 + self.qubit_a * e1 + self.joint * e1 * e2
    }
}

/// Mode expansion of ρ₁₁(t), ρ₂₂(t), ρ₃₃(t).
pub(crate) fn population_modes(p: [f64; 4], m: f64, n: f64) -> [PopulationModes; 3] {
    let [r11, r22, r33, r44] = p;
    let d = (2.0 * m + 1.0) * (2.0 * n + 1.0);
    let a = (n + 1.0) * r11 + r33 - n * (r22 - r33 + r44);
    let b = (m + 1.0) * r11 + (m + 1.0) * r22 - m * (r33 + r44);
    let c = (m + 1.0) * (n + 1.0) * r11 - m * r33 - n * (r22 + m * r22 + m * r33 - m * r44);
    let c_mid = -(m + 1.0) * (n + 1.0) * r11 + m * r33 + n * ((m + 1.0) * r22 + m * r33 - m * r44);
    [
        PopulationModes {
            steady: m * n / d,
            qubit_b: m * a / d,
            qubit_a: n * b / d,
            joint: c / d,
        },
        PopulationModes {
            steady: m * (n + 1.0) / d,
            qubit_b: -m * a / d,
            qubit_a: (n + 1.0) * b / d,
            joint: c_mid / d,
        },
        PopulationModes {
            steady: n * (m + 1.0) / d,
            qubit_b: (m + 1.0) * a / d,
            qubit_a: -n * b / d,
            joint: c_mid / d,
        },
    ]
}

/// ρ(t) from ρ(0) for any two-qubit state.
///
/// ρ₄₄ is completed from the trace and the lower triangle from Hermiticity.
/// `t = 0` returns the input unchanged.
pub fn evolve(rho0: &DensityMatrix, params: &ReservoirParams, t: f64) -> Result<DensityMatrix> {
    params.check()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::NegativeTime(t));
    }
    rho0.ensure_valid()?;
    Ok(evolve_unchecked(rho0, params, t))
}

/// [`evolve`] without input validation; callers guarantee a valid state,
/// valid parameters and `t ≥ 0`.
pub(crate) fn evolve_unchecked(rho0: &DensityMatrix, params: &ReservoirParams, t: f64) -> DensityMatrix {
    if t == 0.0 {
        return *rho0;
    }
    let r = rho0.elements();
    let &ReservoirParams { gamma1, gamma2, m, n } = params;
    let ka = (2.0 * m + 1.0) * gamma1;
    let kb = (2.0 * n + 1.0) * gamma2;

    let e1 = (-ka * t).exp();
    let e2 = (-kb * t).exp();
    let pops = [r[0][0].re, r[1][1].re, r[2][2].re, r[3][3].re];
    let modes = population_modes(pops, m, n);
    let p11 = modes[0].eval(e1, e2);
    let p22 = modes[1].eval(e1, e2);
    let p33 = modes[2].eval(e1, e2);
    let p44 = 1.0 - p11 - p22 - p33;

    // coherences within one qubit's manifold
    let h_b = (-0.5 * kb * t).exp();
    let h_ab = (-0.5 * (2.0 * ka + kb) * t).exp();
    let h_a = (-0.5 * ka * t).exp();
    let h_ba = (-0.5 * (ka + 2.0 * kb) * t).exp();
    let (r12, r13, r24, r34) = (r[0][1], r[0][2], r[1][3], r[2][3]);
    let mm = 2.0 * m + 1.0;
    let nn = 2.0 * n + 1.0;
    let r12_t = (m * (r12 + r34) * h_b + ((m + 1.0) * r12 - m * r34) * h_ab) / mm;
    let r34_t = ((m + 1.0) * (r12 + r34) * h_b + (m * r34 - (m + 1.0) * r12) * h_ab) / mm;
    let r13_t = (n * (r13 + r24) * h_a + ((n + 1.0) * r13 - n * r24) * h_ba) / nn;
    let r24_t = ((n + 1.0) * (r13 + r24) * h_a + (n * r24 - (n + 1.0) * r13) * h_ba) / nn;

    let damp = (-params.coherence_rate() * t).exp();
    let r14_t = r[0][3] * damp;
    let r23_t = r[1][2] * damp;

    let mut out: Mat4 = linalg::zeros4();
    out[0][0] = Complex64::new(p11, 0.0);
    out[1][1] = Complex64::new(p22, 0.0);
    out[2][2] = Complex64::new(p33, 0.0);
    out[3][3] = Complex64::new(p44, 0.0);
    let upper = [
        (0, 1, r12_t),
        (0, 2, r13_t),
        (0, 3, r14_t),
        (1, 2, r23_t),
        (1, 3, r24_t),
        (2, 3, r34_t),
    ];
    for (i, j, z) in upper {
        out[i][j] = z;
        out[j][i] = z.conj();
    }
    DensityMatrix::new(out)
}

/// ρ(t) at each requested time.
pub fn trajectory(rho0: &DensityMatrix, params: &ReservoirParams, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    params.check()?;
    rho0.ensure_valid()?;
    if let Some(&bad) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::NegativeTime(bad));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(times
            .par_iter()
            .map(|&t| evolve_unchecked(rho0, params, t))
            .collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(times.iter().map(|&t| evolve_unchecked(rho0, params, t)).collect())
    }
}

/// The t → ∞ limit shared by all initial states: a diagonal state with
/// populations `{mn, m(n+1), n(m+1), (m+1)(n+1)} / ((2m+1)(2n+1))`.
pub fn steady_state(params: &ReservoirParams) -> Result<DensityMatrix> {
    params.check()?;
    let ReservoirParams { m, n, .. } = *params;
    let d = (2.0 * m + 1.0) * (2.0 * n + 1.0);
    Ok(DensityMatrix::from_real_diagonal([
        m * n / d,
        m * (n + 1.0) / d,
        n * (m + 1.0) / d,
        (m + 1.0) * (n + 1.0) / d,
    ]))
}

/// Parameter regime in which [`AsymptoticMatrix`] decides separability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AsymptoticRegime {
    /// m = n = 0 and γ₁ = γ₂.
    VacuumEqualRates,
}

/// Matrix built from the initial state whose principal minors decide
/// whether entanglement survives to late times in vacuum reservoirs.
/// Not a density matrix; the (4,4) entry is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticMatrix {
    pub elements: Mat4,
    pub regime: AsymptoticRegime,
}

impl AsRef<Mat4> for AsymptoticMatrix {
    fn as_ref(&self) -> &Mat4 {
        &self.elements
    }
}

impl AsymptoticMatrix {
    /// Element with 1-based indices.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row - 1][col - 1]
    }
}

/// Build the asymptotic matrix from the initial elements.
pub fn asymptotic_matrix(rho0: &DensityMatrix) -> AsymptoticMatrix {
    let r = |i: usize, j: usize| rho0.get(i, j);
    let one = Complex64::new(1.0, 0.0);
    let elements = [
        [r(1, 1), r(2, 1), r(1, 3), r(2, 3)],
        [r(1, 2), r(1, 1) + r(2, 2), r(1, 4), r(1, 3) + r(2, 4)],
        [r(3, 1), r(4, 1), r(1, 1) + r(3, 3), r(2, 1) + r(4, 3)],
        [r(3, 2), r(3, 1) + r(4, 2), r(1, 2) + r(3, 4), one],
    ];
    AsymptoticMatrix {
        elements,
        regime: AsymptoticRegime::VacuumEqualRates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::qstate::{is_x_shaped, principal_minor};

    #[test]
    fn excited_state_in_vacuum() {
        let rho = DensityMatrix::from_real_diagonal([1.0, 0.0, 0.0, 0.0]);
        let g = 0.7;
        let params = ReservoirParams::new(g, g, 0.0, 0.0).unwrap();
        for t in [0.1, 0.9, 3.0] {
            let out = evolve(&rho, &params, t).unwrap();
            let e = (-g * t).exp();
            let want = [e * e, e * (1.0 - e), e * (1.0 - e), (1.0 - e) * (1.0 - e)];
            for (i, w) in want.iter().enumerate() {
                assert!((out.population(i + 1) - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let rho = presets::werner_singlet(0.4);
        let params = ReservoirParams::new(1.3, 0.2, 0.5, 2.0).unwrap();
        assert_eq!(evolve(&rho, &params, 0.0).unwrap(), rho);
    }

    #[test]
    fn bell_phi_coherence() {
        let params = ReservoirParams::symmetric(0.0, 0.0);
        for t in [0.2, 1.0, 4.0] {
            let out = evolve(&presets::bell_phi_plus(), &params, t).unwrap();
            assert!((out.get(1, 4).re - 0.5 * (-t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = ReservoirParams::vacuum();
        assert!(matches!(
            evolve(&presets::excited_psi_plus(), &params, -1.0),
            Err(Error::NegativeTime(_))
        ));
        let bad = DensityMatrix::from_real_diagonal([0.5, 0.6, -0.1, 0.0]);
        assert!(matches!(evolve(&bad, &params, 1.0), Err(Error::InvalidState(_))));
        assert!(ReservoirParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(ReservoirParams::new(1.0, 1.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn steady_state_examples() {
        let vac = steady_state(&ReservoirParams::vacuum()).unwrap();
        assert_eq!(vac, DensityMatrix::from_real_diagonal([0.0, 0.0, 0.0, 1.0]));

        let warm = steady_state(&ReservoirParams::symmetric(0.1, 0.1)).unwrap();
        let want = [0.01, 0.11, 0.11, 1.21].map(|x| x / 1.44);
        for (i, w) in want.iter().enumerate() {
            assert!((warm.population(i + 1) - w).abs() < 1e-15);
        }
        let late = evolve(&presets::excited_psi_plus(), &ReservoirParams::symmetric(0.1, 0.1), 50.0).unwrap();
        assert!(late.max_abs_diff(&warm) < 1e-15);

        let hot = steady_state(&ReservoirParams::symmetric(1e3, 1e3)).unwrap();
        assert!(hot.max_abs_diff(&DensityMatrix::maximally_mixed()) < 1e-3);
    }

    #[test]
    fn asymptotic_matrix_examples() {
        let bell = asymptotic_matrix(&presets::bell_psi_plus());
        assert_eq!(bell.get(1, 1).re, 0.0);
        assert!((bell.get(1, 4).re - 0.5).abs() < 1e-15);
        assert_eq!(bell.get(4, 4).re, 1.0);

        let ground = asymptotic_matrix(&DensityMatrix::from_real_diagonal([0.0, 0.0, 0.0, 1.0]));
        for i in 1..=4 {
            for j in 1..=4 {
                let want = if (i, j) == (4, 4) { 1.0 } else { 0.0 };
                assert_eq!(ground.get(i, j).re, want);
            }
        }

        let w = asymptotic_matrix(&presets::werner_triplet(0.6));
        assert!(is_x_shaped(&DensityMatrix::new(w.elements)));
        // [ρ̃(14)] = ρ₁₁ − |ρ₂₃|² for X input
        let x = crate::qstate::as_x_state(&presets::werner_triplet(0.6)).unwrap();
        let m14 = principal_minor(&w, &[1, 4]).unwrap();
        assert!((m14 - (x.p11 - x.c23.norm_sqr())).abs() < 1e-15);
    }

    #[test]
    fn decay_factor_round_trip() {
        let tp = TimePoint::from_decay_factor(0.5, 2.0).unwrap();
        assert!((tp.0 - std::f64::consts::LN_2 / 2.0).abs() < 1e-15);
        assert!((tp.decay_factor(2.0) - 0.5).abs() < 1e-15);
        assert!(TimePoint::from_decay_factor(0.0, 1.0).is_err());
        assert!(TimePoint::from_decay_factor(1.5, 1.0).is_err());
    }
}
