//! Brute-force RK4 integration of the thermal master equation.
//!
//! This is deliberately independent of [`crate::thermal`]: it assembles the
//! four dissipators from the raising/lowering operators and steps the
//! equation of motion numerically. It exists to cross-check the closed-form
//! propagator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Mat4, ONE, ZERO};
use crate::qstate::DensityMatrix;
use crate::thermal::ReservoirParams;

/// Largest `dt · max((2m+1)γ₁, (2n+1)γ₂)` accepted by [`integrate`].
pub const MAX_STEP_RATE_PRODUCT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classic fixed-step fourth-order Runge-Kutta.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub method: Method,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            method: Method::Rk4,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    fn check(&self, params: &ReservoirParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidIntegrator(format!("dt must be positive, got {}", self.dt)));
        }
        let product = self.dt * params.max_rate();
        if product > MAX_STEP_RATE_PRODUCT * (1.0 + 1e-12) {
            return Err(Error::InvalidIntegrator(format!(
                "dt·rate = {product:.3e} exceeds {MAX_STEP_RATE_PRODUCT}"
            )));
        }
        Ok(())
    }
}

// Single-qubit operators in the (|1⟩, |0⟩) ordering.
const SIGMA_PLUS: Mat2 = [[ZERO, ONE], [ZERO, ZERO]];
const SIGMA_MINUS: Mat2 = [[ZERO, ZERO], [ONE, ZERO]];

/// Collapse operators with their rates, plus `K = ½ Σ rate·L†L`.
struct Dissipators {
    jumps: [(Mat4, Mat4, f64); 4],
    k: Mat4,
}

impl Dissipators {
    fn new(params: &ReservoirParams) -> Self {
        let id = linalg::identity2();
        let ops = [
            (linalg::kron2(&SIGMA_MINUS, &id), params.gamma1 * (params.m + 1.0)),
            (linalg::kron2(&SIGMA_PLUS, &id), params.gamma1 * params.m),
            (linalg::kron2(&id, &SIGMA_MINUS), params.gamma2 * (params.n + 1.0)),
            (linalg::kron2(&id, &SIGMA_PLUS), params.gamma2 * params.n),
        ];
        let mut k = linalg::zeros4();
        let jumps = ops.map(|(l, rate)| {
            let ld = linalg::adjoint4(&l);
            let ldl = linalg::mul4(&ld, &l);
            k = linalg::add4(&k, &linalg::scale4(&ldl, Complex64::new(0.5 * rate, 0.0)));
            (l, ld, rate)
        });
        Self { jumps, k }
    }

    fn apply(&self, rho: &Mat4) -> Mat4 {
        let mut out = linalg::zeros4();
        for (l, ld, rate) in &self.jumps {
            if *rate == 0.0 {
                continue;
            }
            let jump = linalg::mul4(&linalg::mul4(l, rho), ld);
            out = linalg::add4(&out, &linalg::scale4(&jump, Complex64::new(*rate, 0.0)));
        }
        let kr = linalg::mul4(&self.k, rho);
        let rk = linalg::mul4(rho, &self.k);
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] -= kr[i][j] + rk[i][j];
            }
        }
        // exact Hermitian symmetrisation
        let mut sym = linalg::zeros4();
        for i in 0..4 {
            for j in 0..4 {
                sym[i][j] = 0.5 * (out[i][j] + out[j][i].conj());
            }
        }
        sym
    }
}

/// Right-hand side of the master equation,
/// `Σₖ (γₖ/2)(2 Lₖ ρ Lₖ† − Lₖ†Lₖ ρ − ρ Lₖ†Lₖ)` over the four jump operators
/// σ₋ and σ₊ on each qubit.
pub fn lindblad_rhs(rho: &DensityMatrix, params: &ReservoirParams) -> Mat4 {
    Dissipators::new(params).apply(rho.elements())
}

fn rk4_step(d: &Dissipators, rho: &Mat4, h: f64) -> Mat4 {
    let axpy = |x: &Mat4, k: &Mat4, s: f64| linalg::add4(x, &linalg::scale4(k, Complex64::new(s, 0.0)));
    let k1 = d.apply(rho);
    let k2 = d.apply(&axpy(rho, &k1, 0.5 * h));
    let k3 = d.apply(&axpy(rho, &k2, 0.5 * h));
    let k4 = d.apply(&axpy(rho, &k3, h));
    let mut out = *rho;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += (h / 6.0) * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
        }
    }
    out
}

fn steps_for(span: f64, dt: f64) -> u64 {
    // nearest integer count that does not exceed dt by more than rounding
    ((span / dt) - 1e-9).ceil().max(0.0) as u64
}

/// RK4 endpoint ρ(t). The step is `t / ceil(t/dt)` so the endpoint is hit
/// exactly.
pub fn integrate(
    rho0: &DensityMatrix,
    params: &ReservoirParams,
    t: f64,
    config: &IntegratorConfig,
) -> Result<DensityMatrix> {
    Ok(integrate_checkpoints(rho0, params, &[t], config)?.remove(0))
}

/// States at each of the increasing `times`, computed along a single
/// trajectory.
pub fn integrate_checkpoints(
    rho0: &DensityMatrix,
    params: &ReservoirParams,
    times: &[f64],
    config: &IntegratorConfig,
) -> Result<Vec<DensityMatrix>> {
    params.check()?;
    config.check(params)?;
    rho0.ensure_valid()?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("checkpoint times must be increasing".into()));
    }
    if let Some(&bad) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::NegativeTime(bad));
    }
    let needed: u64 = {
        let mut prev = 0.0;
        times
            .iter()
            .map(|&t| {
                let s = steps_for(t - prev, config.dt);
                prev = t;
                s
            })
            .sum()
    };
    if needed > config.max_steps {
        return Err(Error::StepBudgetExceeded {
            needed,
            max_steps: config.max_steps,
        });
    }

    let d = Dissipators::new(params);
    let mut state = *rho0.elements();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        let steps = steps_for(span, config.dt);
        if steps > 0 {
            let h = span / steps as f64;
            for _ in 0..steps {
                state = match config.method {
                    Method::Rk4 => rk4_step(&d, &state, h),
                };
            }
        }
        now = t;
        out.push(DensityMatrix::new(state));
    }
    Ok(out)
}
