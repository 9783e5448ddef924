#![allow(dead_code)]

use std::f64::consts::TAU;

use esdlab::control::{self, LocalUnitaryParams};
use esdlab::linalg;
use esdlab::qstate::{self, DensityMatrix, XState};
use esdlab::thermal::{self, ReservoirParams};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `G G† / tr(G G†)` for a matrix with entries taken from `re`, `im`.
pub fn state_from_entries(re: &[f64; 16], im: &[f64; 16]) -> DensityMatrix {
    let mut g = linalg::zeros4();
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = Complex64::new(re[4 * i + j], im[4 * i + j]);
        }
    }
    let mut rho = linalg::mul4(&g, &linalg::adjoint4(&g));
    let tr = linalg::trace4(&rho).re;
    for row in rho.iter_mut() {
        for z in row.iter_mut() {
            *z /= tr;
        }
    }
    DensityMatrix::new(rho)
}

pub fn random_state(rng: &mut StdRng) -> DensityMatrix {
    let mut re = [0.0; 16];
    let mut im = [0.0; 16];
    for k in 0..16 {
        re[k] = rng.random_range(-1.0..1.0);
        im[k] = rng.random_range(-1.0..1.0);
    }
    state_from_entries(&re, &im)
}

/// PSD X-state from eight numbers in [0, 1): four population weights, then
/// coherence magnitude fraction and phase for ρ₁₄ and ρ₂₃.
pub fn x_state_from(u: [f64; 8]) -> XState {
    let w: Vec<f64> = u[..4].iter().map(|x| x + 1e-3).collect();
    let s: f64 = w.iter().sum();
    let p = [w[0] / s, w[1] / s, w[2] / s, w[3] / s];
    let c14 = Complex64::from_polar(u[4] * (p[0] * p[3]).sqrt(), TAU * u[5]);
    let c23 = Complex64::from_polar(u[6] * (p[1] * p[2]).sqrt(), TAU * u[7]);
    XState::new(p, c14, c23)
}

pub fn random_x_state(rng: &mut StdRng) -> XState {
    x_state_from(std::array::from_fn(|_| rng.random::<f64>()))
}

/// Rejection-sampled entangled X-state, alternating between the two cases.
pub fn random_entangled_x_state(rng: &mut StdRng) -> XState {
    loop {
        let x = random_x_state(rng);
        let (p11, p22, p33, p44) = (x.p11, x.p22, x.p33, x.p44);
        let case1 = rng.random::<bool>();
        let (inner, outer) = if case1 { (p11 * p44, p22 * p33) } else { (p22 * p33, p11 * p44) };
        if inner >= outer {
            continue;
        }
        // magnitude strictly between the entanglement threshold and the PSD bound
        let lo = inner.sqrt();
        let hi = outer.sqrt();
        let mag = lo + (hi - lo) * rng.random_range(0.05..1.0);
        let phase = TAU * rng.random::<f64>();
        let other = rng.random::<f64>() * lo;
        let other_phase = TAU * rng.random::<f64>();
        let (c14, c23) = if case1 {
            (Complex64::from_polar(other, other_phase), Complex64::from_polar(mag, phase))
        } else {
            (Complex64::from_polar(mag, phase), Complex64::from_polar(other, other_phase))
        };
        let out = XState::new([p11, p22, p33, p44], c14, c23);
        if out.is_entangled() && out.to_density_matrix().is_valid() {
            return out;
        }
    }
}

pub fn arb_unit8() -> impl Strategy<Value = [f64; 8]> {
    prop::array::uniform8(0.0..1.0f64)
}

pub fn arb_state() -> impl Strategy<Value = DensityMatrix> {
    (prop::array::uniform16(-1.0..1.0f64), prop::array::uniform16(-1.0..1.0f64))
        .prop_map(|(re, im)| state_from_entries(&re, &im))
}

pub fn arb_x_state() -> impl Strategy<Value = XState> {
    arb_unit8().prop_map(x_state_from)
}

pub fn arb_params() -> impl Strategy<Value = ReservoirParams> {
    (0.2..2.0f64, 0.2..2.0f64, 0.0..2.0f64, 0.0..2.0f64)
        .prop_map(|(g1, g2, m, n)| ReservoirParams::new(g1, g2, m, n).unwrap())
}

pub fn arb_unitary() -> impl Strategy<Value = LocalUnitaryParams> {
    prop::array::uniform4(-7.0..7.0f64).prop_map(|[theta, alpha, beta, omega]| LocalUnitaryParams {
        theta,
        alpha,
        beta,
        omega,
    })
}

/// X-preserving: θ an integer multiple of π/2, arbitrary phases.
pub fn arb_x_unitary() -> impl Strategy<Value = LocalUnitaryParams> {
    (-4i32..5, prop::array::uniform3(-7.0..7.0f64)).prop_map(|(r, [alpha, beta, omega])| LocalUnitaryParams {
        theta: r as f64 * std::f64::consts::FRAC_PI_2,
        alpha,
        beta,
        omega,
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn physical(rho: &DensityMatrix, what: &str) -> Result<(), TestCaseError> {
    let report = rho.validate();
    ensure(report.is_valid(), || format!("{what}: {report}"))
}

pub fn check_evolution_physical(rho: &DensityMatrix, params: &ReservoirParams, t: f64) -> Result<(), TestCaseError> {
    physical(&thermal::evolve(rho, params, t).unwrap(), "evolved state")
}

pub fn check_x_closure_evolution(x: &XState, params: &ReservoirParams, t: f64) -> Result<(), TestCaseError> {
    let out = thermal::evolve(&x.to_density_matrix(), params, t).unwrap();
    let e = out.elements();
    for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        ensure(e[i][j] == Complex64::new(0.0, 0.0) && e[j][i] == Complex64::new(0.0, 0.0), || {
            format!("element ({}, {}) = {} after evolution", i + 1, j + 1, e[i][j])
        })?;
    }
    Ok(())
}

pub fn check_semigroup(rho: &DensityMatrix, params: &ReservoirParams, t1: f64, t2: f64) -> Result<(), TestCaseError> {
    let two_step = thermal::evolve(&thermal::evolve(rho, params, t1).unwrap(), params, t2).unwrap();
    let one_step = thermal::evolve(rho, params, t1 + t2).unwrap();
    let d = two_step.max_abs_diff(&one_step);
    ensure(d < 1e-12, || format!("semigroup deviation {d:.3e}"))
}

pub fn check_switch_invariants(
    rho: &DensityMatrix,
    a: &LocalUnitaryParams,
    b: &LocalUnitaryParams,
) -> Result<(), TestCaseError> {
    let out = control::apply_switch(rho, a, b).unwrap();
    physical(&out, "switched state")?;
    let before = linalg::hermitian_eigenvalues(rho.elements()).unwrap();
    let after = linalg::hermitian_eigenvalues(out.elements()).unwrap();
    for (x, y) in before.iter().zip(after) {
        ensure((x - y).abs() < 1e-12, || format!("spectrum changed {before:?} -> {after:?}"))?;
    }
    let n0 = qstate::negativity(rho).unwrap();
    let n1 = qstate::negativity(&out).unwrap();
    ensure((n0 - n1).abs() < 1e-12, || format!("negativity changed {n0} -> {n1}"))
}

pub fn check_x_closure_switch(x: &XState, a: &LocalUnitaryParams, b: &LocalUnitaryParams) -> Result<(), TestCaseError> {
    ensure(control::is_x_preserving(a, b), || "params not X-preserving".into())?;
    let out = control::apply_switch(&x.to_density_matrix(), a, b).unwrap();
    ensure(qstate::as_x_state(&out).is_ok(), || format!("switch broke X shape: {:?}", out.elements()))
}

pub fn check_partial_transpose(rho: &DensityMatrix) -> Result<(), TestCaseError> {
    let pt = qstate::partial_transpose(rho).unwrap();
    ensure(qstate::partial_transpose(&pt).unwrap() == *rho, || "PT is not an involution".into())?;
    let dtr = (pt.trace() - rho.trace()).norm();
    ensure(dtr < 1e-15, || format!("PT changed trace by {dtr:.3e}"))?;
    let herm = linalg::hermiticity_residual(pt.elements());
    ensure(herm < 1e-15, || format!("PT not Hermitian ({herm:.3e})"))
}

pub fn check_minor_sign_matches_negativity(rho: &DensityMatrix) -> Result<(), TestCaseError> {
    let (p, _) = qstate::min_seven_minors(rho).unwrap();
    let neg = qstate::negativity(rho).unwrap();
    ensure((0.0..=0.5 + 1e-12).contains(&neg), || format!("negativity {neg} outside [0, 1/2]"))?;
    if p.abs() <= qstate::TAU_PSD || neg <= qstate::TAU_PSD {
        return Ok(());
    }
    ensure((p < 0.0) == (neg > 0.0), || format!("minor {p:.3e} vs negativity {neg:.3e}"))
}

pub fn check_minor_identities(x: &XState) -> Result<(), TestCaseError> {
    let direct = qstate::MinorSet::of(&qstate::partial_transpose(&x.to_density_matrix()).unwrap());
    let closed = x.minor_set();
    for (a, b) in direct.values().iter().zip(closed.values()) {
        ensure((a - b).abs() < 1e-12, || format!("minor identity off: {a} vs {b}"))?;
    }
    Ok(())
}

pub fn check_negativity_monotone(x: &XState, params: &ReservoirParams) -> Result<(), TestCaseError> {
    let rho = x.to_density_matrix();
    let mut prev = f64::INFINITY;
    for k in 0..=40 {
        let t = 0.1 * k as f64;
        let n = qstate::negativity(&thermal::evolve(&rho, params, t).unwrap()).unwrap();
        ensure(n <= prev + 1e-12, || format!("negativity rose at t = {t}: {prev} -> {n}"))?;
        prev = n;
    }
    Ok(())
}
