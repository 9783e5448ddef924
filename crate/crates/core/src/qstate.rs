//! Two-qubit density matrices, X-states, partial transposition and the
//! principal-minor separability test.
//!
//! Basis ordering, used for every index in this crate:
//!
//! | index | ket     |
//! |-------|---------|
//! | 1     | \|11⟩   |
//! | 2     | \|10⟩   |
//! | 3     | \|01⟩   |
//! | 4     | \|00⟩   |
//!
//! The first bit belongs to qubit A, the second to qubit B. Internally the
//! arrays are 0-based, so `elements[0][3]` is ρ₁₄.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, ZERO};

pub const TAU_HERM: f64 = 1e-10;
pub const TAU_TRACE: f64 = 1e-10;
pub const TAU_PSD: f64 = 1e-9;
pub const TAU_X: f64 = 1e-10;

/// A 4x4 complex matrix in the `|11⟩, |10⟩, |01⟩, |00⟩` basis.
///
/// Construction is unchecked so that arbitrary input can be passed to
/// [`validate`]; use [`DensityMatrix::try_new`] for a checked state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    elements: Mat4,
}

impl DensityMatrix {
    pub fn new(elements: Mat4) -> Self {
        Self { elements }
    }

    pub fn try_new(elements: Mat4) -> Result<Self> {
        let rho = Self::new(elements);
        rho.ensure_valid()?;
        Ok(rho)
    }

    pub fn from_real_diagonal(d: [f64; 4]) -> Self {
        let mut m = linalg::zeros4();
        for (i, v) in d.into_iter().enumerate() {
            m[i][i] = Complex64::new(v, 0.0);
        }
        Self::new(m)
    }

    /// `|ψ⟩⟨ψ|` for an (unnormalised) amplitude vector.
    pub fn projector(psi: [Complex64; 4]) -> Self {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let mut m = linalg::zeros4();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj() / norm;
            }
        }
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self::from_real_diagonal([0.25; 4])
    }

    pub fn elements(&self) -> &Mat4 {
        &self.elements
    }

    /// 1-based element access, `get(1, 4)` is ρ₁₄.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row - 1][col - 1]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.elements[i - 1][i - 1].re
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace4(&self.elements)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidState(report.to_string()))
        }
    }

    /// Combination of two states, `w·self + (1 - w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        let a = linalg::scale4(&self.elements, Complex64::new(w, 0.0));
        let b = linalg::scale4(&other.elements, Complex64::new(1.0 - w, 0.0));
        DensityMatrix::new(linalg::add4(&a, &b))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.elements, &other.elements)
    }
}

impl AsRef<Mat4> for DensityMatrix {
    fn as_ref(&self) -> &Mat4 {
        &self.elements
    }
}

impl From<XState> for DensityMatrix {
    fn from(x: XState) -> Self {
        x.to_density_matrix()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonFinite,
    NonHermitian,
    TraceNotOne,
    NegativePopulation,
    NotPositiveSemidefinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub magnitude: f64,
}

/// Result of [`validate`]: every failed invariant with the size of the
/// violation. Empty means valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub min_eigenvalue: Option<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{:?} ({:.3e})", v.kind, v.magnitude))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Check the Hermiticity, unit-trace and positivity invariants.
pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    let m = rho.elements();
    let mut violations = Vec::new();

    if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        violations.push(Violation {
            kind: ViolationKind::NonFinite,
            magnitude: f64::NAN,
        });
        return ValidationReport {
            violations,
            min_eigenvalue: None,
        };
    }

    let herm = linalg::hermiticity_residual(m);
    if herm > TAU_HERM {
        violations.push(Violation {
            kind: ViolationKind::NonHermitian,
            magnitude: herm,
        });
    }

    let tr = rho.trace();
    let trace_err = (tr - Complex64::new(1.0, 0.0)).norm();
    if trace_err > TAU_TRACE {
        violations.push(Violation {
            kind: ViolationKind::TraceNotOne,
            magnitude: trace_err,
        });
    }

    let worst_pop = (0..4).map(|i| m[i][i].re).fold(f64::INFINITY, f64::min);
    if worst_pop < -TAU_PSD {
        violations.push(Violation {
            kind: ViolationKind::NegativePopulation,
            magnitude: -worst_pop,
        });
    }

    let min_eigenvalue = match linalg::hermitian_eigenvalues(m) {
        Ok(ev) => Some(ev[0]),
        Err(_) => None,
    };
    match min_eigenvalue {
        Some(lmin) if lmin < -TAU_PSD => violations.push(Violation {
            kind: ViolationKind::NotPositiveSemidefinite,
            magnitude: -lmin,
        }),
        Some(_) => {}
        None => violations.push(Violation {
            kind: ViolationKind::NotPositiveSemidefinite,
            magnitude: f64::NAN,
        }),
    }

    ValidationReport {
        violations,
        min_eigenvalue,
    }
}

/// Partial transpose on qubit B: entry `(a b; a' b')` of the result is
/// entry `(a b'; a' b)` of the input.
///
/// For an X-state this moves ρ₂₃ to position (1,4) and ρ₁₄ to (2,3).
/// The result is Hermitian with unit trace but not necessarily positive.
pub fn partial_transpose(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let residual = linalg::hermiticity_residual(rho.elements());
    if residual > TAU_HERM {
        return Err(Error::NonHermitian { residual });
    }
    Ok(DensityMatrix::new(partial_transpose_raw(rho.elements())))
}

pub(crate) fn partial_transpose_raw(m: &Mat4) -> Mat4 {
    let mut out = linalg::zeros4();
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    out[2 * a + b][2 * a2 + b2] = m[2 * a + b2][2 * a2 + b];
                }
            }
        }
    }
    out
}

/// Determinant of the submatrix on the given 1-based, strictly increasing
/// row/column indices. The imaginary residue (zero for Hermitian input up
/// to rounding) is dropped.
pub fn principal_minor(matrix: &impl AsRef<Mat4>, indices: &[usize]) -> Result<f64> {
    if indices.is_empty()
        || indices.iter().any(|&i| !(1..=4).contains(&i))
        || indices.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidIndices(indices.to_vec()));
    }
    let zero_based: Vec<usize> = indices.iter().map(|i| i - 1).collect();
    Ok(linalg::sub_determinant(matrix.as_ref(), &zero_based).re)
}

/// The seven principal minors of the partial transpose whose sign is not
/// fixed by positivity of ρ itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinorSet {
    pub m14: f64,
    pub m23: f64,
    pub m123: f64,
    pub m124: f64,
    pub m134: f64,
    pub m234: f64,
    pub m1234: f64,
}

impl MinorSet {
    pub const INDEX_SETS: [&'static [usize]; 7] = [
        &[1, 4],
        &[2, 3],
        &[1, 2, 3],
        &[1, 2, 4],
        &[1, 3, 4],
        &[2, 3, 4],
        &[1, 2, 3, 4],
    ];

    pub fn of(matrix: &DensityMatrix) -> MinorSet {
        let m = matrix.elements();
        let d = |idx: &[usize]| linalg::sub_determinant(m, idx).re;
        MinorSet {
            m14: d(&[0, 3]),
            m23: d(&[1, 2]),
            m123: d(&[0, 1, 2]),
            m124: d(&[0, 1, 3]),
            m134: d(&[0, 2, 3]),
            m234: d(&[1, 2, 3]),
            m1234: d(&[0, 1, 2, 3]),
        }
    }

    pub fn values(&self) -> [f64; 7] {
        [
            self.m14, self.m23, self.m123, self.m124, self.m134, self.m234, self.m1234,
        ]
    }

    pub fn min(&self) -> f64 {
        self.values().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Index set (1-based) of the smallest minor.
    pub fn argmin(&self) -> &'static [usize] {
        let v = self.values();
        let (k, _) = v
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("seven values");
        Self::INDEX_SETS[k]
    }
}

/// `P(ρᴾᵀ)`, the smallest of the seven undetermined principal minors of the
/// partial transpose. For two qubits `P < 0` exactly when ρ is entangled.
pub fn min_seven_minors(rho: &DensityMatrix) -> Result<(f64, MinorSet)> {
    let pt = partial_transpose(rho)?;
    let minors = MinorSet::of(&pt);
    Ok((minors.min(), minors))
}

/// Entanglement test on the exact sign of `P(ρᴾᵀ)`. No tolerance is
/// applied, so asymptotically decaying entanglement stays visible.
pub fn is_entangled(rho: &DensityMatrix) -> Result<bool> {
    Ok(min_seven_minors(rho)?.0 < 0.0)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose. For two qubits there is at most one.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho)?;
    let ev = linalg::hermitian_eigenvalues(pt.elements())?;
    Ok(ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

/// Two-qubit X-state: populations plus the two anti-diagonal coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub c14: Complex64,
    pub c23: Complex64,
}

/// Which anti-diagonal block of the partial transpose can go negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntanglementCase {
    /// ρ₁₁ρ₄₄ < |ρ₂₃|²
    Case1,
    /// ρ₂₂ρ₃₃ < |ρ₁₄|²
    Case2,
}

impl XState {
    pub fn new(p: [f64; 4], c14: Complex64, c23: Complex64) -> Self {
        Self {
            p11: p[0],
            p22: p[1],
            p33: p[2],
            p44: p[3],
            c14,
            c23,
        }
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.p11, self.p22, self.p33, self.p44]
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let mut m = linalg::zeros4();
        m[0][0] = Complex64::new(self.p11, 0.0);
        m[1][1] = Complex64::new(self.p22, 0.0);
        m[2][2] = Complex64::new(self.p33, 0.0);
        m[3][3] = Complex64::new(self.p44, 0.0);
        m[0][3] = self.c14;
        m[3][0] = self.c14.conj();
        m[1][2] = self.c23;
        m[2][1] = self.c23.conj();
        DensityMatrix::new(m)
    }

    /// Positivity and trace conditions of the X form.
    pub fn is_valid(&self) -> bool {
        let p = self.populations();
        p.iter().all(|&x| x >= -TAU_PSD && x.is_finite())
            && (p.iter().sum::<f64>() - 1.0).abs() <= TAU_TRACE
            && self.p22 * self.p33 - self.c23.norm_sqr() >= -TAU_PSD
            && self.p11 * self.p44 - self.c14.norm_sqr() >= -TAU_PSD
    }

    /// `[ρᴾᵀ(14)] = ρ₁₁ρ₄₄ − |ρ₂₃|²`
    pub fn minor14(&self) -> f64 {
        self.p11 * self.p44 - self.c23.norm_sqr()
    }

    /// `[ρᴾᵀ(23)] = ρ₂₂ρ₃₃ − |ρ₁₄|²`
    pub fn minor23(&self) -> f64 {
        self.p22 * self.p33 - self.c14.norm_sqr()
    }

    /// All seven minors from the two independent ones.
    pub fn minor_set(&self) -> MinorSet {
        let m14 = self.minor14();
        let m23 = self.minor23();
        MinorSet {
            m14,
            m23,
            m123: self.p11 * m23,
            m124: self.p22 * m14,
            m134: self.p33 * m14,
            m234: self.p44 * m23,
            m1234: m14 * m23,
        }
    }

    pub fn is_entangled(&self) -> bool {
        self.minor14() < 0.0 || self.minor23() < 0.0
    }

    pub fn entanglement_case(&self) -> Option<EntanglementCase> {
        if self.minor14() < 0.0 {
            Some(EntanglementCase::Case1)
        } else if self.minor23() < 0.0 {
            Some(EntanglementCase::Case2)
        } else {
            None
        }
    }

    /// Exact negativity from the 2x2 blocks of the partial transpose.
    pub fn negativity(&self) -> f64 {
        let block = |a: f64, b: f64, c2: f64| {
            // smaller eigenvalue of [[a, c], [c*, b]], written to avoid
            // cancellation when it is close to zero
            let half_sum = 0.5 * (a + b);
            let root = (0.25 * (a - b) * (a - b) + c2).sqrt();
            let lmin = if half_sum > 0.0 {
                (a * b - c2) / (half_sum + root)
            } else {
                half_sum - root
            };
            (-lmin).max(0.0)
        };
        block(self.p11, self.p44, self.c23.norm_sqr()) + block(self.p22, self.p33, self.c14.norm_sqr())
    }
}

const X_EXCLUDED: [(usize, usize, &str); 4] = [(0, 1, "12"), (0, 2, "13"), (1, 3, "24"), (2, 3, "34")];

/// Read a density matrix as an X-state. Fails if any of ρ₁₂, ρ₁₃, ρ₂₄, ρ₃₄
/// (or their conjugate partners) exceeds [`TAU_X`] in magnitude.
pub fn as_x_state(rho: &DensityMatrix) -> Result<XState> {
    let m = rho.elements();
    for (i, j, name) in X_EXCLUDED {
        let magnitude = m[i][j].norm().max(m[j][i].norm());
        if magnitude > TAU_X {
            return Err(Error::NotXState {
                element: name,
                magnitude,
            });
        }
    }
    Ok(XState {
        p11: m[0][0].re,
        p22: m[1][1].re,
        p33: m[2][2].re,
        p44: m[3][3].re,
        c14: m[0][3],
        c23: m[1][2],
    })
}

pub fn is_x_shaped(rho: &DensityMatrix) -> bool {
    let m = rho.elements();
    X_EXCLUDED
        .iter()
        .all(|&(i, j, _)| m[i][j] == ZERO && m[j][i] == ZERO)
}
