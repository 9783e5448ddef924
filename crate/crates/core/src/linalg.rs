//! Small dense complex linear algebra for 2x2 and 4x4 matrices.
//!
//! Everything here works on fixed-size arrays; the two-qubit problem never
//! needs anything larger than the 8x8 real embedding used by the
//! eigenvalue solver.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn zeros4() -> Mat4 {
    [[ZERO; 4]; 4]
}

pub fn identity4() -> Mat4 {
    let mut m = zeros4();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = zeros4();
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint4(a: &Mat4) -> Mat4 {
    let mut out = zeros4();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn adjoint2(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn add4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += b[i][j];
        }
    }
    out
}

pub fn scale4(a: &Mat4, s: Complex64) -> Mat4 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

/// `a ⊗ b`, with `a` acting on the first (most significant) index.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = zeros4();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn trace4(a: &Mat4) -> Complex64 {
    (0..4).map(|i| a[i][i]).sum()
}

/// Largest entry of `|a - a†|`.
pub fn hermiticity_residual(a: &Mat4) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Frobenius norm of `a - b`.
pub fn frobenius_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Determinant of the submatrix of `a` on rows/columns `idx` (0-based),
/// by cofactor expansion along the first row.
pub fn sub_determinant(a: &Mat4, idx: &[usize]) -> Complex64 {
    match idx.len() {
        0 => ONE,
        1 => a[idx[0]][idx[0]],
        2 => a[idx[0]][idx[0]] * a[idx[1]][idx[1]] - a[idx[0]][idx[1]] * a[idx[1]][idx[0]],
        n => {
            let r = idx[0];
            let mut det = ZERO;
            let mut minor_cols = Vec::with_capacity(n - 1);
            for (k, &c) in idx.iter().enumerate() {
                let entry = a[r][c];
                if entry == ZERO {
                    continue;
                }
                minor_cols.clear();
                minor_cols.extend(idx.iter().copied().filter(|&x| x != c));
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                det += entry * sign * cofactor_minor(a, &idx[1..], &minor_cols);
            }
            det
        }
    }
}

// Determinant of the submatrix with explicit (possibly different) row and
// column index lists of equal length.
fn cofactor_minor(a: &Mat4, rows: &[usize], cols: &[usize]) -> Complex64 {
    match rows.len() {
        0 => ONE,
        1 => a[rows[0]][cols[0]],
        2 => a[rows[0]][cols[0]] * a[rows[1]][cols[1]] - a[rows[0]][cols[1]] * a[rows[1]][cols[0]],
        _ => {
            let r = rows[0];
            let mut det = ZERO;
            for (k, &c) in cols.iter().enumerate() {
                let entry = a[r][c];
                if entry == ZERO {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                det += entry * sign * cofactor_minor(a, &rows[1..], &rest);
            }
            det
        }
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian 4x4 matrix in ascending order.
///
/// Runs cyclic Jacobi rotations on the real symmetric 8x8 embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `a` with every
/// eigenvalue doubled. Only the Hermitian part of `a` is used.
pub fn hermitian_eigenvalues(a: &Mat4) -> Result<[f64; 4]> {
    let mut s = [[0.0_f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let h = 0.5 * (a[i][j] + a[j][i].conj());
            s[i][j] = h.re;
            s[i + 4][j + 4] = h.re;
            s[i][j + 4] = -h.im;
            s[i + 4][j] = h.im;
        }
    }
    let scale = s
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok([0.0; 4]);
    }
    if !scale.is_finite() {
        return Err(Error::EigenNoConvergence { sweeps: 0 });
    }

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..8)
            .flat_map(|p| ((p + 1)..8).map(move |q| (p, q)))
            .map(|(p, q)| s[p][q] * s[p][q])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            converged = true;
            break;
        }
        for p in 0..8 {
            for q in (p + 1)..8 {
                let apq = s[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..8 {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..8 {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
                s[p][q] = 0.0;
                s[q][p] = 0.0;
            }
        }
    }
    if !converged {
        // One more convergence check after the final sweep.
        let off: f64 = (0..8)
            .flat_map(|p| ((p + 1)..8).map(move |q| (p, q)))
            .map(|(p, q)| s[p][q] * s[p][q])
            .sum();
        if off.sqrt() > 1e-13 * scale {
            return Err(Error::EigenNoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
            });
        }
    }

    let mut diag: Vec<f64> = (0..8).map(|i| s[i][i]).collect();
    diag.sort_by(|x, y| x.total_cmp(y));
    // Eigenvalues come in degenerate pairs.
    Ok([
        0.5 * (diag[0] + diag[1]),
        0.5 * (diag[2] + diag[3]),
        0.5 * (diag[4] + diag[5]),
        0.5 * (diag[6] + diag[7]),
    ])
}
