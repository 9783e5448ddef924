//! Named initial states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

fn amp(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(|01⟩ + |10⟩)/√2`
pub fn bell_psi_plus() -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    DensityMatrix::projector([amp(0.0), amp(s), amp(s), amp(0.0)])
}

/// `(|01⟩ − |10⟩)/√2`
pub fn bell_psi_minus() -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    DensityMatrix::projector([amp(0.0), amp(-s), amp(s), amp(0.0)])
}

/// `(|00⟩ + |11⟩)/√2`
pub fn bell_phi_plus() -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    DensityMatrix::projector([amp(s), amp(0.0), amp(0.0), amp(s)])
}

/// `(|11⟩⟨11| + 2|Ψ⁺⟩⟨Ψ⁺|)/3`
pub fn excited_psi_plus() -> DensityMatrix {
    let excited = DensityMatrix::from_real_diagonal([1.0, 0.0, 0.0, 0.0]);
    excited.mix(&bell_psi_plus(), 1.0 / 3.0)
}

/// Singlet weight `a` mixed with the maximally mixed state.
pub fn werner_singlet(a: f64) -> DensityMatrix {
    bell_psi_minus().mix(&DensityMatrix::maximally_mixed(), a)
}

/// `|Φ⁺⟩` weight `a` mixed with the maximally mixed state.
pub fn werner_triplet(a: f64) -> DensityMatrix {
    bell_phi_plus().mix(&DensityMatrix::maximally_mixed(), a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    ExcitedPsiPlus,
    BellPsiPlus,
    BellPhiPlus,
    WernerSinglet(f64),
    WernerTriplet(f64),
}

impl Preset {
    pub fn state(&self) -> DensityMatrix {
        match *self {
            Preset::ExcitedPsiPlus => excited_psi_plus(),
            Preset::BellPsiPlus => bell_psi_plus(),
            Preset::BellPhiPlus => bell_phi_plus(),
            Preset::WernerSinglet(a) => werner_singlet(a),
            Preset::WernerTriplet(a) => werner_triplet(a),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Accepts `excited-psi-plus`, `bell-psi-plus`, `bell-phi-plus`, and
    /// `werner-singlet(a)` / `werner-singlet:a` (same for `werner-triplet`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "excited-psi-plus" | "eq18" => return Ok(Preset::ExcitedPsiPlus),
            "bell-psi-plus" => return Ok(Preset::BellPsiPlus),
            "bell-phi-plus" => return Ok(Preset::BellPhiPlus),
            _ => {}
        }
        let (name, arg) = if let Some(rest) = s.strip_suffix(')') {
            rest.split_once('(')
                .ok_or_else(|| Error::Format(format!("unknown preset '{s}'")))?
        } else {
            s.split_once(':')
                .ok_or_else(|| Error::Format(format!("unknown preset '{s}'")))?
        };
        let a: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad Werner weight '{arg}' in preset '{s}'")))?;
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Format(format!("Werner weight must lie in (0, 1], got {a}")));
        }
        match name.trim() {
            "werner-singlet" => Ok(Preset::WernerSinglet(a)),
            "werner-triplet" => Ok(Preset::WernerTriplet(a)),
            other => Err(Error::Format(format!("unknown preset '{other}'"))),
        }
    }
}
