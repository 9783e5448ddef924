//! JSON encodings for states and reservoir parameters.
//!
//! Two state forms are accepted:
//!
//! ```json
//! {"basis": "11,10,01,00", "re": [[...4], ...], "im": [[...4], ...]}
//! {"p11": 0.3, "p22": 0.2, "p33": 0.2, "p44": 0.3, "c14": [0.1, 0.0], "c23": [0.0, 0.0]}
//! ```
//!
//! Numbers are written with the shortest representation that parses back
//! to the same `f64`, so emitted states round-trip bit-exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4};
use crate::qstate::{DensityMatrix, XState};
use crate::thermal::ReservoirParams;

pub const BASIS_LABEL: &str = "11,10,01,00";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default = "default_basis")]
    pub basis: String,
    pub re: [[f64; 4]; 4],
    #[serde(default)]
    pub im: [[f64; 4]; 4],
}

fn default_basis() -> String {
    BASIS_LABEL.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XStateJson {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    #[serde(default)]
    pub c14: [f64; 2],
    #[serde(default)]
    pub c23: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum StateJson {
    Matrix(MatrixJson),
    X(XStateJson),
}

impl From<&DensityMatrix> for MatrixJson {
    fn from(rho: &DensityMatrix) -> Self {
        let e = rho.elements();
        Self {
            basis: default_basis(),
            re: e.map(|row| row.map(|z| z.re)),
            im: e.map(|row| row.map(|z| z.im)),
        }
    }
}

impl From<&XState> for XStateJson {
    fn from(x: &XState) -> Self {
        Self {
            p11: x.p11,
            p22: x.p22,
            p33: x.p33,
            p44: x.p44,
            c14: [x.c14.re, x.c14.im],
            c23: [x.c23.re, x.c23.im],
        }
    }
}

impl StateJson {
    /// Unvalidated density matrix.
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        match self {
            StateJson::Matrix(m) => {
                if m.basis.replace(' ', "") != BASIS_LABEL {
                    return Err(Error::Format(format!(
                        "unsupported basis '{}', expected '{BASIS_LABEL}'",
                        m.basis
                    )));
                }
                let mut e: Mat4 = linalg::zeros4();
                for (row, (re, im)) in e.iter_mut().zip(m.re.iter().zip(&m.im)) {
                    for (z, (&r, &i)) in row.iter_mut().zip(re.iter().zip(im)) {
                        *z = Complex64::new(r, i);
                    }
                }
                Ok(DensityMatrix::new(e))
            }
            StateJson::X(x) => Ok(XState::new(
                [x.p11, x.p22, x.p33, x.p44],
                Complex64::new(x.c14[0], x.c14[1]),
                Complex64::new(x.c23[0], x.c23[1]),
            )
            .to_density_matrix()),
        }
    }
}

/// Parse either state form. Syntax errors carry line/column positions;
/// shape errors name the offending field.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("state JSON: {e}")))?;
    let parsed = if value.get("re").is_some() {
        serde_json::from_value(value).map(StateJson::Matrix)
    } else {
        serde_json::from_value(value).map(StateJson::X)
    };
    parsed
        .map_err(|e| Error::Format(format!("state JSON: {e}")))?
        .to_density_matrix()
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(rho)).expect("finite state is serializable")
}

pub fn x_state_to_json(x: &XState) -> String {
    serde_json::to_string(&XStateJson::from(x)).expect("finite state is serializable")
}

pub fn parse_params(text: &str) -> Result<ReservoirParams> {
    let p: ReservoirParams =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("params JSON: {e}")))?;
    p.check()?;
    Ok(p)
}

pub fn params_to_json(p: &ReservoirParams) -> String {
    serde_json::to_string(p).expect("params are serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::qstate::as_x_state;

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let rho = presets::werner_singlet(0.123456789);
        let back = parse_state(&state_to_json(&rho)).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn compact_form() {
        let x = as_x_state(&presets::excited_psi_plus()).unwrap();
        let back = parse_state(&x_state_to_json(&x)).unwrap();
        assert_eq!(back, x.to_density_matrix());
        let rho = parse_state(r#"{"p11":0.5,"p22":0,"p33":0,"p44":0.5,"c14":[0.5,0]}"#).unwrap();
        assert!(rho.max_abs_diff(&presets::bell_phi_plus()) < 1e-15);
    }

    #[test]
    fn malformed_input_reports_position() {
        let Error::Format(msg) = parse_state("{\"re\": [[1,0,0,0],\n [0,0,0,]]}").unwrap_err() else {
            panic!()
        };
        assert!(msg.contains("line 2"), "{msg}");
        let Error::Format(msg) = parse_state(r#"{"p11":0.5,"p22":0,"p33":0}"#).unwrap_err() else {
            panic!()
        };
        assert!(msg.contains("p44"), "{msg}");
        assert!(parse_state(r#"{"basis":"00,01,10,11","re":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#).is_err());
    }

    #[test]
    fn params_round_trip() {
        let p = ReservoirParams::new(1.0, 0.5, 0.1, 0.2).unwrap();
        assert_eq!(parse_params(&params_to_json(&p)).unwrap(), p);
        assert!(parse_params(r#"{"gamma1":1,"gamma2":1,"m":-1,"n":0}"#).is_err());
    }
}
