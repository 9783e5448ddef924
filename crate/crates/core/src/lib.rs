//! Two-qubit states in independent thermal reservoirs: closed-form
//! propagation, entanglement sudden death (ESD) detection, and local-unitary
//! switching.
//!
//! Basis order throughout is |11⟩, |10⟩, |01⟩, |00⟩ with qubit A on the
//! left. Element accessors that mirror the physics notation (`get`,
//! `principal_minor`) are 1-based; raw arrays are 0-based.
//!
//! ```
//! use esdlab::{control, presets, thermal::ReservoirParams};
//!
//! let params = ReservoirParams::symmetric(0.1, 0.1);
//! let t = control::find_esd_time(&presets::excited_psi_plus(), &params, None, &control::SearchConfig::default())
//!     .unwrap();
//! assert!((t.time().unwrap() - 0.4115).abs() < 1e-3);
//! ```

pub mod control;
pub mod criteria;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod presets;
pub mod qstate;
pub mod thermal;

pub use control::{find_esd_time, sweep_switch, EsdTime, SearchConfig, SwitchKind, SwitchSchedule, SweepResult};
pub use error::{Error, Result};
pub use qstate::{DensityMatrix, XState};
pub use thermal::{evolve, ReservoirParams};
