//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the
//! logic and are plain Rust so they can be tested natively.

use esdlab::control::{self, EsdTime, SearchConfig, SwitchKind};
use esdlab::presets::Preset;
use esdlab::qstate::{self, DensityMatrix};
use esdlab::thermal::{self, ReservoirParams};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_POINTS: u32 = 20_000;

fn state(preset: &str) -> Result<DensityMatrix, String> {
    preset.parse::<Preset>().map(|p| p.state()).map_err(|e| e.to_string())
}

fn params(m: f64, n: f64) -> Result<ReservoirParams, String> {
    ReservoirParams::new(1.0, 1.0, m, n).map_err(|e| e.to_string())
}

fn switch(name: &str) -> Result<Option<SwitchKind>, String> {
    match name {
        "" | "none" => Ok(None),
        other => other.parse().map(Some).map_err(|e: esdlab::Error| e.to_string()),
    }
}

fn esd_value(t: &EsdTime) -> Value {
    match t {
        EsdTime::At(t) => json!(t),
        EsdTime::NoDeath { .. } => Value::Null,
    }
}

/// Negativity on `points` evenly spaced times in [0, t_max], with an
/// optional switch at `t_sw`.
pub fn negativity_curve_json(
    preset: &str,
    m: f64,
    n: f64,
    swap: &str,
    t_sw: f64,
    t_max: f64,
    points: u32,
) -> Result<String, String> {
    if !(t_max > 0.0 && t_max.is_finite()) || !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("need t_max > 0 and 2..={MAX_POINTS} points"));
    }
    let rho0 = state(preset)?;
    let p = params(m, n)?;
    let kind = switch(swap)?;
    let ts: Vec<f64> = (0..points).map(|k| t_max * k as f64 / (points - 1) as f64).collect();
    let switched = match kind {
        Some(k) => {
            let before = thermal::evolve(&rho0, &p, t_sw).map_err(|e| e.to_string())?;
            let (a, b) = k.unitaries();
            Some(control::apply_switch(&before, &a, &b).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    let mut negativity = Vec::with_capacity(ts.len());
    for &t in &ts {
        let rho = match &switched {
            Some(after) if t >= t_sw => thermal::evolve(after, &p, t - t_sw),
            _ => thermal::evolve(&rho0, &p, t),
        }
        .map_err(|e| e.to_string())?;
        negativity.push(qstate::negativity(&rho).map_err(|e| e.to_string())?);
    }
    let schedule = kind.map(|k| k.at(t_sw));
    let t_esd = control::find_esd_time(&rho0, &p, schedule.as_ref(), &SearchConfig::for_params(&p))
        .map(|t| esd_value(&t))
        .unwrap_or(Value::Null);
    Ok(json!({ "t": ts, "negativity": negativity, "t_esd": t_esd }).to_string())
}

/// Death time of the preset, `null` when it survives the default horizon.
pub fn esd_time_json(preset: &str, m: f64, n: f64, swap: &str, t_sw: f64) -> Result<String, String> {
    let rho0 = state(preset)?;
    let p = params(m, n)?;
    let schedule = switch(swap)?.map(|k| k.at(t_sw));
    let t = control::find_esd_time(&rho0, &p, schedule.as_ref(), &SearchConfig::for_params(&p))
        .map_err(|e| e.to_string())?;
    Ok(json!({ "t_esd": esd_value(&t) }).to_string())
}

/// `t_end` against switching time on [0, t_max] with spacing `step`.
pub fn sweep_json(preset: &str, m: f64, n: f64, swap: &str, t_max: f64, step: f64) -> Result<String, String> {
    if !(step > 0.0 && t_max >= 0.0 && t_max / step <= MAX_POINTS as f64) {
        return Err(format!("need step > 0, t_max >= 0 and at most {MAX_POINTS} points"));
    }
    let rho0 = state(preset)?;
    let p = params(m, n)?;
    let kind = switch(swap)?.ok_or("sweep needs a switch")?;
    let count = (t_max / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
    let res = control::sweep_switch(&rho0, &p, kind, &grid, &SearchConfig::for_params(&p)).map_err(|e| e.to_string())?;
    let t_end: Vec<Value> = res.samples.iter().map(|s| esd_value(&s.t_end)).collect();
    Ok(json!({
        "t_sw": grid,
        "t_end": t_end,
        "t_esd_no_switch": esd_value(&res.t_esd_no_switch),
        "t_end_max": res.t_end_max,
        "t_b": res.t_b,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn negativity_curve(
    preset: &str,
    m: f64,
    n: f64,
    swap: &str,
    t_sw: f64,
    t_max: f64,
    points: u32,
) -> Result<String, JsError> {
    negativity_curve_json(preset, m, n, swap, t_sw, t_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn esd_time(preset: &str, m: f64, n: f64, swap: &str, t_sw: f64) -> Result<String, JsError> {
    esd_time_json(preset, m, n, swap, t_sw).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(preset: &str, m: f64, n: f64, swap: &str, t_max: f64, step: f64) -> Result<String, JsError> {
    sweep_json(preset, m, n, swap, t_max, step).map_err(|e| JsError::new(&e))
}
