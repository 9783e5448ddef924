use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use esdlab::control::{self, EsdTime, SearchConfig};
use esdlab::criteria::{self, WernerKind};
use esdlab::io::{self, MatrixJson};
use esdlab::oracle::{self, IntegratorConfig, MAX_STEP_RATE_PRODUCT};
use esdlab::presets::Preset;
use esdlab::qstate::{self, DensityMatrix};
use esdlab::thermal::{self, ReservoirParams};
use serde_json::{json, Value};

use crate::args::{
    EsdTimeArgs, EvolveArgs, Format, OutputArgs, ReservoirArgs, StateSource, SweepArgs, ValidateArgs, WernerArgs,
    WernerFamily,
};
use crate::CliError;

/// Werner conditions closer to zero than this are flagged as boundary cases.
const WERNER_BOUNDARY_TOL: f64 = 1e-6;

type CliResult = Result<(), CliError>;

fn load_state(source: &StateSource) -> Result<DensityMatrix, CliError> {
    if let Some(name) = &source.preset {
        let preset: Preset = name.parse()?;
        return Ok(preset.state());
    }
    let spec = source.state.as_deref().expect("clap enforces one state source");
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).map_err(|e| CliError::Input(format!("cannot read state file '{spec}': {e}")))?
    };
    Ok(io::parse_state(&text)?)
}

fn reservoir(args: &ReservoirArgs) -> Result<ReservoirParams, CliError> {
    Ok(ReservoirParams::new(args.gamma1, args.gamma2, args.m, args.n.unwrap_or(args.m))?)
}

fn search_config(params: &ReservoirParams, horizon: Option<f64>) -> Result<SearchConfig, CliError> {
    let config = SearchConfig::for_params(params);
    match horizon {
        None => Ok(config),
        Some(h) if h > 0.0 && h.is_finite() => Ok(config.with_horizon(h)),
        Some(h) => Err(esdlab::Error::InvalidHorizon(h).into()),
    }
}

fn write_to(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write '{}': {e}", path.display())))
}

fn emit(output: &OutputArgs, text: &str) -> CliResult {
    match &output.out {
        Some(path) => write_to(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn esd_json(t: &EsdTime) -> Value {
    match t {
        EsdTime::At(t) => json!({ "t_esd": t, "no_death": false }),
        EsdTime::NoDeath { horizon } => json!({ "t_esd": null, "no_death": true, "horizon": horizon }),
    }
}

pub fn evolve(args: EvolveArgs) -> CliResult {
    let rho0 = load_state(&args.source)?;
    let params = reservoir(&args.reservoir)?;
    let times = match (&args.times.t, &args.times.grid) {
        (Some(t), _) => vec![*t],
        (None, Some(g)) => g.0.clone(),
        (None, None) => unreachable!("clap enforces one time source"),
    };
    let states = thermal::trajectory(&rho0, &params, &times)?;
    let negativities = states.iter().map(qstate::negativity).collect::<Result<Vec<_>, _>>()?;
    let deviations = if args.oracle {
        let dt = 1e-3_f64.min(MAX_STEP_RATE_PRODUCT / params.max_rate());
        let numeric = oracle::integrate_checkpoints(&rho0, &params, &times, &IntegratorConfig::with_dt(dt))?;
        Some(states.iter().zip(&numeric).map(|(a, b)| a.max_abs_diff(b)).collect::<Vec<_>>())
    } else {
        None
    };

    let text = match args.output.format {
        Format::Csv => {
            let mut out = String::from("t,rho11,rho22,rho33,rho44");
            for (i, j) in upper_pairs() {
                write!(out, ",re_rho{i}{j},im_rho{i}{j}").unwrap();
            }
            out.push_str(",negativity");
            if deviations.is_some() {
                out.push_str(",rk4_deviation");
            }
            out.push('\n');
            for (k, (t, rho)) in times.iter().zip(&states).enumerate() {
                write!(out, "{t}").unwrap();
                for i in 1..=4 {
                    write!(out, ",{}", rho.get(i, i).re).unwrap();
                }
                for (i, j) in upper_pairs() {
                    let z = rho.get(i, j);
                    write!(out, ",{},{}", z.re, z.im).unwrap();
                }
                write!(out, ",{}", negativities[k]).unwrap();
                if let Some(d) = &deviations {
                    write!(out, ",{}", d[k]).unwrap();
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = times
                .iter()
                .zip(&states)
                .enumerate()
                .map(|(k, (t, rho))| {
                    let mut row = json!({
                        "t": t,
                        "state": MatrixJson::from(rho),
                        "negativity": negativities[k],
                    });
                    if let Some(d) = &deviations {
                        row["rk4_deviation"] = json!(d[k]);
                    }
                    row
                })
                .collect();
            pretty(&json!({ "params": params, "rows": rows }))
        }
    };
    emit(&args.output, &text)
}

fn upper_pairs() -> impl Iterator<Item = (usize, usize)> {
    (1..=4).flat_map(|i| (i + 1..=4).map(move |j| (i, j)))
}

pub fn esd_time(args: EsdTimeArgs) -> CliResult {
    let rho0 = load_state(&args.source)?;
    let params = reservoir(&args.reservoir)?;
    let config = search_config(&params, args.horizon)?;
    let schedule = args.swap.zip(args.t_sw).map(|(kind, t_sw)| kind.at(t_sw));
    let t = control::find_esd_time(&rho0, &params, schedule.as_ref(), &config)?;
    let text = match args.output.format {
        Format::Csv => format!("{t}\n"),
        Format::Json => {
            let mut v = esd_json(&t);
            v["params"] = json!(params);
            if let Some(s) = &schedule {
                v["schedule"] = json!(s);
            } else if let Ok(x) = qstate::as_x_state(&rho0) {
                v["verdict"] = json!(criteria::esd_finite_temperature_with_horizon(&x, &params, config.horizon)?);
            }
            pretty(&v)
        }
    };
    emit(&args.output, &text)
}

pub fn sweep(args: SweepArgs) -> CliResult {
    let rho0 = load_state(&args.source)?;
    let params = reservoir(&args.reservoir)?;
    let config = search_config(&params, args.horizon)?;
    let result = control::sweep_switch(&rho0, &params, args.swap, &args.grid.0, &config)?;
    let summary = json!({
        "t_esd_no_switch": result.t_esd_no_switch.time(),
        "t_end_max": result.t_end_max,
        "t_B": result.t_b,
        "any_no_death": result.any_no_death,
        "samples": result.samples.len(),
    });
    match args.output.format {
        Format::Json => {
            let mut v = serde_json::to_value(&result).expect("sweep result serializes");
            v["summary"] = summary;
            emit(&args.output, &pretty(&v))
        }
        Format::Csv => {
            emit(&args.output, &result.to_csv())?;
            // keep stdout clean for the CSV when it goes there
            if args.output.out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            Ok(())
        }
    }
}

pub fn werner_scan(args: WernerArgs) -> CliResult {
    if let Some(a) = args.grid.0.iter().find(|&&a| !(a > 0.0 && a <= 1.0 + 1e-12)) {
        return Err(CliError::Input(format!("Werner weight must lie in (0, 1], got {a}")));
    }
    let params = ReservoirParams::vacuum();
    let config = search_config(&params, args.horizon)?;
    let kinds: &[WernerKind] = match args.kind {
        WernerFamily::Singlet => &[WernerKind::Singlet],
        WernerFamily::Triplet => &[WernerKind::Triplet],
        WernerFamily::Both => &[WernerKind::Singlet, WernerKind::Triplet],
    };
    let mut rows = Vec::new();
    for &kind in kinds {
        for &a in &args.grid.0 {
            let a = a.min(1.0);
            let rho = kind.state(a);
            let x = qstate::as_x_state(&rho)?;
            let (label, boundary, t) = if !x.is_entangled() {
                let near = x.minor14().abs().min(x.minor23().abs()) < WERNER_BOUNDARY_TOL;
                ("separable", near, None)
            } else {
                let v = criteria::esd_zero_temperature(&x)?;
                let near = v.conditions.iter().any(|c| c.value.abs() < WERNER_BOUNDARY_TOL);
                let t = control::find_esd_time(&rho, &params, None, &config)?;
                (if v.will_die { "esd" } else { "asymptotic" }, near, Some(t))
            };
            rows.push((kind, a, label, boundary, t));
        }
    }
    let kind_name = |k: WernerKind| match k {
        WernerKind::Singlet => "singlet",
        WernerKind::Triplet => "triplet",
    };
    let text = match args.output.format {
        Format::Csv => {
            let mut out = String::from("a,kind,verdict,boundary,t_esd\n");
            for (kind, a, label, boundary, t) in &rows {
                let t = match t {
                    Some(t) => t.to_string(),
                    None => "-".into(),
                };
                writeln!(out, "{a},{},{label},{boundary},{t}", kind_name(*kind)).unwrap();
            }
            out
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(kind, a, label, boundary, t)| {
                    let mut row = json!({ "a": a, "kind": kind_name(*kind), "verdict": label, "boundary": boundary });
                    if let Some(t) = t {
                        row["esd"] = esd_json(t);
                    }
                    row
                })
                .collect();
            pretty(&Value::Array(v))
        }
    };
    emit(&args.output, &text)
}

pub fn validate(args: ValidateArgs) -> CliResult {
    let rho = load_state(&args.source)?;
    let report = rho.validate();
    let valid = report.is_valid();
    let x_state = qstate::is_x_shaped(&rho);
    let negativity = if valid { Some(qstate::negativity(&rho)?) } else { None };
    let entangled = if valid { Some(qstate::is_entangled(&rho)?) } else { None };
    let text = match args.output.format {
        Format::Csv => {
            let mut out = format!("{report}\n");
            if let Some(l) = report.min_eigenvalue {
                writeln!(out, "min eigenvalue: {l}").unwrap();
            }
            writeln!(out, "x-state: {x_state}").unwrap();
            if let (Some(e), Some(n)) = (entangled, negativity) {
                writeln!(out, "entangled: {e}\nnegativity: {n}").unwrap();
            }
            out
        }
        Format::Json => pretty(&json!({
            "valid": valid,
            "report": report,
            "x_state": x_state,
            "entangled": entangled,
            "negativity": negativity,
        })),
    };
    emit(&args.output, &text)?;
    if valid {
        Ok(())
    } else {
        Err(CliError::Input(format!("invalid state: {report}")))
    }
}
