use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esdlab::SwitchKind;

#[derive(Debug, Parser)]
#[command(name = "esdlab", version, about = "Entanglement sudden death of two qubits in thermal reservoirs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a state and tabulate its elements and negativity.
    Evolve(EvolveArgs),
    /// Time of entanglement sudden death, optionally with a switch.
    EsdTime(EsdTimeArgs),
    /// Death time as a function of the switching time.
    Sweep(SweepArgs),
    /// ESD verdicts for Werner states at zero temperature.
    WernerScan(WernerArgs),
    /// Check a state for Hermiticity, unit trace and positivity.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StateSource {
    /// State as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub state: Option<String>,
    /// excited-psi-plus, bell-psi-plus, bell-phi-plus, werner-singlet(a), werner-triplet(a).
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReservoirArgs {
    /// Mean photon number of reservoir A.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub m: f64,
    /// Mean photon number of reservoir B [default: value of --m].
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TimeSpec {
    /// Single time.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Time grid start:stop:step, stop included.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub reservoir: ReservoirArgs,
    #[command(flatten)]
    pub times: TimeSpec,
    /// Add the max element-wise deviation from an RK4 integration.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EsdTimeArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub reservoir: ReservoirArgs,
    /// Local switch: 11-44 (both qubits) or b-only.
    #[arg(long, value_parser = parse_switch, requires = "t_sw")]
    pub swap: Option<SwitchKind>,
    /// Switching time.
    #[arg(long, requires = "swap", allow_negative_numbers = true)]
    pub t_sw: Option<f64>,
    /// Search horizon [default: 30 / min(gamma1, gamma2)].
    #[arg(long, env = "ESDLAB_HORIZON", allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub reservoir: ReservoirArgs,
    #[arg(long, value_parser = parse_switch, default_value = "11-44")]
    pub swap: SwitchKind,
    /// Switching-time grid start:stop:step.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
    #[arg(long, env = "ESDLAB_HORIZON", allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WernerFamily {
    Singlet,
    Triplet,
    Both,
}

#[derive(Debug, Args)]
pub struct WernerArgs {
    /// Werner weights start:stop:step, each in (0, 1].
    #[arg(long, value_parser = parse_grid, default_value = "0.30:1.0:0.02")]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = WernerFamily::Both)]
    pub kind: WernerFamily,
    #[arg(long, env = "ESDLAB_HORIZON", allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_switch(s: &str) -> Result<SwitchKind, String> {
    s.parse().map_err(|e: esdlab::Error| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `start:stop:step` with `stop` included when it lies on the grid (to
/// within a millionth of a step).
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got '{s}'"));
    };
    let num = |x: &str, what: &str| -> Result<f64, String> {
        let v: f64 = x.trim().parse().map_err(|_| format!("bad {what} '{x}' in grid '{s}'"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{what} must be finite in grid '{s}'"))
        }
    };
    let (start, stop, step) = (num(start, "start")?, num(stop, "stop")?, num(step, "step")?);
    if step <= 0.0 {
        return Err(format!("step must be positive in grid '{s}'"));
    }
    if stop < start {
        return Err(format!("grid '{s}' is empty (stop < start)"));
    }
    let n = ((stop - start) / step + 1e-6).floor() as usize;
    // snap to 12 decimals so 0.1-style steps print as typed
    let snap = |v: f64| (v * 1e12).round() / 1e12;
    Ok(Grid((0..=n).map(|k| snap(start + k as f64 * step)).collect()))
}
