use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eotx::device::TransducerPreset;
use eotx::interaction::{project_improvements, ProjectionStep};
use eotx::labchain::{
    calibrate_rows, efficiency_bounds, read_measurements, write_calibrated, ChainFile,
};
use eotx::output::{format_float, write_text_table};
use eotx::preset::{builtin, PresetFile};
use eotx::sweep::{
    probe_span_hz, report_g0, run_bias_sweep, run_freq_response, run_power_sweep, BiasSearch,
    Knob, SweepSpec,
};
use eotx::units::dbm_to_watts;
use eotx::{ModelError, Result};

/// Cavity electro-optic transducer model: sweeps, coupling report,
/// calibration and projections.
#[derive(Parser, Debug)]
#[command(name = "eotx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Preset file, or `builtin:paper` / `builtin:measured`.
    #[arg(long, default_value = "builtin:paper")]
    preset: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Edit the preset before validation, e.g. `eo_stack.alpha=1.44`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct Range {
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Efficiency and mode structure versus bias voltage.
    BiasSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        /// Held on-chip pump power.
        #[arg(long, allow_negative_numbers = true)]
        pump_dbm: Option<f64>,
    },
    /// Bias-optimized efficiency versus on-chip pump power (dBm).
    PowerSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        /// Hold the bias instead of optimizing it at each power.
        #[arg(long, allow_negative_numbers = true)]
        bias: Option<f64>,
    },
    /// Efficiency and scattering matrix versus microwave drive frequency (Hz).
    FreqResponse {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        /// Held bias; the efficiency-optimal bias when omitted.
        #[arg(long, allow_negative_numbers = true)]
        bias: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        pump_dbm: Option<f64>,
    },
    /// Electro-optic coupling and the efficiency-optimal hybridization.
    G0Report {
        #[command(flatten)]
        common: Common,
    },
    /// Convert measured beat-note powers into on-chip efficiency.
    Calibrate {
        /// Chain calibration file (TOML, `[chain]` table).
        #[arg(long)]
        chain: PathBuf,
        /// Measurement CSV with columns p_in_dbm, p_det_w, p_pump_det_w.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the improvement ledger to a base efficiency.
    Project {
        #[command(flatten)]
        common: Common,
        /// Base efficiency; the preset's `[projection]` value when omitted.
        #[arg(long)]
        base: Option<f64>,
    },
}

struct Loaded {
    file: PresetFile,
    preset: TransducerPreset,
    provenance: Vec<String>,
}

fn read_text(path: &std::path::Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        ModelError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load(common: &Common, command: &str) -> Result<Loaded> {
    let text = match common.preset.strip_prefix("builtin:") {
        Some(name) => builtin(name)
            .ok_or_else(|| ModelError::config("--preset", format!("unknown builtin `{name}`")))?
            .to_string(),
        None => read_text(std::path::Path::new(&common.preset))?,
    };
    let file = PresetFile::load(&text, &common.overrides)?;
    let preset = file.transducer()?;
    let mut provenance = vec![
        format!("eotx {}", env!("CARGO_PKG_VERSION")),
        format!("command: {command}"),
        format!("preset: {}", common.preset),
    ];
    for o in &common.overrides {
        provenance.push(format!("override: {o}"));
    }
    provenance.push("resolved preset:".into());
    provenance.push(file.to_toml());
    Ok(Loaded {
        file,
        preset,
        provenance,
    })
}

fn emit(out: &Option<PathBuf>, bytes: &[u8], summary: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes)?;
            let mut stdout = std::io::stdout().lock();
            for line in summary {
                writeln!(stdout, "{line}")?;
            }
        }
        None => {
            std::io::stdout().lock().write_all(bytes)?;
            let mut stderr = std::io::stderr().lock();
            for line in summary {
                writeln!(stderr, "{line}")?;
            }
        }
    }
    Ok(())
}

fn spec_for(knob: Knob, range: &Range, start: f64, stop: f64, points: usize) -> Result<SweepSpec> {
    SweepSpec::new(
        knob,
        range.start.unwrap_or(start),
        range.stop.unwrap_or(stop),
        range.points.unwrap_or(points),
    )
}

fn bias_search(file: &PresetFile) -> BiasSearch {
    BiasSearch {
        start: file.sweep.bias_start_v,
        stop: file.sweep.bias_stop_v,
        points: file.sweep.bias_search_points,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BiasSweep {
            common,
            range,
            pump_dbm,
        } => {
            let l = load(&common, "bias-sweep")?;
            let s = &l.file.sweep;
            let mut spec = spec_for(Knob::BiasV, &range, s.bias_start_v, s.bias_stop_v, s.bias_points)?;
            if let Some(d) = pump_dbm {
                spec = spec.hold(Knob::PumpDbm, d);
            }
            let sweep = run_bias_sweep(&l.preset, &spec)?;
            let mut buf = Vec::new();
            sweep.write_csv(&mut buf, &with_spec(l.provenance, &spec))?;
            emit(&common.out, &buf, &sweep.summary.lines())
        }
        Command::PowerSweep {
            common,
            range,
            bias,
        } => {
            let l = load(&common, "power-sweep")?;
            let s = &l.file.sweep;
            let mut spec =
                spec_for(Knob::PumpDbm, &range, s.pump_start_dbm, s.pump_stop_dbm, s.pump_points)?;
            if let Some(v) = bias {
                spec = spec.hold(Knob::BiasV, v);
            }
            let sweep = run_power_sweep(
                &l.preset,
                &spec,
                &bias_search(&l.file),
                dbm_to_watts(s.slope_fit_max_dbm),
            )?;
            let mut buf = Vec::new();
            sweep.write_csv(&mut buf, &with_spec(l.provenance, &spec))?;
            emit(&common.out, &buf, &sweep.lines())
        }
        Command::FreqResponse {
            common,
            range,
            bias,
            pump_dbm,
        } => {
            let l = load(&common, "freq-response")?;
            let s = &l.file.sweep;
            let power = pump_dbm.map(dbm_to_watts).unwrap_or(l.preset.pump_power);
            let (lo, hi) = probe_span_hz(&l.preset, power, s.probe_span_kappas)?;
            let mut spec = spec_for(Knob::ProbeHz, &range, lo, hi, s.probe_points)?;
            if let Some(v) = bias {
                spec = spec.hold(Knob::BiasV, v);
            }
            if let Some(d) = pump_dbm {
                spec = spec.hold(Knob::PumpDbm, d);
            }
            let resp = run_freq_response(&l.preset, &spec, &bias_search(&l.file))?;
            let mut buf = Vec::new();
            resp.write_csv(&mut buf, &with_spec(l.provenance, &spec))?;
            emit(&common.out, &buf, &resp.lines())
        }
        Command::G0Report { common } => {
            let l = load(&common, "g0-report")?;
            let report = report_g0(&l.preset)?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf, &l.provenance)?;
            emit(&common.out, &buf, &[])
        }
        Command::Calibrate { chain, input, out } => {
            let file = ChainFile::from_toml_str(&read_text(&chain)?)?;
            let cal = file.calibration()?;
            let rows = read_measurements(read_text(&input)?.as_bytes())?;
            let calibrated = calibrate_rows(&cal, &rows)?;
            let mut comments = vec![
                format!("eotx {}", env!("CARGO_PKG_VERSION")),
                "command: calibrate".into(),
                format!("chain: {}", chain.display()),
                format!("input: {}", input.display()),
            ];
            comments.push("chain file:".into());
            comments.push(file.to_toml());
            let mut buf = Vec::new();
            write_calibrated(&mut buf, &comments, &calibrated)?;
            let summary: Vec<String> = calibrated
                .iter()
                .filter_map(|r| {
                    let p_in = dbm_to_watts(r.input.p_in_dbm);
                    let (lo, hi) = efficiency_bounds(&cal, r.p_sideband_w, p_in).ok()?;
                    Some(format!(
                        "p_in_dbm={} eta={:e} range=[{:e}, {:e}]",
                        r.input.p_in_dbm, r.eta, lo, hi
                    ))
                })
                .collect();
            emit(&out, &buf, &summary)
        }
        Command::Project { common, base } => {
            let l = load(&common, "project")?;
            let base = base.unwrap_or(l.file.projection.base_efficiency);
            let p = project_improvements(base, &l.file.projection.factors, None)?;
            let rows = ledger_rows(base, &p.steps);
            let mut buf = Vec::new();
            write_text_table(&mut buf, &l.provenance, &["step", "enhancement", "efficiency"], &rows)?;
            let summary = vec![
                format!("total_enhancement: {:.1e}", p.total_enhancement),
                format!("order_of_magnitude: ~1e{}", p.total_enhancement.log10().floor()),
                format!("projected: {}", format_float(p.projected)),
                format!("exceeds_ceiling: {}", p.exceeds_ceiling),
            ];
            emit(&common.out, &buf, &summary)
        }
    }
}

fn ledger_rows(base: f64, steps: &[ProjectionStep]) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["base".into(), format_float(1.0), format_float(base)]];
    rows.extend(steps.iter().map(|s| {
        vec![s.name.clone(), format_float(s.enhancement), format_float(s.efficiency)]
    }));
    rows
}


fn with_spec(mut provenance: Vec<String>, spec: &SweepSpec) -> Vec<String> {
    let mut line = format!(
        "sweep: knob={} start={} stop={} points={}",
        spec.knob.name(),
        format_float(spec.start),
        format_float(spec.stop),
        spec.points
    );
    for (k, v) in &spec.fixed {
        line.push_str(&format!(" {}={}", k.name(), format_float(*v)));
    }
    provenance.insert(3, line);
    provenance
}

fn exit_code(e: &ModelError) -> u8 {
    match e.category() {
        "validation" => 2,
        "extrapolation" => 3,
        "unbracketed" => 4,
        "csv" => 5,
        _ => 6,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
