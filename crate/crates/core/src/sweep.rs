//! Declarative sweeps over one knob (bias voltage, probe frequency or pump
//! power) and the reports built on them.
//!
//! Points are evaluated in parallel and returned sorted by knob value, so
//! output bytes never depend on scheduling.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::device::{resolve, resolve_at_delta, Resolved, TransducerPreset};
use crate::error::{ensure, Result};
use crate::optimize::{golden_max, grid_golden_max, linear_fit, LinearFit};
use crate::output::write_table;
use crate::scattering::{
    apparent_efficiency, bandwidth_3db, scattering_matrix, Bandwidth, ScatterMatrix,
};
use crate::units::{dbm_to_watts, hz, to_hz};

/// Golden-section tolerance on bias voltage (V).
const BIAS_TOL: f64 = 1e-6;
/// Golden-section tolerance on θ (rad).
pub const THETA_TOL: f64 = 1e-4;
/// θ search range, as fractions of π.
const THETA_RANGE: (f64, f64) = (0.02, 0.98);
const THETA_GRID: usize = 481;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Knob {
    BiasV,
    ProbeHz,
    PumpDbm,
}

impl Knob {
    pub fn name(self) -> &'static str {
        match self {
            Knob::BiasV => "bias_v",
            Knob::ProbeHz => "probe_hz",
            Knob::PumpDbm => "pump_dbm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub knob: Knob,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Values held for the other knobs. Missing entries use the preset
    /// default (pump power), the microwave resonance (probe) or the
    /// efficiency-optimal bias.
    pub fixed: BTreeMap<Knob, f64>,
}

impl SweepSpec {
    pub fn new(knob: Knob, start: f64, stop: f64, points: usize) -> Result<Self> {
        let spec = SweepSpec {
            knob,
            start,
            stop,
            points,
            fixed: BTreeMap::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hold(mut self, knob: Knob, value: f64) -> Self {
        self.fixed.insert(knob, value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.points >= 2, "points", "must be >= 2")?;
        ensure(self.start.is_finite(), "start", "must be finite")?;
        ensure(self.stop.is_finite(), "stop", "must be finite")?;
        ensure(self.start != self.stop, "stop", "must differ from start")?;
        ensure(
            !self.fixed.contains_key(&self.knob),
            "fixed",
            "cannot hold the swept knob",
        )?;
        for (k, v) in &self.fixed {
            ensure(v.is_finite(), &format!("fixed.{}", k.name()), "must be finite")?;
        }
        Ok(())
    }

    /// Evenly spaced knob values in ascending order.
    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = (self.start.min(self.stop), self.start.max(self.stop));
        let step = (hi - lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { hi } else { lo + step * i as f64 })
            .collect()
    }

    fn expect_knob(&self, knob: Knob) -> Result<()> {
        self.validate()?;
        ensure(
            self.knob == knob,
            "knob",
            &format!("expected {}, got {}", knob.name(), self.knob.name()),
        )
    }
}

/// One evaluated operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub bias: f64,
    pub resolved: Resolved,
    pub s: ScatterMatrix,
    pub eta_triple: f64,
    pub eta_apparent: f64,
}

/// Evaluate the model at a bias voltage and pump power. `probe` is the
/// absolute microwave drive frequency (rad/s); `None` drives on resonance.
pub fn evaluate(
    preset: &TransducerPreset,
    bias: f64,
    pump_power: f64,
    probe: Option<f64>,
) -> Result<Point> {
    let resolved = resolve(preset, bias, pump_power, probe)?;
    point_from(bias, resolved)
}

fn point_from(bias: f64, resolved: Resolved) -> Result<Point> {
    let s = scattering_matrix(&resolved.scatter)?;
    let eta_apparent = apparent_efficiency(&resolved.scatter, &resolved.dr)?;
    Ok(Point {
        bias,
        resolved,
        s,
        eta_triple: s.s_eo.norm_sqr(),
        eta_apparent,
    })
}

/// Per-point sweep output. Frequencies are absolute, in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub knob: f64,
    pub theta: f64,
    pub omega_plus_hz: f64,
    pub omega_minus_hz: f64,
    pub n_minus: f64,
    pub g_hz: f64,
    pub cooperativity: f64,
    pub eta_triple: f64,
    pub eta_apparent: f64,
    pub kappa_m_i_hz: f64,
}

pub const RECORD_COLUMNS: [&str; 9] = [
    "theta",
    "omega_plus_hz",
    "omega_minus_hz",
    "n_minus",
    "g_hz",
    "cooperativity",
    "eta_triple",
    "eta_apparent",
    "kappa_m_i_hz",
];

pub const SCATTER_COLUMNS: [&str; 8] = [
    "re_s_oo", "im_s_oo", "re_s_oe", "im_s_oe", "re_s_eo", "im_s_eo", "re_s_ee", "im_s_ee",
];

impl SweepRecord {
    pub fn new(knob: f64, p: &Point) -> Self {
        let r = &p.resolved;
        SweepRecord {
            knob,
            theta: r.modes.theta,
            omega_plus_hz: to_hz(r.modes.omega_plus),
            omega_minus_hz: to_hz(r.modes.omega_minus),
            n_minus: r.op.n_minus,
            g_hz: to_hz(r.op.g),
            cooperativity: r.op.cooperativity,
            eta_triple: p.eta_triple,
            eta_apparent: p.eta_apparent,
            kappa_m_i_hz: to_hz(r.kappa_m_i_intrinsic),
        }
    }

    pub fn row(&self) -> Vec<f64> {
        vec![
            self.knob,
            self.theta,
            self.omega_plus_hz,
            self.omega_minus_hz,
            self.n_minus,
            self.g_hz,
            self.cooperativity,
            self.eta_triple,
            self.eta_apparent,
            self.kappa_m_i_hz,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.row().iter().all(|v| v.is_finite())
    }
}

fn header(knob: Knob, extra: &[&'static str]) -> Vec<&'static str> {
    let mut h = vec![knob.name()];
    h.extend(RECORD_COLUMNS);
    h.extend(extra);
    h
}

fn held_power(preset: &TransducerPreset, spec: &SweepSpec) -> f64 {
    spec.fixed
        .get(&Knob::PumpDbm)
        .map(|&d| dbm_to_watts(d))
        .unwrap_or(preset.pump_power)
}

fn held_probe(spec: &SweepSpec) -> Option<f64> {
    spec.fixed.get(&Knob::ProbeHz).map(|&f| hz(f))
}

fn eval_all<T: Send>(
    values: &[f64],
    f: impl Fn(f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    values.par_iter().map(|&v| f(v)).collect()
}

/// Bias range searched when a sweep needs the efficiency-optimal bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSearch {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl BiasSearch {
    pub fn validate(&self) -> Result<()> {
        ensure(self.start.is_finite() && self.stop.is_finite(), "bias_search", "must be finite")?;
        ensure(self.start != self.stop, "bias_search", "empty range")?;
        ensure(self.points >= 3, "bias_search.points", "must be >= 3")
    }
}

/// Bias that maximizes the apparent efficiency at the given power.
pub fn best_bias(
    preset: &TransducerPreset,
    pump_power: f64,
    probe: Option<f64>,
    search: &BiasSearch,
) -> Result<Point> {
    search.validate()?;
    // Surface resolve errors before the optimizer hides them.
    evaluate(preset, search.start, pump_power, probe)?;
    let eta = |v: f64| {
        evaluate(preset, v, pump_power, probe)
            .map(|p| p.eta_apparent)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (lo, hi) = (search.start.min(search.stop), search.start.max(search.stop));
    let (v, _) = grid_golden_max(eta, lo, hi, search.points, BIAS_TOL);
    evaluate(preset, v, pump_power, probe)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub bias: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasSummary {
    /// Interior local maxima of the apparent efficiency, refined.
    pub maxima: Vec<Extremum>,
    /// Interior local minima, refined.
    pub minima: Vec<Extremum>,
    /// The minimum between the far-detuned plateau and the nearest peak.
    pub interference_minimum: Option<Extremum>,
    /// Sweep end farthest from the anticrossing.
    pub plateau: Extremum,
    /// Double-resonance-only efficiency at the plateau bias.
    pub plateau_dr_only: f64,
    /// Biases where `ω₊ − ω₋ = ω_m` exactly.
    pub triple_resonance_biases: Vec<f64>,
    pub anticrossing_bias: Option<f64>,
    pub min_splitting_hz: f64,
}

impl BiasSummary {
    pub fn plateau_mismatch(&self) -> f64 {
        (self.plateau.eta / self.plateau_dr_only - 1.0).abs()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, m) in self.maxima.iter().enumerate() {
            out.push(format!("maximum[{i}]: bias_v={} eta={:e}", m.bias, m.eta));
        }
        for (i, m) in self.minima.iter().enumerate() {
            out.push(format!("minimum[{i}]: bias_v={} eta={:e}", m.bias, m.eta));
        }
        match &self.interference_minimum {
            Some(m) => out.push(format!("interference_minimum: bias_v={} eta={:e}", m.bias, m.eta)),
            None => out.push("interference_minimum: none".into()),
        }
        out.push(format!(
            "plateau: bias_v={} eta={:e} dr_only={:e} mismatch={:e}",
            self.plateau.bias,
            self.plateau.eta,
            self.plateau_dr_only,
            self.plateau_mismatch()
        ));
        let tr: Vec<String> = self.triple_resonance_biases.iter().map(|v| v.to_string()).collect();
        out.push(format!("triple_resonance_bias_v: [{}]", tr.join(", ")));
        if let Some(v) = self.anticrossing_bias {
            out.push(format!("anticrossing_bias_v: {v}"));
        }
        out.push(format!("min_splitting_hz: {}", self.min_splitting_hz));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasSweep {
    pub records: Vec<SweepRecord>,
    pub summary: BiasSummary,
}

impl BiasSweep {
    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        let rows: Vec<Vec<f64>> = self.records.iter().map(SweepRecord::row).collect();
        write_table(out, comments, &header(Knob::BiasV, &[]), &rows)
    }
}

pub fn run_bias_sweep(preset: &TransducerPreset, spec: &SweepSpec) -> Result<BiasSweep> {
    spec.expect_knob(Knob::BiasV)?;
    preset.validate()?;
    let power = held_power(preset, spec);
    let probe = held_probe(spec);
    let values = spec.values();
    let points = eval_all(&values, |v| evaluate(preset, v, power, probe))?;
    let records: Vec<SweepRecord> = points.iter().map(|p| SweepRecord::new(p.bias, p)).collect();

    let eta_at = |v: f64| {
        evaluate(preset, v, power, probe)
            .map(|p| p.eta_apparent)
            .unwrap_or(f64::NAN)
    };
    let eta: Vec<f64> = points.iter().map(|p| p.eta_apparent).collect();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..eta.len() - 1 {
        let (a, b) = (values[i - 1], values[i + 1]);
        if eta[i] > eta[i - 1] && eta[i] >= eta[i + 1] {
            let (x, y) = golden_max(eta_at, a, b, BIAS_TOL);
            maxima.push(Extremum { bias: x, eta: y });
        } else if eta[i] < eta[i - 1] && eta[i] <= eta[i + 1] {
            let (x, y) = golden_max(|v| -eta_at(v), a, b, BIAS_TOL);
            minima.push(Extremum { bias: x, eta: -y });
        }
    }

    let anticrossing_bias = preset.bias_map.zero_crossing();
    let centre = anticrossing_bias.unwrap_or(0.5 * (values[0] + values[values.len() - 1]));
    let first = &points[0];
    let last = &points[points.len() - 1];
    let far = if (first.bias - centre).abs() >= (last.bias - centre).abs() {
        first
    } else {
        last
    };
    let mut isolated = far.resolved.scatter;
    isolated.g = 0.0;
    let plateau_dr_only = apparent_efficiency(&isolated, &far.resolved.dr)?;

    let interference_minimum = {
        let toward = |m: &Extremum| (m.bias - far.bias).abs();
        let nearest_peak = maxima
            .iter()
            .map(toward)
            .fold(f64::INFINITY, f64::min);
        minima
            .iter()
            .filter(|m| toward(m) < nearest_peak)
            .min_by(|x, y| x.eta.total_cmp(&y.eta))
            .copied()
    };

    // The grid need not land on the anticrossing itself.
    let mut min_splitting = points
        .iter()
        .map(|p| p.resolved.modes.splitting())
        .fold(f64::INFINITY, f64::min);
    if let Some(v) = anticrossing_bias.filter(|v| (values[0]..=values[values.len() - 1]).contains(v)) {
        min_splitting = min_splitting.min(resolve(preset, v, power, probe)?.modes.splitting());
    }
    let min_splitting_hz = to_hz(min_splitting);

    Ok(BiasSweep {
        records,
        summary: BiasSummary {
            maxima,
            minima,
            interference_minimum,
            plateau: Extremum {
                bias: far.bias,
                eta: far.eta_apparent,
            },
            plateau_dr_only,
            triple_resonance_biases: triple_resonance_biases(preset, power)?,
            anticrossing_bias,
            min_splitting_hz,
        },
    })
}

/// Biases where the supermode splitting equals the (shifted) microwave
/// frequency. Empty when the anticrossing gap already exceeds it.
pub fn triple_resonance_biases(preset: &TransducerPreset, pump_power: f64) -> Result<Vec<f64>> {
    let (mw, _) = preset.microwave_at(pump_power)?;
    let half = 0.5 * mw.omega_m;
    let mu = preset.molecule.mu;
    let map = &preset.bias_map;
    if half < mu || map.slope == 0.0 {
        return Ok(Vec::new());
    }
    let d = (half * half - mu * mu).sqrt();
    let mut v: Vec<f64> = [-d, d]
        .iter()
        .map(|delta| map.v_offset + (delta - map.delta_at_zero) / map.slope)
        .collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRecord {
    pub record: SweepRecord,
    pub pump_w: f64,
    pub best_bias_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// Efficiency per µW of on-chip pump power.
    pub per_microwatt: f64,
    pub fit: LinearFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSweep {
    pub records: Vec<PowerRecord>,
    /// Fit of η against P over points with `P ≤ fit_max` and `C < 10⁻³`.
    pub slope: Option<SlopeFit>,
    pub max_eta: f64,
}

impl PowerSweep {
    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        let rows: Vec<Vec<f64>> = self
            .records
            .iter()
            .map(|r| {
                let mut row = r.record.row();
                row.extend([r.pump_w, r.best_bias_v]);
                row
            })
            .collect();
        write_table(out, comments, &header(Knob::PumpDbm, &["pump_w", "best_bias_v"]), &rows)
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("max_eta: {:e}", self.max_eta)];
        match &self.slope {
            Some(s) => out.push(format!(
                "low_power_slope_per_uw: {:e} r_squared={} points={}",
                s.per_microwatt, s.fit.r_squared, s.fit.n
            )),
            None => out.push("low_power_slope_per_uw: insufficient points".into()),
        }
        out
    }
}

/// Cooperativity below which a point counts as low-power for the fit.
pub const LINEAR_REGIME_C: f64 = 1e-3;

pub fn run_power_sweep(
    preset: &TransducerPreset,
    spec: &SweepSpec,
    search: &BiasSearch,
    fit_max_w: f64,
) -> Result<PowerSweep> {
    spec.expect_knob(Knob::PumpDbm)?;
    preset.validate()?;
    search.validate()?;
    let probe = held_probe(spec);
    let values = spec.values();
    // Refuse out-of-table powers before doing any work.
    for &dbm in &values {
        preset.microwave_at(dbm_to_watts(dbm))?;
    }
    let records = eval_all(&values, |dbm| {
        let power = dbm_to_watts(dbm);
        let p = match spec.fixed.get(&Knob::BiasV) {
            Some(&v) => evaluate(preset, v, power, probe)?,
            None => best_bias(preset, power, probe, search)?,
        };
        Ok(PowerRecord {
            record: SweepRecord::new(dbm, &p),
            pump_w: power,
            best_bias_v: p.bias,
        })
    })?;

    let (x, y): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.pump_w <= fit_max_w && r.record.cooperativity < LINEAR_REGIME_C)
        .map(|r| (r.pump_w * 1e6, r.record.eta_apparent))
        .unzip();
    let slope = linear_fit(&x, &y).map(|fit| SlopeFit {
        per_microwatt: fit.slope,
        fit,
    });
    let max_eta = records
        .iter()
        .map(|r| r.record.eta_apparent)
        .fold(0.0, f64::max);
    Ok(PowerSweep {
        records,
        slope,
        max_eta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreqResponse {
    pub bias: f64,
    pub pump_w: f64,
    pub records: Vec<(SweepRecord, ScatterMatrix)>,
    pub bandwidth: Bandwidth,
}

impl FreqResponse {
    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        let rows: Vec<Vec<f64>> = self
            .records
            .iter()
            .map(|(r, s)| {
                let mut row = r.row();
                for c in [s.s_oo, s.s_oe, s.s_eo, s.s_ee] {
                    row.extend([c.re, c.im]);
                }
                row
            })
            .collect();
        write_table(out, comments, &header(Knob::ProbeHz, &SCATTER_COLUMNS), &rows)
    }

    pub fn lines(&self) -> Vec<String> {
        let b = &self.bandwidth;
        vec![
            format!("bias_v: {}", self.bias),
            format!("pump_w: {:e}", self.pump_w),
            format!("bandwidth_3db_hz: {}", b.fwhm_hz()),
            format!("peak_probe_hz: {}", to_hz(b.peak_probe)),
            format!("peak_eta: {:e}", b.peak_efficiency),
        ]
    }
}

/// Default probe span in Hz, `f_m ± k·κ_m/2π`, at the held pump power.
pub fn probe_span_hz(preset: &TransducerPreset, pump_power: f64, kappas: f64) -> Result<(f64, f64)> {
    ensure(kappas.is_finite() && kappas > 0.0, "probe_span_kappas", "must be > 0")?;
    let (mw, _) = preset.microwave_at(pump_power)?;
    let half = kappas * to_hz(mw.kappa_m());
    let f = to_hz(mw.omega_m);
    Ok((f - half, f + half))
}

pub fn run_freq_response(
    preset: &TransducerPreset,
    spec: &SweepSpec,
    search: &BiasSearch,
) -> Result<FreqResponse> {
    spec.expect_knob(Knob::ProbeHz)?;
    preset.validate()?;
    let power = held_power(preset, spec);
    let bias = match spec.fixed.get(&Knob::BiasV) {
        Some(&v) => v,
        None => best_bias(preset, power, None, search)?.bias,
    };
    let values = spec.values();
    let records = eval_all(&values, |f| {
        let p = evaluate(preset, bias, power, Some(hz(f)))?;
        Ok((SweepRecord::new(f, &p), p.s))
    })?;
    let base = resolve(preset, bias, power, None)?;
    let bandwidth = bandwidth_3db(&base.scatter, &base.dr, (hz(spec.start), hz(spec.stop)))?;
    Ok(FreqResponse {
        bias,
        pump_w: power,
        records,
        bandwidth,
    })
}

/// Coupling summary: the sinθ maximum, the efficiency-optimal θ and the
/// stack constants used.
#[derive(Debug, Clone, PartialEq)]
pub struct G0Report {
    /// `g₀` at sin θ = 1 (Hz).
    pub g0_max_hz: f64,
    pub from_override: bool,
    pub theta_opt: f64,
    pub g0_at_opt_hz: f64,
    pub eta_at_opt: f64,
    pub pump_w: f64,
    pub entries: Vec<(&'static str, f64)>,
}

impl G0Report {
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        let mut rows = vec![
            ("g0_max_hz", self.g0_max_hz),
            ("g0_from_override", if self.from_override { 1.0 } else { 0.0 }),
            ("theta_opt_rad", self.theta_opt),
            ("theta_opt_over_pi", self.theta_opt / std::f64::consts::PI),
            ("g0_at_opt_hz", self.g0_at_opt_hz),
            ("eta_at_opt", self.eta_at_opt),
            ("pump_w", self.pump_w),
        ];
        rows.extend(self.entries.iter().copied());
        rows
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        writeln!(out, "quantity,value")?;
        for (k, v) in self.rows() {
            writeln!(out, "{k},{}", crate::output::format_float(v))?;
        }
        Ok(())
    }
}

/// Apparent efficiency at `θ`, with the ring detuning set to `μ/tan θ` and
/// the probe on the microwave resonance.
pub fn eta_of_theta(preset: &TransducerPreset, theta: f64, pump_power: f64) -> Result<f64> {
    ensure(
        theta > 0.0 && theta < std::f64::consts::PI,
        "theta",
        "must lie in (0, π)",
    )?;
    let delta = preset.molecule.mu / theta.tan();
    let r = resolve_at_delta(preset, delta, pump_power, None)?;
    apparent_efficiency(&r.scatter, &r.dr)
}

/// θ maximizing the apparent efficiency: grid scan, then golden section.
pub fn optimal_theta(preset: &TransducerPreset, pump_power: f64) -> Result<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let (lo, hi) = (THETA_RANGE.0 * pi, THETA_RANGE.1 * pi);
    eta_of_theta(preset, 0.5 * pi, pump_power)?;
    let f = |t: f64| eta_of_theta(preset, t, pump_power).unwrap_or(f64::NEG_INFINITY);
    Ok(grid_golden_max(f, lo, hi, THETA_GRID, THETA_TOL))
}

pub fn report_g0(preset: &TransducerPreset) -> Result<G0Report> {
    preset.validate()?;
    let g0_max = preset.g0_max()?;
    let (theta_opt, eta_at_opt) = optimal_theta(preset, preset.pump_power)?;
    let s = &preset.stack;
    Ok(G0Report {
        g0_max_hz: to_hz(g0_max),
        from_override: preset.g0_override.is_some(),
        theta_opt,
        g0_at_opt_hz: to_hz(g0_max * theta_opt.sin()),
        eta_at_opt,
        pump_w: preset.pump_power,
        entries: vec![
            ("r33_m_per_v", s.r33),
            ("n_e", s.n_e),
            ("gamma", s.gamma),
            ("alpha", s.alpha),
            ("d_eff_m", s.d_eff),
            ("c_total_f", s.c_total),
            ("optical_freq_hz", to_hz(preset.omega_o())),
            ("microwave_freq_hz", to_hz(preset.mw.omega_m)),
            ("g0_dr_ratio", preset.g0_dr_ratio),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::{PresetFile, MEASURED_PRESET, PAPER_PRESET};
    use std::f64::consts::PI;

    fn load(text: &str, overrides: &[&str]) -> TransducerPreset {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        PresetFile::load(text, &o).unwrap().transducer().unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(Knob::BiasV, 0.0, 1.0, 1).is_err());
        assert!(SweepSpec::new(Knob::BiasV, 1.0, 1.0, 5).is_err());
        assert!(SweepSpec::new(Knob::BiasV, f64::NAN, 1.0, 5).is_err());
        let s = SweepSpec::new(Knob::BiasV, 0.0, 1.0, 5).unwrap().hold(Knob::BiasV, 1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn values_are_ascending_and_hit_ends() {
        let s = SweepSpec::new(Knob::BiasV, 4.0, -4.0, 9).unwrap();
        let v = s.values();
        assert_eq!(v[0], -4.0);
        assert_eq!(v[8], 4.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn wrong_knob_rejected() {
        let p = load(PAPER_PRESET, &[]);
        let s = SweepSpec::new(Knob::ProbeHz, 0.0, 1.0, 3).unwrap();
        assert!(run_bias_sweep(&p, &s).is_err());
    }

    #[test]
    fn zero_coupling_gives_zero_efficiency() {
        let p = load(PAPER_PRESET, &["eo_stack.g0_override_hz=0.0"]);
        let s = SweepSpec::new(Knob::BiasV, -40.0, 40.0, 81).unwrap();
        let sweep = run_bias_sweep(&p, &s).unwrap();
        assert!(sweep.records.iter().all(|r| r.eta_apparent == 0.0 && r.eta_triple == 0.0));
        assert!(sweep.summary.maxima.is_empty());
    }

    #[test]
    fn triple_resonance_biases_match_splitting() {
        let p = load(PAPER_PRESET, &[]);
        for v in triple_resonance_biases(&p, p.pump_power).unwrap() {
            let r = resolve(&p, v, p.pump_power, None).unwrap();
            assert!((r.modes.splitting() / r.mw.omega_m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn low_power_linearity_without_degradation() {
        let p = load(MEASURED_PRESET, &["degradation.enabled=false"]);
        let a = evaluate(&p, -11.0, 1e-7, None).unwrap();
        let b = evaluate(&p, -11.0, 2e-7, None).unwrap();
        assert!(a.resolved.op.cooperativity < 1e-3);
        assert!((b.eta_apparent / a.eta_apparent / 2.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn theta_optimum_agrees_with_dense_scan() {
        let p = load(PAPER_PRESET, &[]);
        let (t, _) = optimal_theta(&p, p.pump_power).unwrap();
        let n = 10_000;
        let (lo, hi) = (0.02 * PI, 0.98 * PI);
        let (mut best_t, mut best) = (lo, f64::NEG_INFINITY);
        for i in 0..n {
            let th = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let e = eta_of_theta(&p, th, p.pump_power).unwrap();
            if e > best {
                best = e;
                best_t = th;
            }
        }
        assert!((t - best_t).abs() < 1e-3, "{t} vs {best_t}");
    }

    #[test]
    fn records_sorted_and_finite() {
        let p = load(PAPER_PRESET, &[]);
        let s = SweepSpec::new(Knob::BiasV, 30.0, -30.0, 61).unwrap();
        let sweep = run_bias_sweep(&p, &s).unwrap();
        assert!(sweep.records.windows(2).all(|w| w[1].knob > w[0].knob));
        assert!(sweep.records.iter().all(SweepRecord::is_finite));
    }
}
