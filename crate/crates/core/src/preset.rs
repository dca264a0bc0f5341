//! Preset files.
//!
//! A preset is a TOML document with sections `[molecule]`, `[microwave]`,
//! `[eo_stack]`, `[bias_map]`, `[degradation]`, `[pump]` and the optional
//! `[sweep]` and `[projection]`. Frequencies and rates are written in Hz
//! (`*_hz`) and converted to rad/s on load. Unknown keys are rejected.
//!
//! `--override key.path=value` edits are applied to the parsed document
//! before it is typed, so they go through the same validation.

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::device::{BiasMap, DegradationRow, DegradationTable, PumpLock, TransducerPreset};
use crate::error::{ModelError, Result};
use crate::interaction::{default_improvements, EoStack, ImprovementFactor, MicrowaveMode};
use crate::molecule::{PhotonicMolecule, RingMode};
use crate::units::{hz, omega_from_wavelength};

/// Design-value preset: coupling computed from the electro-optic stack.
pub const PAPER_PRESET: &str = include_str!("../presets/paper.toml");
/// Same device with the coupling pinned to the value inferred from the
/// measured low-power slope.
pub const MEASURED_PRESET: &str = include_str!("../presets/measured.toml");

pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "paper" => Some(PAPER_PRESET),
        "measured" => Some(MEASURED_PRESET),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetFile {
    pub molecule: MoleculeSection,
    pub microwave: MicrowaveSection,
    pub eo_stack: EoStackSection,
    pub bias_map: BiasMapSection,
    pub degradation: DegradationSection,
    pub pump: PumpSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub projection: ProjectionSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeSection {
    /// Bare ring resonance wavelength; also the carrier used in g₀.
    pub center_wavelength_nm: f64,
    pub mu_hz: f64,
    pub bright_kappa_i_hz: f64,
    pub bright_kappa_e_hz: f64,
    pub dark_kappa_i_hz: f64,
    pub dark_kappa_e_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrowaveSection {
    pub freq_hz: f64,
    pub kappa_i_hz: f64,
    /// Total coupling to the feedline.
    pub kappa_e_hz: f64,
    #[serde(default = "one_port")]
    pub feed_ports: u32,
}

fn one_port() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EoStackSection {
    pub r33_m_per_v: f64,
    pub n_e: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub d_eff_m: f64,
    pub c_total_f: f64,
    /// θ-independent coupling g₀,max in Hz; replaces the stack estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0_override_hz: Option<f64>,
    #[serde(default = "unit_ratio")]
    pub g0_dr_ratio: f64,
}

fn unit_ratio() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasMapSection {
    pub delta_at_zero_hz: f64,
    pub slope_hz_per_v: f64,
    #[serde(default)]
    pub v_offset_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradationSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub provenance: String,
    #[serde(default)]
    pub rows: Vec<DegradationRowEntry>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradationRowEntry {
    pub power_w: f64,
    pub kappa_i_hz: f64,
    #[serde(default)]
    pub freq_shift_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LockKind {
    Fixed,
    SideOfFringe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub power_w: f64,
    pub lock: LockKind,
    /// Used with `lock = "fixed"`.
    #[serde(default)]
    pub detuning_minus_hz: f64,
    /// Used with `lock = "side_of_fringe"`: `Δ₋ = f·κ₋/2`.
    #[serde(default)]
    pub side_of_fringe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub bias_start_v: f64,
    pub bias_stop_v: f64,
    pub bias_points: usize,
    pub pump_start_dbm: f64,
    pub pump_stop_dbm: f64,
    pub pump_points: usize,
    pub probe_span_kappas: f64,
    pub probe_points: usize,
    /// Grid used when maximizing over bias before golden-section refinement.
    pub bias_search_points: usize,
    /// Upper edge of the power range used for the low-power slope fit.
    pub slope_fit_max_dbm: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            bias_start_v: -60.0,
            bias_stop_v: 40.0,
            bias_points: 2001,
            pump_start_dbm: -50.0,
            pump_stop_dbm: -10.0,
            pump_points: 41,
            probe_span_kappas: 10.0,
            probe_points: 401,
            bias_search_points: 1001,
            slope_fit_max_dbm: -30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectionSection {
    pub base_efficiency: f64,
    pub factors: Vec<ImprovementFactor>,
}

impl Default for ProjectionSection {
    fn default() -> Self {
        ProjectionSection {
            base_efficiency: 2.7e-5,
            factors: default_improvements(),
        }
    }
}

fn check(ok: bool, path: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::config(path, reason))
    }
}

fn positive(v: f64, path: &str) -> Result<()> {
    check(v.is_finite() && v > 0.0, path, "must be finite and > 0")
}

fn nonneg(v: f64, path: &str) -> Result<()> {
    check(v.is_finite() && v >= 0.0, path, "must be finite and >= 0")
}

fn finite(v: f64, path: &str) -> Result<()> {
    check(v.is_finite(), path, "must be finite")
}

impl PresetFile {
    /// Parse a preset and apply `key.path=value` overrides.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ModelError::config("", e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Value::Table(table)
            .try_into::<PresetFile>()
            .map_err(|e| ModelError::config("", e.to_string().trim().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("preset serializes")
    }

    /// Validated device model in SI units.
    pub fn transducer(&self) -> Result<TransducerPreset> {
        let m = &self.molecule;
        positive(m.center_wavelength_nm, "molecule.center_wavelength_nm")?;
        positive(m.mu_hz, "molecule.mu_hz")?;
        nonneg(m.bright_kappa_i_hz, "molecule.bright_kappa_i_hz")?;
        nonneg(m.bright_kappa_e_hz, "molecule.bright_kappa_e_hz")?;
        nonneg(m.dark_kappa_i_hz, "molecule.dark_kappa_i_hz")?;
        nonneg(m.dark_kappa_e_hz, "molecule.dark_kappa_e_hz")?;
        let w0 = omega_from_wavelength(m.center_wavelength_nm * 1e-9);
        let molecule = PhotonicMolecule {
            bright: RingMode::new(w0, hz(m.bright_kappa_i_hz), hz(m.bright_kappa_e_hz))?,
            dark: RingMode::new(w0, hz(m.dark_kappa_i_hz), hz(m.dark_kappa_e_hz))?,
            mu: hz(m.mu_hz),
            delta: 0.0,
        };

        let mw = &self.microwave;
        positive(mw.freq_hz, "microwave.freq_hz")?;
        nonneg(mw.kappa_i_hz, "microwave.kappa_i_hz")?;
        nonneg(mw.kappa_e_hz, "microwave.kappa_e_hz")?;
        check(mw.kappa_i_hz + mw.kappa_e_hz > 0.0, "microwave", "total loss must be > 0")?;
        check(mw.feed_ports >= 1, "microwave.feed_ports", "must be >= 1")?;

        let s = &self.eo_stack;
        positive(s.r33_m_per_v, "eo_stack.r33_m_per_v")?;
        positive(s.n_e, "eo_stack.n_e")?;
        positive(s.gamma, "eo_stack.gamma")?;
        check(s.gamma <= 1.0, "eo_stack.gamma", "must be <= 1")?;
        positive(s.alpha, "eo_stack.alpha")?;
        check(s.alpha <= 2.0, "eo_stack.alpha", "must be <= 2")?;
        positive(s.d_eff_m, "eo_stack.d_eff_m")?;
        positive(s.c_total_f, "eo_stack.c_total_f")?;
        if let Some(g) = s.g0_override_hz {
            nonneg(g, "eo_stack.g0_override_hz")?;
        }
        finite(s.g0_dr_ratio, "eo_stack.g0_dr_ratio")?;

        let b = &self.bias_map;
        finite(b.delta_at_zero_hz, "bias_map.delta_at_zero_hz")?;
        finite(b.slope_hz_per_v, "bias_map.slope_hz_per_v")?;
        finite(b.v_offset_v, "bias_map.v_offset_v")?;

        let degradation = if self.degradation.enabled {
            check(!self.degradation.rows.is_empty(), "degradation.rows", "enabled table needs rows")?;
            for (i, r) in self.degradation.rows.iter().enumerate() {
                nonneg(r.power_w, &format!("degradation.rows[{i}].power_w"))?;
                nonneg(r.kappa_i_hz, &format!("degradation.rows[{i}].kappa_i_hz"))?;
                finite(r.freq_shift_hz, &format!("degradation.rows[{i}].freq_shift_hz"))?;
            }
            let rows = self
                .degradation
                .rows
                .iter()
                .map(|r| DegradationRow {
                    power: r.power_w,
                    kappa_m_i: hz(r.kappa_i_hz),
                    omega_m_shift: hz(r.freq_shift_hz),
                })
                .collect();
            Some(DegradationTable::new(rows).map_err(|e| match e {
                ModelError::InvalidParameter { field, reason } => {
                    ModelError::config(format!("degradation.{field}"), reason)
                }
                other => other,
            })?)
        } else {
            None
        };

        let p = &self.pump;
        nonneg(p.power_w, "pump.power_w")?;
        let pump_lock = match p.lock {
            LockKind::Fixed => {
                finite(p.detuning_minus_hz, "pump.detuning_minus_hz")?;
                PumpLock::Fixed {
                    detuning_minus: hz(p.detuning_minus_hz),
                }
            }
            LockKind::SideOfFringe => {
                finite(p.side_of_fringe, "pump.side_of_fringe")?;
                PumpLock::SideOfFringe {
                    fraction: p.side_of_fringe,
                }
            }
        };

        let sw = &self.sweep;
        finite(sw.bias_start_v, "sweep.bias_start_v")?;
        finite(sw.bias_stop_v, "sweep.bias_stop_v")?;
        finite(sw.pump_start_dbm, "sweep.pump_start_dbm")?;
        finite(sw.pump_stop_dbm, "sweep.pump_stop_dbm")?;
        positive(sw.probe_span_kappas, "sweep.probe_span_kappas")?;
        check(sw.bias_search_points >= 3, "sweep.bias_search_points", "must be >= 3")?;
        finite(sw.slope_fit_max_dbm, "sweep.slope_fit_max_dbm")?;

        let preset = TransducerPreset {
            molecule,
            mw: MicrowaveMode {
                omega_m: hz(mw.freq_hz),
                kappa_m_i: hz(mw.kappa_i_hz),
                kappa_m_e: hz(mw.kappa_e_hz),
            },
            feed_ports: mw.feed_ports,
            stack: EoStack {
                r33: s.r33_m_per_v,
                n_e: s.n_e,
                gamma: s.gamma,
                alpha: s.alpha,
                d_eff: s.d_eff_m,
                c_total: s.c_total_f,
            },
            bias_map: BiasMap {
                delta_at_zero: hz(b.delta_at_zero_hz),
                slope: hz(b.slope_hz_per_v),
                v_offset: b.v_offset_v,
            },
            degradation,
            g0_override: s.g0_override_hz.map(hz),
            g0_dr_ratio: s.g0_dr_ratio,
            pump_lock,
            pump_power: p.power_w,
        };
        preset.validate()?;
        Ok(preset)
    }
}

/// Set `path=value` in a parsed TOML document. Path segments are table keys
/// or array indices; the value is read as a TOML literal and falls back to a
/// bare string.
pub fn apply_override(root: &mut Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| ModelError::config("", format!("override `{spec}` is not key=value")))?;
    let path = path.trim();
    let raw = raw.trim();
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ModelError::config(path, "empty segment in override path"));
    }
    let value = parse_literal(raw);

    let (last, parents) = segments.split_last().expect("split yields one segment");
    let mut cursor: &mut Value = {
        let first = parents.first().copied().unwrap_or(last);
        if parents.is_empty() {
            root.insert((*last).to_string(), value);
            return Ok(());
        }
        root.entry(first.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
    };
    for (depth, seg) in parents.iter().enumerate().skip(1) {
        let here = segments[..depth].join(".");
        cursor = step(cursor, seg, &here)?;
    }
    let here = parents.join(".");
    match cursor {
        Value::Table(t) => {
            t.insert((*last).to_string(), value);
            Ok(())
        }
        Value::Array(a) => {
            let idx = parse_index(last, a.len(), &here)?;
            a[idx] = value;
            Ok(())
        }
        _ => Err(ModelError::config(here, "cannot descend into a scalar")),
    }
}

fn step<'a>(cursor: &'a mut Value, seg: &str, here: &str) -> Result<&'a mut Value> {
    match cursor {
        Value::Table(t) => Ok(t
            .entry(seg.to_string())
            .or_insert_with(|| Value::Table(Table::new()))),
        Value::Array(a) => {
            let idx = parse_index(seg, a.len(), here)?;
            Ok(&mut a[idx])
        }
        _ => Err(ModelError::config(here, "cannot descend into a scalar")),
    }
}

fn parse_index(seg: &str, len: usize, here: &str) -> Result<usize> {
    let idx: usize = seg
        .parse()
        .map_err(|_| ModelError::config(here, format!("`{seg}` is not an array index")))?;
    if idx >= len {
        return Err(ModelError::config(here, format!("index {idx} out of range (len {len})")));
    }
    Ok(idx)
}

fn parse_literal(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
