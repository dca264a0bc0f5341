//! Measurement-chain calibration: beat-note power to sideband power to
//! on-chip transduction efficiency, and the piezoelectric-loss Q.
//!
//! Powers are linear watts. The measurement CSV is the only place dBm is
//! accepted (`p_in_dbm`).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_nonneg, ensure_positive, ModelError, Result};
use crate::units::{db_to_ratio, dbm_to_watts, hz, omega_from_wavelength};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCalibration {
    /// Transmission of one grating coupler (input and output assumed equal).
    pub eta_coupler: f64,
    /// Fibre/analysis-arm transmission from the chip to the detector.
    pub eta_fiber: f64,
    /// Microwave transmission from the input port to the device.
    pub eta_cable: f64,
    /// Detector response (1/W): `P_det = A_det · P_sideband · P_pump`.
    pub a_det: f64,
    pub omega_o: f64,
    pub omega_m: f64,
    /// Optional amplifier gain in the analysis arm (1 when absent).
    pub edfa_gain: f64,
    /// Coupler-to-coupler insertion-loss spread (dB), propagated to an
    /// efficiency error bar.
    pub coupler_uncertainty_db: f64,
}

impl ChainCalibration {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.eta_coupler, "eta_coupler"),
            (self.eta_fiber, "eta_fiber"),
            (self.eta_cable, "eta_cable"),
        ] {
            ensure(v > 0.0 && v <= 1.0, name, "efficiency must lie in (0, 1]")?;
        }
        ensure_positive(self.a_det, "a_det")?;
        ensure_positive(self.omega_o, "omega_o")?;
        ensure_positive(self.omega_m, "omega_m")?;
        ensure_positive(self.edfa_gain, "edfa_gain")?;
        ensure_nonneg(self.coupler_uncertainty_db, "coupler_uncertainty_db")
    }

    /// `η_optical = η_coupler · η_fiber`.
    pub fn eta_optical(&self) -> f64 {
        self.eta_coupler * self.eta_fiber
    }

    fn denominator(&self) -> f64 {
        self.omega_o * self.eta_optical() * self.eta_cable * self.edfa_gain
    }
}

/// `η = ω_m P_sideband / (ω_o P_in η_optical η_cable)`, with the amplifier
/// gain (if any) divided out as well.
pub fn efficiency_from_measurement(cal: &ChainCalibration, p_sideband: f64, p_in: f64) -> Result<f64> {
    cal.validate()?;
    ensure_nonneg(p_sideband, "p_sideband")?;
    ensure_positive(p_in, "p_in")?;
    Ok(cal.omega_m * p_sideband / (p_in * cal.denominator()))
}

/// Sideband power at the detector that a device of efficiency `eta` would
/// produce for microwave input `p_in`.
pub fn sideband_power_for_efficiency(cal: &ChainCalibration, eta: f64, p_in: f64) -> Result<f64> {
    cal.validate()?;
    ensure_nonneg(eta, "eta")?;
    ensure_nonneg(p_in, "p_in")?;
    Ok(eta * p_in * cal.denominator() / cal.omega_m)
}

/// `(low, high)` efficiency for a coupler loss of `±coupler_uncertainty_db`.
pub fn efficiency_bounds(cal: &ChainCalibration, p_sideband: f64, p_in: f64) -> Result<(f64, f64)> {
    let eta = efficiency_from_measurement(cal, p_sideband, p_in)?;
    let r = db_to_ratio(cal.coupler_uncertainty_db);
    Ok((eta / r, eta * r))
}

/// `P_sideband = P_det / (A_det · P_pump)`.
pub fn sideband_power_from_beat(cal: &ChainCalibration, p_det: f64, p_pump_at_detector: f64) -> Result<f64> {
    cal.validate()?;
    ensure_nonneg(p_det, "p_det")?;
    ensure_positive(p_pump_at_detector, "p_pump_at_detector")?;
    Ok(p_det / (cal.a_det * p_pump_at_detector))
}

/// Forward detector model, `P_det = A_det · P_sideband · P_pump`.
pub fn beat_power(cal: &ChainCalibration, p_sideband: f64, p_pump_at_detector: f64) -> f64 {
    cal.a_det * p_sideband * p_pump_at_detector
}

/// Piezoelectric-loss quality factor `Q = ω E_electrostatic / P_acoustic`.
pub fn piezo_quality_factor(omega: f64, e_electrostatic: f64, p_acoustic: f64) -> Result<f64> {
    ensure_positive(omega, "omega")?;
    ensure_nonneg(e_electrostatic, "e_electrostatic")?;
    ensure_positive(p_acoustic, "p_acoustic")?;
    Ok(omega * e_electrostatic / p_acoustic)
}

/// Calibration document: a `[chain]` table with Hz/nm-valued frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub chain: ChainSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub eta_coupler: f64,
    pub eta_fiber: f64,
    pub eta_cable: f64,
    pub a_det_per_w: f64,
    pub optical_wavelength_nm: f64,
    pub microwave_freq_hz: f64,
    #[serde(default = "one")]
    pub edfa_gain: f64,
    #[serde(default = "default_uncertainty")]
    pub coupler_uncertainty_db: f64,
    /// Free-form note, e.g. marking placeholder values.
    #[serde(default)]
    pub provenance: String,
}

fn one() -> f64 {
    1.0
}

fn default_uncertainty() -> f64 {
    0.4
}

impl ChainFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ModelError::config("", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("chain file serializes")
    }

    pub fn calibration(&self) -> Result<ChainCalibration> {
        let c = &self.chain;
        ensure_positive(c.optical_wavelength_nm, "chain.optical_wavelength_nm")?;
        let cal = ChainCalibration {
            eta_coupler: c.eta_coupler,
            eta_fiber: c.eta_fiber,
            eta_cable: c.eta_cable,
            a_det: c.a_det_per_w,
            omega_o: omega_from_wavelength(c.optical_wavelength_nm * 1e-9),
            omega_m: hz(c.microwave_freq_hz),
            edfa_gain: c.edfa_gain,
            coupler_uncertainty_db: c.coupler_uncertainty_db,
        };
        cal.validate().map_err(|e| e.within("chain"))?;
        Ok(cal)
    }
}

/// One measurement: microwave drive at the input port, beat-note power,
/// pump power at the detector.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementRow {
    pub p_in_dbm: f64,
    pub p_det_w: f64,
    pub p_pump_det_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedRow {
    pub input: MeasurementRow,
    pub p_sideband_w: f64,
    pub eta: f64,
}

pub const MEASUREMENT_COLUMNS: [&str; 3] = ["p_in_dbm", "p_det_w", "p_pump_det_w"];

/// Reads measurement rows. A header row with exactly
/// [`MEASUREMENT_COLUMNS`] is mandatory; `#` lines are comments.
pub fn read_measurements<R: Read>(reader: R) -> Result<Vec<MeasurementRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != MEASUREMENT_COLUMNS {
        return Err(ModelError::config(
            "header",
            format!("expected columns {MEASUREMENT_COLUMNS:?}, found {names:?}"),
        ));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<MeasurementRow>().enumerate() {
        let row = rec?;
        let at = |e: ModelError| e.within(&format!("row[{}]", i + 1));
        ensure(row.p_in_dbm.is_finite(), "p_in_dbm", "must be finite").map_err(at)?;
        ensure_nonneg(row.p_det_w, "p_det_w").map_err(at)?;
        ensure_positive(row.p_pump_det_w, "p_pump_det_w").map_err(at)?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn calibrate_rows(cal: &ChainCalibration, rows: &[MeasurementRow]) -> Result<Vec<CalibratedRow>> {
    rows.iter()
        .map(|&input| {
            let p_sideband_w = sideband_power_from_beat(cal, input.p_det_w, input.p_pump_det_w)?;
            let eta = efficiency_from_measurement(cal, p_sideband_w, dbm_to_watts(input.p_in_dbm))?;
            Ok(CalibratedRow {
                input,
                p_sideband_w,
                eta,
            })
        })
        .collect()
}

/// Writes the input columns followed by `p_sideband_w, eta`.
pub fn write_calibrated<W: Write>(out: W, comments: &[String], rows: &[CalibratedRow]) -> Result<()> {
    let header: Vec<&str> = MEASUREMENT_COLUMNS
        .iter()
        .copied()
        .chain(["p_sideband_w", "eta"])
        .collect();
    let data: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.input.p_in_dbm,
                r.input.p_det_w,
                r.input.p_pump_det_w,
                r.p_sideband_w,
                r.eta,
            ]
        })
        .collect();
    crate::output::write_table(out, comments, &header, &data)
}
