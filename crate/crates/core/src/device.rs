//! Maps experimental knobs (bias voltage, pump power, microwave drive
//! frequency) onto the model parameters of one transducer.

use crate::error::{ensure, ensure_nonneg, ModelError, Result};
use crate::interaction::{self, EoStack, MicrowaveMode, OperatingPoint, PumpDrive};
use crate::molecule::{hybridize, HybridModes, PhotonicMolecule};
use crate::scattering::{DoubleResonanceInputs, ScatterInputs};

/// Pump power beyond `EXTRAPOLATION_LIMIT ×` the last table row is refused.
pub const EXTRAPOLATION_LIMIT: f64 = 2.0;

/// Affine bias-to-detuning map, `δ(V) = δ₀ + k·(V − V_off)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasMap {
    pub delta_at_zero: f64,
    /// rad/s per volt.
    pub slope: f64,
    pub v_offset: f64,
}

impl BiasMap {
    pub fn validate(&self) -> Result<()> {
        ensure(self.delta_at_zero.is_finite(), "delta_at_zero", "must be finite")?;
        ensure(self.slope.is_finite(), "slope", "must be finite")?;
        ensure(self.v_offset.is_finite(), "v_offset", "must be finite")
    }

    pub fn delta(&self, voltage: f64) -> f64 {
        self.delta_at_zero + self.slope * (voltage - self.v_offset)
    }

    /// Voltage where `δ(V) = 0`, if the map is not flat.
    pub fn zero_crossing(&self) -> Option<f64> {
        (self.slope != 0.0).then(|| self.v_offset - self.delta_at_zero / self.slope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationRow {
    /// On-chip optical power (W).
    pub power: f64,
    /// Intrinsic microwave loss at that power (rad/s).
    pub kappa_m_i: f64,
    /// Shift of the microwave resonance (rad/s, usually negative).
    pub omega_m_shift: f64,
}

/// Pump-power dependence of the microwave resonator, linearly interpolated
/// and clamped to the end rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradationTable {
    rows: Vec<DegradationRow>,
}

impl DegradationTable {
    pub fn new(rows: Vec<DegradationRow>) -> Result<Self> {
        ensure(!rows.is_empty(), "rows", "table needs at least one row")?;
        for (i, r) in rows.iter().enumerate() {
            let at = |e: ModelError| e.within(&format!("rows[{i}]"));
            ensure_nonneg(r.power, "power").map_err(at)?;
            ensure_nonneg(r.kappa_m_i, "kappa_m_i").map_err(at)?;
            ensure(r.omega_m_shift.is_finite(), "omega_m_shift", "must be finite").map_err(at)?;
        }
        for (i, w) in rows.windows(2).enumerate() {
            ensure(
                w[1].power > w[0].power,
                &format!("rows[{}].power", i + 1),
                "powers must be strictly increasing",
            )?;
            ensure(
                w[1].kappa_m_i >= w[0].kappa_m_i,
                &format!("rows[{}].kappa_m_i", i + 1),
                "loss must not decrease with power",
            )?;
        }
        Ok(DegradationTable { rows })
    }

    pub fn rows(&self) -> &[DegradationRow] {
        &self.rows
    }

    pub fn max_power(&self) -> f64 {
        self.rows[self.rows.len() - 1].power
    }

    /// `(κ_m_i, ω_m shift)` at the given pump power.
    pub fn at(&self, power: f64) -> Result<(f64, f64)> {
        ensure_nonneg(power, "pump_power")?;
        let limit = EXTRAPOLATION_LIMIT * self.max_power();
        if power > limit {
            return Err(ModelError::Extrapolation {
                power_w: power,
                limit_w: limit,
            });
        }
        let rows = &self.rows;
        let first = rows[0];
        let last = rows[rows.len() - 1];
        if power <= first.power {
            return Ok((first.kappa_m_i, first.omega_m_shift));
        }
        if power >= last.power {
            return Ok((last.kappa_m_i, last.omega_m_shift));
        }
        let j = rows.partition_point(|r| r.power <= power);
        let (a, b) = (rows[j - 1], rows[j]);
        let t = (power - a.power) / (b.power - a.power);
        Ok((
            a.kappa_m_i + t * (b.kappa_m_i - a.kappa_m_i),
            a.omega_m_shift + t * (b.omega_m_shift - a.omega_m_shift),
        ))
    }
}

/// How the pump frequency is held relative to the red supermode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpLock {
    /// `Δ₋` fixed (rad/s).
    Fixed { detuning_minus: f64 },
    /// `Δ₋ = f·κ₋/2`: a fixed fraction of the red half-linewidth.
    SideOfFringe { fraction: f64 },
}

impl PumpLock {
    pub fn detuning(&self, kappa_minus: f64) -> f64 {
        match *self {
            PumpLock::Fixed { detuning_minus } => detuning_minus,
            PumpLock::SideOfFringe { fraction } => 0.5 * fraction * kappa_minus,
        }
    }
}

/// Full device description. Rates are rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct TransducerPreset {
    /// Bare molecule; its `delta` is replaced by the bias map.
    pub molecule: PhotonicMolecule,
    /// Unloaded microwave resonance. `kappa_m_e` is the total coupling to
    /// the feedline.
    pub mw: MicrowaveMode,
    /// Number of feedline ports sharing `kappa_m_e` equally. Only one port
    /// carries the signal; the rest act as loss.
    pub feed_ports: u32,
    pub stack: EoStack,
    pub bias_map: BiasMap,
    pub degradation: Option<DegradationTable>,
    /// Replaces the θ-independent coupling `g₀,max` computed from `stack`.
    pub g0_override: Option<f64>,
    /// `g_{0,dr} = ratio · g₀,max · cos θ`.
    pub g0_dr_ratio: f64,
    pub pump_lock: PumpLock,
    /// Default on-chip pump power (W).
    pub pump_power: f64,
}

impl TransducerPreset {
    pub fn validate(&self) -> Result<()> {
        self.molecule.validate().map_err(|e| e.within("molecule"))?;
        self.mw.validate().map_err(|e| e.within("microwave"))?;
        ensure(self.feed_ports >= 1, "microwave.feed_ports", "must be >= 1")?;
        self.stack.validate().map_err(|e| e.within("eo_stack"))?;
        self.bias_map.validate().map_err(|e| e.within("bias_map"))?;
        if let Some(g) = self.g0_override {
            ensure_nonneg(g, "eo_stack.g0_override")?;
        }
        ensure(self.g0_dr_ratio.is_finite(), "eo_stack.g0_dr_ratio", "must be finite")?;
        match self.pump_lock {
            PumpLock::Fixed { detuning_minus } => {
                ensure(detuning_minus.is_finite(), "pump.detuning_minus", "must be finite")?
            }
            PumpLock::SideOfFringe { fraction } => {
                ensure(fraction.is_finite(), "pump.side_of_fringe", "must be finite")?
            }
        }
        ensure_nonneg(self.pump_power, "pump.power_w")
    }

    /// Optical carrier used inside `g₀`.
    pub fn omega_o(&self) -> f64 {
        self.molecule.omega_center()
    }

    /// θ-independent coupling: the override if set, else from the stack.
    pub fn g0_max(&self) -> Result<f64> {
        match self.g0_override {
            Some(g) => Ok(g),
            None => interaction::g0_max(&self.stack, self.omega_o(), self.mw.omega_m),
        }
    }

    /// Microwave mode as seen by the signal port at the given pump power.
    /// Returns the loaded mode and the intrinsic (degraded) loss.
    pub fn microwave_at(&self, power: f64) -> Result<(MicrowaveMode, f64)> {
        let (kappa_i, shift) = match &self.degradation {
            Some(table) => table.at(power)?,
            None => (self.mw.kappa_m_i, 0.0),
        };
        let ports = self.feed_ports.max(1) as f64;
        let signal = self.mw.kappa_m_e / ports;
        Ok((
            MicrowaveMode {
                omega_m: self.mw.omega_m + shift,
                kappa_m_i: kappa_i + (self.mw.kappa_m_e - signal),
                kappa_m_e: signal,
            },
            kappa_i,
        ))
    }
}

/// Everything the scattering solver needs at one knob setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub delta: f64,
    pub modes: HybridModes,
    /// Loaded microwave mode (signal-port coupling, other ports as loss).
    pub mw: MicrowaveMode,
    /// Intrinsic microwave loss after optical degradation.
    pub kappa_m_i_intrinsic: f64,
    pub pump: PumpDrive,
    pub op: OperatingPoint,
    pub g0_dr: f64,
    pub scatter: ScatterInputs,
    pub dr: DoubleResonanceInputs,
}

/// Resolve at a bias voltage. `probe = None` drives the microwave mode on
/// its (shifted) resonance.
pub fn resolve(
    preset: &TransducerPreset,
    bias: f64,
    pump_power: f64,
    probe: Option<f64>,
) -> Result<Resolved> {
    ensure(bias.is_finite(), "bias", "must be finite")?;
    resolve_at_delta(preset, preset.bias_map.delta(bias), pump_power, probe)
}

/// Resolve with the ring half-detuning given directly.
pub fn resolve_at_delta(
    preset: &TransducerPreset,
    delta: f64,
    pump_power: f64,
    probe: Option<f64>,
) -> Result<Resolved> {
    ensure_nonneg(pump_power, "pump_power")?;
    let modes = hybridize(&preset.molecule.with_delta(delta))?;
    let (mw, kappa_m_i_intrinsic) = preset.microwave_at(pump_power)?;
    let detuning_minus = preset.pump_lock.detuning(modes.kappa_minus());
    let omega_l = modes.omega_minus + detuning_minus;
    let pump = PumpDrive {
        power_on_chip: pump_power,
        omega_l,
        detuning_minus,
    };
    let g0_max = preset.g0_max()?;
    let op = interaction::operating_point_with_g0_max(g0_max, &modes, &mw, &pump)?;
    let g0_dr = preset.g0_dr_ratio * g0_max * modes.theta.cos();
    let scatter = ScatterInputs {
        delta_plus: detuning_minus - modes.splitting(),
        omega_m: mw.omega_m,
        kappa_m_i: mw.kappa_m_i,
        kappa_m_e: mw.kappa_m_e,
        kappa_plus_i: modes.kappa_plus_i,
        kappa_plus_e: modes.kappa_plus_e,
        g: op.g,
        probe: probe.unwrap_or(mw.omega_m),
    };
    let dr = DoubleResonanceInputs {
        g_dr: g0_dr * op.n_minus.sqrt(),
        delta_minus: detuning_minus,
        kappa_minus_i: modes.kappa_minus_i,
        kappa_minus_e: modes.kappa_minus_e,
    };
    Ok(Resolved {
        delta,
        modes,
        mw,
        kappa_m_i_intrinsic,
        pump,
        op,
        g0_dr,
        scatter,
        dr,
    })
}

/// Red-supermode frequency relative to the molecule centre versus bias,
/// `−√(δ² + μ²)`.
pub fn red_mode_trace(preset: &TransducerPreset, voltages: &[f64]) -> Result<Vec<(f64, f64)>> {
    voltages
        .iter()
        .map(|&v| {
            ensure(v.is_finite(), "voltage", "must be finite")?;
            let modes = hybridize(&preset.molecule.with_delta(preset.bias_map.delta(v)))?;
            Ok((v, -modes.half_split))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::RingMode;
    use crate::units::{hz, omega_from_wavelength};
    use std::f64::consts::PI;

    fn table() -> DegradationTable {
        DegradationTable::new(vec![
            DegradationRow { power: 0.0, kappa_m_i: hz(3e6), omega_m_shift: 0.0 },
            DegradationRow { power: 1e-5, kappa_m_i: hz(4e6), omega_m_shift: -hz(0.2e6) },
            DegradationRow { power: 1e-4, kappa_m_i: hz(30e6), omega_m_shift: -hz(5e6) },
        ])
        .unwrap()
    }

    fn preset() -> TransducerPreset {
        let w0 = omega_from_wavelength(1586e-9);
        TransducerPreset {
            molecule: PhotonicMolecule {
                bright: RingMode::new(w0, hz(130e6), hz(870e6)).unwrap(),
                dark: RingMode::new(w0, hz(130e6), 0.0).unwrap(),
                mu: hz(1.55e9),
                delta: 0.0,
            },
            mw: MicrowaveMode { omega_m: hz(3.7e9), kappa_m_i: hz(3e6), kappa_m_e: hz(7e6) },
            feed_ports: 2,
            stack: EoStack {
                r33: 32e-12,
                n_e: 2.13,
                gamma: 0.93,
                alpha: 0.72,
                d_eff: 15e-6,
                c_total: 120e-15,
            },
            bias_map: BiasMap { delta_at_zero: 0.0, slope: hz(0.1e9), v_offset: 1.5 },
            degradation: Some(table()),
            g0_override: None,
            g0_dr_ratio: 1.0,
            pump_lock: PumpLock::Fixed { detuning_minus: hz(150e6) },
            pump_power: 1e-6,
        }
    }

    #[test]
    fn anticrossing_centre() {
        let p = preset();
        let r = resolve(&p, p.bias_map.zero_crossing().unwrap(), 1e-6, None).unwrap();
        assert!((r.modes.theta - PI / 2.0).abs() < 1e-12);
        let trace = red_mode_trace(&p, &[-1.0, 0.5, 1.5, 2.5, 4.0]).unwrap();
        let top = trace.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(top, trace[2].1);
        assert_eq!(trace[2].1, -p.molecule.mu);
    }

    #[test]
    fn zero_power_uses_first_row() {
        let p = preset();
        let r = resolve(&p, 0.0, 0.0, None).unwrap();
        assert_eq!(r.kappa_m_i_intrinsic, hz(3e6));
        assert!(p.mw.omega_m / r.kappa_m_i_intrinsic > 1e3);
        assert_eq!(r.op.g, 0.0);
    }

    #[test]
    fn interpolates_between_rows() {
        let t = table();
        let (k, s) = t.at(5.5e-5).unwrap();
        let frac = (5.5e-5 - 1e-5) / 9e-5;
        assert!((k - (hz(4e6) + frac * hz(26e6))).abs() < 1e-6);
        assert!((s - (-hz(0.2e6) - frac * hz(4.8e6))).abs() < 1e-6);
        assert!(k > hz(4e6) && k < hz(30e6));
    }

    #[test]
    fn clamps_and_refuses_extrapolation() {
        let t = table();
        assert_eq!(t.at(1.9e-4).unwrap().0, hz(30e6));
        assert!(matches!(t.at(2.01e-4), Err(ModelError::Extrapolation { .. })));
    }

    #[test]
    fn table_validation() {
        let bad = DegradationTable::new(vec![
            DegradationRow { power: 1e-6, kappa_m_i: 1.0, omega_m_shift: 0.0 },
            DegradationRow { power: 1e-6, kappa_m_i: 2.0, omega_m_shift: 0.0 },
        ]);
        assert!(bad.unwrap_err().to_string().contains("rows[1].power"));
        let bad = DegradationTable::new(vec![
            DegradationRow { power: 0.0, kappa_m_i: 2.0, omega_m_shift: 0.0 },
            DegradationRow { power: 1e-6, kappa_m_i: 1.0, omega_m_shift: 0.0 },
        ]);
        assert!(bad.unwrap_err().to_string().contains("rows[1].kappa_m_i"));
    }

    #[test]
    fn feedline_ports_split_coupling() {
        let p = preset();
        let (mw, ki) = p.microwave_at(0.0).unwrap();
        assert_eq!(ki, hz(3e6));
        assert!((mw.kappa_m_e - hz(3.5e6)).abs() < 1e-6);
        assert!((mw.kappa_m() - hz(10e6)).abs() < 1e-6);
    }

    #[test]
    fn lock_models() {
        assert_eq!(PumpLock::Fixed { detuning_minus: 3.0 }.detuning(100.0), 3.0);
        assert_eq!(PumpLock::SideOfFringe { fraction: 0.5 }.detuning(100.0), 25.0);
    }

    #[test]
    fn triple_resonance_condition() {
        let p = preset();
        let r = resolve(&p, -11.0, 1e-6, None).unwrap();
        assert_eq!(r.scatter.delta_plus, r.pump.detuning_minus - r.modes.splitting());
        assert!((r.scatter.delta_plus - (r.pump.omega_l - r.modes.omega_plus)).abs() < 1.0);
        assert_eq!(r.scatter.probe, r.mw.omega_m);
        assert!(r.g0_dr < 0.0, "red mode bright-dominated below the crossing");
    }

    #[test]
    fn red_trace_asymptotes() {
        let mut p = preset();
        p.bias_map.v_offset = 0.0;
        let t = red_mode_trace(&p, &[-1000.0, -999.0, 999.0, 1000.0]).unwrap();
        let k = p.bias_map.slope;
        assert!(((t[1].1 - t[0].1) / k - 1.0).abs() < 1e-3);
        assert!(((t[3].1 - t[2].1) / k + 1.0).abs() < 1e-3);
        // Symmetric about the crossing.
        let s = red_mode_trace(&p, &[-7.0, 7.0]).unwrap();
        assert!((s[0].1 - s[1].1).abs() < 1.0);
    }
}
