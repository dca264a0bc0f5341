//! Photonic-molecule supermodes.
//!
//! Two ring modes at `ω₀ ± δ` coupled at rate `μ` hybridize into a blue
//! (`+`) and a red (`−`) supermode. The mixing angle `θ = atan2(μ, δ)` with
//! `μ > 0` lies in `(0, π)`, so `sin θ ≥ 0`. Losses of the supermodes are
//! the `cos²(θ/2)` / `sin²(θ/2)` weighted averages of the bare ring losses,
//! which only holds while the splitting resolves the linewidths; a warning
//! is attached when `2μ / κ_max < 10`.

use std::fmt;

use crate::error::{ensure, ensure_nonneg, ensure_positive, ModelError, Result};

/// Below this value of `2μ / κ_max` the supermode loss rates are flagged.
pub const RESOLVED_SIDEBAND_RATIO: f64 = 10.0;

/// A bare ring-resonator mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingMode {
    /// Resonance (rad/s).
    pub omega0: f64,
    /// Intrinsic loss rate (rad/s).
    pub kappa_i: f64,
    /// Coupling rate to the bus waveguide (rad/s).
    pub kappa_e: f64,
}

impl RingMode {
    pub fn new(omega0: f64, kappa_i: f64, kappa_e: f64) -> Result<Self> {
        let ring = RingMode {
            omega0,
            kappa_i,
            kappa_e,
        };
        ring.validate()?;
        Ok(ring)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.omega0, "omega0")?;
        ensure_nonneg(self.kappa_i, "kappa_i")?;
        ensure_nonneg(self.kappa_e, "kappa_e")
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_i + self.kappa_e
    }
}

/// Bright (bus-coupled) and dark ring, evanescently coupled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonicMolecule {
    pub bright: RingMode,
    pub dark: RingMode,
    /// Evanescent coupling rate (rad/s), strictly positive.
    pub mu: f64,
    /// Half-detuning between the ring modes (rad/s, signed). The bright ring
    /// sits at `ω₀ + δ`.
    pub delta: f64,
}

impl PhotonicMolecule {
    pub fn validate(&self) -> Result<()> {
        self.bright.validate().map_err(|e| e.within("bright"))?;
        self.dark.validate().map_err(|e| e.within("dark"))?;
        ensure(
            self.mu.is_finite() && self.mu > 0.0,
            "mu",
            "evanescent coupling must be > 0 (hybridization undefined otherwise)",
        )?;
        ensure(self.delta.is_finite(), "delta", "must be finite")
    }

    /// Mean of the two bare ring frequencies.
    pub fn omega_center(&self) -> f64 {
        0.5 * (self.bright.omega0 + self.dark.omega0)
    }

    /// Half-detuning including any offset between the bare ring frequencies.
    pub fn effective_delta(&self) -> f64 {
        self.delta + 0.5 * (self.bright.omega0 - self.dark.omega0)
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        PhotonicMolecule { delta, ..*self }
    }
}

/// Machine-readable condition attached to otherwise valid results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelWarning {
    /// `2μ / κ_max` fell below [`RESOLVED_SIDEBAND_RATIO`].
    UnresolvedSplitting { ratio: f64 },
}

impl fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelWarning::UnresolvedSplitting { ratio } => write!(
                f,
                "unresolved_splitting: 2*mu/kappa_max = {ratio:.3} < {RESOLVED_SIDEBAND_RATIO}"
            ),
        }
    }
}

/// The supermode pair of a [`PhotonicMolecule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridModes {
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// `√(δ² + μ²)`, kept separately because `ω₊ − ω₋` loses the low bits
    /// of an optical carrier.
    pub half_split: f64,
    /// Mixing angle in `(0, π)`.
    pub theta: f64,
    pub kappa_plus_i: f64,
    pub kappa_plus_e: f64,
    pub kappa_minus_i: f64,
    pub kappa_minus_e: f64,
    pub warning: Option<ModelWarning>,
}

impl HybridModes {
    /// `cos(θ/2)`: bright-ring amplitude of the blue supermode.
    pub fn u(&self) -> f64 {
        (0.5 * self.theta).cos()
    }

    /// `sin(θ/2)`: dark-ring amplitude of the blue supermode.
    pub fn v(&self) -> f64 {
        (0.5 * self.theta).sin()
    }

    pub fn kappa_plus(&self) -> f64 {
        self.kappa_plus_i + self.kappa_plus_e
    }

    pub fn kappa_minus(&self) -> f64 {
        self.kappa_minus_i + self.kappa_minus_e
    }

    pub fn splitting(&self) -> f64 {
        2.0 * self.half_split
    }
}

pub fn hybridize(molecule: &PhotonicMolecule) -> Result<HybridModes> {
    molecule.validate()?;
    let PhotonicMolecule {
        bright, dark, mu, ..
    } = *molecule;
    let delta = molecule.effective_delta();
    let omega0 = molecule.omega_center();

    let half_split = delta.hypot(mu);
    let theta = mu.atan2(delta);
    let u2 = (0.5 * theta).cos().powi(2);
    let v2 = (0.5 * theta).sin().powi(2);

    let kappa_max = bright.kappa().max(dark.kappa());
    let ratio = 2.0 * mu / kappa_max;
    let warning = (ratio < RESOLVED_SIDEBAND_RATIO)
        .then_some(ModelWarning::UnresolvedSplitting { ratio });

    Ok(HybridModes {
        omega_plus: omega0 + half_split,
        omega_minus: omega0 - half_split,
        half_split,
        theta,
        kappa_plus_i: v2 * dark.kappa_i + u2 * bright.kappa_i,
        kappa_plus_e: v2 * dark.kappa_e + u2 * bright.kappa_e,
        kappa_minus_i: u2 * dark.kappa_i + v2 * bright.kappa_i,
        kappa_minus_e: u2 * dark.kappa_e + v2 * bright.kappa_e,
        warning,
    })
}

/// One point of an anticrossing trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingPoint {
    pub voltage: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// `ω₊ − ω₋` computed without cancellation.
    pub splitting: f64,
}

/// Supermode frequencies versus bias, with `δ(V)` supplied by the caller.
/// The `delta` of `molecule` is replaced at every voltage.
pub fn splitting_vs_bias(
    molecule: &PhotonicMolecule,
    delta_of_voltage: impl Fn(f64) -> f64,
    voltages: &[f64],
) -> Result<Vec<SplittingPoint>> {
    voltages
        .iter()
        .map(|&voltage| {
            if !voltage.is_finite() {
                return Err(ModelError::invalid("voltage", "must be finite"));
            }
            let modes = hybridize(&molecule.with_delta(delta_of_voltage(voltage)))?;
            Ok(SplittingPoint {
                voltage,
                omega_plus: modes.omega_plus,
                omega_minus: modes.omega_minus,
                splitting: modes.splitting(),
            })
        })
        .collect()
}
