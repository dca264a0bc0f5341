//! Electro-optic coupling, pump photon number and cooperativity, plus the
//! low-cooperativity improvement ledger.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_nonneg, ensure_positive, ModelError, Result};
use crate::molecule::HybridModes;
use crate::units::HBAR;

/// Material and geometry constants of the electro-optic interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EoStack {
    /// Electro-optic coefficient r₃₃ (m/V).
    pub r33: f64,
    /// Extraordinary refractive index.
    pub n_e: f64,
    /// Optical confinement factor Γ in (0, 1].
    pub gamma: f64,
    /// Electrode coverage α in (0, 2]; 2 means both rings fully covered.
    pub alpha: f64,
    /// Effective electrode gap (m): capacitor voltage over field at the
    /// waveguide centre.
    pub d_eff: f64,
    /// Total capacitance of the microwave resonator (F).
    pub c_total: f64,
}

impl EoStack {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.r33, "r33")?;
        ensure_positive(self.n_e, "n_e")?;
        ensure_positive(self.gamma, "gamma")?;
        ensure(self.gamma <= 1.0, "gamma", "confinement factor must be <= 1")?;
        ensure_positive(self.alpha, "alpha")?;
        ensure(self.alpha <= 2.0, "alpha", "electrode coverage must be <= 2")?;
        ensure_positive(self.d_eff, "d_eff")?;
        ensure_positive(self.c_total, "c_total")
    }

    /// χ⁽²⁾ implied by `r₃₃ = 2χ⁽²⁾/n⁴`.
    pub fn chi2(&self) -> f64 {
        0.5 * self.r33 * self.n_e.powi(4)
    }

    /// Zero-point voltage of the LC resonator, `√(ħω_m / 2C)`.
    pub fn zero_point_voltage(&self, omega_m: f64) -> f64 {
        (HBAR * omega_m / (2.0 * self.c_total)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrowaveMode {
    pub omega_m: f64,
    pub kappa_m_i: f64,
    pub kappa_m_e: f64,
}

impl MicrowaveMode {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.omega_m, "omega_m")?;
        ensure_nonneg(self.kappa_m_i, "kappa_m_i")?;
        ensure_nonneg(self.kappa_m_e, "kappa_m_e")
    }

    pub fn kappa_m(&self) -> f64 {
        self.kappa_m_i + self.kappa_m_e
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpDrive {
    /// On-chip pump power (W).
    pub power_on_chip: f64,
    /// Pump angular frequency (rad/s).
    pub omega_l: f64,
    /// `Δ₋ = ω_l − ω₋` (rad/s).
    pub detuning_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Single-photon coupling at the molecule's θ (rad/s).
    pub g0: f64,
    /// Intracavity pump photons in the red supermode.
    pub n_minus: f64,
    /// Pump-enhanced coupling `g₀√n₋` (rad/s).
    pub g: f64,
    pub cooperativity: f64,
}

impl OperatingPoint {
    pub fn new(g0: f64, n_minus: f64, kappa_plus: f64, kappa_m: f64) -> Result<Self> {
        ensure_positive(kappa_plus, "kappa_plus")?;
        ensure_positive(kappa_m, "kappa_m")?;
        ensure_nonneg(n_minus, "n_minus")?;
        let g = g0 * n_minus.sqrt();
        Ok(OperatingPoint {
            g0,
            n_minus,
            g,
            cooperativity: cooperativity(g, kappa_plus, kappa_m),
        })
    }
}

/// `C = 4g² / (κ₊ κ_m)`.
pub fn cooperativity(g: f64, kappa_plus: f64, kappa_m: f64) -> f64 {
    4.0 * g * g / (kappa_plus * kappa_m)
}

/// θ-independent prefactor of the coupling, i.e. `g₀` at `θ = π/2` where the
/// supermodes are evenly split between the rings.
pub fn g0_max(stack: &EoStack, omega_o: f64, omega_m: f64) -> Result<f64> {
    stack.validate()?;
    ensure_positive(omega_o, "omega_o")?;
    ensure_positive(omega_m, "omega_m")?;
    let EoStack {
        r33,
        n_e,
        gamma,
        alpha,
        d_eff,
        ..
    } = *stack;
    Ok(r33 * n_e * n_e * omega_o * gamma * alpha / (4.0 * d_eff) * stack.zero_point_voltage(omega_m))
}

/// Single-photon electro-optic coupling for mixing angle `theta ∈ [0, π]`.
///
/// The only ħ is the one inside the zero-point voltage; the result is an
/// angular frequency.
pub fn g0_of_theta(stack: &EoStack, omega_o: f64, omega_m: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(g0_max(stack, omega_o, omega_m)? * theta.sin().max(0.0))
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    ensure(
        (0.0..=PI).contains(&theta),
        "theta",
        "hybridization angle must lie in [0, pi]",
    )
}

/// Steady-state pump photon number in the red supermode,
/// `n₋ = κ₋ₑ / (Δ₋² + (κ₋/2)²) · P / (ħ ω_l)`.
pub fn pump_photon_number(pump: &PumpDrive, kappa_minus_i: f64, kappa_minus_e: f64) -> Result<f64> {
    ensure_nonneg(pump.power_on_chip, "power_on_chip")?;
    ensure_positive(pump.omega_l, "omega_l")?;
    ensure(pump.detuning_minus.is_finite(), "detuning_minus", "must be finite")?;
    ensure_nonneg(kappa_minus_i, "kappa_minus_i")?;
    ensure_nonneg(kappa_minus_e, "kappa_minus_e")?;
    let kappa = kappa_minus_i + kappa_minus_e;
    ensure(kappa > 0.0, "kappa_minus", "red mode must have nonzero total loss")?;
    let lorentz = kappa_minus_e / (pump.detuning_minus.powi(2) + 0.25 * kappa * kappa);
    Ok(lorentz * pump.power_on_chip / (HBAR * pump.omega_l))
}

/// Bundles `g₀(θ)`, `n₋`, `g` and `C` for the given supermodes.
pub fn operating_point(
    stack: &EoStack,
    omega_o: f64,
    modes: &HybridModes,
    mw: &MicrowaveMode,
    pump: &PumpDrive,
) -> Result<OperatingPoint> {
    let g0_max = g0_max(stack, omega_o, mw.omega_m)?;
    operating_point_with_g0_max(g0_max, modes, mw, pump)
}

/// Same as [`operating_point`] with the θ-independent coupling supplied
/// directly (e.g. a measured value).
pub fn operating_point_with_g0_max(
    g0_max: f64,
    modes: &HybridModes,
    mw: &MicrowaveMode,
    pump: &PumpDrive,
) -> Result<OperatingPoint> {
    ensure_nonneg(g0_max, "g0_max")?;
    check_theta(modes.theta)?;
    mw.validate()?;
    let n_minus = pump_photon_number(pump, modes.kappa_minus_i, modes.kappa_minus_e)?;
    OperatingPoint::new(
        g0_max * modes.theta.sin(),
        n_minus,
        modes.kappa_plus(),
        mw.kappa_m(),
    )
}

/// One line of an improvement scenario: an intervention and the efficiency
/// enhancement it buys in the low-cooperativity limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementFactor {
    pub name: String,
    pub enhancement: f64,
}

impl ImprovementFactor {
    pub fn new(name: &str, enhancement: f64) -> Self {
        ImprovementFactor {
            name: name.to_string(),
            enhancement,
        }
    }
}

/// Interventions predicted for the current device generation.
pub fn default_improvements() -> Vec<ImprovementFactor> {
    vec![
        ImprovementFactor::new("optical_loss_10x", 100.0),
        ImprovementFactor::new("microwave_loss_10x", 10.0),
        ImprovementFactor::new("block_scattered_light", 10.0),
        ImprovementFactor::new("electrode_coverage_2x", 4.0),
        ImprovementFactor::new("single_sided_mw_coupling", 2.0),
        ImprovementFactor::new("capacitance_2x_lower", 1.5),
        ImprovementFactor::new("resonant_optical_pump", 1.5),
    ]
}

/// Operating-point information that lets a projection respect the exact
/// `4C/(1+C)²` ceiling instead of extrapolating linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionContext {
    /// Extraction efficiency `κ_{m,e}κ_{+,e}/(κ_m κ₊)`, held fixed.
    pub extraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionStep {
    pub name: String,
    pub enhancement: f64,
    /// Low-C efficiency after applying this and all previous steps.
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub base_efficiency: f64,
    pub total_enhancement: f64,
    /// Linear (low-C) projection; may exceed 1.
    pub projected: f64,
    pub steps: Vec<ProjectionStep>,
    /// Set when the linear projection passes the physical ceiling
    /// (1, or the extraction efficiency when a context is given).
    pub exceeds_ceiling: bool,
    /// Exact efficiency with the enhancement applied to the cooperativity;
    /// only available with a [`ProjectionContext`].
    pub clamped: Option<f64>,
}

pub fn project_improvements(
    base_efficiency: f64,
    factors: &[ImprovementFactor],
    context: Option<ProjectionContext>,
) -> Result<Projection> {
    ensure(
        (0.0..=1.0).contains(&base_efficiency),
        "base_efficiency",
        "must lie in [0, 1]",
    )?;
    let mut efficiency = base_efficiency;
    let mut total = 1.0;
    let mut steps = Vec::with_capacity(factors.len());
    for (i, f) in factors.iter().enumerate() {
        if !(f.enhancement.is_finite() && f.enhancement > 0.0) {
            return Err(ModelError::invalid(
                format!("factors[{i}].enhancement"),
                format!("`{}` must be finite and > 0", f.name),
            ));
        }
        total *= f.enhancement;
        efficiency *= f.enhancement;
        steps.push(ProjectionStep {
            name: f.name.clone(),
            enhancement: f.enhancement,
            efficiency,
        });
    }

    let (ceiling, clamped) = match context {
        Some(ctx) => {
            ensure(
                ctx.extraction > 0.0 && ctx.extraction <= 1.0,
                "extraction",
                "must lie in (0, 1]",
            )?;
            ensure(
                base_efficiency <= ctx.extraction,
                "base_efficiency",
                "cannot exceed the extraction efficiency",
            )?;
            let c0 = low_branch_cooperativity(base_efficiency / ctx.extraction);
            let c1 = c0 * total;
            (ctx.extraction, Some(ctx.extraction * internal_efficiency(c1)))
        }
        None => (1.0, None),
    };

    Ok(Projection {
        base_efficiency,
        total_enhancement: total,
        projected: efficiency,
        steps,
        exceeds_ceiling: efficiency > ceiling,
        clamped,
    })
}

/// `4C / (1 + C)²`.
pub fn internal_efficiency(c: f64) -> f64 {
    4.0 * c / (1.0 + c).powi(2)
}

/// Inverse of [`internal_efficiency`] on the `C ≤ 1` branch.
fn low_branch_cooperativity(internal: f64) -> f64 {
    if internal <= 0.0 {
        return 0.0;
    }
    let y = internal.min(1.0);
    // Rationalized form of ((2 − y) − 2√(1 − y)) / y, stable for small y.
    y / ((2.0 - y) + 2.0 * (1.0 - y).sqrt())
}
