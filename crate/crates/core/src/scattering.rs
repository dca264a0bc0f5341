//! Steady-state transduction between the microwave mode and the blue
//! supermode, with the red-mode double-resonance sideband added coherently.
//!
//! Optical amplitudes live in the frame rotating at the pump; the microwave
//! amplitude is in the lab frame. A probe at `ω` therefore drives the blue
//! mode at detuning `Δ₊ + ω` and the microwave mode at `ω_m − ω`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, ensure_nonneg, ModelError, Result};
use crate::interaction::internal_efficiency;
use crate::optimize::{bisect, grid_golden_max};
use crate::units::TWO_PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Half-maximum crossings are located to this width (rad/s), 1 kHz.
pub const BANDWIDTH_TOL: f64 = TWO_PI * 1e3;
/// Default half-width of the probe span, in units of `κ_m`.
pub const DEFAULT_SPAN_KAPPAS: f64 = 10.0;

/// Triple-resonance (blue mode + microwave) problem at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterInputs {
    /// `Δ₊ = ω_l − ω₊` (rad/s).
    pub delta_plus: f64,
    pub omega_m: f64,
    pub kappa_m_i: f64,
    pub kappa_m_e: f64,
    pub kappa_plus_i: f64,
    pub kappa_plus_e: f64,
    /// Pump-enhanced coupling (rad/s).
    pub g: f64,
    /// Excitation frequency (rad/s): offset from the pump for an optical
    /// input, absolute for a microwave input.
    pub probe: f64,
}

impl ScatterInputs {
    pub fn validate(&self) -> Result<()> {
        ensure(self.delta_plus.is_finite(), "delta_plus", "must be finite")?;
        ensure(self.omega_m.is_finite(), "omega_m", "must be finite")?;
        ensure(self.g.is_finite(), "g", "must be finite")?;
        ensure(self.probe.is_finite(), "probe", "must be finite")?;
        ensure_nonneg(self.kappa_m_i, "kappa_m_i")?;
        ensure_nonneg(self.kappa_m_e, "kappa_m_e")?;
        ensure_nonneg(self.kappa_plus_i, "kappa_plus_i")?;
        ensure_nonneg(self.kappa_plus_e, "kappa_plus_e")?;
        ensure(self.kappa_m() > 0.0, "kappa_m", "microwave total loss must be > 0")?;
        ensure(self.kappa_plus() > 0.0, "kappa_plus", "blue-mode total loss must be > 0")
    }

    pub fn kappa_m(&self) -> f64 {
        self.kappa_m_i + self.kappa_m_e
    }

    pub fn kappa_plus(&self) -> f64 {
        self.kappa_plus_i + self.kappa_plus_e
    }

    pub fn cooperativity(&self) -> f64 {
        crate::interaction::cooperativity(self.g, self.kappa_plus(), self.kappa_m())
    }

    pub fn loss_rates(&self) -> LossRates {
        LossRates {
            kappa_m_i: self.kappa_m_i,
            kappa_m_e: self.kappa_m_e,
            kappa_plus_i: self.kappa_plus_i,
            kappa_plus_e: self.kappa_plus_e,
        }
    }

    pub fn at_probe(&self, probe: f64) -> Self {
        ScatterInputs { probe, ..*self }
    }

    fn blue_denominator(&self) -> Complex64 {
        Complex64::new(0.5 * self.kappa_plus(), -(self.delta_plus + self.probe))
    }

    fn microwave_denominator(&self) -> Complex64 {
        Complex64::new(0.5 * self.kappa_m(), self.omega_m - self.probe)
    }
}

/// Scattering amplitudes between the optical (`o`) and microwave (`e`)
/// ports. Row index is the output port: `a_out = s_oo a_in + s_oe b_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterMatrix {
    pub s_oo: Complex64,
    pub s_oe: Complex64,
    pub s_eo: Complex64,
    pub s_ee: Complex64,
}

/// Red-mode parameters of the double-resonance channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleResonanceInputs {
    /// `g_{0,dr}·√n₋` (rad/s, signed).
    pub g_dr: f64,
    /// `Δ₋ = ω_l − ω₋` (rad/s).
    pub delta_minus: f64,
    pub kappa_minus_i: f64,
    pub kappa_minus_e: f64,
}

impl DoubleResonanceInputs {
    pub fn disabled() -> Self {
        DoubleResonanceInputs {
            g_dr: 0.0,
            delta_minus: 0.0,
            kappa_minus_i: 0.0,
            kappa_minus_e: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.g_dr.is_finite(), "g_dr", "must be finite")?;
        ensure(self.delta_minus.is_finite(), "delta_minus", "must be finite")?;
        ensure_nonneg(self.kappa_minus_i, "kappa_minus_i")?;
        ensure_nonneg(self.kappa_minus_e, "kappa_minus_e")
    }

    pub fn kappa_minus(&self) -> f64 {
        self.kappa_minus_i + self.kappa_minus_e
    }
}

pub fn scattering_matrix(inputs: &ScatterInputs) -> Result<ScatterMatrix> {
    inputs.validate()?;
    Ok(scattering_matrix_unchecked(inputs))
}

fn scattering_matrix_unchecked(inputs: &ScatterInputs) -> ScatterMatrix {
    let d_plus = inputs.blue_denominator();
    let d_m = inputs.microwave_denominator();
    let g2 = inputs.g * inputs.g;
    let cross = I * inputs.g * (inputs.kappa_plus_e * inputs.kappa_m_e).sqrt() / (d_m * d_plus + g2);
    ScatterMatrix {
        s_oo: 1.0 - inputs.kappa_plus_e / (d_plus + g2 / d_m),
        s_oe: cross,
        s_eo: cross,
        s_ee: 1.0 - inputs.kappa_m_e / (d_m + g2 / d_plus),
    }
}

/// Extraction, internal and total efficiency on triple resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleEfficiency {
    pub extraction: f64,
    pub internal: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRates {
    pub kappa_m_i: f64,
    pub kappa_m_e: f64,
    pub kappa_plus_i: f64,
    pub kappa_plus_e: f64,
}

pub fn triple_resonance_efficiency(kappas: &LossRates, cooperativity: f64) -> TripleEfficiency {
    let kappa_m = kappas.kappa_m_i + kappas.kappa_m_e;
    let kappa_plus = kappas.kappa_plus_i + kappas.kappa_plus_e;
    let extraction = if kappa_m > 0.0 && kappa_plus > 0.0 {
        kappas.kappa_m_e * kappas.kappa_plus_e / (kappa_m * kappa_plus)
    } else {
        0.0
    };
    let internal = internal_efficiency(cooperativity.max(0.0));
    TripleEfficiency {
        extraction,
        internal,
        total: extraction * internal,
    }
}

/// Output sideband amplitude per unit microwave input, summing the
/// triple-resonance path and the two red-mode double-resonance sidebands.
///
/// The double-resonance channel neglects its back-action on the microwave
/// mode; the microwave amplitude it sees still includes the blue-mode
/// loading `g²/D₊`. The lower sideband is driven by `B*`, which keeps the
/// result independent of the input phase.
pub fn apparent_amplitude(triple: &ScatterInputs, dr: &DoubleResonanceInputs) -> Result<Complex64> {
    triple.validate()?;
    dr.validate()?;
    Ok(apparent_amplitude_unchecked(triple, dr))
}

fn apparent_amplitude_unchecked(triple: &ScatterInputs, dr: &DoubleResonanceInputs) -> Complex64 {
    let s = scattering_matrix_unchecked(triple);
    if dr.g_dr == 0.0 {
        return s.s_eo;
    }
    let d_plus = triple.blue_denominator();
    let d_m = triple.microwave_denominator();
    let b = triple.kappa_m_e.sqrt() * d_plus / (d_m * d_plus + triple.g * triple.g);
    let half = 0.5 * dr.kappa_minus();
    let w = triple.probe;
    let upper = -I * dr.g_dr * b / Complex64::new(half, -(dr.delta_minus + w));
    let lower = -I * dr.g_dr * b.conj() / Complex64::new(half, -(dr.delta_minus - w));
    s.s_eo - dr.kappa_minus_e.sqrt() * (upper + lower.conj())
}

/// Single-sideband-equivalent efficiency `|S_eo − √κ₋ₑ(A₊ + A₋*)|²`.
pub fn apparent_efficiency(triple: &ScatterInputs, dr: &DoubleResonanceInputs) -> Result<f64> {
    Ok(apparent_amplitude(triple, dr)?.norm_sqr())
}

/// Apparent efficiency at each probe frequency, evaluated in parallel.
pub fn apparent_spectrum(
    triple: &ScatterInputs,
    dr: &DoubleResonanceInputs,
    probes: &[f64],
) -> Result<Vec<f64>> {
    triple.validate()?;
    dr.validate()?;
    if let Some(i) = probes.iter().position(|p| !p.is_finite()) {
        return Err(ModelError::invalid(format!("probes[{i}]"), "must be finite"));
    }
    Ok(probes
        .par_iter()
        .map(|&p| apparent_amplitude_unchecked(&triple.at_probe(p), dr).norm_sqr())
        .collect())
}

/// Full width at half maximum of the apparent efficiency versus probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    /// rad/s.
    pub fwhm: f64,
    pub peak_probe: f64,
    pub peak_efficiency: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Bandwidth {
    pub fn fwhm_hz(&self) -> f64 {
        self.fwhm / TWO_PI
    }
}

/// Default probe span, `ω_m ± 10κ_m`.
pub fn default_probe_span(triple: &ScatterInputs) -> (f64, f64) {
    let half = DEFAULT_SPAN_KAPPAS * triple.kappa_m();
    (triple.omega_m - half, triple.omega_m + half)
}

/// Locates the efficiency peak inside `span` and bisects each side for the
/// half-maximum crossing to [`BANDWIDTH_TOL`].
pub fn bandwidth_3db(
    triple: &ScatterInputs,
    dr: &DoubleResonanceInputs,
    span: (f64, f64),
) -> Result<Bandwidth> {
    triple.validate()?;
    dr.validate()?;
    let (lo, hi) = (span.0.min(span.1), span.0.max(span.1));
    ensure(lo.is_finite() && hi.is_finite() && hi > lo, "span", "must be a finite, nonempty range")?;
    let eta = |p: f64| apparent_amplitude_unchecked(&triple.at_probe(p), dr).norm_sqr();
    let (peak_probe, peak) = grid_golden_max(eta, lo, hi, 2001, BANDWIDTH_TOL * 1e-3);
    ensure(peak > 0.0, "g", "efficiency is identically zero; bandwidth undefined")?;
    let half = 0.5 * peak;
    let below = |p: f64| eta(p) - half;
    let lower = bisect(below, lo, peak_probe, BANDWIDTH_TOL)
        .ok_or(ModelError::Unbracketed { side: "lower" })?;
    let upper = bisect(below, peak_probe, hi, BANDWIDTH_TOL)
        .ok_or(ModelError::Unbracketed { side: "upper" })?;
    Ok(Bandwidth {
        fwhm: upper - lower,
        peak_probe,
        peak_efficiency: peak,
        lower,
        upper,
    })
}
