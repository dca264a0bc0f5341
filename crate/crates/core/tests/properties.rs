use proptest::prelude::*;

use eotx::interaction::{g0_of_theta, internal_efficiency, EoStack};
use eotx::labchain::{
    beat_power, efficiency_from_measurement, sideband_power_for_efficiency,
    sideband_power_from_beat, ChainCalibration,
};
use eotx::molecule::{hybridize, PhotonicMolecule, RingMode};
use eotx::scattering::{
    apparent_efficiency, scattering_matrix, triple_resonance_efficiency, DoubleResonanceInputs,
    ScatterInputs,
};
use eotx::units::{hz, omega_from_wavelength, TWO_PI};

fn molecule() -> impl Strategy<Value = PhotonicMolecule> {
    (
        1500e-9..1620e-9f64,
        prop::array::uniform4(0.0..2e9f64),
        1e7..1e10f64,
        -2e10..2e10f64,
    )
        .prop_map(|(lambda, k, mu, delta)| {
            let w0 = omega_from_wavelength(lambda);
            PhotonicMolecule {
                bright: RingMode::new(w0, hz(k[0]), hz(k[1])).unwrap(),
                dark: RingMode::new(w0, hz(k[2]), hz(k[3])).unwrap(),
                mu: hz(mu),
                delta: hz(delta),
            }
        })
}

fn scatter() -> impl Strategy<Value = ScatterInputs> {
    (
        1e9..10e9f64,
        (1e6..50e6f64, 0.0..=1.0f64),
        (50e6..2e9f64, 0.0..=1.0f64),
        -4.0..4.0f64,
        -6.0..2.0f64,
        -10.0..10.0f64,
    )
        .prop_map(|(fm, (km, xm), (kp, xp), detune, log_c, probe)| {
            let (omega_m, kappa_m, kappa_plus) = (hz(fm), hz(km), hz(kp));
            let c = 10f64.powf(log_c);
            ScatterInputs {
                delta_plus: -omega_m + detune * kappa_plus,
                omega_m,
                kappa_m_i: (1.0 - xm) * kappa_m,
                kappa_m_e: xm * kappa_m,
                kappa_plus_i: (1.0 - xp) * kappa_plus,
                kappa_plus_e: xp * kappa_plus,
                g: (c * kappa_plus * kappa_m / 4.0).sqrt(),
                probe: omega_m + probe * kappa_m,
            }
        })
}

fn chain() -> impl Strategy<Value = ChainCalibration> {
    (
        (1e-3..=1.0f64, 1e-3..=1.0f64, 1e-3..=1.0f64),
        1e-3..1e6f64,
        1500e-9..1620e-9f64,
        1e9..10e9f64,
    )
        .prop_map(|((c, f, cable), a, lambda, fm)| ChainCalibration {
            eta_coupler: c,
            eta_fiber: f,
            eta_cable: cable,
            a_det: a,
            omega_o: omega_from_wavelength(lambda),
            omega_m: hz(fm),
            edfa_gain: 1.0,
            coupler_uncertainty_db: 0.4,
        })
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hybridization_conserves_loss(m in molecule()) {
        let h = hybridize(&m).unwrap();
        let si = m.bright.kappa_i + m.dark.kappa_i;
        let se = m.bright.kappa_e + m.dark.kappa_e;
        prop_assert!((h.kappa_plus_i + h.kappa_minus_i - si).abs() <= 1e-12 * si.max(1.0));
        prop_assert!((h.kappa_plus_e + h.kappa_minus_e - se).abs() <= 1e-12 * se.max(1.0));
        prop_assert!(h.theta > 0.0 && h.theta < std::f64::consts::PI);
    }

    #[test]
    fn supermodes_are_symmetric_about_centre(m in molecule()) {
        let h = hybridize(&m).unwrap();
        prop_assert!(rel(h.omega_plus + h.omega_minus, 2.0 * m.omega_center()) < 1e-15);
        prop_assert_eq!(h.splitting(), 2.0 * m.delta.hypot(m.mu));
    }

    #[test]
    fn negating_detuning_swaps_ring_weights(m in molecule()) {
        let a = hybridize(&m).unwrap();
        let swapped = PhotonicMolecule { bright: m.dark, dark: m.bright, ..m.with_delta(-m.delta) };
        let b = hybridize(&m.with_delta(-m.delta)).unwrap();
        let c = hybridize(&swapped).unwrap();
        prop_assert!((a.theta + b.theta - std::f64::consts::PI).abs() < 1e-12);
        // Flipping δ and exchanging the rings leaves the supermode losses alone.
        let scale = 1.0 + a.kappa_plus() + a.kappa_minus();
        prop_assert!((a.kappa_plus_i - c.kappa_plus_i).abs() < 1e-9 * scale);
        prop_assert!((a.kappa_minus_e - c.kappa_minus_e).abs() < 1e-9 * scale);
    }

    #[test]
    fn reciprocity(t in scatter()) {
        let s = scattering_matrix(&t).unwrap();
        prop_assert!(rel(s.s_oe.norm(), s.s_eo.norm()) < 1e-12);
    }

    #[test]
    fn passivity(t in scatter()) {
        let s = scattering_matrix(&t).unwrap();
        prop_assert!(s.s_ee.norm_sqr() + s.s_oe.norm_sqr() <= 1.0 + 1e-9);
        prop_assert!(s.s_oo.norm_sqr() + s.s_eo.norm_sqr() <= 1.0 + 1e-9);
    }

    #[test]
    fn triple_resonance_identity(t in scatter()) {
        let t = ScatterInputs { delta_plus: -t.omega_m, probe: t.omega_m, ..t };
        let s = scattering_matrix(&t).unwrap();
        let e = triple_resonance_efficiency(&t.loss_rates(), t.cooperativity());
        prop_assert!(rel(s.s_eo.norm_sqr(), e.total) < 1e-10);
    }

    #[test]
    fn apparent_is_continuous_at_zero_coupling(t in scatter(), kme in 0.0..1e9f64) {
        let dr = |g| DoubleResonanceInputs {
            g_dr: g,
            delta_minus: hz(150e6),
            kappa_minus_i: hz(130e6),
            kappa_minus_e: hz(kme),
        };
        let base = apparent_efficiency(&t, &dr(0.0)).unwrap();
        let near = apparent_efficiency(&t, &dr(1e-9)).unwrap();
        prop_assert!((near - base).abs() <= 1e-12 * base.max(1e-30) + 1e-24);
    }

    #[test]
    fn internal_efficiency_bounded(c in 1e-6..1e4f64) {
        let e = internal_efficiency(c);
        prop_assert!(e > 0.0 && e <= 1.0);
        prop_assert!(rel(e, internal_efficiency(1.0 / c)) < 1e-12);
        let toward_one = if c < 1.0 { (c * 1.01).min(1.0) } else { (c / 1.01).max(1.0) };
        prop_assert!(internal_efficiency(toward_one) >= e);
    }

    #[test]
    fn calibration_round_trips(cal in chain(), eta in 1e-9..1.0f64, p_in in 1e-9..1e-1f64, pump in 1e-6..1e-1f64) {
        let p_sb = sideband_power_for_efficiency(&cal, eta, p_in).unwrap();
        prop_assert!(rel(efficiency_from_measurement(&cal, p_sb, p_in).unwrap(), eta) < 1e-12);
        let p_det = beat_power(&cal, p_sb, pump);
        prop_assert!(rel(sideband_power_from_beat(&cal, p_det, pump).unwrap(), p_sb) < 1e-12);
    }

    #[test]
    fn g0_scales_exactly(alpha in 0.1..1.0f64, theta in 0.01..3.13f64) {
        let stack = EoStack { r33: 32e-12, n_e: 2.13, gamma: 0.93, alpha, d_eff: 15e-6, c_total: 120e-15 };
        let (wo, wm) = (omega_from_wavelength(1586e-9), TWO_PI * 3.7e9);
        let g = g0_of_theta(&stack, wo, wm, theta).unwrap();
        let doubled = EoStack { alpha: 2.0 * alpha, ..stack };
        prop_assert!(rel(g0_of_theta(&doubled, wo, wm, theta).unwrap(), 2.0 * g) < 1e-14);
        let wider = EoStack { d_eff: 2.0 * stack.d_eff, ..stack };
        prop_assert!(rel(g0_of_theta(&wider, wo, wm, theta).unwrap(), 0.5 * g) < 1e-14);
        let bigger = EoStack { c_total: 4.0 * stack.c_total, ..stack };
        prop_assert!(rel(g0_of_theta(&bigger, wo, wm, theta).unwrap(), 0.5 * g) < 1e-14);
    }
}
