//! Independent cross-checks of the closed forms: a Hermitian eigensolver for
//! the molecule, direct linear solves and time integration of the
//! Heisenberg-Langevin equations for the scattering problem.

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eotx::molecule::{hybridize, PhotonicMolecule, RingMode};
use eotx::scattering::{apparent_amplitude, scattering_matrix, DoubleResonanceInputs, ScatterInputs};
use eotx::units::{hz, omega_from_wavelength};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_molecule(rng: &mut impl Rng) -> PhotonicMolecule {
    let w0 = omega_from_wavelength(rng.gen_range(1500e-9..1620e-9));
    let ring = |rng: &mut ChaCha8Rng| {
        RingMode::new(w0, hz(rng.gen_range(0.0..500e6)), hz(rng.gen_range(0.0..1.5e9))).unwrap()
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    PhotonicMolecule {
        bright: ring(&mut r),
        dark: ring(&mut r),
        mu: hz(log_uniform(rng, 1e7, 1e10)),
        delta: hz(rng.gen_range(-1e10..1e10)),
    }
}

#[test]
fn hybridization_matches_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let m = random_molecule(&mut rng);
        let h = hybridize(&m).unwrap();
        // Frequencies relative to ω₀, so the eigensolver sees O(δ, μ) numbers.
        let eig = SymmetricEigen::new(Matrix2::new(m.delta, m.mu, m.mu, -m.delta));
        let (hi, lo) = if eig.eigenvalues[0] > eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let scale = m.delta.hypot(m.mu);
        assert!((eig.eigenvalues[hi] - h.half_split).abs() / scale < 1e-10);
        assert!((eig.eigenvalues[lo] + h.half_split).abs() / scale < 1e-10);

        // Loss rates are the ring rates weighted by the eigenvector populations.
        let weights = |k: usize| {
            let v = eig.eigenvectors.column(k);
            (v[0] * v[0], v[1] * v[1])
        };
        let (b_plus, d_plus) = weights(hi);
        let (b_minus, d_minus) = weights(lo);
        let close = |a: f64, b: f64| {
            let s = m.bright.kappa_i + m.bright.kappa_e + m.dark.kappa_i + m.dark.kappa_e;
            (a - b).abs() <= 1e-10 * s.max(1.0)
        };
        assert!(close(h.kappa_plus_i, b_plus * m.bright.kappa_i + d_plus * m.dark.kappa_i));
        assert!(close(h.kappa_plus_e, b_plus * m.bright.kappa_e + d_plus * m.dark.kappa_e));
        assert!(close(h.kappa_minus_i, b_minus * m.bright.kappa_i + d_minus * m.dark.kappa_i));
        assert!(close(h.kappa_minus_e, b_minus * m.bright.kappa_e + d_minus * m.dark.kappa_e));
    }
}

fn random_scatter(rng: &mut impl Rng) -> ScatterInputs {
    let omega_m = hz(rng.gen_range(1e9..10e9));
    let kappa_m = hz(rng.gen_range(1e6..50e6));
    let kappa_plus = hz(rng.gen_range(50e6..2e9));
    let f_m = rng.gen_range(0.0..1.0);
    let f_p = rng.gen_range(0.0..1.0);
    let c = log_uniform(rng, 1e-4, 1e2);
    ScatterInputs {
        delta_plus: -omega_m + rng.gen_range(-2.0..2.0) * kappa_plus,
        omega_m,
        kappa_m_i: (1.0 - f_m) * kappa_m,
        kappa_m_e: f_m * kappa_m,
        kappa_plus_i: (1.0 - f_p) * kappa_plus,
        kappa_plus_e: f_p * kappa_plus,
        g: (c * kappa_plus * kappa_m / 4.0).sqrt(),
        probe: omega_m + rng.gen_range(-5.0..5.0) * kappa_m,
    }
}

/// Steady state of the coupled blue/microwave equations in the frame
/// rotating with the probe, solved as a linear system. Outputs follow
/// `out = in − √κₑ·mode`.
fn linear_solve(t: &ScatterInputs) -> [[Complex64; 2]; 2] {
    let d_plus = Complex64::new(0.5 * t.kappa_plus(), -(t.delta_plus + t.probe));
    let d_m = Complex64::new(0.5 * t.kappa_m(), t.omega_m - t.probe);
    let ig = I * t.g;
    let m = Matrix2::new(d_plus, ig, ig, d_m);
    let lu = m.lu();
    let (kpe, kme) = (t.kappa_plus_e.sqrt(), t.kappa_m_e.sqrt());
    // Optical drive, then microwave drive.
    let a = lu.solve(&nalgebra::Vector2::new(Complex::from(kpe), Complex::from(0.0))).unwrap();
    let b = lu.solve(&nalgebra::Vector2::new(Complex::from(0.0), Complex::from(kme))).unwrap();
    [
        [1.0 - kpe * a[0], -kpe * b[0]],
        [-kme * a[1], 1.0 - kme * b[1]],
    ]
}

#[test]
fn closed_form_matches_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let t = random_scatter(&mut rng);
        let s = scattering_matrix(&t).unwrap();
        let o = linear_solve(&t);
        let pairs = [(s.s_oo, o[0][0]), (s.s_oe, o[0][1]), (s.s_eo, o[1][0]), (s.s_ee, o[1][1])];
        for (closed, direct) in pairs {
            let scale = direct.norm().max(1e-300);
            assert!((closed - direct).norm() / scale < 1e-10, "{closed} vs {direct}");
        }
    }
}

#[test]
fn apparent_amplitude_matches_four_mode_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let t = random_scatter(&mut rng);
        let dr = DoubleResonanceInputs {
            g_dr: hz(rng.gen_range(-1e6..1e6)),
            delta_minus: hz(rng.gen_range(-500e6..500e6)),
            kappa_minus_i: hz(rng.gen_range(10e6..500e6)),
            kappa_minus_e: hz(rng.gen_range(0.0..1e9)),
        };
        // Unknowns: blue mode, microwave, upper red sideband, conjugate of
        // the lower red sideband. The red sidebands do not act back.
        let d_plus = Complex64::new(0.5 * t.kappa_plus(), -(t.delta_plus + t.probe));
        let d_m = Complex64::new(0.5 * t.kappa_m(), t.omega_m - t.probe);
        let half = 0.5 * dr.kappa_minus();
        let d_up = Complex64::new(half, -(dr.delta_minus + t.probe));
        let d_low_conj = Complex64::new(half, -(dr.delta_minus - t.probe)).conj();
        let z = Complex64::new(0.0, 0.0);
        let ig = I * t.g;
        let igd = I * dr.g_dr;
        #[rustfmt::skip]
        let m = Matrix4::new(
            d_plus, ig,   z,    z,
            ig,     d_m,  z,    z,
            z,      igd,  d_up, z,
            z,      -igd, z,    d_low_conj,
        );
        let rhs = Vector4::new(z, Complex64::from(t.kappa_m_e.sqrt()), z, z);
        let x = m.lu().solve(&rhs).unwrap();
        let direct = -t.kappa_plus_e.sqrt() * x[0] - dr.kappa_minus_e.sqrt() * (x[2] + x[3]);
        let closed = apparent_amplitude(&t, &dr).unwrap();
        let scale = direct.norm().max(1e-300);
        assert!((closed - direct).norm() / scale < 1e-10, "{closed} vs {direct}");
    }
}

/// Classical RK4 integration of the rotating-frame equations from rest
/// with a microwave drive, until transients have decayed.
fn integrate_microwave_drive(t: &ScatterInputs) -> Complex64 {
    let d_plus = Complex64::new(0.5 * t.kappa_plus(), -(t.delta_plus + t.probe));
    let d_m = Complex64::new(0.5 * t.kappa_m(), t.omega_m - t.probe);
    let ig = I * t.g;
    let drive = Complex64::from(t.kappa_m_e.sqrt());
    let f = |a: Complex64, b: Complex64| (-d_plus * a - ig * b, -d_m * b - ig * a + drive);
    let fastest = d_plus.norm() + d_m.norm() + t.g;
    let slowest = 0.5 * t.kappa_m().min(t.kappa_plus());
    let dt = 0.05 / fastest;
    let steps = (40.0 / slowest / dt).ceil() as usize;
    let (mut a, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..steps {
        let k1 = f(a, b);
        let k2 = f(a + 0.5 * dt * k1.0, b + 0.5 * dt * k1.1);
        let k3 = f(a + 0.5 * dt * k2.0, b + 0.5 * dt * k2.1);
        let k4 = f(a + dt * k3.0, b + dt * k3.1);
        a += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        b += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    -t.kappa_plus_e.sqrt() * a
}

#[test]
fn time_domain_steady_state_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let mut t = random_scatter(&mut rng);
        // Keep the loss ratio moderate so the integration stays short.
        t.kappa_plus_i = t.kappa_plus_i.min(hz(300e6));
        t.kappa_plus_e = t.kappa_plus_e.min(hz(300e6));
        t.kappa_m_i += hz(5e6);
        let eta_ode = integrate_microwave_drive(&t).norm_sqr();
        let eta = scattering_matrix(&t).unwrap().s_eo.norm_sqr();
        assert!((eta_ode - eta).abs() / eta < 1e-6, "{eta_ode} vs {eta}");
    }
}
