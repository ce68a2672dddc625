use typeii_core::fields::{ProfileSpec, RadialLaw, SimilarityProfile};
use typeii_core::quantities::{local_energy_residual, LocalEnergyVariant, TestFunction};

fn psi() -> TestFunction {
    TestFunction::GaussianBump { center: [0.2, -0.1, 0.3], width: 0.6, t_center: 0.4, t_width: 0.35 }
}

#[test]
fn substitution_identity() {
    let u = ProfileSpec::Swirl(SimilarityProfile::new(RadialLaw::Gaussian { amplitude: 1.0, width: 0.8 }).with_pressure_scale(0.3));
    for (alpha, m1) in [(1.2, 0.6), (1.0788530, 0.842294), (1.5, 0.0)] {
        let phi = TestFunction::Weighted { inner: Box::new(psi()), rate: m1 / (1.0 + alpha) };
        let a = local_energy_residual(&u, &phi, 0.6, LocalEnergyVariant::SelfSimilar { alpha, m1 }, 16).unwrap();
        let b = local_energy_residual(&u, &psi(), 0.6, LocalEnergyVariant::SelfSimilarPsi { alpha, m1 }, 16).unwrap();
        assert!((a.lhs - b.lhs).abs() <= 1e-9 * (1.0 + b.lhs.abs()));
        assert!((a.rhs - b.rhs).abs() <= 1e-9 * (1.0 + b.rhs.abs()));
    }
}

#[test]
fn steady_shear_balance() {
    let shear = ProfileSpec::SteadyShear { amplitude: 0.9, wavenumber: 1.7 };
    let phi = TestFunction::GaussianBump { center: [0.1, 0.4, -0.2], width: 0.5, t_center: -1.0, t_width: 0.3 };
    let r = local_energy_residual(&shear, &phi, -0.8, LocalEnergyVariant::EulerLimit, 64).unwrap();
    assert!(r.lhs > 0.0);
    assert!(r.residual.abs() <= 1e-6, "{r:?}");
}

#[test]
fn viscous_variant_sees_dissipation() {
    // a shear is not a stationary Navier–Stokes flow, so the viscous balance is off
    let shear = ProfileSpec::SteadyShear { amplitude: 0.9, wavenumber: 1.7 };
    let phi = psi();
    let r = local_energy_residual(&shear, &phi, 0.5, LocalEnergyVariant::StandardNs, 24).unwrap();
    assert!(r.residual.abs() > 1e-3);
}
