use proptest::prelude::*;
use typeii_core::exponent_algebra::construct_appendix1;
use typeii_core::fields::{ProfileSpec, RadialLaw, SimilarityProfile};
use typeii_core::quadrature::{sup_sample_fractions, QuadratureConfig};
use typeii_core::quantities::{
    closed_form_m_power_law, constant_row, energy_quantities, m_quantity, power_law_row, quantity_report,
    raw_integrals, QuantityParams, CSV_COLUMNS,
};
use typeii_core::quadrature::Breakpoints;

fn params() -> QuantityParams {
    QuantityParams::derive(2.8, 2.8, 0.9).unwrap()
}

fn fast() -> QuadratureConfig {
    QuadratureConfig { radial_levels: 10, time_levels: 10, order: 3, n_theta: 6, ..Default::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) }
}

#[test]
fn constant_field_closed_form() {
    let c = [0.3, -1.2, 0.8];
    let p = params();
    let cfg = QuadratureConfig::graded(64);
    for r in [1.0, 0.5, 0.25] {
        let got = energy_quantities(&ProfileSpec::ConstantVector { c }, r, &p, &cfg).unwrap();
        let want = constant_row(&c, r, &p);
        for (i, (g, w)) in got.csv_values().iter().zip(want.csv_values()).enumerate() {
            assert!(rel(*g, w) <= 1e-9 || (g - w).abs() <= 1e-14, "{} at r={r}: {g} vs {w}", CSV_COLUMNS[i]);
        }
    }
}

#[test]
fn power_law_weighted_quantities() {
    let k = construct_appendix1(0.9_f64, 0.5, None).unwrap();
    let field = ProfileSpec::power_law(1.0, 0.5, k.gamma);
    let p = QuantityParams::with_weights(0.92, 0.84, k.s, k.l, 0.9).unwrap();
    let cfg = QuadratureConfig::graded(64);
    let fractions = sup_sample_fractions(&cfg).unwrap();
    for r in [1.0, 0.5, 0.25] {
        let got = energy_quantities(&field, r, &p, &cfg).unwrap();
        let want = power_law_row(1.0, 0.5, k.gamma, 1.0, r, &p, &fractions);
        assert!(rel(got.A_m1, want.A_m1) <= 1e-2, "A_m1 {} vs {}", got.A_m1, want.A_m1);
        assert!(rel(got.D_m, want.D_m) <= 1e-2, "D_m {} vs {}", got.D_m, want.D_m);
        assert!(got.E_m.is_infinite() && want.E_m.is_infinite());
        let (cf, _) = closed_form_m_power_law(1.0, 0.5, k.gamma, k.s, k.l, 0.9, r).unwrap();
        assert!(rel(got.M_kappa_m0, cf) <= 1e-2);
    }
}

#[test]
fn unit_m0_reduces_to_plain_norm() {
    let field = ProfileSpec::SteadyShear { amplitude: 1.1, wavenumber: 1.5 };
    let (mk, mkm0) = m_quantity(&field, 0.7, 2.8, 2.8, 1.0, &fast()).unwrap();
    assert_eq!(mk, mkm0);
}

#[test]
fn type1_sup_follows_ladder() {
    let field = ProfileSpec::Swirl(SimilarityProfile::new(RadialLaw::Gaussian { amplitude: 1.0, width: 0.5 }));
    let radii = [1.0, 0.125, 0.5, 0.25];
    let rep = quantity_report(&field, &radii, &params(), &fast()).unwrap();
    let mut run: f64 = 0.0;
    let mut last = 0.0;
    for row in &rep.rows {
        assert!(row.r > last);
        last = row.r;
        run = run.max(row.A.max(row.E).max(row.C));
        assert_eq!(row.type1_sup, run);
    }
}

#[test]
fn richardson_three_levels() {
    // plain Gauss on the innermost dyadic cell: error ~ h^{e+1} with h = 2^{-levels}
    let k = construct_appendix1(0.9_f64, 0.5, None).unwrap();
    let field = ProfileSpec::power_law(1.0, 0.5, k.gamma);
    let p = params();
    let at = |levels: usize| {
        let cfg = QuadratureConfig {
            radial_levels: levels,
            time_levels: levels,
            exact_power_weights: false,
            ..Default::default()
        };
        raw_integrals(&field, 1.0, &p, &cfg, Breakpoints::default()).unwrap()
    };
    let (a, b, c) = (at(8), at(16), at(32));
    for (name, x, y, z) in [
        ("speed_sq", a.speed_sq, b.speed_sq, c.speed_sq),
        ("speed_cubed", a.speed_cubed, b.speed_cubed, c.speed_cubed),
        ("pressure", a.pressure, b.pressure, c.pressure),
    ] {
        let (d1, d2) = ((y - x).abs(), (z - y).abs());
        assert!(d2 <= 0.5 * d1 + 1e-12 * z.abs(), "{name}: {d1} then {d2}");
    }
}

fn nested_pairs_nondecreasing(r0: f64, amp: f64, width: f64) -> Result<(), TestCaseError> {
    let field = ProfileSpec::Swirl(
        SimilarityProfile::new(RadialLaw::Gaussian { amplitude: amp, width }).with_pressure_scale(0.7),
    );
    let p = params();
    let cfg = fast();
    // each larger cylinder carries the smaller one as a breakpoint, so the meshes nest
    for (lo, hi) in [(r0, 1.5 * r0), (1.5 * r0, 2.25 * r0)] {
        let b = lo / hi;
        let nested = Breakpoints { radial: Some(b), time: Some(b * b) };
        let w = [
            raw_integrals(&field, lo, &p, &cfg, Breakpoints::default()).unwrap(),
            raw_integrals(&field, hi, &p, &cfg, nested).unwrap(),
        ];
        prop_assert!(w[1].sup_speed_sq >= w[0].sup_speed_sq);
        prop_assert!(w[1].grad_sq >= w[0].grad_sq);
        prop_assert!(w[1].speed_cubed >= w[0].speed_cubed);
        prop_assert!(w[1].pressure >= w[0].pressure);
        prop_assert!(w[1].speed_sq >= w[0].speed_sq);
        prop_assert!(w[1].mixed >= w[0].mixed);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn plain_integrals_nondecreasing(r0 in 0.1f64..0.5, amp in 0.2f64..2.0, width in 0.3f64..2.0) {
        nested_pairs_nondecreasing(r0, amp, width)?;
    }
}

#[test]
fn saturated_gaussian_stays_monotone() {
    // the mass gained past r ~ 0.7 is far below the error of the outer Gauss cell
    nested_pairs_nondecreasing(0.46387451928304935, 0.2, 0.3).unwrap();
}

#[test]
fn report_exports() {
    let dir = tempfile::tempdir().unwrap();
    let field = ProfileSpec::ConstantVector { c: [1.0, 0.0, 0.0] };
    let rep = quantity_report(&field, &[0.5, 1.0], &params(), &fast()).unwrap();
    let csv_path = dir.path().join("q.csv");
    rep.write_csv(&csv_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 3);
    let js = rep.to_json();
    assert!(js["quadrature"]["radial_levels"].is_number());
    assert!(js["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("|v|^3")));
}
