use proptest::prelude::*;
use typeii_core::fields::{sample, CylinderSpec, ProfileSpec, RadialLaw, SimilarityProfile};

fn profile() -> SimilarityProfile {
    SimilarityProfile::new(RadialLaw::Gaussian { amplitude: 1.3, width: 0.9 }).with_pressure_scale(0.5)
}

fn close(a: &[f64; 3], b: &[f64; 3], tol: f64) -> bool {
    let scale = 1.0 + b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn scaled_eval(p: &ProfileSpec, alpha: f64, lam: f64, x: [f64; 3], t: f64) -> ([f64; 3], f64) {
    let (v, q) = p.evaluate(&[lam * x[0], lam * x[1], lam * x[2]], lam.powf(alpha + 1.0) * t).unwrap();
    let f = lam.powf(alpha);
    ([f * v[0], f * v[1], f * v[2]], f * f * q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn self_similarity(x in prop::array::uniform3(-2.0f64..2.0), t in -2.0f64..-0.01, alpha in 1.01f64..1.9) {
        let p = ProfileSpec::SelfSimilar { alpha, profile: profile() };
        let (v, q) = p.evaluate(&x, t).unwrap();
        for lam in [0.5, 2.0, 10.0] {
            let (w, r) = scaled_eval(&p, alpha, lam, x, t);
            prop_assert!(close(&w, &v, 1e-10), "lam={} {:?} vs {:?}", lam, w, v);
            prop_assert!((r - q).abs() <= 1e-10 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn discrete_self_similarity(x in prop::array::uniform3(-2.0f64..2.0), t in -2.0f64..-0.01, s0 in 0.3f64..3.0) {
        let alpha = 1.3;
        let p = ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth: 0.4, profile: profile() };
        let (v, _) = p.evaluate(&x, t).unwrap();
        let lam = (s0 / (alpha + 1.0)).exp();
        for k in [1.0, 2.0, -1.0] {
            let (w, _) = scaled_eval(&p, alpha, lam.powf(k), x, t);
            prop_assert!(close(&w, &v, 1e-10));
        }
    }
}

#[test]
fn discrete_identity_fails_off_the_period() {
    let (alpha, s0) = (1.3, 1.0);
    let p = ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth: 0.4, profile: profile() };
    let (x, t) = ([0.3, -0.4, 0.2], -0.7);
    let (v, _) = p.evaluate(&x, t).unwrap();
    let lam = (0.5 * s0 / (alpha + 1.0)).exp();
    let (w, _) = scaled_eval(&p, alpha, lam, x, t);
    assert!(!close(&w, &v, 1e-6));
}

#[test]
fn sampled_nodes_match_analytic() {
    let p = ProfileSpec::SteadyShear { amplitude: 0.7, wavenumber: 2.0 };
    let cyl = CylinderSpec::standard(1.0);
    let g = sample(&p, cyl, 6, 3).unwrap();
    assert_eq!(g.node_count(), 3 * 6 * 6 * 6);
    for (idx, v) in g.velocities().iter().enumerate() {
        let (x, t) = g.node_position(idx);
        assert!(close(v, &p.velocity(&x, t).unwrap(), 1e-15));
        assert!(close(&g.interpolate_velocity(&x, t).unwrap(), v, 1e-13));
    }
}
