use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::ProfileSpec;
use crate::quadrature::{ball_integral_at, Integrand, QuadratureConfig};

/// Ladder length for the default radii b = 2^j, j = 0..=10.
pub const DEFAULT_LADDER_LEN: usize = 11;
/// Allowed excess of a fitted growth exponent over its target.
pub const SLOPE_SLACK: f64 = 0.05;

const SLAB_NODES: usize = 16;

/// How the similarity time τ is treated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Sampling {
    At { tau: f64 },
    Sup { tau0: f64, tau1: f64 },
    Integral { tau0: f64, tau1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEnvelope {
    pub exponent: f64,
    pub radii: Vec<f64>,
    /// ∫_{B(b)} f
    pub masses: Vec<f64>,
    /// b^{-e} ∫_{B(b)} f
    pub normalized: Vec<f64>,
    pub running_sup: Vec<f64>,
    /// least-squares slope of ln(normalized) against ln b; -∞ when every mass vanishes
    pub slope: f64,
    /// slope of the raw masses, slope + e
    pub raw_slope: f64,
}

pub fn default_ladder() -> Vec<f64> {
    (0..DEFAULT_LADDER_LEN).map(|j| 2f64.powi(j as i32)).collect()
}

/// Steady part and (period, depth) of a similarity profile; other kinds pass through unchanged.
fn similarity_field(p: &ProfileSpec) -> (ProfileSpec, Option<(f64, f64)>) {
    match p {
        ProfileSpec::SelfSimilar { profile, .. } => (ProfileSpec::Swirl(*profile), None),
        ProfileSpec::DiscreteSelfSimilar { s0, depth, profile, .. } => {
            (ProfileSpec::Swirl(*profile), Some((*s0, *depth)))
        }
        other => (other.clone(), None),
    }
}

/// Power of the modulation factor carried by each integrand (P is quadratic in U).
fn modulation_power(f: Integrand) -> f64 {
    match f {
        Integrand::Speed(k) => k,
        Integrand::GradientSq => 2.0,
        Integrand::Pressure(k) => 2.0 * k,
    }
}

fn slab_nodes(tau0: f64, tau1: f64) -> Result<Vec<(f64, f64)>> {
    if !(tau1 > tau0) {
        return Err(Error::Domain(format!("empty time slab ({tau0}, {tau1})")));
    }
    let g = GaussLegendre::new(SLAB_NODES).map_err(|e| Error::Quadrature(format!("{e:?}")))?;
    let (mid, half) = (0.5 * (tau0 + tau1), 0.5 * (tau1 - tau0));
    Ok(g.as_node_weight_pairs().iter().map(|&(z, w)| (mid + half * z, half * w)).collect())
}

fn mass(p: &ProfileSpec, b: f64, f: Integrand, sampling: Sampling, cfg: &QuadratureConfig) -> Result<f64> {
    let (field, modulation) = similarity_field(p);
    let factor = |tau: f64| match modulation {
        Some((s0, depth)) => {
            (1.0 + depth * (2.0 * std::f64::consts::PI * tau / s0).sin()).abs().powf(modulation_power(f))
        }
        None => 1.0,
    };
    let at = |tau: f64| -> Result<f64> {
        if modulation.is_some() {
            Ok(factor(tau) * ball_integral_at(&field, b, 0.0, f, cfg)?)
        } else {
            ball_integral_at(&field, b, tau, f, cfg)
        }
    };
    match sampling {
        Sampling::At { tau } => at(tau),
        Sampling::Sup { tau0, tau1 } => {
            slab_nodes(tau0, tau1)?.iter().try_fold(0.0_f64, |m, &(tau, _)| Ok(m.max(at(tau)?)))
        }
        Sampling::Integral { tau0, tau1 } => {
            slab_nodes(tau0, tau1)?.iter().try_fold(0.0, |s, &(tau, w)| Ok(s + w * at(tau)?))
        }
    }
}

/// Least-squares slope of ln y against ln x over the entries with y > 0.
fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    if y.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(_, v)| **v > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    match pts.len() {
        0 => f64::NEG_INFINITY,
        1 => 0.0,
        n => {
            let n = n as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            sxy / sxx
        }
    }
}

/// Masses ∫_{B(b)} f over the ladder, normalized by b^e.
pub fn growth_envelope(
    profile: &ProfileSpec,
    integrand: Integrand,
    exponent: f64,
    ladder: Option<&[f64]>,
    sampling: Sampling,
    cfg: &QuadratureConfig,
) -> Result<GrowthEnvelope> {
    let radii = ladder.map(<[f64]>::to_vec).unwrap_or_else(default_ladder);
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::Domain("ladder radii must be positive and increasing".into()));
    }
    let masses: Vec<f64> = radii.iter().map(|&b| mass(profile, b, integrand, sampling, cfg)).collect::<Result<_>>()?;
    let normalized: Vec<f64> = radii.iter().zip(&masses).map(|(b, m)| m * b.powf(-exponent)).collect();
    let running_sup = normalized
        .iter()
        .scan(f64::NEG_INFINITY, |s, &v| {
            *s = s.max(v);
            Some(*s)
        })
        .collect();
    let raw_slope = log_log_slope(&radii, &masses);
    let slope = if masses.iter().all(|m| *m == 0.0) { f64::NEG_INFINITY } else { raw_slope - exponent };
    Ok(GrowthEnvelope { exponent, radii, masses, normalized, running_sup, slope, raw_slope })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlabBound {
    pub quantity: &'static str,
    pub target: f64,
    pub fitted: f64,
    pub pass: bool,
    pub envelope: GrowthEnvelope,
}

/// Growth of the slab quantities over (0, S₀) on B(2R) against m1, m, 2m and 3(m+m1)/4.
pub fn dss_slab_bounds(
    profile: &ProfileSpec,
    s0: f64,
    ladder: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<SlabBound>> {
    let alpha = match profile {
        ProfileSpec::SelfSimilar { alpha, .. } | ProfileSpec::DiscreteSelfSimilar { alpha, .. } => *alpha,
        other => return Err(Error::Domain(format!("slab bounds need a similarity profile, got {}", other.kind()))),
    };
    if !(s0 > 0.0) {
        return Err(Error::Domain("S0 must be positive".into()));
    }
    let r_min = (2.0 * s0 / (1.0 + alpha)).exp();
    if let Some(r) = ladder.iter().find(|r| **r <= r_min) {
        return Err(Error::Precondition(format!("R = {r} must exceed e^(2 S0/(1+α)) = {r_min}")));
    }
    let m = 2.0 - alpha;
    let m1 = 2.0 * m - 1.0;
    let doubled: Vec<f64> = ladder.iter().map(|r| 2.0 * r).collect();
    let sup = Sampling::Sup { tau0: 0.0, tau1: s0 };
    let int = Sampling::Integral { tau0: 0.0, tau1: s0 };
    let specs = [
        ("sup_speed_sq", Integrand::Speed(2.0), m1, sup),
        ("grad_sq", Integrand::GradientSq, m, int),
        ("pressure_3_2", Integrand::Pressure(1.5), 2.0 * m, int),
        ("speed_cubed", Integrand::Speed(3.0), 0.75 * (m + m1), int),
    ];
    specs
        .into_iter()
        .map(|(quantity, f, target, sampling)| {
            let envelope = growth_envelope(profile, f, 0.0, Some(&doubled), sampling, cfg)?;
            let fitted = envelope.raw_slope;
            Ok(SlabBound { quantity, target, fitted, pass: fitted <= target + SLOPE_SLACK, envelope })
        })
        .collect()
}

/// G_{k+1} = G_k/2 + b for k < k_max.
pub fn decay_recursion(g0: f64, b: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut g = g0;
    out.push(g);
    for _ in 0..k_max {
        g = 0.5 * g + b;
        out.push(g);
    }
    out
}

/// c₆ = ln 2 / ln(1/θ), so that 2^{-k} = θ^{k c₆}.
pub fn power_envelope_exponent(theta: f64) -> f64 {
    std::f64::consts::LN_2 / (1.0 / theta).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{RadialLaw, SimilarityProfile};

    fn bump() -> SimilarityProfile {
        SimilarityProfile::new(RadialLaw::Bump { amplitude: 1.0, radius: 0.8 })
    }

    #[test]
    fn compact_support_is_flat() {
        let p = ProfileSpec::SelfSimilar { alpha: 1.5, profile: bump() };
        let cfg = QuadratureConfig::default();
        let env = growth_envelope(&p, Integrand::Speed(2.0), 0.3, None, Sampling::At { tau: 0.0 }, &cfg).unwrap();
        assert!(env.raw_slope.abs() < 1e-9);
        assert!((env.slope + 0.3).abs() < 1e-9);
        assert!(env.running_sup.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zero_profile_slope() {
        let p = ProfileSpec::Swirl(SimilarityProfile::new(RadialLaw::Zero));
        let env = growth_envelope(&p, Integrand::Speed(2.0), 0.0, None, Sampling::At { tau: 0.0 }, &Default::default())
            .unwrap();
        assert_eq!(env.slope, f64::NEG_INFINITY);
    }

    #[test]
    fn power_tail_growth() {
        // |U|² ~ r^{2p} gives ∫_{B(b)} ~ b^{2p+3}
        let p = ProfileSpec::Swirl(SimilarityProfile::new(RadialLaw::Power { amplitude: 1.0, exponent: -0.5 }));
        let env = growth_envelope(&p, Integrand::Speed(2.0), 0.0, None, Sampling::At { tau: 0.0 }, &Default::default())
            .unwrap();
        assert!((env.raw_slope - 2.0).abs() < 1e-9, "{}", env.raw_slope);
    }

    #[test]
    fn slab_radius_precondition() {
        let p = ProfileSpec::DiscreteSelfSimilar { alpha: 1.5, s0: 2.0, depth: 0.2, profile: bump() };
        let err = dss_slab_bounds(&p, 2.0, &[1.0, 4.0], &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn recursion_bound() {
        let g = decay_recursion(8.0, 0.25, 20);
        for (k, v) in g.iter().enumerate() {
            assert!(*v <= 8.0 * 0.5f64.powi(k as i32) + 0.5 + 1e-15);
        }
        let theta = 2.0 / 2.1;
        let c6 = power_envelope_exponent(theta);
        assert!((theta.powf(7.0 * c6) - 0.5f64.powi(7)).abs() < 1e-14);
    }
}
