//! Navier–Stokes and Euler scaling groups and machine checks of the
//! invariance and monotonicity laws they imply.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ProfileSpec;
use crate::quadrature::{Breakpoints, QuadratureConfig};
use crate::quantities::{raw_integrals, QuantityParams, QuantityRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingKind {
    /// v^λ(y,s) = λ v(λy, λ²s), q^λ = λ² q.
    NavierStokes,
    /// v^{λ,α}(y,τ) = λ^α v(λy, λ^{α+1}τ), q^{λ,α} = λ^{2α} q.
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub kind: ScalingKind,
    pub lam: f64,
    #[serde(default)]
    pub alpha: f64,
}

impl ScalingSpec {
    pub fn new(kind: ScalingKind, lam: f64, alpha: f64) -> Result<Self> {
        if !(lam > 0.0 && lam.is_finite()) {
            return Err(Error::Domain(format!("λ must be positive, got {lam}")));
        }
        if kind == ScalingKind::Euler && !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("Euler exponent must exceed -1, got {alpha}")));
        }
        Ok(Self { kind, lam, alpha })
    }

    pub fn navier_stokes(lam: f64) -> Result<Self> {
        Self::new(ScalingKind::NavierStokes, lam, 0.0)
    }

    pub fn euler(lam: f64, alpha: f64) -> Result<Self> {
        Self::new(ScalingKind::Euler, lam, alpha)
    }

    /// Set when an Euler spec has α ≤ 1, outside the range where the inequality chain applies.
    pub fn weak_alpha_warning(&self) -> bool {
        self.kind == ScalingKind::Euler && self.alpha <= 1.0
    }

    /// Time-depth factor μ of the image cylinder Q^{λ,μ}: μ = λ^{α-1} (Euler), 1 (NS).
    pub fn time_base(&self) -> f64 {
        match self.kind {
            ScalingKind::NavierStokes => 1.0,
            ScalingKind::Euler => self.lam.powf(self.alpha - 1.0),
        }
    }

    fn compatible(&self, other: &ScalingSpec) -> bool {
        self.kind == other.kind
            && (self.kind == ScalingKind::NavierStokes || self.alpha == other.alpha)
    }
}

/// Applies a scaling to a profile, simplifying to a closed form where the kind allows.
pub fn rescale(profile: &ProfileSpec, spec: ScalingSpec) -> ProfileSpec {
    let lam = spec.lam;
    let vf = spec.velocity_factor();
    match profile {
        ProfileSpec::ConstantVector { c } => ProfileSpec::ConstantVector {
            c: [c[0] * vf, c[1] * vf, c[2] * vf],
        },
        ProfileSpec::PowerLaw { c, alpha_p, gamma_p, pressure_scale } => {
            let (space, time) = spec.coordinate_factors();
            // |v(λx, t')| picks up λ^{-α_p γ} (t'/t)^{-(1-α_p)γ/2}
            let inner = space.powf(-alpha_p * gamma_p) * time.powf(-(1.0 - alpha_p) * gamma_p / 2.0);
            ProfileSpec::PowerLaw {
                c: c * vf * inner,
                alpha_p: *alpha_p,
                gamma_p: *gamma_p,
                pressure_scale: *pressure_scale,
            }
        }
        ProfileSpec::SteadyShear { amplitude, wavenumber } => ProfileSpec::SteadyShear {
            amplitude: amplitude * vf,
            wavenumber: wavenumber * lam,
        },
        ProfileSpec::Linear { matrix } => {
            let mut m = *matrix;
            m.iter_mut().flatten().for_each(|v| *v *= vf * lam);
            ProfileSpec::Linear { matrix: m }
        }
        ProfileSpec::SelfSimilar { alpha, .. }
            if spec.kind == ScalingKind::Euler && *alpha == spec.alpha =>
        {
            profile.clone()
        }
        ProfileSpec::Rescaled { inner, scaling } if scaling.compatible(&spec) => {
            let composed = ScalingSpec { lam: scaling.lam * lam, ..*scaling };
            if composed.lam == 1.0 {
                (**inner).clone()
            } else {
                ProfileSpec::Rescaled { inner: inner.clone(), scaling: composed }
            }
        }
        _ => ProfileSpec::Rescaled { inner: Box::new(profile.clone()), scaling: spec },
    }
}

/// λ_k = r_k^{2/(α+1)}, so that λ_k^{(α+1)/2} = r_k.
pub fn lambda_for_rk(r_k: f64, alpha: f64) -> Result<f64> {
    if !(r_k > 0.0 && r_k < 1.0) {
        return Err(Error::Domain(format!("r_k must lie in (0, 1), got {r_k}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!("α must be at least 1, got {alpha}")));
    }
    let lam = r_k.powf(2.0 / (alpha + 1.0));
    let back = lam.powf((alpha + 1.0) / 2.0);
    if (back - r_k).abs() > 1e-14 * r_k.max(1e-300) * 10.0 {
        return Err(Error::NonFinite(format!("λ_k certificate failed: {back} vs {r_k}")));
    }
    Ok(lam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Equality,
    /// lhs <= rhs
    AtMost,
    /// lhs >= rhs
    AtLeast,
}

/// One checked relation. For equalities `slack` is the relative difference
/// (rhs - lhs)/max(|lhs|, |rhs|); for inequalities it is the signed margin
/// normalised by max(1, |rhs|), positive when the inequality holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceRow {
    pub relation: String,
    pub kind: RelationKind,
    pub a: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl InvarianceRow {
    pub fn new(relation: impl Into<String>, kind: RelationKind, a: f64, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = match kind {
            RelationKind::Equality => {
                if lhs == rhs {
                    0.0
                } else {
                    (rhs - lhs) / lhs.abs().max(rhs.abs())
                }
            }
            RelationKind::AtMost => margin(rhs, lhs),
            RelationKind::AtLeast => margin(lhs, rhs),
        };
        let pass = match kind {
            RelationKind::Equality => slack.abs() <= tolerance,
            _ => slack >= -tolerance,
        };
        Self { relation: relation.into(), kind, a, lhs, rhs, slack, tolerance, pass }
    }
}

/// (big - small)/max(1, |big|), with infinities compared exactly.
fn margin(big: f64, small: f64) -> f64 {
    if big == small {
        0.0
    } else if big.is_infinite() || small.is_infinite() {
        if big > small { f64::INFINITY } else { f64::NEG_INFINITY }
    } else {
        (big - small) / big.abs().max(1.0)
    }
}

pub const INVARIANCE_COLUMNS: [&str; 7] = ["relation", "a", "lhs", "rhs", "slack", "tolerance", "pass"];

/// Exponents of λ in the Euler-scaled A_{m1}, D_m and E_m prefactors; each must be ≥ 0.
pub fn euler_prefactor_exponents(alpha: f64, m: f64, m1: f64) -> [(&'static str, f64); 3] {
    [
        ("-3+2alpha+m1", -3.0 + 2.0 * alpha + m1),
        ("-4+2alpha+2m", -4.0 + 2.0 * alpha + 2.0 * m),
        ("-2+alpha+m", -2.0 + alpha + m),
    ]
}

fn check_geometry(p: &ProfileSpec, r: f64, what: &str) -> Result<()> {
    if let Some(d) = p.domain() {
        if !d.contains_standard(r) {
            return Err(Error::Geometry(format!(
                "{what}: Q({r}) not contained in the field's cylinder (spatial {}, depth {})",
                d.spatial_radius(),
                d.time_depth()
            )));
        }
    }
    Ok(())
}

fn row_at(
    p: &ProfileSpec,
    r: f64,
    params: &QuantityParams,
    cfg: &QuadratureConfig,
    bp: Breakpoints,
) -> Result<QuantityRow> {
    Ok(QuantityRow::assemble(r, &raw_integrals(p, r, params, cfg, bp)?, params))
}

/// Machine check of the scaling laws at each radius a of the ladder.
///
/// Navier–Stokes: A, E, C, D and M_κ of v^λ at a equal those of v at λa.
/// Euler (λ ≤ 1): A_{m1}, E_m, D_m of v^{λ,α} at a are bounded by those of v at λa,
/// and M_{κ,m0}(v^{λ,α}, 1) ≥ M_{κ,m0}(v, λ^{(α+1)/2}).
/// The right-hand meshes carry breakpoints so that the left-hand cylinder's nodes are
/// a subset of theirs after the change of variables.
pub fn invariance_report(
    profile: &ProfileSpec,
    spec: ScalingSpec,
    params: &QuantityParams,
    radii: &[f64],
    cfg: &QuadratureConfig,
    tolerance: f64,
) -> Result<Vec<InvarianceRow>> {
    let scaled = rescale(profile, spec);
    let lam = spec.lam;
    let mut rows = Vec::new();
    match spec.kind {
        ScalingKind::NavierStokes => {
            for &a in radii {
                check_geometry(profile, lam * a, "original field")?;
                check_geometry(&scaled, a, "rescaled field")?;
                let l = row_at(&scaled, a, params, cfg, Breakpoints::default())?;
                let r = row_at(profile, lam * a, params, cfg, Breakpoints::default())?;
                for (name, x, y) in [
                    ("A(v^lam,a) = A(v,lam*a)", l.A, r.A),
                    ("E(v^lam,a) = E(v,lam*a)", l.E, r.E),
                    ("C(v^lam,a) = C(v,lam*a)", l.C, r.C),
                    ("D(q^lam,a) = D(q,lam*a)", l.D, r.D),
                    ("M_kappa(v^lam,a) = M_kappa(v,lam*a)", l.M_kappa, r.M_kappa),
                ] {
                    rows.push(InvarianceRow::new(name, RelationKind::Equality, a, x, y, tolerance));
                }
            }
        }
        ScalingKind::Euler => {
            if !(lam <= 1.0) {
                return Err(Error::Precondition(format!("Euler chain needs λ <= 1, got {lam}")));
            }
            for (name, e) in euler_prefactor_exponents(spec.alpha, params.m, params.m1) {
                rows.push(InvarianceRow::new(
                    format!("exponent {name} >= 0"),
                    RelationKind::AtLeast,
                    0.0,
                    e,
                    0.0,
                    tolerance,
                ));
            }
            let mu = spec.time_base();
            for &a in radii {
                check_geometry(profile, lam * a, "original field")?;
                check_geometry(&scaled, a, "Euler-rescaled field")?;
                let l = row_at(&scaled, a, params, cfg, Breakpoints::default())?;
                let bp = Breakpoints { radial: None, time: Some(mu) };
                let r = row_at(profile, lam * a, params, cfg, bp)?;
                for (name, x, y) in [
                    ("A_m1(v^lam,a) <= A_m1(v,lam*a)", l.A_m1, r.A_m1),
                    ("E_m(v^lam,a) <= E_m(v,lam*a)", l.E_m, r.E_m),
                    ("D_m(q^lam,a) <= D_m(q,lam*a)", l.D_m, r.D_m),
                ] {
                    rows.push(InvarianceRow::new(name, RelationKind::AtMost, a, x, y, tolerance));
                }
            }
            let r_k = lam.powf((spec.alpha + 1.0) / 2.0);
            check_geometry(profile, r_k, "original field")?;
            check_geometry(&scaled, 1.0, "Euler-rescaled field")?;
            let inner = Breakpoints { radial: Some((r_k / lam).min(1.0)), time: None };
            let l = row_at(&scaled, 1.0, params, cfg, inner)?;
            let r = row_at(profile, r_k, params, cfg, Breakpoints::default())?;
            rows.push(InvarianceRow::new(
                "M_kappa_m0(v^lam,1) >= M_kappa_m0(v,r_k)",
                RelationKind::AtLeast,
                r_k,
                l.M_kappa_m0,
                r.M_kappa_m0,
                tolerance,
            ));
        }
    }
    Ok(rows)
}

/// Writes an invariance table with the standard columns.
pub fn write_invariance_csv(rows: &[InvarianceRow], path: &std::path::Path) -> Result<()> {
    use crate::quantities::format_number;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(INVARIANCE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.relation.clone(),
            format_number(r.a),
            format_number(r.lhs),
            format_number(r.rhs),
            format_number(r.slack),
            format_number(r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{RadialLaw, SimilarityProfile};

    #[test]
    fn identity_scaling_has_zero_slack() {
        let p = ProfileSpec::SteadyShear { amplitude: 1.0, wavenumber: 2.0 };
        let params = QuantityParams::derive(2.8, 2.8, 0.9).unwrap();
        let cfg = QuadratureConfig::graded(6);
        for spec in [ScalingSpec::navier_stokes(1.0).unwrap(), ScalingSpec::euler(1.0, params.m.mul_add(-1.0, 2.0)).unwrap()] {
            let rows = invariance_report(&p, spec, &params, &[0.5, 1.0], &cfg, 1e-9).unwrap();
            for r in rows.iter().filter(|r| !r.relation.starts_with("exponent")) {
                assert_eq!(r.slack, 0.0, "{r:?}");
            }
        }
    }

    #[test]
    fn constant_field_ns_example() {
        let c = [0.0, 3.0, 4.0];
        let p = ProfileSpec::ConstantVector { c };
        let params = QuantityParams::derive(2.8, 2.8, 0.9).unwrap();
        let rows = invariance_report(&p, ScalingSpec::navier_stokes(0.5).unwrap(), &params, &[1.0], &QuadratureConfig::graded(4), 1e-9)
            .unwrap();
        let a = rows.iter().find(|r| r.relation.starts_with("A(")).unwrap();
        let expect = 0.25 * 25.0 * 4.0 * std::f64::consts::PI / 3.0;
        assert!((a.lhs - expect).abs() < 1e-12 * expect);
        assert!(rows.iter().all(|r| r.pass));
    }

    #[test]
    fn sampled_geometry_error() {
        let g = crate::fields::sample(&ProfileSpec::zero(), crate::fields::CylinderSpec::standard(0.5), 4, 2).unwrap();
        let p = ProfileSpec::Sampled(std::sync::Arc::new(g));
        let params = QuantityParams::derive(2.8, 2.8, 0.9).unwrap();
        let e = invariance_report(&p, ScalingSpec::euler(0.9, 1.2).unwrap(), &params, &[1.0], &QuadratureConfig::graded(4), 1e-9)
            .unwrap_err();
        assert!(matches!(e, Error::Geometry(_)));
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_for_rk(0.25, 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((lambda_for_rk(0.3, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((lambda_for_rk(0.1, 1.0788530).unwrap() - 0.1091267).abs() < 1e-7);
        assert!(lambda_for_rk(1.0, 2.0).is_err());
        assert!(lambda_for_rk(0.5, 0.5).is_err());
    }

    #[test]
    fn closed_form_rescalings() {
        let ns = ScalingSpec::navier_stokes(0.5).unwrap();
        match rescale(&ProfileSpec::ConstantVector { c: [2.0, 0.0, -1.0] }, ns) {
            ProfileSpec::ConstantVector { c } => assert_eq!(c, [1.0, 0.0, -0.5]),
            _ => panic!(),
        }
        match rescale(&ProfileSpec::power_law(1.0, 0.5, 1.087), ns) {
            ProfileSpec::PowerLaw { c, .. } => assert!((c - 0.5_f64.powf(1.0 - 1.087)).abs() < 1e-14),
            _ => panic!(),
        }
        match rescale(&ProfileSpec::power_law(1.0, 0.5, 1.0), ns) {
            ProfileSpec::PowerLaw { c, .. } => assert!((c - 1.0).abs() < 1e-15),
            _ => panic!(),
        }
    }

    #[test]
    fn rescaled_closed_forms_match_wrapper() {
        let x = [0.2, -0.3, 0.45];
        let t = -0.37;
        for spec in [ScalingSpec::navier_stokes(0.6).unwrap(), ScalingSpec::euler(0.6, 1.3).unwrap()] {
            for p in [
                ProfileSpec::power_law(1.2, 0.5, 1.087),
                ProfileSpec::SteadyShear { amplitude: 1.5, wavenumber: 2.0 },
                ProfileSpec::ConstantVector { c: [1.0, 2.0, 3.0] },
            ] {
                let closed = rescale(&p, spec);
                let wrapped = ProfileSpec::Rescaled { inner: Box::new(p.clone()), scaling: spec };
                let a = closed.velocity(&x, t).unwrap();
                let b = wrapped.velocity(&x, t).unwrap();
                for d in 0..3 {
                    assert!((a[d] - b[d]).abs() < 1e-12 * (1.0 + b[d].abs()));
                }
                let ga = closed.gradient(&x, t).unwrap();
                let gb = wrapped.gradient(&x, t).unwrap();
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((ga[i][j] - gb[i][j]).abs() < 1e-11 * (1.0 + gb[i][j].abs()));
                    }
                }
                let pa = closed.pressure(&x, t).unwrap();
                let pb = wrapped.pressure(&x, t).unwrap();
                assert!((pa - pb).abs() < 1e-12 * (1.0 + pb.abs()));
            }
        }
    }

    #[test]
    fn self_similar_fixed_by_matching_euler_scaling() {
        let prof = SimilarityProfile::new(RadialLaw::Gaussian { amplitude: 1.0, width: 1.0 });
        let p = ProfileSpec::SelfSimilar { alpha: 1.4, profile: prof };
        let spec = ScalingSpec::euler(3.0, 1.4).unwrap();
        let wrapped = ProfileSpec::Rescaled { inner: Box::new(p.clone()), scaling: spec };
        let x = [0.3, 0.1, -0.2];
        let a = p.velocity(&x, -0.4).unwrap();
        let b = wrapped.velocity(&x, -0.4).unwrap();
        for d in 0..3 {
            assert!((a[d] - b[d]).abs() < 1e-10);
        }
        assert!(matches!(rescale(&p, spec), ProfileSpec::SelfSimilar { .. }));
    }

    #[test]
    fn composition_multiplies_lambda() {
        let p = ProfileSpec::Sampled(std::sync::Arc::new(
            crate::fields::sample(
                &ProfileSpec::SteadyShear { amplitude: 1.0, wavenumber: 1.0 },
                crate::fields::CylinderSpec::standard(2.0),
                6,
                3,
            )
            .unwrap(),
        ));
        let a = rescale(&rescale(&p, ScalingSpec::euler(0.5, 1.2).unwrap()), ScalingSpec::euler(0.8, 1.2).unwrap());
        let b = rescale(&p, ScalingSpec::euler(0.4, 1.2).unwrap());
        let x = [0.1, 0.2, 0.3];
        let (va, vb) = (a.velocity(&x, -0.5).unwrap(), b.velocity(&x, -0.5).unwrap());
        for d in 0..3 {
            assert!((va[d] - vb[d]).abs() < 1e-12);
        }
    }
}
