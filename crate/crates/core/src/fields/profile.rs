use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::scaling::{ScalingKind, ScalingSpec};

use super::{norm, norm_sq, scale3, CylinderSpec, GridField, Mat3, Vec3};

/// Power-law exponents of |v| near the singular point: |v| ~ |x|^radial (-t)^temporal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularExponents {
    pub radial: f64,
    pub temporal: f64,
}

/// Equatorial magnitude h(r) of a swirl field U(y) = h(r)/r · (-y₂, y₁, 0).
///
/// Swirl fields are divergence-free and |U| = h(r) sin θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RadialLaw {
    Zero,
    /// h = A r exp(-r²/w²).
    Gaussian { amplitude: f64, width: f64 },
    /// h = A r exp(1 - 1/(1 - (r/R)²)) for r < R, zero outside.
    Bump { amplitude: f64, radius: f64 },
    /// h = A r^p, singular at the origin for p < 1.
    Power { amplitude: f64, exponent: f64 },
    /// h = A r for r < 1 and A r^p beyond.
    CoreTail { amplitude: f64, exponent: f64 },
}

impl RadialLaw {
    /// g = h/r and its derivative g'.
    fn g_and_derivative(&self, r: f64) -> (f64, f64) {
        match *self {
            RadialLaw::Zero => (0.0, 0.0),
            RadialLaw::Gaussian { amplitude, width } => {
                let g = amplitude * (-(r * r) / (width * width)).exp();
                (g, -2.0 * r / (width * width) * g)
            }
            RadialLaw::Bump { amplitude, radius } => {
                let xi = r / radius;
                if xi >= 1.0 {
                    return (0.0, 0.0);
                }
                let d = 1.0 - xi * xi;
                let g = amplitude * (1.0 - 1.0 / d).exp();
                (g, g * (-2.0 * xi / (d * d)) / radius)
            }
            RadialLaw::Power { amplitude, exponent } => {
                let g = amplitude * r.powf(exponent - 1.0);
                (g, (exponent - 1.0) * g / r)
            }
            RadialLaw::CoreTail { amplitude, exponent } => {
                if r < 1.0 {
                    (amplitude, 0.0)
                } else {
                    let g = amplitude * r.powf(exponent - 1.0);
                    (g, (exponent - 1.0) * g / r)
                }
            }
        }
    }

    /// Power of |U| at the origin, if the law is singular (or non-smooth) there.
    pub fn origin_exponent(&self) -> Option<f64> {
        match *self {
            RadialLaw::Power { exponent, .. } => Some(exponent),
            _ => None,
        }
    }

    /// Support radius, if compact.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            RadialLaw::Zero => Some(0.0),
            RadialLaw::Bump { radius, .. } => Some(radius),
            _ => None,
        }
    }
}

/// A profile U(y, τ) with pressure P = κ_p |U|², optionally modulated periodically in τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityProfile {
    pub law: RadialLaw,
    #[serde(default)]
    pub pressure_scale: f64,
}

impl SimilarityProfile {
    pub fn new(law: RadialLaw) -> Self {
        Self { law, pressure_scale: 0.0 }
    }

    pub fn with_pressure_scale(mut self, k: f64) -> Self {
        self.pressure_scale = k;
        self
    }

    fn check(&self, y: &Vec3) -> Result<f64> {
        let r = norm(y);
        if r == 0.0 && self.law.origin_exponent().map(|p| p < 1.0).unwrap_or(false) {
            return Err(Error::SingularPoint("profile singular at y = 0".into()));
        }
        Ok(r)
    }

    pub fn velocity(&self, y: &Vec3) -> Result<Vec3> {
        let r = self.check(y)?;
        let (g, _) = self.law.g_and_derivative(r);
        Ok([-g * y[1], g * y[0], 0.0])
    }

    pub fn gradient(&self, y: &Vec3) -> Result<Mat3> {
        let r = self.check(y)?;
        if r == 0.0 {
            let (g, _) = self.law.g_and_derivative(0.0);
            return Ok([[0.0, -g, 0.0], [g, 0.0, 0.0], [0.0; 3]]);
        }
        let (g, dg) = self.law.g_and_derivative(r);
        let w = [-y[1], y[0], 0.0];
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = dg * y[j] / r * w[i];
            }
        }
        m[0][1] -= g;
        m[1][0] += g;
        Ok(m)
    }

    pub fn pressure(&self, y: &Vec3) -> Result<f64> {
        Ok(self.pressure_scale * norm_sq(&self.velocity(y)?))
    }
}

/// Candidate fields. Analytic kinds are evaluated in closed form,
/// sampled fields by multilinear interpolation.
#[derive(Debug, Clone)]
pub enum ProfileSpec {
    /// |v| = c(|x|^{-α}(-t)^{-(1-α)/2})^γ along the azimuthal unit field about the x₃-axis,
    /// with pressure κ_p|v|².
    PowerLaw {
        c: f64,
        alpha_p: f64,
        gamma_p: f64,
        pressure_scale: f64,
    },
    /// u(x,t) = (-t)^{-α/(α+1)} U(x(-t)^{-1/(α+1)}).
    SelfSimilar { alpha: f64, profile: SimilarityProfile },
    /// As above with U(y, τ) = (1 + depth·sin(2πτ/S₀)) U₀(y), τ = -ln(-t).
    DiscreteSelfSimilar {
        alpha: f64,
        s0: f64,
        depth: f64,
        profile: SimilarityProfile,
    },
    /// Time-independent swirl U(y) with pressure κ_p|U|².
    Swirl(SimilarityProfile),
    ConstantVector { c: Vec3 },
    /// v = (A sin(k x₂), 0, 0), p = 0.
    SteadyShear { amplitude: f64, wavenumber: f64 },
    /// v = M x, p = 0 (not solenoidal unless tr M = 0).
    Linear { matrix: Mat3 },
    Sampled(Arc<GridField>),
    Rescaled { inner: Box<ProfileSpec>, scaling: ScalingSpec },
}

impl ProfileSpec {
    pub fn power_law(c: f64, alpha_p: f64, gamma_p: f64) -> Self {
        ProfileSpec::PowerLaw { c, alpha_p, gamma_p, pressure_scale: 1.0 }
    }

    pub fn zero() -> Self {
        ProfileSpec::ConstantVector { c: [0.0; 3] }
    }

    /// Exponents of |v| at the singular point, for kinds that declare them.
    pub fn singular_exponents(&self) -> Option<SingularExponents> {
        match self {
            ProfileSpec::PowerLaw { alpha_p, gamma_p, .. } => Some(SingularExponents {
                radial: -alpha_p * gamma_p,
                temporal: -(1.0 - alpha_p) * gamma_p / 2.0,
            }),
            ProfileSpec::Swirl(profile) => profile
                .law
                .origin_exponent()
                .map(|radial| SingularExponents { radial, temporal: 0.0 }),
            ProfileSpec::Rescaled { inner, .. } => inner.singular_exponents(),
            _ => None,
        }
    }

    /// Bounded domain of definition, if any.
    pub fn domain(&self) -> Option<CylinderSpec> {
        match self {
            ProfileSpec::Sampled(g) => Some(g.cylinder),
            ProfileSpec::Rescaled { inner, scaling } => inner.domain().map(|c| {
                let (space, time) = scaling.coordinate_factors();
                CylinderSpec::anisotropic(c.radius, c.lam / space, c.mu / time)
            }),
            _ => None,
        }
    }

    fn power_law_direction(x: &Vec3) -> Result<(f64, Vec3)> {
        let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if rho == 0.0 {
            return Err(Error::SingularPoint(
                "azimuthal direction undefined on the x3-axis".into(),
            ));
        }
        Ok((rho, [-x[1] / rho, x[0] / rho, 0.0]))
    }

    fn power_law_magnitude(c: f64, alpha_p: f64, gamma_p: f64, x: &Vec3, t: f64) -> Result<f64> {
        let r = norm(x);
        if alpha_p > 0.0 && r == 0.0 {
            return Err(Error::SingularPoint("|x| = 0".into()));
        }
        if alpha_p < 1.0 && t >= 0.0 {
            return Err(Error::SingularPoint("t >= 0".into()));
        }
        let time = if alpha_p < 1.0 { (-t).powf(-(1.0 - alpha_p) / 2.0) } else { 1.0 };
        Ok(c * (r.powf(-alpha_p) * time).powf(gamma_p))
    }

    fn similarity_coords(alpha: f64, x: &Vec3, t: f64) -> Result<(f64, Vec3, f64)> {
        if t >= 0.0 {
            return Err(Error::SingularPoint("self-similar profile needs t < 0".into()));
        }
        let minus_t = -t;
        let stretch = minus_t.powf(-1.0 / (alpha + 1.0));
        Ok((minus_t, scale3(x, stretch), -minus_t.ln()))
    }

    fn modulation(s0: f64, depth: f64, tau: f64) -> f64 {
        1.0 + depth * (2.0 * PI * tau / s0).sin()
    }

    pub fn velocity(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        match self {
            ProfileSpec::PowerLaw { c, alpha_p, gamma_p, .. } => {
                let f = Self::power_law_magnitude(*c, *alpha_p, *gamma_p, x, t)?;
                let (_, e) = Self::power_law_direction(x)?;
                Ok(scale3(&e, f))
            }
            ProfileSpec::SelfSimilar { alpha, profile } => {
                let (minus_t, y, _) = Self::similarity_coords(*alpha, x, t)?;
                let u = profile.velocity(&y)?;
                Ok(scale3(&u, minus_t.powf(-alpha / (alpha + 1.0))))
            }
            ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth, profile } => {
                let (minus_t, y, tau) = Self::similarity_coords(*alpha, x, t)?;
                let u = profile.velocity(&y)?;
                let a = minus_t.powf(-alpha / (alpha + 1.0)) * Self::modulation(*s0, *depth, tau);
                Ok(scale3(&u, a))
            }
            ProfileSpec::Swirl(profile) => profile.velocity(x),
            ProfileSpec::ConstantVector { c } => Ok(*c),
            ProfileSpec::SteadyShear { amplitude, wavenumber } => {
                Ok([amplitude * (wavenumber * x[1]).sin(), 0.0, 0.0])
            }
            ProfileSpec::Linear { matrix } => Ok(mat_vec(matrix, x)),
            ProfileSpec::Sampled(g) => g.interpolate_velocity(x, t),
            ProfileSpec::Rescaled { inner, scaling } => {
                let (space, time) = scaling.coordinate_factors();
                let v = inner.velocity(&scale3(x, space), time * t)?;
                Ok(scale3(&v, scaling.velocity_factor()))
            }
        }
    }

    pub fn gradient(&self, x: &Vec3, t: f64) -> Result<Mat3> {
        match self {
            ProfileSpec::PowerLaw { c, alpha_p, gamma_p, .. } => {
                let f = Self::power_law_magnitude(*c, *alpha_p, *gamma_p, x, t)?;
                let (rho, e) = Self::power_law_direction(x)?;
                let r2 = norm_sq(x);
                let radial = -alpha_p * gamma_p;
                // ∂_j(w_i/ρ) with w = (-x₂, x₁, 0)
                let w = [-x[1], x[0], 0.0];
                let dw = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]];
                let rho3 = rho * rho * rho;
                let drho = [x[0], x[1], 0.0];
                let mut m = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let df = f * radial * x[j] / r2;
                        let de = dw[i][j] / rho - w[i] * drho[j] / rho3;
                        m[i][j] = df * e[i] + f * de;
                    }
                }
                Ok(m)
            }
            ProfileSpec::SelfSimilar { alpha, profile } => {
                let (minus_t, y, _) = Self::similarity_coords(*alpha, x, t)?;
                Ok(scale_mat(&profile.gradient(&y)?, 1.0 / minus_t))
            }
            ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth, profile } => {
                let (minus_t, y, tau) = Self::similarity_coords(*alpha, x, t)?;
                let a = Self::modulation(*s0, *depth, tau) / minus_t;
                Ok(scale_mat(&profile.gradient(&y)?, a))
            }
            ProfileSpec::Swirl(profile) => profile.gradient(x),
            ProfileSpec::ConstantVector { .. } => Ok([[0.0; 3]; 3]),
            ProfileSpec::SteadyShear { amplitude, wavenumber } => {
                let mut m = [[0.0; 3]; 3];
                m[0][1] = amplitude * wavenumber * (wavenumber * x[1]).cos();
                Ok(m)
            }
            ProfileSpec::Linear { matrix } => Ok(*matrix),
            ProfileSpec::Sampled(g) => g.interpolate_gradient(x, t),
            ProfileSpec::Rescaled { inner, scaling } => {
                let (space, time) = scaling.coordinate_factors();
                let m = inner.gradient(&scale3(x, space), time * t)?;
                Ok(scale_mat(&m, scaling.velocity_factor() * space))
            }
        }
    }

    pub fn pressure(&self, x: &Vec3, t: f64) -> Result<f64> {
        match self {
            ProfileSpec::PowerLaw { pressure_scale, c, alpha_p, gamma_p } => {
                let f = Self::power_law_magnitude(*c, *alpha_p, *gamma_p, x, t)?;
                Ok(pressure_scale * f * f)
            }
            ProfileSpec::SelfSimilar { alpha, profile } => {
                let (minus_t, y, _) = Self::similarity_coords(*alpha, x, t)?;
                Ok(profile.pressure(&y)? * minus_t.powf(-2.0 * alpha / (alpha + 1.0)))
            }
            ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth, profile } => {
                let (minus_t, y, tau) = Self::similarity_coords(*alpha, x, t)?;
                let m = Self::modulation(*s0, *depth, tau);
                Ok(profile.pressure(&y)? * m * m * minus_t.powf(-2.0 * alpha / (alpha + 1.0)))
            }
            ProfileSpec::Swirl(profile) => profile.pressure(x),
            ProfileSpec::ConstantVector { .. }
            | ProfileSpec::SteadyShear { .. }
            | ProfileSpec::Linear { .. } => Ok(0.0),
            ProfileSpec::Sampled(g) => g.interpolate_pressure(x, t),
            ProfileSpec::Rescaled { inner, scaling } => {
                let (space, time) = scaling.coordinate_factors();
                let p = inner.pressure(&scale3(x, space), time * t)?;
                Ok(p * scaling.pressure_factor())
            }
        }
    }

    /// Velocity and pressure together.
    pub fn evaluate(&self, x: &Vec3, t: f64) -> Result<(Vec3, f64)> {
        Ok((self.velocity(x, t)?, self.pressure(x, t)?))
    }

    /// Short kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            ProfileSpec::PowerLaw { .. } => "power_law",
            ProfileSpec::SelfSimilar { .. } => "self_similar",
            ProfileSpec::DiscreteSelfSimilar { .. } => "discrete_self_similar",
            ProfileSpec::Swirl(_) => "swirl",
            ProfileSpec::ConstantVector { .. } => "constant",
            ProfileSpec::SteadyShear { .. } => "shear",
            ProfileSpec::Linear { .. } => "linear",
            ProfileSpec::Sampled(_) => "sampled",
            ProfileSpec::Rescaled { .. } => "rescaled",
        }
    }

    /// JSON description used in report provenance.
    pub fn describe(&self) -> serde_json::Value {
        match self {
            ProfileSpec::PowerLaw { c, alpha_p, gamma_p, pressure_scale } => json!({
                "kind": "power_law", "c": c, "alpha_p": alpha_p, "gamma_p": gamma_p,
                "pressure_scale": pressure_scale, "direction": "azimuthal unit field about x3",
            }),
            ProfileSpec::SelfSimilar { alpha, profile } => json!({
                "kind": "self_similar", "alpha": alpha, "profile": profile,
            }),
            ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth, profile } => json!({
                "kind": "discrete_self_similar", "alpha": alpha, "s0": s0, "depth": depth,
                "profile": profile,
            }),
            ProfileSpec::Swirl(profile) => json!({ "kind": "swirl", "profile": profile }),
            ProfileSpec::ConstantVector { c } => json!({ "kind": "constant", "c": c }),
            ProfileSpec::SteadyShear { amplitude, wavenumber } => json!({
                "kind": "shear", "amplitude": amplitude, "wavenumber": wavenumber,
            }),
            ProfileSpec::Linear { matrix } => json!({ "kind": "linear", "matrix": matrix }),
            ProfileSpec::Sampled(g) => json!({
                "kind": "sampled", "cylinder": g.cylinder, "n": g.n, "nt": g.nt,
                "divergence_residual": g.divergence_residual,
            }),
            ProfileSpec::Rescaled { inner, scaling } => json!({
                "kind": "rescaled", "scaling": scaling, "inner": inner.describe(),
            }),
        }
    }
}

impl ScalingSpec {
    /// (spatial, temporal) factors mapping rescaled coordinates to original ones.
    pub(crate) fn coordinate_factors(&self) -> (f64, f64) {
        match self.kind {
            ScalingKind::NavierStokes => (self.lam, self.lam * self.lam),
            ScalingKind::Euler => (self.lam, self.lam.powf(self.alpha + 1.0)),
        }
    }

    pub(crate) fn velocity_factor(&self) -> f64 {
        match self.kind {
            ScalingKind::NavierStokes => self.lam,
            ScalingKind::Euler => self.lam.powf(self.alpha),
        }
    }

    pub(crate) fn pressure_factor(&self) -> f64 {
        let v = self.velocity_factor();
        v * v
    }
}

fn mat_vec(m: &Mat3, x: &Vec3) -> Vec3 {
    [
        m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
        m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
        m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
    ]
}

fn scale_mat(m: &Mat3, a: f64) -> Mat3 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|v| *v *= a);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient(p: &ProfileSpec, x: &Vec3, t: f64) -> Mat3 {
        let h = 1e-6;
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut xp = *x;
            let mut xm = *x;
            xp[j] += h;
            xm[j] -= h;
            let vp = p.velocity(&xp, t).unwrap();
            let vm = p.velocity(&xm, t).unwrap();
            for i in 0..3 {
                m[i][j] = (vp[i] - vm[i]) / (2.0 * h);
            }
        }
        m
    }

    fn assert_gradient_matches(p: &ProfileSpec, x: Vec3, t: f64) {
        let exact = p.gradient(&x, t).unwrap();
        let fd = fd_gradient(p, &x, t);
        for i in 0..3 {
            for j in 0..3 {
                let scale = 1.0 + exact[i][j].abs();
                assert!(
                    (exact[i][j] - fd[i][j]).abs() < 1e-6 * scale,
                    "{} ∂{}v{}: {} vs {}",
                    p.kind(),
                    j,
                    i,
                    exact[i][j],
                    fd[i][j]
                );
            }
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let x = [0.3, -0.4, 0.2];
        assert_gradient_matches(&ProfileSpec::power_law(1.3, 0.5, 1.087), x, -0.3);
        let gauss = SimilarityProfile::new(RadialLaw::Gaussian { amplitude: 1.5, width: 0.7 });
        assert_gradient_matches(&ProfileSpec::SelfSimilar { alpha: 1.4, profile: gauss }, x, -0.6);
        let bump = SimilarityProfile::new(RadialLaw::Bump { amplitude: 2.0, radius: 1.2 });
        assert_gradient_matches(&ProfileSpec::SelfSimilar { alpha: 1.2, profile: bump }, x, -0.8);
        assert_gradient_matches(
            &ProfileSpec::DiscreteSelfSimilar { alpha: 1.3, s0: 0.7, depth: 0.3, profile: gauss },
            x,
            -0.5,
        );
        assert_gradient_matches(&ProfileSpec::SteadyShear { amplitude: 1.0, wavenumber: 2.0 }, x, -0.1);
    }

    #[test]
    fn power_law_speed() {
        let p = ProfileSpec::power_law(2.0, 1.0, 1.1);
        let v = p.velocity(&[0.3, 0.4, 0.0], -0.7).unwrap();
        assert!((norm(&v) - 2.0 * 0.5_f64.powf(-1.1)).abs() < 1e-12);
        assert!((norm(&v) - 4.2870939).abs() < 1e-6);
    }

    #[test]
    fn singular_points_are_rejected() {
        let p = ProfileSpec::power_law(1.0, 0.5, 1.1);
        assert!(matches!(p.velocity(&[0.0; 3], -0.5), Err(Error::SingularPoint(_))));
        assert!(matches!(p.velocity(&[0.1, 0.0, 0.0], 0.0), Err(Error::SingularPoint(_))));
        let q = ProfileSpec::power_law(1.0, 0.0, 1.1);
        assert!(q.velocity(&[0.0, 0.1, 0.0], -0.1).is_ok());
    }

    #[test]
    fn self_similar_magnitude_formula() {
        let alpha = 1.5;
        let prof = SimilarityProfile::new(RadialLaw::Gaussian { amplitude: 1.0, width: 1.0 });
        let p = ProfileSpec::SelfSimilar { alpha, profile: prof };
        let (x, t) = ([0.2, 0.5, -0.1], -0.3_f64);
        let y = scale3(&x, (-t).powf(-1.0 / (alpha + 1.0)));
        let expect = (-t).powf(-alpha / (alpha + 1.0)) * norm(&prof.velocity(&y).unwrap());
        assert!((norm(&p.velocity(&x, t).unwrap()) - expect).abs() < 1e-14);
    }

    #[test]
    fn swirl_fields_are_solenoidal() {
        for law in [
            RadialLaw::Gaussian { amplitude: 1.0, width: 0.8 },
            RadialLaw::Bump { amplitude: 1.0, radius: 1.0 },
            RadialLaw::Power { amplitude: 1.0, exponent: -1.2 },
            RadialLaw::CoreTail { amplitude: 1.0, exponent: 0.3 },
        ] {
            let g = SimilarityProfile::new(law).gradient(&[0.3, 0.1, 0.5]).unwrap();
            assert!((g[0][0] + g[1][1] + g[2][2]).abs() < 1e-14);
        }
    }
}
