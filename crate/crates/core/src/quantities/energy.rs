use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{frobenius_sq, norm_sq, ProfileSpec, Vec3};

/// Smooth nonnegative test functions, effectively supported in a box of ±6 widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// exp(-|x - c|²/w² - (t - t_c)²/w_t²)
    GaussianBump { center: Vec3, width: f64, t_center: f64, t_width: f64 },
    /// inner · e^{rate·t}
    Weighted { inner: Box<TestFunction>, rate: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Jet {
    val: f64,
    dt: f64,
    grad: Vec3,
    lap: f64,
}

const SUPPORT_WIDTHS: f64 = 6.0;

impl TestFunction {
    fn jet(&self, x: &Vec3, t: f64) -> Jet {
        match self {
            TestFunction::GaussianBump { center, width, t_center, t_width } => {
                let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
                let w2 = width * width;
                let r2 = norm_sq(&d);
                let dt = t - t_center;
                let val = (-r2 / w2 - dt * dt / (t_width * t_width)).exp();
                Jet {
                    val,
                    dt: -2.0 * dt / (t_width * t_width) * val,
                    grad: [-2.0 * d[0] / w2 * val, -2.0 * d[1] / w2 * val, -2.0 * d[2] / w2 * val],
                    lap: (4.0 * r2 / (w2 * w2) - 6.0 / w2) * val,
                }
            }
            TestFunction::Weighted { inner, rate } => {
                let j = inner.jet(x, t);
                let e = (rate * t).exp();
                Jet {
                    val: j.val * e,
                    dt: (j.dt + rate * j.val) * e,
                    grad: [j.grad[0] * e, j.grad[1] * e, j.grad[2] * e],
                    lap: j.lap * e,
                }
            }
        }
    }

    /// (centre, half-width, t_lo, t_hi) of the effective support.
    fn support(&self) -> (Vec3, f64, f64, f64) {
        match self {
            TestFunction::GaussianBump { center, width, t_center, t_width } => (
                *center,
                SUPPORT_WIDTHS * width,
                t_center - SUPPORT_WIDTHS * t_width,
                t_center + SUPPORT_WIDTHS * t_width,
            ),
            TestFunction::Weighted { inner, .. } => inner.support(),
        }
    }

    pub fn value(&self, x: &Vec3, t: f64) -> f64 {
        self.jet(x, t).val
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum LocalEnergyVariant {
    /// Navier–Stokes form with dissipation and |v|²Δφ.
    StandardNs,
    /// ∫φ|u|²(τ0) = ∫∫ |u|²∂_sφ + u·∇φ(|u|² + 2p), the energy balance of a smooth Euler flow.
    EulerLimit,
    /// Similarity-variable form with weight e^{-τ m1/(1+α)} on φ.
    SelfSimilar { alpha: f64, m1: f64 },
    /// Same after φ = ψ e^{τ m1/(1+α)}, in terms of ψ.
    SelfSimilarPsi { alpha: f64, m1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalEnergyResult {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs
    pub residual: f64,
}

fn support_error(e: Error) -> Error {
    match e {
        Error::SingularPoint(m) => Error::Support(format!("test function support meets the singular locus: {m}")),
        other => other,
    }
}

/// Both sides of a local energy balance by tensor Gauss–Legendre quadrature with
/// `nodes` points per axis over the test function's support, truncated at τ0.
pub fn local_energy_residual(
    profile: &ProfileSpec,
    phi: &TestFunction,
    tau0: f64,
    variant: LocalEnergyVariant,
    nodes: usize,
) -> Result<LocalEnergyResult> {
    let g = GaussLegendre::new(nodes).map_err(|e| Error::Quadrature(format!("{e:?}")))?;
    let (c, half, t_lo, _) = phi.support();
    if let Some(se) = profile.singular_exponents() {
        let reaches_origin = c.iter().all(|ci| ci.abs() <= half);
        if reaches_origin || (tau0 >= 0.0 && se.temporal != 0.0) {
            return Err(Error::Support("test function support meets the singular locus".into()));
        }
    }
    let map = |a: f64, b: f64| -> Vec<(f64, f64)> {
        g.as_node_weight_pairs()
            .iter()
            .map(|&(z, w)| (0.5 * (a + b) + 0.5 * (b - a) * z, 0.5 * (b - a) * w))
            .collect()
    };
    let axes: Vec<Vec<(f64, f64)>> = (0..3).map(|d| map(c[d] - half, c[d] + half)).collect();

    let slice = |t: f64, f: &(dyn Fn(&Vec3, f64, &Jet) -> Result<f64> + Sync)| -> Result<f64> {
        let mut total = 0.0;
        for &(x0, w0) in &axes[0] {
            for &(x1, w1) in &axes[1] {
                for &(x2, w2) in &axes[2] {
                    let x = [x0, x1, x2];
                    total += w0 * w1 * w2 * f(&x, t, &phi.jet(&x, t))?;
                }
            }
        }
        Ok(total)
    };

    let lhs_density = |x: &Vec3, t: f64, j: &Jet| -> Result<f64> {
        let u2 = norm_sq(&profile.velocity(x, t)?);
        Ok(match variant {
            LocalEnergyVariant::SelfSimilar { alpha, m1 } => j.val * u2 * (-t * m1 / (1.0 + alpha)).exp(),
            _ => j.val * u2,
        })
    };
    let rhs_density = |x: &Vec3, t: f64, j: &Jet| -> Result<f64> {
        let u = profile.velocity(x, t)?;
        let p = profile.pressure(x, t)?;
        let u2 = norm_sq(&u);
        let flux = (u[0] * j.grad[0] + u[1] * j.grad[1] + u[2] * j.grad[2]) * (u2 + 2.0 * p);
        let y_grad = x[0] * j.grad[0] + x[1] * j.grad[1] + x[2] * j.grad[2];
        Ok(match variant {
            LocalEnergyVariant::StandardNs => {
                // dissipation moves to the right with a minus sign
                let grad = frobenius_sq(&profile.gradient(x, t)?);
                u2 * (j.dt + j.lap) + flux - 2.0 * j.val * grad
            }
            LocalEnergyVariant::EulerLimit => u2 * j.dt + flux,
            LocalEnergyVariant::SelfSimilar { alpha, m1 } => {
                (-t * m1 / (1.0 + alpha)).exp() * (u2 * (y_grad / (1.0 + alpha) + j.dt) + flux)
            }
            LocalEnergyVariant::SelfSimilarPsi { alpha, m1 } => {
                u2 * (y_grad / (1.0 + alpha) + j.dt + m1 / (1.0 + alpha) * j.val) + flux
            }
        })
    };

    let lhs = slice(tau0, &lhs_density).map_err(support_error)?;
    let rhs = if tau0 > t_lo {
        let times = map(t_lo, tau0);
        let parts: Vec<f64> = times
            .par_iter()
            .map(|&(t, w)| slice(t, &rhs_density).map(|v| v * w))
            .collect::<Result<_>>()
            .map_err(support_error)?;
        parts.iter().sum()
    } else {
        0.0
    };
    Ok(LocalEnergyResult { lhs, rhs, residual: lhs - rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> TestFunction {
        TestFunction::GaussianBump { center: [0.3, 0.2, -0.1], width: 0.5, t_center: -1.0, t_width: 0.3 }
    }

    #[test]
    fn zero_field_both_sides_vanish() {
        let r = local_energy_residual(&ProfileSpec::zero(), &bump(), -0.9, LocalEnergyVariant::EulerLimit, 8).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn shear_is_an_euler_identity() {
        let shear = ProfileSpec::SteadyShear { amplitude: 1.0, wavenumber: 1.0 };
        let r = local_energy_residual(&shear, &bump(), -0.9, LocalEnergyVariant::EulerLimit, 24).unwrap();
        assert!(r.lhs > 0.0);
        assert!(r.residual.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn singular_support_rejected() {
        let p = ProfileSpec::power_law(1.0, 0.5, 1.087);
        let phi = TestFunction::GaussianBump { center: [0.0; 3], width: 0.2, t_center: -1.0, t_width: 0.1 };
        let e = local_energy_residual(&p, &phi, -0.5, LocalEnergyVariant::EulerLimit, 4).unwrap_err();
        assert!(matches!(e, Error::Support(_)));
    }
}
