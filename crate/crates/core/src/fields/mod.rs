//! Candidate velocity/pressure fields and parabolic-cylinder geometry.

mod grid;
mod profile;

pub use grid::{divergence_residual, sample, GridField};
pub use profile::{ProfileSpec, RadialLaw, SimilarityProfile, SingularExponents};

use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];
/// `m[i][j] = ∂_j v_i`.
pub type Mat3 = [[f64; 3]; 3];

pub(crate) fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn norm_sq(v: &Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

pub(crate) fn frobenius_sq(m: &Mat3) -> f64 {
    m.iter().flatten().map(|x| x * x).sum()
}

pub(crate) fn scale3(v: &Vec3, a: f64) -> Vec3 {
    [v[0] * a, v[1] * a, v[2] * a]
}

/// Q^{λ,μ}(R) = {(y, τ) : |y| < λR, -μR² < τ < 0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub radius: f64,
    #[serde(default = "one")]
    pub lam: f64,
    #[serde(default = "one")]
    pub mu: f64,
}

fn one() -> f64 {
    1.0
}

impl CylinderSpec {
    /// The standard cylinder Q(R).
    pub fn standard(radius: f64) -> Self {
        Self { radius, lam: 1.0, mu: 1.0 }
    }

    pub fn anisotropic(radius: f64, lam: f64, mu: f64) -> Self {
        Self { radius, lam, mu }
    }

    /// Spatial radius λR.
    pub fn spatial_radius(&self) -> f64 {
        self.lam * self.radius
    }

    /// Temporal depth μR².
    pub fn time_depth(&self) -> f64 {
        self.mu * self.radius * self.radius
    }

    /// Whether Q(r) ⊂ self.
    pub fn contains_standard(&self, r: f64) -> bool {
        let slack = 1.0 + 1e-12;
        r <= self.spatial_radius() * slack && r * r <= self.time_depth() * slack
    }

    pub fn contains_point(&self, x: &Vec3, t: f64) -> bool {
        norm(x) < self.spatial_radius() && t > -self.time_depth() && t < 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_geometry() {
        let q = CylinderSpec::anisotropic(2.0, 0.5, 0.25);
        assert_eq!(q.spatial_radius(), 1.0);
        assert_eq!(q.time_depth(), 1.0);
        assert!(q.contains_standard(1.0));
        assert!(!q.contains_standard(1.1));
        assert!(CylinderSpec::standard(1.0).contains_point(&[0.5, 0.0, 0.0], -0.5));
        assert!(!CylinderSpec::standard(1.0).contains_point(&[0.5, 0.0, 0.0], 0.0));
    }
}
