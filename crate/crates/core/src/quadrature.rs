//! Space-time quadrature over parabolic cylinders Q(r) = B(r) × (-r², 0).
//!
//! Radial and time meshes are dyadic toward the singular locus (ρ = 0, t = 0).
//! Each cell maps ρ^{e+1} linearly onto the Gauss–Legendre interval, so an
//! integrand behaving like ρ^e is integrated exactly when its exponent is declared.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{frobenius_sq, norm, ProfileSpec, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Dyadic radial cells between 0 and r.
    pub radial_levels: usize,
    /// Dyadic time cells between -r² and 0.
    pub time_levels: usize,
    /// Gauss–Legendre points per cell.
    pub order: usize,
    /// Gauss points in cos θ; φ uses twice as many.
    pub n_theta: usize,
    /// Use per-cell power-law weights when the profile declares its exponents.
    pub exact_power_weights: bool,
    pub tolerance: f64,
    /// Recompute with two extra points per cell and fail if the change exceeds `tolerance`.
    pub check_refinement: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_levels: 32,
            time_levels: 32,
            order: 4,
            n_theta: 8,
            exact_power_weights: true,
            tolerance: 1e-2,
            check_refinement: false,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_levels < 1 || self.time_levels < 1 || self.order < 2 || self.n_theta < 2 {
            return Err(Error::Resolution(format!(
                "quadrature needs levels >= 1, order >= 2, n_theta >= 2: {self:?}"
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Graded mesh of `n` levels in both radius and time.
    pub fn graded(n: usize) -> Self {
        Self { radial_levels: n, time_levels: n, ..Self::default() }
    }

    fn refined(&self) -> Self {
        Self { order: self.order + 2, n_theta: self.n_theta + 2, check_refinement: false, ..*self }
    }
}

/// Nodes and weights on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn gauss(order: usize) -> Result<GaussLegendre> {
    GaussLegendre::new(order).map_err(|e| Error::Quadrature(format!("{e:?}")))
}

/// Dyadic cells [2^{-(k+1)}, 2^{-k}] for k < levels - 1, plus [0, 2^{-(levels-1)}].
fn dyadic_cells(levels: usize) -> Vec<(f64, f64)> {
    let mut cells = Vec::with_capacity(levels);
    let mut hi = 1.0_f64;
    for _ in 0..levels.saturating_sub(1) {
        cells.push((hi / 2.0, hi));
        hi /= 2.0;
    }
    cells.push((0.0, hi));
    cells
}

/// Cells of the plain dyadic mesh scaled into (0, b), then dyadic cells from b up to 1.
fn cells_with_breakpoint(levels: usize, b: f64) -> Vec<(f64, f64)> {
    let mut cells: Vec<(f64, f64)> = dyadic_cells(levels).into_iter().map(|(a, c)| (a * b, c * b)).collect();
    let mut hi = 1.0_f64;
    while hi > b {
        let lo = (hi / 2.0).max(b);
        cells.push((lo, hi));
        hi = lo;
    }
    cells
}

impl Rule1D {
    /// Graded rule on [0, 1] for integrands ~ x^exponent at 0 (exponent > -1).
    ///
    /// With a breakpoint b ∈ (0, 1) the sub-rule on (0, b) is the b-scaled copy of the
    /// rule without breakpoint, so integrals over nested intervals share nodes.
    pub fn graded(levels: usize, order: usize, exponent: f64, breakpoint: Option<f64>) -> Result<Self> {
        if !(exponent > -1.0) {
            return Err(Error::Divergent(format!("integrand exponent {exponent} <= -1")));
        }
        let cells = match breakpoint {
            Some(b) if b > 0.0 && b < 1.0 => cells_with_breakpoint(levels, b),
            Some(b) if b == 1.0 => dyadic_cells(levels),
            Some(b) => return Err(Error::Geometry(format!("breakpoint {b} outside (0, 1]"))),
            None => dyadic_cells(levels),
        };
        let g = gauss(order)?;
        let big_e = exponent + 1.0;
        let mut nodes = Vec::with_capacity(cells.len() * order);
        let mut weights = Vec::with_capacity(cells.len() * order);
        for (a, b) in cells {
            let (pa, pb) = (a.powf(big_e), b.powf(big_e));
            for &(z, w) in g.as_node_weight_pairs() {
                let u = 0.5 * (z + 1.0);
                let x = (pa + u * (pb - pa)).powf(1.0 / big_e);
                // dx = (pb - pa) / E · x^{-exponent} du
                nodes.push(x);
                weights.push(0.5 * w * (pb - pa) / big_e * x.powf(-exponent));
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Product rule on the unit sphere: Gauss in cos θ, offset trapezoid in φ. Weights sum to 4π.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_theta: usize) -> Result<Self> {
        let g = gauss(n_theta)?;
        let n_phi = 2 * n_theta;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for &(z, w) in g.as_node_weight_pairs() {
            let st = (1.0 - z * z).sqrt();
            for k in 0..n_phi {
                let phi = (k as f64 + 0.5) * dphi;
                directions.push([st * phi.cos(), st * phi.sin(), z]);
                weights.push(w * dphi);
            }
        }
        Ok(Self { directions, weights })
    }
}

/// Pointwise integrands built from (v, ∇v, q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    /// |v|^k
    Speed(f64),
    /// |∇v|²
    GradientSq,
    /// |q|^k
    Pressure(f64),
}

impl Integrand {
    fn eval(&self, p: &ProfileSpec, x: &Vec3, t: f64) -> Result<f64> {
        let out = match *self {
            Integrand::Speed(k) => norm(&p.velocity(x, t)?).powf(k),
            Integrand::GradientSq => frobenius_sq(&p.gradient(x, t)?),
            Integrand::Pressure(k) => p.pressure(x, t)?.abs().powf(k),
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::NonFinite(format!("integrand {self:?} at x={x:?}, t={t}")))
        }
    }

    /// (radial, temporal) power of the integrand at the singular point, when declared.
    fn exponents(&self, p: &ProfileSpec) -> Option<(f64, f64)> {
        let se = p.singular_exponents()?;
        match *self {
            Integrand::Speed(k) => Some((k * se.radial, k * se.temporal)),
            Integrand::GradientSq => Some((2.0 * (se.radial - 1.0), 2.0 * se.temporal)),
            Integrand::Pressure(k) => Some((2.0 * k * se.radial, 2.0 * k * se.temporal)),
        }
    }

    /// False when the integral is known to diverge regardless of exponents.
    fn structurally_finite(&self, p: &ProfileSpec) -> bool {
        // the azimuthal direction field makes |∇v|² ~ 1/(distance to axis)² on every sphere
        !(matches!(self, Integrand::GradientSq) && is_power_law(p))
    }
}

fn is_power_law(p: &ProfileSpec) -> bool {
    match p {
        ProfileSpec::PowerLaw { c, .. } => *c != 0.0,
        ProfileSpec::Rescaled { inner, .. } => is_power_law(inner),
        _ => false,
    }
}

/// Breakpoints (as fractions of r and r²) used to nest a sub-cylinder inside Q(r).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Breakpoints {
    pub radial: Option<f64>,
    pub time: Option<f64>,
}

struct Rules {
    radial: Rule1D,
    time: Rule1D,
    sphere: SphereRule,
}

fn build_rules(
    p: &ProfileSpec,
    integrand: Integrand,
    outer_power: f64,
    cfg: &QuadratureConfig,
    bp: Breakpoints,
) -> Result<Option<Rules>> {
    cfg.validate()?;
    if !integrand.structurally_finite(p) {
        return Ok(None);
    }
    let (er, et) = match (cfg.exact_power_weights, integrand.exponents(p)) {
        (true, Some(e)) => e,
        (false, Some((er, et))) => {
            if er + 2.0 <= -1.0 || outer_power * et <= -1.0 {
                return Ok(None);
            }
            (0.0, 0.0)
        }
        (_, None) => (0.0, 0.0),
    };
    if er + 2.0 <= -1.0 || outer_power * et <= -1.0 {
        return Ok(None);
    }
    Ok(Some(Rules {
        radial: Rule1D::graded(cfg.radial_levels, cfg.order, er + 2.0, bp.radial)?,
        time: Rule1D::graded(cfg.time_levels, cfg.order, outer_power * et, bp.time)?,
        sphere: SphereRule::new(cfg.n_theta)?,
    }))
}

fn ball_integral(p: &ProfileSpec, r: f64, t: f64, f: Integrand, rules: &Rules) -> Result<f64> {
    let mut total = 0.0;
    for (rho, wr) in rules.radial.nodes.iter().zip(&rules.radial.weights) {
        let rad = rho * r;
        let mut shell = 0.0;
        for (d, wa) in rules.sphere.directions.iter().zip(&rules.sphere.weights) {
            shell += wa * f.eval(p, &[rad * d[0], rad * d[1], rad * d[2]], t)?;
        }
        total += wr * rho * rho * shell;
    }
    // ∫ f ρ² dρ dω with ρ = r·x
    Ok(total * r * r * r)
}

fn check_radius(p: &ProfileSpec, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Radius(format!("radius must be positive, got {r}")));
    }
    if let Some(dom) = p.domain() {
        if !dom.contains_standard(r) {
            return Err(Error::Radius(format!(
                "Q({r}) exceeds the field's cylinder (spatial {}, depth {})",
                dom.spatial_radius(),
                dom.time_depth()
            )));
        }
    }
    Ok(())
}

fn refine<F>(cfg: &QuadratureConfig, f: F) -> Result<f64>
where
    F: Fn(&QuadratureConfig) -> Result<f64>,
{
    let v = f(cfg)?;
    if cfg.check_refinement && v.is_finite() {
        let w = f(&cfg.refined())?;
        let scale = v.abs().max(w.abs());
        if scale > 0.0 && (v - w).abs() > cfg.tolerance * scale {
            return Err(Error::Quadrature(format!(
                "refinement changed the value from {v} to {w} (tolerance {})",
                cfg.tolerance
            )));
        }
    }
    Ok(v)
}

/// ∫_{-r²}^0 (∫_{B(r)} f dx)^{outer_power} dt; +∞ when the declared exponents diverge.
pub fn cylinder_integral(
    p: &ProfileSpec,
    r: f64,
    f: Integrand,
    outer_power: f64,
    cfg: &QuadratureConfig,
    bp: Breakpoints,
) -> Result<f64> {
    check_radius(p, r)?;
    refine(cfg, |cfg| {
        let Some(rules) = build_rules(p, f, outer_power, cfg, bp)? else {
            return Ok(f64::INFINITY);
        };
        let slices: Vec<f64> = rules
            .time
            .nodes
            .par_iter()
            .map(|s| ball_integral(p, r, -s * r * r, f, &rules))
            .collect::<Result<_>>()?;
        let sum: f64 = slices
            .iter()
            .zip(&rules.time.weights)
            .map(|(v, w)| w * v.powf(outer_power))
            .sum();
        Ok(sum * r * r)
    })
}

/// max over time nodes t ∈ (-r², 0) of ∫_{B(r)} f(·, t).
pub fn time_sup(p: &ProfileSpec, r: f64, f: Integrand, cfg: &QuadratureConfig, bp: Breakpoints) -> Result<f64> {
    check_radius(p, r)?;
    refine(cfg, |cfg| {
        // sample times come from the plain graded mesh so that every profile shares them
        let Some(mut rules) = build_rules(p, f, 0.0, cfg, bp)? else {
            return Ok(f64::INFINITY);
        };
        rules.time = Rule1D::graded(cfg.time_levels, cfg.order, 0.0, bp.time)?;
        let slices: Vec<f64> = rules
            .time
            .nodes
            .par_iter()
            .map(|s| ball_integral(p, r, -s * r * r, f, &rules))
            .collect::<Result<_>>()?;
        Ok(slices.into_iter().fold(0.0, f64::max))
    })
}

/// ∫_{B(r)} f(·, t) dx at a single time; +∞ when the declared exponents diverge.
pub fn ball_integral_at(p: &ProfileSpec, r: f64, t: f64, f: Integrand, cfg: &QuadratureConfig) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Radius(format!("radius must be positive, got {r}")));
    }
    refine(cfg, |cfg| {
        let Some(rules) = build_rules(p, f, 0.0, cfg, Breakpoints::default())? else {
            return Ok(f64::INFINITY);
        };
        ball_integral(p, r, t, f, &rules)
    })
}

/// Time fractions s (t = -s r²) at which `time_sup` samples.
pub fn sup_sample_fractions(cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    Ok(Rule1D::graded(cfg.time_levels, cfg.order, 0.0, None)?.nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_weights_are_exact() {
        for e in [-0.9, -0.5, 0.0, 0.7, 2.0] {
            let rule = Rule1D::graded(6, 3, e, None).unwrap();
            let val = rule.integrate(|x| x.powf(e));
            assert!((val - 1.0 / (e + 1.0)).abs() < 1e-13, "e={e}: {val}");
        }
    }

    #[test]
    fn breakpoint_nests_scaled_rule() {
        let plain = Rule1D::graded(5, 3, 0.5, None).unwrap();
        let split = Rule1D::graded(5, 3, 0.5, Some(0.3)).unwrap();
        for i in 0..plain.len() {
            assert!((split.nodes[i] - 0.3 * plain.nodes[i]).abs() < 1e-15);
        }
        let total = split.integrate(|x| x.sqrt());
        assert!((total - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn divergent_exponent_rejected() {
        assert!(matches!(Rule1D::graded(4, 3, -1.0, None), Err(Error::Divergent(_))));
    }

    #[test]
    fn sphere_weights_sum_to_area() {
        let s = SphereRule::new(6).unwrap();
        let area: f64 = s.weights.iter().sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let z2: f64 = s.directions.iter().zip(&s.weights).map(|(d, w)| w * d[2] * d[2]).sum();
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_field_volume() {
        let p = ProfileSpec::ConstantVector { c: [1.0, 2.0, 2.0] };
        let cfg = QuadratureConfig::graded(8);
        let v = cylinder_integral(&p, 0.5, Integrand::Speed(2.0), 1.0, &cfg, Breakpoints::default()).unwrap();
        let exact = 9.0 * 4.0 * PI / 3.0 * 0.125 * 0.25;
        assert!((v - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn power_law_gradient_is_infinite() {
        let p = ProfileSpec::power_law(1.0, 0.5, 1.087);
        let v = cylinder_integral(&p, 1.0, Integrand::GradientSq, 1.0, &QuadratureConfig::graded(4), Breakpoints::default())
            .unwrap();
        assert!(v.is_infinite());
    }
}
