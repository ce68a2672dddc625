use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exponent_algebra::SlPair;

use super::{QuantityParams, QuantityRow, RawIntegrals};

/// ∫_{Q(r)} |v|^k for |v| = c ρ^{e_r} (-t)^{e_t}; +∞ when divergent.
pub fn power_law_cylinder_integral(c: f64, e_r: f64, e_t: f64, k: f64, r: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let (a, b) = (3.0 + k * e_r, 1.0 + k * e_t);
    if a <= 0.0 || b <= 0.0 {
        return f64::INFINITY;
    }
    c.abs().powf(k) * 4.0 * PI * r.powf(a) / a * r.powf(2.0 * b) / b
}

/// ∫_0^{r²} (∫_{B(r)} |v|^s)^{l/s} dτ for the same law.
fn mixed_integral(c: f64, e_r: f64, e_t: f64, s: f64, l: f64, r: f64) -> Result<f64> {
    let radial = 3.0 + s * e_r;
    let time = 1.0 + l * e_t;
    if radial <= 0.0 {
        return Err(Error::Divergent(format!(
            "radial integral of r^{} diverges",
            2.0 + s * e_r
        )));
    }
    if time <= 0.0 {
        return Err(Error::Divergent(format!("time integral of t^{} diverges", l * e_t)));
    }
    Ok(c.abs().powf(l) * (4.0 * PI * r.powf(radial) / radial).powf(l / s) * r.powf(2.0 * time) / time)
}

/// Separated closed form of M^{s,l}_{κ,m0}(v,R) for |v| = c(|x|^{-α}(-t)^{-(1-α)/2})^γ,
/// and its exact power of R: -κm0 + (2 - (1-α)γl) + (3 - αsγ)l/s.
pub fn closed_form_m_power_law(
    c: f64,
    alpha_p: f64,
    gamma_p: f64,
    s: f64,
    l: f64,
    m0: f64,
    r: f64,
) -> Result<(f64, f64)> {
    let kappa = SlPair::new(s, l)?.kappa();
    let e_r = -alpha_p * gamma_p;
    let e_t = -(1.0 - alpha_p) * gamma_p / 2.0;
    let value = r.powf(-kappa * m0) * mixed_integral(c, e_r, e_t, s, l, r)?;
    let exponent = -kappa * m0 + (2.0 - (1.0 - alpha_p) * gamma_p * l) + (3.0 - alpha_p * s * gamma_p) * l / s;
    Ok((value, exponent))
}

/// Closed-form row for a constant field.
pub fn constant_row(c: &[f64; 3], r: f64, p: &QuantityParams) -> QuantityRow {
    let c0 = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let ball = 4.0 * PI / 3.0 * r.powi(3);
    let raw = RawIntegrals {
        sup_speed_sq: c0 * c0 * ball,
        grad_sq: 0.0,
        speed_cubed: c0.powi(3) * ball * r * r,
        pressure: 0.0,
        speed_sq: c0 * c0 * ball * r * r,
        mixed: (c0.powf(p.s) * ball).powf(p.l / p.s) * r * r,
    };
    QuantityRow::assemble(r, &raw, p)
}

/// Closed-form row for the power-law profile; `sup_fractions` are the sampled
/// time fractions s (t = -s r²) over which A's supremum is taken.
pub fn power_law_row(
    c: f64,
    alpha_p: f64,
    gamma_p: f64,
    pressure_scale: f64,
    r: f64,
    p: &QuantityParams,
    sup_fractions: &[f64],
) -> QuantityRow {
    let e_r = -alpha_p * gamma_p;
    let e_t = -(1.0 - alpha_p) * gamma_p / 2.0;
    let ball_sq = if c == 0.0 {
        0.0
    } else if 3.0 + 2.0 * e_r <= 0.0 {
        f64::INFINITY
    } else {
        c * c * 4.0 * PI * r.powf(3.0 + 2.0 * e_r) / (3.0 + 2.0 * e_r)
    };
    let sup = sup_fractions
        .iter()
        .map(|f| ball_sq * (f * r * r).powf(2.0 * e_t))
        .fold(0.0, f64::max);
    let raw = RawIntegrals {
        sup_speed_sq: sup,
        grad_sq: if c == 0.0 { 0.0 } else { f64::INFINITY },
        speed_cubed: power_law_cylinder_integral(c, e_r, e_t, 3.0, r),
        pressure: pressure_scale.abs().powf(1.5) * power_law_cylinder_integral(c, e_r, e_t, 3.0, r),
        speed_sq: power_law_cylinder_integral(c, e_r, e_t, 2.0, r),
        mixed: mixed_integral(c, e_r, e_t, p.s, p.l, r).unwrap_or(f64::INFINITY),
    };
    QuantityRow::assemble(r, &raw, p)
}
