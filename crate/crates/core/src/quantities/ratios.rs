use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::ProfileSpec;
use crate::quadrature::QuadratureConfig;

use super::{energy_quantities, QuantityParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEntry {
    pub relation: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs; 0 when both vanish, NaN when both are infinite.
    pub ratio: f64,
}

fn entry(relation: &'static str, lhs: f64, rhs: f64) -> Result<RatioEntry> {
    let ratio = if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        return Err(Error::InequalityStructure(format!(
            "{relation}: right side vanishes while left side is {lhs}"
        )));
    } else if lhs.is_infinite() && rhs.is_infinite() {
        f64::NAN
    } else {
        lhs / rhs
    };
    Ok(RatioEntry { relation, lhs, rhs, ratio })
}

/// Multiplicative, pressure-decay and local-energy ratios at radii r < ρ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSet {
    pub r: f64,
    pub rho: f64,
    pub multiplicative_weighted: RatioEntry,
    pub multiplicative: RatioEntry,
    pub pressure_decay: RatioEntry,
    /// Absent when Q(2r) leaves the field's domain.
    pub local_energy: Option<RatioEntry>,
}

impl RatioSet {
    pub fn entries(&self) -> Vec<&RatioEntry> {
        let mut v = vec![&self.multiplicative_weighted, &self.multiplicative, &self.pressure_decay];
        v.extend(self.local_energy.as_ref());
        v
    }
}

pub fn inequality_ratios(
    field: &ProfileSpec,
    r: f64,
    rho: f64,
    p: &QuantityParams,
    cfg: &QuadratureConfig,
) -> Result<RatioSet> {
    if !(r > 0.0 && r < rho) {
        return Err(Error::Radius(format!("need 0 < r < rho, got r={r}, rho={rho}")));
    }
    let at_r = energy_quantities(field, r, p, cfg)?;
    let at_rho = energy_quantities(field, rho, p, cfg)?;

    let prefactor = r.powf(1.5 * p.m1 + 0.5 - 2.0 * p.m_tilde);
    let weighted_rhs = prefactor
        * at_r.A_m1.powf(0.75)
        * (r.powf(p.m - p.m1) * at_r.E_m + at_r.A_m1).powf(0.75);
    let multiplicative_weighted = entry("C_mt <= A_m1^3/4 (E_m + A_m1)^3/4", at_r.C_mt, weighted_rhs)?;
    let multiplicative = entry(
        "C <= A^3/4 (E + A)^3/4",
        at_r.C,
        at_r.A.powf(0.75) * (at_r.E + at_r.A).powf(0.75),
    )?;
    let pressure_decay = entry(
        "D(r) <= (r/rho) D(rho) + (rho/r)^2 C(rho)",
        at_r.D,
        r / rho * at_rho.D + (rho / r).powi(2) * at_rho.C,
    )?;
    let fits = field.domain().map(|d| d.contains_standard(2.0 * r)).unwrap_or(true);
    let local_energy = if fits {
        let at_2r = energy_quantities(field, 2.0 * r, p, cfg)?;
        Some(entry(
            "A(r) + E(r) <= C(2r)^2/3 + C(2r) + D(2r)",
            at_r.A + at_r.E,
            at_2r.C.powf(2.0 / 3.0) + at_2r.C + at_2r.D,
        )?)
    } else {
        None
    };
    Ok(RatioSet { r, rho, multiplicative_weighted, multiplicative, pressure_decay, local_energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_ratios_vanish() {
        let p = QuantityParams::derive(2.8, 2.8, 0.9).unwrap();
        let set = inequality_ratios(&ProfileSpec::zero(), 0.25, 0.5, &p, &QuadratureConfig::graded(4)).unwrap();
        assert!(set.entries().iter().all(|e| e.ratio == 0.0));
        assert_eq!(set.entries().len(), 4);
    }

    #[test]
    fn constant_field_multiplicative_ratio_closed_form() {
        let p = QuantityParams::derive(2.8, 2.8, 0.9).unwrap();
        let f = ProfileSpec::ConstantVector { c: [1.0, 0.0, 0.0] };
        let cfg = QuadratureConfig::graded(4);
        // C/A^{3/2} = (4π/3)^{-1/2}, independent of r
        let expect = (4.0 * PI / 3.0).powf(-0.5);
        for r in [0.2, 0.4] {
            let set = inequality_ratios(&f, r, 0.8, &p, &cfg).unwrap();
            assert!((set.multiplicative.ratio - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn pressure_decay_structure_error() {
        assert!(matches!(entry("x", 1.0, 0.0), Err(Error::InequalityStructure(_))));
    }
}
