//! Scaled energy quantities over parabolic cylinders, closed forms for the
//! analytic profiles, inequality-ratio diagnostics and local energy balances.

mod closed_form;
mod energy;
mod ratios;

pub use closed_form::{
    closed_form_m_power_law, constant_row, power_law_cylinder_integral, power_law_row,
};
pub use energy::{local_energy_residual, LocalEnergyResult, LocalEnergyVariant, TestFunction};
pub use ratios::{inequality_ratios, RatioEntry, RatioSet};

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exponent_algebra::{self, ExponentParams};
use crate::fields::ProfileSpec;
use crate::quadrature::{cylinder_integral, time_sup, Breakpoints, Integrand, QuadratureConfig};

/// Weights and (s, l, m0) entering the weighted quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantityParams {
    pub m: f64,
    pub m1: f64,
    /// Weight of C_m̃ (any m̃ ≥ m; defaults to m).
    pub m_tilde: f64,
    /// Weight of A_n, E_n, H_n, C̃_n, D̃_n (defaults to m).
    pub n: f64,
    pub s: f64,
    pub l: f64,
    pub m0: f64,
    pub kappa: f64,
}

impl QuantityParams {
    pub fn from_exponents(p: &ExponentParams<f64>) -> Self {
        Self {
            m: p.m,
            m1: p.m1,
            m_tilde: p.m,
            n: p.m,
            s: p.sl.s,
            l: p.sl.l,
            m0: p.m0,
            kappa: p.kappa,
        }
    }

    pub fn derive(s: f64, l: f64, m0: f64) -> Result<Self> {
        Ok(Self::from_exponents(&exponent_algebra::derive(s, l, m0)?))
    }

    /// Explicit weights with κ from (s, l).
    pub fn with_weights(m: f64, m1: f64, s: f64, l: f64, m0: f64) -> Result<Self> {
        let sl = exponent_algebra::SlPair::new(s, l)?;
        Ok(Self { m, m1, m_tilde: m, n: m, s, l, m0, kappa: sl.kappa() })
    }
}

/// Unweighted integrals over Q(r) from which every quantity is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawIntegrals {
    /// max over time samples of ∫_{B(r)} |v|².
    pub sup_speed_sq: f64,
    pub grad_sq: f64,
    pub speed_cubed: f64,
    /// ∫_{Q(r)} |q|^{3/2}.
    pub pressure: f64,
    pub speed_sq: f64,
    /// ∫ (∫_{B(r)} |v|^s)^{l/s} dt.
    pub mixed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct QuantityRow {
    pub r: f64,
    pub A: f64,
    pub E: f64,
    pub C: f64,
    pub D: f64,
    pub H_n: f64,
    pub A_m1: f64,
    pub E_m: f64,
    pub D_m: f64,
    pub C_mt: f64,
    pub A_n: f64,
    pub E_n: f64,
    pub C_tilde_n: f64,
    pub D_tilde_n: f64,
    pub M_kappa: f64,
    pub M_kappa_m0: f64,
    pub calE: f64,
    /// Running max of {A, E, C} over the ladder up to this radius.
    pub type1_sup: f64,
}

impl QuantityRow {
    pub fn assemble(r: f64, raw: &RawIntegrals, p: &QuantityParams) -> Self {
        let w = |e: f64| r.powf(-e);
        let a = raw.sup_speed_sq / r;
        let e = raw.grad_sq / r;
        let c = raw.speed_cubed / (r * r);
        let d = raw.pressure / (r * r);
        let d_n = raw.pressure * w(2.0 * p.n);
        let m_kappa = raw.mixed * w(p.kappa);
        Self {
            r,
            A: a,
            E: e,
            C: c,
            D: d,
            H_n: raw.speed_sq * w(p.n + 2.0),
            A_m1: raw.sup_speed_sq * w(p.m1),
            E_m: raw.grad_sq * w(p.m),
            D_m: raw.pressure * w(2.0 * p.m),
            C_mt: raw.speed_cubed * w(2.0 * p.m_tilde),
            A_n: raw.sup_speed_sq * w(p.n),
            E_n: raw.grad_sq * w(p.n),
            C_tilde_n: raw.speed_cubed * w(p.n + 1.0),
            D_tilde_n: r.powf(p.n - 1.0) * d_n,
            M_kappa: m_kappa,
            M_kappa_m0: r.powf((1.0 - p.m0) * p.kappa) * m_kappa,
            calE: e + a + d,
            type1_sup: a.max(e).max(c),
        }
    }

    /// Values in the exported column order.
    pub fn csv_values(&self) -> [f64; 13] {
        [
            self.r, self.A, self.E, self.C, self.D, self.H_n, self.A_m1, self.E_m, self.D_m,
            self.C_mt, self.M_kappa, self.M_kappa_m0, self.calE,
        ]
    }

    pub fn all_nonnegative(&self) -> bool {
        self.csv_values().iter().all(|v| *v >= 0.0) && self.type1_sup >= 0.0
    }
}

pub const CSV_COLUMNS: [&str; 13] = [
    "r", "A", "E", "C", "D", "H", "A_m1", "E_m", "D_m", "C_mt", "M_kappa", "M_kappa_m0", "calE",
];

/// Every raw integral over Q(r) by quadrature.
pub fn raw_integrals(
    field: &ProfileSpec,
    r: f64,
    p: &QuantityParams,
    cfg: &QuadratureConfig,
    bp: Breakpoints,
) -> Result<RawIntegrals> {
    let cyl = |f: Integrand, outer: f64| cylinder_integral(field, r, f, outer, cfg, bp);
    Ok(RawIntegrals {
        sup_speed_sq: time_sup(field, r, Integrand::Speed(2.0), cfg, bp)?,
        grad_sq: cyl(Integrand::GradientSq, 1.0)?,
        speed_cubed: cyl(Integrand::Speed(3.0), 1.0)?,
        pressure: cyl(Integrand::Pressure(1.5), 1.0)?,
        speed_sq: cyl(Integrand::Speed(2.0), 1.0)?,
        mixed: cyl(Integrand::Speed(p.s), p.l / p.s)?,
    })
}

/// One report row at radius r (type1_sup covers this radius only).
pub fn energy_quantities(
    field: &ProfileSpec,
    r: f64,
    p: &QuantityParams,
    cfg: &QuadratureConfig,
) -> Result<QuantityRow> {
    let raw = raw_integrals(field, r, p, cfg, Breakpoints::default())?;
    Ok(QuantityRow::assemble(r, &raw, p))
}

/// (M^{s,l}_κ(v,R), M^{s,l}_{κ,m0}(v,R)).
pub fn m_quantity(
    field: &ProfileSpec,
    r: f64,
    s: f64,
    l: f64,
    m0: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let kappa = exponent_algebra::SlPair::new(s, l)?.kappa();
    if !(m0 > 0.0 && m0 <= 1.0) {
        return Err(Error::Domain(format!("m0 must lie in (0, 1], got {m0}")));
    }
    let raw = cylinder_integral(field, r, Integrand::Speed(s), l / s, cfg, Breakpoints::default())?;
    let mk = raw * r.powf(-kappa);
    Ok((mk, r.powf((1.0 - m0) * kappa) * mk))
}

/// Quantity ladder with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct QuantityReport {
    pub rows: Vec<QuantityRow>,
    pub params: QuantityParams,
    pub quadrature: QuadratureConfig,
    pub profile: serde_json::Value,
    pub notes: Vec<&'static str>,
}

pub const REPORT_NOTES: [&str; 3] = [
    "C(v,r) = r^-2 * integral of |v|^3 over Q(r)",
    "sup over t is the max over time samples of the graded time mesh",
    "infinite entries mark integrals divergent for the declared singular exponents",
];

/// Rows sorted by increasing radius; `type1_sup` is the running max from the smallest radius up.
pub fn finalize_ladder(mut rows: Vec<QuantityRow>) -> Vec<QuantityRow> {
    rows.sort_by(|a, b| a.r.total_cmp(&b.r));
    let mut run: f64 = 0.0;
    for row in rows.iter_mut() {
        run = run.max(row.type1_sup);
        row.type1_sup = run;
    }
    rows
}

pub fn quantity_report(
    field: &ProfileSpec,
    radii: &[f64],
    p: &QuantityParams,
    cfg: &QuadratureConfig,
) -> Result<QuantityReport> {
    let rows: Vec<QuantityRow> = radii
        .par_iter()
        .map(|&r| energy_quantities(field, r, p, cfg))
        .collect::<Result<_>>()?;
    Ok(QuantityReport {
        rows: finalize_ladder(rows),
        params: *p,
        quadrature: *cfg,
        profile: field.describe(),
        notes: REPORT_NOTES.to_vec(),
    })
}

impl QuantityReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.csv_values().iter().map(|v| format_number(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rows": self.rows.iter().map(row_json).collect::<Vec<_>>(),
            "params": self.params,
            "quadrature": self.quadrature,
            "profile": self.profile,
            "notes": self.notes,
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, &self.to_json())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// JSON for a row; non-finite values become strings ("inf") instead of null.
pub fn row_json(row: &QuantityRow) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    let raw = [
        ("r", row.r), ("A", row.A), ("E", row.E), ("C", row.C), ("D", row.D), ("H_n", row.H_n),
        ("A_m1", row.A_m1), ("E_m", row.E_m), ("D_m", row.D_m), ("C_mt", row.C_mt),
        ("A_n", row.A_n), ("E_n", row.E_n), ("C_tilde_n", row.C_tilde_n),
        ("D_tilde_n", row.D_tilde_n), ("M_kappa", row.M_kappa), ("M_kappa_m0", row.M_kappa_m0),
        ("calE", row.calE), ("type1_sup", row.type1_sup),
    ];
    for (k, x) in raw {
        out.insert(k.to_string(), json_number(x));
    }
    serde_json::Value::Object(out)
}

pub fn json_number(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_number(x))
    }
}

/// Shortest round-trip decimal, with inf/-inf/nan spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> QuantityParams {
        QuantityParams::derive(2.8, 2.8, 0.9).unwrap()
    }

    #[test]
    fn constant_field_matches_closed_form() {
        let c = [0.6, -0.8, 0.0];
        let field = ProfileSpec::ConstantVector { c };
        let p = params();
        let cfg = QuadratureConfig::graded(12);
        for r in [1.0, 0.5, 0.25] {
            let row = energy_quantities(&field, r, &p, &cfg).unwrap();
            let exact = constant_row(&c, r, &p);
            for (a, b) in row.csv_values().iter().zip(exact.csv_values()) {
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-300), "{a} vs {b}");
            }
            assert!((row.A - (4.0 * PI / 3.0) * r * r).abs() < 1e-12);
            assert_eq!(row.E, 0.0);
            assert_eq!(row.D, 0.0);
        }
    }

    #[test]
    fn zero_sampled_field_is_zero() {
        let g = crate::fields::sample(&ProfileSpec::zero(), crate::fields::CylinderSpec::standard(1.0), 4, 2).unwrap();
        let row = energy_quantities(&ProfileSpec::Sampled(std::sync::Arc::new(g)), 0.5, &params(), &QuadratureConfig::graded(4))
            .unwrap();
        assert!(row.csv_values()[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn m0_one_returns_m_kappa() {
        let field = ProfileSpec::SteadyShear { amplitude: 1.0, wavenumber: 2.0 };
        let (mk, mkm0) = m_quantity(&field, 0.7, 3.0, 2.5, 1.0, &QuadratureConfig::graded(6)).unwrap();
        assert_eq!(mk, mkm0);
    }

    #[test]
    fn radius_outside_grid_rejected() {
        let g = crate::fields::sample(&ProfileSpec::zero(), crate::fields::CylinderSpec::standard(0.5), 4, 2).unwrap();
        let e = energy_quantities(&ProfileSpec::Sampled(std::sync::Arc::new(g)), 0.8, &params(), &QuadratureConfig::graded(4))
            .unwrap_err();
        assert!(matches!(e, Error::Radius(_)));
    }

    #[test]
    fn ladder_running_sup() {
        let field = ProfileSpec::ConstantVector { c: [1.0, 0.0, 0.0] };
        let rep = quantity_report(&field, &[1.0, 0.25, 0.5], &params(), &QuadratureConfig::graded(4)).unwrap();
        let radii: Vec<f64> = rep.rows.iter().map(|r| r.r).collect();
        assert_eq!(radii, vec![0.25, 0.5, 1.0]);
        assert!(rep.rows.windows(2).all(|w| w[0].type1_sup <= w[1].type1_sup));
    }
}
