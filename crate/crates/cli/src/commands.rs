use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::BigRational;
use serde_json::{json, Value};
use typeii_core::asymptotics::{
    derive_iteration_params, dss_slab_bounds, growth_envelope, iterate_bound, liouville_verdict, GrowthEnvelope,
    ProfileKind, Sampling,
};
use typeii_core::exponent_algebra::{
    construct_appendix1, construct_appendix1_edge, derive, holder_splits, kappa_weighted, Appendix1Construction,
    ExponentParams, SplitEntry,
};
use typeii_core::fields::{sample, CylinderSpec, GridField, ProfileSpec, RadialLaw, SimilarityProfile};
use typeii_core::quadrature::{Integrand, QuadratureConfig};
use typeii_core::quantities::{format_number, json_number, quantity_report, QuantityParams};
use typeii_core::scalar::parse_decimal_rational;
use typeii_core::scaling::{
    invariance_report, lambda_for_rk, write_invariance_csv, InvarianceRow, ScalingSpec,
};
use typeii_core::Scalar;

use crate::config::{Config, ConfigError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            other => Err(ConfigError(format!("`output.format`: expected csv, json or both, got `{other}`"))),
        }
    }

    fn csv(self) -> bool {
        self != Format::Json
    }

    fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Debug)]
pub enum AppError {
    Config(ConfigError),
    Core(typeii_core::Error),
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(e) => write!(f, "config error: {e}"),
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e)
    }
}

impl From<typeii_core::Error> for AppError {
    fn from(e: typeii_core::Error) -> Self {
        AppError::Core(e)
    }
}

pub type AppResult<T> = Result<T, AppError>;

/// Summary lines and the tolerance checks that failed.
#[derive(Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub unmet: Vec<String>,
}

pub struct Ctx {
    pub cfg: Config,
    pub format: Format,
    pub tolerance: Option<f64>,
}

impl Ctx {
    fn scaling_tolerance(&self) -> AppResult<f64> {
        match self.tolerance {
            Some(t) => Ok(t),
            None => Ok(self.cfg.positive("scaling.tolerance")?),
        }
    }

    fn provenance(&self, quadrature: Option<&QuadratureConfig>, tolerance: Option<f64>) -> Value {
        json!({
            "tool": "typeii",
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.cfg.effective(),
            "quadrature": quadrature,
            "tolerance": tolerance,
        })
    }
}

fn io<E: std::fmt::Display>(path: &Path) -> impl FnOnce(E) -> AppError + '_ {
    move |e| AppError::Io(format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &Value) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io(path))?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> AppResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(io(path))?;
    w.write_record(header).map_err(io(path))?;
    for r in rows {
        w.write_record(r).map_err(io(path))?;
    }
    w.flush().map_err(io(path))
}

fn ensure_dir(dir: &Path) -> AppResult<()> {
    fs::create_dir_all(dir).map_err(io(dir))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn exact_string(x: &BigRational) -> String {
    x.to_string()
}

pub fn quadrature_config(cfg: &Config) -> AppResult<QuadratureConfig> {
    let q = QuadratureConfig {
        radial_levels: cfg.require("quadrature.radial_levels")?,
        time_levels: cfg.require("quadrature.time_levels")?,
        order: cfg.require("quadrature.order")?,
        n_theta: cfg.require("quadrature.n_theta")?,
        exact_power_weights: cfg.require("quadrature.exact_power_weights")?,
        tolerance: cfg.positive("quadrature.tolerance")?,
        check_refinement: cfg.require("quadrature.check_refinement")?,
    };
    q.validate()?;
    Ok(q)
}

fn radial_law(cfg: &Config, prefix: &str) -> AppResult<RadialLaw> {
    let key = |k: &str| format!("{prefix}.{k}");
    let amplitude: f64 = cfg.require(&key("amplitude"))?;
    let law: String = cfg.require(&key("law"))?;
    Ok(match law.as_str() {
        "zero" => RadialLaw::Zero,
        "gaussian" => RadialLaw::Gaussian { amplitude, width: cfg.positive(&key("width"))? },
        "bump" => RadialLaw::Bump { amplitude, radius: cfg.positive(&key("radius"))? },
        "power" => RadialLaw::Power { amplitude, exponent: cfg.require(&key("exponent"))? },
        "core_tail" => RadialLaw::CoreTail { amplitude, exponent: cfg.require(&key("exponent"))? },
        other => return Err(ConfigError(format!("`{}`: unknown radial law `{other}`", key("law"))).into()),
    })
}

fn construction_f64(cfg: &Config) -> AppResult<Appendix1Construction<f64>> {
    let m0: f64 = cfg.require("construct.m0")?;
    let alpha: f64 = cfg.require("construct.alpha")?;
    let delta: Option<f64> = cfg.get("construct.delta")?;
    Ok(if alpha == 0.0 || alpha == 1.0 {
        construct_appendix1_edge(m0, alpha, cfg.require("construct.delta1")?, cfg.require("construct.delta2")?)?
    } else {
        construct_appendix1(m0, alpha, delta)?
    })
}

fn rational(cfg: &Config, key: &str) -> AppResult<Option<BigRational>> {
    match cfg.raw(key) {
        None => Ok(None),
        Some(v) => parse_decimal_rational(v)
            .map(Some)
            .ok_or_else(|| ConfigError(format!("`{key}`: cannot parse `{v}` as a decimal")).into()),
    }
}

fn construction_exact(cfg: &Config) -> AppResult<Appendix1Construction<BigRational>> {
    let need = |k: &str| -> AppResult<BigRational> {
        rational(cfg, k)?.ok_or_else(|| ConfigError(format!("missing required field `{k}`")).into())
    };
    let m0 = need("construct.m0")?;
    let alpha = need("construct.alpha")?;
    Ok(if alpha == BigRational::int(0) || alpha == BigRational::int(1) {
        construct_appendix1_edge(m0, alpha, need("construct.delta1")?, need("construct.delta2")?)?
    } else {
        construct_appendix1(m0, alpha, rational(cfg, "construct.delta")?)?
    })
}

/// The configured profile, optionally sampled onto a grid.
pub fn build_profile(cfg: &Config) -> AppResult<ProfileSpec> {
    let kind: String = cfg.require("profile.kind")?;
    let swirl = || -> AppResult<SimilarityProfile> {
        Ok(SimilarityProfile::new(radial_law(cfg, "profile")?).with_pressure_scale(cfg.require("profile.pressure_scale")?))
    };
    let p = match kind.as_str() {
        "appendix1" => {
            let k = construction_f64(cfg)?;
            ProfileSpec::PowerLaw {
                c: cfg.require("profile.c")?,
                alpha_p: k.alpha,
                gamma_p: k.gamma,
                pressure_scale: cfg.require("profile.pressure_scale")?,
            }
        }
        "power_law" => ProfileSpec::PowerLaw {
            c: cfg.require("profile.c")?,
            alpha_p: cfg.require("profile.alpha_p")?,
            gamma_p: cfg.require("profile.gamma_p")?,
            pressure_scale: cfg.require("profile.pressure_scale")?,
        },
        "constant" => {
            let v = cfg.require_list("profile.vector")?;
            if v.len() != 3 {
                return Err(ConfigError("`profile.vector` needs three components".into()).into());
            }
            ProfileSpec::ConstantVector { c: [v[0], v[1], v[2]] }
        }
        "shear" => ProfileSpec::SteadyShear {
            amplitude: cfg.require("profile.amplitude")?,
            wavenumber: cfg.require("profile.wavenumber")?,
        },
        "swirl" => ProfileSpec::Swirl(swirl()?),
        "self_similar" => ProfileSpec::SelfSimilar { alpha: cfg.require("profile.alpha")?, profile: swirl()? },
        "dss" => ProfileSpec::DiscreteSelfSimilar {
            alpha: cfg.require("profile.alpha")?,
            s0: cfg.positive("profile.s0")?,
            depth: cfg.require("profile.depth")?,
            profile: swirl()?,
        },
        "grid" => {
            let dir: String = cfg.require("profile.path")?;
            let stem: String = cfg.require("profile.stem")?;
            let dir = PathBuf::from(dir);
            if !dir.is_dir() {
                return Err(ConfigError(format!("`profile.path`: no directory {}", dir.display())).into());
            }
            ProfileSpec::Sampled(Arc::new(GridField::import(&dir, &stem)?))
        }
        other => return Err(ConfigError(format!("`profile.kind`: unknown kind `{other}`")).into()),
    };
    let n: usize = cfg.require("grid.n")?;
    if n == 0 || kind == "grid" {
        return Ok(p);
    }
    let cyl = CylinderSpec::standard(cfg.positive("grid.radius")?);
    Ok(ProfileSpec::Sampled(Arc::new(sample(&p, cyl, n, cfg.require("grid.nt")?)?)))
}

/// Exponents entering M and the weights: the construction's for `appendix1`, else `exponents.*`.
fn exponent_inputs(cfg: &Config) -> AppResult<(ExponentParams<f64>, &'static str)> {
    let kind: String = cfg.require("profile.kind")?;
    if kind == "appendix1" {
        let k = construction_f64(cfg)?;
        return Ok((derive(k.s, k.l, k.m0)?, "construction"));
    }
    let p = derive(cfg.require("exponents.s")?, cfg.require("exponents.l")?, cfg.require("exponents.m0")?)?;
    Ok((p, "exponents"))
}

fn quantity_params(cfg: &Config) -> AppResult<(QuantityParams, ExponentParams<f64>, &'static str)> {
    let (ex, source) = exponent_inputs(cfg)?;
    let mut q = QuantityParams::from_exponents(&ex);
    if let Some(m) = cfg.get("weights.m")? {
        q.m = m;
        q.m_tilde = m;
        q.n = m;
    }
    if let Some(m1) = cfg.get("weights.m1")? {
        q.m1 = m1;
    }
    if let Some(mt) = cfg.get("weights.m_tilde")? {
        q.m_tilde = mt;
    }
    if let Some(n) = cfg.get("weights.n")? {
        q.n = n;
    }
    Ok((q, ex, source))
}

fn ladder(cfg: &Config) -> AppResult<Vec<f64>> {
    let radii = cfg.require_list("ladder.radii")?;
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(ConfigError("`ladder.radii` must be positive".into()).into());
    }
    Ok(radii)
}

pub fn exponents(ctx: &Ctx, dir: &Path) -> AppResult<Outcome> {
    let cfg = &ctx.cfg;
    let (s, l, m0): (f64, f64, f64) =
        (cfg.require("exponents.s")?, cfg.require("exponents.l")?, cfg.require("exponents.m0")?);
    let p = derive(s, l, m0)?;
    let sm = p.summary();
    let exact = match (rational(cfg, "exponents.s")?, rational(cfg, "exponents.l")?, rational(cfg, "exponents.m0")?) {
        (Some(s), Some(l), Some(m0)) => {
            let e = derive(s, l, m0)?;
            json!({
                "kappa": exact_string(&e.kappa),
                "q_interp": exact_string(&e.q_interp),
                "alpha": exact_string(&e.alpha),
                "m": exact_string(&e.m),
                "m1": exact_string(&e.m1),
                "gamma_profile": exact_string(&e.gamma_profile),
            })
        }
        _ => Value::Null,
    };
    let splits: Vec<Value> = holder_splits(s, l)?
        .iter()
        .map(|e| match e {
            SplitEntry::Applicable(h) => json!({
                "case": h.case.tag(),
                "lambda": h.lambda, "mu": h.mu, "gamma": h.gamma,
                "q": h.q, "q_dual": h.q_dual,
                "identities": h.identities.iter().map(|(n, r)| json!({"identity": n, "residual": r})).collect::<Vec<_>>(),
                "flags": h.flags.iter().map(|(n, b)| json!({"flag": n, "holds": b})).collect::<Vec<_>>(),
                "max_residual": h.max_residual(),
            }),
            SplitEntry::NotApplicable { case, reason } => json!({"case": case.tag(), "not_applicable": reason}),
        })
        .collect();
    let kw = kappa_weighted(s, l, p.m)?;
    ensure_dir(dir)?;
    if ctx.format.csv() {
        let header = [
            "s", "l", "m0", "kappa", "q_interp", "alpha", "m", "m1", "gamma_profile", "m0_lower_bound", "strong",
            "weak", "growth", "scenario_ordered",
        ];
        let row = vec![
            num(sm.s), num(sm.l), num(sm.m0), num(sm.kappa), num(sm.q_interp), num(sm.alpha), num(sm.m), num(sm.m1),
            num(sm.gamma_profile), sm.m0_lower_bound.map(num).unwrap_or_default(), sm.flags.strong.to_string(),
            sm.flags.weak.to_string(), sm.flags.growth.to_string(), sm.flags.scenario_ordered.to_string(),
        ];
        write_table(&dir.join("exponents.csv"), &header, &[row])?;
    }
    if ctx.format.json() {
        write_json(
            &dir.join("exponents.json"),
            &json!({
                "exponents": sm,
                "exact": exact,
                "holder_splits": splits,
                "kappa_m": {"n": kw.n, "kappa_n": kw.kappa_n, "m0_star": kw.m0_star, "in_unit_interval": kw.m0_star_in_unit_interval},
                "provenance": ctx.provenance(None, None),
            }),
        )?;
    }
    Ok(Outcome {
        lines: vec![format!("exponents: kappa={} alpha={} m={} m1={}", sm.kappa, sm.alpha, sm.m, sm.m1)],
        unmet: vec![],
    })
}

fn construction_json(k: &Appendix1Construction<f64>) -> Value {
    json!({
        "branch": k.branch,
        "m0": k.m0, "alpha": k.alpha, "delta": k.delta,
        "delta_interval": k.delta_interval.map(|(a, b)| [a, b]),
        "edge_deltas": k.edge_deltas.map(|(a, b)| [a, b]),
        "s": k.s, "l": k.l, "kappa": k.kappa, "gamma": k.gamma,
        "time_margin": k.time_margin, "radial_margin": k.radial_margin,
        "exponent_certificate": k.exponent_certificate,
        "strongly_admissible": k.strongly_admissible,
    })
}

pub fn construct(ctx: &Ctx, dir: &Path) -> AppResult<Outcome> {
    let k = construction_f64(&ctx.cfg)?;
    let e = construction_exact(&ctx.cfg)?;
    let exact_zero = e.certificate_is_zero();
    ensure_dir(dir)?;
    if ctx.format.csv() {
        let (lo, hi) = k.delta_interval.map(|(a, b)| (num(a), num(b))).unwrap_or_default();
        let header = [
            "branch", "m0", "alpha", "delta", "delta_lo", "delta_hi", "s", "l", "kappa", "gamma", "time_margin",
            "radial_margin", "exponent_certificate", "certificate_exact_zero",
        ];
        let branch = serde_json::to_value(k.branch).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let row = vec![
            branch, num(k.m0), num(k.alpha), k.delta.map(num).unwrap_or_default(), lo, hi, num(k.s), num(k.l),
            num(k.kappa), num(k.gamma), num(k.time_margin), num(k.radial_margin), num(k.exponent_certificate),
            exact_zero.to_string(),
        ];
        write_table(&dir.join("construct.csv"), &header, &[row])?;
    }
    if ctx.format.json() {
        write_json(
            &dir.join("construct.json"),
            &json!({
                "construction": construction_json(&k),
                "exact": {
                    "s": exact_string(&e.s), "l": exact_string(&e.l), "gamma": exact_string(&e.gamma),
                    "delta": e.delta.as_ref().map(exact_string),
                    "exponent_certificate": exact_string(&e.exponent_certificate),
                    "certificate_is_zero": exact_zero,
                },
                "provenance": ctx.provenance(None, None),
            }),
        )?;
    }
    let mut out = Outcome {
        lines: vec![format!(
            "construct: s={} l={} gamma={} certificate={} (exact zero: {exact_zero})",
            k.s, k.l, k.gamma, k.exponent_certificate
        )],
        unmet: vec![],
    };
    if !exact_zero {
        out.unmet.push("construct: exact exponent certificate is not zero".into());
    }
    Ok(out)
}

pub fn quantities(ctx: &Ctx, dir: &Path) -> AppResult<Outcome> {
    let cfg = &ctx.cfg;
    let profile = build_profile(cfg)?;
    let (params, _, source) = quantity_params(cfg)?;
    let qc = quadrature_config(cfg)?;
    let report = quantity_report(&profile, &ladder(cfg)?, &params, &qc)?;
    ensure_dir(dir)?;
    if ctx.format.csv() {
        report.write_csv(&dir.join("quantities.csv"))?;
    }
    if ctx.format.json() {
        let mut js = report.to_json();
        js["exponent_source"] = json!(source);
        js["provenance"] = ctx.provenance(Some(&qc), Some(qc.tolerance));
        write_json(&dir.join("quantities.json"), &js)?;
    }
    Ok(Outcome { lines: vec![format!("quantities: {} radii, profile {}", report.rows.len(), profile.kind())], unmet: vec![] })
}

fn rows_json(rows: &[InvarianceRow]) -> Vec<Value> {
    rows.iter()
        .map(|r| {
            json!({
                "relation": r.relation, "kind": r.kind, "a": r.a,
                "lhs": json_number(r.lhs), "rhs": json_number(r.rhs), "slack": json_number(r.slack),
                "tolerance": r.tolerance, "pass": r.pass,
            })
        })
        .collect()
}

pub fn scale_check(ctx: &Ctx, dir: &Path) -> AppResult<Outcome> {
    let cfg = &ctx.cfg;
    let profile = build_profile(cfg)?;
    let (params, ex, source) = quantity_params(cfg)?;
    let qc = quadrature_config(cfg)?;
    let tol = ctx.scaling_tolerance()?;
    let radii = ladder(cfg)?;
    let kind: String = cfg.require("scaling.kind")?;
    let (ns, euler) = match kind.as_str() {
        "navier_stokes" => (true, false),
        "euler" => (false, true),
        "both" => (true, true),
        other => return Err(ConfigError(format!("`scaling.kind`: unknown kind `{other}`")).into()),
    };
    ensure_dir(dir)?;
    let mut tables = Vec::new();
    let mut out = Outcome::default();
    let mut emit = |name: String, spec: ScalingSpec, r_k: Option<f64>, rows: Vec<InvarianceRow>| -> AppResult<()> {
        if ctx.format.csv() {
            write_invariance_csv(&rows, &dir.join(format!("{name}.csv")))?;
        }
        let failed: Vec<&InvarianceRow> = rows.iter().filter(|r| !r.pass).collect();
        for r in &failed {
            out.unmet.push(format!("{name}: {} at a={} (slack {})", r.relation, r.a, format_number(r.slack)));
        }
        out.lines.push(format!("{name}: {} rows, {} failed", rows.len(), failed.len()));
        tables.push(json!({
            "name": name, "scaling": spec, "r_k": r_k, "all_pass": failed.is_empty(), "rows": rows_json(&rows),
        }));
        Ok(())
    };
    if ns {
        for lam in cfg.require_list("scaling.lambda")? {
            let spec = ScalingSpec::navier_stokes(lam)?;
            let rows = invariance_report(&profile, spec, &params, &radii, &qc, tol)?;
            emit(format!("invariance_navier_stokes_{lam}"), spec, None, rows)?;
        }
    }
    if euler {
        let alpha = cfg.get("scaling.alpha")?.unwrap_or(ex.alpha);
        for r_k in cfg.require_list("scaling.r_k")? {
            let spec = ScalingSpec::euler(lambda_for_rk(r_k, alpha)?, alpha)?;
            let rows = invariance_report(&profile, spec, &params, &radii, &qc, tol)?;
            emit(format!("invariance_euler_{r_k}"), spec, Some(r_k), rows)?;
        }
    }
    if ctx.format.json() {
        write_json(
            &dir.join("invariance.json"),
            &json!({
                "profile": profile.describe(),
                "params": params,
                "exponent_source": source,
                "tables": tables,
                "provenance": ctx.provenance(Some(&qc), Some(tol)),
            }),
        )?;
    }
    Ok(out)
}

fn envelope_rows(env: &GrowthEnvelope) -> Vec<Vec<String>> {
    (0..env.radii.len())
        .map(|i| {
            vec![
                format_number(env.radii[i]),
                format_number(env.masses[i]),
                format_number(env.normalized[i]),
                format_number(env.running_sup[i]),
            ]
        })
        .collect()
}

fn envelope_json(env: &GrowthEnvelope) -> Value {
    json!({
        "exponent": env.exponent,
        "radii": env.radii,
        "masses": env.masses.iter().map(|x| json_number(*x)).collect::<Vec<_>>(),
        "normalized": env.normalized.iter().map(|x| json_number(*x)).collect::<Vec<_>>(),
        "running_sup": env.running_sup.iter().map(|x| json_number(*x)).collect::<Vec<_>>(),
        "slope": json_number(env.slope),
        "raw_slope": json_number(env.raw_slope),
    })
}

pub fn liouville(ctx: &Ctx, dir: &Path) -> AppResult<Outcome> {
    let cfg = &ctx.cfg;
    let m: f64 = cfg.require("liouville.m")?;
    let gamma: f64 = cfg.require("liouville.gamma")?;
    let kind_s: String = cfg.require("liouville.kind")?;
    let kind = match kind_s.as_str() {
        "self_similar" => ProfileKind::SelfSimilar,
        "discrete_self_similar" => ProfileKind::DiscreteSelfSimilar,
        other => return Err(ConfigError(format!("`liouville.kind`: unknown kind `{other}`")).into()),
    };
    let evidence: String = cfg.require("liouville.evidence")?;
    let qc = quadrature_config(cfg)?;
    let ladder = cfg.list("liouville.ladder")?;
    let alpha = 2.0 - m;
    let m1 = 2.0 * m - 1.0;
    let mut slab = Value::Null;
    let env = match evidence.as_str() {
        "none" => None,
        "profile" => {
            let u = SimilarityProfile::new(radial_law(cfg, "evidence")?);
            let (profile, sampling) = match kind {
                ProfileKind::SelfSimilar => (ProfileSpec::SelfSimilar { alpha, profile: u }, Sampling::At { tau: 0.0 }),
                ProfileKind::DiscreteSelfSimilar => {
                    let s0 = cfg.positive("evidence.s0")?;
                    let p = ProfileSpec::DiscreteSelfSimilar { alpha, s0, depth: cfg.require("evidence.depth")?, profile: u };
                    (p, Sampling::Sup { tau0: 0.0, tau1: s0 })
                }
            };
            let env = growth_envelope(&profile, Integrand::Speed(2.0), gamma * m1, ladder.as_deref(), sampling, &qc)?;
            if kind == ProfileKind::DiscreteSelfSimilar {
                let s0 = cfg.positive("evidence.s0")?;
                let r_min = (2.0 * s0 / (1.0 + alpha)).exp();
                let big: Vec<f64> = env.radii.iter().copied().filter(|r| *r > r_min).collect();
                if big.len() >= 2 {
                    let bounds = dss_slab_bounds(&profile, s0, &big, &qc)?;
                    slab = json!(bounds
                        .iter()
                        .map(|b| json!({"quantity": b.quantity, "target": b.target, "fitted": json_number(b.fitted), "pass": b.pass}))
                        .collect::<Vec<_>>());
                }
            }
            Some(env)
        }
        other => return Err(ConfigError(format!("`liouville.evidence`: expected profile or none, got `{other}`")).into()),
    };
    let rec = liouville_verdict(kind, m, gamma, env.as_ref());
    ensure_dir(dir)?;
    if ctx.format.csv() {
        if let Some(env) = &env {
            write_table(&dir.join("envelope.csv"), &["b", "mass", "normalized", "running_sup"], &envelope_rows(env))?;
        }
    }
    if ctx.format.json() {
        write_json(
            &dir.join("liouville.json"),
            &json!({
                "record": rec,
                "evidence": env.as_ref().map(envelope_json),
                "slab_bounds": slab,
                "note": "a trivial verdict is conditional on the supplied finite-ladder evidence",
                "provenance": ctx.provenance(Some(&qc), None),
            }),
        )?;
    }
    let verdict = serde_json::to_value(rec.verdict).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    Ok(Outcome { lines: vec![format!("liouville: {verdict}")], unmet: vec![] })
}

pub fn iterate(ctx: &Ctx, dir: &Path) -> AppResult<Outcome> {
    let cfg = &ctx.cfg;
    let p = derive_iteration_params::<f64>(cfg.require("iterate.m")?, cfg.require("iterate.gamma")?)?
        .with_constant(cfg.positive("iterate.c")?);
    let r: f64 = cfg.require("iterate.r")?;
    let k_max: usize = cfg.require("iterate.k_max")?;
    let tol = cfg.positive("iterate.tolerance")?;
    let trace = iterate_bound(&p, r, k_max)?;
    let reached = trace.first_below(tol);
    let last = trace.entries.last().expect("k = 0 entry");
    ensure_dir(dir)?;
    if ctx.format.csv() {
        trace.write_csv(&dir.join("trace.csv"))?;
    }
    if ctx.format.json() {
        write_json(
            &dir.join("iterate.json"),
            &json!({
                "params": p,
                "gamma_below_max": p.gamma_below_max(),
                "case": trace.case,
                "ratio": p.ratio(),
                "contraction": trace.contraction,
                "verdict": trace.verdict,
                "k_max": k_max,
                "final_bound": json_number(last.bound),
                "target": tol,
                "first_k_below_target": reached,
                "provenance": ctx.provenance(None, Some(tol)),
            }),
        )?;
    }
    let mut out = Outcome {
        lines: vec![format!("iterate: final bound {} after {k_max} steps", format_number(last.bound))],
        unmet: vec![],
    };
    if reached.is_none() {
        out.unmet.push(format!("iterate: bound stays above {tol} through k = {k_max}"));
    }
    Ok(out)
}

type Command = fn(&Ctx, &Path) -> AppResult<Outcome>;

pub const SUITE: [(&str, Command); 6] = [
    ("exponents", exponents),
    ("construct", construct),
    ("quantities", quantities),
    ("scale-check", scale_check),
    ("liouville", liouville),
    ("iterate", iterate),
];

/// Runs every command into its own subdirectory; returns the worst exit code.
pub fn suite(ctx: &Ctx, dir: &Path) -> (Outcome, i32) {
    let mut summary = Vec::new();
    let mut out = Outcome::default();
    let mut code = 0;
    for (name, cmd) in SUITE {
        match cmd(ctx, &dir.join(name)) {
            Ok(o) => {
                let status = if o.unmet.is_empty() { "ok" } else { "unmet" };
                if !o.unmet.is_empty() {
                    code = code.max(2);
                }
                summary.push(json!({"command": name, "status": status, "unmet": o.unmet}));
                out.lines.extend(o.lines);
                out.unmet.extend(o.unmet);
            }
            Err(e) => {
                code = code.max(e.exit_code());
                summary.push(json!({"command": name, "status": "error", "error": e.to_string()}));
                out.lines.push(format!("{name}: error: {e}"));
            }
        }
    }
    let js = json!({"commands": summary, "provenance": ctx.provenance(None, None)});
    if let Err(e) = ensure_dir(dir).and_then(|_| write_json(&dir.join("suite.json"), &js)) {
        out.lines.push(e.to_string());
        code = code.max(1);
    }
    (out, code)
}
