//! Plain-text `key = value` run configuration with `[section]` headers or dotted keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

pub struct KeySpec {
    pub key: &'static str,
    /// Applied when the key is absent.
    pub default: Option<&'static str>,
    /// Printed by `defaults` for keys without a default.
    pub example: Option<&'static str>,
    pub help: &'static str,
}

const fn d(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { key, default: Some(default), example: None, help }
}

const fn req(key: &'static str, example: &'static str, help: &'static str) -> KeySpec {
    KeySpec { key, default: None, example: Some(example), help }
}

const fn opt(key: &'static str, help: &'static str) -> KeySpec {
    KeySpec { key, default: None, example: None, help }
}

pub const KEYS: &[KeySpec] = &[
    d("run.threads", "0", "worker threads (0 = one per core)"),
    opt("output.dir", "artifact directory (else TYPEII_OUT_DIR, else ./typeii-out)"),
    d("output.format", "both", "csv | json | both"),
    req("exponents.s", "2.8", "spatial integrability exponent s >= 1"),
    req("exponents.l", "2.8", "time integrability exponent l >= 1"),
    req("exponents.m0", "0.9", "attenuation exponent in (0, 1]"),
    req("construct.m0", "0.9", "m0 in (0, 1) for the power-law construction"),
    req("construct.alpha", "0.5", "profile exponent in [0, 1]"),
    opt("construct.delta", "δ inside the admissible interval (default: midpoint)"),
    d("construct.delta1", "0.01", "δ1 for the α = 0 and α = 1 branches"),
    d("construct.delta2", "0.01", "δ2 for the α = 0 and α = 1 branches"),
    d("profile.kind", "appendix1", "appendix1 | power_law | constant | shear | swirl | self_similar | dss | grid"),
    d("profile.c", "1", "power-law amplitude"),
    opt("profile.alpha_p", "power-law spatial exponent (power_law)"),
    opt("profile.gamma_p", "power-law overall power (power_law)"),
    d("profile.pressure_scale", "1", "pressure q = scale·|v|² for power-law and swirl profiles"),
    d("profile.vector", "1,0,0", "constant velocity"),
    d("profile.amplitude", "1", "shear or radial-law amplitude"),
    d("profile.wavenumber", "1", "shear wavenumber"),
    d("profile.law", "gaussian", "radial law: zero | gaussian | bump | power | core_tail"),
    d("profile.width", "1", "gaussian width"),
    d("profile.radius", "1", "bump radius"),
    d("profile.exponent", "-0.5", "power or core_tail exponent"),
    d("profile.alpha", "1.5", "similarity exponent α"),
    d("profile.s0", "1", "DSS period S0"),
    d("profile.depth", "0", "DSS modulation depth"),
    opt("profile.path", "directory of an exported grid (grid)"),
    d("profile.stem", "grid", "file stem of an exported grid (grid)"),
    d("grid.n", "0", "sample the profile on an N^3 grid before integrating (0 = analytic)"),
    d("grid.nt", "8", "time levels of the sampled grid"),
    d("grid.radius", "1", "radius of the sampled cylinder"),
    opt("weights.m", "override m"),
    opt("weights.m1", "override m1"),
    opt("weights.m_tilde", "override the weight of C_mt"),
    opt("weights.n", "override the weight of the n-quantities"),
    d("ladder.radii", "1,0.5,0.25", "radii of the quantity ladder"),
    d("quadrature.radial_levels", "24", "dyadic radial cells"),
    d("quadrature.time_levels", "24", "dyadic time cells"),
    d("quadrature.order", "4", "Gauss points per cell"),
    d("quadrature.n_theta", "8", "polar Gauss points"),
    d("quadrature.exact_power_weights", "true", "per-cell power weights for declared singularities"),
    d("quadrature.tolerance", "1e-2", "refinement tolerance"),
    d("quadrature.check_refinement", "false", "fail when refinement changes a value by more than the tolerance"),
    d("scaling.kind", "both", "navier_stokes | euler | both"),
    d("scaling.lambda", "0.25,0.5,0.9", "Navier–Stokes scaling factors"),
    d("scaling.r_k", "0.1,0.01", "Euler radii r_k (λ = r_k^{2/(α+1)})"),
    opt("scaling.alpha", "Euler exponent (default: derived from the exponents)"),
    d("scaling.tolerance", "1e-9", "pass tolerance of the invariance rows"),
    d("liouville.kind", "self_similar", "self_similar | discrete_self_similar"),
    req("liouville.m", "0.55", "weight m of the profile"),
    req("liouville.gamma", "0.5", "growth exponent γ"),
    d("liouville.evidence", "profile", "profile | none"),
    opt("liouville.ladder", "growth ladder (default 2^j, j = 0..10)"),
    d("evidence.law", "bump", "radial law of the evidence profile U"),
    d("evidence.amplitude", "1", "evidence amplitude"),
    d("evidence.width", "1", "evidence gaussian width"),
    d("evidence.radius", "0.9", "evidence bump radius"),
    d("evidence.exponent", "-0.5", "evidence power exponent"),
    d("evidence.s0", "1", "DSS period of the evidence profile"),
    d("evidence.depth", "0", "DSS modulation depth of the evidence profile"),
    req("iterate.m", "0.55", "weight m in (1/2, 3/5)"),
    req("iterate.gamma", "0.5", "growth exponent γ"),
    d("iterate.c", "1", "constant C"),
    d("iterate.r", "2", "radius R >= 1"),
    d("iterate.k_max", "400", "iterations"),
    d("iterate.tolerance", "1e-6", "target bound"),
];

fn spec(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.key == key)
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError(format!("line {}: expected `key = value`, got `{line}`", n + 1)));
            };
            let k = k.trim();
            let key = if section.is_empty() || k.contains('.') { k.to_string() } else { format!("{section}.{k}") };
            if spec(&key).is_none() {
                return Err(ConfigError(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(ConfigError(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn set(&mut self, key: &str, value: &str) -> ConfigResult<()> {
        if spec(key).is_none() {
            return Err(ConfigError(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(spec(key).is_some(), "undeclared key {key}");
        self.values.get(key).map(String::as_str).or_else(|| spec(key).and_then(|s| s.default))
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> ConfigResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> ConfigResult<T> {
        self.get(key)?.ok_or_else(|| ConfigError(format!("missing required field `{key}`")))
    }

    pub fn list(&self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        v.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("`{key}`: cannot parse `{}` as a number", x.trim())))
            })
            .collect::<ConfigResult<Vec<_>>>()
            .map(Some)
    }

    pub fn require_list(&self, key: &str) -> ConfigResult<Vec<f64>> {
        let v = self.list(key)?.ok_or_else(|| ConfigError(format!("missing required field `{key}`")))?;
        if v.is_empty() {
            return Err(ConfigError(format!("`{key}` is empty")));
        }
        Ok(v)
    }

    pub fn positive(&self, key: &str) -> ConfigResult<f64> {
        let v: f64 = self.require(key)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(ConfigError(format!("`{key}` must be positive, got {v}")));
        }
        Ok(v)
    }

    /// Every declared key with its effective value, for provenance.
    pub fn effective(&self) -> BTreeMap<&'static str, Option<String>> {
        KEYS.iter().map(|k| (k.key, self.raw(k.key).map(str::to_string))).collect()
    }
}

/// A runnable configuration listing every key; required keys carry reference values.
pub fn defaults_text() -> String {
    let mut out = String::new();
    let mut section = "";
    for k in KEYS {
        let (sec, name) = k.key.split_once('.').expect("dotted key");
        if sec != section {
            if !section.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("[{sec}]\n"));
            section = sec;
        }
        match (k.default, k.example) {
            (Some(v), _) => out.push_str(&format!("{name} = {v}  # {}\n", k.help)),
            (None, Some(v)) => out.push_str(&format!("{name} = {v}  # required; {}\n", k.help)),
            (None, None) => out.push_str(&format!("# {name} =  # optional; {}\n", k.help)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_dotted_keys() {
        let c = Config::parse("[exponents]\ns = 2.8\nexponents.l = 3 # trailing\n\n[iterate]\nm=0.55\n").unwrap();
        assert_eq!(c.require::<f64>("exponents.s").unwrap(), 2.8);
        assert_eq!(c.require::<f64>("exponents.l").unwrap(), 3.0);
        assert_eq!(c.require::<f64>("iterate.m").unwrap(), 0.55);
        assert_eq!(c.raw("iterate.k_max"), Some("400"));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let c = Config::parse("[exponents]\nl = 2.8\n").unwrap();
        assert_eq!(c.require::<f64>("exponents.s").unwrap_err().0, "missing required field `exponents.s`");
        assert!(Config::parse("[exponents]\nz = 1\n").unwrap_err().0.contains("exponents.z"));
        assert!(Config::parse("exponents.s = 1\nexponents.s = 2\n").unwrap_err().0.contains("duplicate"));
        let bad = Config::parse("exponents.s = abc\n").unwrap();
        assert!(bad.require::<f64>("exponents.s").unwrap_err().0.contains("exponents.s"));
    }

    #[test]
    fn defaults_round_trip() {
        let c = Config::parse(&defaults_text()).unwrap();
        assert_eq!(c.require::<f64>("exponents.s").unwrap(), 2.8);
        assert_eq!(c.require_list("ladder.radii").unwrap(), vec![1.0, 0.5, 0.25]);
    }
}
