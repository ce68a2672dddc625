use serde::Serialize;

use super::envelope::{GrowthEnvelope, SLOPE_SLACK};
use super::gamma_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    SelfSimilar,
    DiscreteSelfSimilar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Trivial,
    OutOfScope,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChecklistItem {
    pub condition: String,
    /// None when the condition was not reached.
    pub holds: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub kind: ProfileKind,
    pub m: f64,
    pub m1: f64,
    pub gamma: f64,
    pub gamma_max: Option<f64>,
    pub verdict: Verdict,
    pub checklist: Vec<ChecklistItem>,
}

fn item(condition: &str, holds: Option<bool>, detail: String) -> ChecklistItem {
    ChecklistItem { condition: condition.into(), holds, detail }
}

/// Decide whether a (discretely) self-similar profile must vanish.
///
/// `evidence` is the growth envelope of ∫_{B(b)}|U|²; its raw log-log slope must not exceed
/// γ m1 + 0.05 for the growth hypothesis to count as supported.
pub fn liouville_verdict(kind: ProfileKind, m: f64, gamma: f64, evidence: Option<&GrowthEnvelope>) -> VerdictRecord {
    let m1 = 2.0 * m - 1.0;
    let mut rec = VerdictRecord { kind, m, m1, gamma, gamma_max: None, verdict: Verdict::Inconclusive, checklist: vec![] };

    let negative = m1 < 0.0;
    rec.checklist.push(item("m1 < 0", Some(negative), format!("m1 = {m1}")));
    if negative {
        rec.checklist.push(item("profile is zero by energy bound", Some(true), "U ∈ L² with vanishing energy".into()));
        rec.verdict = Verdict::Trivial;
        return rec;
    }

    let in_range = m > 0.5 && m < 0.6;
    rec.checklist.push(item("1/2 < m < 3/5", Some(in_range), format!("m = {m}")));
    let gamma_ok = gamma >= 0.0;
    rec.checklist.push(item("γ ≥ 0", Some(gamma_ok), format!("γ = {gamma}")));
    if !in_range || !gamma_ok {
        rec.verdict = Verdict::OutOfScope;
        return rec;
    }

    let gmax = gamma_max(m1);
    rec.gamma_max = Some(gmax);
    let below = gamma < gmax;
    rec.checklist.push(item("γ < γ_max", Some(below), format!("γ_max = {gmax}")));
    if !below {
        return rec;
    }

    let threshold = gamma * m1 + SLOPE_SLACK;
    let supported = match evidence {
        Some(env) => {
            let ok = env.raw_slope <= threshold;
            rec.checklist.push(item(
                "sup_b b^{-γ m1} ∫_{B(b)}|U|² < ∞",
                Some(ok),
                format!("fitted growth {} against γ m1 + {SLOPE_SLACK} = {threshold}", env.raw_slope),
            ));
            ok
        }
        None => {
            rec.checklist.push(item("sup_b b^{-γ m1} ∫_{B(b)}|U|² < ∞", None, "no growth evidence".into()));
            false
        }
    };
    if supported {
        rec.verdict = Verdict::Trivial;
    }
    rec
}
