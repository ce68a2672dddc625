//! Hölder / Gagliardo–Nirenberg splittings of ∫|v|³ into powers of
//! ∫|v|^s, ∫|v|² and ∫|v|⁶.

use serde::Serialize;

use crate::error::Result;
use crate::scalar::Scalar;

use super::SlPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplitCase {
    /// Three-factor split under the strong condition.
    #[serde(rename = "AppII")]
    ThreeFactor,
    /// l = 3, s >= 3: ∫|v|³ bounded by (∫|v|^s)^{3/s}.
    #[serde(rename = "AppIII-l3")]
    LEqualsThree,
    /// 1 <= l < 3, s > 3: split between |v|^s and |v|².
    #[serde(rename = "AppIII-l-below-3")]
    LBelowThree,
    /// l > 3, s >= 3.
    #[serde(rename = "AppIII-l-above-3-s-above-3")]
    LAboveThreeSAboveThree,
    /// l > 3, 3/2 < s < 3: split between |v|^s and |v|⁶.
    #[serde(rename = "AppIII-l-above-3-s-mid")]
    LAboveThreeSMid,
}

impl SplitCase {
    pub fn tag(&self) -> &'static str {
        match self {
            SplitCase::ThreeFactor => "AppII",
            SplitCase::LEqualsThree => "AppIII-l3",
            SplitCase::LBelowThree => "AppIII-l-below-3",
            SplitCase::LAboveThreeSAboveThree => "AppIII-l-above-3-s-above-3",
            SplitCase::LAboveThreeSMid => "AppIII-l-above-3-s-mid",
        }
    }

    pub const ALL: [SplitCase; 5] = [
        SplitCase::ThreeFactor,
        SplitCase::LEqualsThree,
        SplitCase::LBelowThree,
        SplitCase::LAboveThreeSAboveThree,
        SplitCase::LAboveThreeSMid,
    ];
}

/// Exponents of one splitting: `lambda` on ∫|v|^s, `mu` on ∫|v|², `gamma` on ∫|v|⁶.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderSplit<T> {
    pub case: SplitCase,
    pub lambda: T,
    pub mu: T,
    pub gamma: T,
    /// Time-integrability exponent q, when the split has one.
    pub q: Option<T>,
    /// q' = q / (q - 1).
    pub q_dual: Option<T>,
    /// Named residuals of the exponent identities (zero when they hold).
    pub identities: Vec<(&'static str, T)>,
    /// Named side conditions.
    pub flags: Vec<(&'static str, bool)>,
}

impl<T: Scalar> HolderSplit<T> {
    pub fn identities_hold(&self) -> bool {
        self.identities.iter().all(|(_, r)| r.is_certified_zero())
    }

    pub fn max_residual(&self) -> f64 {
        self.identities
            .iter()
            .map(|(_, r)| r.abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitEntry<T> {
    Applicable(HolderSplit<T>),
    NotApplicable { case: SplitCase, reason: &'static str },
}

impl<T> SplitEntry<T> {
    pub fn case(&self) -> SplitCase {
        match self {
            SplitEntry::Applicable(s) => s.case,
            SplitEntry::NotApplicable { case, .. } => *case,
        }
    }

    pub fn split(&self) -> Option<&HolderSplit<T>> {
        match self {
            SplitEntry::Applicable(s) => Some(s),
            SplitEntry::NotApplicable { .. } => None,
        }
    }
}

fn dual<T: Scalar>(q: &T) -> Option<T> {
    let den = q.clone() - T::one();
    (!den.is_zero()).then(|| q.clone() / den)
}

fn three_factor<T: Scalar>(sl: &SlPair<T>) -> SplitEntry<T> {
    if !sl.is_strongly_admissible() {
        return SplitEntry::NotApplicable {
            case: SplitCase::ThreeFactor,
            reason: "strong condition fails",
        };
    }
    let (s, l) = (sl.s.clone(), sl.l.clone());
    let q = sl.q_interp();
    let w = l.clone() / q.clone();
    let lambda = w.clone() / s.clone();
    let g = T::int(2) / s.clone() + T::one() / l.clone() - T::one();
    let gamma = w.clone() * g.clone();
    let mu = w * (T::int(3) / s.clone() + T::int(3) / l.clone() - T::int(2));
    // q - 1 = 3lg; subtracting 1 from q loses digits when q is close to 1
    let q_minus_one = T::int(3) * l * g;
    let q_dual = (!q_minus_one.is_zero()).then(|| q.clone() / q_minus_one);
    let mut identities = vec![
        ("lambda+mu+gamma=1", lambda.clone() + mu.clone() + gamma.clone() - T::one()),
        (
            "s*lambda+2mu+6gamma=3",
            s * lambda.clone() + T::int(2) * mu.clone() + T::int(6) * gamma.clone() - T::int(3),
        ),
    ];
    if let Some(qd) = &q_dual {
        identities.push(("3*gamma*q'=1", T::int(3) * gamma.clone() * qd.clone() - T::one()));
    }
    let flags = vec![
        ("positive exponents", lambda > T::zero() && mu > T::zero() && gamma > T::zero()),
        ("mu*q<1", mu.clone() * q.clone() < T::one()),
    ];
    SplitEntry::Applicable(HolderSplit {
        case: SplitCase::ThreeFactor,
        lambda,
        mu,
        gamma,
        q: Some(q),
        q_dual,
        identities,
        flags,
    })
}

fn single_factor<T: Scalar>(case: SplitCase, sl: &SlPair<T>) -> HolderSplit<T> {
    let lambda = T::int(3) / sl.s.clone();
    HolderSplit {
        case,
        identities: vec![("s*lambda=3", sl.s.clone() * lambda.clone() - T::int(3))],
        lambda,
        mu: T::zero(),
        gamma: T::zero(),
        q: None,
        q_dual: None,
        flags: vec![("lambda<=1", sl.s >= T::int(3))],
    }
}

fn l_below_three<T: Scalar>(sl: &SlPair<T>) -> SplitEntry<T> {
    let case = SplitCase::LBelowThree;
    if !(sl.l < T::int(3)) {
        return SplitEntry::NotApplicable { case, reason: "requires 1 <= l < 3" };
    }
    if !(sl.s > T::int(3)) {
        return SplitEntry::NotApplicable { case, reason: "requires s > 3" };
    }
    let s = sl.s.clone();
    let lambda = T::one() / (s.clone() - T::int(2));
    let mu = (s.clone() - T::int(3)) / (s.clone() - T::int(2));
    let q = sl.l.clone() / (lambda.clone() * s.clone());
    let q_dual = dual(&q);
    SplitEntry::Applicable(HolderSplit {
        case,
        identities: vec![
            ("lambda+mu=1", lambda.clone() + mu.clone() - T::one()),
            ("s*lambda+2mu=3", s * lambda.clone() + T::int(2) * mu.clone() - T::int(3)),
        ],
        flags: vec![("0<mu<1", mu > T::zero() && mu < T::one())],
        lambda,
        mu,
        gamma: T::zero(),
        q: Some(q),
        q_dual,
    })
}

fn l_above_three_s_mid<T: Scalar>(sl: &SlPair<T>) -> SplitEntry<T> {
    let case = SplitCase::LAboveThreeSMid;
    if !(sl.l > T::int(3)) {
        return SplitEntry::NotApplicable { case, reason: "requires l > 3" };
    }
    if !(sl.s > T::ratio(3, 2) && sl.s < T::int(3)) {
        return SplitEntry::NotApplicable { case, reason: "requires 3/2 < s < 3" };
    }
    let s = sl.s.clone();
    let lambda = T::int(3) / (T::int(6) - s.clone());
    let gamma = (T::int(3) - s.clone()) / (T::int(6) - s.clone());
    let q = sl.l.clone() / (lambda.clone() * s.clone());
    let q_dual = dual(&q);
    let three_gamma_q_dual_le_one = q_dual
        .as_ref()
        .map(|qd| T::int(3) * gamma.clone() * qd.clone() <= T::one())
        .unwrap_or(false);
    SplitEntry::Applicable(HolderSplit {
        case,
        identities: vec![
            ("lambda+gamma=1", lambda.clone() + gamma.clone() - T::one()),
            ("s*lambda+6gamma=3", s * lambda.clone() + T::int(6) * gamma.clone() - T::int(3)),
        ],
        flags: vec![
            ("3gamma<1", T::int(3) * gamma.clone() < T::one()),
            ("q>1", q > T::one()),
            ("3gamma*q'<=1", three_gamma_q_dual_le_one),
        ],
        lambda,
        mu: T::zero(),
        gamma,
        q: Some(q),
        q_dual,
    })
}

/// Every splitting case, each either applicable with its exponents or marked not applicable.
pub fn holder_splits<T: Scalar>(s: T, l: T) -> Result<Vec<SplitEntry<T>>> {
    let sl = SlPair::new(s, l)?;
    let three = T::int(3);
    let l_three = if sl.l == three && sl.s >= three {
        SplitEntry::Applicable(single_factor(SplitCase::LEqualsThree, &sl))
    } else {
        SplitEntry::NotApplicable {
            case: SplitCase::LEqualsThree,
            reason: "requires l = 3 and s >= 3",
        }
    };
    let l_above_s_above = if sl.l > three && sl.s >= three {
        SplitEntry::Applicable(single_factor(SplitCase::LAboveThreeSAboveThree, &sl))
    } else {
        SplitEntry::NotApplicable {
            case: SplitCase::LAboveThreeSAboveThree,
            reason: "requires l > 3 and s >= 3",
        }
    };
    Ok(vec![
        three_factor(&sl),
        l_three,
        l_below_three(&sl),
        l_above_s_above,
        l_above_three_s_mid(&sl),
    ])
}
