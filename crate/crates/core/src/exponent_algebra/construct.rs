//! Constructive choice of (s, l, γ) for which the attenuated mixed norm of a
//! power-law profile |v| ~ (|x|^{-α}(-t)^{-(1-α)/2})^γ is bounded uniformly in R.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::SlPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// 0 < α < 1, parametrised by δ.
    Interior,
    /// α = 0, requires 19/20 < m0 < 1.
    AlphaZero,
    /// α = 1, requires 4/5 < m0 < 1.
    AlphaOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Appendix1Construction<T> {
    pub branch: Branch,
    pub m0: T,
    pub alpha: T,
    pub delta: Option<T>,
    /// Open interval of admissible δ for the interior branch.
    pub delta_interval: Option<(T, T)>,
    pub edge_deltas: Option<(T, T)>,
    pub s: T,
    pub l: T,
    pub kappa: T,
    pub gamma: T,
    /// 1/l - γ(1-α)/2, positive iff the time integral converges.
    pub time_margin: T,
    /// 1/s - γα/3, positive iff the radial integral converges.
    pub radial_margin: T,
    /// -κ m0 + (2 - (1-α)γl) + (3 - αsγ) l/s, the power of R in the bound.
    pub exponent_certificate: T,
    pub strongly_admissible: bool,
}

impl<T: Scalar> Appendix1Construction<T> {
    pub fn certificate_is_zero(&self) -> bool {
        self.exponent_certificate.is_certified_zero()
    }
}

/// Open interval for δ: max{6/(3+α), 4/(3-α)} < δ(2-m0) < 2.
pub fn delta_interval<T: Scalar>(m0: &T, alpha: &T) -> (T, T) {
    let width = T::int(2) - m0.clone();
    let a = T::int(6) / (T::int(3) + alpha.clone());
    let b = T::int(4) / (T::int(3) - alpha.clone());
    (T::max_of(a, b) / width.clone(), T::int(2) / width)
}

fn exponent_power<T: Scalar>(kappa: &T, m0: &T, alpha: &T, gamma: &T, s: &T, l: &T) -> T {
    let time = T::int(2) - (T::one() - alpha.clone()) * gamma.clone() * l.clone();
    let radial = T::int(3) - alpha.clone() * s.clone() * gamma.clone();
    -(kappa.clone() * m0.clone()) + time + radial * l.clone() / s.clone()
}

fn finish<T: Scalar>(
    branch: Branch,
    m0: T,
    alpha: T,
    delta: Option<T>,
    delta_interval: Option<(T, T)>,
    edge_deltas: Option<(T, T)>,
    s: T,
    l: T,
) -> Result<Appendix1Construction<T>> {
    let sl = SlPair::new(s.clone(), l.clone())?;
    let kappa = sl.kappa();
    let gamma = sl.scaling_index() * (T::one() - m0.clone()) + T::one();
    let time_margin =
        T::one() / l.clone() - gamma.clone() * (T::one() - alpha.clone()) / T::int(2);
    let radial_margin = T::one() / s.clone() - gamma.clone() * alpha.clone() / T::int(3);
    let exponent_certificate = exponent_power(&kappa, &m0, &alpha, &gamma, &s, &l);
    let out = Appendix1Construction {
        branch,
        m0,
        alpha,
        delta,
        delta_interval,
        edge_deltas,
        s,
        l,
        kappa,
        gamma,
        time_margin,
        radial_margin,
        exponent_certificate,
        strongly_admissible: sl.is_strongly_admissible(),
    };
    if !out.strongly_admissible {
        return Err(Error::InfeasibleDelta(format!(
            "constructed (s, l) = ({:?}, {:?}) violates the strong condition",
            out.s, out.l
        )));
    }
    if out.time_margin <= T::zero() || out.radial_margin <= T::zero() {
        return Err(Error::InfeasibleDelta(format!(
            "integrability fails: time margin {:?}, radial margin {:?}",
            out.time_margin, out.radial_margin
        )));
    }
    if out.gamma <= T::one() {
        return Err(Error::InfeasibleDelta("γ must exceed 1".into()));
    }
    Ok(out)
}

/// Builds (s, l, γ) for given m0 and profile exponent α.
///
/// For 0 < α < 1, `delta` defaults to the midpoint of the admissible interval.
/// α = 0 and α = 1 dispatch to the edge branches with δ1 = δ2 = 1/100.
pub fn construct_appendix1<T: Scalar>(
    m0: T,
    alpha: T,
    delta: Option<T>,
) -> Result<Appendix1Construction<T>> {
    if alpha.is_zero() || alpha == T::one() {
        let d = T::ratio(1, 100);
        return construct_appendix1_edge(m0, alpha, d.clone(), d);
    }
    if m0 <= T::zero() || m0 >= T::one() {
        return Err(Error::Precondition(format!(
            "m0 must lie in (0, 1), got {:?}",
            m0
        )));
    }
    if alpha <= T::zero() || alpha >= T::one() {
        return Err(Error::Precondition(format!(
            "profile exponent must lie in [0, 1], got {:?}",
            alpha
        )));
    }
    let (lo, hi) = delta_interval(&m0, &alpha);
    if lo >= hi {
        return Err(Error::InfeasibleDelta(format!(
            "empty δ interval ({:?}, {:?})",
            lo, hi
        )));
    }
    let delta = match delta {
        Some(d) => {
            if d <= lo || d >= hi {
                return Err(Error::InfeasibleDelta(format!(
                    "δ = {:?} outside ({:?}, {:?})",
                    d, lo, hi
                )));
            }
            d
        }
        None => (lo.clone() + hi.clone()) / T::int(2),
    };
    let scale = delta.clone() * (T::int(2) - m0.clone());
    let inv_l = scale.clone() * (T::one() - alpha.clone()) / T::int(2);
    let inv_s = scale * alpha.clone() / T::int(3);
    finish(
        Branch::Interior,
        m0,
        alpha,
        Some(delta),
        Some((lo, hi)),
        None,
        T::one() / inv_s,
        T::one() / inv_l,
    )
}

/// Edge branches α ∈ {0, 1} with caller-chosen small δ1, δ2 > 0.
pub fn construct_appendix1_edge<T: Scalar>(
    m0: T,
    alpha: T,
    delta1: T,
    delta2: T,
) -> Result<Appendix1Construction<T>> {
    if delta1 <= T::zero() || delta2 <= T::zero() || delta1 >= T::one() || delta2 >= T::one() {
        return Err(Error::Precondition("δ1, δ2 must lie in (0, 1)".into()));
    }
    let (branch, s, l) = if alpha.is_zero() {
        if !(m0 > T::ratio(19, 20) && m0 < T::one()) {
            return Err(Error::Precondition(format!(
                "α = 0 requires 19/20 < m0 < 1, got {:?}",
                m0
            )));
        }
        (
            Branch::AlphaZero,
            T::int(10) / (T::int(3) * (T::one() + delta1.clone())),
            T::int(20) / (T::int(11) * (T::one() - delta2.clone())),
        )
    } else if alpha == T::one() {
        if !(m0 > T::ratio(4, 5) && m0 < T::one()) {
            return Err(Error::Precondition(format!(
                "α = 1 requires 4/5 < m0 < 1, got {:?}",
                m0
            )));
        }
        (
            Branch::AlphaOne,
            T::int(15) / (T::int(7) * (T::one() - delta1.clone())),
            T::int(10) / (T::int(3) * (T::one() + delta2.clone())),
        )
    } else {
        return Err(Error::Precondition(
            "edge construction needs α = 0 or α = 1".into(),
        ));
    };
    finish(branch, m0, alpha, None, None, Some((delta1, delta2)), s, l)
}
