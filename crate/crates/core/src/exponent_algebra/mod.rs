//! Exponent relations and admissibility conditions.
//!
//! All functions are generic over [`Scalar`], so they run in floating point or
//! in exact rational arithmetic. With rational inputs the identity
//! certificates come out exactly zero.

mod construct;
mod holder;

pub use construct::{construct_appendix1, construct_appendix1_edge, delta_interval, Appendix1Construction, Branch};
pub use holder::{holder_splits, HolderSplit, SplitCase, SplitEntry};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lebesgue exponents in space (`s`) and time (`l`).
#[derive(Debug, Clone, PartialEq)]
pub struct SlPair<T> {
    pub s: T,
    pub l: T,
}

impl<T: Scalar> SlPair<T> {
    pub fn new(s: T, l: T) -> Result<Self> {
        if s < T::one() || l < T::one() {
            return Err(Error::Domain(format!(
                "s and l must be >= 1 (got s={:?}, l={:?})",
                s, l
            )));
        }
        Ok(Self { s, l })
    }

    /// 3/s + 2/l - 1, the scaling index shared by most relations.
    pub fn scaling_index(&self) -> T {
        T::int(3) / self.s.clone() + T::int(2) / self.l.clone() - T::one()
    }

    /// κ = l(3/s + 2/l - 1).
    pub fn kappa(&self) -> T {
        self.l.clone() * self.scaling_index()
    }

    /// Interpolation exponent q = 2l(3/s + 2/l - 3/2).
    pub fn q_interp(&self) -> T {
        let idx = T::int(3) / self.s.clone() + T::int(2) / self.l.clone() - T::ratio(3, 2);
        T::int(2) * self.l.clone() * idx
    }

    /// Right-hand threshold 1/2 + max{1/(2l), 1/2 - 1/l} of the strong condition.
    pub fn strong_threshold(&self) -> T {
        let a = T::one() / (T::int(2) * self.l.clone());
        let b = T::ratio(1, 2) - T::one() / self.l.clone();
        T::ratio(1, 2) + T::max_of(a, b)
    }

    /// 1 > 3/s + 2/l - 1 > 1/2 + max{1/(2l), 1/2 - 1/l}, strict on both sides.
    pub fn is_strongly_admissible(&self) -> bool {
        let idx = self.scaling_index();
        idx < T::one() && idx > self.strong_threshold()
    }

    /// l > κ, equivalently 3/s + 2/l - 1 < 1.
    pub fn is_weakly_admissible(&self) -> bool {
        self.l > self.kappa()
    }

    /// l > κ > 0.
    pub fn is_growth_admissible(&self) -> bool {
        let kappa = self.kappa();
        self.l > kappa && kappa > T::zero()
    }

    /// 2(6/s + 5/l - 3) / (5(3/s + 2/l - 1)), the lower bound on m0 forced by m >= 1/2.
    /// Defined when κ > 0.
    pub fn m0_lower_bound(&self) -> Option<T> {
        if self.kappa() <= T::zero() {
            return None;
        }
        let num = T::int(2)
            * (T::int(6) / self.s.clone() + T::int(5) / self.l.clone() - T::int(3));
        Some(num / (T::int(5) * self.scaling_index()))
    }
}

/// Admissibility flags attached to a derived parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdmissibilityFlags {
    /// Strong two-sided condition on 3/s + 2/l - 1.
    pub strong: bool,
    /// l > κ.
    pub weak: bool,
    /// l > κ > 0.
    pub growth: bool,
    /// α > 1, so that m1 < m < 1 and the Morrey-type scenario bounds are ordered.
    pub scenario_ordered: bool,
}

/// The (s, l, m0) triple and every exponent derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentParams<T> {
    pub sl: SlPair<T>,
    pub m0: T,
    pub kappa: T,
    pub q_interp: T,
    pub alpha: T,
    pub m: T,
    pub m1: T,
    pub gamma_profile: T,
    pub m0_lower_bound: Option<T>,
    pub flags: AdmissibilityFlags,
}

/// Floating point snapshot for reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExponentSummary {
    pub s: f64,
    pub l: f64,
    pub m0: f64,
    pub kappa: f64,
    pub q_interp: f64,
    pub alpha: f64,
    pub m: f64,
    pub m1: f64,
    pub gamma_profile: f64,
    pub m0_lower_bound: Option<f64>,
    pub flags: AdmissibilityFlags,
}

impl<T: Scalar> ExponentParams<T> {
    pub fn summary(&self) -> ExponentSummary {
        ExponentSummary {
            s: self.sl.s.to_f64_lossy(),
            l: self.sl.l.to_f64_lossy(),
            m0: self.m0.to_f64_lossy(),
            kappa: self.kappa.to_f64_lossy(),
            q_interp: self.q_interp.to_f64_lossy(),
            alpha: self.alpha.to_f64_lossy(),
            m: self.m.to_f64_lossy(),
            m1: self.m1.to_f64_lossy(),
            gamma_profile: self.gamma_profile.to_f64_lossy(),
            m0_lower_bound: self.m0_lower_bound.as_ref().map(|v| v.to_f64_lossy()),
            flags: self.flags,
        }
    }
}

/// Euler scaling exponent
/// α = (l(3/s+1) - (m0-1)κ) / (l(3/s+1) + (m0-1)κ).
pub fn euler_alpha<T: Scalar>(sl: &SlPair<T>, m0: &T) -> Result<T> {
    let base = sl.l.clone() * (T::int(3) / sl.s.clone() + T::one());
    let shift = (m0.clone() - T::one()) * sl.kappa();
    let den = base.clone() + shift.clone();
    if den.is_zero() {
        return Err(Error::Degenerate(
            "l(3/s+1) + (m0-1)κ = 0 leaves α undefined".into(),
        ));
    }
    Ok((base - shift) / den)
}

/// Derives κ, q, α, m, m1 and the profile power γ from (s, l, m0).
pub fn derive<T: Scalar>(s: T, l: T, m0: T) -> Result<ExponentParams<T>> {
    let sl = SlPair::new(s, l)?;
    if m0 <= T::zero() || m0 > T::one() {
        return Err(Error::Domain(format!("m0 must lie in (0, 1], got {:?}", m0)));
    }
    let kappa = sl.kappa();
    let q_interp = sl.q_interp();
    let alpha = euler_alpha(&sl, &m0)?;
    let m = T::int(2) - alpha.clone();
    let m1 = T::int(2) * m.clone() - T::one();
    let gamma_profile = sl.scaling_index() * (T::one() - m0.clone()) + T::one();
    let flags = AdmissibilityFlags {
        strong: sl.is_strongly_admissible(),
        weak: sl.is_weakly_admissible(),
        growth: sl.is_growth_admissible(),
        scenario_ordered: alpha > T::one(),
    };
    let m0_lower_bound = sl.m0_lower_bound();
    Ok(ExponentParams {
        sl,
        m0,
        kappa,
        q_interp,
        alpha,
        m,
        m1,
        gamma_profile,
        m0_lower_bound,
        flags,
    })
}

/// The (p(λ), q(λ)) family with 1/p = λ/6 + 3(1-λ)/10 and 1/q = λ/2 + 3(1-λ)/10.
#[derive(Debug, Clone, PartialEq)]
pub struct PqPair<T> {
    pub p: T,
    pub q: T,
    /// 3/p + 2/q - 1 - 1/2, identically zero.
    pub identity_residual: T,
}

pub fn pq_of_lambda<T: Scalar>(lambda: T) -> Result<PqPair<T>> {
    if lambda < T::zero() || lambda > T::one() {
        return Err(Error::Domain(format!(
            "λ must lie in [0, 1], got {:?}",
            lambda
        )));
    }
    let rest = T::int(3) * (T::one() - lambda.clone()) / T::int(10);
    let inv_p = lambda.clone() / T::int(6) + rest.clone();
    let inv_q = lambda / T::int(2) + rest;
    let identity_residual =
        T::int(3) * inv_p.clone() + T::int(2) * inv_q.clone() - T::one() - T::ratio(1, 2);
    Ok(PqPair {
        p: T::one() / inv_p,
        q: T::one() / inv_q,
        identity_residual,
    })
}

/// κ_n = nκ + q(1-n) together with m0* = κ_n/κ.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaWeighted<T> {
    pub n: T,
    pub kappa_n: T,
    pub m0_star: Option<T>,
    /// 0 < m0* < 1; guaranteed when the strong condition holds and 0 < n < 1.
    pub m0_star_in_unit_interval: bool,
}

pub fn kappa_weighted<T: Scalar>(s: T, l: T, n: T) -> Result<KappaWeighted<T>> {
    let sl = SlPair::new(s, l)?;
    let kappa = sl.kappa();
    let q = sl.q_interp();
    let kappa_n = n.clone() * kappa.clone() + q * (T::one() - n.clone());
    let m0_star = (kappa > T::zero()).then(|| kappa_n.clone() / kappa);
    let m0_star_in_unit_interval = m0_star
        .as_ref()
        .map(|v| *v > T::zero() && *v < T::one())
        .unwrap_or(false);
    Ok(KappaWeighted {
        n,
        kappa_n,
        m0_star,
        m0_star_in_unit_interval,
    })
}
