//! Iteration-lemma engine, Liouville verdicts and growth-envelope diagnostics.

mod envelope;
mod liouville;

pub use envelope::{
    decay_recursion, default_ladder, dss_slab_bounds, growth_envelope, power_envelope_exponent, GrowthEnvelope, Sampling,
    SlabBound, DEFAULT_LADDER_LEN, SLOPE_SLACK,
};
pub use liouville::{liouville_verdict, ChecklistItem, ProfileKind, Verdict, VerdictRecord};

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of F(R) ≤ θF(2R) + C/R^β together with the growth cap F(R) ≤ C R^{γ m1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationParams<T> {
    pub theta: T,
    pub beta: T,
    pub c_force: T,
    pub gamma: T,
    pub m1: T,
    /// (ln(2+m1) - ln 2)/(m1 ln 2), when derived from m.
    pub gamma_max: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeometricCase {
    #[serde(rename = "2^beta*theta>1")]
    Above,
    #[serde(rename = "2^beta*theta<1")]
    Below,
    #[serde(rename = "2^beta*theta=1")]
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterationVerdict {
    ConvergesToZero,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry<T> {
    pub k: usize,
    /// (θ 2^{γ m1})^k C
    pub profile_term: T,
    /// A(k, θ, R)
    pub forcing_term: T,
    pub bound: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace<T> {
    pub entries: Vec<TraceEntry<T>>,
    pub case: GeometricCase,
    pub contraction: T,
    pub verdict: IterationVerdict,
}

fn c<T: Float>(x: f64) -> T {
    T::from(x).expect("float conversion")
}

/// γ_max(m1) = (ln(2+m1) - ln 2)/(m1 ln 2).
pub fn gamma_max<T: Float>(m1: T) -> T {
    let two = c::<T>(2.0);
    ((two + m1).ln() - two.ln()) / (m1 * two.ln())
}

/// θ = 2/(2+m1), β = (5/4)(1 - 5m/3) for 1/2 < m < 3/5, with C = 1.
pub fn derive_iteration_params<T: Float>(m: T, gamma: T) -> Result<IterationParams<T>> {
    if !(m > c(0.5) && m < c(0.6)) {
        return Err(Error::Precondition(format!(
            "m must lie in (1/2, 3/5), got {}",
            m.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if !(gamma >= T::zero()) {
        return Err(Error::Precondition("γ must be nonnegative".into()));
    }
    let m1 = c::<T>(2.0) * m - T::one();
    Ok(IterationParams {
        theta: c::<T>(2.0) / (c::<T>(2.0) + m1),
        beta: c::<T>(1.25) * (T::one() - c::<T>(5.0) * m / c(3.0)),
        c_force: T::one(),
        gamma,
        m1,
        gamma_max: Some(gamma_max(m1)),
    })
}

impl<T: Float> IterationParams<T> {
    /// Explicit parameters (θ ∈ (0,1)); γ_max is left unset.
    pub fn explicit(theta: T, beta: T, c_force: T, gamma: T, m1: T) -> Result<Self> {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::Precondition("θ must lie in (0, 1)".into()));
        }
        Ok(Self { theta, beta, c_force, gamma, m1, gamma_max: None })
    }

    pub fn with_constant(mut self, c_force: T) -> Self {
        self.c_force = c_force;
        self
    }

    /// γ < γ_max, when γ_max is known.
    pub fn gamma_below_max(&self) -> Option<bool> {
        self.gamma_max.map(|g| self.gamma < g)
    }

    /// θ 2^{γ m1}.
    pub fn contraction(&self) -> T {
        self.theta * c::<T>(2.0).powf(self.gamma * self.m1)
    }

    /// 2^β θ.
    pub fn ratio(&self) -> T {
        c::<T>(2.0).powf(self.beta) * self.theta
    }

    pub fn case(&self) -> GeometricCase {
        let q = self.ratio();
        if (q - T::one()).abs() <= c(1e-12) {
            GeometricCase::Equal
        } else if q > T::one() {
            GeometricCase::Above
        } else {
            GeometricCase::Below
        }
    }

    /// A(k, θ, R) by the closed form of its case.
    pub fn forcing(&self, r: T, k: usize) -> T {
        if k == 0 {
            return T::zero();
        }
        let kf = c::<T>(k as f64);
        let q = self.ratio();
        let lead = self.c_force / r.powf(self.beta);
        match self.case() {
            GeometricCase::Equal => lead * kf * self.theta.powf(kf - T::one()),
            GeometricCase::Above => {
                lead * self.theta.powf(kf - T::one()) * (T::one() - q.powf(-kf)) / (T::one() - q.recip())
            }
            GeometricCase::Below => {
                let two = c::<T>(2.0);
                lead / two.powf(self.beta * (kf - T::one())) * (T::one() - q.powf(kf)) / (T::one() - q)
            }
        }
    }

    /// A(k, θ, R) by direct summation.
    pub fn forcing_direct(&self, r: T, k: usize) -> T {
        let q = self.ratio();
        let sum = (0..k).fold(T::zero(), |acc, i| acc + q.powi(-(i as i32)));
        if k == 0 {
            return T::zero();
        }
        self.c_force * self.theta.powi(k as i32 - 1) / r.powf(self.beta) * sum
    }
}

/// Bound on F(R) after k = 0..=k_max iterations.
pub fn iterate_bound<T: Float>(params: &IterationParams<T>, r: T, k_max: usize) -> Result<IterationTrace<T>> {
    if !(r >= T::one()) {
        return Err(Error::Precondition("R must be at least 1".into()));
    }
    let contraction = params.contraction();
    let mut entries = Vec::with_capacity(k_max + 1);
    entries.push(TraceEntry {
        k: 0,
        profile_term: params.c_force,
        forcing_term: params.c_force / r.powf(params.beta),
        bound: params.c_force + params.c_force / r.powf(params.beta),
    });
    for k in 1..=k_max {
        let profile_term = contraction.powi(k as i32) * params.c_force;
        let forcing_term = params.forcing(r, k);
        entries.push(TraceEntry { k, profile_term, forcing_term, bound: profile_term + forcing_term });
    }
    let verdict = if contraction < T::one() && params.beta > T::zero() {
        IterationVerdict::ConvergesToZero
    } else {
        IterationVerdict::Inconclusive
    };
    Ok(IterationTrace { entries, case: params.case(), contraction, verdict })
}

impl<T: Float> IterationTrace<T> {
    /// First k with bound ≤ tol.
    pub fn first_below(&self, tol: T) -> Option<usize> {
        self.entries.iter().find(|e| e.bound <= tol).map(|e| e.k)
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        use crate::quantities::format_number;
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["k", "profile_term", "forcing_term", "bound"])?;
        for e in &self.entries {
            let f = |x: T| format_number(x.to_f64().unwrap_or(f64::NAN));
            w.write_record([e.k.to_string(), f(e.profile_term), f(e.forcing_term), f(e.bound)])?;
        }
        w.flush()?;
        Ok(())
    }
}
