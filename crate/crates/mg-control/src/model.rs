//! The uncontrolled Mackey–Glass nonlinearity `f(ξ) = pξ/(1+ξⁿ)`:
//! evaluation, landmark points, the parameter trichotomy, and the
//! delay-independent (L) / delay-dependent (T) monotone-domain conditions.

use std::fmt;

use thiserror::Error;

use crate::rootfind::bisect;
use crate::scalar::{lit, powx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: require mu > 0, p > 0, n > 2 (got mu={mu}, p={p}, n={n})")]
    InvalidParams { mu: f64, p: f64, n: f64 },
    #[error("feedback is defined on the nonnegative cone only (got xi = {0})")]
    NegativeState(f64),
    #[error("operation requires case C (positive equilibrium on the decreasing branch), parameters are case {0}")]
    NotCaseC(Case),
    #[error("delay must be positive (got tau = {0})")]
    NonpositiveDelay(f64),
}

/// Parameter trichotomy: A — only the zero equilibrium; B — positive
/// equilibrium on the increasing branch (K ≤ ξ₀); C — positive equilibrium
/// on the decreasing branch (K > ξ₀).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    A,
    B,
    C,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::A => write!(f, "A"),
            Case::B => write!(f, "B"),
            Case::C => write!(f, "C"),
        }
    }
}

/// Decay rate μ, feedback amplitude p and Hill exponent n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgParams<F> {
    mu: F,
    p: F,
    n: F,
}

/// Landmark values of the feedback geometry.
///
/// `equilibrium` is the positive equilibrium K (present iff p > μ);
/// `conjugate` is the point K̂ < ξ₀ with f(K̂) = f(K) (present in case C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmarks<F> {
    pub xi0: F,
    pub f_max: F,
    pub beta: F,
    pub alpha: F,
    pub equilibrium: Option<F>,
    pub conjugate: Option<F>,
}

/// Outcome of a monotone-domain condition; `holds` iff `margin > 0`,
/// where `margin = lhs − ξ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport<F> {
    pub holds: bool,
    pub lhs: F,
    pub margin: F,
}

impl<F: Real> ConditionReport<F> {
    pub(crate) fn from_lhs(lhs: F, xi0: F) -> Self {
        let margin = lhs - xi0;
        ConditionReport {
            holds: margin > F::zero(),
            lhs,
            margin,
        }
    }
}

fn to_f64<F: Real>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl<F: Real> MgParams<F> {
    pub fn new(mu: F, p: F, n: F) -> Result<Self, ModelError> {
        let two = lit::<F>(2.0);
        if !(mu > F::zero())
            || !(p > F::zero())
            || !(n > two)
            || !mu.is_finite()
            || !p.is_finite()
            || !n.is_finite()
        {
            return Err(ModelError::InvalidParams {
                mu: to_f64(mu),
                p: to_f64(p),
                n: to_f64(n),
            });
        }
        Ok(MgParams { mu, p, n })
    }

    pub fn mu(&self) -> F {
        self.mu
    }

    pub fn p(&self) -> F {
        self.p
    }

    pub fn n(&self) -> F {
        self.n
    }

    /// Feedback value f(ξ) = pξ/(1+ξⁿ). Rejects negative arguments.
    pub fn f(&self, xi: F) -> Result<F, ModelError> {
        if xi < F::zero() {
            return Err(ModelError::NegativeState(to_f64(xi)));
        }
        Ok(self.f_raw(xi))
    }

    /// Feedback with negative arguments clamped to zero. The integrator's
    /// dense past is nonnegative by construction, so the clamp only absorbs
    /// rounding-level undershoot.
    pub(crate) fn f_raw(&self, xi: F) -> F {
        if xi <= F::zero() {
            return F::zero();
        }
        self.p * xi / (F::one() + powx(xi, self.n))
    }

    /// Closed-form derivative f′(ξ) = p(1−(n−1)ξⁿ)(1+ξⁿ)⁻².
    pub fn f_prime(&self, xi: F) -> Result<F, ModelError> {
        if xi < F::zero() {
            return Err(ModelError::NegativeState(to_f64(xi)));
        }
        Ok(self.f_prime_raw(xi))
    }

    pub(crate) fn f_prime_raw(&self, xi: F) -> F {
        let u = powx(xi, self.n);
        let one = F::one();
        self.p * (one - (self.n - one) * u) / ((one + u) * (one + u))
    }

    /// Critical point ξ₀ = (n−1)^{−1/n} of the feedback.
    pub fn xi0(&self) -> F {
        powx(self.n - F::one(), -(F::one() / self.n))
    }

    /// Classify the parameters into case A, B or C. The boundary
    /// p = μ(1+(n−1)⁻¹) belongs to case B.
    pub fn case(&self) -> Case {
        if self.mu >= self.p {
            Case::A
        } else if self.p <= self.mu * (F::one() + F::one() / (self.n - F::one())) {
            Case::B
        } else {
            Case::C
        }
    }

    /// Landmark values: ξ₀, f(ξ₀), β = f(ξ₀)/μ, α = f(β)/μ, the positive
    /// equilibrium K (iff p > μ) and its conjugate point K̂ (case C), found
    /// by bisection of f(x) = f(K) on (0, ξ₀) where f is strictly increasing.
    pub fn landmarks(&self) -> Landmarks<F> {
        let xi0 = self.xi0();
        let f_max = self.f_raw(xi0);
        let beta = f_max / self.mu;
        let alpha = self.f_raw(beta) / self.mu;
        let equilibrium = if self.p > self.mu {
            Some(powx(self.p / self.mu - F::one(), F::one() / self.n))
        } else {
            None
        };
        let conjugate = match (self.case(), equilibrium) {
            (Case::C, Some(k)) => {
                let target = self.f_raw(k);
                bisect(
                    |x| self.f_raw(x) - target,
                    xi0 * lit::<F>(1e-12),
                    xi0,
                    lit::<F>(1e-12),
                    200,
                )
            }
            _ => None,
        };
        Landmarks {
            xi0,
            f_max,
            beta,
            alpha,
            equilibrium,
            conjugate,
        }
    }

    /// Delay-independent condition (L): g²(ξ₀) > ξ₀ with g = f/μ.
    /// Only meaningful in case C.
    pub fn check_l(&self) -> Result<ConditionReport<F>, ModelError> {
        self.require_case_c()?;
        let lm = self.landmarks();
        Ok(ConditionReport::from_lhs(lm.alpha, lm.xi0))
    }

    /// Delay-dependent condition (T): h²(ξ₀) > ξ₀ with
    /// h(x) = (1−e^{−μτ})g(x) + e^{−μτ}K. As τ → 0 the left-hand side
    /// tends to K, so (T) degenerates to K > ξ₀.
    pub fn check_t(&self, tau: F) -> Result<ConditionReport<F>, ModelError> {
        self.require_case_c()?;
        if !(tau > F::zero()) {
            return Err(ModelError::NonpositiveDelay(to_f64(tau)));
        }
        let lm = self.landmarks();
        let k = lm.equilibrium.expect("case C has a positive equilibrium");
        let e = (-self.mu * tau).exp();
        let h = |x: F| (F::one() - e) * self.f_raw(x) / self.mu + e * k;
        Ok(ConditionReport::from_lhs(h(h(lm.xi0)), lm.xi0))
    }

    pub(crate) fn require_case_c(&self) -> Result<(), ModelError> {
        match self.case() {
            Case::C => Ok(()),
            other => Err(ModelError::NotCaseC(other)),
        }
    }
}
