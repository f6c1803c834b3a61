//! Control-threshold design: admissible parameter windows for constant,
//! proportional and Pyragas control, plus the state-dependent-delay
//! construction. Everything here is a pure function of the model
//! parameters; simulation lives in [`crate::dde`] and [`crate::scenario`].

use thiserror::Error;

use crate::model::{ConditionReport, MgParams, ModelError};
use crate::rootfind::{bisect, sign_change_brackets};
use crate::scalar::{lit, powx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("argument outside the admissible domain: {0}")]
    Domain(String),
    #[error("invalid step-delay parameters: {0}")]
    StepConfig(String),
}

/// Thresholds of the constant-perturbation law u(t) = k.
///
/// * below `k1` the controlled system has no equilibria and every solution
///   collapses to zero in finite time;
/// * on `(k1, k2)` there are two equilibria on the increasing branch and
///   solutions started between them converge to the larger one;
/// * on `(k2, k3)` and on `[k_star, ∞)` the shifted-feedback certificate
///   `D(k) > 0` excludes complicated dynamics.
///
/// `k3` is absent when `D > 0` on all of `(k2, μξ₀]`; `k_star` then falls
/// back to `k2`, the infimum of the certificate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantThresholds<F> {
    /// Tangency point: the unique ξ_μ > 0 with f′(ξ_μ) = μ.
    pub xi_mu: F,
    pub k1: F,
    pub k2: F,
    pub k3: Option<F>,
    pub k_star: Option<F>,
}

/// Shifted-feedback margin D(k) = f((f(ξ₀)+k)/μ) − μξ₀ + k.
///
/// `D(k) > 0` is the delay-independent monotone-domain certificate for the
/// constant-control system; D(k₂) = 0 and D′(k₂) = 1.
pub fn d_value<F: Real>(params: &MgParams<F>, k: F) -> Result<F, DesignError> {
    params.require_case_c()?;
    let lm = params.landmarks();
    let arg = (lm.f_max + k) / params.mu();
    if arg < F::zero() {
        return Err(DesignError::Domain(format!(
            "shifted feedback argument (f(xi0)+k)/mu = {} is negative",
            arg.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(params.f_raw(arg) - params.mu() * lm.xi0 + k)
}

/// Scan-and-bisect resolution for the roots of D on (k2, mu*xi0].
const D_SCAN_STEP: f64 = 1e-3;
const D_ROOT_TOL: f64 = 1e-6;

/// The unique ξ_μ > 0 with f′(ξ_μ) = μ: f′(ξ) = μ is quadratic in
/// u = ξⁿ and only its larger root is positive.
fn tangency_point<F: Real>(params: &MgParams<F>) -> F {
    let (mu, p, n) = (params.mu(), params.p(), params.n());
    let two = lit::<F>(2.0);
    let disc = (lit::<F>(4.0) * p * mu * n + p * p * (n - F::one()) * (n - F::one())).sqrt();
    let u_plus = (-two * mu - p * (n - F::one()) + disc) / (two * mu);
    powx(u_plus, F::one() / n)
}

pub fn constant_thresholds<F: Real>(
    params: &MgParams<F>,
) -> Result<ConstantThresholds<F>, DesignError> {
    params.require_case_c()?;
    let mu = params.mu();
    let lm = params.landmarks();
    let xi_mu = tangency_point(params);

    // Tangency of the shifted graph with mu*xi: f(xi_mu) = mu(xi_mu - k1/mu).
    let k1 = mu * xi_mu - params.f_raw(xi_mu);
    let k2 = mu * lm.xi0 - lm.f_max;

    let d = |k: F| params.f_raw((lm.f_max + k) / mu) - mu * lm.xi0 + k;
    let hi = mu * lm.xi0;
    let step = lit::<F>(D_SCAN_STEP);
    let tol = lit::<F>(D_ROOT_TOL);
    let mut roots: Vec<F> = Vec::new();
    for (a, b) in sign_change_brackets(d, k2 + step, hi, step) {
        if let Some(r) = bisect(d, a, b, tol, 200) {
            roots.push(r);
        }
    }
    let k3 = roots.first().copied();
    let k_star = Some(roots.last().copied().unwrap_or(k2));

    Ok(ConstantThresholds {
        xi_mu,
        k1,
        k2,
        k3,
        k_star,
    })
}

/// Positive equilibria of the constant-control system: roots of
/// μx = f(x) + k, located by bracketed bisection on either side of the
/// tangency point ξ_μ.
pub fn constant_equilibria<F: Real>(params: &MgParams<F>, k: F) -> Vec<F> {
    let mu = params.mu();
    let lm = params.landmarks();
    let phi = |x: F| mu * x - params.f_raw(x) - k;
    let hi = lm.beta + k.max(F::zero()) / mu + F::one();
    let tiny = lit::<F>(1e-12);
    let tol = tiny;
    let mut roots = Vec::new();
    if params.p() > mu {
        // phi decreases to its minimum k1 at xi_mu, then increases.
        let xi_mu = tangency_point(params);
        if let Some(r) = bisect(phi, tiny, xi_mu, tol, 200) {
            roots.push(r);
        }
        if let Some(r) = bisect(phi, xi_mu, hi, tol, 200) {
            roots.push(r);
        }
    } else if let Some(r) = bisect(phi, tiny, hi, tol, 200) {
        roots.push(r);
    }
    roots
}

/// Thresholds of the proportional law u(t) = kx(t), expressed through the
/// effective decay rate w = μ − k.
///
/// For w in `(w_star, w0)` — equivalently k in `k_window` — the effective
/// system satisfies the delay-independent certificate. `w_star` is absent
/// when S(ŵ) ≤ 1 (no admissible window).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalThresholds<F> {
    pub w0: F,
    pub w_hat: F,
    pub w_star: Option<F>,
    pub k_window: Option<(F, F)>,
}

/// S(w) = α̃/ξ₀ for effective decay w: the delay-independent margin ratio
/// of the proportionally controlled system. Evaluated through the feedback
/// itself (not the expanded rational form), which stays finite for large n.
pub fn s_value<F: Real>(params: &MgParams<F>, w: F) -> F {
    let xi0 = params.xi0();
    let beta = params.f_raw(xi0) / w;
    params.f_raw(beta) / (w * xi0)
}

const W_STAR_REL_TOL: f64 = 1e-14;

pub fn proportional_thresholds<F: Real>(
    params: &MgParams<F>,
) -> Result<ProportionalThresholds<F>, DesignError> {
    params.require_case_c()?;
    let l = params.check_l()?;
    if l.holds {
        return Err(DesignError::Domain(
            "delay-independent condition already holds uncontrolled; proportional design assumes alpha < xi0".into(),
        ));
    }
    let p = params.p();
    let n = params.n();
    let one = F::one();
    let two = lit::<F>(2.0);
    let w0 = p * (n - one) / n;
    let w_hat = w0 * powx((n - two) / (two * n - two), one / n);
    let s_peak = s_value(params, w_hat);
    let w_star = if s_peak > one {
        bisect(
            |w| s_value(params, w) - one,
            w_hat * lit::<F>(1e-6),
            w_hat,
            w_hat * lit::<F>(W_STAR_REL_TOL),
            300,
        )
    } else {
        None
    };
    let k_window = w_star.map(|ws| (params.mu() - w0, params.mu() - ws));
    Ok(ProportionalThresholds {
        w0,
        w_hat,
        w_star,
        k_window,
    })
}

/// Delay-dependent condition for the proportionally controlled system:
/// delegates to the (T) check with effective decay w = μ − k.
pub fn proportional_t_check<F: Real>(
    params: &MgParams<F>,
    k: F,
    tau: F,
) -> Result<ConditionReport<F>, DesignError> {
    let w = params.mu() - k;
    if !(w > F::zero()) {
        return Err(DesignError::Domain(format!(
            "effective decay mu - k = {} must be positive",
            w.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let eff = MgParams::new(w, params.p(), params.n())?;
    Ok(eff.check_t(tau)?)
}

/// Pyragas monotonization bound: for k > k_py = p(n−1)²/(4n) the reshaped
/// feedback F_k(ξ) = f(ξ) + kξ is strictly increasing and every solution
/// converges to the (unchanged) positive equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyragasDesign<F> {
    pub k_py: F,
}

pub fn pyragas_design<F: Real>(params: &MgParams<F>) -> Result<PyragasDesign<F>, DesignError> {
    params.require_case_c()?;
    let p = params.p();
    let n = params.n();
    let nm1 = n - F::one();
    Ok(PyragasDesign {
        k_py: p * nm1 * nm1 / (lit::<F>(4.0) * n),
    })
}

/// Local extrema q₁ < q₂ of the bimodal F_k for 0 < k < k_py: the solutions
/// of f′(ξ) = −k, i.e. of k·u² + (2k − p(n−1))·u + (p+k) = 0 in u = ξⁿ.
pub fn pyragas_extrema<F: Real>(params: &MgParams<F>, k: F) -> Result<(F, F), DesignError> {
    let k_py = pyragas_design(params)?.k_py;
    if !(k > F::zero()) || !(k < k_py) {
        return Err(DesignError::Domain(format!(
            "bimodal extrema exist only for 0 < k < k_py = {}; got k = {}",
            k_py.to_f64().unwrap_or(f64::NAN),
            k.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let p = params.p();
    let n = params.n();
    let two = lit::<F>(2.0);
    let b = two * k - p * (n - F::one());
    let c = p + k;
    let disc = b * b - lit::<F>(4.0) * k * c;
    if disc <= F::zero() {
        return Err(DesignError::Domain(
            "extrema quadratic has no real roots".into(),
        ));
    }
    let sq = disc.sqrt();
    let u1 = (-b - sq) / (two * k);
    let u2 = (-b + sq) / (two * k);
    Ok((powx(u1, F::one() / n), powx(u2, F::one() / n)))
}

/// How the state-dependent delay interpolates between its reduced and
/// baseline values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SddKind<F> {
    /// Quintic-smoothstep ramp on [ξ₀, ξ₀ + 2ζ]; C² and slope-bounded, so
    /// the slow-oscillation exclusion applies.
    Smooth,
    /// Two-level heuristic (low delay below the threshold, high above); not
    /// covered by the smooth-ramp result.
    Step { threshold: F, low: F, high: F },
}

/// A state-dependent delay law r(x) with `tau_star ≤ r(x) ≤ tau`,
/// nondecreasing in x. The control reading is k(x) = τ − r(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayDesign<F> {
    pub tau: F,
    pub tau_star: F,
    pub zeta: F,
    /// Left edge of the ramp (ξ₀ for the smooth kind).
    pub ramp_start: F,
    /// Ramp width actually used: 2ζ, so the quintic's peak slope
    /// (15/8)·(τ−τ*)/width stays strictly below the admissible slope.
    pub ramp_width: F,
    /// Slope bound (f(ξ₀) − μξ₀)⁻¹ from the construction.
    pub slope_limit: F,
    pub kind: SddKind<F>,
}

impl<F: Real> DelayDesign<F> {
    /// Evaluate the delay law at state x.
    pub fn delay_at(&self, x: F) -> F {
        match self.kind {
            SddKind::Smooth => {
                if self.ramp_width <= F::zero() || x <= self.ramp_start {
                    if self.ramp_width <= F::zero() {
                        self.tau
                    } else {
                        self.tau_star
                    }
                } else if x >= self.ramp_start + self.ramp_width {
                    self.tau
                } else {
                    let s = (x - self.ramp_start) / self.ramp_width;
                    let s2 = s * s;
                    let s3 = s2 * s;
                    // 6s^5 - 15s^4 + 10s^3: C^2 on the closed ramp.
                    let q = s3 * (lit::<F>(6.0) * s2 - lit::<F>(15.0) * s + lit::<F>(10.0));
                    self.tau_star + (self.tau - self.tau_star) * q
                }
            }
            SddKind::Step {
                threshold,
                low,
                high,
            } => {
                if x < threshold {
                    low
                } else {
                    high
                }
            }
        }
    }

    /// The additive control reading k(x) = τ − r(x).
    pub fn control_at(&self, x: F) -> F {
        self.tau - self.delay_at(x)
    }

    /// (min, max) of the delay law over all states.
    pub fn bounds(&self) -> (F, F) {
        match self.kind {
            SddKind::Smooth => {
                if self.ramp_width <= F::zero() {
                    (self.tau, self.tau)
                } else {
                    (self.tau_star, self.tau)
                }
            }
            SddKind::Step { low, high, .. } => (low, high),
        }
    }

    /// Whether the law is the C2 slope-bounded construction (the step
    /// heuristic is not).
    pub fn slope_compliant(&self) -> bool {
        matches!(self.kind, SddKind::Smooth)
    }
}

/// Build the state-dependent delay law for baseline delay τ.
///
/// τ* = min{τ, (K−ξ₀)/f(ξ₀), (ξ₀−K̂)/f(ξ₀)} and ζ = (τ−τ*)(f(ξ₀)−μξ₀).
/// When τ ≤ τ* the reduction is vacuous and r ≡ τ.
pub fn sdd_design<F: Real>(
    params: &MgParams<F>,
    tau: F,
    kind: SddKind<F>,
) -> Result<DelayDesign<F>, DesignError> {
    params.require_case_c()?;
    if !(tau > F::zero()) {
        return Err(DesignError::Domain(format!(
            "baseline delay must be positive (got {})",
            tau.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let lm = params.landmarks();
    let k = lm.equilibrium.expect("case C has an equilibrium");
    let k_hat = lm.conjugate.expect("case C has a conjugate point");
    let tau_star = tau
        .min((k - lm.xi0) / lm.f_max)
        .min((lm.xi0 - k_hat) / lm.f_max);
    let slope_den = lm.f_max - params.mu() * lm.xi0;
    let zeta = (tau - tau_star) * slope_den;
    let slope_limit = F::one() / slope_den;

    if let SddKind::Step {
        threshold,
        low,
        high,
    } = kind
    {
        if !(low > F::zero()) || !(low <= high) {
            return Err(DesignError::StepConfig(format!(
                "need 0 < low <= high (got low = {}, high = {})",
                low.to_f64().unwrap_or(f64::NAN),
                high.to_f64().unwrap_or(f64::NAN)
            )));
        }
        if low < tau_star || high > tau {
            return Err(DesignError::StepConfig(format!(
                "step levels must satisfy tau_star <= low <= high <= tau (tau_star = {}, tau = {})",
                tau_star.to_f64().unwrap_or(f64::NAN),
                tau.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let _ = threshold;
    }

    Ok(DelayDesign {
        tau,
        tau_star,
        zeta,
        ramp_start: lm.xi0,
        ramp_width: zeta + zeta,
        slope_limit,
        kind,
    })
}
