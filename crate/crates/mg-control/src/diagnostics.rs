//! Post-hoc trajectory diagnostics: peak extraction, tail classification
//! into the steady/periodic/irregular/unfeasible verdict set, twin-run
//! divergence rates, and monotone-domain entry times.

use thiserror::Error;

use crate::dde::{self, Trajectory};
use crate::scalar::{lit, Real};
use crate::scenario::{build_system, InitialFunction, ScenarioError, Schedule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("window [{lo}, {hi}] is empty or outside the trajectory span")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error(
        "window of length {len} is too short for delay scale {delay} (need 10 delay intervals)"
    )]
    WindowTooShort { len: f64, delay: f64 },
    #[error("divergence exponent not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Dde(#[from] dde::DdeError),
    #[error(transparent)]
    Scenario(#[from] Box<ScenarioError>),
}

/// Tail verdict, mirroring the trichotomy the monotone-feedback theory
/// allows (plus collapse).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict<F> {
    Steady { limit: F },
    Periodic { period: F, peaks: usize },
    Irregular,
    Unfeasible { stop: F },
}

impl<F: Real> Verdict<F> {
    pub fn label(&self) -> String {
        match self {
            Verdict::Steady { limit } => {
                format!("steady (limit {:.6})", limit.to_f64().unwrap_or(f64::NAN))
            }
            Verdict::Periodic { period, peaks } => format!(
                "periodic (period {:.4}, {} peak(s))",
                period.to_f64().unwrap_or(f64::NAN),
                peaks
            ),
            Verdict::Irregular => "irregular".into(),
            Verdict::Unfeasible { stop } => format!(
                "unfeasible (collapsed at t = {:.4})",
                stop.to_f64().unwrap_or(f64::NAN)
            ),
        }
    }
}

/// Classification result together with the window and tolerances it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailClassification<F> {
    pub verdict: Verdict<F>,
    pub window: (F, F),
    pub eps_eq: F,
    pub eps_per: F,
    pub max_period: usize,
}

/// Tolerances for [`classify_tail`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifySettings<F> {
    /// Steady verdict: max−min over the window below this.
    pub eps_eq: F,
    /// Periodic verdict: relative tolerance on recurring peak values and
    /// inter-peak intervals.
    pub eps_per: F,
    /// Longest peak-pattern period considered.
    pub max_period: usize,
}

impl<F: Real> Default for ClassifySettings<F> {
    fn default() -> Self {
        ClassifySettings {
            eps_eq: lit::<F>(1e-4),
            eps_per: lit::<F>(1e-3),
            max_period: 8,
        }
    }
}

/// Local maxima of the dense output inside `window`, located by sign change
/// of the stored node derivatives and refined on the Hermite interpolant.
pub fn peak_map<F: Real>(
    traj: &Trajectory<F>,
    window: (F, F),
) -> Result<Vec<(F, F)>, DiagnosticsError> {
    let (lo, hi) = window;
    if !(lo < hi) || hi > traj.end_time() || lo < traj.start_time() {
        return Err(DiagnosticsError::EmptyWindow {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let nodes: Vec<_> = traj.nodes().filter(|n| n.t >= lo && n.t <= hi).collect();
    let mut peaks = Vec::new();
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.dx > F::zero() && b.dx <= F::zero() {
            let (t, v) = refine_peak(traj, a.t, b.t);
            peaks.push((t, v));
        }
    }
    Ok(peaks)
}

/// Golden-section refinement of the maximum of the dense output on [a, b].
fn refine_peak<F: Real>(traj: &Trajectory<F>, a: F, b: F) -> (F, F) {
    let phi = lit::<F>(0.618_033_988_749_894_8);
    let mut lo = a;
    let mut hi = b;
    let eval = |t: F| traj.value_at(t).unwrap_or_else(|_| F::nan());
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..80 {
        if hi - lo <= (b - a) * lit::<F>(1e-12) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    let t = (lo + hi) / lit::<F>(2.0);
    (t, eval(t))
}

/// Classify the tail of a trajectory over `window`.
///
/// Order of precedence: a feasibility-loss event at or before the window end
/// is Unfeasible; an oscillation band below `eps_eq` is Steady; an m-periodic
/// peak pattern (values and inter-peak intervals within `eps_per` relative,
/// at least three full repetitions, m ≤ `max_period`) is Periodic; anything
/// else is Irregular. `delay_scale` sets the window-adequacy floor: the
/// window must span at least ten such intervals.
pub fn classify_tail<F: Real>(
    traj: &Trajectory<F>,
    window: (F, F),
    delay_scale: F,
    settings: &ClassifySettings<F>,
) -> Result<TailClassification<F>, DiagnosticsError> {
    let (lo, hi) = window;
    let done = |verdict| {
        Ok(TailClassification {
            verdict,
            window,
            eps_eq: settings.eps_eq,
            eps_per: settings.eps_per,
            max_period: settings.max_period,
        })
    };
    if let Some(stop) = traj.feasibility_loss() {
        if stop <= hi {
            return done(Verdict::Unfeasible { stop });
        }
    }
    if !(lo < hi) || hi > traj.end_time() {
        return Err(DiagnosticsError::EmptyWindow {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    if hi - lo < lit::<F>(10.0) * delay_scale {
        return Err(DiagnosticsError::WindowTooShort {
            len: (hi - lo).to_f64().unwrap_or(f64::NAN),
            delay: delay_scale.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut min = F::infinity();
    let mut max = F::neg_infinity();
    let mut sum = F::zero();
    let mut count = 0usize;
    for node in traj.nodes().filter(|n| n.t >= lo && n.t <= hi) {
        min = min.min(node.x);
        max = max.max(node.x);
        sum = sum + node.x;
        count += 1;
    }
    if count == 0 {
        return Err(DiagnosticsError::EmptyWindow {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    if max - min < settings.eps_eq {
        return done(Verdict::Steady {
            limit: sum / F::from_usize(count).expect("node count"),
        });
    }

    let peaks = peak_map(traj, window)?;
    if let Some((m, period)) = periodic_pattern(&peaks, settings.eps_per, settings.max_period) {
        return done(Verdict::Periodic { period, peaks: m });
    }
    done(Verdict::Irregular)
}

/// Smallest m such that peak values and inter-peak intervals are m-periodic
/// within `eps` relative, with at least three full repetitions observed.
fn periodic_pattern<F: Real>(peaks: &[(F, F)], eps: F, max_period: usize) -> Option<(usize, F)> {
    if peaks.len() < 4 {
        return None;
    }
    let intervals: Vec<F> = peaks.windows(2).map(|w| w[1].0 - w[0].0).collect();
    for m in 1..=max_period {
        // 3m intervals = three full repetitions of the pattern.
        if intervals.len() < 3 * m {
            continue;
        }
        let values_ok = (0..peaks.len() - m).all(|i| {
            let a = peaks[i].1;
            let b = peaks[i + m].1;
            (a - b).abs() <= eps * a.abs().max(b.abs()).max(F::min_positive_value())
        });
        if !values_ok {
            continue;
        }
        let intervals_ok = (0..intervals.len() - m).all(|i| {
            let a = intervals[i];
            let b = intervals[i + m];
            (a - b).abs() <= eps * a.abs().max(b.abs())
        });
        if !intervals_ok {
            continue;
        }
        let reps = intervals.len() / m;
        let period_sum = intervals.iter().fold(F::zero(), |acc, &d| acc + d);
        let period = period_sum / F::from_usize(intervals.len()).expect("intervals")
            * F::from_usize(m).expect("m");
        if reps >= 3 {
            return Some((m, period));
        }
    }
    None
}

/// Earliest grid time T with x(t) > ξ₀ for every node in [T, end]; `None`
/// when the trajectory still visits the increasing branch at its end.
pub fn monotone_domain_entry<F: Real>(traj: &Trajectory<F>, xi0: F) -> Option<F> {
    let nodes: Vec<_> = traj.nodes().collect();
    let mut entry: Option<F> = None;
    for node in &nodes {
        if node.x <= xi0 {
            entry = None;
        } else if entry.is_none() {
            entry = Some(node.t);
        }
    }
    entry
}

/// Mean log-growth rate per unit time of the separation between a run and a
/// twin offset by `perturbation` (sign = direction), renormalized every
/// delay interval against the reference trajectory.
///
/// Positive values flag sensitive dependence; contracting dynamics give
/// nonpositive values. Windows before 20% of the horizon are discarded as
/// transient.
pub fn divergence_exponent<F: Real>(
    params: &crate::model::MgParams<F>,
    schedule: &Schedule<F>,
    phi: &InitialFunction<F>,
    perturbation: F,
    horizon: F,
    step: Option<F>,
) -> Result<F, DiagnosticsError> {
    if perturbation == F::zero() || !perturbation.is_finite() {
        return Err(DiagnosticsError::NotApplicable(
            "perturbation must be nonzero and finite".into(),
        ));
    }
    let system = build_system(params, schedule).map_err(Box::new)?;
    let h = step.unwrap_or(schedule.delay_min() / lit::<F>(100.0));
    let reference = dde::integrate(&system, &phi.history(), horizon, h)?;
    if reference.feasibility_loss().is_some() {
        return Err(DiagnosticsError::NotApplicable(
            "reference run is unfeasible".into(),
        ));
    }
    let reference = std::sync::Arc::new(reference);
    let delta = perturbation.abs();
    let d_max = reference.max_delay();

    let mut t = F::zero();
    let mut log_sum = F::zero();
    let mut time_sum = F::zero();
    let transient_end = horizon * lit::<F>(0.2);
    loop {
        let span = schedule.tau_at(t);
        let t_next = t + span;
        if t_next > horizon {
            break;
        }
        if t >= transient_end {
            let base = reference.clone();
            let offset = perturbation;
            let hist = dde::History::with_reach(
                move |s| base.value_at(s).expect("window inside reference span") + offset,
                d_max,
            );
            let twin = dde::integrate_from(&system, &hist, t, t_next, h)?;
            if twin.feasibility_loss().is_some() {
                return Err(DiagnosticsError::NotApplicable(
                    "perturbed run is unfeasible".into(),
                ));
            }
            let sep = (twin.value_at(t_next)? - reference.value_at(t_next)?).abs();
            let sep = sep.max(delta * lit::<F>(1e-12));
            log_sum = log_sum + (sep / delta).ln();
            time_sum = time_sum + span;
        }
        t = t_next;
    }
    if time_sum <= F::zero() {
        return Err(DiagnosticsError::NotApplicable(
            "horizon leaves no post-transient windows".into(),
        ));
    }
    Ok(log_sum / time_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dde::{integrate, DdeRhs, History};
    use crate::model::MgParams;
    use crate::scenario::{ControlLaw, ScenarioConfig};

    struct Bench {
        a: f64,
        delay: f64,
        g: fn(f64) -> f64,
    }

    impl DdeRhs<f64> for Bench {
        fn delay_bounds(&self) -> (f64, f64) {
            (self.delay, self.delay)
        }
        fn decay(&self, _: usize, _: f64) -> f64 {
            self.a
        }
        fn delayed(&self, _: usize, _: f64, xi: f64) -> f64 {
            (self.g)(xi)
        }
        fn delay(&self, _: usize, _: f64, _: f64) -> f64 {
            self.delay
        }
    }

    #[test]
    fn peaks_empty_for_monotone_decay() {
        let rhs = Bench {
            a: 1.0,
            delay: 1.0,
            g: |_| 0.0,
        };
        let traj = integrate(&rhs, &History::constant(1.0), 10.0, 0.01).unwrap();
        let peaks = peak_map(&traj, (1.0, 10.0)).unwrap();
        assert!(peaks.is_empty());
        assert!(peak_map(&traj, (5.0, 5.0)).is_err());
    }

    #[test]
    fn peaks_of_sine_at_quarter_period() {
        let rhs = Bench {
            a: 0.0,
            delay: std::f64::consts::FRAC_PI_2,
            g: |xi| -xi,
        };
        let hist = History::new(|t: f64| t.sin());
        let horizon = 8.0 * std::f64::consts::PI;
        let traj = integrate(&rhs, &hist, horizon, 0.01).unwrap();
        let peaks = peak_map(&traj, (0.0, horizon)).unwrap();
        assert_eq!(peaks.len(), 4);
        for (i, (t, v)) in peaks.iter().enumerate() {
            let expect = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * i as f64;
            assert!(
                (t - expect).abs() < 1e-4,
                "peak {i} at {t}, expected {expect}"
            );
            assert!((v - 1.0).abs() < 1e-6, "peak value {v}");
        }
    }

    #[test]
    fn classify_sine_as_period_one() {
        let rhs = Bench {
            a: 0.0,
            delay: std::f64::consts::FRAC_PI_2,
            g: |xi| -xi,
        };
        let hist = History::new(|t: f64| t.sin());
        let horizon = 16.0 * std::f64::consts::PI;
        let traj = integrate(&rhs, &hist, horizon, 0.01).unwrap();
        let tc = classify_tail(&traj, (0.0, horizon), 2.0, &ClassifySettings::default()).unwrap();
        match tc.verdict {
            Verdict::Periodic { period, peaks } => {
                assert_eq!(peaks, 1);
                assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-3);
            }
            other => panic!("expected periodic, got {other:?}"),
        }
    }

    #[test]
    fn classify_case_b_as_steady_at_equilibrium() {
        let params = MgParams::<f64>::new(1.0, 1.1, 10.0).unwrap();
        let schedule = Schedule::uniform(ControlLaw::None, 2.0).unwrap();
        let config = ScenarioConfig {
            params,
            schedule,
            phi: InitialFunction::Constant { a: 0.3 },
            horizon: 120.0,
            step: None,
            classify: None,
        };
        let out = crate::scenario::run_scenario(&config).unwrap();
        let tc = out.segments[0].verdict.expect("verdict");
        let k_eq = params.landmarks().equilibrium.unwrap();
        match tc.verdict {
            Verdict::Steady { limit } => assert!((limit - k_eq).abs() < 1e-3),
            other => panic!("expected steady, got {other:?}"),
        }
    }

    #[test]
    fn classify_unfeasible_collapse() {
        let params = MgParams::<f64>::new(1.0, 2.0, 9.65).unwrap();
        let schedule = Schedule::uniform(ControlLaw::Constant(-0.69), 3.0).unwrap();
        let phi = InitialFunction::Exponential {
            a: 0.0,
            b: -1.2,
            c: 0.1,
            d: 1.0,
        };
        let config = ScenarioConfig {
            params,
            schedule,
            phi,
            horizon: 120.0,
            step: None,
            classify: None,
        };
        let out = crate::scenario::run_scenario(&config).unwrap();
        let tc = out.segments[0].verdict.expect("verdict");
        assert!(matches!(tc.verdict, Verdict::Unfeasible { .. }));
        assert!(out.trajectory.feasibility_loss().is_some());
    }

    #[test]
    fn window_too_short_guard() {
        let rhs = Bench {
            a: 1.0,
            delay: 1.0,
            g: |_| 0.0,
        };
        let traj = integrate(&rhs, &History::constant(1.0), 10.0, 0.01).unwrap();
        assert!(matches!(
            classify_tail(&traj, (0.0, 5.0), 1.0, &ClassifySettings::default()),
            Err(DiagnosticsError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn monotone_domain_entry_cases() {
        let params = MgParams::<f64>::new(1.0, 2.0, 9.65).unwrap();
        let xi0 = params.xi0();
        // Constant history at K > xi0: enters immediately.
        let schedule = Schedule::uniform(ControlLaw::None, 3.0).unwrap();
        let sys = build_system(&params, &schedule).unwrap();
        let traj = integrate(&sys, &History::constant(1.0), 10.0, 0.03).unwrap();
        assert_eq!(monotone_domain_entry(&traj, xi0), Some(0.0));
        // Chaotic baseline keeps dipping below xi0.
        let phi = InitialFunction::Sinusoid {
            a: 2.0,
            b: 0.02,
            c: 1.0,
            d: 0.0,
        };
        let traj = integrate(&sys, &phi.history(), 150.0, 0.03).unwrap();
        assert_eq!(monotone_domain_entry(&traj, xi0), None);
    }

    #[test]
    fn divergence_sign_separates_regimes() {
        // Contracting case B: nonpositive rate.
        let params = MgParams::<f64>::new(1.0, 1.1, 10.0).unwrap();
        let schedule = Schedule::uniform(ControlLaw::None, 2.0).unwrap();
        let phi = InitialFunction::Constant { a: 0.3 };
        let rate = divergence_exponent(&params, &schedule, &phi, 1e-8, 150.0, None).unwrap();
        assert!(rate <= 0.0, "case B rate {rate}");

        // Chaotic uncontrolled baseline: positive rate.
        let params = MgParams::<f64>::new(1.0, 2.0, 9.65).unwrap();
        let schedule = Schedule::uniform(ControlLaw::None, 3.0).unwrap();
        let phi = InitialFunction::Sinusoid {
            a: 2.0,
            b: 0.02,
            c: 1.0,
            d: 0.0,
        };
        let rate = divergence_exponent(&params, &schedule, &phi, 1e-8, 300.0, None).unwrap();
        assert!(rate > 0.005, "chaotic rate {rate}");

        // Pyragas above the bound: strongly contracting.
        let params = MgParams::<f64>::new(1.08, 2.0, 9.65).unwrap();
        let schedule = Schedule::uniform(ControlLaw::Pyragas(3.9), 3.0).unwrap();
        let phi = InitialFunction::Exponential {
            a: 1.0,
            b: 0.0,
            c: 0.1,
            d: -1.0,
        };
        let rate = divergence_exponent(&params, &schedule, &phi, 1e-8, 150.0, None).unwrap();
        assert!(rate < 0.0, "pyragas rate {rate}");
    }

    #[test]
    fn divergence_not_applicable_on_collapse() {
        let params = MgParams::<f64>::new(1.0, 2.0, 9.65).unwrap();
        let schedule = Schedule::uniform(ControlLaw::Constant(-0.69), 3.0).unwrap();
        let phi = InitialFunction::Exponential {
            a: 0.0,
            b: -1.2,
            c: 0.1,
            d: 1.0,
        };
        assert!(matches!(
            divergence_exponent(&params, &schedule, &phi, 1e-8, 120.0, None),
            Err(DiagnosticsError::NotApplicable(_))
        ));
    }

    #[test]
    fn verdict_stable_under_window_shift() {
        let params = MgParams::<f64>::new(1.0, 2.0, 9.65).unwrap();
        let schedule = Schedule::uniform(ControlLaw::None, 3.0).unwrap();
        let phi = InitialFunction::Sinusoid {
            a: 2.0,
            b: 0.02,
            c: 1.0,
            d: 0.0,
        };
        let sys = build_system(&params, &schedule).unwrap();
        let traj = integrate(&sys, &phi.history(), 200.0, 0.03).unwrap();
        let s = ClassifySettings::default();
        let a = classify_tail(&traj, (150.0, 197.0), 3.0, &s).unwrap();
        let b = classify_tail(&traj, (153.0, 200.0), 3.0, &s).unwrap();
        assert_eq!(
            std::mem::discriminant(&a.verdict),
            std::mem::discriminant(&b.verdict)
        );
    }
}
