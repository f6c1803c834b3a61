//! Method-of-steps integration of scalar delay differential equations
//!
//! ```text
//! x'(t) = -a(t) x(t) + G(t, x(t - d(t, x(t)))) + c(t) x(t)
//! ```
//!
//! Classic fixed-step RK4 with a cubic Hermite continuous extension; the
//! step bound h < d_min/10 keeps every delayed stage lookup inside the
//! committed past, so constant, piecewise-constant and state-dependent
//! delays all integrate explicitly.

use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdeError {
    #[error("step too large: h = {h} must be below d_min/10 = {limit}")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("history does not cover the delay span: reaches {reach} back, need {needed}")]
    HistoryGap { reach: f64, needed: f64 },
    #[error("query time {t} outside the trajectory span [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Right-hand side of a scalar DDE, split into decay, delayed map, delay
/// law and an optional instantaneous gain. Time dependence is piecewise:
/// `breakpoints` lists the interior switching instants and every query
/// carries the index of the active piece, so both one-sided values at a
/// switch are available to the integrator.
pub trait DdeRhs<F: Real> {
    /// (d_min, d_max) over all times, states and segments; d_min > 0.
    fn delay_bounds(&self) -> (F, F);

    /// Interior switching instants, strictly increasing. Segment `i` spans
    /// `[b_{i-1}, b_i)` with `b_{-1} = -inf`.
    fn breakpoints(&self) -> Vec<F> {
        Vec::new()
    }

    /// Decay coefficient a(t) of the -a(t)x(t) term.
    fn decay(&self, seg: usize, t: F) -> F;

    /// Delayed map G(t, ξ).
    fn delayed(&self, seg: usize, t: F, xi: F) -> F;

    /// Delay law d(t, x).
    fn delay(&self, seg: usize, t: F, x: F) -> F;

    /// Optional instantaneous gain c(t) of the +c(t)x(t) term.
    fn gain(&self, seg: usize, t: F) -> F {
        let _ = (seg, t);
        F::zero()
    }

    /// Whether the integrator should watch for loss of nonnegativity and
    /// truncate at the zero crossing. Mackey–Glass systems enable this;
    /// generic benchmarks (which may legitimately cross zero) do not.
    fn monitor_nonnegative(&self) -> bool {
        false
    }
}

/// Initial history φ: evaluable at any t ≤ t₀, optionally limited to
/// `reach` time units back.
#[derive(Clone)]
pub struct History<F> {
    f: Arc<dyn Fn(F) -> F + Send + Sync>,
    reach: Option<F>,
}

impl<F: Real> History<F> {
    /// History valid arbitrarily far back.
    pub fn new(f: impl Fn(F) -> F + Send + Sync + 'static) -> Self {
        History {
            f: Arc::new(f),
            reach: None,
        }
    }

    /// History valid only `reach` time units before the start time.
    pub fn with_reach(f: impl Fn(F) -> F + Send + Sync + 'static, reach: F) -> Self {
        History {
            f: Arc::new(f),
            reach: Some(reach),
        }
    }

    pub fn constant(a: F) -> Self {
        History::new(move |_| a)
    }

    pub fn eval(&self, t: F) -> F {
        (self.f)(t)
    }

    pub fn reach(&self) -> Option<F> {
        self.reach
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    ControlSwitch,
    FeasibilityLoss,
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<F> {
    pub time: F,
    pub kind: EventKind,
}

/// One uniform-step span of the solution; pieces abut at RHS breakpoints,
/// where the stored one-sided derivatives may differ.
#[derive(Clone)]
struct Piece<F> {
    t0: F,
    h: F,
    values: Vec<F>,
    derivs: Vec<F>,
}

impl<F: Real> Piece<F> {
    fn node_time(&self, j: usize) -> F {
        self.t0 + self.h * F::from_usize(j).expect("node index")
    }

    fn end(&self) -> F {
        self.node_time(self.values.len().saturating_sub(1))
    }

    /// Cubic Hermite evaluation; exact at the nodes.
    fn eval(&self, t: F) -> F {
        let steps = self.values.len() - 1;
        if steps == 0 {
            return self.values[0];
        }
        let pos = ((t - self.t0) / self.h).floor();
        let mut j = pos.to_usize().unwrap_or(0);
        if j >= steps {
            j = steps - 1;
        }
        // Exact node hits bypass interpolation so grid values reproduce
        // bit-for-bit.
        if t == self.node_time(j) {
            return self.values[j];
        }
        if t == self.node_time(j + 1) {
            return self.values[j + 1];
        }
        let tj = self.node_time(j);
        let s = (t - tj) / self.h;
        hermite(
            self.values[j],
            self.derivs[j],
            self.values[j + 1],
            self.derivs[j + 1],
            self.h,
            s,
        )
    }
}

fn hermite<F: Real>(x0: F, d0: F, x1: F, d1: F, h: F, s: F) -> F {
    let one = F::one();
    let two = lit::<F>(2.0);
    let three = lit::<F>(3.0);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = two * s3 - three * s2 + one;
    let h10 = s3 - two * s2 + s;
    let h01 = -two * s3 + three * s2;
    let h11 = s3 - s2;
    h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1
}

/// Dense-output numerical solution with node (value, derivative) pairs and
/// an event log. Immutable after integration.
#[derive(Clone)]
pub struct Trajectory<F: Real> {
    start: F,
    end: F,
    d_max: F,
    pieces: Vec<Piece<F>>,
    events: Vec<Event<F>>,
    history: History<F>,
}

/// A committed node: time, value and the RHS derivative stored there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<F> {
    pub t: F,
    pub x: F,
    pub dx: F,
}

impl<F: Real> Trajectory<F> {
    pub fn start_time(&self) -> F {
        self.start
    }

    /// Last committed time: the horizon, or the feasibility-loss instant
    /// when the run was truncated.
    pub fn end_time(&self) -> F {
        self.end
    }

    pub fn max_delay(&self) -> F {
        self.d_max
    }

    pub fn events(&self) -> &[Event<F>] {
        &self.events
    }

    /// Time of the feasibility-loss event, if the run was truncated.
    pub fn feasibility_loss(&self) -> Option<F> {
        self.events
            .iter()
            .find(|e| e.kind == EventKind::FeasibilityLoss)
            .map(|e| e.time)
    }

    /// Dense evaluation: Hermite interpolation on [start, end], the initial
    /// history on [start − d_max, start].
    pub fn value_at(&self, t: F) -> Result<F, DdeError> {
        if t <= self.start {
            if t < self.start - self.d_max {
                return Err(self.out_of_range(t));
            }
            return Ok(self.history.eval(t));
        }
        if t > self.end {
            return Err(self.out_of_range(t));
        }
        Ok(self.eval_committed(t))
    }

    fn out_of_range(&self, t: F) -> DdeError {
        DdeError::OutOfRange {
            t: t.to_f64().unwrap_or(f64::NAN),
            lo: (self.start - self.d_max).to_f64().unwrap_or(f64::NAN),
            hi: self.end.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn eval_committed(&self, t: F) -> F {
        let idx = self.pieces.partition_point(|p| p.end() < t);
        let piece = if idx >= self.pieces.len() {
            self.pieces
                .last()
                .expect("trajectory has at least one piece")
        } else {
            &self.pieces[idx]
        };
        piece.eval(t)
    }

    /// Committed nodes in time order, boundary duplicates skipped, truncated
    /// at the end time.
    pub fn nodes(&self) -> impl Iterator<Item = Node<F>> + '_ {
        let end = self.end;
        self.pieces
            .iter()
            .enumerate()
            .flat_map(move |(pi, piece)| {
                let skip = usize::from(pi > 0);
                (skip..piece.values.len()).map(move |j| Node {
                    t: piece.node_time(j),
                    x: piece.values[j],
                    dx: piece.derivs[j],
                })
            })
            .filter(move |node| node.t <= end)
    }

    pub fn history(&self) -> &History<F> {
        &self.history
    }
}

/// Integrate from t₀ = 0; see [`integrate_from`].
pub fn integrate<F: Real, R: DdeRhs<F> + ?Sized>(
    rhs: &R,
    history: &History<F>,
    horizon: F,
    h: F,
) -> Result<Trajectory<F>, DdeError> {
    integrate_from(rhs, history, F::zero(), horizon, h)
}

/// Integrate the DDE on [t₀, t_end] with nominal step h.
///
/// Per span between breakpoints the actual step is len/ceil(len/h) ≤ h, so
/// nodes land exactly on switching instants and the grid is uniform within
/// each span. Requires h < d_min/10 and a history reaching d_max back.
pub fn integrate_from<F: Real, R: DdeRhs<F> + ?Sized>(
    rhs: &R,
    history: &History<F>,
    t0: F,
    t_end: F,
    h: F,
) -> Result<Trajectory<F>, DdeError> {
    let (d_min, d_max) = rhs.delay_bounds();
    if !(d_min > F::zero()) || !(d_max >= d_min) {
        return Err(DdeError::BadInput(format!(
            "delay bounds must satisfy 0 < d_min <= d_max (got {}, {})",
            d_min.to_f64().unwrap_or(f64::NAN),
            d_max.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if !(h > F::zero()) || !h.is_finite() {
        return Err(DdeError::BadInput(format!(
            "step must be positive (got {})",
            h.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if !(t_end > t0) {
        return Err(DdeError::BadInput(
            "horizon must exceed the start time".into(),
        ));
    }
    let ten = lit::<F>(10.0);
    if h >= d_min / ten {
        return Err(DdeError::StepTooLarge {
            h: h.to_f64().unwrap_or(f64::NAN),
            limit: (d_min / ten).to_f64().unwrap_or(f64::NAN),
        });
    }
    if let Some(reach) = history.reach() {
        if reach < d_max {
            return Err(DdeError::HistoryGap {
                reach: reach.to_f64().unwrap_or(f64::NAN),
                needed: d_max.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let all_breaks = rhs.breakpoints();
    for w in all_breaks.windows(2) {
        if !(w[0] < w[1]) {
            return Err(DdeError::BadInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
    }
    // Span boundaries inside (t0, t_end), with the segment index active on
    // each span taken from the full breakpoint list.
    let mut boundaries: Vec<(F, bool)> = Vec::new();
    for &b in &all_breaks {
        if b > t0 && b < t_end {
            boundaries.push((b, true));
        }
    }
    boundaries.push((t_end, false));

    let mut traj = Trajectory {
        start: t0,
        end: t0,
        d_max,
        pieces: Vec::new(),
        events: Vec::new(),
        history: history.clone(),
    };
    let monitor = rhs.monitor_nonnegative();
    let mut x = history.eval(t0);
    let mut span_start = t0;

    for &(span_end, is_switch) in &boundaries {
        let seg = all_breaks.partition_point(|&s| s <= span_start);
        let len = span_end - span_start;
        let m = (len / h).ceil().to_usize().unwrap_or(1).max(1);
        let h_span = len / F::from_usize(m).expect("span steps");

        let d0 = eval_rhs(rhs, &traj, seg, span_start, x);
        traj.pieces.push(Piece {
            t0: span_start,
            h: h_span,
            values: vec![x],
            derivs: vec![d0],
        });

        for j in 0..m {
            let t = span_start + h_span * F::from_usize(j).expect("node index");
            let t_next = span_start + h_span * F::from_usize(j + 1).expect("node index");
            let piece = traj.pieces.last().expect("current piece");
            let k1 = piece.derivs[j];
            let half = h_span / lit::<F>(2.0);
            let t_half = t + half;
            let k2 = eval_rhs(rhs, &traj, seg, t_half, x + half * k1);
            let k3 = eval_rhs(rhs, &traj, seg, t_half, x + half * k2);
            let k4 = eval_rhs(rhs, &traj, seg, t_next, x + h_span * k3);
            let six = lit::<F>(6.0);
            let two = lit::<F>(2.0);
            let x_next = x + h_span / six * (k1 + two * (k2 + k3) + k4);
            let d_next = eval_rhs(rhs, &traj, seg, t_next, x_next);

            let crossing = if monitor {
                first_zero_crossing(x, piece.derivs[j], x_next, d_next, h_span)
            } else {
                None
            };

            let piece = traj.pieces.last_mut().expect("current piece");
            piece.values.push(x_next);
            piece.derivs.push(d_next);

            if let Some(s_cross) = crossing {
                let t_cross = t + h_span * s_cross;
                traj.end = t_cross;
                traj.events.push(Event {
                    time: t_cross,
                    kind: EventKind::FeasibilityLoss,
                });
                return Ok(traj);
            }
            x = x_next;
            traj.end = t_next;
        }
        if is_switch {
            traj.events.push(Event {
                time: span_end,
                kind: EventKind::ControlSwitch,
            });
        }
        span_start = span_end;
    }
    traj.events.push(Event {
        time: t_end,
        kind: EventKind::Horizon,
    });
    traj.end = t_end;
    Ok(traj)
}

fn eval_rhs<F: Real, R: DdeRhs<F> + ?Sized>(
    rhs: &R,
    traj: &Trajectory<F>,
    seg: usize,
    t: F,
    x: F,
) -> F {
    let d = rhs.delay(seg, t, x);
    let t_delayed = t - d;
    let xd = if t_delayed <= traj.start {
        traj.history.eval(t_delayed)
    } else {
        traj.eval_committed(t_delayed)
    };
    (rhs.gain(seg, t) - rhs.decay(seg, t)) * x + rhs.delayed(seg, t, xd)
}

/// First s in (0, 1] where the Hermite interpolant on a step crosses zero,
/// assuming the left value is nonnegative. Checks the right node and the
/// interior minimum of the cubic.
fn first_zero_crossing<F: Real>(x0: F, d0: F, x1: F, d1: F, h: F) -> Option<F> {
    let eval = |s: F| hermite(x0, d0, x1, d1, h, s);
    let negative_at = if x1 < F::zero() {
        Some(F::one())
    } else {
        interior_minimum(x0, d0, x1, d1, h).filter(|&s| eval(s) < F::zero())
    };
    let s_neg = negative_at?;
    let mut lo = F::zero();
    let mut hi = s_neg;
    let two = lit::<F>(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid == lo || mid == hi {
            break;
        }
        if eval(mid) < F::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo + hi) / two)
}

/// Location of the interior local minimum of the Hermite cubic, if any:
/// root of the quadratic derivative with positive curvature.
fn interior_minimum<F: Real>(x0: F, d0: F, x1: F, d1: F, h: F) -> Option<F> {
    let one = F::one();
    let two = lit::<F>(2.0);
    let three = lit::<F>(3.0);
    let six = lit::<F>(6.0);
    // H'(s)/h-terms: H(s) = sum of basis * coeffs; derivative in s:
    // H'(s) = (6s^2-6s)(x0-x1) + h(3s^2-4s+1)d0 + h(3s^2-2s)d1.
    let a = six * (x0 - x1) + three * h * (d0 + d1);
    let b = -six * (x0 - x1) - h * (lit::<F>(4.0) * d0 + two * d1);
    let c = h * d0;
    let roots = quadratic_roots(a, b, c)?;
    let second = |s: F| two * a * s + b;
    roots
        .into_iter()
        .find(|&s| s > F::zero() && s < one && second(s) > F::zero())
}

fn quadratic_roots<F: Real>(a: F, b: F, c: F) -> Option<[F; 2]> {
    let two = lit::<F>(2.0);
    if a == F::zero() {
        if b == F::zero() {
            return None;
        }
        let r = -c / b;
        return Some([r, r]);
    }
    let disc = b * b - lit::<F>(4.0) * a * c;
    if disc < F::zero() {
        return None;
    }
    let sq = disc.sqrt();
    // Numerically stable split.
    let q = if b >= F::zero() {
        -(b + sq) / two
    } else {
        (-b + sq) / two
    };
    let r1 = q / a;
    let r2 = if q == F::zero() { r1 } else { c / q };
    Some(if r1 <= r2 { [r1, r2] } else { [r2, r1] })
}

/// Richardson order estimate from runs at h, h/2 and h/4, measured in the
/// max norm over `window`. For clean estimates the window should start well
/// past the initial function's derivative discontinuities (≥ 5 d_max).
pub fn convergence_order<F: Real, R: DdeRhs<F> + ?Sized>(
    rhs: &R,
    history: &History<F>,
    horizon: F,
    window: (F, F),
    h: F,
) -> Result<F, DdeError> {
    let two = lit::<F>(2.0);
    let four = lit::<F>(4.0);
    if !(window.0 < window.1) || window.1 > horizon {
        return Err(DdeError::BadInput(
            "window must be increasing and inside the horizon".into(),
        ));
    }
    let t1 = integrate(rhs, history, horizon, h)?;
    let t2 = integrate(rhs, history, horizon, h / two)?;
    let t4 = integrate(rhs, history, horizon, h / four)?;
    let n_probe = 256;
    let mut e1 = F::zero();
    let mut e2 = F::zero();
    for i in 0..=n_probe {
        let t = window.0
            + (window.1 - window.0) * F::from_usize(i).expect("probe")
                / F::from_usize(n_probe).expect("probe");
        let v1 = t1.value_at(t)?;
        let v2 = t2.value_at(t)?;
        let v4 = t4.value_at(t)?;
        e1 = e1.max((v1 - v2).abs());
        e2 = e2.max((v2 - v4).abs());
    }
    if e2 == F::zero() {
        return Err(DdeError::BadInput(
            "refinement differences vanished; window too easy".into(),
        ));
    }
    Ok((e1 / e2).log2())
}
