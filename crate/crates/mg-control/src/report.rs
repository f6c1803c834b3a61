//! Machine-readable run report: the exact config used, landmark values,
//! applicable thresholds, per-segment certificates and verdicts, and the
//! event log.

use serde::Serialize;

use crate::config::ConfigFile;
use crate::dde::EventKind;
use crate::design;
use crate::diagnostics::Verdict;
use crate::model::MgParams;
use crate::scenario::ScenarioOutcome;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub config: ConfigFile,
    pub case: String,
    pub landmarks: LandmarksJson,
    pub thresholds: ThresholdsJson,
    pub segments: Vec<SegmentJson>,
    pub events: Vec<EventJson>,
}

#[derive(Debug, Serialize)]
pub struct LandmarksJson {
    pub xi0: f64,
    pub f_max: f64,
    pub beta: f64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<f64>,
}

#[derive(Debug, Serialize, Default)]
pub struct ThresholdsJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proportional: Option<ProportionalJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pyragas_k_py: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ConstantJson {
    pub xi_mu: f64,
    pub k1: f64,
    pub k2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_star: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ProportionalJson {
    pub w0: f64,
    pub w_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_window: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct SegmentJson {
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub tau: f64,
    pub law: String,
    pub certificates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peaks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct EventJson {
    pub t: f64,
    pub kind: String,
}

impl From<&Verdict<f64>> for VerdictJson {
    fn from(v: &Verdict<f64>) -> Self {
        match *v {
            Verdict::Steady { limit } => VerdictJson {
                kind: "steady".into(),
                limit: Some(limit),
                period: None,
                peaks: None,
                stop: None,
            },
            Verdict::Periodic { period, peaks } => VerdictJson {
                kind: "periodic".into(),
                limit: None,
                period: Some(period),
                peaks: Some(peaks),
                stop: None,
            },
            Verdict::Irregular => VerdictJson {
                kind: "irregular".into(),
                limit: None,
                period: None,
                peaks: None,
                stop: None,
            },
            Verdict::Unfeasible { stop } => VerdictJson {
                kind: "unfeasible".into(),
                limit: None,
                period: None,
                peaks: None,
                stop: Some(stop),
            },
        }
    }
}

/// Assemble the report for a finished run.
pub fn build_report(
    config: &ConfigFile,
    params: &MgParams<f64>,
    outcome: &ScenarioOutcome<f64>,
) -> RunReport {
    let lm = params.landmarks();
    let mut thresholds = ThresholdsJson::default();
    if let Ok(th) = design::constant_thresholds(params) {
        thresholds.constant = Some(ConstantJson {
            xi_mu: th.xi_mu,
            k1: th.k1,
            k2: th.k2,
            k3: th.k3,
            k_star: th.k_star,
        });
    }
    if let Ok(th) = design::proportional_thresholds(params) {
        thresholds.proportional = Some(ProportionalJson {
            w0: th.w0,
            w_hat: th.w_hat,
            w_star: th.w_star,
            k_window: th.k_window,
        });
    }
    if let Ok(py) = design::pyragas_design(params) {
        thresholds.pyragas_k_py = Some(py.k_py);
    }

    RunReport {
        schema: crate::config::SCHEMA_VERSION,
        config: config.clone(),
        case: params.case().to_string(),
        landmarks: LandmarksJson {
            xi0: lm.xi0,
            f_max: lm.f_max,
            beta: lm.beta,
            alpha: lm.alpha,
            equilibrium: lm.equilibrium,
            conjugate: lm.conjugate,
        },
        thresholds,
        segments: outcome
            .segments
            .iter()
            .map(|s| SegmentJson {
                index: s.index,
                start: s.start,
                end: s.end,
                tau: s.tau,
                law: s.law.clone(),
                certificates: s.certificates.iter().map(|c| c.label()).collect(),
                window: s.window,
                verdict: s.verdict.as_ref().map(|tc| VerdictJson::from(&tc.verdict)),
            })
            .collect(),
        events: outcome
            .trajectory
            .events()
            .iter()
            .map(|e| EventJson {
                t: e.time,
                kind: match e.kind {
                    EventKind::ControlSwitch => "control-switch".into(),
                    EventKind::FeasibilityLoss => "feasibility-loss".into(),
                    EventKind::Horizon => "horizon".into(),
                },
            })
            .collect(),
    }
}
