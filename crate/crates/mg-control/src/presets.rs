//! Bundled demonstration presets: six canonical runs showing each control
//! law taking a chaotic baseline to a regular regime (or collapsing it),
//! together with the regime sequence each run is expected to produce.

use std::f64::consts::FRAC_PI_2;

use crate::config::{
    ClassifyConfig, ConfigFile, LawConfig, LawKind, ParamsConfig, PhiConfig, PhiFamily,
    SegmentConfig,
};
use crate::diagnostics::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig1Left,
    Fig1Right,
    Fig2Left,
    Fig2Right,
    Fig3Left,
    Fig3Right,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig1Left,
        Figure::Fig1Right,
        Figure::Fig2Left,
        Figure::Fig2Right,
        Figure::Fig3Left,
        Figure::Fig3Right,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Figure::Fig1Left => "fig1-left",
            Figure::Fig1Right => "fig1-right",
            Figure::Fig2Left => "fig2-left",
            Figure::Fig2Right => "fig2-right",
            Figure::Fig3Left => "fig3-left",
            Figure::Fig3Right => "fig3-right",
        }
    }

    pub fn from_id(id: &str) -> Option<Figure> {
        Figure::ALL.iter().copied().find(|f| f.id() == id)
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Figure::Fig1Left => "constant control k=0.39 switched on at t=80",
            Figure::Fig1Right => "constant control stepped down: 0, -0.48, -0.62, -0.69",
            Figure::Fig2Left => "proportional control k=-0.507 switched on at t=80",
            Figure::Fig2Right => "proportional k=-0.022 with delay dropped to 0.125 then restored",
            Figure::Fig3Left => "pyragas control stepped up: 0, 0.08, 0.95, 3.9",
            Figure::Fig3Right => {
                "step delay reduction (5 above the equilibrium, 4 below) from t=31"
            }
        }
    }
}

/// What a segment's tail is expected to look like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectedRegime {
    Irregular,
    Periodic,
    Steady,
    SteadyAt {
        limit: f64,
        tol: f64,
    },
    /// Steady or periodic: the certificate only promises regularity.
    Regular,
    /// Collapse strictly after the given time.
    UnfeasibleAfter(f64),
}

impl ExpectedRegime {
    pub fn label(&self) -> String {
        match self {
            ExpectedRegime::Irregular => "irregular".into(),
            ExpectedRegime::Periodic => "periodic".into(),
            ExpectedRegime::Steady => "steady".into(),
            ExpectedRegime::SteadyAt { limit, tol } => format!("steady at {limit} (±{tol})"),
            ExpectedRegime::Regular => "steady-or-periodic".into(),
            ExpectedRegime::UnfeasibleAfter(t) => format!("unfeasible after t={t}"),
        }
    }

    pub fn matches(&self, verdict: &Verdict<f64>) -> bool {
        match (self, verdict) {
            (ExpectedRegime::Irregular, Verdict::Irregular) => true,
            (ExpectedRegime::Periodic, Verdict::Periodic { .. }) => true,
            (ExpectedRegime::Steady, Verdict::Steady { .. }) => true,
            (ExpectedRegime::SteadyAt { limit, tol }, Verdict::Steady { limit: got }) => {
                (got - limit).abs() <= *tol
            }
            (ExpectedRegime::Regular, Verdict::Steady { .. }) => true,
            (ExpectedRegime::Regular, Verdict::Periodic { .. }) => true,
            (ExpectedRegime::UnfeasibleAfter(after), Verdict::Unfeasible { stop }) => stop > after,
            _ => false,
        }
    }
}

fn seg(t_start: f64, law: LawConfig, tau: f64) -> SegmentConfig {
    SegmentConfig { t_start, law, tau }
}

/// The preset switch times leave only ~50 time units per segment,
/// so the orbit the tail settles on is still drifting at the default 1e-3
/// peak tolerance (intervals settle at the 1e-2 scale, against chaotic
/// spreads of order 0.3). The presets widen the peak tolerance accordingly;
/// the steady tolerance keeps its default.
const PRESET_TOLERANCES: ClassifyConfig = ClassifyConfig {
    eps_eq: None,
    eps_per: Some(2.5e-2),
    max_period: None,
};

/// The scenario behind a preset, as an ordinary config document.
pub fn preset(fig: Figure) -> ConfigFile {
    match fig {
        Figure::Fig1Left => ConfigFile {
            schema: 1,
            params: ParamsConfig {
                mu: 1.0,
                p: 2.0,
                n: 9.65,
            },
            segments: vec![
                seg(0.0, LawConfig::none(), 3.0),
                seg(80.0, LawConfig::gain(LawKind::Constant, 0.39), 3.0),
            ],
            phi: PhiConfig {
                family: PhiFamily::Sinusoid,
                a: 2.0,
                b: Some(0.02),
                c: Some(1.0),
                d: None,
                slope: None,
            },
            horizon: 160.0,
            step: None,
            classify: Some(PRESET_TOLERANCES),
            output: None,
        },
        Figure::Fig1Right => ConfigFile {
            schema: 1,
            params: ParamsConfig {
                mu: 1.0,
                p: 2.0,
                n: 9.65,
            },
            segments: vec![
                seg(0.0, LawConfig::none(), 3.0),
                seg(50.0, LawConfig::gain(LawKind::Constant, -0.48), 3.0),
                seg(100.0, LawConfig::gain(LawKind::Constant, -0.62), 3.0),
                seg(150.0, LawConfig::gain(LawKind::Constant, -0.69), 3.0),
            ],
            phi: PhiConfig {
                family: PhiFamily::Exponential,
                a: 0.0,
                b: Some(0.1),
                c: Some(1.0),
                d: None,
                slope: Some(-1.2),
            },
            horizon: 200.0,
            step: None,
            classify: Some(PRESET_TOLERANCES),
            output: None,
        },
        Figure::Fig2Left => ConfigFile {
            schema: 1,
            params: ParamsConfig {
                mu: 1.275,
                p: 2.0,
                n: 20.0,
            },
            segments: vec![
                seg(0.0, LawConfig::none(), 3.11),
                seg(80.0, LawConfig::gain(LawKind::Proportional, -0.507), 3.11),
            ],
            phi: PhiConfig {
                family: PhiFamily::Sinusoid,
                a: 0.5,
                b: Some(0.01),
                c: Some(2.0),
                d: Some(FRAC_PI_2),
                slope: None,
            },
            horizon: 160.0,
            step: None,
            classify: Some(PRESET_TOLERANCES),
            output: None,
        },
        Figure::Fig2Right => ConfigFile {
            schema: 1,
            params: ParamsConfig {
                mu: 0.97,
                p: 2.0,
                n: 27.9,
            },
            segments: vec![
                seg(0.0, LawConfig::none(), 3.0),
                seg(50.0, LawConfig::gain(LawKind::Proportional, -0.022), 0.125),
                seg(100.0, LawConfig::gain(LawKind::Proportional, -0.022), 3.0),
            ],
            phi: PhiConfig {
                family: PhiFamily::Affine,
                a: 1.0,
                b: Some(0.1),
                c: None,
                d: None,
                slope: None,
            },
            horizon: 150.0,
            step: None,
            classify: Some(PRESET_TOLERANCES),
            output: None,
        },
        Figure::Fig3Left => ConfigFile {
            schema: 1,
            params: ParamsConfig {
                mu: 1.08,
                p: 2.0,
                n: 9.65,
            },
            segments: vec![
                seg(0.0, LawConfig::none(), 3.0),
                seg(50.0, LawConfig::gain(LawKind::Pyragas, 0.08), 3.0),
                seg(100.0, LawConfig::gain(LawKind::Pyragas, 0.95), 3.0),
                seg(150.0, LawConfig::gain(LawKind::Pyragas, 3.9), 3.0),
            ],
            phi: PhiConfig {
                family: PhiFamily::Exponential,
                a: 1.0,
                b: Some(0.1),
                c: Some(-1.0),
                d: None,
                slope: None,
            },
            horizon: 200.0,
            step: None,
            classify: Some(PRESET_TOLERANCES),
            output: None,
        },
        Figure::Fig3Right => ConfigFile {
            schema: 1,
            params: ParamsConfig {
                mu: 1.0,
                p: 2.0,
                n: 6.0,
            },
            segments: vec![
                seg(0.0, LawConfig::none(), 5.0),
                seg(31.0, LawConfig::delay_step(1.0, 4.0, 5.0), 5.0),
            ],
            phi: PhiConfig::constant(2.0),
            horizon: 281.0,
            step: None,
            classify: Some(PRESET_TOLERANCES),
            output: None,
        },
    }
}

/// Expected per-segment regime sequence for a preset. The steady limit for
/// the strong-Pyragas tail is the positive equilibrium K ≈ 0.98352.
pub fn expected_verdicts(fig: Figure) -> Vec<ExpectedRegime> {
    match fig {
        Figure::Fig1Left => vec![ExpectedRegime::Irregular, ExpectedRegime::Periodic],
        Figure::Fig1Right => vec![
            ExpectedRegime::Irregular,
            ExpectedRegime::Periodic,
            ExpectedRegime::Steady,
            ExpectedRegime::UnfeasibleAfter(150.0),
        ],
        Figure::Fig2Left => vec![ExpectedRegime::Irregular, ExpectedRegime::Periodic],
        Figure::Fig2Right => vec![
            ExpectedRegime::Irregular,
            ExpectedRegime::Regular,
            ExpectedRegime::Irregular,
        ],
        Figure::Fig3Left => vec![
            ExpectedRegime::Irregular,
            ExpectedRegime::Irregular,
            ExpectedRegime::Periodic,
            ExpectedRegime::SteadyAt {
                limit: 0.98352146265544209,
                tol: 1e-2,
            },
        ],
        Figure::Fig3Right => vec![ExpectedRegime::Irregular, ExpectedRegime::Periodic],
    }
}
