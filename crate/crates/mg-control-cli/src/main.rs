//! `mgcontrol` — analyze Mackey–Glass parameters, design control thresholds,
//! simulate controlled runs, and reproduce the bundled demonstration presets.
//!
//! Exit codes: 0 success; 1 verdict mismatch in `reproduce`; 2 validation or
//! usage error; 3 unexpected runtime failure.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mg_control::config::ConfigFile;
use mg_control::design;
use mg_control::diagnostics::divergence_exponent;
use mg_control::io::write_csv;
use mg_control::model::{Case, MgParams};
use mg_control::presets::{expected_verdicts, preset, Figure};
use mg_control::report::build_report;
use mg_control::scenario::{build_system, run_scenario, ScenarioOutcome};

const EXIT_OK: i32 = 0;
const EXIT_MISMATCH: i32 = 1;
const EXIT_VALIDATION: i32 = 2;
const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "mgcontrol",
    version,
    about = "Chaos-control toolkit for the Mackey-Glass equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the parameter case, feedback landmarks and the (L)/(T)
    /// monotone-domain conditions.
    Analyze {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: f64,
        /// Delay for the delay-dependent condition (T).
        #[arg(long)]
        tau: Option<f64>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute the threshold set of one control law.
    Design {
        #[arg(value_enum)]
        law: LawArg,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: f64,
        /// Baseline delay (required for the state-dependent delay law).
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Run a scenario config file; writes CSV, SVG and a JSON report.
    Simulate {
        config: PathBuf,
        /// Override the integration step.
        #[arg(long)]
        step: Option<f64>,
        /// Override the horizon.
        #[arg(long)]
        horizon: Option<f64>,
        /// Also estimate the twin-run divergence exponent; the seed picks
        /// the perturbation direction.
        #[arg(long)]
        divergence: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Skip the SVG plot.
        #[arg(long)]
        no_svg: bool,
        /// Directory for outputs not named in the config.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run bundled presets and compare each segment's verdict with the
    /// expected regime sequence.
    Reproduce {
        /// Preset id (fig1-left, fig1-right, fig2-left, fig2-right,
        /// fig3-left, fig3-right) or `all`.
        figure: String,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        no_svg: bool,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Constant,
    Proportional,
    Pyragas,
    Sdd,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Analyze {
            mu,
            p,
            n,
            tau,
            json,
        } => cmd_analyze(mu, p, n, tau, json),
        Command::Design { law, mu, p, n, tau } => cmd_design(law, mu, p, n, tau),
        Command::Simulate {
            config,
            step,
            horizon,
            divergence,
            seed,
            no_svg,
            out_dir,
        } => cmd_simulate(&config, step, horizon, divergence, seed, no_svg, &out_dir),
        Command::Reproduce {
            figure,
            step,
            no_svg,
            out_dir,
        } => cmd_reproduce(&figure, step, no_svg, &out_dir),
    }
}

fn cmd_analyze(mu: f64, p: f64, n: f64, tau: Option<f64>, json: Option<PathBuf>) -> i32 {
    let params = match MgParams::new(mu, p, n) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let case = params.case();
    let lm = params.landmarks();
    println!("parameters: mu={mu} p={p} n={n}");
    println!("case: {case}");
    println!("xi0    = {:.6}", lm.xi0);
    println!("f(xi0) = {:.6}", lm.f_max);
    println!("beta   = {:.6}", lm.beta);
    println!("alpha  = {:.6}", lm.alpha);
    match lm.equilibrium {
        Some(k) => println!("K      = {k:.6}"),
        None => println!("K      = none (only the zero equilibrium)"),
    }
    if let Some(khat) = lm.conjugate {
        println!("K_hat  = {khat:.6}");
    }
    let mut json_doc = serde_json::json!({
        "params": {"mu": mu, "p": p, "n": n},
        "case": case.to_string(),
        "landmarks": {
            "xi0": lm.xi0,
            "f_max": lm.f_max,
            "beta": lm.beta,
            "alpha": lm.alpha,
            "equilibrium": lm.equilibrium,
            "conjugate": lm.conjugate,
        },
    });
    match case {
        Case::C => {
            let l = params.check_l().expect("case C");
            println!(
                "condition (L): {} (lhs {:.6}, margin {:+.6})",
                if l.holds { "holds" } else { "fails" },
                l.lhs,
                l.margin
            );
            json_doc["condition_l"] =
                serde_json::json!({"holds": l.holds, "lhs": l.lhs, "margin": l.margin});
            if let Some(tau) = tau {
                match params.check_t(tau) {
                    Ok(t) => {
                        println!(
                            "condition (T) at tau={tau}: {} (lhs {:.6}, margin {:+.6})",
                            if t.holds { "holds" } else { "fails" },
                            t.lhs,
                            t.margin
                        );
                        json_doc["condition_t"] = serde_json::json!({"tau": tau, "holds": t.holds, "lhs": t.lhs, "margin": t.margin});
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_VALIDATION;
                    }
                }
            }
        }
        Case::A => {
            println!("conditions (L)/(T): not applicable (case A: every solution tends to 0)")
        }
        Case::B => println!(
            "conditions (L)/(T): not applicable (case B: every positive solution tends to K)"
        ),
    }
    if let Some(path) = json {
        if let Err(e) = fs::write(
            &path,
            serde_json::to_string_pretty(&json_doc).expect("serializable"),
        ) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_RUNTIME;
        }
    }
    EXIT_OK
}

fn cmd_design(law: LawArg, mu: f64, p: f64, n: f64, tau: Option<f64>) -> i32 {
    let params = match MgParams::new(mu, p, n) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    match law {
        LawArg::Constant => match design::constant_thresholds(&params) {
            Ok(th) => {
                println!("constant-control thresholds (mu={mu} p={p} n={n}):");
                println!("xi_mu  = {:.6}  (tangency point, f'(xi_mu) = mu)", th.xi_mu);
                println!(
                    "k1     = {:.6}  (below: no equilibria, solutions collapse)",
                    th.k1
                );
                println!(
                    "k2     = {:.6}  (k1 < k < k2: convergence window toward K2)",
                    th.k2
                );
                match th.k3 {
                    Some(k3) => println!("k3     = {k3:.6}  (k2 < k < k3: certificate D(k) > 0)"),
                    None => println!("k3     = none (D > 0 on all of (k2, mu*xi0])"),
                }
                match th.k_star {
                    Some(ks) => println!("k_star = {ks:.6}  (k >= k_star: certificate D(k) > 0)"),
                    None => println!("k_star = none"),
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        },
        LawArg::Proportional => match design::proportional_thresholds(&params) {
            Ok(th) => {
                println!("proportional-control thresholds (mu={mu} p={p} n={n}):");
                println!(
                    "w0     = {:.6}  (effective decay at the window's chaotic edge)",
                    th.w0
                );
                println!("w_hat  = {:.6}  (margin-ratio peak)", th.w_hat);
                match (th.w_star, th.k_window) {
                    (Some(ws), Some((lo, hi))) => {
                        println!("w_star = {ws:.6}");
                        println!("k window: ({lo:.6}, {hi:.6})  (gains with the delay-independent certificate)");
                    }
                    _ => println!("w_star = none (no admissible window: S stays below 1)"),
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        },
        LawArg::Pyragas => match design::pyragas_design(&params) {
            Ok(d) => {
                println!("pyragas-control threshold (p={p} n={n}):");
                println!(
                    "k_py   = {:.6}  (k > k_py: feedback monotone, all solutions tend to K)",
                    d.k_py
                );
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        },
        LawArg::Sdd => {
            let Some(tau) = tau else {
                eprintln!("error: the state-dependent delay design requires --tau");
                return EXIT_VALIDATION;
            };
            match design::sdd_design(&params, tau, design::SddKind::Smooth) {
                Ok(d) => {
                    println!("state-dependent delay design (mu={mu} p={p} n={n} tau={tau}):");
                    println!("tau_star    = {:.6}  (reduced delay below xi0)", d.tau_star);
                    println!("zeta        = {:.6}  (ramp scale)", d.zeta);
                    println!(
                        "ramp        = [{:.6}, {:.6}]",
                        d.ramp_start,
                        d.ramp_start + d.ramp_width
                    );
                    println!("slope limit = {:.6}", d.slope_limit);
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_VALIDATION;
                }
            }
        }
    }
    EXIT_OK
}

struct RunArtifacts {
    config: ConfigFile,
    outcome: ScenarioOutcome<f64>,
    params: MgParams<f64>,
}

fn execute(config: &ConfigFile) -> Result<RunArtifacts, (i32, String)> {
    let scenario = config
        .to_scenario()
        .map_err(|e| (EXIT_VALIDATION, e.to_string()))?;
    let outcome = run_scenario(&scenario).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
    Ok(RunArtifacts {
        config: config.clone(),
        outcome,
        params: scenario.params,
    })
}

fn write_artifacts(
    art: &RunArtifacts,
    stem: &str,
    out_dir: &Path,
    no_svg: bool,
    extra_report: Option<(&str, serde_json::Value)>,
) -> Result<(), String> {
    fs::create_dir_all(out_dir).map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
    let out = art.config.output.clone().unwrap_or_default();
    let path_for = |explicit: &Option<String>, ext: &str| -> PathBuf {
        match explicit {
            Some(p) => PathBuf::from(p),
            None => out_dir.join(format!("{stem}.{ext}")),
        }
    };

    let csv_path = path_for(&out.csv, "csv");
    let scenario = art.config.to_scenario().map_err(|e| e.to_string())?;
    let system = build_system(&art.params, &scenario.schedule).map_err(|e| e.to_string())?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &art.outcome.trajectory, &system).map_err(|e| e.to_string())?;
    fs::write(&csv_path, csv).map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
    println!("wrote {}", csv_path.display());

    if !no_svg {
        let svg_path = path_for(&out.svg, "svg");
        let series: Vec<(f64, f64)> = art.outcome.trajectory.nodes().map(|n| (n.t, n.x)).collect();
        let events: Vec<svg::EventMark> = art
            .outcome
            .trajectory
            .events()
            .iter()
            .filter(|e| e.kind != mg_control::dde::EventKind::Horizon)
            .map(|e| svg::EventMark {
                t: e.time,
                label: match e.kind {
                    mg_control::dde::EventKind::ControlSwitch => "switch".into(),
                    mg_control::dde::EventKind::FeasibilityLoss => "collapse".into(),
                    mg_control::dde::EventKind::Horizon => String::new(),
                },
            })
            .collect();
        let chart = svg::line_chart(stem, &series, &events);
        fs::write(&svg_path, chart)
            .map_err(|e| format!("cannot write {}: {e}", svg_path.display()))?;
        println!("wrote {}", svg_path.display());
    }

    let report_path = path_for(&out.report, "report.json");
    let report = build_report(&art.config, &art.params, &art.outcome);
    let mut doc = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    if let Some((key, value)) = extra_report {
        doc[key] = value;
    }
    fs::write(
        &report_path,
        serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?,
    )
    .map_err(|e| format!("cannot write {}: {e}", report_path.display()))?;
    println!("wrote {}", report_path.display());
    Ok(())
}

fn print_segments(art: &RunArtifacts) {
    for seg in &art.outcome.segments {
        let verdict = seg
            .verdict
            .as_ref()
            .map(|tc| tc.verdict.label())
            .unwrap_or_else(|| "not reached".into());
        let certs = if seg.certificates.is_empty() {
            "none".to_string()
        } else {
            seg.certificates
                .iter()
                .map(|c| c.label())
                .collect::<Vec<_>>()
                .join("; ")
        };
        println!(
            "segment {} [{:.6}, {:.6}] {}: verdict {verdict}; certificates: {certs}",
            seg.index, seg.start, seg.end, seg.law
        );
    }
}

fn cmd_simulate(
    config_path: &Path,
    step: Option<f64>,
    horizon: Option<f64>,
    divergence: bool,
    seed: Option<u64>,
    no_svg: bool,
    out_dir: &Path,
) -> i32 {
    let text = match fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return EXIT_VALIDATION;
        }
    };
    let mut config = match ConfigFile::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    if let Some(h) = step {
        config.step = Some(h);
    }
    if let Some(t) = horizon {
        config.horizon = t;
    }
    let art = match execute(&config) {
        Ok(a) => a,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    print_segments(&art);

    let extra = if divergence {
        let direction = match seed {
            Some(s) => {
                if StdRng::seed_from_u64(s).random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            None => 1.0,
        };
        let scenario = config.to_scenario().expect("validated above");
        match divergence_exponent(
            &scenario.params,
            &scenario.schedule,
            &scenario.phi,
            direction * 1e-8,
            scenario.horizon,
            scenario.step,
        ) {
            Ok(rate) => {
                println!("divergence exponent: {rate:.6} per unit time");
                Some(("divergence_exponent", serde_json::json!(rate)))
            }
            Err(e) => {
                println!("divergence exponent: not applicable ({e})");
                Some(("divergence_exponent", serde_json::Value::Null))
            }
        }
    } else {
        None
    };

    let stem = config_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("run")
        .to_string();
    if let Err(msg) = write_artifacts(&art, &stem, out_dir, no_svg, extra) {
        eprintln!("error: {msg}");
        return EXIT_RUNTIME;
    }
    EXIT_OK
}

fn cmd_reproduce(figure: &str, step: Option<f64>, no_svg: bool, out_dir: &Path) -> i32 {
    let figures: Vec<Figure> = if figure == "all" {
        Figure::ALL.to_vec()
    } else {
        match Figure::from_id(figure) {
            Some(f) => vec![f],
            None => {
                eprintln!(
                    "error: unknown preset `{figure}`; expected one of {} or `all`",
                    Figure::ALL.map(|f| f.id()).join(", ")
                );
                return EXIT_VALIDATION;
            }
        }
    };

    // Presets are independent runs; execute them concurrently.
    type PresetResult = (Figure, Result<RunArtifacts, (i32, String)>);
    let results: Vec<PresetResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = figures
            .iter()
            .map(|&fig| {
                scope.spawn(move || {
                    let mut config = preset(fig);
                    if let Some(h) = step {
                        config.step = Some(h);
                    }
                    (fig, execute(&config))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("preset thread"))
            .collect()
    });

    let mut mismatches = 0usize;
    for (fig, result) in results {
        let art = match result {
            Ok(a) => a,
            Err((code, msg)) => {
                eprintln!("error: {}: {msg}", fig.id());
                return code;
            }
        };
        println!("== {} ({})", fig.id(), fig.describe());
        let expected = expected_verdicts(fig);
        for (seg, exp) in art.outcome.segments.iter().zip(expected.iter()) {
            let (verdict_label, ok) = match &seg.verdict {
                Some(tc) => (tc.verdict.label(), exp.matches(&tc.verdict)),
                None => ("not reached".into(), false),
            };
            if !ok {
                mismatches += 1;
            }
            println!(
                "  segment {} [{:>7.2}, {:>7.2}] {:<28} -> {:<40} expected {:<22} {}",
                seg.index,
                seg.start,
                seg.end,
                seg.law,
                verdict_label,
                exp.label(),
                if ok { "ok" } else { "MISMATCH" }
            );
        }
        if let Err(msg) = write_artifacts(&art, fig.id(), out_dir, no_svg, None) {
            eprintln!("error: {msg}");
            return EXIT_RUNTIME;
        }
    }
    if mismatches > 0 {
        eprintln!("{mismatches} verdict(s) mismatched");
        return EXIT_MISMATCH;
    }
    EXIT_OK
}
