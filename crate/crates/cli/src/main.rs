//! `pgcurve`: Frenet analysis, classification and synthesis of curves in
//! pseudo-Galilean space, with deterministic CSV/JSON output.
//!
//! Exit codes: 0 success, 1 input error, 2 admissibility failure,
//! 3 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pgcurve::classify::{best_origin, frame_components, DEFAULT_TOL_EXACT, DEFAULT_TOL_SAMPLED};
use pgcurve::curve::{check_admissible, AdmissibilityReport, CurveDef, DEFAULT_TOL_ADM};
use pgcurve::dsl::Expr;
use pgcurve::error::ClassifyError;
use pgcurve::frenet::analyze;
use pgcurve::io;
use pgcurve::metric::PgVector3;
use pgcurve::report::{classify_curve, document, frenet_report, to_canonical_json};
use pgcurve::synth::{integrate_frenet, synth_rectifying, FrenetState, InvariantProfile, DEFAULT_STEP};
use pgcurve::verify::{self, VerifyConfig};

#[derive(Parser)]
#[command(name = "pgcurve", version, about = "Frenet apparatus, classification and synthesis of pseudo-Galilean curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frame, curvature, torsion and Frenet residuals on the grid.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rectifying verdict and normal-curve fit.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        origin: OriginArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate the Frenet equations for a prescribed curvature and torsion.
    Synthesize(SynthArgs),
    /// Seeded oracle suite; fails with exit code 3 if any check fails.
    Verify(VerifyArgs),
    /// Two-column series of s against kappa, tau, tau/kappa and beta.
    PlotData {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        origin: OriginArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Curve-definition JSON (`.json`) or sampled CSV with columns s, x, y, z.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for the output files (created if missing).
    #[arg(long, default_value = ".", value_parser = non_empty_path)]
    output: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    /// Start of the parameter range (default: from the input).
    #[arg(long, allow_negative_numbers = true)]
    s_min: Option<f64>,
    /// End of the parameter range (default: from the input).
    #[arg(long, allow_negative_numbers = true)]
    s_max: Option<f64>,
    /// Grid points (default: from the input).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    samples: Option<u64>,
    /// Lightlike threshold on |y''^2 - z''^2|.
    #[arg(long, default_value_t = DEFAULT_TOL_ADM, value_parser = positive)]
    tol_adm: f64,
    /// Worker threads for grid evaluation; output does not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
}

#[derive(Args)]
struct OriginArgs {
    /// Origin p0 of the position vector, as x,y,z.
    #[arg(long, default_value = "0,0,0", value_parser = parse_origin, allow_hyphen_values = true)]
    origin: PgVector3,
    /// Replace the isotropic part of the origin by the least-squares best origin.
    #[arg(long)]
    search_origin: bool,
    /// Classification tolerance (default: 1e-6 for exact curves, 1e-4 for sampled).
    #[arg(long, value_parser = positive)]
    tol_classify: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    /// Rectifying curve from m1, n1 and kappa; tau = -(s + m1) kappa / n1.
    Rectifying,
    /// Free kappa and tau, canonical frame at s_min, start at the origin.
    Profile,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Rectifying)]
    kind: SynthKind,
    #[arg(long, allow_negative_numbers = true)]
    m1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    n1: Option<f64>,
    /// Curvature as an expression in s.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    kappa: String,
    /// Torsion as an expression in s (profile only).
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    s_max: f64,
    /// Largest RK4 step; shrunk so the last step lands on s_max.
    #[arg(long, default_value_t = DEFAULT_STEP, value_parser = positive)]
    step: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    /// RK4 step of the synthesis round trips.
    #[arg(long, default_value_t = DEFAULT_STEP, value_parser = positive)]
    step: f64,
    /// Override a tolerance as NAME=VALUE (NAME `all` sets every one); repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Shorthand for --tol tol_classify=VALUE.
    #[arg(long, value_parser = positive)]
    tol_classify: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("`{s}`: {e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn non_empty_path(s: &str) -> Result<PathBuf, String> {
    if s.is_empty() {
        Err("path must not be empty".into())
    } else {
        Ok(PathBuf::from(s))
    }
}

fn parse_origin(s: &str) -> Result<PgVector3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("expected x,y,z, got `{s}`"));
    };
    let num = |t: &str| match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{t}` is not a finite number")),
    };
    Ok(PgVector3::new(num(x)?, num(y)?, num(z)?))
}

enum Failure {
    Input(anyhow::Error),
    Admissibility(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Admissibility(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl<E: std::error::Error + Send + Sync + 'static> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

/// Geometric failures of the curve map to exit code 2, the rest are input errors.
fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::Curve(_) | ClassifyError::SingularFrame(_) => Failure::Admissibility(e.to_string()),
        _ => Failure::Input(e.into()),
    }
}

fn inadmissible(path: &Path, adm: &AdmissibilityReport) -> Failure {
    let first = adm.violations.first().map_or(String::new(), |v| format!(", first at s = {}", v.s));
    Failure::Admissibility(format!(
        "{}: curve is not admissible ({} violation(s){first})",
        path.display(),
        adm.violations.len()
    ))
}

fn load_curve(input: &InputArgs, grid: &GridArgs) -> Result<CurveDef, Failure> {
    let mut c = io::read_curve(&input.input)?;
    if grid.s_min.is_some() || grid.s_max.is_some() {
        let (a, b) = (grid.s_min.unwrap_or(c.s_min), grid.s_max.unwrap_or(c.s_max));
        c = c.with_range(a, b)?;
    }
    if let Some(n) = grid.samples {
        c = c.with_samples(n as usize)?;
    }
    Ok(c)
}

/// Echo of the effective run configuration stored in every report.
fn run_echo(command: &str, input: &Path, c: &CurveDef, tol_adm: f64) -> Value {
    json!({
        "command": command,
        "input": input.display().to_string(),
        "s_min": c.s_min,
        "s_max": c.s_max,
        "samples": c.samples,
        "tol_adm": tol_adm,
    })
}

fn with_run(mut doc: Value, run: Value) -> Value {
    doc.as_object_mut().expect("documents are objects").insert("run".into(), run);
    doc
}

fn write_output(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(anyhow!("{}: {e}", dir.display())))?;
    io::write_text(&dir.join(name), text)?;
    Ok(())
}

fn cmd_analyze(input: &InputArgs, grid: &GridArgs, out: &OutputArgs) -> Result<(), Failure> {
    let c = load_curve(input, grid)?;
    let a = analyze(&c, grid.tol_adm, grid.threads as usize);
    let doc = with_run(frenet_report(&a), run_echo("analyze", &input.input, &c, grid.tol_adm));
    write_output(&out.output, "frenet.json", &to_canonical_json(&doc))?;
    write_output(&out.output, "frenet.csv", &io::frenet_csv(&a))?;
    if !a.admissibility.admissible {
        return Err(inadmissible(&input.input, &a.admissibility));
    }
    let max_res = a.samples.iter().map(|p| p.residuals.max()).fold(0.0, f64::max);
    println!("analyze: {} points, max Frenet residual {max_res:.3e}", a.samples.len());
    Ok(())
}

fn classify_tol(c: &CurveDef, o: &OriginArgs) -> f64 {
    o.tol_classify.unwrap_or(if c.is_exact() { DEFAULT_TOL_EXACT } else { DEFAULT_TOL_SAMPLED })
}

fn cmd_classify(input: &InputArgs, grid: &GridArgs, o: &OriginArgs, out: &OutputArgs) -> Result<(), Failure> {
    let c = load_curve(input, grid)?;
    let run = run_echo("classify", &input.input, &c, grid.tol_adm);
    let adm = check_admissible(&c, grid.tol_adm);
    if !adm.admissible {
        let doc = document("classification", &json!({ "admissibility": adm, "verdict": null }));
        write_output(&out.output, "classification.json", &to_canonical_json(&with_run(doc, run)))?;
        return Err(inadmissible(&input.input, &adm));
    }
    let tol = classify_tol(&c, o);
    let r = classify_curve(&c, o.origin, tol, grid.tol_adm, o.search_origin).map_err(classify_failure)?;
    let mut doc = document("classification", &r);
    doc["admissibility"] = serde_json::to_value(&adm).expect("report types serialize");
    write_output(&out.output, "classification.json", &to_canonical_json(&with_run(doc, run)))?;
    let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
    println!("verdict: {}", verdict.as_str().unwrap_or_default());
    Ok(())
}

fn cmd_synthesize(a: &SynthArgs) -> Result<(), Failure> {
    let kappa = Expr::parse(&a.kappa, "s")?;
    let (profile, trajectory, params) = match a.kind {
        SynthKind::Rectifying => {
            let (Some(m1), Some(n1)) = (a.m1, a.n1) else {
                return Err(Failure::Input(anyhow!("--kind rectifying needs --m1 and --n1")));
            };
            if a.tau.is_some() {
                return Err(Failure::Input(anyhow!("--tau is determined by m1, n1 and kappa for --kind rectifying")));
            }
            let syn = synth_rectifying(m1, n1, &kappa, a.s_min, a.s_max, a.step)?;
            let spread = syn.conservation_spread();
            let params = json!({ "m1": m1, "n1": n1, "conservation_spread": spread });
            (syn.profile, syn.trajectory, params)
        }
        SynthKind::Profile => {
            let Some(tau_src) = &a.tau else {
                return Err(Failure::Input(anyhow!("--kind profile needs --tau")));
            };
            if a.m1.is_some() || a.n1.is_some() {
                return Err(Failure::Input(anyhow!("--m1 and --n1 apply to --kind rectifying only")));
            }
            let profile = InvariantProfile::new(kappa, Expr::parse(tau_src, "s")?, a.s_min, a.s_max)?;
            let init = FrenetState::canonical(a.s_min, PgVector3::ZERO);
            let trajectory = integrate_frenet(&profile, &init, a.step)?;
            (profile, trajectory, json!({}))
        }
    };
    let body = json!({
        "mode": match a.kind { SynthKind::Rectifying => "rectifying", SynthKind::Profile => "profile" },
        "kappa": profile.kappa.to_string(),
        "tau": profile.tau.to_string(),
        "s_min": profile.s_min,
        "s_max": profile.s_max,
        "step": a.step,
        "states": trajectory.states.len(),
        "invariant_drift": trajectory.invariant_drift(),
        "det_drift": trajectory.det_drift(),
        "parameters": params,
    });
    write_output(&a.out.output, "curve.csv", &io::trajectory_csv(&trajectory, &profile)?)?;
    write_output(&a.out.output, "synthesis.json", &to_canonical_json(&document("synthesis", &body)))?;
    println!("synthesize: {} states, det drift {:.3e}", trajectory.states.len(), trajectory.det_drift());
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let mut cfg = VerifyConfig { seed: a.seed, threads: a.threads as usize, step: a.step, ..VerifyConfig::default() };
    if let Some(t) = a.tol_classify {
        cfg.set_tolerance("tol_classify", t).map_err(|e| Failure::Input(anyhow!(e)))?;
    }
    for spec in &a.tol {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Input(anyhow!("--tol expects NAME=VALUE, got `{spec}`")))?;
        let value = positive(value.trim()).map_err(|e| Failure::Input(anyhow!("--tol {name}: {e}")))?;
        cfg.set_tolerance(name.trim(), value).map_err(|e| Failure::Input(anyhow!(e)))?;
    }
    let report = verify::run(&cfg);
    write_output(&a.out.output, "verify.json", &to_canonical_json(&document("verify", &report)))?;
    for c in &report.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status} {:<22} worst {:.3e} tol {:.1e} ({} draws)", c.name, c.worst, c.tol, c.draws);
    }
    if report.all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))))
    }
}

fn cmd_plot_data(input: &InputArgs, grid: &GridArgs, o: &OriginArgs, out: &OutputArgs) -> Result<(), Failure> {
    let c = load_curve(input, grid)?;
    let a = analyze(&c, grid.tol_adm, grid.threads as usize);
    if !a.admissibility.admissible {
        return Err(inadmissible(&input.input, &a.admissibility));
    }
    let p0 = if o.search_origin { best_origin(&c, o.origin.x).map_err(classify_failure)? } else { o.origin };
    let frames: Vec<_> = a.samples.iter().map(|p| p.frame).collect();
    let series = |f: &dyn Fn(&pgcurve::frenet::FrenetData) -> f64| -> Vec<(f64, f64)> {
        frames.iter().map(|fr| (fr.s, f(fr))).collect()
    };
    let mut beta = Vec::with_capacity(frames.len());
    for fr in &frames {
        beta.push((fr.s, frame_components(&c, fr.s, p0).map_err(classify_failure)?.beta));
    }
    write_output(&out.output, "kappa.dat", &io::series_text(&series(&|f| f.kappa)))?;
    write_output(&out.output, "tau.dat", &io::series_text(&series(&|f| f.tau)))?;
    write_output(&out.output, "tau_over_kappa.dat", &io::series_text(&series(&|f| f.tau / f.kappa)))?;
    write_output(&out.output, "beta.dat", &io::series_text(&beta))?;
    println!("plot-data: 4 series of {} points", frames.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Analyze { input, grid, out } => cmd_analyze(input, grid, out),
        Command::Classify { input, grid, origin, out } => cmd_classify(input, grid, origin, out),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Verify(a) => cmd_verify(a),
        Command::PlotData { input, grid, origin, out } => cmd_plot_data(input, grid, origin, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(e) => eprintln!("error: {e}"),
                Failure::Admissibility(m) => eprintln!("inadmissible: {m}"),
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
