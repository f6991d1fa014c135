//! Acceptance criteria, one test per criterion.
//!
//! Each test writes a single `PASS`/`FAIL` line straight to stdout (bypassing
//! the harness's capture) with the measured worst case, its tolerance and the
//! elapsed time, then asserts.

#![allow(clippy::needless_range_loop)]

use std::io::Write;
use std::time::{Duration, Instant};

use pgcurve::classify::{check_rectifying_statements, classify_rectifying, fit_normal_samples, normal_system_residual};
use pgcurve::curve::{linspace, CurveDef};
use pgcurve::dsl::{Expr, Jet3};
use pgcurve::error::DslError;
use pgcurve::frenet::frenet_residuals;
use pgcurve::metric::PgVector3;
use pgcurve::synth::{
    integrate_frenet, synth_normal_components, synth_rectifying, FrenetState, InvariantProfile, NormalClosedForm,
};
use pgcurve::verify::{draw_normal, draw_rectifying, torsion_pairs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20260418;

fn budget(secs: u64) -> Duration {
    Duration::from_secs(secs)
}

fn report(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration) {
    let line = format!(
        "acceptance {id:>2} {:<4} {name}: {detail} ({:.2} s)\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

#[test]
fn c01_frenet_consistency() {
    let corpus = [
        ("cosh(s)", "sinh(s)", -1.0, 1.0),
        ("s^2/2", "0", -1.0, 1.0),
        ("s", "s^2", -1.0, 1.0),
        ("exp(s)", "s^2/4", 0.0, 1.0),
        ("cosh(2*s)/4", "s^3/6", -1.0, 1.0),
        ("s^3/6 + s^2", "sin(s)/2", -1.0, 1.0),
        ("log(2 + s)", "s^2", -1.0, 1.0),
        ("sqrt(4 + s)", "cos(s)", -1.0, 1.0),
        ("tanh(s)", "2*s^2", -1.0, 1.0),
        ("s^4/12 + s^2", "s*sin(s)/3", -1.0, 1.0),
        ("2*exp(-s)", "sinh(s)/3", -1.0, 1.0),
        ("(2 + s)^2.5", "s", -1.0, 1.0),
    ];
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for (y, z, a, b) in corpus {
        let c = CurveDef::parse(y, z, a, b, 1000).unwrap();
        for s in c.grid() {
            let r = frenet_residuals(&c, s).unwrap_or_else(|e| panic!("{y}, {z} at {s}: {e}")).max();
            if r > worst {
                worst = r;
                worst_at = format!("y={y}, z={z}, s={s}");
            }
        }
    }
    let el = t0.elapsed();
    let pass = worst <= 1e-9 && el < budget(5);
    report(1, "Frenet residuals, 12 curves x 1000 points", pass, format!("max {worst:.2e} <= 1e-9 at {worst_at}"), el);
    assert!(pass);
}

#[test]
fn c02_torsion_oracle_equivalence() {
    let t0 = Instant::now();
    let pairs = torsion_pairs(&mut ChaCha8Rng::seed_from_u64(SEED), 10_000);
    let worst = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let el = t0.elapsed();
    let pass = pairs.len() == 10_000 && worst <= 1e-12 && el < budget(5);
    report(2, "frame torsion vs det(r',r'',r''')/kappa^2", pass, format!("10000 pairs, max rel {worst:.2e} <= 1e-12"), el);
    assert!(pass);
}

/// Hand-differentiated closed form: `(ξ, ξ′, ξ″, η, η′, η″)`.
fn closed_form_oracle(k: f64, t: f64, c: [f64; 4], s: f64) -> [f64; 6] {
    let (em, ep) = ((-t * s).exp(), (t * s).exp());
    let (a, b) = (c[0] + c[1] * s, c[2] + c[3] * s);
    let m = [a * em, (c[1] - t * a) * em, (t * t * a - 2.0 * t * c[1]) * em];
    let p = [b * ep, (c[3] + t * b) * ep, (t * t * b + 2.0 * t * c[3]) * ep];
    [m[0] + p[0] + k / (t * t), m[1] + p[1], m[2] + p[2], m[0] - p[0], m[1] - p[1], m[2] - p[2]]
}

#[test]
fn c03_normal_closed_forms_solve_the_system() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let grid = linspace(-1.0, 1.0, 41);
    let (mut worst_impl, mut worst_oracle) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let d = draw_normal(&mut rng);
        let f = NormalClosedForm::new(d.kappa, d.tau, d.c).unwrap();
        let (r1, r2) = normal_system_residual(|s| f.xi_jet3(s), |s| f.eta_jet3(s), d.kappa, d.tau, &grid);
        worst_impl = worst_impl.max(r1).max(r2);
        // Same residual from hand-written derivatives.
        let (r1, r2) = normal_system_residual(
            |s| {
                let o = closed_form_oracle(d.kappa, d.tau, d.c, s);
                Jet3::from_derivatives(&[o[0], o[1], o[2], 0.0])
            },
            |s| {
                let o = closed_form_oracle(d.kappa, d.tau, d.c, s);
                Jet3::from_derivatives(&[o[3], o[4], o[5], 0.0])
            },
            d.kappa,
            d.tau,
            &grid,
        );
        worst_oracle = worst_oracle.max(r1).max(r2);
        for &s in &grid {
            let o = closed_form_oracle(d.kappa, d.tau, d.c, s);
            let (x, e) = (f.xi_jet3(s), f.eta_jet3(s));
            let got = [x.v(), x.d1(), x.d2(), e.v(), e.d1(), e.d2()];
            for k in 0..6 {
                assert!((got[k] - o[k]).abs() <= 1e-12 * (1.0 + o[k].abs()), "jet vs hand derivative {k} at {s}");
            }
        }
    }
    let el = t0.elapsed();
    let pass = worst_impl <= 1e-10 && worst_oracle <= 1e-10 && el < budget(2);
    report(
        3,
        "closed-form normal components solve the ODE system",
        pass,
        format!("100 draws, max {worst_impl:.2e} (hand derivatives {worst_oracle:.2e}) <= 1e-10"),
        el,
    );
    assert!(pass);
}

#[test]
fn c04_normal_fit_round_trip() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let s = linspace(-1.0, 1.0, 101);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = draw_normal(&mut rng);
        let v = synth_normal_components(d.kappa, d.tau, d.c, &s).unwrap();
        for (i, &u) in s.iter().enumerate() {
            let o = closed_form_oracle(d.kappa, d.tau, d.c, u);
            assert!((v[i].0 - o[0]).abs() <= 1e-12 * (1.0 + o[0].abs()));
            assert!((v[i].1 - o[3]).abs() <= 1e-12 * (1.0 + o[3].abs()));
        }
        let beta: Vec<f64> = v.iter().map(|p| p.0).collect();
        let gamma: Vec<f64> = v.iter().map(|p| p.1).collect();
        let f = fit_normal_samples(&s, &beta, &gamma, &vec![d.kappa; s.len()], &vec![d.tau; s.len()]).unwrap();
        let got = [f.kappa0, f.tau0, f.c1, f.c2, f.c3, f.c4];
        let want = [d.kappa, d.tau, d.c[0], d.c[1], d.c[2], d.c[3]];
        worst = got.iter().zip(want).fold(worst, |m, (g, w)| m.max((g - w).abs()));
    }
    let el = t0.elapsed();
    let pass = worst <= 1e-8 && el < budget(5);
    report(4, "normal fit recovers (kappa, tau, c1..c4)", pass, format!("50 draws, max abs {worst:.2e} <= 1e-8"), el);
    assert!(pass);
}

struct RectifyingRun {
    beta: f64,
    m1: f64,
    n1: f64,
    slope: f64,
    verdicts: usize,
    conservation: f64,
    statements: [f64; 4],
    statements_pass: [usize; 4],
    timelike_b: usize,
    elapsed: Duration,
}

/// The 50 constant-curvature round trips shared by criteria 5–7.
fn rectifying_runs() -> &'static RectifyingRun {
    static RUN: std::sync::OnceLock<RectifyingRun> = std::sync::OnceLock::new();
    RUN.get_or_init(|| {
        let t0 = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
        let mut run = RectifyingRun {
            beta: 0.0,
            m1: 0.0,
            n1: 0.0,
            slope: 0.0,
            verdicts: 0,
            conservation: 0.0,
            statements: [0.0; 4],
            statements_pass: [0; 4],
            timelike_b: 0,
            elapsed: Duration::ZERO,
        };
        for _ in 0..50 {
            let d = draw_rectifying(&mut rng, true);
            let syn = synth_rectifying(d.m1, d.n1, &d.kappa, d.s_min, d.s_max, 1e-3).unwrap();
            // Bracket computed here from the raw states.
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for st in &syn.trajectory.states {
                let v = [
                    st.r.x - (st.s + d.m1) * st.t.x - d.n1 * st.b.x,
                    st.r.y - (st.s + d.m1) * st.t.y - d.n1 * st.b.y,
                    st.r.z - (st.s + d.m1) * st.t.z - d.n1 * st.b.z,
                ];
                for k in 0..3 {
                    lo[k] = lo[k].min(v[k]);
                    hi[k] = hi[k].max(v[k]);
                }
            }
            run.conservation = (0..3).fold(run.conservation, |m, k| m.max(hi[k] - lo[k]));

            let c = syn.trajectory.to_curve().unwrap();
            let v = classify_rectifying(&c, PgVector3::ZERO, 1e-6).unwrap();
            run.verdicts += usize::from(v.is_rectifying);
            run.beta = run.beta.max(v.beta_max);
            run.m1 = run.m1.max((v.m1 - d.m1).abs());
            run.n1 = run.n1.max((v.n1 - d.n1).abs());
            run.slope = run.slope.max((v.a * d.n1 + 1.0).abs());
            if let Ok(r) = check_rectifying_statements(&c, PgVector3::ZERO, &v, 1e-5) {
                let checks = [r.distance_function, r.tangential_component, r.normal_component, r.binormal_component];
                for k in 0..4 {
                    run.statements[k] = run.statements[k].max(checks[k].residual);
                    run.statements_pass[k] += usize::from(checks[k].pass);
                }
                run.timelike_b += usize::from(r.eps_b == -1);
            }
        }
        run.elapsed = t0.elapsed();
        run
    })
}

#[test]
fn c05_rectifying_round_trip() {
    let r = rectifying_runs();
    let pass = r.verdicts == 50
        && r.beta <= 1e-6
        && r.m1 <= 1e-5
        && r.n1 <= 1e-5
        && r.slope <= 1e-6
        && r.elapsed < budget(30);
    report(
        5,
        "rectifying synthesize -> classify",
        pass,
        format!(
            "{}/50 verdicts, beta_max {:.2e} <= 1e-6, |dm1| {:.2e} / |dn1| {:.2e} <= 1e-5, |a*n1+1| {:.2e} <= 1e-6",
            r.verdicts, r.beta, r.m1, r.n1, r.slope
        ),
        r.elapsed,
    );
    assert!(pass);
}

#[test]
fn c06_conservation_law() {
    let r = rectifying_runs();
    let pass = r.conservation <= 1e-6;
    report(
        6,
        "r - (s+m1)t - n1 b constant along trajectories",
        pass,
        format!("50 trajectories, max spread {:.2e} <= 1e-6", r.conservation),
        r.elapsed,
    );
    assert!(pass);
}

#[test]
fn c07_rectifying_statements() {
    let r = rectifying_runs();
    let pass = r.statements_pass.iter().all(|&n| n == 50) && r.timelike_b == 50;
    report(
        7,
        "rectifying statements (distance, tangential, normal, binormal) at 1e-5",
        pass,
        format!(
            "passes {:?}/50, residuals {:.2e} {:.2e} {:.2e} {:.2e}, eps_b = -1 on {}/50",
            r.statements_pass, r.statements[0], r.statements[1], r.statements[2], r.statements[3], r.timelike_b
        ),
        r.elapsed,
    );
    assert!(pass);
}

/// Exact state for `κ = τ = 1` from the canonical frame at the origin.
fn unit_profile_exact(s: f64) -> [f64; 9] {
    let (c, h) = (s.cosh(), s.sinh());
    [s, c - 1.0, h - s, h, c - 1.0, c, h, h, c]
}

fn state_vec(st: &FrenetState) -> [f64; 9] {
    [st.r.x, st.r.y, st.r.z, st.t.y, st.t.z, st.n.y, st.n.z, st.b.y, st.b.z]
}

#[test]
fn c08_integrator_order() {
    let t0 = Instant::now();
    let p = InvariantProfile::new(Expr::constant(1.0, "s"), Expr::constant(1.0, "s"), 0.0, 4.0).unwrap();
    let init = FrenetState::canonical(0.0, PgVector3::ZERO);
    let err = |h: f64| {
        let tr = integrate_frenet(&p, &init, h).unwrap();
        let got = state_vec(tr.last());
        let want = unit_profile_exact(4.0);
        (0..9).map(|k| (got[k] - want[k]).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(0.1), err(0.05));
    let ratio = e1 / e2;
    let el = t0.elapsed();
    let pass = (12.0..=20.0).contains(&ratio);
    report(8, "RK4 order under step halving", pass, format!("errors {e1:.3e} / {e2:.3e}, ratio {ratio:.3} in [12, 20]"), el);
    assert!(pass);
}

#[test]
fn c09_frame_constants_of_motion() {
    let t0 = Instant::now();
    let profiles = [
        ("1", "1"),
        ("1 + s^2/4", "sin(3*s)"),
        ("2", "-(s - 2)*2"),
        ("exp(sin(s))", "cosh(s/2)/2"),
        ("0.5", "-0.75"),
    ];
    // Profiles keep |∫τ| ≤ 4 as for κ = τ = 1: the frame grows like cosh∫τ, and
    // beyond that the squares in n_y² − n_z² exceed 1e8 and rounding alone
    // moves the invariant by more than 1e-8.
    let timelike = FrenetState {
        s: 0.0,
        r: PgVector3::ZERO,
        t: PgVector3::new(1.0, 0.0, 0.0),
        n: PgVector3::isotropic(0.0, 1.0),
        b: PgVector3::isotropic(-1.0, 0.0),
    };
    let mut worst = 0.0f64;
    for (k, t) in profiles {
        let p = InvariantProfile::new(Expr::parse(k, "s").unwrap(), Expr::parse(t, "s").unwrap(), 0.0, 4.0).unwrap();
        for init in [FrenetState::canonical(0.0, PgVector3::ZERO), timelike] {
            let tr = integrate_frenet(&p, &init, 1e-3).unwrap();
            let q0 = init.n.y * init.n.y - init.n.z * init.n.z;
            let p0 = init.b.y * init.b.y - init.b.z * init.b.z;
            let m0 = init.n.y * init.b.y - init.n.z * init.b.z;
            for st in &tr.states {
                let q = st.n.y * st.n.y - st.n.z * st.n.z;
                let pb = st.b.y * st.b.y - st.b.z * st.b.z;
                let m = st.n.y * st.b.y - st.n.z * st.b.z;
                worst = worst.max((q - q0).abs()).max((pb - p0).abs()).max((m - m0).abs());
            }
        }
    }
    let el = t0.elapsed();
    let pass = worst <= 1e-8;
    report(9, "frame constants of motion over length 4", pass, format!("10 runs, max drift {worst:.2e} <= 1e-8"), el);
    assert!(pass);
}

enum Golden {
    Prints(&'static str),
    LexAt(usize),
    ParseAt(usize),
}

const GOLDEN: [(&str, Golden); 36] = [
    ("1+2*3", Golden::Prints("(1.0 + (2.0 * 3.0))")),
    ("(1+2)*3", Golden::Prints("((1.0 + 2.0) * 3.0)")),
    ("1-2-3", Golden::Prints("((1.0 - 2.0) - 3.0)")),
    ("8/4/2", Golden::Prints("((8.0 / 4.0) / 2.0)")),
    ("2^3^2", Golden::Prints("(2.0 ^ (3.0 ^ 2.0))")),
    ("-s^2", Golden::Prints("(-(s ^ 2.0))")),
    ("s^-1", Golden::Prints("(s ^ (-1.0))")),
    ("-s*-s", Golden::Prints("((-s) * (-s))")),
    ("--s", Golden::Prints("(-(-s))")),
    ("sin(s)^2", Golden::Prints("(sin(s) ^ 2.0)")),
    ("2*sin(3*s+1)", Golden::Prints("(2.0 * sin(((3.0 * s) + 1.0)))")),
    ("cosh(s)-sinh(s)", Golden::Prints("(cosh(s) - sinh(s))")),
    ("s/2*3", Golden::Prints("((s / 2.0) * 3.0)")),
    ("1.5e-3*s", Golden::Prints("(0.0015 * s)")),
    (".25+s", Golden::Prints("(0.25 + s)")),
    ("exp(log(s))", Golden::Prints("exp(log(s))")),
    ("sqrt(abs(s))", Golden::Prints("sqrt(abs(s))")),
    ("s - -1", Golden::Prints("(s - (-1.0))")),
    ("((s))", Golden::Prints("s")),
    ("tanh(s)^(1/2)", Golden::Prints("(tanh(s) ^ (1.0 / 2.0))")),
    ("3*s^2/2 - 4", Golden::Prints("(((3.0 * (s ^ 2.0)) / 2.0) - 4.0)")),
    ("2^s", Golden::ParseAt(2)),
    ("s^2^s", Golden::ParseAt(4)),
    ("1+", Golden::ParseAt(2)),
    ("sin()", Golden::ParseAt(2)),
    ("2..5", Golden::LexAt(1)),
    ("s $ 2", Golden::LexAt(2)),
    ("foo(s)", Golden::ParseAt(0)),
    ("t", Golden::ParseAt(0)),
    ("(s", Golden::ParseAt(2)),
    ("s)", Golden::ParseAt(1)),
    ("+s", Golden::ParseAt(0)),
    ("1e", Golden::LexAt(1)),
    ("s s", Golden::ParseAt(1)),
    ("sin", Golden::ParseAt(1)),
    ("", Golden::ParseAt(0)),
];

/// Fourth-order central differences for derivatives 1–3, step `h`.
fn central_differences(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> [f64; 3] {
    let d1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h);
    let d3 = (f(x - 3.0 * h) - 8.0 * f(x - 2.0 * h) + 13.0 * f(x - h) - 13.0 * f(x + h) + 8.0 * f(x + 2.0 * h)
        - f(x + 3.0 * h))
        / (8.0 * h * h * h);
    [d1, d2, d3]
}

#[test]
fn c10_parser_golden_corpus_and_jets() {
    let t0 = Instant::now();
    let mut passed = 0;
    let mut failures = Vec::new();
    for (src, want) in &GOLDEN {
        let got = Expr::parse(src, "s");
        let ok = match (want, &got) {
            (Golden::Prints(p), Ok(e)) => {
                e.to_string() == *p && Expr::parse(&e.to_string(), "s").map(|r| r == *e).unwrap_or(false)
            }
            (Golden::LexAt(i), Err(DslError::Lex(e))) => e.offset == *i,
            (Golden::ParseAt(i), Err(DslError::Parse(e))) => e.index == *i,
            _ => false,
        };
        if ok {
            passed += 1;
        } else {
            failures.push(format!("{src:?} -> {got:?}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst = 0.0f64;
    let mut points = 0;
    for (src, want) in &GOLDEN {
        let Golden::Prints(_) = want else { continue };
        let e = Expr::parse(src, "s").unwrap();
        if e.is_constant() {
            continue;
        }
        for _ in 0..20 {
            let x = rng.gen_range(0.2..1.5);
            let Ok(j) = e.eval_jet3(x) else { continue };
            let f = |u: f64| e.eval(u).unwrap();
            // Step relative to x: several corpus entries blow up at 0.
            let fd = central_differences(&f, x, 5e-3 * x);
            for k in 0..3 {
                let d = j.derivative(k + 1);
                worst = worst.max((d - fd[k]).abs() / d.abs().max(1.0));
            }
            points += 1;
        }
    }
    let el = t0.elapsed();
    let pass = failures.is_empty() && worst <= 1e-6;
    report(
        10,
        "parser golden corpus and jet derivatives",
        pass,
        format!("{passed}/{} golden, jets vs differences on {points} points max rel {worst:.2e} <= 1e-6", GOLDEN.len()),
        el,
    );
    assert!(pass, "{failures:?}");
}
