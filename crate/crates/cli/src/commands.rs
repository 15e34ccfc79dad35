use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use quartic_core::bvp::{boundary_residuals, lambda_frame, resolvent_ai, solve, BcFamily};
use quartic_core::evolution::{
    compatibility_check, evolve, growth_bound_probe, ContourParams, EvolutionSpec, Forcing, Scheme,
};
use quartic_core::grid::GridFunction;
use quartic_core::linalg::real_matrix;
use quartic_core::oracle::{collocation_solve, diff_matrix};
use quartic_core::spectral::{run_sweep, SweepGrid};
use quartic_core::verify::{run_verify, PropertyResult, VerifyOptions};
use serde_json::{json, Value};

use crate::complex_text::format_complex;
use crate::config::Config;
use crate::error::CliError;
use crate::io::{write_grid_function, write_sweep, write_trajectory, SweepRow};
use crate::setup::{load_boundary_data, load_function, load_problem, validate_keys, ProblemSetup};

#[derive(Debug, Parser)]
#[command(name = "quartic", version, about = "Fourth-order abstract boundary-value problems: solve, sweep, evolve, verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the steady problem at one spectral parameter.
    Solve(CommonArgs),
    /// Resolvent-norm sweep outside the sector.
    Sweep(CommonArgs),
    /// Integrate the Cauchy problem.
    Evolve(CommonArgs),
    /// Run the property suite.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory (default: `[output] dir`, else the current directory).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "N", env = "QUARTIC_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "X")]
    pub tol_scale: Option<f64>,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Solve(a) | Command::Sweep(a) | Command::Evolve(a) | Command::Verify(a) => a,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Sweep(_) => "sweep",
            Command::Evolve(_) => "evolve",
            Command::Verify(_) => "verify",
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_from_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("quartic {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

/// Runs the command on a pool of the requested size; returns the summary.
pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    let args = cli.command.args();
    if let Some(t) = args.tol_scale {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Config("--tol-scale must be positive".into()));
        }
    }
    let cfg = Config::load(&args.config)?;
    validate_keys(&cfg)?;
    let out = output_dir(&cfg, args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Solve(_) => cmd_solve(&cfg, args, &out),
        Command::Sweep(_) => cmd_sweep(&cfg, &out),
        Command::Evolve(_) => cmd_evolve(&cfg, &out),
        Command::Verify(_) => cmd_verify(&cfg, args, &out),
    })
}

fn output_dir(cfg: &Config, args: &CommonArgs) -> Result<PathBuf, CliError> {
    let dir = match (&args.out, cfg.get("output", "dir")) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => cfg.base_dir.join(d),
        (None, None) => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::write(dir.join(name), text + "\n")?;
    Ok(())
}

/// `NaN`/infinite values become JSON `null`.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cjson(z: Complex64) -> Value {
    json!(format_complex(z))
}

pub const SOLVE_TOL: f64 = 1e-6;

/// Solves `u'''' + (P + Q) u'' + P Q u = f` with `P, Q = P_lambda, Q_lambda`
/// and the family's boundary conditions written with `P`.
pub fn cmd_solve(cfg: &Config, args: &CommonArgs, out: &Path) -> Result<Value, CliError> {
    let setup = load_problem(cfg)?;
    let lambda = cfg.complex_or("solve", "lambda", Complex64::new(-1.0 - setup.k * setup.k / 4.0, 0.0))?;
    let f = load_function(cfg, "solve", "forcing", &setup, "zero")?;
    let phi = load_boundary_data(cfg, "solve", setup.dim())?;
    let tol = cfg.f64_or("solve", "tolerance", SOLVE_TOL)? * args.tol_scale.unwrap_or(1.0);
    if !(tol > 0.0) {
        return Err(CliError::Config("[solve] tolerance must be positive".into()));
    }
    let c = setup.grid.b() - setup.grid.a();
    let need_uv = matches!(setup.family, BcFamily::Bc3 | BcFamily::Bc4);
    let frame = lambda_frame(&setup.op, setup.k, lambda, c, need_uv)?;
    let gf = frame.on_grid(setup.grid.clone());
    let sol = solve(setup.family, &gf, &f, &phi)?;
    write_grid_function(create(out, "solution.csv")?, &sol.u)?;

    // interior residual: second derivative of the solver's u'' by collocation
    let d1 = real_matrix::<f64>(&diff_matrix(&setup.grid)).transpose();
    let d4u = &sol.d2u.values * &d1 * &d1;
    let p = frame.p.matrix();
    let q = frame.q.matrix();
    let res = d4u + (p + q) * &sol.d2u.values + p * q * &sol.u.values - &f.values;
    let interior = res.iter().map(|z| z.norm()).fold(0.0, f64::max) / (1.0 + f.max_norm());
    let bdata = phi.max_norm();
    let boundary = boundary_residuals(setup.family, &gf, &sol, &phi).map(|r| r / (1.0 + bdata));
    let worst = boundary.iter().cloned().fold(interior, f64::max);
    let passed = worst <= tol;
    let report = json!({
        "command": "solve",
        "family": setup.family.index(),
        "lambda": cjson(lambda),
        "interior_residual": num(interior),
        "boundary_residuals": boundary.iter().map(|r| num(*r)).collect::<Vec<_>>(),
        "tolerance": tol,
        "passed": passed,
        "frame": {
            "u_condition": num(frame.u_cond),
            "v_condition": num(frame.v_cond),
            "contractive": frame.contractive(),
        },
    });
    write_json(out, "residuals.json", &report)?;
    if !passed {
        return Err(CliError::Tolerance(format!("max residual {worst:.3e} exceeds {tol:.3e}")));
    }
    Ok(report)
}

pub fn cmd_sweep(cfg: &Config, out: &Path) -> Result<Value, CliError> {
    const S: &str = "sweep";
    let setup = load_problem(cfg)?;
    let spec = setup.spec()?;
    let theta = spec.theta_a();
    let grid = SweepGrid::standard(
        setup.k,
        theta,
        cfg.f64_or(S, "r_min", 1e-2)?,
        cfg.f64_or(S, "r_max", 1e4)?,
        cfg.parsed_or(S, "n_radii", 50usize)?,
        cfg.parsed_or(S, "n_angles", 10usize)?,
        cfg.f64_or(S, "exclusion_radius", 0.0)?,
    )?;
    let report = run_sweep(&spec, &grid)?;
    let rows: Vec<SweepRow> = report.records.iter().map(SweepRow::from).collect();
    write_sweep(create(out, "sweep.csv")?, &rows)?;
    let details: Vec<Value> = report
        .records
        .iter()
        .filter(|r| !r.frame_ok)
        .map(|r| json!({"lambda": cjson(Complex64::new(r.lambda.0, r.lambda.1)), "error": r.error}))
        .collect();
    let summary = json!({
        "command": "sweep",
        "family": setup.family.index(),
        "k": setup.k,
        "theta_A": theta,
        "points": report.records.len(),
        "C_empirical": num(report.c_empirical),
        "r_observed": num(report.r_observed),
        "failures": report.failures.len(),
        "upward_trend_angles": report.upward_trend,
        "failure_details": details,
    });
    write_json(out, "sweep_summary.json", &summary)?;
    Ok(summary)
}

pub fn cmd_evolve(cfg: &Config, out: &Path) -> Result<Value, CliError> {
    const S: &str = "evolve";
    let setup = load_problem(cfg)?;
    let spec = setup.spec()?;
    let t_final = cfg.require_f64(S, "t_final")?;
    let dt = cfg.require_f64(S, "dt")?;
    let scheme = Scheme::parse(cfg.get(S, "scheme").unwrap_or("contour"))?;
    let v0 = load_function(cfg, S, "initial", &setup, "zero")?;
    let forcing = match (cfg.get(S, "forcing"), cfg.get(S, "forcing_file")) {
        (None, None) | (Some("zero"), None) => Forcing::Zero,
        _ => Forcing::Constant(load_function(cfg, S, "forcing", &setup, "zero")?),
    };
    let mut es = EvolutionSpec::new(spec.clone(), t_final, dt, v0, scheme).with_forcing(forcing);
    es.contour = ContourParams {
        tol: cfg.f64_or(S, "contour_tol", ContourParams::default().tol)?,
        ball_radius: cfg.f64_or(S, "ball_radius", 0.0)?,
        ..ContourParams::default()
    };
    let save_every = cfg.parsed_or(S, "save_every", 1usize)?.max(1);
    let traj = evolve(&es)?;
    let compat = compatibility_check(&es);
    let keep: Vec<usize> =
        (0..traj.times.len()).filter(|&i| i % save_every == 0 || i + 1 == traj.times.len()).collect();
    let times: Vec<f64> = keep.iter().map(|&i| traj.times[i]).collect();
    let states: Vec<GridFunction<f64>> = keep.iter().map(|&i| traj.states[i].clone()).collect();
    let manifest = json!({
        "grid": "chebyshev",
        "a": setup.grid.a(),
        "b": setup.grid.b(),
        "nodes": setup.grid.len(),
        "dim": setup.dim(),
        "family": setup.family.index(),
        "k": setup.k,
        "scheme": scheme.name(),
        "dt": t_final / es.steps() as f64,
        "layout": "t, then u[c][j] re/im for c in 0..dim, j in 0..nodes",
    });
    write_trajectory(create(out, "trajectory.csv")?, &manifest, &times, &states)?;
    let mut summary = json!({
        "command": "evolve",
        "scheme": scheme.name(),
        "steps": es.steps(),
        "t_final": t_final,
        "final_norm": traj.states.last().map(|s| s.norm()).unwrap_or(0.0),
        "compatibility": {
            "compatible": compat.compatible,
            "violated": compat.violated,
            "forcing_finite": compat.forcing_finite,
            "note": compat.note,
        },
    });
    if cfg.bool_or(S, "growth", false)? {
        let n = cfg.parsed_or(S, "growth_points", 21usize)?.max(2);
        let ts: Vec<f64> = (0..n).map(|j| t_final * j as f64 / (n - 1) as f64).collect();
        let g = growth_bound_probe(&spec, &ts)?;
        summary["growth"] = json!({
            "route": g.route,
            "M_fit": num(g.m_fit),
            "violation": g.violation,
            "samples": g.samples.iter().map(|(t, v)| json!([t, num(*v)])).collect::<Vec<_>>(),
        });
    }
    write_json(out, "evolve_summary.json", &summary)?;
    Ok(summary)
}

/// Compares the formula path with collocation on the configured problem at
/// `lambda = -k^2/4 - 1`.
fn configured_problem_check(setup: &ProblemSetup, tol: f64) -> Result<PropertyResult, CliError> {
    let f = GridFunction::from_fn(setup.grid.clone(), setup.dim(), |x| {
        quartic_core::linalg::CVec::from_element(setup.dim(), Complex64::new(1.0 + x, 0.5 * x))
    });
    let spec = setup.spec()?.with_forcing(f.clone());
    let lambda = Complex64::new(-setup.k * setup.k / 4.0 - 1.0, 0.0);
    let (value, detail) = match (resolvent_ai(&spec, lambda, &f), collocation_solve(&spec, lambda)) {
        (Ok(u), Ok(v)) => ((u.values - &v.values).camax() / v.values.camax().max(1e-300), String::new()),
        (Err(e), _) | (_, Err(e)) => (f64::INFINITY, e.to_string()),
    };
    Ok(PropertyResult { name: "configured_problem_vs_collocation", value, tol, passed: value <= tol, detail })
}

pub fn cmd_verify(cfg: &Config, args: &CommonArgs, out: &Path) -> Result<Value, CliError> {
    const S: &str = "verify";
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: args.seed.map(Ok).unwrap_or_else(|| cfg.parsed_or(S, "seed", defaults.seed))?,
        tol_scale: args.tol_scale.map(Ok).unwrap_or_else(|| cfg.f64_or(S, "tol_scale", 1.0))?,
        geometry_samples: cfg.parsed_or(S, "geometry_samples", defaults.geometry_samples)?,
    };
    if !(opts.tol_scale > 0.0) {
        return Err(CliError::Config("tol_scale must be positive".into()));
    }
    let setup = if cfg.has_section("problem") { Some(load_problem(cfg)?) } else { None };
    let mut results = run_verify(&opts);
    if let Some(s) = &setup {
        results.push(configured_problem_check(s, 1e-6 * opts.tol_scale)?);
    }
    let lines: Vec<String> = results.iter().map(|r| r.to_string()).collect();
    std::fs::write(out.join("verify.txt"), lines.join("\n") + "\n")?;
    for l in &lines {
        println!("{l}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let summary = json!({
        "command": "verify",
        "seed": opts.seed,
        "tol_scale": opts.tol_scale,
        "properties": results.len(),
        "failed": failed,
    });
    write_json(out, "verify_summary.json", &summary)?;
    if failed > 0 {
        return Err(CliError::PropertyFailed(failed));
    }
    Ok(summary)
}
