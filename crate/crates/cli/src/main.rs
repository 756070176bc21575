//! Command-line interface: Laurent coefficients, model fitting, pole
//! reports, grid evaluation, the 40-pole demo and the PDE singularity lab.

mod parse;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use polefit_core::activation::PhiKind;
use polefit_core::error::Error;
use polefit_core::funcs;
use polefit_core::laurent::{compute_coefficients, estimate_error, ContourSamples};
use polefit_core::network::Rect;
use polefit_core::pdelab::{trajectory_report, CoefficientSource, PdeConfig, SpectralState};
use polefit_core::pipeline::{
    eval_grid, fit, load_model, save_model, FitConfig, Model,
};

use parse::{parse_complex, parse_count_range, parse_step_range};

#[derive(Parser)]
#[command(
    name = "polefit",
    version,
    about = "Rational-activation network fitting and pole detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Laurent coefficients from a sample file
    Coeffs(CoeffsArgs),
    /// Fit a network model from a sample file
    Fit(FitArgs),
    /// Print the pole report of a fitted model
    Poles(PolesArgs),
    /// Evaluate a model on a rectangular grid (CSV)
    Eval(EvalArgs),
    /// Rerun a built-in experiment end to end
    Demo(DemoArgs),
    /// Solve the spectral PDE and track its complex singularities
    Pde(PdeArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    /// JSON file {"rho": r, "values": [[re, im], ...]}
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Treat the file as a doubled (4n) sample set: coefficients come from
    /// the even-index half, plus an aliasing error estimate from the rest
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    samples: PathBuf,
    /// Contour radius (must match the sample file)
    #[arg(long)]
    rho: f64,
    /// Degree bound N1 (plus side; also minus unless overridden)
    #[arg(long)]
    n1: usize,
    /// Degree bound M1
    #[arg(long)]
    m1: usize,
    #[arg(long)]
    n1_minus: Option<usize>,
    #[arg(long)]
    m1_minus: Option<usize>,
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rectangle a,b,c,d for the random factor constants
    #[arg(long, default_value = "-1,-0.5,0.5,1", allow_hyphen_values = true)]
    rect: String,
    /// Seed numerator: cos or one
    #[arg(long, default_value = "cos")]
    phi: String,
    /// Seed pole, e.g. "-1.2+0i"
    #[arg(long, default_value = "-1.2+0i", allow_hyphen_values = true)]
    z0: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PolesArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    cluster_radius: f64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Real axis range lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    re: String,
    /// Imaginary axis range lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    im: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DemoArgs {
    /// Experiment name (currently: exfun)
    name: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PdeArgs {
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    /// beta given as an exponent: beta = exp(beta_exp)
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    beta_exp: f64,
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Output times lo:step:hi
    #[arg(long, default_value = "0:0.1:1")]
    times: String,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value = "-1.2+0i", allow_hyphen_values = true)]
    z0: String,
    /// Degree bounds for the per-time fits
    #[arg(long, default_value_t = 10)]
    n1: usize,
    #[arg(long, default_value_t = 10)]
    m1: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Coefficient source for the singularity track: exact or ode
    #[arg(long, default_value = "exact")]
    source: String,
    /// Also write grid_t*.csv files of the extension into this directory
    #[arg(long)]
    grid_dir: Option<PathBuf>,
    /// Include the per-time fitted models in the report JSON
    #[arg(long)]
    emit_models: bool,
    /// Include the per-time coefficient vectors in the report JSON
    #[arg(long)]
    emit_coeffs: bool,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Poles(a) => cmd_poles(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Demo(a) => cmd_demo(a),
        Command::Pde(a) => cmd_pde(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_)
                | Error::EmptySamples
                | Error::DimensionMismatch(_)
                | Error::Schema { .. }
                | Error::Io(_)
                | Error::Json(_) => ExitCode::from(2),
                Error::Numerical(_) | Error::Lapack { .. } => ExitCode::from(3),
            }
        }
    }
}

fn read_samples(path: &Path) -> Result<ContourSamples, Error> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let rho = v.get("rho").and_then(|x| x.as_f64()).ok_or_else(|| Error::Schema {
        field: "rho".into(),
        reason: "missing or not a number".into(),
    })?;
    let raw = v.get("values").and_then(|x| x.as_array()).ok_or_else(|| Error::Schema {
        field: "values".into(),
        reason: "missing or not an array".into(),
    })?;
    let mut values = Vec::with_capacity(raw.len());
    for (i, e) in raw.iter().enumerate() {
        let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Schema {
            field: format!("values[{i}]"),
            reason: "expected [re, im]".into(),
        })?;
        let re = pair[0].as_f64().ok_or_else(|| Error::Schema {
            field: format!("values[{i}][0]"),
            reason: "not a number".into(),
        })?;
        let im = pair[1].as_f64().ok_or_else(|| Error::Schema {
            field: format!("values[{i}][1]"),
            reason: "not a number".into(),
        })?;
        values.push(C64::new(re, im));
    }
    ContourSamples::new(rho, values)
}

fn cmd_coeffs(a: CoeffsArgs) -> Result<(), Error> {
    let all = read_samples(&a.samples)?;
    let (window, estimates) = if a.check {
        if all.values.len() % 4 != 0 {
            return Err(Error::Validation(
                "--check needs a sample count divisible by 4 (the file holds 4n values)".into(),
            ));
        }
        let base: Vec<C64> = all.values.iter().step_by(2).copied().collect();
        let s2n = ContourSamples::new(all.rho, base)?;
        let w = compute_coefficients(&s2n)?;
        let est = estimate_error(&s2n, &all)?;
        (w, Some(est))
    } else {
        (compute_coefficients(&all)?, None)
    };
    let n = window.n as i64;
    let coeffs: Vec<Value> = (-n..=n)
        .map(|k| {
            let c = window.coeff(k);
            let mut entry = json!({"k": k, "re": c.re, "im": c.im});
            if let Some(est) = &estimates {
                entry["err_estimate"] = json!(est[(k + n) as usize]);
            }
            entry
        })
        .collect();
    let out = json!({"n": n, "rho": window.rho, "coeffs": coeffs});
    std::fs::write(&a.out, serde_json::to_string_pretty(&out)?)?;
    println!("wrote {} coefficients to {}", 2 * n + 1, a.out.display());
    if let Some(est) = estimates {
        let max = est.iter().cloned().fold(0.0, f64::max);
        println!("max aliasing error estimate: {max:.3e}");
    }
    Ok(())
}

fn build_fit_config(a: &FitArgs) -> Result<FitConfig, Error> {
    let rect_parts: Vec<f64> = a
        .rect
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Validation(format!("bad --rect: {e}")))?;
    if rect_parts.len() != 4 {
        return Err(Error::Validation("--rect needs four numbers a,b,c,d".into()));
    }
    let phi = match a.phi.as_str() {
        "cos" => PhiKind::Cos,
        "one" => PhiKind::One,
        other => return Err(Error::Validation(format!("unknown --phi '{other}'"))),
    };
    let mut cfg = FitConfig::new(a.rho, a.n1, a.m1);
    cfg.n1_minus = a.n1_minus.unwrap_or(a.n1);
    cfg.m1_minus = a.m1_minus.unwrap_or(a.m1);
    cfg.tol = a.tol;
    cfg.seed = a.seed;
    cfg.rect = Rect { a: rect_parts[0], b: rect_parts[1], c: rect_parts[2], d: rect_parts[3] };
    cfg.phi = phi;
    cfg.z0 = parse_complex(&a.z0)?;
    Ok(cfg)
}

fn cmd_fit(a: FitArgs) -> Result<(), Error> {
    let samples = read_samples(&a.samples)?;
    let cfg = build_fit_config(&a)?;
    let model = fit(&samples, &cfg)?;
    print_fit_summary(&model);
    save_model(&model, &a.out)?;
    println!("model written to {}", a.out.display());
    Ok(())
}

fn print_fit_summary(model: &Model) {
    for (name, comp) in [("plus", &model.plus), ("minus", &model.minus)] {
        match comp {
            Some(c) => println!(
                "{name}: (N, M) = ({}, {}), reductions {:?}, ls residual {:.3e} (||P|| = {:.3e})",
                c.degrees.n_deg,
                c.degrees.m_deg,
                c.degrees.reduction_trace,
                c.ls_residual,
                c.rhs_norm
            ),
            None => println!("{name}: no poles detected"),
        }
    }
}

fn cmd_poles(a: PolesArgs) -> Result<(), Error> {
    let model = load_model(&a.model)?;
    let clusters = model.clustered_poles(a.cluster_radius)?;
    println!("sign   neuron  re                      im                      multiplicity");
    for p in &model.pole_report {
        let mult = clusters
            .iter()
            .min_by(|(c1, _), (c2, _)| {
                (c1 - p.location)
                    .norm()
                    .partial_cmp(&(c2 - p.location).norm())
                    .unwrap()
            })
            .map(|(_, m)| *m)
            .unwrap_or(1);
        let sign = match p.component_sign {
            polefit_core::network::ComponentSign::Plus => "plus ",
            polefit_core::network::ComponentSign::Minus => "minus",
        };
        if p.at_infinity {
            println!("{sign}  {:>5}   (pole at infinity)", p.neuron_index);
        } else {
            println!(
                "{sign}  {:>5}   {: <22}  {: <22}  {mult}",
                p.neuron_index, p.location.re, p.location.im
            );
        }
    }
    println!("{} estimates in {} clusters", model.pole_report.len(), clusters.len());
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), Error> {
    let model = load_model(&a.model)?;
    let (re_lo, re_hi, re_n) = parse_count_range(&a.re)?;
    let (im_lo, im_hi, im_n) = parse_count_range(&a.im)?;
    let grid = eval_grid(&model, (re_lo, re_hi), (im_lo, im_hi), (re_n, im_n))?;
    write_grid_csv(&a.out, &grid)?;
    println!("wrote {} grid points to {}", grid.len(), a.out.display());
    Ok(())
}

fn write_grid_csv(path: &Path, grid: &[polefit_core::pipeline::GridPoint]) -> Result<(), Error> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "re,im,abs,arg")?;
    for p in grid {
        writeln!(f, "{},{},{},{}", p.re, p.im, p.abs, p.arg)?;
    }
    Ok(())
}

fn cmd_demo(a: DemoArgs) -> Result<(), Error> {
    if a.name != "exfun" {
        return Err(Error::Validation(format!(
            "unknown demo '{}'; available: exfun",
            a.name
        )));
    }
    std::fs::create_dir_all(&a.out_dir)?;
    let f = funcs::named_function("exfun")?;
    let samples = ContourSamples::from_function(|z| f(z), 0.99, 150)?;
    let mut cfg = FitConfig::new(0.99, 70, 70);
    cfg.seed = 12345;
    cfg.z0 = C64::new(-0.3, 35.0 / 30.0);
    let model = fit(&samples, &cfg)?;
    print_fit_summary(&model);

    let clusters = model.clustered_poles(1e-4)?;
    println!(
        "{} pole estimates, {} clusters (radius 1e-4), multiplicities > 1: {}",
        model.pole_report.len(),
        clusters.len(),
        clusters.iter().filter(|(_, m)| *m > 1).count()
    );
    let truth = funcs::benchmark_pole_multiset();
    let worst = clusters
        .iter()
        .map(|(c, _)| truth.iter().map(|(t, _)| (c - t).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    println!("worst cluster-centroid distance to a true pole: {worst:.3e}");

    let model_path = a.out_dir.join("model.json");
    save_model(&model, &model_path)?;
    let mut poles_csv = String::from("sign,neuron,re,im\n");
    for p in &model.pole_report {
        poles_csv.push_str(&format!(
            "{},{},{},{}\n",
            match p.component_sign {
                polefit_core::network::ComponentSign::Plus => "plus",
                polefit_core::network::ComponentSign::Minus => "minus",
            },
            p.neuron_index,
            p.location.re,
            p.location.im
        ));
    }
    std::fs::write(a.out_dir.join("poles.csv"), poles_csv)?;
    let grid = eval_grid(&model, (-1.4, 1.4), (-1.4, 1.4), (120, 120))?;
    write_grid_csv(&a.out_dir.join("grid.csv"), &grid)?;
    println!("model.json, poles.csv, grid.csv written to {}", a.out_dir.display());
    Ok(())
}

fn cmd_pde(a: PdeArgs) -> Result<(), Error> {
    let times = parse_step_range(&a.times)?;
    let cfg = PdeConfig {
        eta: a.eta,
        nu: a.nu,
        beta: a.beta_exp.exp(),
        n: a.n,
        dt: a.dt,
        times,
    };
    let mut fit_cfg = FitConfig::new(1.0, a.n1, a.m1);
    fit_cfg.tol = a.tol;
    fit_cfg.z0 = parse_complex(&a.z0)?;
    fit_cfg.seed = a.seed;
    let source = match a.source.as_str() {
        "exact" => CoefficientSource::Exact,
        "ode" => CoefficientSource::Ode,
        other => return Err(Error::Validation(format!("unknown --source '{other}'"))),
    };
    let report = trajectory_report(&cfg, &fit_cfg, source)?;

    println!("blow-up time: {}", report.blow_up_time);
    println!(
        "t       w11+        b11+        s+                   s-                   err+      err-"
    );
    for row in &report.rows {
        let fmt_c = |c: Option<C64>| match c {
            Some(z) => format!("{:+.6}", z.re),
            None => "   --   ".into(),
        };
        let pick = |sign: polefit_core::network::ComponentSign| {
            row.track
                .estimates
                .iter()
                .find(|e| e.sign == sign)
                .map(|e| {
                    (format!("{:+.5}{:+.5}i", e.s.re, e.s.im), format!("{:.2e}", e.error))
                })
                .unwrap_or(("--".into(), "--".into()))
        };
        let (sp, ep) = pick(polefit_core::network::ComponentSign::Plus);
        let (sm, em) = pick(polefit_core::network::ComponentSign::Minus);
        println!(
            "{:<7} {:<11} {:<11} {:<20} {:<20} {:<9} {}",
            row.t,
            fmt_c(row.w11_plus),
            fmt_c(row.b11_plus),
            sp,
            sm,
            ep,
            em
        );
    }
    for (t, msg) in &report.ode_failures {
        println!("ode source unavailable from t = {t}: {msg}");
    }

    if let Some(dir) = &a.grid_dir {
        std::fs::create_dir_all(dir)?;
        for &t in &cfg.times {
            let state = SpectralState::from_exact(&cfg, t)?;
            let model = polefit_core::pdelab::fit_at_time(&state, &fit_cfg)?;
            // strip z in [-pi, pi] x i[-1, 1], evaluated as Phi(e^{iz})
            let (nx, ny) = (121usize, 41usize);
            let mut csv = String::from("re_z,im_z,abs,arg\n");
            for i in 0..nx {
                let x = -std::f64::consts::PI
                    + 2.0 * std::f64::consts::PI * i as f64 / (nx - 1) as f64;
                for j in 0..ny {
                    let y = -1.0 + 2.0 * j as f64 / (ny - 1) as f64;
                    let w = (C64::i() * C64::new(x, y)).exp();
                    let v = model.eval(w)?;
                    csv.push_str(&format!("{},{},{},{}\n", x, y, v.norm(), v.arg()));
                }
            }
            std::fs::write(dir.join(format!("grid_t{t:.3}.csv")), csv)?;
        }
        println!("per-time grids written to {}", dir.display());
    }

    let mut json_report = serde_json::to_value(&report)?;
    if a.emit_models || a.emit_coeffs {
        let mut extras = Vec::new();
        for &t in &cfg.times {
            let state = SpectralState::from_exact(&cfg, t)?;
            let mut entry = json!({"t": t});
            if a.emit_coeffs {
                let coeffs: Vec<Value> =
                    state.coeffs().iter().map(|z| json!([z.re, z.im])).collect();
                entry["coeffs"] = Value::Array(coeffs);
            }
            if a.emit_models {
                let model = polefit_core::pdelab::fit_at_time(&state, &fit_cfg)?;
                entry["model"] = polefit_core::pipeline::model_to_json(&model);
            }
            extras.push(entry);
        }
        json_report["per_time"] = Value::Array(extras);
    }
    std::fs::write(&a.out, serde_json::to_string_pretty(&json_report)?)?;
    println!("report written to {}", a.out.display());
    Ok(())
}
