//! `pauli-dilate`: channels, dilations, representations and collision studies from the shell.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pauli_dilate::dilation::{dilation_from_kraus, solve_env_rep_with_tol, solve_su2_generators};
use pauli_dilate::io::{
    fmt_real, json_matrix, json_real, ChannelDescriptor, CollisionDescriptor,
    CommutantDescriptor, DilationDescriptor,
};
use pauli_dilate::matcore::{hermitian_eigen, DEFAULT_TOL};
use pauli_dilate::collision::{convergence_report, error_ratios};
use pauli_dilate::pauli::pauli_commutant;
use pauli_dilate::verify::{dilation_checks, run_all, CheckResult, Family};
use pauli_dilate::{Error, GroupRep};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Probabilities, Bloch scalings, Kraus rank and Choi spectrum of a channel.
    Channel,
    /// Minimal Stinespring isometry of a channel.
    Dilate,
    /// Environment representation solved from the minimal dilation.
    Rep,
    /// Pauli strings commuting with every generator.
    Commutant,
    /// Fitted Pauli probabilities of a physical dilation over time.
    Evolve,
    /// Collision-model convergence study.
    Collide,
    /// Invariant suite, or symmetry checks for one dilation with --in.
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "pauli-dilate", version, about = "Symmetric dilations of qubit Pauli channels")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON descriptor: a file path or inline JSON.
    #[arg(long = "in", value_name = "JSON")]
    input: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Final time for evolve; evaluation time for Liouvillian channels.
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of time samples for evolve.
    #[arg(long, default_value_t = 25)]
    samples: usize,
    /// Exit with status 2 when evolve leakage exceeds the tolerance.
    #[arg(long)]
    strict: bool,
    /// Overrides the residual or leakage tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResidualTooLarge { .. }
            | Error::NonPauliDynamics { .. }
            | Error::NonCommuting { .. }
            | Error::NonInvariantSubspace { .. } => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

/// Output text plus an exit status for tolerance failures that still produce output.
struct Report {
    text: String,
    code: u8,
}

impl Report {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn read_input(cli: &Cli) -> Result<String, Failure> {
    let raw = cli
        .input
        .as_deref()
        .ok_or_else(|| Failure::validation("this command needs --in"))?;
    if raw.trim_start().starts_with('{') {
        Ok(raw.to_string())
    } else {
        std::fs::read_to_string(raw).map_err(|e| Failure::validation(format!("cannot read {raw}: {e}")))
    }
}

fn parse<T: serde::de::DeserializeOwned>(cli: &Cli) -> Result<T, Failure> {
    let text = read_input(cli)?;
    serde_json::from_str(&text).map_err(|e| Failure::validation(format!("malformed descriptor: {e}")))
}

fn check_tol(tol: Option<f64>) -> Result<f64, Failure> {
    match tol {
        None => Ok(DEFAULT_TOL),
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(Failure::validation(format!("--tol must be positive, got {t}"))),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_channel(cli: &Cli) -> Result<Report, Failure> {
    let desc: ChannelDescriptor = parse(cli)?;
    let t = cli.tmax.unwrap_or(1.0);
    let ch = desc.to_channel(t)?;
    let eig = hermitian_eigen(&ch.choi())?;
    let out = json!({
        "probabilities": ch.probabilities().map(json_real),
        "lambda": ch.bloch_scaling().map(json_real),
        "kraus_rank": ch.kraus_ops().len(),
        "choi_eigenvalues": eig.values.iter().map(|&x| json_real(x)).collect::<Vec<_>>(),
    });
    Ok(Report::ok(pretty(&out)))
}

fn minimal_isometry(cli: &Cli) -> Result<(pauli_dilate::PauliChannel, pauli_dilate::Isometry), Failure> {
    let desc: ChannelDescriptor = parse(cli)?;
    let ch = desc.to_channel(cli.tmax.unwrap_or(1.0))?;
    let v = dilation_from_kraus(&ch.kraus_ops(), None)?;
    Ok((ch, v))
}

fn cmd_dilate(cli: &Cli) -> Result<Report, Failure> {
    let (_, v) = minimal_isometry(cli)?;
    let out = json!({
        "dim_s": v.dim_s(),
        "dim_e": v.dim_e(),
        "isometry": json_matrix(v.matrix()),
        "isometry_defect": json_real(v.matrix().isometry_defect()),
    });
    Ok(Report::ok(pretty(&out)))
}

fn cmd_rep(cli: &Cli) -> Result<Report, Failure> {
    let tol = check_tol(cli.tol)?;
    let (ch, v) = minimal_isometry(cli)?;
    let sol = solve_env_rep_with_tol(&v, &GroupRep::pauli_defining(), tol)?;
    let elements: Vec<Value> = sol
        .rep
        .labels()
        .iter()
        .zip(sol.rep.mats())
        .zip(sol.residuals.iter().zip(&sol.unitarity_defects))
        .map(|((label, m), (&res, &unit))| {
            json!({
                "label": label,
                "matrix": json_matrix(m),
                "residual": json_real(res),
                "unitarity_defect": json_real(unit),
            })
        })
        .collect();
    let [_, px, py, pz] = ch.probabilities();
    let depolarizing = px > 0.0 && (px - py).abs() <= tol && (py - pz).abs() <= tol;
    let su2 = if depolarizing {
        let (j, residual) = solve_su2_generators(&v)?;
        json!({
            "jx": json_matrix(&j.jx),
            "jy": json_matrix(&j.jy),
            "jz": json_matrix(&j.jz),
            "residual": json_real(residual),
        })
    } else {
        Value::Null
    };
    let out = json!({
        "dim_e": v.dim_e(),
        "elements": elements,
        "max_residual": json_real(sol.max_residual()),
        "max_unitarity_defect": json_real(sol.max_unitarity_defect()),
        "su2": su2,
    });
    let code = if sol.max_unitarity_defect() > tol.max(pauli_dilate::dilation::UNITARITY_TOL) {
        2
    } else {
        0
    };
    Ok(Report { text: pretty(&out), code })
}

fn cmd_commutant(cli: &Cli) -> Result<Report, Failure> {
    let desc: CommutantDescriptor = parse(cli)?;
    let strings = pauli_commutant(&desc.generators()?, desc.qubits)?;
    let out = json!({
        "qubits": desc.qubits,
        "count": strings.len(),
        "commutant": strings.iter().map(|s| s.letters()).collect::<Vec<_>>(),
    });
    Ok(Report::ok(pretty(&out)))
}

fn cmd_evolve(cli: &Cli) -> Result<Report, Failure> {
    let tol = check_tol(cli.tol)?;
    let desc: DilationDescriptor = parse(cli)?;
    let pd = desc.to_dilation()?;
    let tmax = cli.tmax.unwrap_or(std::f64::consts::TAU);
    if !(tmax.is_finite() && tmax >= 0.0) {
        return Err(Failure::validation(format!("--tmax must be nonnegative, got {tmax}")));
    }
    if cli.samples < 2 {
        return Err(Failure::validation("--samples must be at least 2"));
    }
    let mut text = String::from("t,pI,px,py,pz,leakage\n");
    let mut worst: f64 = 0.0;
    for k in 0..cli.samples {
        let t = tmax * k as f64 / (cli.samples - 1) as f64;
        let fit = pd.fit_at(t)?;
        worst = worst.max(fit.leakage);
        let p = fit.probabilities;
        writeln!(
            text,
            "{},{},{},{},{},{}",
            fmt_real(t),
            fmt_real(p[0]),
            fmt_real(p[1]),
            fmt_real(p[2]),
            fmt_real(p[3]),
            fmt_real(fit.leakage)
        )
        .expect("writing to a String");
    }
    let code = if worst > tol {
        eprintln!("leakage {} exceeds tolerance {}", fmt_real(worst), fmt_real(tol));
        if cli.strict {
            2
        } else {
            0
        }
    } else {
        0
    };
    Ok(Report { text, code })
}

fn cmd_collide(cli: &Cli) -> Result<Report, Failure> {
    let desc: CollisionDescriptor = parse(cli)?;
    let cfg = desc.config()?;
    let rows = convergence_report(&cfg, &desc.dts(), desc.t_final(), &desc.initial_state()?)?;
    let mut text = String::from("dt,t,trace_distance\n");
    for row in &rows {
        for &(t, e) in &row.errors {
            writeln!(text, "{},{},{}", fmt_real(row.dt), fmt_real(t), fmt_real(e)).expect("writing to a String");
        }
    }
    let ratios = error_ratios(&rows);
    eprintln!("dt,max_error,ratio");
    for (k, row) in rows.iter().enumerate() {
        let ratio = if k == 0 { String::new() } else { fmt_real(ratios[k - 1]) };
        eprintln!("{},{},{}", fmt_real(row.dt), fmt_real(row.max_error), ratio);
    }
    Ok(Report::ok(text))
}

fn cmd_verify(cli: &Cli) -> Result<Report, Failure> {
    let results: Vec<CheckResult> = match cli.input {
        None => run_all(cli.seed),
        Some(_) => {
            let desc: DilationDescriptor = parse(cli)?;
            let pd = desc.to_dilation()?;
            let family = Family::for_dilation(&pd).ok_or_else(|| {
                Failure::validation(format!("no symmetry family for a {}-dimensional environment", pd.dim_e()))
            })?;
            dilation_checks("input", &pd, family)
        }
    };
    let mut text = String::new();
    for r in &results {
        writeln!(
            text,
            "{} {} residual={} tol={}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            fmt_real(r.residual),
            fmt_real(r.tol)
        )
        .expect("writing to a String");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(text, "{} checks, {} failed", results.len(), failed).expect("writing to a String");
    Ok(Report { text, code: if failed == 0 { 0 } else { 2 } })
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Channel => cmd_channel(cli),
        Command::Dilate => cmd_dilate(cli),
        Command::Rep => cmd_rep(cli),
        Command::Commutant => cmd_commutant(cli),
        Command::Evolve => cmd_evolve(cli),
        Command::Collide => cmd_collide(cli),
        Command::Verify => cmd_verify(cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &report.text),
                None => {
                    print!("{}", report.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
