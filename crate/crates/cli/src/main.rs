//! `trunsep`: noise thresholds for CZ gates over truncated-cube state sets,
//! separable certificates, and Monte Carlo simulation of noisy circuits.
//!
//! Exit codes: 0 success, 1 domain or validation failure, 2 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trunsep_core::scalar::{parse_scalar, to_decimal};
use trunsep_core::sim::{
    build_decomposition_table, chi_square, estimate, exact_distribution, z_scores, Circuit, SimError, MAX_ORACLE_QUBITS,
};
use trunsep_core::state_sets::{cz_orbit_classes, CanonicalCache};
use trunsep_core::threshold::{
    build_case4_certificate, case_threshold, grid, regenerate_case_certificate, sweep, sweep_csv,
    verify_certificate, CaseThreshold,
};
use trunsep_core::{Case, CertificateTarget, Scalar, SeparableCertificate, TruncatedCube};

#[derive(Parser, Debug)]
#[command(name = "trunsep", version, about = "Noisy-CZ separability thresholds and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Truncation parameter, e.g. `1/2`; must lie in (0, 1].
    #[arg(long, global = true, value_parser = parse_r)]
    r: Option<Scalar>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, default_value_t = 10_000)]
    shots: u64,

    /// Worker threads for sweeps and simulation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// LP threshold, Pauli witness bound and gap for each case at one `r`.
    Threshold {
        #[arg(long, value_parser = parse_case)]
        case: Option<Case>,
    },
    /// Thresholds for all four cases over a grid of `r` values.
    Sweep {
        #[arg(long, default_value = "0.30", value_parser = parse_r)]
        start: Scalar,
        #[arg(long, default_value = "1", value_parser = parse_r)]
        stop: Scalar,
        #[arg(long, default_value = "0.05", value_parser = parse_scalar_arg)]
        step: Scalar,
        /// Explicit comma-separated grid; overrides start/stop/step.
        #[arg(long, value_delimiter = ',', value_parser = parse_r)]
        grid: Option<Vec<Scalar>>,
    },
    /// Orbit classes of the 576 ideal CZ outputs on extremal pairs.
    Orbits,
    /// Writes a separable certificate for a case as JSON.
    Certify {
        #[arg(long, value_parser = parse_case)]
        case: Case,
    },
    /// Checks a certificate file exactly.
    Verify {
        path: PathBuf,
        /// Require the certificate to be for this case.
        #[arg(long, value_parser = parse_case)]
        case: Option<Case>,
    },
    /// Samples a circuit file; `--oracle` adds exact probabilities.
    Simulate {
        circuit: PathBuf,
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_scalar_arg(s: &str) -> Result<Scalar, String> {
    parse_scalar(s).map_err(|e| e.to_string())
}

fn parse_r(s: &str) -> Result<Scalar, String> {
    let r = parse_scalar_arg(s)?;
    if r <= Scalar::from_integer(0.into()) || r > Scalar::from_integer(1.into()) {
        return Err(format!("r must be in (0, 1], got {r}"));
    }
    Ok(r)
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse::<u8>().ok().and_then(Case::from_number).ok_or_else(|| format!("case must be 1, 2, 3 or 4, got `{s}`"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn require_r(cli: &Cli) -> Result<Scalar> {
    match &cli.r {
        Some(r) => Ok(r.clone()),
        None => Cli::command().error(ErrorKind::MissingRequiredArgument, "--r is required for this command").exit(),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialise");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Threshold { case } => cmd_threshold(cli, *case),
        Command::Sweep { start, stop, step, grid: explicit } => cmd_sweep(cli, start, stop, step, explicit.as_deref()),
        Command::Orbits => cmd_orbits(cli),
        Command::Certify { case } => cmd_certify(cli, *case),
        Command::Verify { path, case } => cmd_verify(path, *case),
        Command::Simulate { circuit, oracle } => cmd_simulate(cli, circuit, *oracle),
    }
}

fn rows_json(rows: &[CaseThreshold]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                json!({
                    "r": row.r.to_string(),
                    "case": row.case.number(),
                    "lambda_lp": row.lambda_lp.to_string(),
                    "lambda_witness": row.lambda_witness.to_string(),
                    "gap": row.gap.to_string(),
                    "lambda_lp_decimal": to_decimal(&row.lambda_lp, 12),
                    "lambda_witness_decimal": to_decimal(&row.lambda_witness, 12),
                    "gap_decimal": to_decimal(&row.gap, 12),
                })
            })
            .collect(),
    )
}

fn render_rows(cli: &Cli, rows: &[CaseThreshold]) -> String {
    match cli.format {
        Format::Csv => sweep_csv(rows),
        Format::Json => to_json(&rows_json(rows)),
    }
}

fn cmd_threshold(cli: &Cli, case: Option<Case>) -> Result<()> {
    let r = require_r(cli)?;
    let cube = TruncatedCube::new(r)?;
    let cases: Vec<Case> = case.map_or_else(|| Case::ALL.to_vec(), |c| vec![c]);
    let rows = cases.into_iter().map(|c| Ok(case_threshold(c, &cube)?)).collect::<Result<Vec<_>>>()?;
    emit(cli, &render_rows(cli, &rows))
}

fn cmd_sweep(cli: &Cli, start: &Scalar, stop: &Scalar, step: &Scalar, explicit: Option<&[Scalar]>) -> Result<()> {
    let points = match explicit {
        Some(points) => points.to_vec(),
        None => {
            if *step <= Scalar::from_integer(0.into()) {
                bail!("grid step must be positive, got {step}");
            }
            grid(start, stop, step)
        }
    };
    if points.is_empty() {
        bail!("empty grid");
    }
    let rows = sweep(&points, cli.jobs)?;
    emit(cli, &render_rows(cli, &rows))
}

fn cmd_orbits(cli: &Cli) -> Result<()> {
    let r = require_r(cli)?;
    let cube = TruncatedCube::new(r.clone())?;
    let classes = cz_orbit_classes(&cube, &CanonicalCache::new());
    let ext = cube.extrema();
    let text = match cli.format {
        Format::Csv => {
            let mut out = String::from("class,size,representative_a,representative_b\n");
            for (k, class) in classes.iter().enumerate() {
                let (a, b) = class.members[0];
                let _ = writeln!(out, "{},{},\"{}\",\"{}\"", k + 1, class.members.len(), ext[a], ext[b]);
            }
            out
        }
        Format::Json => to_json(&json!({
            "r": r.to_string(),
            "classes": classes.len(),
            "sizes": classes.iter().map(|c| c.members.len()).collect::<Vec<_>>(),
            "total": classes.iter().map(|c| c.members.len()).sum::<usize>(),
            "representatives": classes
                .iter()
                .map(|c| {
                    let (a, b) = c.members[0];
                    json!([ext[a].to_string(), ext[b].to_string()])
                })
                .collect::<Vec<_>>(),
        })),
    };
    emit(cli, &text)
}

fn cmd_certify(cli: &Cli, case: Case) -> Result<()> {
    let r = require_r(cli)?;
    let cert = match case {
        Case::Four => build_case4_certificate(&r)?,
        _ => regenerate_case_certificate(case, &r)?,
    };
    verify_certificate(&cert, case)?;
    let mut text = serde_json::to_string_pretty(&cert)?;
    text.push('\n');
    emit(cli, &text)?;
    eprintln!("case {case} at r = {r}: λ = {} with {} terms", cert.lambda, cert.terms.len());
    Ok(())
}

fn cmd_verify(path: &Path, case: Option<Case>) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let cert: SeparableCertificate = serde_json::from_str(&text).context("malformed certificate")?;
    let outcome = match (case, &cert.target) {
        (Some(k), _) => verify_certificate(&cert, k),
        (None, CertificateTarget::Case(k)) => verify_certificate(&cert, *k),
        (None, CertificateTarget::Custom(_)) => cert.check(),
    };
    match outcome {
        Ok(()) => {
            let target = match &cert.target {
                CertificateTarget::Case(k) => format!("case {k}"),
                CertificateTarget::Custom(_) => "custom input".to_string(),
            };
            println!("valid: {target}, r = {}, λ = {}, {} terms", cert.r, cert.lambda, cert.terms.len());
            Ok(())
        }
        Err(e) => bail!("invalid certificate: {e}"),
    }
}

fn cmd_simulate(cli: &Cli, path: &Path, oracle: bool) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut circuit = Circuit::from_json(&text)?;
    if let Some(r) = &cli.r {
        circuit.r = r.clone();
    }
    circuit.validate()?;
    let table = build_decomposition_table(&circuit.r)?;
    let est = match estimate(&circuit, &table, cli.shots, cli.seed, cli.jobs) {
        Err(SimError::BelowThreshold { lambda, required }) => bail!(
            "noise level λ = {lambda} is below the simulable threshold λ* = {required} ≈ {} at r = {}",
            to_decimal(&required, 6),
            circuit.r
        ),
        other => other?,
    };
    let exact = if oracle {
        if circuit.qubits() > MAX_ORACLE_QUBITS {
            bail!("--oracle supports at most {MAX_ORACLE_QUBITS} qubits, circuit has {}", circuit.qubits());
        }
        Some(exact_distribution(&circuit)?)
    } else {
        None
    };
    let counts = est.counts();
    let text = match (cli.format, &exact) {
        (Format::Json, None) => to_json(&serde_json::to_value(&est)?),
        (Format::Json, Some(probs)) => {
            let z = z_scores(&counts, probs, est.shots);
            let test = chi_square(&counts, probs, est.shots);
            let mut value = serde_json::to_value(&est)?;
            value["oracle"] = json!({
                "probabilities": probs,
                "z_scores": z,
                "chi_square": test,
                "lambda_star": table.lambda_star().to_string(),
            });
            to_json(&value)
        }
        (Format::Csv, None) => {
            let mut out = String::from("outcome,count,frequency,std_error\n");
            for o in &est.outcomes {
                let _ = writeln!(out, "{},{},{:.6},{:.6}", o.outcome, o.count, o.frequency, o.std_error);
            }
            out
        }
        (Format::Csv, Some(probs)) => {
            let z = z_scores(&counts, probs, est.shots);
            let mut out = String::from("outcome,count,frequency,exact,z\n");
            for (outcome, p) in probs {
                let count = counts.get(outcome).copied().unwrap_or(0);
                let _ =
                    writeln!(out, "{outcome},{count},{:.6},{p:.6},{:.3}", count as f64 / est.shots as f64, z[outcome]);
            }
            let test = chi_square(&counts, probs, est.shots);
            eprintln!("chi-square {:.3} on {} dof, p = {:.4}", test.statistic, test.dof, test.p_value);
            out
        }
    };
    emit(cli, &text)
}
