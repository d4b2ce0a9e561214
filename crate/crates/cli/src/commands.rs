use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use qtsallis::entropy::{subadditivity_gap, tsallis_entropy};
use qtsallis::io::{findings_csv, format_sig, reports_csv, reports_json, MatrixFile, TensorFile};
use qtsallis::linalg::{BipartiteState, ComplexMatrix, DensityMatrix, TripartiteState};
use qtsallis::quasi::{quasi_entropy_spectral, quasi_entropy_superop_oracle, QuasiEntropyInput};
use qtsallis::sampler::{search_violations_with_threads, QGrid, SamplerConfig};
use qtsallis::ssa::{
    bell_state, classical_ssa_check, deficit_reports, example_bell_family, example_diag4,
    example_entangled_product, example_proposition, DeficitReport, VIOLATION_TOL,
};
use qtsallis::QScalarFunction;

use crate::{
    Builtin, ClassicalArgs, EntropyArgs, Example, Format, FunctionKind, QSelection, QuasiArgs,
    ReproArgs, SearchArgs, SsaCheckArgs,
};

const DEFAULT_REPRO_GRID: &str = "0.25:3:0.25";
const DEFAULT_DIAG4_GRID: &str = "1:3:0.25";
const THREADS_VAR: &str = "QTSALLIS_THREADS";

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn read_matrix(path: &str) -> Result<MatrixFile> {
    MatrixFile::parse(&read_input(path)?).with_context(|| format!("parsing {path}"))
}

fn read_density(path: &str) -> Result<DensityMatrix> {
    read_matrix(path)?.density().with_context(|| format!("state in {path}"))
}

fn check_q(q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        bail!("q must be a positive number, got {q}");
    }
    Ok(q)
}

fn q_values(sel: &QSelection) -> Result<Vec<f64>> {
    match (sel.q, sel.q_grid) {
        (Some(q), None) => Ok(vec![check_q(q)?]),
        (None, Some(g)) => Ok(g.values()),
        _ => bail!("give exactly one of --q or --q-grid"),
    }
}

fn print_number(x: f64) {
    println!("{}", format_sig(x, 15));
}

pub fn entropy(args: EntropyArgs) -> Result<ExitCode> {
    let q = check_q(args.q)?;
    let state = match (args.builtin, args.state.as_deref()) {
        (Some(Builtin::MaximallyMixedQubit), _) => DensityMatrix::maximally_mixed(2),
        (Some(Builtin::Proposition), _) => example_proposition().state,
        (Some(Builtin::Bell), _) => bell_state().state,
        (None, Some(path)) => read_density(path)?,
        (None, None) => bail!("no state given"),
    };
    print_number(tsallis_entropy(&state, q)?);
    Ok(ExitCode::SUCCESS)
}

pub fn quasi(args: QuasiArgs) -> Result<ExitCode> {
    let rho = read_matrix(&args.rho)?.matrix()?;
    let sigma = read_matrix(&args.sigma)?.matrix()?;
    let weight = match &args.weight {
        Some(p) => read_matrix(p)?.matrix()?,
        None => ComplexMatrix::identity(rho.rows()),
    };
    let f = match args.function {
        FunctionKind::NegLnQ => QScalarFunction::neg_ln_q(args.q)?,
        FunctionKind::LnQ => QScalarFunction::ln_q(args.q)?,
        FunctionKind::BigLnQ => QScalarFunction::big_ln_q(args.q)?,
        FunctionKind::Power => QScalarFunction::power(args.q)?,
    };
    let input = QuasiEntropyInput::new(rho, sigma, weight, f)?;
    let value = if args.oracle {
        quasi_entropy_superop_oracle(&input)?
    } else {
        quasi_entropy_spectral(&input)?
    };
    print_number(value);
    Ok(ExitCode::SUCCESS)
}

const BASIC_COLUMNS: &str = "q,S123,S12,S23,S2,S1,S3,deficit";

fn render_reports(reports: &[DeficitReport], all: bool, format: Format) -> String {
    match (format, all) {
        (Format::Json, _) => {
            let mut s = reports_json(reports);
            s.push('\n');
            s
        }
        (Format::Csv, true) => reports_csv(reports),
        (Format::Csv, false) => {
            // the leading columns of the full report
            let full = reports_csv(reports);
            let keep = BASIC_COLUMNS.split(',').count();
            full.lines()
                .map(|l| l.split(',').take(keep).collect::<Vec<_>>().join(",") + "\n")
                .collect()
        }
    }
}

fn exit_for(reports: &[DeficitReport]) -> ExitCode {
    if reports.iter().any(DeficitReport::is_violation) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

pub fn ssa_check(args: SsaCheckArgs) -> Result<ExitCode> {
    let state = read_matrix(&args.state)?
        .tripartite()
        .with_context(|| format!("state in {}", args.state))?;
    let qs = q_values(&args.qs)?;
    let reports = deficit_reports(&state, &qs)?;
    print!("{}", render_reports(&reports, args.all_theorems, args.format));
    Ok(exit_for(&reports))
}

fn emit_report(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stderr().write_all(text.as_bytes()).context("writing report"),
    }
}

fn grid_or(g: Option<QGrid>, default: &str) -> QGrid {
    g.unwrap_or_else(|| default.parse().expect("built-in grid is valid"))
}

pub fn repro(args: ReproArgs) -> Result<ExitCode> {
    let state: TripartiteState = match args.example {
        Example::Proposition => example_proposition(),
        Example::EntangledProduct { rho12, rho3 } => {
            let rho12 = match rho12 {
                Some(p) => {
                    let m = read_matrix(&p)?;
                    let dims = match m.dims.as_deref() {
                        Some(&[a, b]) => [a, b],
                        None if m.re.len() == 4 => [2, 2],
                        _ => bail!("{p}: rho12 needs \"dims\": [d1, d2]"),
                    };
                    BipartiteState::new(m.density()?, dims)?
                }
                None => bell_state(),
            };
            let rho3 = match rho3 {
                Some(p) => read_density(&p)?,
                None => DensityMatrix::maximally_mixed(2),
            };
            example_entangled_product(&rho12, &rho3)?
        }
        Example::BellFamily { p, r, theta, rho1 } => {
            let rho1 = match rho1 {
                Some(path) => read_density(&path)?,
                None => DensityMatrix::maximally_mixed(2),
            };
            example_bell_family(p, r, theta, &rho1)?
        }
        Example::Diag4 { a, b, c, d } => {
            return repro_diag4([a, b, c, d], grid_or(args.q_grid, DEFAULT_DIAG4_GRID), &args)
        }
    };
    let qs = grid_or(args.q_grid, DEFAULT_REPRO_GRID).values();
    let reports = deficit_reports(&state, &qs)?;
    let file = MatrixFile::from_matrix(state.state.matrix(), Some(state.dims.to_vec()));
    println!("{}", file.to_json());
    emit_report(&render_reports(&reports, true, args.format), args.report_out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn repro_diag4(p: [f64; 4], grid: QGrid, args: &ReproArgs) -> Result<ExitCode> {
    let d = BipartiteState::new(DensityMatrix::diagonal(&p)?, [2, 2])?;
    let mut rows = Vec::new();
    for q in grid.values() {
        let (lhs, rhs) = example_diag4(p[0], p[1], p[2], p[3], q)?;
        let gap = subadditivity_gap(&d, q)?;
        rows.push((q, lhs, rhs, gap.gap));
    }
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("q,lhs,rhs,holds,subadditivity_gap\n");
            for (q, lhs, rhs, gap) in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_sig(*q, 17),
                    format_sig(*lhs, 17),
                    format_sig(*rhs, 17),
                    lhs <= rhs,
                    format_sig(*gap, 17)
                ));
            }
            s
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|&(q, lhs, rhs, gap)| {
                    serde_json::json!({
                        "q": q, "lhs": lhs, "rhs": rhs, "holds": lhs <= rhs,
                        "subadditivity_gap": gap,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    let file = MatrixFile::from_matrix(d.state.matrix(), Some(vec![2, 2]));
    println!("{}", file.to_json());
    emit_report(&text, args.report_out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(anyhow!("{THREADS_VAR} must be an integer >= 1, got '{v}'")),
        },
    }
}

pub fn search(args: SearchArgs) -> Result<ExitCode> {
    let mut cfg = SamplerConfig::new(args.seed, args.dims, args.ensemble, args.samples, args.q_grid)?;
    if args.inject_proposition {
        cfg = cfg.with_proposition()?;
    }
    let threads = thread_count()?;
    // open the destination first so a bad path fails before the run
    let mut sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(
            fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        ),
        None => Box::new(io::stdout()),
    };
    let findings = search_violations_with_threads(&cfg, threads)?;
    sink.write_all(findings_csv(&findings).as_bytes())
        .context("writing findings")?;
    sink.flush()?;

    let violations = findings.iter().filter(|f| f.report.is_violation()).count();
    let summary = match findings.first() {
        Some(w) => format!(
            "cells: {}, violations (deficit < -{VIOLATION_TOL:e}): {violations}, worst deficit: {} (state {}, q = {})",
            findings.len(),
            format_sig(w.report.deficit, 15),
            w.state_id,
            format_sig(w.report.q, 15)
        ),
        None => "cells: 0, violations: 0".into(),
    };
    // keep stdout clean for CSV when no --out was given
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

pub fn classical_check(args: ClassicalArgs) -> Result<ExitCode> {
    let p = TensorFile::parse(&read_input(&args.tensor)?)
        .with_context(|| format!("parsing {}", args.tensor))?;
    let mut violated = false;
    println!("q,deficit");
    for q in q_values(&args.qs)? {
        let d = classical_ssa_check(&p, q)?;
        violated |= d < -VIOLATION_TOL;
        println!("{},{}", format_sig(q, 17), format_sig(d, 17));
    }
    Ok(if violated { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
