//! `qtoric`: sector data and quasimap I-functions for toric DM stacks
//! presented by a charge matrix and a stability character.

mod insert;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use qtoric::error::Error;
use qtoric::exactmath::{parse_rat, Rat};
use qtoric::model::{check_ss_equals_s, GitPresentation};
use qtoric::output::{
    analyze_doc, analyze_failure_doc, big_series_doc, classes_doc, pretty_analyze,
    pretty_big_series, pretty_classes, pretty_series, series_doc, VerificationCheckDoc,
    VerificationDoc,
};
use qtoric::selfcheck;
use qtoric::series::{
    big_i, givental_small_i, grading_check, residue_two_path_check, semipositive_structure_check,
    small_i, twisted_small_i, TInsertion, TwistData, ZWindow,
};
use qtoric::Analysis;

#[derive(Parser)]
#[command(
    name = "qtoric",
    about = "Exact Chen-Ruan sector data and quasimap I-functions for toric DM stacks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Args)]
struct CommonArgs {
    /// Model file (JSON: name, n_rays, rank, charges, theta, ray_names?).
    #[arg(long)]
    model: PathBuf,
    /// Degree bound for curve classes, as an exact rational like 3 or 5/2.
    #[arg(long, default_value = "3")]
    d_max: String,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    /// Lowest z power to keep (with --z-max); content outside is dropped
    /// with a warning.
    #[arg(long, requires = "z_max", allow_hyphen_values = true)]
    z_min: Option<i64>,
    /// Highest z power to keep (with --z-min).
    #[arg(long, requires = "z_min", allow_hyphen_values = true)]
    z_max: Option<i64>,
    /// Automatic window: wide enough for every populated power (default).
    #[arg(long, conflicts_with_all = ["z_min", "z_max"])]
    z: Option<String>,
}

impl WindowArgs {
    fn window(&self) -> Result<ZWindow, String> {
        if let Some(mode) = &self.z {
            if mode != "auto" {
                return Err(format!(
                    "unknown z mode `{mode}`; use `auto` or --z-min/--z-max"
                ));
            }
        }
        Ok(match (self.z_min, self.z_max) {
            (Some(z_min), Some(z_max)) if z_min <= z_max => ZWindow::Explicit { z_min, z_max },
            (Some(_), Some(_)) => return Err("--z-min must not exceed --z-max".into()),
            _ => ZWindow::Auto,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Stability verdict, fixed-point subsets, exponent e, sector table,
    /// per-sector betti numbers, semipositivity report.
    Analyze(CommonArgs),
    /// Enumerate contributing curve classes with their dimension data.
    Classes(CommonArgs),
    /// Compute an I-function (small by default; --big, --givental or
    /// --twist select the other flavors).
    Iseries {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Twist characters: r-vectors of integers. Separate characters
        /// with ';' (for rank 1, ',' also works), components with ','.
        #[arg(long)]
        twist: Option<String>,
        /// Compute the big I-function with the given insertions.
        #[arg(long)]
        big: bool,
        /// Insertion `NAME:POLY` with POLY a polynomial in H1..Hr
        /// (repeatable), e.g. `t1:H1` or `t2:2/3*H1^2+H2`.
        #[arg(long)]
        insert: Vec<String>,
        /// Compute Givental's small I-function (t0 and one divisor
        /// direction per torus factor).
        #[arg(long, conflicts_with = "big")]
        givental: bool,
        /// Rational scales for the divisor directions of --givental,
        /// comma-separated (default: all 1).
        #[arg(long)]
        t_scales: Option<String>,
        /// Truncation order in total t-degree for --big/--givental.
        #[arg(long, default_value_t = 1)]
        t_order: usize,
        /// Run the grading and two-path checks inline and embed a
        /// verification block (small flavor only). Exit 4 on failure.
        #[arg(long)]
        check: bool,
    },
    /// Run the verification checks (grading, two-path residues, and the
    /// semi-positive structure when applicable) on a model.
    Check {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the acceptance battery on the bundled corpus, or a generic
    /// verification sweep over a directory of models.
    Selftest {
        /// Directory of model JSON files to sweep instead of the bundled
        /// battery.
        #[arg(long)]
        models: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Stability(_) => 2,
        Error::Model(_)
        | Error::Shape(_)
        | Error::Precondition(_)
        | Error::EmptySemistableLocus
        | Error::Io(_)
        | Error::Json(_) => 3,
        Error::Check(_) => 4,
        Error::Internal(_) => 1,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn input_error(msg: String) -> ExitCode {
    fail(Error::Model(msg))
}

fn emit(common: &CommonArgs, json: String, pretty: String) -> Result<(), Error> {
    let body = match common.format {
        Format::Json => json,
        Format::Pretty => pretty,
    };
    match &common.out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn load_model(path: &PathBuf) -> Result<GitPresentation, Error> {
    let text = std::fs::read_to_string(path)?;
    GitPresentation::load(&text)
}

fn parse_d_max(text: &str) -> Result<Rat, Error> {
    parse_rat(text).ok_or_else(|| {
        Error::Model(format!(
            "bad --d-max `{text}`; use an exact rational like 3 or 5/2"
        ))
    })
}

fn parse_twist(text: &str, rank: usize) -> Result<TwistData, Error> {
    let chunks: Vec<&str> = if text.contains(';') {
        text.split(';').collect()
    } else if rank == 1 {
        text.split(',').collect()
    } else {
        vec![text]
    };
    let mut characters = Vec::new();
    for chunk in chunks {
        let components: Vec<BigInt> = chunk
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map(BigInt::from)
                    .map_err(|_| Error::Model(format!("bad twist component `{c}`")))
            })
            .collect::<Result<_, _>>()?;
        if components.len() != rank {
            return Err(Error::Model(format!(
                "twist character `{chunk}` has {} components, expected rank = {rank}",
                components.len()
            )));
        }
        characters.push(components);
    }
    Ok(TwistData { characters })
}

fn run_verification(analysis: &Analysis, d_max: &Rat) -> Result<VerificationDoc, Error> {
    let series = small_i(analysis, d_max, ZWindow::Auto)?;
    let violations = grading_check(&series);
    let grading = VerificationCheckDoc {
        status: if violations.is_empty() {
            "pass"
        } else {
            "fail"
        }
        .into(),
        detail: format!(
            "{} terms audited, {} violations",
            series.terms.len(),
            violations.len()
        ),
    };

    let classes = analysis.effective_classes(d_max)?;
    let mut two_path_failures = 0usize;
    for beta in &classes {
        if residue_two_path_check(analysis, beta).is_err() {
            two_path_failures += 1;
        }
    }
    let two_path = VerificationCheckDoc {
        status: if two_path_failures == 0 {
            "pass"
        } else {
            "fail"
        }
        .into(),
        detail: format!(
            "{} classes compared, {} mismatches",
            classes.len(),
            two_path_failures
        ),
    };

    let semipositivity = qtoric::classes::semipositivity_report(
        analysis.presentation(),
        &analysis.stability().fixed_subsets,
        d_max,
    )?;
    let semipositive_structure = match semipositivity {
        qtoric::SemipositivityReport::Pass { .. } => {
            Some(match semipositive_structure_check(&series) {
                Ok(()) => VerificationCheckDoc {
                    status: "pass".into(),
                    detail: "no positive z powers; unit z^0; age-shifted z^-1 degree at most 1"
                        .into(),
                },
                Err(e) => VerificationCheckDoc {
                    status: "fail".into(),
                    detail: e.to_string(),
                },
            })
        }
        qtoric::SemipositivityReport::Violation { .. } => None,
    };

    Ok(VerificationDoc {
        grading,
        two_path,
        semipositive_structure,
    })
}

fn cmd_analyze(common: &CommonArgs) -> Result<(), Error> {
    let p = load_model(&common.model)?;
    let d_max = parse_d_max(&common.d_max)?;
    let report = check_ss_equals_s(&p)?;
    if !report.ss_equals_s {
        let doc = analyze_failure_doc(&p, &report);
        let json = serde_json::to_string_pretty(&doc)? + "\n";
        emit(common, json, pretty_analyze(&doc))?;
        return Err(Error::Stability(format!(
            "semistable != stable; witness rays {:?}",
            report.witness.unwrap_or_default()
        )));
    }
    let analysis = Analysis::new(p, None)?;
    let doc = analyze_doc(&analysis, &d_max)?;
    let json = serde_json::to_string_pretty(&doc)? + "\n";
    emit(common, json, pretty_analyze(&doc))
}

fn cmd_classes(common: &CommonArgs) -> Result<(), Error> {
    let p = load_model(&common.model)?;
    let d_max = parse_d_max(&common.d_max)?;
    let analysis = Analysis::new(p, None)?;
    let doc = classes_doc(&analysis, &d_max)?;
    // Machine output is the bare class array.
    let json = serde_json::to_string_pretty(&doc.classes)? + "\n";
    emit(common, json, pretty_classes(&doc))
}

#[allow(clippy::too_many_arguments)]
fn cmd_iseries(
    common: &CommonArgs,
    window: &WindowArgs,
    twist: Option<&String>,
    big: bool,
    inserts: &[String],
    givental: bool,
    t_scales: Option<&String>,
    t_order: usize,
    check: bool,
) -> Result<(), Error> {
    let p = load_model(&common.model)?;
    let rank = p.rank();
    let d_max = parse_d_max(&common.d_max)?;
    let window = window.window().map_err(Error::Model)?;
    let analysis = Analysis::new(p, None)?;

    if big || givental {
        if check {
            return Err(Error::Model(
                "--check applies to the small flavor only".into(),
            ));
        }
        let series = if givental {
            let scales: Option<Vec<Rat>> = match t_scales {
                None => None,
                Some(text) => Some(
                    text.split(',')
                        .map(|c| {
                            parse_rat(c.trim())
                                .ok_or_else(|| Error::Model(format!("bad scale `{c}`")))
                        })
                        .collect::<Result<_, _>>()?,
                ),
            };
            givental_small_i(&analysis, &d_max, t_order, scales.as_deref(), window)?
        } else {
            let mut vars = Vec::new();
            for raw in inserts {
                let (name, poly_text) = raw.split_once(':').ok_or_else(|| {
                    Error::Model(format!("bad --insert `{raw}`; expected NAME:POLY"))
                })?;
                let poly = insert::parse_insertion_poly(poly_text, rank)
                    .map_err(|e| Error::Model(e.to_string()))?;
                vars.push((name.trim().to_string(), poly));
            }
            let insertion = TInsertion {
                vars,
                order: t_order,
            };
            big_i(&analysis, &d_max, &insertion, window)?
        };
        let doc = big_series_doc(&analysis, &series);
        let json = serde_json::to_string_pretty(&doc)? + "\n";
        return emit(common, json, pretty_big_series(&doc));
    }

    let series = match twist {
        Some(text) => {
            if check {
                return Err(Error::Model(
                    "--check applies to the small flavor only".into(),
                ));
            }
            let twist = parse_twist(text, rank)?;
            twisted_small_i(&analysis, &twist, &d_max, window)?
        }
        None => small_i(&analysis, &d_max, window)?,
    };

    let mut doc = series_doc(&analysis, &series);
    let mut check_failed = false;
    if check {
        let verification = run_verification(&analysis, &d_max)?;
        check_failed = !verification.all_passed();
        doc.verification = Some(verification);
    }
    let json = serde_json::to_string_pretty(&doc)? + "\n";
    emit(common, json, pretty_series(&doc))?;
    if check_failed {
        return Err(Error::Check("embedded verification failed".into()));
    }
    Ok(())
}

fn cmd_check(common: &CommonArgs) -> Result<(), Error> {
    let p = load_model(&common.model)?;
    let d_max = parse_d_max(&common.d_max)?;
    let analysis = Analysis::new(p, None)?;
    let verification = run_verification(&analysis, &d_max)?;
    let json = serde_json::to_string_pretty(&verification)? + "\n";
    let pretty = {
        let mut out = String::new();
        out.push_str(&format!(
            "check grading: {} ({})\n",
            verification.grading.status, verification.grading.detail
        ));
        out.push_str(&format!(
            "check two_path: {} ({})\n",
            verification.two_path.status, verification.two_path.detail
        ));
        if let Some(s) = &verification.semipositive_structure {
            out.push_str(&format!(
                "check semipositive_structure: {} ({})\n",
                s.status, s.detail
            ));
        }
        out
    };
    emit(common, json, pretty)?;
    if !verification.all_passed() {
        return Err(Error::Check("verification failed".into()));
    }
    Ok(())
}

fn cmd_selftest(models: Option<&PathBuf>) -> Result<(), Error> {
    match models {
        None => {
            let results = selfcheck::run_battery();
            let mut all = true;
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("[{status}] criterion {:2}: {} — {}", r.id, r.name, r.detail);
                all &= r.passed;
            }
            if !all {
                return Err(Error::Check("acceptance battery failed".into()));
            }
            println!("all {} criteria passed", results.len());
            Ok(())
        }
        Some(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                println!("no models in {}; nothing to verify", dir.display());
                return Ok(());
            }
            let d_max = Rat::from_integer(BigInt::from(2));
            let mut failures = 0usize;
            for path in &paths {
                let name = path
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .to_string();
                let outcome = (|| -> Result<(), Error> {
                    let p = load_model(path)?;
                    let report = check_ss_equals_s(&p)?;
                    if !report.ss_equals_s {
                        return Err(Error::Stability(format!(
                            "witness rays {:?}",
                            report.witness.unwrap_or_default()
                        )));
                    }
                    let analysis = Analysis::new(p, None)?;
                    let verification = run_verification(&analysis, &d_max)?;
                    if !verification.all_passed() {
                        return Err(Error::Check("verification failed".into()));
                    }
                    Ok(())
                })();
                match outcome {
                    Ok(()) => println!("[PASS] {name}"),
                    Err(e) => {
                        println!("[FAIL] {name}: {e}");
                        failures += 1;
                    }
                }
            }
            if failures > 0 {
                return Err(Error::Check(format!("{failures} model(s) failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("QTORIC_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                return input_error(format!(
                    "QTORIC_THREADS must be a positive integer, got `{threads}`"
                ));
            }
        }
    }

    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(common) => cmd_analyze(common),
        Command::Classes(common) => cmd_classes(common),
        Command::Iseries {
            common,
            window,
            twist,
            big,
            insert,
            givental,
            t_scales,
            t_order,
            check,
        } => cmd_iseries(
            common,
            window,
            twist.as_ref(),
            *big,
            insert,
            *givental,
            t_scales.as_ref(),
            *t_order,
            *check,
        ),
        Command::Check { common } => cmd_check(common),
        Command::Selftest { models } => cmd_selftest(models.as_ref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
