use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dihedral::cmform::CMForm;
use dihedral::dirichlet::DirichletChar;
use dihedral::hecke::{CharSpec, HeckeChar};
use dihedral::lvalue::{calibrate, completed_l, LSeriesSpec};
use dihedral::periods::{equivariance_check, shimura_periods, sturm_check, verify_deligne, verify_period_relation, Caps};
use dihedral::qfield::QuadField;
use dihedral::symdecomp::{critical_set, critical_set_oracle, factorization_check, rankin_selberg_check};
use dihedral::{arith, Error};
use dihedral_cli::*;
use rug::Complex;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dihedral", version, about = "CM forms, symmetric power L-values and Shimura period relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Imaginary quadratic field data.
    Field {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(value_enum, default_value_t = FieldAction::Info)]
        action: FieldAction,
    },
    /// Validate a character spec and print its invariants.
    Char {
        #[arg(value_enum)]
        action: CharAction,
        spec: PathBuf,
    },
    /// Fourier coefficients of the attached CM form.
    Coeffs {
        spec: PathBuf,
        #[arg(long)]
        upto: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact local factorization checks.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        sym: u32,
        #[arg(long, default_value_t = 100)]
        pmax: i64,
    },
    /// Critical integers of Sym^n of a weight-k form.
    Critical {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        sym: u32,
        #[arg(long)]
        oracle: bool,
    },
    /// Evaluate a degree one or two L-function.
    Lvalue {
        #[arg(long)]
        spec: PathBuf,
        /// `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[command(flatten)]
        prec: Prec,
    },
    /// Shimura periods of the form attached to a character.
    Periods {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        prec: Prec,
    },
    /// Recognition-based checks of the period relations.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        sym: u32,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        /// `modulus,index` of a Dirichlet character.
        #[arg(long)]
        twist: Option<String>,
        /// Conjugation index for `equivariance`.
        #[arg(long, default_value_t = 1)]
        b: i64,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = dihedral::recognize::DEFAULT_MAX_HEIGHT)]
        max_height: i64,
        #[command(flatten)]
        prec: Prec,
    },
    /// Dirichlet characters by canonical index.
    Dirichlet {
        #[arg(long)]
        modulus: i64,
        #[arg(long)]
        index: u64,
        #[command(subcommand)]
        action: DirichletAction,
    },
    /// Run a configured batch of checks and write one JSON report.
    Suite {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Prec {
    /// Working precision in bits (default from CM_PERIOD_PRECISION, else 256).
    #[arg(long)]
    prec: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldAction {
    Info,
}

#[derive(Clone, Copy, ValueEnum)]
enum CharAction {
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Factorization,
    RankinSelberg,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Relation,
    Deligne,
    Sturm,
    Equivariance,
}

#[derive(Subcommand)]
enum DirichletAction {
    /// Exact and numerical Gauss sum.
    Gauss,
    /// `L(m, chi)` at a critical integer.
    Lvalue {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        prec: Prec,
    },
}

/// The L-function an `lvalue --spec` file describes.
#[derive(Deserialize)]
#[serde(untagged)]
enum LSource {
    Dirichlet { dirichlet: [i64; 2] },
    Dedekind { dedekind: i64 },
    Form(CharSpec),
}

enum Failure {
    Usage(Error),
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn print(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("serializable");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn parse_complex(s: &str, prec: u32) -> Result<Complex, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| -> Result<f64, Error> { t.parse().map_err(|_| Error::Invalid(format!("--s: {s}"))) };
    match parts.as_slice() {
        [re] => Ok(Complex::with_val(prec, (num(re)?, 0.0))),
        [re, im] => Ok(Complex::with_val(prec, (num(re)?, num(im)?))),
        _ => Err(Error::Invalid(format!("--s expects re,im; got {s}"))),
    }
}

fn parse_twist(s: &Option<String>) -> Result<DirichletChar, Error> {
    match s {
        None => Ok(DirichletChar::trivial(1)),
        Some(t) => {
            let parts: Vec<&str> = t.split(',').map(str::trim).collect();
            let bad = || Error::Invalid(format!("--twist expects modulus,index; got {t}"));
            if parts.len() != 2 {
                return Err(bad());
            }
            let m: i64 = parts[0].parse().map_err(|_| bad())?;
            let i: u64 = parts[1].parse().map_err(|_| bad())?;
            DirichletChar::from_index(m, i)
        }
    }
}

fn character(path: &std::path::Path) -> Result<HeckeChar, Error> {
    HeckeChar::from_spec(&load_spec(path)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Field { disc, action: FieldAction::Info } => {
            let k = QuadField::new(disc)?;
            let split: Vec<Value> = arith::primes_below(100)
                .into_iter()
                .map(|p| {
                    let s = k.prime_splitting(p).map(|s| format!("{s:?}").to_lowercase()).unwrap_or_default();
                    json!([p, s])
                })
                .collect();
            print(&json!({
                "D": disc,
                "h": k.class_number(),
                "w": k.unit_count(),
                "splitting": split,
            }));
        }
        Command::Char { action: CharAction::Validate, spec } => {
            let chi = character(&spec)?;
            let neb = chi.nebentypus();
            print(&json!({
                "disc": chi.field().disc(),
                "weight": chi.weight(),
                "conductor": { "content": chi.conductor().content, "a": chi.conductor().a, "b": chi.conductor().b },
                "finite_part": { "modulus": chi.finite_part().modulus(), "index": chi.finite_part().index() },
                "nebentypus": { "modulus": neb.modulus(), "index": neb.index(), "conductor": neb.conductor() },
                "level": chi.level(),
                "value_field_order": chi.value_order(),
                "coefficient_field_order": chi.coefficient_order(),
            }));
        }
        Command::Coeffs { spec, upto, format } => {
            let form = CMForm::new(character(&spec)?);
            let coeffs = form.fourier_coeffs(upto);
            match format {
                Format::Json => {
                    let rows: Vec<Value> = coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, a)| json!({ "n": i + 1, "a_n": cyclo_json(a) }))
                        .collect();
                    print(&json!(rows));
                }
                Format::Csv => {
                    println!("n,re,im,exact");
                    for (i, a) in coeffs.iter().enumerate() {
                        let z = a.to_complex(64);
                        println!("{},{},{},\"{}\"", i + 1, z.real().to_f64(), z.imag().to_f64(), a.lower());
                    }
                }
            }
        }
        Command::Check { kind, spec, sym, pmax } => {
            let chi = character(&spec)?;
            let level = chi.level();
            let mut failures = Vec::new();
            let mut checked = 0;
            for p in arith::primes_below(pmax).into_iter().filter(|p| level % p != 0) {
                let r = match kind {
                    CheckKind::Factorization => factorization_check(&chi, sym, p)?,
                    CheckKind::RankinSelberg => rankin_selberg_check(&chi, sym, p)?,
                };
                checked += 1;
                if !r.passed {
                    failures.push(serde_json::to_value(&r).expect("serializable"));
                }
            }
            let out = json!({ "sym": sym, "pmax": pmax, "checked": checked, "passed": failures.is_empty(), "failures": failures });
            if !failures.is_empty() {
                return Err(Failure::Verification(out));
            }
            print(&out);
        }
        Command::Critical { weight, sym, oracle } => {
            let a = critical_set(weight, sym);
            if oracle {
                let b = critical_set_oracle(weight, sym);
                let out = json!({ "closed_form": a, "oracle": b, "agree": a == b });
                if a != b {
                    return Err(Failure::Verification(out));
                }
                print(&out);
            } else {
                print(&json!({ "closed_form": a }));
            }
        }
        Command::Lvalue { spec, s, prec } => {
            let prec = resolve_precision(prec.prec)?;
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", spec.display())))?;
            let source: LSource =
                serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("L-function spec: {e}")))?;
            let series = match source {
                LSource::Dirichlet { dirichlet: [m, i] } => {
                    LSeriesSpec::dirichlet(&DirichletChar::from_index(m, i.max(0) as u64)?)
                }
                LSource::Dedekind { dedekind } => LSeriesSpec::dedekind(QuadField::new(dedekind)?),
                LSource::Form(cs) => LSeriesSpec::form(CMForm::new(HeckeChar::from_spec(&cs)?)),
            };
            let series = calibrate(&series, prec)?;
            let s = parse_complex(&s, prec)?;
            let v = completed_l(&series, &s, prec)?;
            let cal = series.calibration.clone().expect("calibrated");
            print(&json!({
                "value": complex_json(&v.value),
                "completed": complex_json(&v.completed),
                "residual": cal.residual,
                "tail_n": v.tail_n,
                "calibration": { "Q": cal.conductor, "eps": cal.root_number, "fitted": cal.conductor_fitted },
            }));
        }
        Command::Periods { spec, prec } => {
            let prec = resolve_precision(prec.prec)?;
            let pair = shimura_periods(&CMForm::new(character(&spec)?), prec)?;
            print(&period_pair_json(&pair));
        }
        Command::Verify { kind, spec, sym, m, twist, b, max_degree, max_height, prec } => {
            let prec = resolve_precision(prec.prec)?;
            let chi = character(&spec)?;
            let caps = Caps { max_degree, max_height };
            let need_m = || m.ok_or_else(|| Error::Invalid("--m is required".into()));
            let (out, ok) = match kind {
                VerifyKind::Relation => {
                    let r = verify_period_relation(&chi, sym, prec, &caps)?;
                    let ok = r.plus.is_recognized() && r.minus.is_recognized();
                    (
                        json!({
                            "plus": recognition_json(&r.plus),
                            "minus": recognition_json(&r.minus),
                            "ratio_plus": complex_json(&r.ratio_plus),
                            "ratio_minus": complex_json(&r.ratio_minus),
                        }),
                        ok,
                    )
                }
                VerifyKind::Deligne => {
                    let d = verify_deligne(&chi, sym, need_m()?, prec, &caps)?;
                    let mut v = recognition_json(&d.result);
                    v["ratio"] = complex_json(&d.ratio);
                    (v, d.result.is_recognized())
                }
                VerifyKind::Sturm => {
                    let d = sturm_check(&chi, need_m()?, &parse_twist(&twist)?, prec, &caps)?;
                    let mut v = recognition_json(&d.result);
                    v["ratio"] = complex_json(&d.ratio);
                    (v, d.result.is_recognized())
                }
                VerifyKind::Equivariance => {
                    let e = equivariance_check(&chi, sym, b, prec, &caps)?;
                    let show = |c: &Option<dihedral::cyclo::Cyclo>| c.as_ref().map(cyclo_json);
                    (
                        json!({
                            "b": e.b,
                            "ratio": show(&e.ratio),
                            "conjugate_ratio": show(&e.conjugate_ratio),
                            "passed": e.passed,
                        }),
                        e.passed == Some(true),
                    )
                }
            };
            if !ok {
                return Err(Failure::Verification(out));
            }
            print(&out);
        }
        Command::Dirichlet { modulus, index, action } => {
            let chi = DirichletChar::from_index(modulus, index)?;
            match action {
                DirichletAction::Gauss => print(&json!({
                    "conductor": chi.conductor(),
                    "parity": chi.parity(),
                    "gauss_sum": cyclo_json(&chi.gauss_sum_exact()),
                })),
                DirichletAction::Lvalue { m, prec } => {
                    let prec = resolve_precision(prec.prec)?;
                    let q = chi.l_value_quotient(m)?;
                    let v = chi.dirichlet_l(m, prec)?;
                    print(&json!({
                        "m": m,
                        "quotient": cyclo_json(&q),
                        "value": complex_json(&v),
                    }));
                }
            }
        }
        Command::Suite { config, output } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if output.is_some() {
                cfg.output = output;
            }
            let report = run_suite(&cfg)?;
            let v = serde_json::to_value(&report).expect("serializable");
            if !report.passed {
                eprintln!("failing checks: {:?}", report.failing());
                return Err(Failure::Verification(v));
            }
            print(&v);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(v)) => {
            print(&v);
            ExitCode::from(EXIT_FAILURE as u8)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
