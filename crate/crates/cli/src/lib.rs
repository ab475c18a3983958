//! Batch verification suites and JSON rendering shared by the `dihedral` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use dihedral::cmform::CMForm;
use dihedral::cyclo::{Cyclo, CycloRecord};
use dihedral::dirichlet::DirichletChar;
use dihedral::hecke::{CharSpec, HeckeChar};
use dihedral::lvalue::critical_l_value;
use dihedral::periods::{shimura_periods, verify_deligne, verify_period_relation, Caps};
use dihedral::recognize::RecognitionResult;
use dihedral::symdecomp::{
    critical_set, critical_set_oracle, isobaric_decomposition, poly_eq, poly_to_strings, product_of_components,
    rankin_selberg_check, sym_poly,
};
use dihedral::{arith, Error};
use rug::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const DEFAULT_PRECISION: u32 = 256;
pub const PRECISION_ENV: &str = "CM_PERIOD_PRECISION";

/// Exit status for a run where some verification failed.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;

/// `[re, im]` as decimal strings with about `prec * log10(2)` digits.
pub fn complex_json(z: &Complex) -> Value {
    let digits = ((z.prec().0 as f64) * std::f64::consts::LOG10_2) as usize;
    json!([format!("{:.*e}", digits, z.real()), format!("{:.*e}", digits, z.imag())])
}

/// An exact value as a cyclotomic record plus a decimal rendering.
pub fn cyclo_json(c: &Cyclo) -> Value {
    let rec: CycloRecord = c.lower().to_record();
    json!({ "order": rec.order, "coefficients": rec.coefficients, "decimal": complex_json(&c.to_complex(64)) })
}

pub fn recognition_json(r: &RecognitionResult) -> Value {
    serde_json::to_value(r).expect("serializable")
}

pub fn load_spec(path: &Path) -> Result<CharSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    CharSpec::from_json(&text)
}

/// Precision from `--prec`, then the environment, then the default.
pub fn resolve_precision(flag: Option<u32>) -> Result<u32, Error> {
    let p = match flag {
        Some(p) => p,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("{PRECISION_ENV}={v} is not an integer")))?,
            Err(_) => DEFAULT_PRECISION,
        },
    };
    if p < 128 {
        return Err(Error::Invalid(format!("precision {p} is below the minimum of 128 bits")));
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Factorization,
    RankinSelberg,
    CriticalSets,
    Lvalues,
    Periods,
    Relations,
    Deligne,
}

/// Replaces `a_p` by `a_p + delta` on the symmetric-power side of the factorization check.
/// Only meant for exercising the failure path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub p: i64,
    pub delta: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Path to a character spec; relative paths resolve against the config file.
    pub spec: PathBuf,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_prime_bound")]
    pub prime_bound: i64,
    /// Inclusive range of symmetric powers.
    #[serde(default = "default_sym_range")]
    pub sym_range: [u32; 2],
    #[serde(default)]
    pub max_degree: Option<usize>,
    #[serde(default = "default_height")]
    pub max_height: i64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<Perturbation>,
}

fn default_precision() -> u32 {
    std::env::var(PRECISION_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_PRECISION)
}

fn default_prime_bound() -> i64 {
    100
}

fn default_sym_range() -> [u32; 2] {
    [1, 4]
}

fn default_height() -> i64 {
    dihedral::recognize::DEFAULT_MAX_HEIGHT
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        if cfg.spec.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.spec = dir.join(&cfg.spec);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.precision < 128 {
            return Err(Error::Invalid(format!("precision: {} is below 128", self.precision)));
        }
        if self.prime_bound < 2 {
            return Err(Error::Invalid(format!("prime_bound: {} must be at least 2", self.prime_bound)));
        }
        let [lo, hi] = self.sym_range;
        if lo < 1 || hi < lo {
            return Err(Error::Invalid(format!("sym_range: [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
        }
        if self.max_height < 1 || self.max_degree == Some(0) {
            return Err(Error::Invalid("max_height and max_degree must be positive".into()));
        }
        Ok(())
    }

    fn caps(&self) -> Caps {
        Caps { max_degree: self.max_degree, max_height: self.max_height }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub results: Vec<CheckResult>,
    /// Wall-clock milliseconds per check, in the order of `results`.
    pub timing_ms: Vec<u128>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            EXIT_FAILURE
        }
    }

    pub fn failing(&self) -> Vec<Check> {
        self.results.iter().filter(|r| !r.passed).map(|r| r.check).collect()
    }
}

/// Runs the configured checks in order. Errors are configuration problems; verification
/// failures are reported inside the report.
pub fn run_suite(config: &RunConfig) -> Result<Report, Error> {
    config.validate()?;
    let spec = load_spec(&config.spec)?;
    let chi = HeckeChar::from_spec(&spec)?;
    let mut results = Vec::new();
    let mut timing = Vec::new();
    for &check in &config.checks {
        let t = Instant::now();
        let (passed, details) = match run_check(check, &chi, config) {
            Ok(v) => v,
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        timing.push(t.elapsed().as_millis());
        results.push(CheckResult { check, passed, details });
    }
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        passed: results.iter().all(|r| r.passed),
        results,
        timing_ms: timing,
    };
    if let Some(out) = &config.output {
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        std::fs::write(out, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(report)
}

fn good_primes(chi: &HeckeChar, bound: i64) -> Vec<i64> {
    let level = chi.level();
    arith::primes_below(bound).into_iter().filter(|p| level % p != 0).collect()
}

fn run_check(check: Check, chi: &HeckeChar, cfg: &RunConfig) -> Result<(bool, Value), Error> {
    let [lo, hi] = cfg.sym_range;
    let prec = cfg.precision;
    match check {
        Check::Factorization => {
            let form = CMForm::new(chi.clone());
            let mut failures = Vec::new();
            let mut count = 0;
            for n in lo..=hi {
                let comps = isobaric_decomposition(chi, n)?;
                for p in good_primes(chi, cfg.prime_bound) {
                    let ef = form.euler_factor(p)?;
                    let mut a_p = ef.a_p.clone();
                    if let Some(pt) = cfg.perturb.as_ref().filter(|pt| pt.p == p) {
                        a_p = &a_p + &Cyclo::from_rational(1, pt.delta);
                    }
                    let lhs = sym_poly(&a_p, &ef.c2, n as usize);
                    let rhs = product_of_components(&comps, p)?;
                    count += 1;
                    if !poly_eq(&lhs, &rhs) {
                        failures.push(json!({
                            "n": n, "p": p,
                            "lhs": poly_to_strings(&lhs), "rhs": poly_to_strings(&rhs),
                        }));
                    }
                }
            }
            Ok((failures.is_empty(), json!({ "checked": count, "failures": failures })))
        }
        Check::RankinSelberg => {
            let mut failures = Vec::new();
            let mut count = 0;
            for n in lo..=hi {
                for p in good_primes(chi, cfg.prime_bound) {
                    let r = rankin_selberg_check(chi, n, p)?;
                    count += 1;
                    if !r.passed {
                        failures.push(serde_json::to_value(&r).expect("serializable"));
                    }
                }
            }
            Ok((failures.is_empty(), json!({ "checked": count, "failures": failures })))
        }
        Check::CriticalSets => {
            let k = chi.weight();
            let rows: Vec<Value> = (lo..=hi)
                .map(|n| {
                    let a = critical_set(k, n);
                    let b = critical_set_oracle(k, n);
                    json!({ "n": n, "closed_form": a, "oracle": b, "agree": a == b })
                })
                .collect();
            let ok = rows.iter().all(|r| r["agree"] == json!(true));
            Ok((ok, json!(rows)))
        }
        Check::Lvalues => {
            let k = chi.weight();
            let mut rows = Vec::new();
            for n in lo..=hi {
                for m in critical_set(k, n) {
                    let v = critical_l_value(chi, n, m, &DirichletChar::trivial(1), prec)?;
                    rows.push(json!({ "n": n, "m": m, "value": complex_json(&v.value) }));
                }
            }
            Ok((true, json!(rows)))
        }
        Check::Periods => {
            let pair = shimura_periods(&CMForm::new(chi.clone()), prec)?;
            Ok((true, period_pair_json(&pair)))
        }
        Check::Relations => {
            let mut rows = Vec::new();
            let mut ok = true;
            for n in lo..=hi {
                let r = verify_period_relation(chi, n, prec, &cfg.caps())?;
                ok &= r.plus.is_recognized() && r.minus.is_recognized();
                rows.push(json!({
                    "n": n,
                    "ratio_plus": complex_json(&r.ratio_plus),
                    "ratio_minus": complex_json(&r.ratio_minus),
                    "plus": recognition_json(&r.plus),
                    "minus": recognition_json(&r.minus),
                }));
            }
            Ok((ok, json!(rows)))
        }
        Check::Deligne => {
            let mut rows = Vec::new();
            let mut ok = true;
            for n in lo..=hi {
                for m in critical_set(chi.weight(), n) {
                    let d = verify_deligne(chi, n, m, prec, &cfg.caps())?;
                    ok &= d.result.is_recognized();
                    rows.push(json!({
                        "n": n, "m": m,
                        "ratio": complex_json(&d.ratio),
                        "result": recognition_json(&d.result),
                    }));
                }
            }
            Ok((ok, json!(rows)))
        }
    }
}

pub fn period_pair_json(pair: &dihedral::periods::PeriodPair) -> Value {
    json!({
        "u_plus": complex_json(&pair.u_plus),
        "u_minus": complex_json(&pair.u_minus),
        "defining_twists": { "plus": pair.xi_plus, "minus": pair.xi_minus },
        "defining_point": pair.point,
        "nonvanishing_certificates": pair.certificates,
        "search_log": pair.search_log.iter().map(|(d, why)| json!([d, why])).collect::<Vec<_>>(),
    })
}
