//! Batch front end: one command per process, results as JSON and plot data as
//! tab-separated tables.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::convex::ConvexError;
use crate::divisor::{
    discrete_lipschitz, filtration_summary, mu_monotone_continuity_profile, mu_r, mu_r_by_region,
    proposition_2_1_suite, vol_hat, vol_hat_base, BaseCondition, Center, DivisorError,
    DivisorRecord, Potential, PropositionInput, ToricArithDivisor,
};
use crate::okounkov::{
    okounkov_body, semigroup_points, MonomialSeries, OkounkovError, ValuationFlag,
};
use crate::oracle;
use crate::zariski::{
    check_multiplicity_identity, greatest_nef_minorant, verify_zariski, SolverConfig, ZariskiError,
    VOLUME_TOL,
};

pub use output::{round_sig, sig12, Tsv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Vol,
    VolBase,
    Body,
    Mu,
    MuProfile,
    ERange,
    Zariski,
    OracleCheck,
    PropSuite,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Vol => "vol",
            Command::VolBase => "vol-base",
            Command::Body => "body",
            Command::Mu => "mu",
            Command::MuProfile => "mu-profile",
            Command::ERange => "e-range",
            Command::Zariski => "zariski",
            Command::OracleCheck => "oracle-check",
            Command::PropSuite => "prop-suite",
        }
    }
}

/// Arithmetic volumes, multiplicities and Zariski decompositions of toric
/// arithmetic divisors on projective space.
#[derive(Debug, Clone, Parser)]
#[command(name = "toric-arith", version)]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Divisor record (JSON).
    #[arg(long)]
    pub divisor: PathBuf,
    /// Base condition `kind:index-or-prime:value`, optionally prefixed by a
    /// label; kind is `hyperplane`, `torus` or `vertical`. Repeatable.
    #[arg(long = "mu")]
    pub mu: Vec<String>,
    /// Resolution: samples per axis for plot data, points of the twist grid,
    /// or the level `n` for oracle and filtration commands.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Tolerance override for the command's pass/fail check.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub lambda_max: f64,
}

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("tolerance check failed: {0}")]
    Tolerance(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Tolerance(_) => 4,
        }
    }
}

impl From<DivisorError> for CliError {
    fn from(e: DivisorError) -> Self {
        match e {
            DivisorError::BignessRequired { .. } => CliError::Infeasible(e.to_string()),
            DivisorError::Convex(ConvexError::Infeasible { .. }) => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ZariskiError> for CliError {
    fn from(e: ZariskiError) -> Self {
        match e {
            ZariskiError::Divisor(d) => d.into(),
            ZariskiError::Infeasible(_) | ZariskiError::NotNef(_) => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<OkounkovError> for CliError {
    fn from(e: OkounkovError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ConvexError> for CliError {
    fn from(e: ConvexError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Parses `[label:]kind:index-or-prime:value`.
pub fn parse_condition(spec: &str) -> Result<BaseCondition> {
    let parts: Vec<&str> = spec.split(':').collect();
    let tail = match parts.len() {
        3 => &parts[..],
        4 => &parts[1..],
        _ => {
            return Err(CliError::Validation(format!(
                "base condition `{spec}` is not kind:index:value"
            )))
        }
    };
    let bad = || CliError::Validation(format!("cannot parse base condition `{spec}`"));
    let index: u64 = tail[1].parse().map_err(|_| bad())?;
    let value: f64 = tail[2].parse().map_err(|_| bad())?;
    let center = match tail[0] {
        "hyperplane" | "h" => Center::Hyperplane(index as usize),
        "torus" | "torus-fixed" | "t" => Center::TorusFixedPoint(index as usize),
        "vertical" | "fiber" | "v" => Center::VerticalFiber(index),
        other => {
            return Err(CliError::Validation(format!(
                "unknown center kind `{other}`"
            )))
        }
    };
    Ok(BaseCondition::new(center, value)?)
}

pub fn load_divisor(path: &Path) -> Result<ToricArithDivisor> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!(
            "cannot read divisor record {}: {e}",
            path.display()
        ))
    })?;
    let record: DivisorRecord = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("malformed divisor record: {e}")))?;
    Ok(ToricArithDivisor::from_record(&record)?)
}

/// Runs one command, writing `results.json` (and plot data) under `args.out`.
pub fn run(args: &Args) -> Result<Value> {
    let divisor = load_divisor(&args.divisor)?;
    let conditions = args
        .mu
        .iter()
        .map(|s| parse_condition(s))
        .collect::<Result<Vec<_>>>()?;
    for c in &conditions {
        c.center.validate(divisor.d())?;
    }
    fs::create_dir_all(&args.out)?;
    let mut tables = Vec::new();
    let (result, tolerance) = match args.command {
        Command::Vol => {
            let r = vol_hat(&divisor)?;
            tables.push(g_table(&divisor, args.grid.unwrap_or(200))?);
            (
                json!({"value": r.value, "closed_form": r.closed_form, "quadrature": r.quadrature, "method": r.method}),
                1e-6,
            )
        }
        Command::VolBase => {
            let r = vol_hat_base(&divisor, &conditions)?;
            let full = vol_hat(&divisor)?;
            (
                json!({"value": r.value, "closed_form": r.closed_form, "quadrature": r.quadrature, "method": r.method,
                       "unconditioned": full.value, "drop": full.value - r.value}),
                1e-6,
            )
        }
        Command::Body => body_command(&divisor, args, &mut tables)?,
        Command::Mu => {
            let center = single_center(&conditions)?;
            let a = mu_r(&divisor, center)?;
            let b = mu_r_by_region(&divisor, center)?;
            let tol = args.tol.unwrap_or(1e-6);
            if (a - b).abs() > tol {
                return Err(CliError::Tolerance(format!(
                    "reduction {a} and region sweep {b} differ"
                )));
            }
            (
                json!({"value": a, "region_sweep": b, "center": center, "method": "closed-form"}),
                tol,
            )
        }
        Command::MuProfile => {
            let center = single_center(&conditions)?;
            let k = args.grid.unwrap_or(50).max(2);
            let lambdas: Vec<f64> = (0..k)
                .map(|i| {
                    args.lambda_min
                        + (args.lambda_max - args.lambda_min) * i as f64 / (k - 1) as f64
                })
                .collect();
            let profile = mu_monotone_continuity_profile(&divisor, center, &lambdas)?;
            let mut t = Tsv::new("mu_profile.tsv", &["lambda", "mu"]);
            for (l, m) in &profile {
                t.row(&[*l, *m]);
            }
            tables.push(t);
            let monotone = profile.windows(2).all(|w| w[1].1 <= w[0].1);
            (
                json!({"center": center, "points": k, "monotone": monotone, "lipschitz": discrete_lipschitz(&profile),
                       "method": "closed-form"}),
                0.0,
            )
        }
        Command::ERange => {
            let n = args.grid.unwrap_or(10) as u64;
            let s = filtration_summary(&divisor, n)?;
            let mut cols: Vec<String> = (1..=divisor.d()).map(|i| format!("m{i}")).collect();
            cols.push("t".into());
            let mut t = Tsv::new(
                "filtration.tsv",
                &cols.iter().map(String::as_str).collect::<Vec<_>>(),
            );
            for (m, v) in &s.t_values {
                let mut row: Vec<f64> = m.iter().map(|&x| x as f64).collect();
                row.push(*v);
                t.row(&row);
            }
            tables.push(t);
            (
                json!({"level": n, "e_min": s.e_min, "e_max": s.e_max, "growth_constant": s.growth_constant,
                       "e_max_over_n": s.e_max / n as f64, "method": "closed-form"}),
                0.0,
            )
        }
        Command::Zariski => zariski_command(&divisor, args)?,
        Command::OracleCheck => {
            let n = args.grid.unwrap_or(100) as u64;
            let tol = args.tol.unwrap_or(0.05);
            let exact = vol_hat_base(&divisor, &conditions)?.value;
            let estimate = oracle::volume_estimate(&divisor, n, &conditions)?;
            let report = json!({"level": n, "oracle": estimate, "closed_form": exact,
                                "difference": (estimate - exact).abs(), "method": "oracle"});
            if (estimate - exact).abs() > tol {
                write_results(args, &divisor, &report, tol, &tables)?;
                return Err(CliError::Tolerance(format!(
                    "oracle {estimate} vs closed form {exact} at n = {n}"
                )));
            }
            (report, tol)
        }
        Command::PropSuite => prop_suite_command(&divisor, &conditions, args)?,
    };
    write_results(args, &divisor, &result, tolerance, &tables)
}

fn single_center(conditions: &[BaseCondition]) -> Result<Center> {
    match conditions {
        [c] => Ok(c.center),
        [] => Ok(Center::Hyperplane(1)),
        _ => Err(CliError::Validation(
            "this command takes at most one --mu center".into(),
        )),
    }
}

fn write_results(
    args: &Args,
    divisor: &ToricArithDivisor,
    result: &Value,
    tol: f64,
    tables: &[Tsv],
) -> Result<Value> {
    let record = serde_json::to_value(divisor.record()).expect("records serialize");
    let doc = json!({
        "command": args.command.name(),
        "divisor": record,
        "grid": args.grid,
        "tolerance": tol,
        "seed": args.seed,
        "result": round_sig(result),
    });
    fs::write(
        args.out.join("results.json"),
        serde_json::to_string_pretty(&doc).expect("json") + "\n",
    )?;
    for t in tables {
        t.write(&args.out)?;
    }
    Ok(doc)
}

/// `(x, G(x))` samples on the body.
fn g_table(divisor: &ToricArithDivisor, res: usize) -> Result<Tsv> {
    let g = divisor.transform()?;
    let mut cols: Vec<String> = (1..=divisor.d()).map(|i| format!("x{i}")).collect();
    cols.push("G".into());
    let mut t = Tsv::new(
        "g.tsv",
        &cols.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for (x, v) in g.sample(res) {
        let mut row = x;
        row.push(v);
        t.row(&row);
    }
    Ok(t)
}

fn body_command(
    divisor: &ToricArithDivisor,
    args: &Args,
    tables: &mut Vec<Tsv>,
) -> Result<(Value, f64)> {
    let d = divisor.d();
    let axes: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let axes: Vec<&str> = axes.iter().map(String::as_str).collect();
    let mut body = Tsv::new("body.tsv", &axes);
    for v in divisor.body_vertices() {
        body.row(&v);
    }
    tables.push(body);
    tables.push(g_table(divisor, args.grid.unwrap_or(200))?);
    let theta = crate::divisor::theta_region(divisor)?;
    let interval = theta.interval();
    let mut out = json!({
        "vertices": divisor.body_vertices(),
        "max_g": theta.max_g(),
        "argmax": theta.argmax(),
        "theta_empty": theta.is_empty(),
        "theta_interval": interval,
        "method": "closed-form",
    });
    // Okounkov body of the full series when the coefficients are integers
    let ints: Option<Vec<i64>> = divisor
        .coeffs()
        .iter()
        .map(|&c| (c.fract() == 0.0).then_some(c as i64))
        .collect();
    if let Some(coeffs) = ints {
        let m_max = 6;
        let series = (1..=m_max)
            .map(|m| MonomialSeries::full(m, coeffs.clone()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let pts = semigroup_points(&series, &ValuationFlag::origin(d))?;
        if let Ok(p) = okounkov_body(&pts, m_max) {
            let mut t = Tsv::new("okounkov.tsv", &axes);
            for v in p.vertices() {
                t.row(v);
            }
            tables.push(t);
            out["okounkov_vertices"] = json!(p.vertices());
            out["okounkov_levels"] = json!(m_max);
        }
    }
    Ok((out, 0.0))
}

fn zariski_command(divisor: &ToricArithDivisor, args: &Args) -> Result<(Value, f64)> {
    let mut config = SolverConfig::default();
    if let Some(g) = args.grid {
        config.points = g.max(3);
    }
    let tol = args.tol.unwrap_or(VOLUME_TOL);
    let dec = greatest_nef_minorant(divisor, &config)?;
    let report = verify_zariski(divisor, &dec, tol)?;
    let mu = check_multiplicity_identity(divisor, &dec, tol)?;
    let decomposition = json!({
        "positive": dec.positive,
        "negative": dec.negative,
        "vol_input": report.vol_input,
        "vol_positive": report.vol_positive,
        "nef_certificate": report.positive_nef,
        "negative_effective": report.negative_effective,
        "mu_checks": mu.checks,
        "provenance": dec.provenance,
    });
    fs::write(
        args.out.join("decomposition.json"),
        serde_json::to_string_pretty(&decomposition).expect("json") + "\n",
    )?;
    let mut t = Tsv::new("zariski.tsv", &["s", "g_input", "h_positive", "h_negative"]);
    let grid = dec.positive.grid();
    let input = crate::zariski::RotInvariantDivisor::from_divisor(divisor, grid)?;
    let stride = (grid.len() / 400).max(1);
    for (i, s) in grid.points().iter().enumerate().step_by(stride) {
        t.row(&[
            *s,
            input.values[i],
            dec.positive.values[i],
            dec.negative.values[i],
        ]);
    }
    t.write(&args.out)?;
    let result = json!({
        "delta": [dec.negative.e0, dec.negative.e1],
        "vol_input": report.vol_input,
        "vol_positive": report.vol_positive,
        "verify_pass": report.pass,
        "multiplicity_pass": mu.pass,
        "vertical_free": dec.provenance.vertical_free,
        "method": "closed-form+quadrature",
    });
    if !(report.pass && mu.pass) {
        write_results(args, divisor, &result, tol, &[])?;
        return Err(CliError::Tolerance(
            "decomposition failed verification".into(),
        ));
    }
    Ok((result, tol))
}

fn prop_suite_command(
    divisor: &ToricArithDivisor,
    conditions: &[BaseCondition],
    args: &Args,
) -> Result<(Value, f64)> {
    let Potential::Canonical { a } = divisor.potential() else {
        return Err(CliError::Validation(
            "prop-suite needs a canonical-family divisor".into(),
        ));
    };
    let center = single_center(conditions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let trials = args.grid.unwrap_or(20);
    let mut reports = Vec::new();
    for _ in 0..trials {
        let e = random_partner(a, &mut rng)?;
        let phi: Vec<i64> = (0..divisor.d()).map(|_| rng.gen_range(-2..=2)).collect();
        let scalar = rng.gen_range(0.5..3.0);
        let input = PropositionInput {
            d: divisor,
            e: &e,
            phi,
            scalar,
            center,
            oracle_levels: vec![8, 16],
        };
        reports.push(proposition_2_1_suite(&input)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let result =
        json!({"trials": trials, "pass": pass, "reports": reports, "method": "closed-form+oracle"});
    if !pass {
        write_results(args, divisor, &result, 1e-9, &[])?;
        return Err(CliError::Tolerance("a multiplicity law failed".into()));
    }
    Ok((result, 1e-9))
}

/// A random big divisor in the family of `a`.
fn random_partner(a: &[f64], rng: &mut ChaCha8Rng) -> Result<ToricArithDivisor> {
    loop {
        let mut coeffs: Vec<f64> = (0..a.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        coeffs[0] += 0.5;
        let twist = rng.gen_range(0.0..1.0);
        let e = ToricArithDivisor::new(
            a.len() - 1,
            coeffs,
            Potential::Canonical { a: a.to_vec() },
            twist,
        )?;
        if e.is_big()? {
            return Ok(e);
        }
    }
}

/// Parses arguments, runs, and maps failures to exit codes 2, 3 and 4.
pub fn main_with(args: Args) -> ExitCode {
    match run(&args) {
        Ok(doc) => {
            println!("{}", serde_json::to_string(&doc["result"]).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_syntax() {
        let c = parse_condition("hyperplane:1:0.5").unwrap();
        assert_eq!(c.center, Center::Hyperplane(1));
        let c = parse_condition("xi:vertical:3:0.25").unwrap();
        assert_eq!((c.center, c.mu), (Center::VerticalFiber(3), 0.25));
        assert!(matches!(
            parse_condition("vertical:4:0.1"),
            Err(CliError::Validation(_))
        ));
        assert!(parse_condition("plane:1").is_err());
    }

    #[test]
    fn exit_codes() {
        let big: CliError = DivisorError::BignessRequired { max_g: -1.0 }.into();
        assert_eq!(big.exit_code(), 3);
        assert_eq!(CliError::Tolerance("x".into()).exit_code(), 4);
        assert_eq!(CliError::from(DivisorError::NotPrime(4)).exit_code(), 2);
    }
}
