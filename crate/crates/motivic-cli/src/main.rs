//! Command-line front end: exact evaluation of the stringy integrals, the
//! moduli stratum classes and cylinder measures, the representation-theory
//! constructions, the quotient presentation checks and point counts, the
//! change-of-variables sums, and the self-test suite.
//!
//! Output is byte-deterministic for fixed flags; timing diagnostics go to
//! stderr. Exit codes: 0 on success (a divergent integral prints "infinity"
//! and still exits 0), 2 on flag errors, 1 on internal contract violations.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use motivic::covars::{self, Part, TwistedJetStratum};
use motivic::lring::MotivicValue;
use motivic::moduli::{cylinder_measure_g, stratum_class_h, CylinderG, StratumH};
use motivic::quotients::{self, DEFAULT_BUDGET};
use motivic::repnil::{
    check_coaction_axioms, coaction, invariant_basis, jordan_nilpotent, CoactionMatrix, FpMatrix,
    FpPolynomial,
};
use motivic::stringy::{self, DimSeq, Domain, Variant};

#[derive(Parser)]
#[command(
    name = "motivic",
    about = "Exact motivic measures, stringy integrals, and mod-p invariant theory",
    version
)]
struct Cli {
    /// Emit JSON instead of text on every command
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a stringy motivic integral in closed form
    Stringy(StringyArgs),
    /// Moduli-space strata and cylinder measures
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Representation theory: Jordan matrices, coactions, invariants
    #[command(subcommand)]
    Rep(RepCmd),
    /// Quotient presentations, point counts, specialization checks
    #[command(subcommand)]
    Quotient(QuotientCmd),
    /// Change-of-variables sums on the twisted-jet space
    #[command(subcommand)]
    Covars(CovarsCmd),
    /// Run the acceptance suite
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct StringyArgs {
    /// The characteristic (a prime)
    #[arg(long)]
    p: u32,
    /// Dimension sequence, comma-separated and nonincreasing, e.g. "2,2"
    #[arg(long)]
    d: String,
    /// Which shift function weights the integrand
    #[arg(long, value_enum)]
    variant: VariantFlag,
    /// Which moduli space to integrate over
    #[arg(long, value_enum, default_value_t = DomainFlag::H)]
    domain: DomainFlag,
    /// Also print the truncated partial sum over strata up to this order
    #[arg(long)]
    truncate: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantFlag {
    Sht,
    ShtPrime,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainFlag {
    #[value(alias = "G")]
    G,
    #[value(alias = "H")]
    H,
}

#[derive(Subcommand)]
enum ModuliCmd {
    /// Class of an order stratum; j = 0 selects the zero stratum
    Stratum {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        j: u64,
    },
    /// Measure of a cylinder from its truncated class (JSON) and level
    MeasureG {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        level: i64,
        /// Truncated class as MotivicValue JSON
        #[arg(long)]
        class: String,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// The block-diagonal nilpotent Jordan matrix
    Jordan(RepArgs),
    /// The coaction exp(xi*eps)
    Coaction(RepArgs),
    /// Verify the counit and coassociativity axioms
    CheckAxioms(RepArgs),
    /// Degreewise kernel of the derivation
    Invariants {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        maxdeg: u32,
    },
}

#[derive(Args)]
struct RepArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    d: String,
}

#[derive(Subcommand)]
enum QuotientCmd {
    /// Substitute the generators into the relation and check invariance
    Verify {
        #[arg(long)]
        example: String,
        #[arg(long)]
        p: u32,
    },
    /// Count F_q-points of the presented scheme by enumeration
    Count {
        #[arg(long)]
        example: String,
        #[arg(long)]
        q: u64,
    },
    /// Compare a motivic value specialized at L = q with the point count
    Check {
        #[arg(long)]
        example: String,
        #[arg(long)]
        q: u64,
        /// MotivicValue JSON
        #[arg(long)]
        value: String,
    },
}

#[derive(Subcommand)]
enum CovarsCmd {
    /// The full change-of-variables integral (equals L^2)
    Total {
        #[arg(long)]
        p: u32,
    },
    /// One of the two stratum families
    Part {
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum)]
        which: WhichPart,
    },
    /// Exhaustive check of s_f = sht' + 2
    SfCheck {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        jmax: u64,
    },
    /// Measure of one twisted-jet stratum, spec "nonneg:i=K" or
    /// "neg:d=A,e=B,i=K"
    Measure {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        stratum: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichPart {
    Nonneg,
    Neg,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run the sub-second subset
    #[arg(long)]
    quick: bool,
}

/// A user-facing failure: message plus process exit code.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage<E: std::fmt::Display>(err: E) -> Failure {
        Failure {
            message: err.to_string(),
            code: 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn budget_from_env() -> Result<u64, Failure> {
    match std::env::var("MOTIVIC_BUDGET") {
        Err(_) => Ok(DEFAULT_BUDGET),
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map_err(|_| Failure::usage(format!("MOTIVIC_BUDGET must be an integer, got `{raw}`"))),
    }
}

fn parse_dimseq(d: &str, p: u32) -> Result<DimSeq, Failure> {
    DimSeq::parse(d, p).map_err(Failure::usage)
}

fn parse_value(raw: &str) -> Result<MotivicValue, Failure> {
    let value: Value = serde_json::from_str(raw)
        .map_err(|e| Failure::usage(format!("bad JSON: {e}")))?;
    MotivicValue::from_json(&value).map_err(Failure::usage)
}

fn print_value(v: &MotivicValue, as_json: bool) {
    if as_json {
        println!("{}", v.to_json());
    } else {
        println!("{}", v);
    }
}

fn matrix_json(m: &FpMatrix) -> Value {
    let rows: Vec<Value> = (0..m.dim())
        .map(|r| Value::from((0..m.dim()).map(|c| m.get(r, c)).collect::<Vec<u64>>()))
        .collect();
    json!({"p": m.prime(), "n": m.dim(), "rows": rows})
}

fn coaction_json(phi: &CoactionMatrix) -> Value {
    let entries: Vec<Value> = (0..phi.dim())
        .map(|r| {
            Value::from(
                (0..phi.dim())
                    .map(|c| Value::from(phi.entry(r, c)))
                    .collect::<Vec<Value>>(),
            )
        })
        .collect();
    json!({"p": phi.prime(), "n": phi.dim(), "entries": entries})
}

fn polynomial_json(f: &FpPolynomial) -> Value {
    let mut terms: Vec<(Vec<u32>, u64)> = f.terms().map(|(e, c)| (e.clone(), c)).collect();
    terms.sort_by(|a, b| {
        let ka = (a.0.iter().sum::<u32>(), a.0.clone());
        let kb = (b.0.iter().sum::<u32>(), b.0.clone());
        kb.cmp(&ka)
    });
    let terms: Vec<Value> = terms
        .into_iter()
        .map(|(e, c)| json!([e, c]))
        .collect();
    json!({"text": f.to_string(), "terms": terms})
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Stringy(args) => run_stringy(args, cli.json),
        Command::Moduli(cmd) => run_moduli(cmd, cli.json),
        Command::Rep(cmd) => run_rep(cmd, cli.json),
        Command::Quotient(cmd) => run_quotient(cmd, cli.json),
        Command::Covars(cmd) => run_covars(cmd, cli.json),
        Command::Selftest(args) => Ok(run_selftest(args.quick, cli.json)),
    }
}

fn run_stringy(args: &StringyArgs, as_json: bool) -> Result<ExitCode, Failure> {
    let d = parse_dimseq(&args.d, args.p)?;
    let variant = match args.variant {
        VariantFlag::Sht => Variant::Sht,
        VariantFlag::ShtPrime => Variant::ShtPrime,
    };
    let domain = match args.domain {
        DomainFlag::G => Domain::G,
        DomainFlag::H => Domain::H,
    };
    let value = stringy::stringy_integral(&d, variant, domain);
    match args.truncate {
        None => print_value(&value, as_json),
        Some(j_max) => {
            if j_max < 1 {
                return Err(Failure::usage("--truncate must be at least 1"));
            }
            if value.is_infinite() {
                // divergence is a result; there is no finite series window
                print_value(&value, as_json);
            } else {
                let series = stringy::stringy_integral_truncated(&d, variant, j_max)
                    .map_err(Failure::usage)?;
                if as_json {
                    println!(
                        "{}",
                        json!({"closed": value.to_json(), "series": series.to_json()})
                    );
                } else {
                    println!("{}", value);
                    println!("{}", series);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_moduli(cmd: &ModuliCmd, as_json: bool) -> Result<ExitCode, Failure> {
    match cmd {
        ModuliCmd::Stratum { p, j } => {
            let stratum = if *j == 0 {
                StratumH::zero(*p).map_err(Failure::usage)?
            } else {
                StratumH::new(*p, *j).map_err(Failure::usage)?
            };
            print_value(&stratum_class_h(&stratum), as_json);
        }
        ModuliCmd::MeasureG { p, level, class } => {
            let class = parse_value(class)?;
            let cylinder = CylinderG::new(*p, *level, class).map_err(Failure::usage)?;
            print_value(&cylinder_measure_g(&cylinder), as_json);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_rep(cmd: &RepCmd, as_json: bool) -> Result<ExitCode, Failure> {
    match cmd {
        RepCmd::Jordan(args) => {
            let d = parse_dimseq(&args.d, args.p)?;
            let xi = jordan_nilpotent(&d);
            if as_json {
                println!("{}", matrix_json(&xi));
            } else {
                print!("{}", xi);
            }
        }
        RepCmd::Coaction(args) => {
            let d = parse_dimseq(&args.d, args.p)?;
            let phi = coaction(&jordan_nilpotent(&d)).map_err(Failure::usage)?;
            if as_json {
                println!("{}", coaction_json(&phi));
            } else {
                print!("{}", phi);
            }
        }
        RepCmd::CheckAxioms(args) => {
            let d = parse_dimseq(&args.d, args.p)?;
            let report = check_coaction_axioms(&jordan_nilpotent(&d)).map_err(Failure::usage)?;
            if as_json {
                println!(
                    "{}",
                    json!({
                        "pass": report.pass(),
                        "counit_ok": report.counit_ok,
                        "coassociative": report.coassociative,
                        "first_failure": report.first_failure,
                    })
                );
            } else {
                println!("{}", report);
            }
            if !report.pass() {
                return Ok(ExitCode::from(1));
            }
        }
        RepCmd::Invariants { rep, maxdeg } => {
            let d = parse_dimseq(&rep.d, rep.p)?;
            if *maxdeg < 1 {
                return Err(Failure::usage("--maxdeg must be at least 1"));
            }
            let basis = invariant_basis(&jordan_nilpotent(&d), *maxdeg);
            if as_json {
                let items: Vec<Value> = basis.iter().map(polynomial_json).collect();
                println!("{}", json!({"p": rep.p, "maxdeg": maxdeg, "basis": items}));
            } else {
                for f in &basis {
                    println!("{}", f);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_quotient(cmd: &QuotientCmd, as_json: bool) -> Result<ExitCode, Failure> {
    match cmd {
        QuotientCmd::Verify { example, p } => {
            let e = quotients::example_by_id(example, *p).map_err(Failure::usage)?;
            let residual = quotients::verify_presentation(&e);
            let invariance = quotients::check_generators_invariant(&e);
            let names: Vec<&str> = e.ambient_vars().iter().map(String::as_str).collect();
            if as_json {
                let gens: Vec<Value> = invariance
                    .iter()
                    .map(|(g, ok)| json!({"generator": g, "invariant": ok}))
                    .collect();
                println!(
                    "{}",
                    json!({
                        "example": e.id(),
                        "p": e.prime(),
                        "residual": residual.render(&names),
                        "residual_zero": residual.is_zero(),
                        "generators": gens,
                    })
                );
            } else {
                println!(
                    "residual: {}{}",
                    residual.render(&names),
                    if residual.is_zero() { " (ok)" } else { " (NONZERO)" }
                );
                for (g, ok) in &invariance {
                    println!("generator {}: {}", g, if *ok { "invariant" } else { "NOT invariant" });
                }
            }
            if !residual.is_zero() || invariance.iter().any(|(_, ok)| !ok) {
                return Ok(ExitCode::from(1));
            }
        }
        QuotientCmd::Count { example, q } => {
            let (p, _) = motivic::prime_power(*q)
                .ok_or_else(|| Failure::usage(format!("q = {q} is not a prime power")))?;
            let e = quotients::example_by_id(example, p as u32).map_err(Failure::usage)?;
            let count =
                quotients::count_points(&e, *q, budget_from_env()?).map_err(Failure::usage)?;
            if as_json {
                println!("{}", json!({"example": e.id(), "q": q, "count": count}));
            } else {
                println!("{}", count);
            }
        }
        QuotientCmd::Check { example, q, value } => {
            let (p, _) = motivic::prime_power(*q)
                .ok_or_else(|| Failure::usage(format!("q = {q} is not a prime power")))?;
            let e = quotients::example_by_id(example, p as u32).map_err(Failure::usage)?;
            let v = parse_value(value)?;
            let report = quotients::specialization_check(&v, &e, *q, budget_from_env()?)
                .map_err(Failure::usage)?;
            if as_json {
                println!(
                    "{}",
                    json!({
                        "example": e.id(),
                        "q": q,
                        "specialized": report.specialized.to_string(),
                        "count": report.counted,
                        "equal": report.equal,
                    })
                );
            } else {
                println!("{}", report);
            }
            if !report.equal {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_covars(cmd: &CovarsCmd, as_json: bool) -> Result<ExitCode, Failure> {
    match cmd {
        CovarsCmd::Total { p } => {
            let v = covars::cov_integral(*p, Part::All).map_err(Failure::usage)?;
            print_value(&v, as_json);
        }
        CovarsCmd::Part { p, which } => {
            let part = match which {
                WhichPart::Nonneg => Part::Nonneg,
                WhichPart::Neg => Part::Neg,
            };
            let v = covars::cov_integral(*p, part).map_err(Failure::usage)?;
            print_value(&v, as_json);
        }
        CovarsCmd::SfCheck { p, jmax } => {
            if *jmax < 1 {
                return Err(Failure::usage("--jmax must be at least 1"));
            }
            let report = covars::s_equals_shtprime_plus_two(*p, *jmax).map_err(Failure::usage)?;
            if as_json {
                println!(
                    "{}",
                    json!({
                        "p": report.prime,
                        "checked": report.checked,
                        "pass": report.pass,
                        "first_violation": report.first_violation.map(|(j, s, sp)| json!([j, s, sp])),
                    })
                );
            } else {
                println!("{}", report);
            }
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
        CovarsCmd::Measure { p, stratum } => {
            let s = TwistedJetStratum::parse(stratum, *p).map_err(Failure::usage)?;
            print_value(&covars::cyl_measure(&s), as_json);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_selftest(quick: bool, as_json: bool) -> ExitCode {
    let results = motivic::acceptance::run_all(quick);
    let mut all_ok = true;
    if as_json {
        let items: Vec<Value> = results
            .iter()
            .map(|r| {
                json!({
                    "id": r.id,
                    "name": r.name,
                    "passed": r.passed,
                    "within_limit": r.within_limit(),
                    "detail": r.detail,
                })
            })
            .collect();
        println!("{}", json!({"quick": quick, "criteria": items}));
        all_ok = results.iter().all(|r| r.ok());
    } else {
        for r in &results {
            // stdout stays byte-deterministic; timing goes to stderr
            println!(
                "criterion {:>2} [{}] {} - {}",
                r.id,
                r.name,
                if r.ok() { "PASS" } else { "FAIL" },
                r.detail
            );
            eprintln!(
                "criterion {:>2} elapsed {:.3}s{}",
                r.id,
                r.elapsed.as_secs_f64(),
                r.limit
                    .map(|l| format!(" (limit {:.0}s)", l.as_secs_f64()))
                    .unwrap_or_default()
            );
            all_ok &= r.ok();
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
