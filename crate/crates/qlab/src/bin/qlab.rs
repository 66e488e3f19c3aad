//! Command-line interface: series expansion, bipartition counting,
//! congruence verification, density experiments, eta-quotient analysis,
//! Hecke checks, and coefficient-recurrence checks.
//!
//! Exit codes: 0 = success / all checks passed; 1 = at least one
//! non-informational FAIL; 2 = usage error.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qlab::bipartitions::{bipartition_series, BipartitionParams};
use qlab::congruences::{
    builtin_families, density_experiment, family_by_id, verify_all, verify_family,
};
use qlab::eta::{EtaQuotient, HolomorphyVerdict};
use qlab::hecke::{eigen_check, BuiltinForm};
use qlab::newman::{newman1_verify, newman2_verify, NewmanIIParams, NewmanSeriesId};
use qlab::report::{Status, VerificationReport};
use qlab::series::{QSeries, Ring};

#[derive(Parser)]
#[command(name = "qlab", version, about = "q-series congruence laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an Euler product (q^delta; q^delta)_inf as a truncated series.
    Series(SeriesArgs),
    /// Tabulate (u,v)-regular bipartition counts.
    Bipartition(BipartitionArgs),
    /// Verify congruence families.
    Verify(VerifyArgs),
    /// Non-vanishing density experiment for B_{p,m} mod p.
    Density(DensityArgs),
    /// Analyze an eta-quotient: weight, level conditions, character, cusps.
    EtaAnalyze(EtaArgs),
    /// Check a builtin eta product is a Hecke eigenform at a prime.
    Hecke(HeckeArgs),
    /// Check a coefficient recurrence exactly over the integers.
    Newman(NewmanArgs),
}

#[derive(Args)]
struct SeriesArgs {
    /// The delta in (q^delta; q^delta)_inf.
    #[arg(long, default_value_t = 1)]
    delta: u64,
    #[arg(long, default_value_t = 20)]
    trunc: usize,
    /// 0 = exact integers; m >= 2 = coefficients mod m.
    #[arg(long = "mod", default_value_t = 0)]
    modulus: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BipartitionArgs {
    #[arg(long)]
    u: u64,
    #[arg(long)]
    v: u64,
    #[arg(long, default_value_t = 50)]
    trunc: usize,
    /// 0 = exact integers; m >= 2 = coefficients mod m.
    #[arg(long = "mod", default_value_t = 0)]
    modulus: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Family id, or "all".
    #[arg(long, default_value = "all")]
    family: String,
    /// Override every instance's default n bound.
    #[arg(long)]
    nmax: Option<u64>,
    /// Scale default bounds by 10 (ignored when --nmax is given).
    #[arg(long)]
    deep: bool,
    #[arg(long)]
    json: bool,
    /// List available family ids and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    m: u64,
    /// Comma-separated X checkpoints.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    checkpoints: Vec<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EtaArgs {
    /// Comma-separated delta:exponent pairs, e.g. "3:1,21:1".
    #[arg(long)]
    factors: String,
    #[arg(long)]
    level: u64,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormArg {
    Eta3x21,
    Eta4x20,
    Eta8x16,
}

impl FormArg {
    fn form(self) -> BuiltinForm {
        match self {
            FormArg::Eta3x21 => BuiltinForm::Eta3x21,
            FormArg::Eta4x20 => BuiltinForm::Eta4x20,
            FormArg::Eta8x16 => BuiltinForm::Eta8x16,
        }
    }
}

#[derive(Args)]
struct HeckeArgs {
    #[arg(long, value_enum)]
    form: FormArg,
    #[arg(long)]
    p: u64,
    /// Truncation of the expansion the check runs against.
    #[arg(long, default_value_t = 2000)]
    bound: usize,
}

#[derive(ValueEnum, Clone, Copy)]
enum SeriesIdArg {
    F1F7,
    F1F5,
    F1F2,
    F1p5F2,
    F1p9F2,
    F1p11F2,
}

impl SeriesIdArg {
    fn id(self) -> NewmanSeriesId {
        match self {
            SeriesIdArg::F1F7 => NewmanSeriesId::F1F7,
            SeriesIdArg::F1F5 => NewmanSeriesId::F1F5,
            SeriesIdArg::F1F2 => NewmanSeriesId::F1F2,
            SeriesIdArg::F1p5F2 => NewmanSeriesId::F1p5F2,
            SeriesIdArg::F1p9F2 => NewmanSeriesId::F1p9F2,
            SeriesIdArg::F1p11F2 => NewmanSeriesId::F1p11F2,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum IdentityKind {
    /// Single-prime recurrence on a builtin product.
    I,
    /// Prime-square recurrence on f_1^r f_q^s.
    Ii,
}

#[derive(Args)]
struct NewmanArgs {
    #[arg(long, value_enum)]
    identity: IdentityKind,
    /// Builtin product (identity I only).
    #[arg(long, value_enum)]
    series: Option<SeriesIdArg>,
    /// q of f_1^r f_q^s (identity II only).
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 200)]
    nmax: u64,
}

fn ring_of(modulus: u64) -> Ring {
    if modulus == 0 {
        Ring::Integers
    } else {
        // Out-of-range moduli are rejected by the series constructors.
        Ring::ModM(modulus)
    }
}

fn print_series(series: &QSeries, json: bool) -> qlab::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if json {
        let mut value = series.to_json();
        value["schema"] = json!(1);
        writeln!(out, "{value}")?;
    } else {
        series.write_csv(&mut out)?;
    }
    Ok(())
}

fn print_reports(reports: &[VerificationReport], json: bool) -> qlab::Result<bool> {
    let failed = reports.iter().any(|r| r.is_blocking_failure());
    if json {
        println!(
            "{}",
            json!({
                "schema": 1,
                "failed": failed,
                "reports": reports,
            })
        );
    } else {
        for r in reports {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let extra = match r.status {
                Status::Skip => format!(" [{}]", r.skip_reason.as_deref().unwrap_or("")),
                Status::Fail => format!(
                    " witnesses: {}",
                    r.witnesses
                        .iter()
                        .map(|w| format!("n={} {}!={}", w.n, w.lhs, w.rhs))
                        .collect::<Vec<_>>()
                        .join("; ")
                ),
                Status::Pass => String::new(),
            };
            println!(
                "{status} {} [{}] checked={} n<={}{}{}",
                r.id,
                r.params,
                r.checked,
                r.n_max,
                if r.informational { " (informational)" } else { "" },
                extra
            );
            for note in &r.notes {
                println!("    note: {note}");
            }
        }
    }
    Ok(failed)
}

fn run() -> qlab::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Series(args) => {
            let ring = ring_of(args.modulus);
            let series = QSeries::euler_product(args.delta, ring, args.trunc)?;
            print_series(&series, args.json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bipartition(args) => {
            let ring = ring_of(args.modulus);
            let params = BipartitionParams::new(args.u, args.v)?;
            let series = bipartition_series(params, ring, args.trunc)?;
            print_series(&series, args.json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            if args.list {
                for f in builtin_families() {
                    println!("{}\t{}", f.id, f.description);
                }
                return Ok(ExitCode::SUCCESS);
            }
            let nmax = args.nmax;
            let reports = if args.family == "all" {
                if args.deep && nmax.is_none() {
                    let mut out = Vec::new();
                    for mut fam in builtin_families() {
                        for inst in &mut fam.instances {
                            inst.n_max = inst.n_max.saturating_mul(10);
                        }
                        out.extend(verify_family(&fam, None)?);
                    }
                    out
                } else {
                    verify_all(nmax)?
                }
            } else {
                let mut fam = family_by_id(&args.family)?;
                if args.deep && nmax.is_none() {
                    for inst in &mut fam.instances {
                        inst.n_max = inst.n_max.saturating_mul(10);
                    }
                }
                verify_family(&fam, nmax)?
            };
            let failed = print_reports(&reports, args.json)?;
            Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::Density(args) => {
            let curve = density_experiment(args.p, args.m, &args.checkpoints)?;
            if args.json {
                println!("{}", json!({ "schema": 1, "curve": curve }));
            } else {
                println!("x,nonzero,ratio");
                for c in &curve.checkpoints {
                    println!("{},{},{:.6}", c.x, c.nonzero, c.ratio);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::EtaAnalyze(args) => {
            let mut factors = Vec::new();
            for part in args.factors.split(',') {
                let (d, r) = part.split_once(':').ok_or_else(|| {
                    qlab::QlabError::InvalidSpec(format!("bad factor '{part}', expected delta:exp"))
                })?;
                let d: u64 = d.trim().parse().map_err(|_| {
                    qlab::QlabError::InvalidSpec(format!("bad delta in '{part}'"))
                })?;
                let r: i64 = r.trim().parse().map_err(|_| {
                    qlab::QlabError::InvalidSpec(format!("bad exponent in '{part}'"))
                })?;
                factors.push((d, r));
            }
            let eq = EtaQuotient::new(args.level, &factors)?;
            let weight = eq.weight();
            println!("level: {}", eq.level());
            println!("weight: {}/{}", weight.numer(), weight.denom());
            println!("level conditions: {:?}", eq.check_level_conditions());
            if let Ok(chi) = eq.character_descriptor() {
                println!(
                    "character: ((-1)^{} * s / .), s = {:?}",
                    chi.sign_exponent, chi.s_factors
                );
            }
            match eq.holomorphy_verdict() {
                Ok(HolomorphyVerdict::HolomorphicAllCusps(reports)) => {
                    println!("holomorphic at all cusps:");
                    for r in reports {
                        println!("  d={}: order {}/{}", r.d, r.order.numer(), r.order.denom());
                    }
                }
                Ok(HolomorphyVerdict::NegativeAt(reports)) => {
                    println!("NEGATIVE order at:");
                    for r in reports {
                        println!("  d={}: order {}/{}", r.d, r.order.numer(), r.order.denom());
                    }
                }
                Err(e) => println!("holomorphy verdict unavailable: {e}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Hecke(args) => {
            let form = args.form.form();
            let expansion = form.expansion(args.bound)?;
            let ctx = form.context(args.p)?;
            match eigen_check(ctx, &expansion) {
                Ok(lambda) => {
                    println!("PASS eigenform at p={} with eigenvalue {lambda}", args.p);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("FAIL {e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Newman(args) => {
            let report = match args.identity {
                IdentityKind::I => {
                    let series = args.series.ok_or_else(|| {
                        qlab::QlabError::InvalidSpec("--series is required for identity I".into())
                    })?;
                    newman1_verify(series.id(), args.p, args.nmax)?
                }
                IdentityKind::Ii => {
                    let (q, r, s) = match (args.q, args.r, args.s) {
                        (Some(q), Some(r), Some(s)) => (q, r, s),
                        _ => {
                            return Err(qlab::QlabError::InvalidSpec(
                                "--q, --r, --s are required for identity II".into(),
                            ))
                        }
                    };
                    newman2_verify(NewmanIIParams::new(q, r, s, args.p)?, args.nmax)?
                }
            };
            let failed = print_reports(std::slice::from_ref(&report), false)?;
            Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
    }
}

fn main() -> ExitCode {
    // Die quietly instead of panicking when a downstream pipe (e.g. `head`)
    // closes stdout early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(code) => code,
        Err(qlab::QlabError::UnknownFamily(id)) => {
            eprintln!("error: unknown family '{id}' (use --list to see available ids)");
            ExitCode::from(2)
        }
        Err(qlab::QlabError::InvalidSpec(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
