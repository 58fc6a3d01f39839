//! Batch command-line front end: condition checks, regulator scans, splitting
//! sieves, Weierstrass preparation, and curve-record plumbing.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use cyclorank_core::curve::{derive_invariants, CurveContext, EllipticCurveQ};
use cyclorank_core::iwasawa::{weierstrass_preparation, ZpPowerSeries};
use cyclorank_core::padic::PadicNumber;
use cyclorank_core::reduction::minimal_model;
use cyclorank_core::report::{
    build_condition_report, fetch_curve, ingest_curves, render_report, render_scan, Format,
};
use cyclorank_core::sieve::{pi_scan, sigma_sieve, NumberFieldSpec};

const DB_ENV: &str = "CYCLORANK_DB";
const ENDPOINT_ENV: &str = "CYCLORANK_ENDPOINT";
const DEFAULT_DB: &str = "fixtures/curves.db";

#[derive(Parser)]
#[command(
    name = "cyclorank",
    about = "Checks sufficient conditions for Mordell-Weil rank constancy in the cyclotomic Z_p-tower",
    version
)]
struct Cli {
    /// Curve record file; defaults to $CYCLORANK_DB, then fixtures/curves.db
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Structured,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Structured => Format::Structured,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the seven-condition checklist for a curve at one prime
    Check {
        /// Curve label from the record file, or a1,a2,a3,a4,a6
        #[arg(long)]
        curve: String,
        /// Odd prime of good ordinary reduction
        #[arg(long)]
        prime: u64,
        /// Working p-adic precision in digits
        #[arg(long, default_value_t = 20)]
        prec: u32,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// List good ordinary primes up to a bound with non-unit normalized regulator
    Scan {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        max_prime: u64,
        /// Worker threads; defaults to all cores
        #[arg(long)]
        jobs: Option<usize>,
        /// Working p-adic precision in digits
        #[arg(long, default_value_t = 8)]
        prec: u32,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Sieve auxiliary primes against a number field and report densities
    Sieve {
        #[arg(long)]
        curve: String,
        /// Monic integer polynomial defining the field, e.g. "x^2+1"
        #[arg(long)]
        field_poly: String,
        #[arg(long)]
        max_prime: u64,
    },
    /// Weierstrass preparation of a power series over Z_p
    Prep {
        #[arg(long)]
        prime: u64,
        /// Comma-separated rational coefficients c0,c1,... (p-integral)
        #[arg(long)]
        coeffs: String,
        #[arg(long, default_value_t = 20)]
        prec: u32,
    },
    /// Validate a curve record file and list its contents
    Ingest {
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Fetch one curve record from a remote database and print it in record format
    Fetch {
        #[arg(long)]
        label: String,
        /// Remote base URL; defaults to $CYCLORANK_ENDPOINT
        #[arg(long)]
        endpoint: Option<String>,
    },
}

fn db_path(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(DB_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DB))
}

/// Resolves `--curve` to a record: by label, or by a1,a2,a3,a4,a6 matched
/// against minimal models in the record file.
fn resolve_curve(spec: &str, db: &PathBuf) -> Result<(EllipticCurveQ, CurveContext)> {
    if spec.contains(',') {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 5 {
            bail!("curve coefficients must be a1,a2,a3,a4,a6");
        }
        let mut a: Vec<BigInt> = Vec::new();
        for s in &parts {
            a.push(s.trim().parse().map_err(|_| anyhow!("bad coefficient '{s}'"))?);
        }
        let e = derive_invariants(
            a[0].clone(),
            a[1].clone(),
            a[2].clone(),
            a[3].clone(),
            a[4].clone(),
        )?;
        let want = minimal_model(&e).curve.ainvs();
        let records = ingest_curves(db)
            .with_context(|| format!("reading {} for rank/generator data", db.display()))?;
        for (re, ctx) in records {
            if minimal_model(&re).curve.ainvs() == want {
                return Ok((e, ctx));
            }
        }
        bail!(
            "no record in {} matches these coefficients; rank and generators are required",
            db.display()
        );
    }
    let records = ingest_curves(db).with_context(|| format!("reading {}", db.display()))?;
    records
        .into_iter()
        .find(|(_, ctx)| ctx.label == spec)
        .ok_or_else(|| anyhow!("no record labeled '{spec}' in {}", db.display()))
}

fn parse_rational_padic(s: &str, p: u64, prec: u32) -> Result<PadicNumber> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = num.parse().map_err(|_| anyhow!("bad coefficient '{s}'"))?;
    let d: BigInt = den.parse().map_err(|_| anyhow!("bad coefficient '{s}'"))?;
    PadicNumber::from_int(p, &n, prec)
        .div(&PadicNumber::from_int(p, &d, prec))
        .map_err(|e| anyhow!("coefficient '{s}': {e}"))
}

fn run(cli: Cli) -> Result<()> {
    let db = db_path(cli.db.clone());
    match cli.command {
        Command::Check { curve, prime, prec, format } => {
            let (e, ctx) = resolve_curve(&curve, &db)?;
            let report = build_condition_report(&e, &ctx, prime, prec);
            print!("{}", render_report(&report, format.into()));
        }
        Command::Scan { curve, max_prime, jobs, prec, format } => {
            let (e, ctx) = resolve_curve(&curve, &db)?;
            let scan = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build()
                    .context("building thread pool")?
                    .install(|| pi_scan(&e, &ctx, max_prime, prec)),
                None => pi_scan(&e, &ctx, max_prime, prec),
            };
            for (p, note) in &scan.diagnostics {
                eprintln!("{}: skipped {p}: {note:?}", ctx.label);
            }
            println!("{}", render_scan(&ctx.label, &scan, format.into()).trim_end());
        }
        Command::Sieve { curve, field_poly, max_prime } => {
            let (e, ctx) = resolve_curve(&curve, &db)?;
            let field = NumberFieldSpec::parse(&field_poly)?;
            let r = sigma_sieve(&e, &ctx, &field, max_prime);
            println!("curve {} against {} up to {}", ctx.label, field_poly, r.n);
            println!("  split & ordinary (Sigma_0): {} primes", r.sigma0.len());
            println!("  anomalous      (Sigma_1): {:?}", r.sigma1);
            println!("  tamagawa       (Sigma_2): {:?}", r.sigma2);
            println!("  sha            (Sigma_3): {:?}", r.sigma3);
            println!("  sieved set has {} primes", r.sigma.len());
            println!(
                "  empirical density {} vs predicted {}",
                r.empirical_density, r.predicted_density
            );
            for c in &r.caveats {
                println!("caveat: {c}");
            }
        }
        Command::Prep { prime, coeffs, prec } => {
            let parsed: Vec<PadicNumber> = coeffs
                .split(',')
                .map(|s| parse_rational_padic(s, prime, prec))
                .collect::<Result<_>>()?;
            let series = ZpPowerSeries::new(prime, parsed, prec);
            let r = weierstrass_preparation(&series).map_err(|e| anyhow!("{e}"))?;
            println!("mu = {}", r.mu);
            println!("lambda = {}", r.lambda);
            let poly: Vec<String> = r.distinguished.iter().map(|c| c.to_string()).collect();
            println!("distinguished polynomial coefficients: [{}]", poly.join(", "));
            println!("unit part constant term: {}", r.unit_part.coeffs[0]);
        }
        Command::Ingest { db: sub_db } => {
            let path = sub_db.map(|p| db_path(Some(p))).unwrap_or(db);
            let records = ingest_curves(&path)?;
            println!("{} valid records in {}", records.len(), path.display());
            for (_, ctx) in &records {
                println!("  {} (rank {})", ctx.label, ctx.rank);
            }
        }
        Command::Fetch { label, endpoint } => {
            let endpoint = endpoint
                .or_else(|| std::env::var(ENDPOINT_ENV).ok())
                .ok_or_else(|| anyhow!("no endpoint: pass --endpoint or set {ENDPOINT_ENV}"))?;
            let (e, ctx) = fetch_curve(&label, &endpoint)?;
            let a = e.ainvs();
            let gens: Vec<String> = ctx
                .generators
                .iter()
                .filter_map(|g| g.xy())
                .map(|(x, y)| format!("{}/{}/{}/{}", x.numer(), x.denom(), y.numer(), y.denom()))
                .collect();
            let mut line = format!(
                "label={} ainvs={},{},{},{},{} rank={} gens={} torsion={} sha={}",
                ctx.label,
                a[0],
                a[1],
                a[2],
                a[3],
                a[4],
                ctx.rank,
                if gens.is_empty() { "none".to_string() } else { gens.join(";") },
                ctx.torsion_order,
                ctx.sha_analytic_order
            );
            if !ctx.tamagawa_overrides.is_empty() {
                let t: Vec<String> =
                    ctx.tamagawa_overrides.iter().map(|(q, c)| format!("{q}:{c}")).collect();
                line.push_str(&format!(" tamagawa={}", t.join(",")));
            }
            println!("{line}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are successes, bad usage is exit code 1
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
