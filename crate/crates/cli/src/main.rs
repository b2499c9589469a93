//! Command-line front end: lift single seeds, enumerate all roots in Z_p,
//! and measure the real-number convergence order of the iteration.
//!
//! Exit codes: 0 success, 2 seed rejected by the admission test, 3 working
//! precision exhausted (or floating-point underflow), 64 usage errors.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use padic_roots::poly::{parse_rational_coeffs, Poly};
use padic_roots::real::{
    measure_order_exact, refine_real_root, RationalPoly, RealIterationReport, RealMethod,
};
use padic_roots::seed::{all_roots_adaptive, BranchIssue, DEFAULT_MAX_DEPTH};
use padic_roots::solver::{solve_adaptive, Method};
use padic_roots::{Error, ZpContext};

use output::{build_solve_output, residue_key, SolveOutput, VerifyOutput, VerifyRun};

/// Decimal digits to which builtin roots are refined before measuring.
const GAMMA_DIGITS: u32 = 240;

#[derive(Parser)]
#[command(
    name = "padic-roots",
    version,
    about = "Polynomial root finding over the p-adic integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift one admissible seed to a root mod p^prec
    Solve(SolveArgs),
    /// Enumerate every simple-root lifting in Z_p
    Roots(RootsArgs),
    /// Measure the real-number convergence order on a builtin instance
    VerifyOrder(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Prime p
    #[arg(short = 'p', long = "prime")]
    p: u64,
    /// Coefficients, constant term first (e.g. "-2,0,1" for x^2 - 2);
    /// rationals like "1/3" need unit denominators
    #[arg(short = 'f', long = "poly", allow_hyphen_values = true)]
    poly: String,
    /// Starting point of the iteration
    #[arg(long, allow_hyphen_values = true)]
    seed: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Sjm)]
    method: MethodArg,
    /// Certified digits requested for the root
    #[arg(long, default_value_t = 8)]
    prec: u32,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RootsArgs {
    #[arg(short = 'p', long = "prime")]
    p: u64,
    #[arg(short = 'f', long = "poly", allow_hyphen_values = true)]
    poly: String,
    #[arg(long, default_value_t = 8)]
    prec: u32,
    /// Cap on the digit-chain depth of the seed search
    #[arg(long = "max-depth", default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = BuiltinArg::Sqrt2)]
    builtin: BuiltinArg,
    /// Additionally measure a second method on the same instance
    #[arg(long, value_enum)]
    compare: Option<RealMethodArg>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Newton,
    Olver,
    Sjm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Newton => Method::Newton,
            MethodArg::Olver => Method::Olver,
            MethodArg::Sjm => Method::Sjm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RealMethodArg {
    Newton,
    Olver,
    Sjm,
    Jarratt,
}

impl From<RealMethodArg> for RealMethod {
    fn from(m: RealMethodArg) -> RealMethod {
        match m {
            RealMethodArg::Newton => RealMethod::Newton,
            RealMethodArg::Olver => RealMethod::Olver,
            RealMethodArg::Sjm => RealMethod::Sjm,
            RealMethodArg::Jarratt => RealMethod::Jarratt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinArg {
    /// x^2 - 2 with its positive root
    Sqrt2,
    /// x - 3, converges in one exact step
    Linear,
    /// x^3 - 2x + 2 near its real root
    Cubic,
}

impl BuiltinArg {
    fn name(&self) -> &'static str {
        match self {
            BuiltinArg::Sqrt2 => "sqrt2",
            BuiltinArg::Linear => "linear",
            BuiltinArg::Cubic => "cubic",
        }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                64
            };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Roots(args) => cmd_roots(args),
        Command::VerifyOrder(args) => cmd_verify_order(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::SeedRejected { .. } = e {
                eprintln!("hint: the `roots` subcommand searches for admissible seeds digit by digit");
            }
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SeedRejected { .. } => 2,
        Error::PrecisionExhausted(_)
        | Error::UnderflowTooFast
        | Error::InsufficientPrecision { .. } => 3,
        Error::NotPrime(_)
        | Error::PrimeTooSmall(_)
        | Error::Parse(_)
        | Error::ZeroPrecision
        | Error::Precondition(_)
        | Error::ZeroDenominator
        | Error::PrimeTooLargeForEnumeration { .. } => 64,
        _ => 70,
    }
}

fn parse_seed(s: &str) -> Result<BigInt, Error> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad seed `{s}`")))
}

fn check_method_prime(p: u64, needs_large_prime: bool) -> Result<(), Error> {
    // context construction re-checks primality; reject composite or tiny
    // primes before doing any work so usage errors stay usage errors
    ZpContext::new(p, 1)?;
    if needs_large_prime && p <= 3 {
        return Err(Error::PrimeTooSmall(p));
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<i32, Error> {
    let method: Method = args.method.into();
    check_method_prime(args.p, method != Method::Newton)?;
    if args.prec == 0 {
        return Err(Error::ZeroPrecision);
    }
    let coeffs = parse_rational_coeffs(&args.poly)?;
    let seed = parse_seed(&args.seed)?;

    let record = solve_adaptive(&coeffs, args.p, &seed, method, args.prec)?;
    let poly = Poly::from_rationals(record.gamma.context(), &coeffs)?;
    let out = build_solve_output(&record, &poly, args.prec)?;

    if args.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        print_solve_human(&out, &record.trace.entries.len());
    }
    Ok(0)
}

fn print_solve_human(out: &SolveOutput, entries: &usize) {
    println!(
        "root of the polynomial mod {}^{} (method {}):",
        out.p, out.precision, out.method
    );
    println!("  residue: {}", out.root.residue);
    println!("  digits (little-endian): {:?}", out.root.digits);
    println!("  steps: {}", entries.saturating_sub(1));
    println!("  trace (n, x, v(f), v(f'), v(e)):");
    for t in &out.trace {
        let v_f = match &t.v_f {
            output::ValOutput::Int(v) => v.to_string(),
            output::ValOutput::AtLeast(s) => s.clone(),
        };
        let v_e = t.v_e.map_or("-".to_string(), |v| v.to_string());
        println!("    {:>2}  {:>24}  {:>5}  {:>3}  {:>4}", t.n, t.x, v_f, t.v_fp, v_e);
    }
    println!(
        "  invariants: derivative valuation constant: {}; value valuation growth: {}",
        if out.invariants.cond2 { "ok" } else { "VIOLATED" },
        if out.invariants.cond3 { "ok" } else { "VIOLATED" },
    );
}

fn cmd_roots(args: RootsArgs) -> Result<i32, Error> {
    check_method_prime(args.p, true)?;
    if args.prec == 0 {
        return Err(Error::ZeroPrecision);
    }
    let coeffs = parse_rational_coeffs(&args.poly)?;
    let outcome = all_roots_adaptive(&coeffs, args.p, args.prec, args.max_depth)?;

    for issue in &outcome.issues {
        match issue {
            BranchIssue::DepthExceeded { digits } => {
                eprintln!("warning: depth cap reached below digits {digits:?}; raise --max-depth")
            }
            BranchIssue::Failed { digits, error } => {
                eprintln!("warning: branch {digits:?} failed: {error}")
            }
        }
    }

    let mut records = Vec::new();
    for rec in &outcome.roots {
        let ctx = rec.gamma.context().clone();
        let poly = Poly::from_rationals(&ctx, &coeffs)?;
        let solved = poly.squarefree_part()?;
        records.push((
            residue_key(rec, args.prec)?,
            build_solve_output(rec, &solved, args.prec)?,
        ));
    }
    records.sort_by(|a, b| a.0.cmp(&b.0));
    let outputs: Vec<SolveOutput> = records.into_iter().map(|(_, o)| o).collect();

    if args.json {
        println!("{}", serde_json::to_string_pretty(&outputs).expect("serializable"));
    } else if outputs.is_empty() {
        println!("no roots in Z_{}", args.p);
    } else {
        println!(
            "{} root(s) mod {}^{}:",
            outputs.len(),
            args.p,
            args.prec
        );
        for o in &outputs {
            println!("  residue {} digits {:?}", o.root.residue, o.root.digits);
        }
    }
    Ok(0)
}

struct Builtin {
    poly: RationalPoly,
    seed: BigRational,
    gamma: BigRational,
    exact_root: bool,
}

fn make_builtin(which: BuiltinArg) -> Result<Builtin, Error> {
    let int = |n: i64| BigRational::from_integer(BigInt::from(n));
    match which {
        BuiltinArg::Sqrt2 => {
            let poly = RationalPoly::from_i64(&[-2, 0, 1]);
            let gamma = refine_real_root(&poly, &int(1), &int(2), GAMMA_DIGITS)?;
            Ok(Builtin {
                poly,
                seed: BigRational::new(BigInt::from(142), BigInt::from(100)),
                gamma,
                exact_root: false,
            })
        }
        BuiltinArg::Linear => Ok(Builtin {
            poly: RationalPoly::from_i64(&[-3, 1]),
            seed: BigRational::new(BigInt::from(9), BigInt::from(2)),
            gamma: int(3),
            exact_root: true,
        }),
        BuiltinArg::Cubic => {
            let poly = RationalPoly::from_i64(&[2, -2, 0, 1]);
            let gamma = refine_real_root(&poly, &int(-2), &int(-1), GAMMA_DIGITS)?;
            // bisection preconditioning: a coarse bracket midpoint seeds the
            // fourth-order iteration inside its basin
            let seed = refine_real_root(&poly, &int(-2), &int(-1), 2)?;
            Ok(Builtin {
                poly,
                seed,
                gamma,
                exact_root: false,
            })
        }
    }
}

fn slope_window(method: RealMethod) -> (f64, f64) {
    match method {
        RealMethod::Newton => (1.8, 2.2),
        RealMethod::Olver => (2.8, 3.2),
        RealMethod::Sjm | RealMethod::Jarratt => (3.8, 4.2),
    }
}

fn run_measurement(builtin: &Builtin, method: RealMethod) -> Result<VerifyRun, Error> {
    let report: RealIterationReport<f64> =
        measure_order_exact(&builtin.poly, &builtin.seed, &builtin.gamma, GAMMA_DIGITS, method)?;
    let pass = if report.exact || builtin.exact_root {
        true
    } else {
        let (lo, hi) = slope_window(method);
        report.order_slope.is_some_and(|s| s >= lo && s <= hi)
    };
    Ok(VerifyRun {
        method: method.name().to_string(),
        exact: report.exact,
        slope: report.order_slope,
        ratios: report.ratios.clone(),
        rho_formula: report.rho_predicted.abs(),
        pass,
    })
}

fn cmd_verify_order(args: VerifyArgs) -> Result<i32, Error> {
    let builtin = make_builtin(args.builtin)?;
    let mut runs = vec![run_measurement(&builtin, RealMethod::Sjm)?];
    if let Some(compare) = args.compare {
        runs.push(run_measurement(&builtin, compare.into())?);
    }
    let out = VerifyOutput {
        builtin: args.builtin.name().to_string(),
        runs,
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("convergence measurement on builtin `{}`:", out.builtin);
        for run in &out.runs {
            if run.exact {
                println!("  {}: exact convergence in one step", run.method);
                continue;
            }
            println!(
                "  {}: slope estimate {:.4} ({})",
                run.method,
                run.slope.unwrap_or(f64::NAN),
                if run.pass { "pass" } else { "out of range" }
            );
            let ratios: Vec<String> = run.ratios.iter().map(|r| format!("{r:.6}")).collect();
            println!("    ratios |e'|/|e|^q: [{}]", ratios.join(", "));
            println!("    asymptotic constant (formula): {:.6}", run.rho_formula);
        }
    }
    Ok(if out.runs.iter().all(|r| r.pass) { 0 } else { 1 })
}
