//! `kepler`: reproduction harness and command-line front end.
//!
//! Exit codes: 0 success, 1 golden mismatch or failed check, 2 usage or
//! configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kepler_resum::arith::{BigReal, Precision};
use kepler_resum::bessel::{jn_asymptotic, jn_reference, jn_resummed, DebyeSeriesSpec};
use kepler_resum::debye;
use kepler_resum::kapteyn::{stieltjes_scan, uniform_t_grid, write_scan_csv};
use kepler_resum::kepler::{
    finest_tolerance, rate_scan, solve_newton, solve_series, write_rates_csv, KeplerProblem,
    DEFAULT_RATE_MAX_ORDER,
};
use kepler_resum::repro::{self, fig10_eps_values, fig10_m_values, ReproConfig, Target};
use kepler_resum::selfcheck::{self, SelfcheckConfig};
use kepler_resum::{Error, TransformKind};

#[derive(Parser, Debug)]
#[command(name = "kepler", version, about = "Kepler's equation via resummed Kapteyn series")]
struct Cli {
    /// Working precision in decimal digits (at least 50).
    #[arg(long, global = true, env = "KEPLER_PRECISION", default_value_t = 250)]
    precision: u32,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file; `-` writes to standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Significant digits in printed values.
    #[arg(long, global = true, default_value_t = 10)]
    digits: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regenerate a table or figure and compare it with the printed digits.
    Reproduce {
        /// table1..table5, fig2..fig10, or `all`.
        #[arg(long)]
        target: String,
    },
    /// Run the invariant suite at reduced scale.
    Selfcheck {
        /// Fault injection: perturb Debye coefficient `K,M` first.
        #[arg(long, value_name = "K,M", hide = true)]
        corrupt_debye: Option<String>,
    },
    /// Solve Kepler's equation for one (eps, M).
    Solve(SolveArgs),
    /// Fit convergence rates nu over a grid of (M, eps).
    Rates {
        /// `M1,M2,..:eps1,eps2,..`; defaults to the five-M, ten-eps grid.
        #[arg(long)]
        grid: Option<String>,
        /// Transformations to fit.
        #[arg(long, value_delimiter = ',', default_value = "levin,weniger")]
        kinds: Vec<String>,
        /// Largest transformation order examined per cell.
        #[arg(long, default_value_t = DEFAULT_RATE_MAX_ORDER)]
        max_order: usize,
    },
    /// Scan the resummed generating function U(-log t, 1/sqrt(1-eps^2)).
    UScan {
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, default_value = "levin")]
        kind: String,
        /// Number of grid points t_i = i/N, i = 1..N.
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Print the Debye polynomial U_k(t), or export the coefficient table.
    Debye {
        #[arg(long)]
        k: usize,
        /// Evaluation point; omit to export rows 0..=k as JSON.
        #[arg(long)]
        t: Option<String>,
    },
    /// J_n(n eps) by the ascending series, leading asymptotics and the
    /// resummed Debye expansion.
    Bessel {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 30)]
        order: usize,
        #[arg(long, default_value = "levin")]
        kind: String,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    eps: String,
    /// Mean anomaly; accepts forms such as `1.2`, `3/4`, `pi/4`, `3pi/4`.
    #[arg(long = "M", alias = "m")]
    m: String,
    #[arg(long, value_enum, default_value_t = Method::Newton)]
    method: Method,
    #[arg(long, default_value_t = 40)]
    order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Newton,
    Levin,
    Weniger,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Mismatch(String),
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(_) | Error::Config(_) | Error::Parse(_) | Error::Domain(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let prec = Precision::new(cli.precision)?;
    match &cli.command {
        Command::Reproduce { target } => reproduce(cli, prec, target),
        Command::Selfcheck { corrupt_debye } => run_selfcheck(cli, prec, corrupt_debye.as_deref()),
        Command::Solve(args) => solve(cli, prec, args),
        Command::Rates {
            grid,
            kinds,
            max_order,
        } => rates(cli, prec, grid.as_deref(), kinds, *max_order),
        Command::UScan {
            eps,
            order,
            kind,
            grid,
        } => u_scan(cli, prec, eps, *order, kind, *grid),
        Command::Debye { k, t } => debye_cmd(cli, prec, *k, t.as_deref()),
        Command::Bessel { n, eps, order, kind } => bessel_cmd(cli, prec, *n, eps, *order, kind),
    }
}

/// Opens `--out` (or `default` when absent); `-` is standard output.
fn open_output(out: Option<&PathBuf>, default: Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match out.cloned().or(default) {
        Some(p) if p.as_os_str() != "-" => Ok(Box::new(BufWriter::new(File::create(&p).map_err(
            |e| Failure::Usage(format!("cannot write {}: {e}", p.display())),
        )?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn write_json(w: &mut dyn Write, v: &serde_json::Value) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *w, v).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn reproduce(cli: &Cli, prec: Precision, target: &str) -> Result<(), Failure> {
    let targets: Vec<Target> = if target.eq_ignore_ascii_case("all") {
        Target::ALL.to_vec()
    } else {
        vec![target.parse()?]
    };
    if targets.len() > 1 && cli.out.as_ref().is_some_and(|p| p.as_os_str() != "-" && !p.is_dir()) {
        return Err(Failure::Usage("with --target all, --out must be a directory".into()));
    }
    let cfg = ReproConfig {
        precision: prec,
        digits: cli.digits,
    };
    let mut failed = Vec::new();
    for t in targets {
        let started = std::time::Instant::now();
        let art = repro::reproduce(t, &cfg)?;
        let file = format!("{}.{}", t.name(), cli.format.extension());
        let path = match &cli.out {
            Some(p) if p.is_dir() => Some(p.join(file)),
            Some(p) => Some(p.clone()),
            None => Some(PathBuf::from(file)),
        };
        let to_stdout = path.as_ref().is_some_and(|p| p.as_os_str() == "-");
        let mut w = open_output(None, path.clone())?;
        match cli.format {
            Format::Csv => art.write_csv(&mut w)?,
            Format::Json => write_json(&mut w, &art.to_json())?,
        }
        w.flush()?;
        let summary = art.summary();
        let elapsed = format!("  time: {:.2} s\n", started.elapsed().as_secs_f64());
        if to_stdout {
            eprint!("{summary}{elapsed}");
        } else {
            print!("{summary}{elapsed}");
            if let Some(p) = path {
                println!("  wrote {}", p.display());
            }
        }
        if !art.passed() {
            failed.push(t.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("golden mismatch in: {}", failed.join(", "))))
    }
}

fn run_selfcheck(cli: &Cli, prec: Precision, corrupt: Option<&str>) -> Result<(), Failure> {
    let corrupt_debye = match corrupt {
        None => None,
        Some(s) => {
            let (k, m) = s
                .split_once(',')
                .ok_or_else(|| Failure::Usage(format!("--corrupt-debye expects K,M, got {s}")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|e| Failure::Usage(format!("--corrupt-debye: {e}")))
            };
            Some((parse(k)?, parse(m)?))
        }
    };
    let report = selfcheck::run(&SelfcheckConfig {
        precision: prec,
        corrupt_debye,
    });
    let mut w = open_output(cli.out.as_ref(), None)?;
    match cli.format {
        Format::Csv => write!(w, "{}", report.render())?,
        Format::Json => write_json(&mut w, &serde_json::to_value(&report).expect("serializable"))?,
    }
    w.flush()?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<_> = report
            .failures()
            .map(|r| format!("{}/{}", r.module, r.invariant))
            .collect();
        Err(Failure::Mismatch(format!("selfcheck failed: {}", names.join(", "))))
    }
}

/// Reads `1.2`, `3/4`, `pi`, `pi/4`, `3pi/4` or `3*pi/4`.
fn parse_real(prec: Precision, s: &str) -> Result<BigReal, Failure> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Some(pos) = t.find("pi") {
        let coef = t[..pos].trim_end_matches('*');
        let rest = &t[pos + 2..];
        let mut v = prec.pi();
        if !coef.is_empty() {
            v = prec.parse(coef)? * v;
        }
        if let Some(den) = rest.strip_prefix('/') {
            v = v / prec.parse(den)?;
        } else if !rest.is_empty() {
            return Err(Failure::Usage(format!("cannot read {s:?}")));
        }
        return Ok(v);
    }
    Ok(prec.parse(&t)?)
}

fn parse_kind(s: &str) -> Result<TransformKind, Failure> {
    Ok(s.parse::<TransformKind>()?)
}

fn solve(cli: &Cli, prec: Precision, args: &SolveArgs) -> Result<(), Failure> {
    let eps = parse_real(prec, &args.eps)?;
    let m = parse_real(prec, &args.m)?;
    let problem = KeplerProblem::new(eps, m)?;
    let (psi, method, order) = match args.method {
        Method::Newton => (solve_newton(&problem, &finest_tolerance(prec))?, "newton", None),
        Method::Levin | Method::Weniger => {
            let kind = if args.method == Method::Levin {
                TransformKind::LevinD
            } else {
                TransformKind::WenigerDelta
            };
            let sol = solve_series(&problem, kind, args.order)?;
            let psi = sol.estimate(args.order).unwrap_or_else(|| sol.best());
            (psi, kind.name(), Some(args.order))
        }
    };
    let residual = problem.residual(&psi).abs();
    let mut w = open_output(cli.out.as_ref(), None)?;
    match cli.format {
        Format::Csv => {
            writeln!(w, "eps,M,method,order,psi,residual")?;
            writeln!(
                w,
                "{},{},{},{},{},{}",
                problem.eps.to_sig(cli.digits),
                problem.m.to_sig(cli.digits),
                method,
                order.map(|k| k.to_string()).unwrap_or_default(),
                psi.to_sig(cli.digits),
                residual.to_sci(3)
            )?;
        }
        Format::Json => write_json(
            &mut w,
            &serde_json::json!({
                "eps": problem.eps.to_sig(cli.digits),
                "M": problem.m.to_sig(cli.digits),
                "method": method,
                "order": order,
                "psi": psi.to_sig(cli.digits),
                "residual": residual.to_sci(3),
            }),
        )?,
    }
    w.flush()?;
    Ok(())
}

fn rates(
    cli: &Cli,
    prec: Precision,
    grid: Option<&str>,
    kinds: &[String],
    max_order: usize,
) -> Result<(), Failure> {
    let (m_list, eps_list) = match grid {
        None => (fig10_m_values(prec), fig10_eps_values(prec)),
        Some(g) => {
            let (ms, es) = g
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("--grid expects M1,M2:eps1,eps2, got {g}")))?;
            let list = |s: &str| {
                s.split(',')
                    .map(|v| parse_real(prec, v))
                    .collect::<Result<Vec<_>, _>>()
            };
            (list(ms)?, list(es)?)
        }
    };
    let kinds = kinds
        .iter()
        .map(|k| parse_kind(k))
        .collect::<Result<Vec<_>, _>>()?;
    let cells = rate_scan(&m_list, &eps_list, &kinds, max_order);
    let mut w = open_output(cli.out.as_ref(), None)?;
    match cli.format {
        Format::Csv => write_rates_csv(&mut w, &cells)?,
        Format::Json => {
            let rows: Vec<_> = cells
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "eps": c.eps.to_sig(6),
                        "M": c.m.to_sig(10),
                        "kind": c.kind.name(),
                        "fit": c.fit,
                        "note": c.note,
                    })
                })
                .collect();
            write_json(&mut w, &serde_json::Value::Array(rows))?
        }
    }
    w.flush()?;
    Ok(())
}

fn u_scan(cli: &Cli, prec: Precision, eps: &str, order: usize, kind: &str, n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("--grid needs at least one point".into()));
    }
    let eps = parse_real(prec, eps)?;
    let kind = parse_kind(kind)?;
    let table = debye::generate(order + 1);
    let points = stieltjes_scan(&eps, &uniform_t_grid(n, prec), order, kind, &table)?;
    let mut w = open_output(cli.out.as_ref(), None)?;
    match cli.format {
        Format::Csv => write_scan_csv(&mut w, &points, &eps, order, cli.digits)?,
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "t": p.t.to_sci(cli.digits),
                        "x": p.x.to_sci(cli.digits),
                        "u_value": p.value.as_ref().map(|v| v.to_sci(cli.digits)),
                        "error": p.error,
                    })
                })
                .collect();
            write_json(
                &mut w,
                &serde_json::json!({
                    "eps": eps.to_sig(cli.digits),
                    "order": order,
                    "kind": kind.name(),
                    "points": rows,
                }),
            )?
        }
    }
    w.flush()?;
    Ok(())
}

fn debye_cmd(cli: &Cli, prec: Precision, k: usize, t: Option<&str>) -> Result<(), Failure> {
    let table = debye::generate(k);
    let mut w = open_output(cli.out.as_ref(), None)?;
    match t {
        None => write_json(&mut w, &table.to_json())?,
        Some(t) => {
            let t = parse_real(prec, t)?;
            let v = table.eval_poly(k, &t)?;
            match cli.format {
                Format::Csv => {
                    writeln!(w, "k,t,u_k")?;
                    writeln!(w, "{k},{},{}", t.to_sig(cli.digits), v.to_sci(cli.digits))?;
                }
                Format::Json => write_json(
                    &mut w,
                    &serde_json::json!({
                        "k": k,
                        "t": t.to_sig(cli.digits),
                        "u_k": v.to_sci(cli.digits),
                    }),
                )?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn bessel_cmd(cli: &Cli, prec: Precision, n: u32, eps: &str, order: usize, kind: &str) -> Result<(), Failure> {
    let eps = parse_real(prec, eps)?;
    let kind = parse_kind(kind)?;
    let spec = DebyeSeriesSpec::new(n, eps.clone(), order + 2)?;
    let table = debye::generate(order + 2);
    let reference = jn_reference(n, &(&eps * &prec.int(n as i64)))?;
    let asymptotic = jn_asymptotic(n, &eps)?;
    let tab = jn_resummed(&spec, &table, kind, order)?;
    let resummed = tab
        .last()
        .map(|v| v.re.to_sig(cli.digits))
        .unwrap_or_default();
    let d = cli.digits;
    let mut w = open_output(cli.out.as_ref(), None)?;
    match cli.format {
        Format::Csv => {
            writeln!(w, "n,eps,reference,asymptotic,resummed,kind,order")?;
            writeln!(
                w,
                "{n},{},{},{},{resummed},{},{}",
                eps.to_sig(d),
                reference.to_sig(d),
                asymptotic.to_sig(d),
                kind.name(),
                tab.k_max()
            )?;
        }
        Format::Json => write_json(
            &mut w,
            &serde_json::json!({
                "n": n,
                "eps": eps.to_sig(d),
                "reference": reference.to_sig(d),
                "asymptotic": asymptotic.to_sig(d),
                "resummed": resummed,
                "kind": kind.name(),
                "order": tab.k_max(),
            }),
        )?,
    }
    w.flush()?;
    Ok(())
}
