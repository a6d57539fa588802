//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{C64Pair, Overrides, RunConfig};
use crate::error::CliError;
use crate::exec::RayonExecutor;
use crate::report::Report;
use crate::text::{parse_complex, parse_complex_list, parse_real_list};

#[derive(Debug, Parser)]
#[command(
    name = "maxcompact",
    version,
    about = "Universal vectorial extensions of elliptic curves and their maximal compact subgroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Curves {
    /// `g2,g3` of one factor; repeat in factor order.
    #[arg(long = "curve", value_name = "G2,G3", allow_hyphen_values = true)]
    curves: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Periods, quasi-periods and invariants of each curve.
    Periods(Curves),
    /// Exponential of a tangent vector, one `z,w` per factor.
    Exp {
        #[command(flatten)]
        curves: Curves,
        #[arg(required = true, allow_hyphen_values = true, value_name = "Z,W")]
        tangent: Vec<String>,
    },
    /// Logarithm of a point, one `x1,x2,x3,x4` or `x0,…,x4` per factor.
    Log {
        #[command(flatten)]
        curves: Curves,
        #[arg(required = true, allow_hyphen_values = true, value_name = "COORDS")]
        point: Vec<String>,
    },
    /// Point of the compact subgroup at Betti coordinates, one `p,q` per factor.
    Betti {
        #[command(flatten)]
        curves: Curves,
        #[arg(required = true, allow_hyphen_values = true, value_name = "P,Q")]
        betti: Vec<String>,
        #[arg(long, default_value_t = 100)]
        qmax: u64,
    },
    /// Zeros of a variety on the compact subgroup.
    Intersect(IntersectArgs),
    /// Closed-form bound on isolated points and pfaffian formats.
    Bound { g: u32, delta: u32 },
    /// Exact fuzzing of the two block-matrix rank lemmas.
    Lemmas {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Order of a point of the Betti torus, coordinates `p1,q1,…`.
    Torsion {
        #[arg(allow_hyphen_values = true, value_name = "COORDS")]
        betti: String,
        #[arg(long, default_value_t = 100)]
        qmax: u64,
        #[command(flatten)]
        curves: Curves,
    },
}

#[derive(Debug, Args)]
struct IntersectArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    curves: Curves,
    #[arg(long)]
    variety: Option<PathBuf>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    height: Option<i64>,
    #[arg(long)]
    qmax: Option<u64>,
    /// CSV of grid samples `(p, q, residual)`.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Solver threads; 0 picks the number of CPUs.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn parse_curves(c: &Curves) -> Result<Vec<C64Pair>, CliError> {
    c.curves
        .iter()
        .map(|s| match s.split_once(',') {
            Some((a, b)) => Ok((parse_complex(a)?, parse_complex(b)?)),
            None => Err(CliError::Validation(format!(
                "curve {s:?} is not of the form g2,g3"
            ))),
        })
        .collect()
}

fn parse_pair<T>(
    s: &str,
    parse: impl Fn(&str) -> Result<Vec<T>, CliError>,
) -> Result<(T, T), CliError>
where
    T: Copy,
{
    match parse(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(CliError::Validation(format!(
            "{s:?} must have exactly two entries"
        ))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn dispatch(cli: Cli) -> Result<(Report, Option<PathBuf>), CliError> {
    let out = cli.out;
    let report = match cli.command {
        Command::Periods(c) => commands::periods(&parse_curves(&c)?)?,
        Command::Exp { curves, tangent } => {
            let t = tangent
                .iter()
                .map(|s| parse_pair(s, parse_complex_list))
                .collect::<Result<Vec<_>, _>>()?;
            commands::exp(&parse_curves(&curves)?, &t)?
        }
        Command::Log { curves, point } => {
            let p = point
                .iter()
                .map(|s| parse_complex_list(s))
                .collect::<Result<Vec<_>, _>>()?;
            commands::log(&parse_curves(&curves)?, &p)?
        }
        Command::Betti {
            curves,
            betti,
            qmax,
        } => {
            let b = betti
                .iter()
                .map(|s| parse_pair(s, parse_real_list))
                .collect::<Result<Vec<_>, _>>()?;
            commands::betti(&parse_curves(&curves)?, &b, qmax)?
        }
        Command::Bound { g, delta } => commands::bound(g, delta)?,
        Command::Lemmas { trials, seed } => commands::lemmas(trials, seed)?,
        Command::Torsion {
            betti,
            qmax,
            curves,
        } => commands::torsion(&parse_real_list(&betti)?, qmax, &parse_curves(&curves)?)?,
        Command::Intersect(a) => {
            let mut cfg = match &a.config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            cfg.apply(Overrides {
                curves: parse_curves(&a.curves)?,
                variety: a.variety,
                resolution: a.resolution,
                tol: a.tol,
                seed: a.seed,
                height: a.height,
                qmax: a.qmax,
                out: out.clone(),
                plot: a.plot,
            });
            let exec = RayonExecutor::new(a.workers)
                .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;
            let (report, raw) = commands::intersect(&cfg, &exec)?;
            if let Some(p) = &cfg.plot {
                write_file(p, &commands::plot_csv(&raw, cfg.curves.len())?)?;
            }
            return Ok((report, cfg.out));
        }
    };
    Ok((report, out))
}

/// Runs one invocation; returns the exit status (0 success, 1 bad input,
/// 2 numerical failure).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = dispatch(cli).and_then(|(report, out)| {
        let json = report.to_json();
        match out {
            Some(p) => write_file(&p, json.as_bytes())?,
            None => stdout
                .write_all(json.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?,
        }
        for line in &report.summary {
            let _ = writeln!(stderr, "{line}");
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
