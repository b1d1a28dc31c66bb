//! `qmink`: spectra, verification reports, the light-cone obstruction,
//! tensor dumps and operator dumps from the command line.

use clap::{Args, Parser, Subcommand};
use qminkowski::cli::{
    cmd_dump_op, cmd_obstruction, cmd_spectrum, cmd_tensors, cmd_verify, parse_range, parse_sectors, OutputFormat,
    RunConfig,
};
use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::Result;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qmink", version, about = "q-deformed Minkowski space representations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Deformation parameter q > 1.
    #[arg(long, global = true, default_value_t = 1.1)]
    q: f64,
    /// Sector: space, time+, time- or light (spectrum also accepts a
    /// comma-separated list or `all`).
    #[arg(long, global = true, default_value = "space")]
    sector: String,
    /// Representation label l0, |t0| or tau0.
    #[arg(long, global = true, default_value_t = 1.0)]
    scale: f64,
    /// Largest j in the window.
    #[arg(long, global = true)]
    jmax: Option<i64>,
    /// Range of n, `a:b`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    nrange: Option<String>,
    /// Range of the scale level M, `a:b`.
    #[arg(long = "Mrange", global = true, allow_hyphen_values = true)]
    mrange: Option<String>,
    /// Extra margin added to every interior budget.
    #[arg(long, global = true)]
    margin: Option<i64>,
    /// Normalised residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// csv, json, svg or table.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Light-cone phases of Lambda^1/2, comma-separated, from the lowest n.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Vec<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible (t, r) points.
    Spectrum,
    /// Check every relation of the algebra; exit code 0 iff all pass.
    Verify,
    /// Light-cone obstruction probe.
    Obstruction,
    /// Dump a constant tensor as JSON.
    Tensors {
        /// Tensor name (g, eps, eta, rhat3, P+, P-, PT, PS, PA, R-I, R-II, ...).
        name: String,
    },
    /// Dump the matrix elements of one generator.
    DumpOp {
        /// Generator name (X+, X-, X3, X0, R+, S3, U, Lambda, P0, L3, W, T+, tau, ...).
        #[arg(long)]
        op: String,
    },
}

fn config(g: &Global, kind: SectorKind, default_format: OutputFormat) -> Result<RunConfig> {
    let mut c = RunConfig::for_sector(kind);
    c.q = g.q;
    c.scale = g.scale;
    c.tol = g.tol;
    c.out = g.out.clone();
    c.phases = g.phases.clone();
    c.format = match &g.format {
        Some(f) => f.parse()?,
        None => default_format,
    };
    let w = c.window;
    let n = g
        .nrange
        .as_deref()
        .map(parse_range)
        .transpose()?
        .unwrap_or((w.n_lo, w.n_hi));
    let levels = g
        .mrange
        .as_deref()
        .map(parse_range)
        .transpose()?
        .unwrap_or((w.level_lo, w.level_hi));
    c.window = TruncationWindow::new(g.jmax.unwrap_or(w.j_max), n, levels, g.margin.unwrap_or(w.margin))?;
    Ok(c)
}

fn run(cli: Cli) -> Result<(String, bool, Option<PathBuf>)> {
    let g = &cli.global;
    let sectors = parse_sectors(&g.sector)?;
    let single = || -> Result<SectorKind> {
        match sectors.as_slice() {
            [k] => Ok(*k),
            _ => Err(qminkowski::Error::InvalidParameter(
                "this command takes a single sector".into(),
            )),
        }
    };
    let (text, ok, out) = match &cli.command {
        Command::Spectrum => {
            let c = config(g, sectors[0], OutputFormat::Csv)?;
            (cmd_spectrum(&c, &sectors)?, true, c.out)
        }
        Command::Verify => {
            let c = config(g, single()?, OutputFormat::Table)?;
            let (text, ok) = cmd_verify(&c)?;
            (text, ok, c.out)
        }
        Command::Obstruction => {
            let c = config(g, single()?, OutputFormat::Table)?;
            (cmd_obstruction(&c)?, true, c.out)
        }
        Command::Tensors { name } => {
            let c = config(g, single()?, OutputFormat::Json)?;
            (cmd_tensors(&c, name)?, true, c.out)
        }
        Command::DumpOp { op } => {
            let c = config(g, single()?, OutputFormat::Json)?;
            (cmd_dump_op(&c, op)?, true, c.out)
        }
    };
    Ok((text, ok, out))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((text, ok, out)) => {
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::FAILURE;
                    }
                }
                None => print!("{text}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
