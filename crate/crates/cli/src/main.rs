use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use typeii_cli::commands::{self, AppError, Ctx, Format, Outcome};
use typeii_cli::config::{defaults_text, Config};

#[derive(Parser)]
#[command(name = "typeii", version, about = "Exponent algebra, scaled energy quantities and blowup diagnostics")]
struct Cli {
    /// Config file (key = value, with [section] headers)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (beats output.dir, then TYPEII_OUT_DIR, then ./typeii-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv, json or both
    #[arg(long, global = true)]
    format: Option<String>,
    /// Overrides scaling.tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Derived exponents and Hölder splits for (s, l, m0)
    Exponents,
    /// The explicit (s, l) construction for (m0, α)
    Construct,
    /// A, C, D, E and M over the radius ladder
    Quantities,
    /// Navier–Stokes and Euler scaling checks
    ScaleCheck,
    /// Liouville verdict with growth evidence
    Liouville,
    /// Iterated bound trace
    Iterate,
    /// Every command above, each into its own subdirectory
    Suite,
    /// Print a complete default config
    Defaults,
}

fn run(cli: Cli) -> Result<i32, AppError> {
    if let Cmd::Defaults = cli.command {
        print!("{}", defaults_text());
        return Ok(0);
    }
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let threads = match cli.threads {
        Some(n) => n,
        None => cfg.require("run.threads")?,
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| AppError::Io(format!("thread pool: {e}")))?;
    }
    let out = match (&cli.out, cfg.get::<String>("output.dir")?, std::env::var_os("TYPEII_OUT_DIR")) {
        (Some(p), _, _) => p.clone(),
        (None, Some(d), _) => PathBuf::from(d),
        (None, None, Some(e)) => PathBuf::from(e),
        (None, None, None) => PathBuf::from("typeii-out"),
    };
    let format = match &cli.format {
        Some(f) => Format::parse(f)?,
        None => Format::parse(&cfg.require::<String>("output.format")?)?,
    };
    let ctx = Ctx { cfg, format, tolerance: cli.tolerance };
    let report = |o: &Outcome| {
        for l in &o.lines {
            println!("{l}");
        }
        for u in &o.unmet {
            eprintln!("unmet: {u}");
        }
    };
    let single = match cli.command {
        Cmd::Exponents => commands::exponents,
        Cmd::Construct => commands::construct,
        Cmd::Quantities => commands::quantities,
        Cmd::ScaleCheck => commands::scale_check,
        Cmd::Liouville => commands::liouville,
        Cmd::Iterate => commands::iterate,
        Cmd::Suite => {
            let (o, code) = commands::suite(&ctx, &out);
            report(&o);
            return Ok(code);
        }
        Cmd::Defaults => unreachable!(),
    };
    let o = single(&ctx, &out)?;
    report(&o);
    Ok(if o.unmet.is_empty() { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
