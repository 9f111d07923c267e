//! Command-line front end: constructions, verifications, reports, caches.
//!
//! Exit codes: 0 success / all audits pass, 1 audits failed, 2 invalid
//! arguments, 3 resource limit, 4 insufficient precision.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use zeta_moments::Error;

#[derive(Parser)]
#[command(
    name = "zeta-moments",
    about = "Sylvester-sequence resonator constructions and moment lower-bound verification for zeta",
    version
)]
pub struct Cli {
    /// Plain-text key=value config file; explicit flags override file entries.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Cap on rayon worker threads. Outputs are deterministic regardless.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Cache directory for divisor tables (falls back to ZETA_MOMENTS_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Greedy Egyptian-fraction expansion: terms and exact remainders.
    Sylvester {
        /// Target in (0,1], as a fraction ("2/3") or decimal ("0.5").
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Sieve d_k(n) up to a limit; optional binary cache and CSV output.
    Divisor {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        /// Write (or reuse) the DKTB cache in the cache directory.
        #[arg(long)]
        cache: bool,
        /// CSV output path (n,c rows); stdout summary otherwise.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Evaluate zeta(1/2+it) on a grid; CSV rows t,re,im,abs,method,err.
    Zeta {
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Dump construction parameters, active lengths and vector summaries.
    Construct {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        json: Option<std::path::PathBuf>,
    },
    /// Moment-bound chain for every active exponent.
    VerifyLemma2 {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Diagonal model for the twisted first moment.
    VerifyDiagonal {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Lower-bound chain audits in log space.
    VerifyLemma1 {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Final inequality pair in log space (includes the moment quadrature).
    VerifyTheorem {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Constant audits of the weight/shift machinery.
    AuditConstants {
        #[arg(long)]
        k: Option<String>,
        /// Height used for the prime sums (T0 = T^{1-theta}).
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Family moments: prime-modulus characters (--q) or quadratic (--x-max).
    Family {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        vartheta: Option<f64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        x_max: Option<i64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Full pipeline: JSON report + CSV audits, exit 0 iff all audits pass.
    Verify {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        json: Option<std::path::PathBuf>,
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
        /// Skip the M_k quadrature stage.
        #[arg(long)]
        skip_moment: bool,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::UseEulerMaclaurin(_) => 2,
        Error::ResourceLimit(_) => 3,
        Error::InsufficientPrecision(_) => 4,
        Error::Io(_) => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    let cfg = match cli.config.as_deref().map(config::load) {
        Some(Ok(map)) => map,
        Some(Err(e)) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
        None => Default::default(),
    };
    if let Some(threads) = cli.threads.or_else(|| config::get(&cfg, "threads")) {
        // Failure means a global pool already exists; determinism holds anyway.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match commands::dispatch(&cli, &cfg) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
