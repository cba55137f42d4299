use std::process::ExitCode;

use clap::Parser;
use sm_cli::args::{Cli, Command, GlobalOpts};
use sm_cli::cache::Cache;
use sm_cli::commands::{self, Ctx, Outcome};
use sm_core::{Error, PrecisionConfig, Result};

const EXIT_FAILED: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_INVALID: u8 = 4;
const EXIT_INTERNAL: u8 = 1;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NotNearIntegral { .. } => EXIT_FAILED,
        Error::PrecisionExhausted { .. } => EXIT_EXHAUSTED,
        Error::InvalidArgument(_)
        | Error::InvalidConfig(_)
        | Error::Parse(_)
        | Error::InvalidDiscriminant(_)
        | Error::NotUpperHalfPlane => EXIT_INVALID,
        _ => EXIT_INTERNAL,
    }
}

fn context(g: &GlobalOpts) -> Result<Ctx> {
    let tol = commands::parse_tol(&g.tol)?;
    let cfg = PrecisionConfig::new(g.precision_bits, g.max_precision_bits, sm_core::num::DEFAULT_GUARD_BITS)?
        .with_abs_tol(tol);
    let cache = match (&g.cache_path, g.no_cache) {
        (Some(p), false) => Cache::open(p),
        _ => Cache::disabled(),
    };
    if let Some(w) = &cache.warning {
        eprintln!("warning: {w}");
    }
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    Ok(Ctx { cfg, seed: g.seed, cache })
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let mut ctx = context(&cli.global)?;
    match cli.command {
        Command::Pn { n } => commands::pn(&mut ctx, n),
        Command::Orbit { n } => commands::orbit(&mut ctx, n),
        Command::Forms { n } => commands::forms(&ctx, n),
        Command::Eval { what, z } => commands::eval(&ctx, what, &z),
        Command::VerifyDecomp { trials } => commands::verify_decomp(&ctx, trials),
        Command::VerifyAppendix { z, trials } => commands::verify_appendix(&ctx, z.as_deref(), trials),
        Command::Masser { n } => commands::masser(&ctx, n),
        Command::Norms { n, beta } => commands::norms(&ctx, n, beta),
        Command::Hypothesis { order, dump_series } => commands::hypothesis(order, dump_series),
        Command::Cache { action } => commands::cache(&mut ctx, action),
        Command::Report { n_max, trials } => commands::report(&mut ctx, n_max, trials),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version land here too
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    let json = cli.global.json;
    match dispatch(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                println!("{}", out.human);
            }
            if out.failed {
                ExitCode::from(EXIT_FAILED)
            } else if out.exhausted {
                ExitCode::from(EXIT_EXHAUSTED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
