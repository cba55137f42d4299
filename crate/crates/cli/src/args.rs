use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sm", version, about = "Partition numbers from singular moduli, with integrality checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Starting working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision_bits: u32,

    /// Ceiling for the precision ladder.
    #[arg(long, global = true, default_value_t = 8192)]
    pub max_precision_bits: u32,

    /// Absolute tolerance, as a decimal ("1e-30") or a power of two ("2^-80").
    #[arg(long, global = true, default_value = "2^-80")]
    pub tol: String,

    /// Emit JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Result cache file; without one nothing is cached.
    #[arg(long, global = true, env = "SM_CACHE_PATH")]
    pub cache_path: Option<PathBuf>,

    /// Ignore the cache for this run.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for random verification points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// p(n) from the trace of P over the Heegner points of discriminant 1-24n.
    Pn {
        #[arg(long)]
        n: u64,
    },
    /// The scaled orbit polynomial prod (x - (24n-1) P(alpha_Q)).
    Orbit {
        #[arg(long)]
        n: u64,
    },
    /// Representatives of Q_n as JSON [{a, b, c, im_alpha}].
    Forms {
        #[arg(long)]
        n: u64,
    },
    /// Evaluates one function at a point of the upper half-plane.
    Eval {
        #[arg(long, value_enum)]
        what: EvalTarget,
        /// Point as "re,im".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Checks P = A + B C at random points.
    VerifyDecomp {
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Compares the coset polynomials of A' and B with their closed forms.
    VerifyAppendix {
        /// Single point "re,im"; otherwise random points are used.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Masser's expression for C against direct evaluation, per form.
    Masser {
        #[arg(long)]
        n: u64,
    },
    /// Norms of j (and optionally beta) over Q_n and their coprimality to 6.
    Norms {
        #[arg(long)]
        n: u64,
        /// Also the beta norm (needs a high --max-precision-bits beyond n = 1).
        #[arg(long)]
        beta: bool,
    },
    /// Integrality of the q-expansions of F and its companion at infinity.
    Hypothesis {
        #[arg(long, default_value_t = 500)]
        order: i64,
        /// Include both series in the output.
        #[arg(long)]
        dump_series: bool,
    },
    /// Inspect or clear the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
    /// Every check for n = 1..n_max in one JSON document.
    Report {
        #[arg(long)]
        n_max: u64,
        /// Random points for the appendix comparison.
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum CacheAction {
    Show,
    Clear,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTarget {
    #[value(name = "F")]
    F,
    #[value(name = "P")]
    P,
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    #[value(name = "j")]
    J,
}
