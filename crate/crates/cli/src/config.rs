use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l2residue::rootsys::Q;
use l2residue::TypeLabel;

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 0x6c32_7265_7369_6475;
pub const CACHE_DIR_ENV: &str = "L2RESIDUE_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "l2residue", version, about = "Certifies square-integrable residues of Eisenstein series on exceptional groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one deformation line.
    Verify(VerifyArgs),
    /// Run every catalog row of a group and compare with the tabulated values.
    Table(TableArgs),
    /// List, clear or pre-warm cache records.
    Cache(CacheArgs),
    /// Print the embedded orbit catalog as a versioned text file.
    Catalog(CatalogArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ModeArg {
    /// Criterion mode for rows tabulated only as a bound, exact otherwise.
    #[default]
    Auto,
    Exact,
    Criterion,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Group type, e.g. E6, E7, E8, F4.
    #[arg(long = "type", value_name = "TYPE")]
    pub group_type: String,
    /// Largest power of eps examined.
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    pub max_order: i32,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Cache directory; caching is off when unset.
    #[arg(long, env = CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Seed of the random evaluation point for nonzero certificates.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Suppress progress on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SelectorArgs {
    /// Bala-Carter label of a catalog row.
    #[arg(long)]
    pub label: Option<String>,
    /// Weighted Dynkin diagram, e.g. 200202.
    #[arg(long)]
    pub marking: Option<String>,
    /// Explicit lambda1 = 2s omega_j - rho, comma separated.
    #[arg(long, allow_hyphen_values = true, requires = "j")]
    pub lambda1: Option<String>,
    /// Node of the line for --lambda1.
    #[arg(long)]
    pub j: Option<usize>,
    /// Reads --marking / --lambda1 in another node numbering: Bourbaki node
    /// i takes the given node perm[i] (comma separated, 1-based).
    #[arg(long)]
    pub node_perm: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Cross-check the leading coefficient numerically.
    #[arg(long)]
    pub zeta_check: bool,
    /// Working precision in decimal digits for --zeta-check.
    #[arg(long, default_value_t = 50)]
    pub precision: u32,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,
    /// Rows with more cosets than this get geometry only.
    #[arg(long, default_value_t = 20_000)]
    pub budget: u64,
    /// Run the series stage on every row regardless of the budget.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    #[command(subcommand)]
    pub action: CacheCommand,
}

#[derive(Debug, Subcommand)]
pub enum CacheCommand {
    List {
        #[arg(long, env = CACHE_DIR_ENV)]
        cache_dir: Option<PathBuf>,
    },
    Clear {
        #[arg(long, env = CACHE_DIR_ENV)]
        cache_dir: Option<PathBuf>,
    },
    /// Enumerate blocks and build factor series without the verdict stage.
    Warm {
        #[command(flatten)]
        engine: EngineArgs,
        /// Warms one line; without a selector, every catalog row within the budget.
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
    },
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long = "type", value_name = "TYPE")]
    pub group_type: String,
}

/// How a line is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    Label(String),
    Marking(String),
    Lambda1 { lambda1: Vec<Q>, j: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Verify,
    Table,
    Warm,
}

/// Validated settings of one engine run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub group_type: TypeLabel,
    pub selector: Option<Selector>,
    pub max_order: i32,
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub mode: ModeArg,
    pub seed: u64,
    pub zeta_check: bool,
    pub precision: u32,
    /// Bourbaki node `i` reads input node `node_perm[i-1]`.
    pub node_perm: Option<Vec<usize>>,
    pub budget: u64,
    pub force: bool,
    pub quiet: bool,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| CliError::Usage(format!("bad {what} entry {x:?} in {s:?}"))))
        .collect()
}

impl RunConfig {
    fn base(command: CommandKind, e: EngineArgs, format: Format) -> Result<RunConfig, CliError> {
        if e.workers == Some(0) {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        Ok(RunConfig {
            command,
            group_type: e.group_type.parse()?,
            selector: None,
            max_order: e.max_order,
            workers: e.workers,
            cache_dir: e.cache_dir,
            format,
            mode: e.mode,
            seed: e.seed,
            zeta_check: false,
            precision: 50,
            node_perm: None,
            budget: 20_000,
            force: false,
            quiet: e.quiet,
        })
    }

    fn with_selector(mut self, s: SelectorArgs, required: bool) -> Result<RunConfig, CliError> {
        let given = [s.label.is_some(), s.marking.is_some(), s.lambda1.is_some()].iter().filter(|b| **b).count();
        if given > 1 || (required && given == 0) {
            return Err(CliError::Usage("give exactly one of --label, --marking, --lambda1".into()));
        }
        if s.j.is_some() && s.lambda1.is_none() {
            return Err(CliError::Usage("--j only applies to --lambda1".into()));
        }
        let rank = self.group_type.rank();
        if let Some(p) = &s.node_perm {
            let perm: Vec<usize> = parse_list(p, "node permutation")?;
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (1..=rank).collect::<Vec<_>>() {
                return Err(CliError::Usage(format!("--node-perm must be a permutation of 1..{rank}")));
            }
            self.node_perm = Some(perm);
        }
        self.selector = if let Some(l) = s.label {
            Some(Selector::Label(l))
        } else if let Some(m) = s.marking {
            Some(Selector::Marking(m))
        } else if let Some(l1) = s.lambda1 {
            let lambda1: Vec<Q> = parse_list(&l1, "lambda1")?;
            Some(Selector::Lambda1 { lambda1, j: s.j.expect("clap requires --j") })
        } else {
            None
        };
        Ok(self)
    }

    pub fn from_verify(a: VerifyArgs) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::base(CommandKind::Verify, a.engine, a.format)?.with_selector(a.selector, true)?;
        c.zeta_check = a.zeta_check;
        c.precision = a.precision;
        Ok(c)
    }

    pub fn from_table(a: TableArgs) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::base(CommandKind::Table, a.engine, a.format)?;
        c.budget = a.budget;
        c.force = a.force;
        Ok(c)
    }

    pub fn from_warm(engine: EngineArgs, selector: SelectorArgs, budget: u64) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::base(CommandKind::Warm, engine, Format::Json)?.with_selector(selector, false)?;
        c.budget = budget;
        Ok(c)
    }
}
