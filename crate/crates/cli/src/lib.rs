//! Command-line surface of the `p1f` toolkit.
//!
//! Exit codes: 0 success, 1 usage, 2 bad input data, 3 internal failure.

pub mod analysis;
pub mod enumerate;
pub mod error;
pub mod formats;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use p1f_core::families::{bdcls_from_first_row, l_p_square, parse_first_row, verify_ga_theorem};
use p1f_core::ColourMode;

pub use error::{CliError, CliResult};
use formats::InputFormat;

#[derive(Debug, Parser)]
#[command(name = "p1f", version, about = "Perfect 1-factorisations of K_{n,n} and row-Hamiltonian Latin squares")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Progress on stderr.
    #[arg(long, global = true)]
    pub human: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate isomorphism classes of perfect 1-factorisations of K_{n,n}.
    Enumerate(EnumerateArgs),
    /// Generate the seed set for order n.
    Seeds(SeedsArgs),
    /// Species, isotopism classes and symmetry of a catalogue.
    Classify(CatalogueArgs),
    /// Invariants N, I, C, S, P and how many values each takes.
    Invariants(CatalogueArgs),
    /// Squares from known constructions.
    Families(FamiliesArgs),
    /// Union class files and re-screen.
    Merge(MergeArgs),
    /// Canonical digests and automorphism group orders.
    Canon(CanonArgs),
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Order, odd and at least 3.
    #[arg(short = 'n')]
    pub n: usize,
    /// Shard `i/m`: seeds whose index is i modulo m.
    #[arg(long)]
    pub shard: Option<String>,
    /// Resume from and record progress to this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Output directory (default: $P1F_WORKDIR or the current directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Read seeds from a file written by `seeds` instead of generating them.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Seeds searched between checkpoint syncs.
    #[arg(long, default_value_t = enumerate::DEFAULT_BATCH)]
    pub batch: usize,
}

#[derive(Debug, Args)]
pub struct SeedsArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(long)]
    pub shard: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogueArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
}

#[derive(Debug, Args)]
pub struct FamiliesArgs {
    #[command(subcommand)]
    pub family: Family,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// The square L_p built from the factorisation GA_2p.
    Ga {
        #[arg(long)]
        p: usize,
        /// Check perfection, ν and the short row cycle.
        #[arg(long)]
        verify: bool,
    },
    /// (Bordered) diagonally cyclic square from its first row, e.g.
    /// `0,10,4,8,7,6,1,3,5,2,9` or `0,2,inf,1`.
    Bdcls {
        #[arg(long = "first-row")]
        first_row: String,
    },
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Merged classes file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CanonArgs {
    pub file: PathBuf,
    /// p1f, p1f-direct, ls-isotopy, ls-species or ls-rows-ordered.
    #[arg(long, default_value = "p1f", value_parser = parse_mode)]
    pub mode: ColourMode,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
}

fn parse_mode(s: &str) -> Result<ColourMode, String> {
    ColourMode::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ColourMode::ALL.iter().map(|m| m.name()).collect();
        format!("unknown mode {s:?}; expected one of {}", names.join(", "))
    })
}

fn work_dir(out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| std::env::var_os("P1F_WORKDIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn shard_arg(s: Option<&str>) -> CliResult<(usize, usize)> {
    s.map_or(Ok((0, 1)), enumerate::parse_shard)
}

fn write_out(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let human = cli.human;
    let mut text = String::new();
    match cli.command {
        Command::Enumerate(a) => {
            let opts = enumerate::EnumerateOptions {
                n: a.n,
                shard: shard_arg(a.shard.as_deref())?,
                checkpoint: a.checkpoint,
                out_dir: work_dir(a.out),
                seeds_file: a.seeds,
                human,
                batch: a.batch,
            };
            let r = enumerate::run_enumerate(&opts)?;
            text.push_str(&r.summary);
            if human {
                eprintln!("wrote {} in {:.1}s", r.classes_path.display(), r.manifest.wall_seconds);
            }
        }
        Command::Seeds(a) => {
            let (i, m) = shard_arg(a.shard.as_deref())?;
            let set = p1f_core::seeds::gen_seeds(a.n)?.shard(i, m)?;
            let dir = work_dir(a.out);
            let name = if m == 1 {
                format!("seeds-n{}.txt", a.n)
            } else {
                format!("seeds-n{}-s{i}of{m}.txt", a.n)
            };
            write_out(&dir.join(name), &set.to_text())?;
            text.push_str(&format!("seeds={}\n", set.len()));
        }
        Command::Classify(a) => {
            let cat = formats::load_catalogue(&a.file, a.format)?;
            let squares = cat.squares().map_err(|e| CliError::parse(&a.file, e))?;
            text = analysis::classify_report(&analysis::classify(&squares));
        }
        Command::Invariants(a) => {
            let cat = formats::load_catalogue(&a.file, a.format)?;
            let rows = analysis::invariant_rows(&cat)?;
            let d = analysis::discrimination(&cat, &rows)?;
            text = analysis::invariants_report(&rows, &d);
        }
        Command::Families(f) => match f.family {
            Family::Ga { p, verify } => {
                let l = l_p_square(p)?;
                text.push_str(&l.to_string());
                if verify {
                    let r = verify_ga_theorem(p)?;
                    text.push_str(&format!(
                        "# perfect={} nu={} expected_nu={} explicit_form={} short_row_cycle={} holds={}\n",
                        r.perfect,
                        r.nu,
                        r.expected_nu,
                        r.explicit_form_matches,
                        r.short_row_cycle.map_or("n/a".to_string(), |b| b.to_string()),
                        r.holds()
                    ));
                    if !r.holds() {
                        out.write_all(text.as_bytes()).ok();
                        return Err(CliError::Internal(format!("construction check failed for p={p}")));
                    }
                }
            }
            Family::Bdcls { first_row } => {
                let (row, set) = parse_first_row(&first_row)?;
                let l = bdcls_from_first_row(&row, set)?;
                text.push_str(&l.to_string());
                text.push_str(&format!(
                    "# nu={} symmetric={} autotopisms={} autoparatopisms={}\n",
                    l.nu(),
                    l.is_symmetric(),
                    l.autotopism_group_order(),
                    l.autoparatopism_group_order()
                ));
            }
        },
        Command::Merge(a) => {
            let inputs = a
                .files
                .iter()
                .map(|p| Ok((p.clone(), formats::read_text(p)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let (n, classes) = enumerate::merge_classes(&inputs)?;
            let merged = formats::write_classes(n, &classes);
            match a.out {
                Some(p) => {
                    write_out(&p, &merged)?;
                    text = formats::summary(n, (0, 1), 0, &classes)
                        .lines()
                        .skip(1)
                        .map(|l| format!("{l}\n"))
                        .collect();
                }
                None => text = merged,
            }
        }
        Command::Canon(a) => {
            let cat = formats::load_catalogue(&a.file, a.format)?;
            text = analysis::canon_report(&cat, a.mode)?;
        }
    }
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))
}

/// Parses `args` and runs the command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            let _ = writeln!(err, "error: usage: --threads must be positive");
            return 1;
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(cli, out)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal assertion failed");
            3
        }
    }
}
