mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "uext", version, about = "Ultrafilter extensions, modal and first-order checks over small structures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Append wall-clock time to the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on |frame| * |variables| for valuation enumeration.
    #[arg(long, global = true, default_value_t = uext_core::modal::DEFAULT_MAX_VAL_BITS)]
    pub max_val_bits: usize,
    /// Cap on the node count of frames given to exponential procedures.
    #[arg(long, global = true, default_value_t = uext_core::ultrafilter::MAX_UNIVERSE)]
    pub max_frame_size: usize,
    /// Write output here instead of stdout (file content for fmt/expand/extend).
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reprint a .frame or .abp file in canonical form.
    Fmt { file: PathBuf },
    /// Check a presentation (or frame) for well-formedness.
    Validate { file: PathBuf },
    /// Materialize a presentation as a finite frame.
    Expand {
        file: PathBuf,
        /// Copies per infinite block, and the cap for finite ones.
        #[arg(short, long, default_value_t = 2)]
        k: u64,
        /// Concrete copies per nonprincipal block.
        #[arg(long)]
        bundles: Option<u64>,
    },
    /// Presentation of the ultrafilter extension.
    Extend { file: PathBuf },
    /// Build the ultrafilter extension of a finite frame and test it against the frame.
    UeCheck { file: PathBuf },
    /// Shortest road between two nodes.
    Roads {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// r (whole relation), s (edges away from hubs) or p (edges touching hubs).
        #[arg(long, default_value = "r")]
        relation: String,
    },
    /// Push a set along a road of principal ultrafilters.
    Delta {
        file: PathBuf,
        /// Like `a -> b <- c`.
        #[arg(long)]
        road: String,
        /// Comma-separated node names; must contain the road's first node.
        #[arg(long)]
        set: String,
    },
    /// Extract and canonicalize a neighborhood.
    Nbhd(NbhdArgs),
    /// Emit chi for a neighborhood and evaluate it at its root.
    Chi {
        #[command(flatten)]
        nb: NbhdArgs,
        #[arg(long, default_value_t = uext_core::neighborhood::DEFAULT_CHI_MAX_NODES)]
        max_nodes: usize,
    },
    /// Modal model checking and validity.
    #[command(subcommand)]
    Modal(ModalCommand),
    /// Pointwise validity of Alt_n | phi over a presentation.
    Criterion {
        file: PathBuf,
        #[arg(long)]
        alt: usize,
        /// Also report membership in family K.
        #[arg(long)]
        family_k: bool,
    },
    /// A finite countermodel to Alt_n | phi at a hub.
    Counterexample {
        file: PathBuf,
        #[arg(long)]
        hub: String,
        #[arg(long)]
        alt: usize,
        #[arg(short, long, default_value_t = 3)]
        k: u64,
    },
    /// Largest bisimulation between two models.
    Bisim {
        left: PathBuf,
        right: PathBuf,
        /// Valuation of the left model, like `p=a,b;q=c`.
        #[arg(long, default_value = "")]
        val_left: String,
        #[arg(long, default_value = "")]
        val_right: String,
        /// Ask about one pair `x,y` instead of totality.
        #[arg(long)]
        pair: Option<String>,
    },
    /// First-order evaluation, translation and EF games.
    #[command(subcommand)]
    Fo(FoCommand),
    /// Symbolic counts for a presentation.
    Counts {
        file: PathBuf,
        /// Truncation used to enumerate neighborhood types.
        #[arg(short, long, default_value_t = 2)]
        k: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct NbhdArgs {
    /// A .frame file, or an .abp file expanded with --k.
    pub file: PathBuf,
    #[arg(long)]
    pub node: String,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(short, long, default_value_t = 3)]
    pub k: u64,
}

#[derive(Subcommand, Debug)]
pub enum ModalCommand {
    /// Truth at a node under a valuation.
    Check {
        file: PathBuf,
        formula: String,
        #[arg(long)]
        node: String,
        /// Like `p=a,b;q=c`.
        #[arg(long, default_value = "")]
        val: String,
    },
    /// Frame validity by valuation enumeration.
    Valid { file: PathBuf, formula: String },
    /// Print Alt_n, or decide its validity on a frame.
    Alt { n: usize, file: Option<PathBuf> },
    /// Print phi, or compare its local validity with (**) on a frame.
    Phi { file: Option<PathBuf> },
}

#[derive(Subcommand, Debug)]
pub enum FoCommand {
    /// Truth of a formula in a frame.
    Eval {
        file: PathBuf,
        formula: String,
        /// Like `x=a,y=b`.
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Sharp translation of a first-order formula, or the standard translation of a modal one.
    Translate {
        formula: String,
        #[arg(long)]
        modal: bool,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Ehrenfeucht-Fraisse equivalence.
    Ef {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = uext_core::fo::DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global.clone();
    if let Some(t) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("uext: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let mut report = match commands::run(&cli.command, &g) {
        Ok(r) => r,
        Err(f) => Report::failure(f),
    };
    report.command = std::env::args().skip(1).collect();
    if g.timing {
        report.elapsed = Some(start.elapsed());
    }
    let code = report.verdict.exit_code();
    let emit = |include_payload: bool| if g.json { report.to_json(include_payload) } else { report.to_text(include_payload) };
    match &g.output {
        Some(path) => {
            let (file_text, stdout_text) = match &report.payload {
                Some(p) if !g.json => (p.clone(), Some(emit(false))),
                _ => (emit(true), None),
            };
            if let Err(e) = std::fs::write(path, file_text) {
                eprintln!("uext: {}: {e}", path.display());
                return ExitCode::from(2);
            }
            if let Some(t) = stdout_text {
                print!("{t}");
            }
        }
        None => print!("{}", emit(true)),
    }
    ExitCode::from(code as u8)
}
