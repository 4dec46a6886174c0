use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qsw", version, about = "Bayesian games with quantum and no-signaling advice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write data output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Either a game file or the `(zeta, eta)` family member.
#[derive(Debug, Args)]
pub struct GameSource {
    #[arg(long, value_name = "PATH", conflicts_with_all = ["zeta", "eta"])]
    pub game: Option<PathBuf>,
    #[arg(long, requires = "eta")]
    pub zeta: Option<f64>,
    #[arg(long, requires = "zeta")]
    pub eta: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected payoffs of pure profiles, a behavioral strategy, correlated
    /// advice, or box advice.
    Eval {
        #[command(flatten)]
        source: GameSource,
        /// Behavioral strategy JSON: {"alice": [[..]], "bob": [[..]]}.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["advice", "box_path"])]
        strategy: Option<PathBuf>,
        /// Correlated advice JSON: [{"profile": .., "p": ..}, ..].
        #[arg(long, value_name = "PATH", conflicts_with = "box_path")]
        advice: Option<PathBuf>,
        /// No-signaling box fed with the players' types.
        #[arg(long = "box", value_name = "PATH")]
        box_path: Option<PathBuf>,
    },
    /// Pure Nash equilibria in enumeration order.
    Equilibria {
        #[command(flatten)]
        source: GameSource,
        /// Report the fully mixed equilibrium of a 2x2 game instead.
        #[arg(long)]
        mixed: bool,
    },
    /// Obedience check for correlated advice.
    CeCheck {
        #[command(flatten)]
        source: GameSource,
        #[arg(long, value_name = "PATH")]
        advice: PathBuf,
    },
    /// No-signaling box tools.
    Box {
        #[command(subcommand)]
        action: BoxAction,
    },
    /// Two-qubit strategies.
    Quantum {
        #[command(subcommand)]
        action: QuantumAction,
    },
    /// Incentives of the optimal quantum strategy over a Schmidt-angle range.
    Scan {
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        to: f64,
    },
    /// Schmidt angle where Bob's incentive turns positive.
    Theta0 {
        #[arg(long)]
        eta: f64,
    },
    /// Threshold angle over log-spaced eta.
    Fig2 {
        #[arg(long, default_value_t = 16.0)]
        from: f64,
        #[arg(long, default_value_t = 5000.0)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Run the built-in invariant suites.
    Verify {
        #[arg(long, value_enum)]
        group: Option<Group>,
        /// Directory holding bos.json and chicken.json; the bundled copies
        /// are used otherwise.
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoxAction {
    /// Check a box file and print its canonical parameters and table.
    Validate {
        #[arg(value_name = "PATH")]
        path: PathBuf,
    },
    /// CHSH value, and the tilted value if `--zeta` is given.
    Chsh {
        #[arg(value_name = "PATH")]
        path: PathBuf,
        #[arg(long)]
        zeta: Option<f64>,
        /// Positive affine transform `k1 * value + k2` of the tilted value.
        #[arg(long, num_args = 2, value_names = ["K1", "K2"], requires = "zeta")]
        affine: Option<Vec<f64>>,
    },
    /// Local-polytope membership with decomposition weights.
    Local {
        #[arg(value_name = "PATH")]
        path: PathBuf,
    },
    /// The 16 local and 8 PR vertices.
    Vertices,
    /// A random mixture of the vertices.
    Random,
}

#[derive(Debug, Subcommand)]
pub enum QuantumAction {
    /// Box produced by a strategy file.
    Born {
        #[arg(value_name = "PATH")]
        path: PathBuf,
    },
    /// Optimal tilted strategy for a Schmidt angle or tilt.
    Optimal {
        #[arg(long, conflicts_with = "zeta", required_unless_present = "zeta")]
        theta: Option<f64>,
        #[arg(long)]
        zeta: Option<f64>,
    },
    /// Quantum maximum of the tilted expression.
    Max {
        #[arg(long)]
        zeta: f64,
        /// Also run the grid-search oracle.
        #[arg(long)]
        search: bool,
        /// Coarse grid spacing for the search.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Group {
    GameCore,
    NsBox,
    Quantum,
    Swgame,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::GameCore, Group::NsBox, Group::Quantum, Group::Swgame];

    pub fn name(self) -> &'static str {
        match self {
            Group::GameCore => "game_core",
            Group::NsBox => "ns_box",
            Group::Quantum => "quantum",
            Group::Swgame => "swgame",
        }
    }
}
