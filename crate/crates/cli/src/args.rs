use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monge_hjb::operator::ClipMode;

#[derive(Parser, Debug)]
#[command(
    name = "monge-hjb",
    version,
    about = "Wide-stencil Monge-Ampere solver on triangle meshes"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads for assembly and study sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Flat `key = value` file with defaults for the long flags of the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List domain families and catalog experiments.
    Domains,
    /// Mesh a domain and write the mesh file.
    Mesh(MeshArgs),
    /// Solve one problem and write the nodal solution.
    Solve(SolveArgs),
    /// Run a convergence study and write CSV.
    Study(StudyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    /// Domain family, e.g. lshape, heart, bent-square-concave.
    #[arg(long)]
    pub domain: Option<String>,
    /// Circle-centre distance for the bent-square families.
    #[arg(long)]
    pub c: Option<f64>,
    /// Coarse mesh size, also the sampling step of curved boundaries.
    #[arg(long)]
    pub h0: Option<f64>,
}

#[derive(Args, Debug)]
pub struct MeshArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Read the domain polygon from this file instead of `--domain`.
    #[arg(long)]
    pub polygon: Option<PathBuf>,
    /// Number of uniform refinements.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    /// Mesh output file (stdout summary only when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the domain polygon to this file.
    #[arg(long)]
    pub polygon_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Directions in the angle discretisation.
    #[arg(long)]
    pub ntheta: Option<usize>,
    /// Newton stopping tolerance on the step's infinity norm.
    #[arg(long, default_value_t = 5e-8)]
    pub step_tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = Clip::Asymmetric)]
    pub clip: Clip,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Catalog experiment supplying domain and data.
    #[arg(long)]
    pub experiment: Option<String>,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Constant right-hand side for a custom problem.
    #[arg(long, conflicts_with = "experiment")]
    pub f_const: Option<f64>,
    /// Affine boundary data `a,b,c` meaning `a x1 + b x2 + c` for a custom problem.
    #[arg(long, conflicts_with = "experiment")]
    pub g_affine: Option<String>,
    /// Read the mesh from this file instead of generating one.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Number of uniform refinements of the generated mesh.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    /// Stencil multiplier: nominal arm length is m times the mean edge length.
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = StartArg::Frozen)]
    pub start: StartArg,
    /// Solution output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[arg(long)]
    pub experiment: String,
    /// Refinement levels: `0..3` (inclusive), `0..=3`, or a list `0,2,3`.
    #[arg(long)]
    pub levels: Option<String>,
    /// Comma-separated multipliers.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub h0: Option<f64>,
    /// Restrict a multi-domain experiment to one domain, e.g. `square`.
    #[arg(long)]
    pub domain: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Fill the wall_time_s column (makes the output run-dependent).
    #[arg(long)]
    pub timings: bool,
    /// CSV output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clip {
    Asymmetric,
    Symmetric,
}

impl From<Clip> for ClipMode {
    fn from(c: Clip) -> Self {
        match c {
            Clip::Asymmetric => ClipMode::Asymmetric,
            Clip::Symmetric => ClipMode::Symmetric,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartArg {
    /// Frozen-control linear solve.
    Frozen,
    /// Boundary data with zero interior.
    Zero,
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| format!("invalid number `{}` in `{s}`", t.trim()))
        })
        .collect()
}

/// Parses `0..3` (inclusive), `0..=3` or `0,1,3`.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid level list `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("0..3").unwrap(), [0, 1, 2, 3]);
        assert_eq!(parse_levels("1..=2").unwrap(), [1, 2]);
        assert_eq!(parse_levels("0, 2,3").unwrap(), [0, 2, 3]);
        assert!(parse_levels("3..1").is_err());
        assert!(parse_levels("a").is_err());
    }

    #[test]
    fn number_lists() {
        assert_eq!(parse_list("2, 4,8").unwrap(), [2.0, 4.0, 8.0]);
        assert!(parse_list("2,,4").is_err());
    }

    #[test]
    fn later_flags_win() {
        let cli = Cli::try_parse_from(["monge-hjb", "solve", "--m", "2", "--m", "4"]).unwrap();
        match cli.command {
            Command::Solve(s) => assert_eq!(s.m, 4.0),
            _ => unreachable!(),
        }
    }
}
