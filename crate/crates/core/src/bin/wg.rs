use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wgfem::cli::cases::{kellogg_case, KELLOGG_BASE_N};
use wgfem::cli::run::{check_finite, compare_with};
use wgfem::cli::{case_spec, emit_csv, parse_case_config, run_case, RunOptions, CASE_IDS};
use wgfem::solver::Method;
use wgfem::{Result, WgError};

#[derive(Parser)]
#[command(name = "wg", version, about = "Weak Galerkin benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a case on its mesh schedule and write error and rate tables.
    Run(RunArgs),
    /// List the built-in cases.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Auto,
    Cg,
    Bicgstab,
    Lu,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareArg {
    Paper,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Built-in case id.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    case: Option<String>,
    /// JSON case description instead of a built-in case.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use only the first LEVELS meshes of the schedule.
    #[arg(long)]
    levels: Option<usize>,
    /// Quadrature order.
    #[arg(long)]
    order: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write each mesh as `<case>_mesh_<level>.txt`.
    #[arg(long)]
    dump_mesh: bool,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Print computed values next to the published ones.
    #[arg(long, value_enum)]
    compare: Option<CompareArg>,
    /// Kellogg case only: extra refinements at the origin of the initial mesh.
    #[arg(long)]
    kellogg_extra: Option<usize>,
}

fn run(args: RunArgs) -> Result<()> {
    let mut case = match (&args.case, &args.config) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            parse_case_config(&text)?
        }
        (Some(id), None) => match (id.as_str(), args.kellogg_extra) {
            ("4", Some(extra)) => kellogg_case(KELLOGG_BASE_N, extra, 5),
            (_, Some(_)) => {
                return Err(WgError::InvalidArgument(
                    "--kellogg-extra applies to case 4 only".into(),
                ))
            }
            _ => case_spec(id)?,
        },
        (None, None) => unreachable!("clap requires --case or --config"),
    };
    if let Some(l) = args.levels {
        if l == 0 {
            return Err(WgError::InvalidArgument(
                "--levels must be at least 1".into(),
            ));
        }
        case.schedule.truncate(l);
    }
    if let Some(q) = args.order {
        case.assembly.quadrature_order = q;
    }
    if let Some(s) = args.solver {
        case.solver.method = match s {
            SolverArg::Auto => Method::Auto,
            SolverArg::Cg => Method::Cg,
            SolverArg::Bicgstab => Method::BiCgStab,
            SolverArg::Lu => Method::Lu,
        };
    }
    if let Some(t) = args.tol {
        case.solver.tol = t;
    }
    std::fs::create_dir_all(&args.out)?;
    let report = run_case(
        &case,
        &RunOptions {
            out_dir: Some(args.out.clone()),
            dump_mesh: args.dump_mesh,
        },
    )?;
    check_finite(&report)?;
    let (errors, rates) = emit_csv(&report, &args.out)?;
    println!("wrote {} and {}", errors.display(), rates.display());
    if args.compare.is_some() {
        match case.reference {
            Some(table) => print!("{}", compare_with(&report, table)?),
            None => log::warn!("no published table for case {}", case.id),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::List => {
            log::set_max_level(log::LevelFilter::Error);
            for id in CASE_IDS {
                if let Ok(c) = case_spec(id) {
                    println!("{id:>3}  {}", c.title);
                }
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
