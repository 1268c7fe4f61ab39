use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gammak0::abelian::{parse_group_spec, FgAbelianGroup, GroupAut, GroupHom};
use gammak0::gamma::{self, Report};
use gammak0::graph::{self, Graph};
use gammak0::intlin::{self, IntMatrix};
use gammak0::ktheory::{self, K0Mode};

#[derive(Parser)]
#[command(
    name = "gammak0",
    version,
    about = "Element graphs of finite abelian groups and exact K-theory of their graph algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the element graph of a group spec and write it as JSON
    Build {
        /// Group spec, e.g. "0", "Z/2 x Z/4", "Z^2"
        spec: String,
        /// Output file for the graph document
        #[arg(short, long)]
        output: PathBuf,
        /// Experimental cutout for infinite groups: free coordinates in [-W, W]
        #[arg(long, value_name = "W")]
        window: Option<u64>,
    },
    /// Compute K0 (invariant factors) and the K1 rank of a graph file
    K0 {
        /// Graph JSON document produced by `build`
        graph: PathBuf,
        /// How declared tail anchors are treated
        #[arg(long, value_enum, default_value_t = Mode::TailEliminated, conflicts_with = "truncate")]
        mode: Mode,
        /// Materialize tail chains of this depth instead of eliminating them
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
        truncate: Option<u32>,
        /// Also print the per-vertex class table (CSV)
        #[arg(long)]
        classes: bool,
    },
    /// Verify the construction on a group spec and report every check
    Verify {
        /// Group spec of a finite group
        spec: String,
        /// Check every automorphism of the group
        #[arg(long, conflicts_with = "aut")]
        all_auts: bool,
        /// Check one automorphism, given as its generator matrix "a,b;c,d"
        #[arg(long, value_name = "MATRIX")]
        aut: Option<String>,
    },
    /// Smith normal form of a matrix file ("rows cols" header, then rows)
    Snf { matrix: PathBuf },
    /// Export a graph file as DOT
    ExportDot {
        graph: PathBuf,
        /// Write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    /// Encode each declared tail as the relation "anchor = 0"
    TailEliminated,
    /// Take the graph literally; declared tails are an error
    Finite,
}

impl From<Mode> for K0Mode {
    fn from(mode: Mode) -> K0Mode {
        match mode {
            Mode::TailEliminated => K0Mode::TailEliminated,
            Mode::Finite => K0Mode::Finite,
        }
    }
}

enum CliError {
    /// Verification ran and some check failed (exit 1).
    ChecksFailed,
    /// Malformed input or a domain precondition violation (exit 2).
    Domain(String),
    /// Filesystem trouble (exit 3).
    Io(String),
}

impl CliError {
    fn domain(e: impl fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    graph::from_json_str(&read_file(path)?).map_err(CliError::domain)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ChecksFailed) => ExitCode::from(1),
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build {
            spec,
            output,
            window,
        } => cmd_build(&spec, &output, window),
        Command::K0 {
            graph,
            mode,
            truncate,
            classes,
        } => cmd_k0(&graph, mode, truncate, classes),
        Command::Verify {
            spec,
            all_auts,
            aut,
        } => cmd_verify(&spec, all_auts, aut.as_deref()),
        Command::Snf { matrix } => cmd_snf(&matrix),
        Command::ExportDot { graph, output } => cmd_export_dot(&graph, output.as_deref()),
    }
}

fn cmd_build(spec: &str, output: &Path, window: Option<u64>) -> Result<(), CliError> {
    let group = parse_group_spec(spec).map_err(CliError::domain)?;
    let graph = match window {
        Some(w) => gamma::build_windowed(&group, w),
        None => gamma::build(&group),
    }
    .map_err(CliError::domain)?;
    let json = graph::to_json_string(&graph).map_err(CliError::domain)?;
    fs::write(output, json + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;
    println!("wrote {}", output.display());
    println!("core vertices: {}", graph.vertex_count());
    println!("edges: {}", graph.edge_count());
    println!("loops: {}", graph.total_loops());
    println!("tail anchors: {}", graph.tail_anchors().len());
    Ok(())
}

fn cmd_k0(path: &Path, mode: Mode, truncate: Option<u32>, classes: bool) -> Result<(), CliError> {
    let g = read_graph(path)?;
    let k = match truncate {
        Some(depth) => {
            let truncated = ktheory::truncate_tails(&g, depth).map_err(CliError::domain)?;
            ktheory::k0(&truncated, K0Mode::Finite)
        }
        None => ktheory::k0(&g, mode.into()),
    }
    .map_err(CliError::domain)?;
    println!("K0: {}", k.group());
    println!("K1 rank: {}", k.k1_rank());
    if classes {
        print!("{}", ktheory::class_table_csv(&k));
    }
    Ok(())
}

fn cmd_verify(spec: &str, all_auts: bool, aut: Option<&str>) -> Result<(), CliError> {
    let group = parse_group_spec(spec).map_err(CliError::domain)?;
    let graph = gamma::build(&group).map_err(CliError::domain)?;
    let k = ktheory::k0(&graph, K0Mode::TailEliminated).map_err(CliError::domain)?;

    let mut report = Report::new();
    report.merge(gamma::realization_report(&group, &graph, &k));
    report.merge(gamma::relations_report(&graph, &k));

    let auts: Vec<GroupAut> = if all_auts {
        group.enumerate_automorphisms().map_err(CliError::domain)?
    } else if let Some(matrix_text) = aut {
        vec![parse_aut(&group, matrix_text)?]
    } else {
        Vec::new()
    };
    for phi in &auts {
        report.merge(gamma::lifting_report(&graph, &k, phi));
    }

    // functor laws over all pairs when that stays small, otherwise a
    // deterministic prefix
    let pairs: Vec<(GroupAut, GroupAut)> = auts
        .iter()
        .flat_map(|a| auts.iter().map(move |b| (a.clone(), b.clone())))
        .take(100)
        .collect();
    report.merge(gamma::verify_functor_laws(&group, &pairs).map_err(CliError::domain)?);

    if all_auts && !auts.is_empty() {
        let matrices: std::collections::BTreeSet<String> =
            auts.iter().map(|a| a.hom().brief()).collect();
        report.check_eq(
            "lifting.induced_maps_distinct",
            format!("{} distinct", auts.len()),
            format!("{} distinct", matrices.len()),
        );
    }

    print!("{report}");
    let (passed, total) = (
        report.entries().iter().filter(|e| e.passed).count(),
        report.entries().len(),
    );
    println!("{passed}/{total} checks passed");
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

fn parse_aut(group: &FgAbelianGroup, text: &str) -> Result<GroupAut, CliError> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|entry| {
                    entry
                        .trim()
                        .parse::<i64>()
                        .map_err(|_| CliError::Domain(format!("bad matrix entry {entry:?}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let matrix = IntMatrix::from_i64_rows(&rows);
    let hom = GroupHom::new(group.clone(), group.clone(), matrix)
        .map_err(|e| CliError::Domain(format!("--aut rejected: {e}")))?;
    GroupAut::new(hom).map_err(|e| CliError::Domain(format!("--aut rejected: {e}")))
}

fn cmd_snf(path: &Path) -> Result<(), CliError> {
    let matrix = IntMatrix::parse_text(&read_file(path)?).map_err(CliError::domain)?;
    let snf = intlin::smith_normal_form(&matrix);
    let diagonal: Vec<String> = snf.diagonal.iter().map(|d| d.to_string()).collect();
    println!("diagonal: {}", diagonal.join(" "));
    println!("U:");
    print!("{}", snf.u.to_text());
    println!("V:");
    print!("{}", snf.v.to_text());
    Ok(())
}

fn cmd_export_dot(path: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let g = read_graph(path)?;
    let dot = graph::to_dot(&g);
    match output {
        Some(out) => {
            fs::write(out, dot).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?
        }
        None => print!("{dot}"),
    }
    Ok(())
}
