//! Command-line front end: solving, oracles, codings, decomposition,
//! family generators and the acceptance-style suites.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dpcolor::coding::compute_coding;
use dpcolor::cover::Colouring;
use dpcolor::graph::connectivity;
use dpcolor::io::{
    cover_dot, decomposition_dot, emit_colouring, emit_graph, graph_dot,
    parse_cover_file, CoverFile,
};
use dpcolor::oracle::{solve_exhaustive, OracleError, DEFAULT_BUDGET};
use dpcolor::outerplanar::recognize;
use dpcolor::solver::{solve, SolveError};
use dpcolor::structure::{
    decompose, family_members_up_to, gen_family, known_subdividable_sets, Decomposition, FamilyId,
    SporadicName, ALL_SPORADICS,
};
use dpcolor::suite::{degree_dp_check, reduction_check, run_suite, RunConfig};

#[derive(Parser)]
#[command(name = "dpcolor", about = "DP-colouring machinery for K_{2,4}-minor-free graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Colour a simple truncated-degree cover constructively.
    Solve {
        cover_file: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Print the solve trace (case, gadgets, closing tier).
        #[arg(long)]
        trace: bool,
    },
    /// Brute-force colouring; prints COLOURING / NONE / BUDGET.
    Oracle {
        cover_file: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Compute the coding of a broken two-terminal gadget cover.
    Coding {
        cover_file: String,
        /// Replay the extension of a terminal pair: two list indices.
        #[arg(long, num_args = 2)]
        replay: Option<Vec<usize>>,
        /// `dot` renders the cover's link diagram instead.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the structural decomposition of a 2-connected graph.
    Decompose {
        graph_file: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List or emit the labelled 3-connected family members.
    Families {
        #[arg(long)]
        list: bool,
        /// Family id, e.g. W5, G7,2,3+, K5-, A+, D.
        #[arg(long)]
        emit: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a colouring file against a cover file.
    Verify {
        cover_file: String,
        colouring_file: String,
    },
    /// Enumeration suites over all small graphs.
    Atlas {
        #[arg(long)]
        n: usize,
        /// count | degree-dp | reduction
        #[arg(long, default_value = "count")]
        check: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Acceptance suites: theorem-main, coding, families, subdividable,
    /// tightness.
    Suite {
        name: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for materialized failing instances.
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// The non-blocking tightness search (alias for `suite tightness`).
    TightnessSearch {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for a materialized witness, if one is found.
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
}

const EXIT_PRECONDITION: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn read_cover_file(path: &str) -> Result<CoverFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path, e))?;
    parse_cover_file(&text).map_err(|e| format!("{}: {}", path, e))
}

fn parse_family_id(s: &str) -> Option<FamilyId> {
    let sporadic = |name: SporadicName| Some(FamilyId::Sporadic(name));
    match s {
        "K5" => return sporadic(SporadicName::K5),
        "K5-" => return sporadic(SporadicName::K5Minus),
        "K33" => return sporadic(SporadicName::K33),
        "K3xK2" => return sporadic(SporadicName::K3BoxK2),
        "A" => return sporadic(SporadicName::A),
        "A+" => return sporadic(SporadicName::APlus),
        "B" => return sporadic(SporadicName::B),
        "B+" => return sporadic(SporadicName::BPlus),
        "C" => return sporadic(SporadicName::C),
        "C+" => return sporadic(SporadicName::CPlus),
        "D" => return sporadic(SporadicName::D),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix('W') {
        return rest.parse().ok().map(FamilyId::Wheel);
    }
    if let Some(rest) = s.strip_prefix('G') {
        let (rest, plus) = match rest.strip_suffix('+') {
            Some(r) => (r, true),
            None => (rest, false),
        };
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 3 {
            let n = parts[0].parse().ok()?;
            let r = parts[1].parse().ok()?;
            let s_ = parts[2].parse().ok()?;
            return Some(FamilyId::Gnrs { n, r, s: s_, plus });
        }
    }
    None
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve {
            cover_file,
            budget,
            trace,
        } => {
            let file = read_cover_file(&cover_file)?;
            let cover = file.cover.ok_or("cover file has no lists")?;
            match solve(&file.graph, &cover, budget) {
                Ok(out) => {
                    print!("{}", emit_colouring(&out.colouring));
                    if trace {
                        println!(
                            "# case={} gadgets={} method={} oracle-states={}",
                            out.trace.case,
                            out.trace.gadgets.len(),
                            out.trace.method,
                            out.trace.oracle_states
                        );
                        for g in &out.trace.gadgets {
                            println!(
                                "# gadget x={} y={} links={} chosen=({},{})",
                                g.x,
                                g.y,
                                g.coding.links.len(),
                                g.chosen.0,
                                g.chosen.1
                            );
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(SolveError::PreconditionViolated(m)) => {
                    eprintln!("precondition violated: {}", m);
                    Ok(ExitCode::from(EXIT_PRECONDITION))
                }
                Err(SolveError::OracleBudget) => {
                    eprintln!("budget exhausted");
                    Ok(ExitCode::from(EXIT_BUDGET))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Oracle { cover_file, budget } => {
            let file = read_cover_file(&cover_file)?;
            let cover = file.cover.ok_or("cover file has no lists")?;
            match solve_exhaustive(&cover, budget) {
                Ok(Some(phi)) => {
                    let cols: Vec<String> = phi.0.iter().map(|i| i.to_string()).collect();
                    println!("COLOURING {}", cols.join(" "));
                    Ok(ExitCode::SUCCESS)
                }
                Ok(None) => {
                    println!("NONE");
                    Ok(ExitCode::SUCCESS)
                }
                Err(OracleError::Budget) => {
                    println!("BUDGET");
                    Ok(ExitCode::from(EXIT_BUDGET))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Coding {
            cover_file,
            replay,
            format,
        } => {
            let file = read_cover_file(&cover_file)?;
            let cover = file.cover.ok_or("cover file has no lists")?;
            if format == Format::Dot {
                print!("{}", cover_dot(&cover));
                return Ok(ExitCode::SUCCESS);
            }
            let (x, y) = file.terminals.ok_or("coding needs a terminals line")?;
            let tt = recognize(&file.graph, x, y)
                .ok_or("graph is not two-terminal outerplanar for these terminals")?;
            if !tt.broken {
                return Err("the gadget must be broken (no xy edge)".into());
            }
            let (coding, stack) =
                compute_coding(&tt, &cover).map_err(|e| e.to_string())?;
            println!(
                "coding x={} y={} lambda=({},{})",
                coding.x, coding.y, coding.lambda_x, coding.lambda_y
            );
            for (a, b) in &coding.links {
                println!("link {} {}", a, b);
            }
            if let Some(pair) = replay {
                let (a, b) = (pair[0], pair[1]);
                if coding.has_link(a, b) {
                    println!("BLOCKED");
                } else {
                    match stack.extend_pair(a, b) {
                        Ok(phi) => print!("{}", emit_colouring(&phi)),
                        Err(_) => println!("BLOCKED"),
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { graph_file, format } => {
            let file = read_cover_file(&graph_file)?;
            let g = file.graph;
            if connectivity(&g) < 2 {
                eprintln!("precondition violated: graph is not 2-connected");
                return Ok(ExitCode::from(EXIT_PRECONDITION));
            }
            match decompose(&g) {
                None => {
                    println!("NONE (the graph has a K_{{2,4}} minor)");
                    Ok(ExitCode::SUCCESS)
                }
                Some(d) => {
                    if format == Format::Dot {
                        print!("{}", decomposition_dot(&g, &d));
                        return Ok(ExitCode::SUCCESS);
                    }
                    match &d {
                        Decomposition::Outerplanar { x, y, gadget } => {
                            println!("outerplanar split at ({}, {})", x, y);
                            println!(
                                "  broken gadget: {} vertices, outer path {:?}",
                                gadget.tt.graph.n(),
                                gadget.tt.outer_path
                            );
                        }
                        Decomposition::ThreeGadget { x, y, parts, has_xy } => {
                            println!(
                                "three broken gadgets at ({}, {}){}",
                                x,
                                y,
                                if *has_xy { " plus the xy edge" } else { "" }
                            );
                            for (i, p) in parts.iter().enumerate() {
                                println!(
                                    "  part {}: vertices {:?}",
                                    i, p.to_global
                                );
                            }
                        }
                        Decomposition::CoreGadgets {
                            family,
                            core_to_global,
                            subdivided,
                            ..
                        } => {
                            println!("core {} on vertices {:?}", family, core_to_global);
                            for (e, gadget) in subdivided {
                                println!(
                                    "  gadget on core edge {}-{}: vertices {:?}{}",
                                    core_to_global[e.u],
                                    core_to_global[e.v],
                                    gadget.to_global,
                                    if gadget.tt.broken { "" } else { " (keeps its edge)" }
                                );
                            }
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Families { list, emit, format } => {
            if list {
                use std::io::Write;
                let stdout = std::io::stdout();
                let mut out = stdout.lock();
                for id in family_members_up_to(8) {
                    let g = gen_family(id).unwrap();
                    if writeln!(out, "{}\tn={}\tm={}", id, g.n(), g.edge_count()).is_err() {
                        break; // downstream closed the pipe
                    }
                }
                let _ = ALL_SPORADICS;
                return Ok(ExitCode::SUCCESS);
            }
            let spec = emit.ok_or("use --list or --emit <id>")?;
            let id = parse_family_id(&spec).ok_or("unknown family id")?;
            let g = gen_family(id).map_err(|e| e.to_string())?;
            match format {
                Format::Text => {
                    print!("{}", emit_graph(&g));
                    for set in known_subdividable_sets(id).map_err(|e| e.to_string())? {
                        let parts: Vec<String> =
                            set.iter().map(|e| format!("{}-{}", e.u, e.v)).collect();
                        println!("# maximal subdividable: {}", parts.join(" "));
                    }
                }
                Format::Dot => print!("{}", graph_dot(&g)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            cover_file,
            colouring_file,
        } => {
            let file = read_cover_file(&cover_file)?;
            let cover = file.cover.ok_or("cover file has no lists")?;
            let ctext = std::fs::read_to_string(&colouring_file)
                .map_err(|e| format!("{}: {}", colouring_file, e))?;
            let cfile = parse_cover_file(&format!("graph {}\n{}", cover.graph.n(), ctext))
                .map_err(|e| e.to_string())?;
            let phi: Colouring = cfile.colouring.ok_or("no colouring block")?;
            if cover.check_colouring(&phi) {
                println!("VALID");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("INVALID");
                Ok(ExitCode::from(EXIT_PRECONDITION))
            }
        }
        Command::Atlas {
            n,
            check,
            seed,
            budget,
            jobs,
        } => {
            let cfg = RunConfig {
                seed,
                budget,
                max_n: n,
                jobs,
                output: None,
            };
            match check.as_str() {
                "count" => {
                    use dpcolor::atlas::{enumerate_graphs, EnumFilters};
                    let all = enumerate_graphs(n, EnumFilters::default())
                        .map_err(|e| e.to_string())?;
                    let two = enumerate_graphs(
                        n,
                        EnumFilters {
                            min_connectivity: 2,
                            ..Default::default()
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    let free = enumerate_graphs(
                        n,
                        EnumFilters {
                            min_connectivity: 2,
                            k24_minor_free: true,
                            ..Default::default()
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    println!(
                        "n={}: connected={} two-connected={} two-connected-K24-free={}",
                        n,
                        all.len(),
                        two.len(),
                        free.len()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                "degree-dp" => {
                    let report = degree_dp_check(n, 200, &cfg);
                    print!("{}", report.render());
                    Ok(if report.ok() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_PRECONDITION)
                    })
                }
                "reduction" => {
                    let report = reduction_check(500, &cfg);
                    print!("{}", report.render());
                    Ok(if report.ok() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_PRECONDITION)
                    })
                }
                other => Err(format!("unknown atlas check `{}`", other)),
            }
        }
        Command::Suite {
            name,
            seed,
            budget,
            max_n,
            jobs,
            output,
        } => run_named_suite(&name, seed, budget, max_n, jobs, output),
        Command::TightnessSearch {
            seed,
            budget,
            max_n,
            jobs,
            output,
        } => run_named_suite("tightness", seed, budget, max_n, jobs, output),
    }
}

fn run_named_suite(
    name: &str,
    seed: u64,
    budget: u64,
    max_n: usize,
    jobs: usize,
    output: Option<std::path::PathBuf>,
) -> Result<ExitCode, String> {
    let cfg = RunConfig {
        seed,
        budget,
        max_n,
        jobs,
        output,
    };
    let report = run_suite(name, &cfg).ok_or_else(|| format!("unknown suite `{}`", name))?;
    print!("{}", report.render());
    Ok(if report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_PRECONDITION)
    })
}
