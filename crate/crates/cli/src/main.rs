mod reproduce;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sierpack::certify::{lower_bound_sequence, Recurrence};
use sierpack::{
    certify_generalized_tiling, certify_triangle_tiling, chi_rho, gen_generalized, gen_sierpinski,
    gen_triangle, is_packing_k_colorable, search_certified_coloring, verify_packing_coloring,
    BaseGraph, CertMode, CertStatus, ColorConstraints, Coloring, Decision, Error, Family, Graph,
    SearchConfig, SolveStatus,
};

const EXIT_FAIL: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sierpack",
    version,
    about = "Packing colorings of Sierpinski-type graphs"
)]
struct Cli {
    /// Time budget in seconds for exact solving.
    #[arg(long, global = true, default_value_t = 600)]
    timeout: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress human-readable output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Sierpinski,
    Generalized,
    Triangle,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockFamily {
    Generalized,
    Triangle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Conservative,
    Refined,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Profile {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph in the text format.
    Gen {
        #[arg(long, value_enum)]
        family: GenFamily,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Check a coloring file against a graph file.
    Verify { graph: PathBuf, coloring: PathBuf },
    /// Compute the packing chromatic number.
    Chi {
        graph: PathBuf,
        /// Write the witness coloring here.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Decide whether a packing coloring with colors 1..=K exists.
    Decide {
        graph: PathBuf,
        k: u32,
        /// LABEL=C1,C2,... colors the vertex may not take.
        #[arg(long)]
        forbid: Vec<String>,
        /// LABEL=C color the vertex must take.
        #[arg(long)]
        require: Vec<String>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Check that a block coloring tiles every higher dimension.
    Certify {
        #[arg(long, value_enum)]
        family: BlockFamily,
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "refined")]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        coloring: PathBuf,
    },
    /// Print the lower-bound sequence for S^n_k.
    Bounds {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        literal_recurrence: bool,
    },
    /// Search for a certified block coloring.
    Search {
        #[arg(long, value_enum)]
        family: BlockFamily,
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        max_color: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        iters: Option<u64>,
        #[arg(long, default_value_t = 1)]
        restarts: u32,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Run the whole check suite and print a pass/fail table.
    Reproduce {
        #[arg(long, value_enum, default_value = "quick")]
        profile: Profile,
        /// Read data files from this directory instead of the built-in copies.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Write the JSON manifest here.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

struct Ctx {
    timeout: Duration,
    quiet: bool,
    json: bool,
}

impl Ctx {
    fn say(&self, text: &str) {
        if !self.quiet && !self.json {
            println!("{text}");
        }
    }

    fn emit(&self, value: serde_json::Value) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(Error::Io)
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(Error::Io)
}

fn library_base(base: Option<&str>) -> Result<BaseGraph, Error> {
    BaseGraph::library(base.ok_or_else(|| Error::UnknownName("missing --base".into()))?)
}

fn block_family(family: BlockFamily, base: Option<&str>) -> Result<Family, Error> {
    Ok(match family {
        BlockFamily::Triangle => Family::Triangle,
        BlockFamily::Generalized => Family::Generalized(library_base(base)?),
    })
}

fn parse_constraints(forbid: &[String], require: &[String]) -> Result<ColorConstraints, String> {
    let mut cons = ColorConstraints::none();
    for f in forbid {
        let (label, colors) = f
            .split_once('=')
            .ok_or(format!("expected LABEL=COLORS, got `{f}`"))?;
        let colors: Vec<u32> = colors
            .split(',')
            .map(|c| c.trim().parse().map_err(|_| format!("bad color in `{f}`")))
            .collect::<Result<_, _>>()?;
        cons.forbid(label, colors);
    }
    for r in require {
        let (label, color) = r
            .split_once('=')
            .ok_or(format!("expected LABEL=COLOR, got `{r}`"))?;
        let color = color
            .trim()
            .parse()
            .map_err(|_| format!("bad color in `{r}`"))?;
        cons.require(label, color);
    }
    Ok(cons)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let ctx = Ctx {
        timeout: Duration::from_secs(cli.timeout),
        quiet: cli.quiet,
        json: cli.json,
    };
    match cli.command {
        Command::Gen {
            family,
            k,
            base,
            n,
            output,
        } => {
            let g = match family {
                GenFamily::Sierpinski => gen_sierpinski(
                    n,
                    k.ok_or_else(|| Error::UnknownName("missing --k".into()))?,
                )?,
                GenFamily::Generalized => gen_generalized(n, &library_base(base.as_deref())?)?,
                GenFamily::Triangle => gen_triangle(n)?,
            };
            match output {
                Some(p) => write(&p, &g.to_text())?,
                None => print!("{}", g.to_text()),
            }
            ctx.emit(json!({"vertices": g.vertex_count(), "edges": g.edge_count()}));
            Ok(0)
        }
        Command::Verify { graph, coloring } => {
            let g = Graph::parse(&read(&graph)?)?;
            let c = Coloring::parse(&read(&coloring)?)?;
            let r = verify_packing_coloring(&g, &c)?;
            for v in &r.violations {
                ctx.say(&format!(
                    "violation color {} {} {} distance {}",
                    v.color, v.u, v.v, v.distance
                ));
            }
            for u in &r.uncolored {
                ctx.say(&format!("uncolored {u}"));
            }
            ctx.say(if r.ok() { "valid" } else { "invalid" });
            let violations: Vec<_> = r
                .violations
                .iter()
                .map(|v| json!({"color": v.color, "u": v.u, "v": v.v, "distance": v.distance}))
                .collect();
            ctx.emit(json!({"valid": r.ok(), "max_color": c.max_color(), "violations": violations, "uncolored": r.uncolored}));
            Ok(if r.ok() { 0 } else { EXIT_FAIL })
        }
        Command::Chi { graph, output } => {
            let g = Graph::parse(&read(&graph)?)?;
            let r = chi_rho(&g, ctx.timeout)?;
            let status = match r.status {
                SolveStatus::Exact => "exact",
                SolveStatus::Bounds => "bounds",
                SolveStatus::Timeout => "timeout",
            };
            if r.status == SolveStatus::Exact {
                ctx.say(&format!("chi {}", r.upper));
            } else {
                ctx.say(&format!("{status} {} {}", r.lower, r.upper));
            }
            if let (Some(p), Some(w)) = (output, &r.witness) {
                write(&p, &w.to_text())?;
            }
            ctx.emit(json!({
                "status": status,
                "lower": r.lower,
                "upper": r.upper,
                "nodes": r.nodes_explored,
                "elapsed_ms": r.elapsed.as_millis() as u64,
            }));
            Ok(match r.status {
                SolveStatus::Exact => 0,
                _ => EXIT_TIMEOUT,
            })
        }
        Command::Decide {
            graph,
            k,
            forbid,
            require,
            output,
        } => {
            let g = Graph::parse(&read(&graph)?)?;
            let cons = match parse_constraints(&forbid, &require) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return Ok(EXIT_USAGE);
                }
            };
            let (word, code) = match is_packing_k_colorable(&g, k, &cons, ctx.timeout)? {
                Decision::Sat(c) => {
                    if let Some(p) = output {
                        write(&p, &c.to_text())?;
                    }
                    ("SAT", 0)
                }
                Decision::Unsat => ("UNSAT", EXIT_FAIL),
                Decision::Timeout => ("TIMEOUT", EXIT_TIMEOUT),
            };
            ctx.say(word);
            ctx.emit(json!({"decision": word, "k": k}));
            Ok(code)
        }
        Command::Certify {
            family,
            base,
            m,
            mode,
            depth,
            coloring,
        } => {
            let block = Coloring::parse(&read(&coloring)?)?;
            let report = match block_family(family, base.as_deref())? {
                Family::Triangle => certify_triangle_tiling(m, &block, depth)?,
                Family::Generalized(g) => {
                    let mode = match mode {
                        Mode::Conservative => CertMode::Conservative,
                        Mode::Refined => CertMode::Refined,
                    };
                    certify_generalized_tiling(&g, m, &block, mode, depth)?
                }
            };
            if !ctx.quiet && !ctx.json {
                print!("{}", report.to_text());
            }
            let margins: Vec<_> = report
                .margins
                .iter()
                .map(|c| json!({"color": c.color, "margin": c.min_margin()}))
                .collect();
            ctx.emit(
                json!({"status": report.status_line(), "mode": report.mode, "margins": margins}),
            );
            Ok(match report.status {
                CertStatus::Refuted(_) => EXIT_FAIL,
                _ => 0,
            })
        }
        Command::Bounds {
            k,
            n,
            literal_recurrence,
        } => {
            let rule = if literal_recurrence {
                Recurrence::Literal
            } else {
                Recurrence::Canonical
            };
            let seq = lower_bound_sequence(k, n, rule)?;
            let mut rows = Vec::new();
            for (i, a) in seq.values.iter().enumerate() {
                ctx.say(&format!("{} {a}", i + 1));
                rows.push(json!({"n": i + 1, "a_n": a.to_string()}));
            }
            ctx.emit(json!({"k": k, "values": rows}));
            Ok(0)
        }
        Command::Search {
            family,
            base,
            m,
            max_color,
            seed,
            iters,
            restarts,
            output,
        } => {
            let mut cfg = SearchConfig::new(block_family(family, base.as_deref())?, m, max_color);
            cfg.seed = seed;
            cfg.restarts = restarts;
            if let Some(i) = iters {
                cfg.iterations = i;
            }
            let out = search_certified_coloring(&cfg)?;
            write(&output, &out.best.to_text())?;
            match out.certified_bound {
                Some(b) => ctx.say(&format!("certified bound {b}")),
                None => ctx.say(&format!(
                    "no certified coloring, best penalty {}",
                    out.best_penalty
                )),
            }
            ctx.emit(json!({
                "certified_bound": out.certified_bound,
                "best_penalty": out.best_penalty,
                "restart": out.restart,
                "iterations": out.iterations,
                "history": out.history,
            }));
            Ok(if out.certified_bound.is_some() {
                0
            } else {
                EXIT_FAIL
            })
        }
        Command::Reproduce {
            profile,
            data,
            output,
        } => reproduce::run(&ctx, profile, data.as_deref(), output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Timeout) => {
            eprintln!("error: time budget exhausted");
            ExitCode::from(EXIT_TIMEOUT)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
