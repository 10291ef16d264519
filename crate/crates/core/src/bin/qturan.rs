use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qturan_core::bounds::{self, DensityReport, Scope, CSV_HEADER};
use qturan_core::construction::{
    self, edge_probability_closed_form, edge_survival_hits, format_rational, rational_to_f64,
};
use qturan_core::cube::{LayerId, QnGraph};
use qturan_core::detector::{find_c6_minus, find_cycle_generic};
use qturan_core::io::{self, EdgeListFile};
use qturan_core::{BoundName, Error, LayerSubgraph};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_EXHAUSTED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "qturan", version, about = "C6-free hypercube layer subgraphs and their density bounds")]
struct Cli {
    /// Base seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    C4,
    C6,
    #[value(name = "c6minus")]
    C6Minus,
    C10,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resample until G_r beats c/2 on L_r(n); write the assignment and graph.
    Construct {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 512)]
        trials: u64,
        /// Directory for the assignment and edge-list files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an edge-list file for a C4, C6, C6- or C10.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
    },
    /// Per-layer, union and (with a certificate) final density reports.
    Pipeline {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 512)]
        trials: u64,
        /// Edge 3-colouring certificate of Q_n.
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Directory for the union edge list and the per-layer assignments.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo edge-survival frequencies against the exact probability.
    Stats {
        /// A single r or an inclusive range `a-b`.
        #[arg(long, default_value = "1-5")]
        r: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Export the full layer L_r(n) as an edge list.
    FullLayer {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a colouring keeping every class of the union C10-free.
    SearchColoring {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 512)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity(_) => EXIT_CAPACITY,
            Error::Exhausted(_) => EXIT_EXHAUSTED,
            Error::Certificate(_) => EXIT_FAIL,
            Error::InvalidArgument(_) | Error::Parse { .. } => EXIT_USAGE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn render(format: Format, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(header);
            out.push('\n');
            for r in rows {
                out.push_str(r);
                out.push('\n');
            }
        }
        Format::Text => {
            let table: Vec<Vec<&str>> = std::iter::once(header)
                .chain(rows.iter().map(String::as_str))
                .map(|l| l.split(',').collect())
                .collect();
            let cols = table[0].len();
            let widths: Vec<usize> = (0..cols)
                .map(|c| table.iter().map(|r| r.get(c).map_or(0, |s| s.len())).max().unwrap_or(0))
                .collect();
            for row in &table {
                let cells: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}"))
                    .collect();
                out.push_str(cells.join("  ").trim_end());
                out.push('\n');
            }
        }
    }
    out
}

fn report_rows(reports: &[DensityReport]) -> Vec<String> {
    reports.iter().map(DensityReport::csv_row).collect()
}

fn construct(cli: &Cli, n: u32, r: u32, trials: u64, out: Option<&Path>) -> Result<u8, Failure> {
    let (good, code) = match construction::find_good_assignment(n, r, cli.seed, trials) {
        Ok(g) => (g, 0),
        Err(Error::Exhausted(ex)) => {
            eprintln!("no trial beat c/2 in {} trials; writing the best candidate", ex.trials);
            let ex = *ex;
            (
                construction::GoodAssignment {
                    assignment: ex.assignment,
                    graph: ex.graph,
                    trials: ex.trials,
                },
                EXIT_EXHAUSTED,
            )
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = out {
        let stem = format!("n{n}_r{r}_s{}", cli.seed);
        write(dir, &format!("assignment_{stem}.txt"), &io::assignment_to_text(&good.assignment))?;
        write(dir, &format!("layer_{stem}.txt"), &EdgeListFile::from_layer(&good.graph).to_text())?;
    }
    let layer = good.graph.layer();
    let report = DensityReport::new(
        n,
        Some(r),
        Scope::Layer,
        good.graph.edge_count(),
        qturan_core::layer_edge_count(layer),
        BoundName::HalfC,
    );
    print!("{}", render(cli.format, CSV_HEADER, &[report.csv_row()]));
    eprintln!("trials used: {}", good.trials);
    Ok(if code == 0 && !report.pass { EXIT_FAIL } else { code })
}

fn verify(input: &Path, target: Target) -> Result<u8, Failure> {
    let file = EdgeListFile::parse(&read(input)?)?;
    let graph: QnGraph = file.to_graph()?;
    let witness = match target {
        Target::C4 => find_cycle_generic(&graph, 4)?.map(|w| w.to_string()),
        Target::C6 => find_cycle_generic(&graph, 6)?.map(|w| w.to_string()),
        Target::C10 => find_cycle_generic(&graph, 10)?.map(|w| w.to_string()),
        Target::C6Minus => find_c6_minus(&graph).map(|w| w.to_string()),
    };
    match witness {
        Some(line) => {
            println!("{line}");
            Ok(EXIT_FAIL)
        }
        None => {
            println!("free");
            Ok(0)
        }
    }
}

fn pipeline(cli: &Cli, n: u32, trials: u64, coloring: Option<&Path>, out: Option<&Path>) -> Result<u8, Failure> {
    let cert = match coloring {
        Some(p) => Some(io::parse_coloring(&read(p)?)?),
        None => None,
    };
    let suite = bounds::density_report_suite(n, cli.seed, trials, cert.as_ref())?;
    if let Some(dir) = out {
        write(dir, &format!("union_n{n}_s{}.txt", cli.seed), &EdgeListFile::from_union(&suite.union).to_text())?;
        for (r, good) in &suite.layers {
            write(
                dir,
                &format!("assignment_n{n}_r{r}_s{}.txt", cli.seed),
                &io::assignment_to_text(&good.assignment),
            )?;
        }
        if let Some(bounds::PipelineOutcome::Success { subgraph, .. }) = &suite.pipeline {
            write(dir, &format!("final_n{n}_s{}.txt", cli.seed), &EdgeListFile::from_graph(subgraph).to_text())?;
        }
    }
    if let Some(outcome) = &suite.pipeline {
        for class in outcome.classes() {
            match &class.witness {
                Some(w) => eprintln!("colour {}: {} edges, {w}", class.color, class.edges),
                None => eprintln!("colour {}: {} edges, C10-free", class.color, class.edges),
            }
        }
    }
    print!("{}", render(cli.format, CSV_HEADER, &report_rows(&suite.reports)));
    Ok(if !suite.exhausted.is_empty() {
        EXIT_EXHAUSTED
    } else if suite.all_pass() {
        0
    } else {
        EXIT_FAIL
    })
}

fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || usage(format!("--r expects `a` or `a-b`, got {s:?}"));
    let (a, b) = match s.split_once('-') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            (a, a)
        }
    };
    if a == 0 || b < a || b > 32 {
        return Err(bad());
    }
    Ok((a, b))
}

pub const STATS_HEADER: &str = "r,n,trials,hits,empirical,exact,exact_value,sigma,z,within_4sigma";

fn stats(cli: &Cli, r_range: &str, trials: u64) -> Result<u8, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let (lo, hi) = parse_range(r_range)?;
    let mut rows = Vec::new();
    let mut all_ok = true;
    for r in lo..=hi {
        let n = 2 * r;
        let hits = edge_survival_hits(n, r, trials, construction::derive_seed(cli.seed, r as u64))?;
        let exact = edge_probability_closed_form(r);
        let p = rational_to_f64(&exact);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let empirical = hits as f64 / trials as f64;
        let z = if sigma > 0.0 { (empirical - p) / sigma } else { 0.0 };
        let ok = if sigma > 0.0 { z.abs() <= 4.0 } else { hits == trials };
        all_ok &= ok;
        rows.push(format!(
            "{r},{n},{trials},{hits},{empirical:.6},{},{p:.6},{sigma:.6},{z:.3},{ok}",
            format_rational(&exact)
        ));
    }
    print!("{}", render(cli.format, STATS_HEADER, &rows));
    Ok(if all_ok { 0 } else { EXIT_FAIL })
}

fn full_layer(n: u32, r: u32, out: Option<&Path>) -> Result<u8, Failure> {
    let g = LayerSubgraph::full(LayerId::new(n, r)?)?;
    let text = EdgeListFile::from_layer(&g).to_text();
    match out {
        Some(dir) => write(dir, &format!("full_layer_n{n}_r{r}.txt"), &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn search_coloring(cli: &Cli, n: u32, trials: u64, budget: u64, out: Option<&Path>) -> Result<u8, Failure> {
    let suite = bounds::density_report_suite(n, cli.seed, trials, None)?;
    match bounds::search_coloring_small_n(&suite.union, budget, cli.seed)? {
        Some(cert) => {
            let text = io::coloring_to_text(&cert);
            match out {
                Some(dir) => write(dir, &format!("coloring_n{n}_s{}.txt", cli.seed), &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        None => {
            eprintln!("no colouring found within budget {budget}");
            Ok(EXIT_FAIL)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Construct { n, r, trials, out } => construct(cli, *n, *r, *trials, out.as_deref()),
        Command::Verify { input, target } => verify(input, *target),
        Command::Pipeline {
            n,
            trials,
            coloring,
            out,
        } => pipeline(cli, *n, *trials, coloring.as_deref(), out.as_deref()),
        Command::Stats { r, trials } => stats(cli, r, *trials),
        Command::FullLayer { n, r, out } => full_layer(*n, *r, out.as_deref()),
        Command::SearchColoring {
            n,
            trials,
            budget,
            out,
        } => search_coloring(cli, *n, *trials, *budget, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
