use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use framekit::rep::{self, Cache, RepStatus};
use framekit::verify::{self, ClaimStatus};
use framekit::{named, rooted, Matroid, Multigraph, SearchLimits};

#[derive(Parser)]
#[command(name = "framekit", about = "Biased graphs, frame matroids, and excluded-minor verification", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Search-node budget per leaf search
    #[arg(long, global = true, default_value_t = 100_000_000)]
    node_budget: u64,
    /// Time budget per leaf search, in seconds
    #[arg(long, global = true, default_value_t = 600)]
    time_budget: u64,
    /// Directory for the persistent verdict cache
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Report format
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "json"])]
    report: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification campaign
    Verify {
        /// One of: e0, n9, e-family
        target: String,
    },
    /// Count and print the biased-graph representations of a matroid
    Representations {
        /// A built-in name (U24, U23, MK5*, MK33*, MK33p*, MW4, F7, F7*) or
        /// a matroid file path
        subject: String,
        /// Elements forced to be unbalanced loops (comma-separated)
        #[arg(long, value_delimiter = ',')]
        l: Vec<String>,
    },
    /// Decide whether the matroid in a file is frame
    CheckFrame { file: PathBuf },
    /// Enumerate excluded matroidals of a given rank
    EnumerateMatroidals {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        max_elements: usize,
        /// Restrict the candidate matroids to graphic ones
        #[arg(long, default_value_t = false)]
        graphic_only: bool,
    },
    /// Find a rooted K4 or W4 minor keeping two marked edges
    RootedMinor {
        graphfile: PathBuf,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
    },
}

fn limits_of(g: &GlobalOpts) -> SearchLimits {
    SearchLimits {
        node_budget: g.node_budget,
        time_budget: Duration::from_secs(g.time_budget),
        ..Default::default()
    }
}

fn cache_of(g: &GlobalOpts) -> Result<Cache> {
    match &g.cache_dir {
        Some(dir) => Cache::on_disk(dir.clone()).context("opening cache directory"),
        None => Ok(Cache::in_memory()),
    }
}

fn load_matroid(subject: &str) -> Result<Matroid> {
    if named::NAMES.iter().any(|n| n.eq_ignore_ascii_case(subject)) {
        return Ok(named::build_named(subject)?.matroid);
    }
    if subject.eq_ignore_ascii_case("n9") {
        return Ok(named::build_n9());
    }
    let text = std::fs::read_to_string(subject)
        .with_context(|| format!("reading matroid file {subject:?}"))?;
    Ok(Matroid::from_json(&text)?)
}

fn status_exit(status: ClaimStatus) -> ExitCode {
    ExitCode::from(verify::exit_code(status) as u8)
}

fn rep_status_claim(status: RepStatus) -> ClaimStatus {
    match status {
        RepStatus::Frame | RepStatus::NotFrame => ClaimStatus::Confirmed,
        RepStatus::Inconclusive => ClaimStatus::Partial,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let limits = limits_of(&cli.global);
    let cache = cache_of(&cli.global)?;
    let json = cli.global.report == "json";
    match &cli.command {
        Command::Verify { target } => verify_cmd(target, &limits, &cache, json),
        Command::Representations { subject, l } => representations_cmd(subject, l, &limits, json),
        Command::CheckFrame { file } => check_frame_cmd(file, &limits, &cache, json),
        Command::EnumerateMatroidals {
            rank,
            max_elements,
            graphic_only,
        } => enumerate_cmd(*rank, *max_elements, *graphic_only, &limits, &cache, json),
        Command::RootedMinor { graphfile, e1, e2 } => rooted_cmd(graphfile, e1, e2, json),
    }
}

fn verify_cmd(target: &str, limits: &SearchLimits, cache: &Cache, json: bool) -> Result<ExitCode> {
    match target {
        "n9" => {
            let report = verify::verify_excluded_minor("N9", &named::build_n9(), limits, cache);
            print!("{}", if json { report.to_json() } else { report.to_text() });
            Ok(status_exit(report.overall))
        }
        "e0" => {
            let members = named::build_e0();
            let reports: Vec<_> = members
                .iter()
                .map(|(name, m)| verify::verify_excluded_minor(name, m, limits, cache))
                .collect();
            let overall = verify::aggregate(reports.iter().map(|r| r.overall));
            if json {
                let blob = serde_json::to_string_pretty(&reports)?;
                println!("{blob}");
            } else {
                for r in &reports {
                    print!("{}", r.to_text());
                }
                println!("overall: {overall:?}");
            }
            Ok(status_exit(overall))
        }
        "e-family" => {
            let rank3 = verify::enumerate_excluded_matroidals(3, 8, false, limits, cache);
            let rank4 = verify::enumerate_excluded_matroidals(4, 8, true, limits, cache);
            let family = verify::build_e_family(&rank3, &rank4);
            let summary = verify::verify_e_family(&family, limits, cache);
            print!("{}", if json { summary.to_json() } else { summary.to_text() });
            Ok(status_exit(summary.overall))
        }
        other => bail!("unknown verify target {other:?}; expected e0, n9, or e-family"),
    }
}

fn representations_cmd(
    subject: &str,
    l: &[String],
    limits: &SearchLimits,
    json: bool,
) -> Result<ExitCode> {
    let m = load_matroid(subject)?;
    let l_mask = m
        .mask_of(l.iter().map(|s| s.as_str()))
        .map_err(|e| anyhow!("bad --l: {e}"))?;
    let verdict = rep::enumerate_l_biased(&m, l_mask, limits);
    if json {
        let blob = serde_json::json!({
            "subject": subject,
            "status": format!("{:?}", verdict.status),
            "classes": verdict.witnesses.len(),
            "raw_witnesses": verdict.stats.raw_witnesses,
            "witnesses": verdict.witnesses.iter().map(|w| w.to_doc()).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&blob)?);
    } else {
        println!("subject: {subject}");
        println!("status: {:?}", verdict.status);
        println!(
            "representations up to biased isomorphism: {} (raw: {})",
            verdict.witnesses.len(),
            verdict.stats.raw_witnesses
        );
        for (i, w) in verdict.witnesses.iter().enumerate() {
            println!("--- witness {i}:");
            println!("{}", w.to_json());
        }
    }
    Ok(status_exit(rep_status_claim(verdict.status)))
}

fn check_frame_cmd(
    file: &PathBuf,
    limits: &SearchLimits,
    cache: &Cache,
    json: bool,
) -> Result<ExitCode> {
    let text = std::fs::read_to_string(file).context("reading matroid file")?;
    let m = Matroid::from_json(&text)?;
    let verdict = rep::is_frame(&m, limits, cache);
    if json {
        let blob = serde_json::json!({
            "status": format!("{:?}", verdict.status),
            "witness": verdict.witnesses.first().map(|w| w.to_doc()),
        });
        println!("{}", serde_json::to_string_pretty(&blob)?);
    } else {
        println!("status: {:?}", verdict.status);
        if let Some(w) = verdict.witnesses.first() {
            println!("{}", w.to_json());
        }
    }
    Ok(status_exit(rep_status_claim(verdict.status)))
}

fn enumerate_cmd(
    rank: usize,
    max_elements: usize,
    graphic_only: bool,
    limits: &SearchLimits,
    cache: &Cache,
    json: bool,
) -> Result<ExitCode> {
    let classes =
        verify::enumerate_excluded_matroidals(rank, max_elements, graphic_only, limits, cache);
    if json {
        let blob = serde_json::json!({
            "rank": rank,
            "max_elements": max_elements,
            "graphic_only": graphic_only,
            "classes": classes.iter().map(|c| serde_json::json!({
                "matroid": c.matroid.to_doc(),
                "l": c.l,
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&blob)?);
    } else {
        println!(
            "excluded matroidal classes (rank {rank}, <= {max_elements} elements{}): {}",
            if graphic_only { ", graphic only" } else { "" },
            classes.len()
        );
        for c in &classes {
            println!(
                "  n={} rank={} l={:?} circuits={:?}",
                c.matroid.n(),
                c.matroid.rank_full(),
                c.l,
                c.matroid.named_circuits()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn rooted_cmd(graphfile: &PathBuf, e1: &str, e2: &str, json: bool) -> Result<ExitCode> {
    let text = std::fs::read_to_string(graphfile).context("reading graph file")?;
    let doc: framekit::graph::GraphDoc = serde_json::from_str(&text)?;
    let g = Multigraph::from_doc(&doc)?;
    match rooted::rooted_k4_w4_minor(&g, e1, e2) {
        Ok(witness) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&witness)?);
            } else {
                println!("terminal: {:?}", witness.terminal);
                println!("operations ({}):", witness.operations.len());
                for op in &witness.operations {
                    println!("  {op:?}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(rooted::RootedError::NoWitness) => {
            eprintln!("alarm: no rooted K4/W4 minor found");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}
