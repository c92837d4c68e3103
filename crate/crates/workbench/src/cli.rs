//! Command-line entry point. Exit codes: 0 success, 1 operational error,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use workbench_core::analytics::DEFAULT_NODE_CAP;
use workbench_core::query::{self, ResultTable};

use crate::api;
use crate::demo;
use crate::store::{read_lines, DataDir, Workspace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "workbench", version, about = "Knowledge-graph exploration and curation workbench")]
pub struct Cli {
    /// Workspace directory holding graph, corpus, sessions and history.
    #[arg(long, global = true, env = "WORKBENCH_DATA_DIR", default_value = "workbench-data")]
    pub data_dir: PathBuf,

    /// Port for `serve`.
    #[arg(long, global = true, env = "WORKBENCH_PORT", default_value_t = 8080,
          value_parser = clap::value_parser!(u16).range(1..))]
    pub port: u16,

    /// Address for `serve` to bind.
    #[arg(long, global = true, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,

    /// Default neighborhood node cap when a request gives none.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_CAP,
          value_parser = parse_cap)]
    pub node_cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_cap(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("node cap must be an integer of at least 1".into()),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add JSON-lines records to the workspace and print the ingest report.
    Ingest {
        #[arg(long)]
        nodes: Option<PathBuf>,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Start the HTTP service.
    Serve,
    /// Run one pattern query against the workspace.
    Query {
        text: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write a session file.
    Export {
        #[arg(value_enum)]
        kind: ExportKind,
        session: String,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the synthetic demo dataset into the data directory.
    DemoData {
        #[arg(long, default_value_t = demo::DEFAULT_SEED)]
        seed: u64,
        /// Replace an existing workspace.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Seeds,
    Decisions,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn open_workspace(cli: &Cli, create: bool) -> anyhow::Result<Workspace> {
    let dir = DataDir::open(&cli.data_dir, create)?;
    let (ws, report) = Workspace::load(dir, cli.node_cap)?;
    for r in report.graph.rejected.iter().chain(&report.corpus.rejected) {
        tracing::warn!("skipped stored record: {:?} line {}: {}", r.kind, r.ordinal, r.reason);
    }
    Ok(ws)
}

fn read_input(path: &Path) -> anyhow::Result<Vec<String>> {
    if !path.is_file() {
        bail!("{}: no such file", path.display());
    }
    Ok(read_lines(path)?)
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Ingest { nodes, edges, corpus } => {
            if nodes.is_none() && edges.is_none() && corpus.is_none() {
                bail!("nothing to ingest; give --nodes, --edges or --corpus");
            }
            let node_lines = nodes.as_deref().map(read_input).transpose()?.unwrap_or_default();
            let edge_lines = edges.as_deref().map(read_input).transpose()?.unwrap_or_default();
            let doc_lines = corpus.as_deref().map(read_input).transpose()?.unwrap_or_default();
            let mut ws = open_workspace(&cli, true)?;
            let graph = ws
                .graph
                .ingest_graph(node_lines.iter().map(String::as_str), edge_lines.iter().map(String::as_str));
            ws.persist_graph(&graph.added_node_ids, &graph.added_edge_ids)?;
            let docs = ws.corpus.ingest_corpus(doc_lines.iter().map(String::as_str));
            ws.persist_documents(&docs.added_doc_ids)?;
            let mut report = serde_json::to_value(&graph)?;
            if corpus.is_some() {
                report["corpus"] = serde_json::to_value(&docs)?;
            }
            report["graph_version"] = json!(ws.graph.version());
            print_json(&report)
        }
        Command::Serve => serve(&cli),
        Command::Query { text, format } => {
            let ws = open_workspace(&cli, false)?;
            let table = query::run(text, &ws.graph).context("query failed")?;
            match format {
                Format::Json => print_json(&table),
                Format::Text => {
                    print!("{}", render_table(&table));
                    Ok(())
                }
            }
        }
        Command::Export { kind, session, out } => {
            let ws = open_workspace(&cli, false)?;
            let body = match kind {
                ExportKind::Seeds => serde_json::to_string_pretty(&ws.sessions.export_seeds(&ws.graph, session)?)?,
                ExportKind::Decisions => serde_json::to_string_pretty(&ws.sessions.export_decisions(session)?)?,
            };
            match out {
                Some(path) => std::fs::write(path, body + "\n").with_context(|| path.display().to_string()),
                None => {
                    println!("{body}");
                    Ok(())
                }
            }
        }
        Command::DemoData { seed, force } => {
            let dir = DataDir::open(&cli.data_dir, true)?;
            let summary = demo::write_demo(&dir, *seed, *force)?;
            print_json(&json!({"data_dir": dir.root(), "seed": seed, "summary": summary}))
        }
    }
}

fn serve(cli: &Cli) -> anyhow::Result<()> {
    let ws = open_workspace(cli, false)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = api::bind(SocketAddr::new(cli.host, cli.port)).await?;
        let addr = listener.local_addr()?;
        let (n, e) = ws.graph.counts();
        tracing::info!("serving {} ({n} nodes, {e} edges) on http://{addr}", cli.data_dir.display());
        eprintln!("listening on http://{addr}");
        api::serve(listener, ws, async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        })
        .await?;
        Ok(())
    })
}

/// Columns padded to their widest cell, then a row count line.
pub fn render_table(table: &ResultTable) -> String {
    let widths: Vec<usize> = (0..table.columns.len())
        .map(|i| {
            table
                .rows
                .iter()
                .map(|r| r[i].chars().count())
                .chain([table.columns[i].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&table.columns);
    out += &line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
    for row in &table.rows {
        out += &line(row);
    }
    let n = table.rows.len();
    out += &format!("({n} row{}{})\n", if n == 1 { "" } else { "s" }, if table.truncated { ", truncated" } else { "" });
    out
}
