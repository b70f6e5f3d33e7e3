//! Transition graph of claims lists replayed from simulation traces.
//!
//! Snapshots are taken at the end of every iteration that changed the
//! claims tape; iterations that leave it unchanged add no edge. Edge
//! probabilities are the empirical frequencies of each successor among all
//! departures from a node.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndr_core::formal_system::{Claim, ClaimsList};
use ndr_core::ndr_machine::EventKind;

use super::{num, TraceRecord};
use crate::args::{GraphArgs, Global};
use crate::error::{io_error, CliError};
use crate::output::{row, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Append,
    Deletion,
}

impl EdgeKind {
    fn of(from: &ClaimsList, to: &ClaimsList) -> Self {
        if from.is_prefix_of(to) {
            EdgeKind::Append
        } else {
            EdgeKind::Deletion
        }
    }

    fn label(self) -> &'static str {
        match self {
            EdgeKind::Append => "append",
            EdgeKind::Deletion => "deletion",
        }
    }
}

#[derive(Debug, Default)]
pub struct TransitionGraph {
    pub visits: BTreeMap<ClaimsList, u64>,
    pub edges: BTreeMap<(ClaimsList, ClaimsList), u64>,
}

impl TransitionGraph {
    fn departures(&self) -> BTreeMap<&ClaimsList, u64> {
        let mut out = BTreeMap::new();
        for ((from, _), c) in &self.edges {
            *out.entry(from).or_default() += c;
        }
        out
    }

    pub fn edge_table(&self) -> Table {
        let departures = self.departures();
        let mut t = Table::new(&["from", "to", "count", "probability", "kind"]);
        for ((from, to), c) in &self.edges {
            let p = *c as f64 / departures[from] as f64;
            t.push(row![from, to, c, num(p), EdgeKind::of(from, to).label()]);
        }
        t
    }

    pub fn node_table(&self) -> Table {
        let mut t = Table::new(&["node", "length", "visits"]);
        for (node, v) in &self.visits {
            t.push(row![node, node.len(), v]);
        }
        t
    }
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Trace {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Records of one trace file grouped by replica, with their line numbers.
fn read_trace(path: &Path) -> Result<BTreeMap<u64, Vec<(usize, TraceRecord)>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    let mut by_replica: BTreeMap<u64, Vec<(usize, TraceRecord)>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord = serde_json::from_str(line).map_err(|e| malformed(path, i + 1, e.to_string()))?;
        by_replica.entry(record.replica).or_default().push((i + 1, record));
    }
    Ok(by_replica)
}

/// Adds the snapshots of one replica's events to `graph`.
fn replay(graph: &mut TransitionGraph, path: &Path, records: &[(usize, TraceRecord)]) -> Result<(), CliError> {
    let mut tape: Vec<Claim> = Vec::new();
    let mut snapshot = ClaimsList::new();
    *graph.visits.entry(snapshot.clone()).or_default() += 1;
    let mut i = 0;
    while i < records.len() {
        let iteration = records[i].1.event.iteration;
        if i > 0 && iteration < records[i - 1].1.event.iteration {
            return Err(malformed(path, records[i].0, "iterations out of order"));
        }
        while i < records.len() && records[i].1.event.iteration == iteration {
            let (line, record) = &records[i];
            let e = &record.event;
            match e.kind {
                EventKind::QuestionAdded => {}
                EventKind::ClaimAdded | EventKind::ClaimRemoved => {
                    let claim = e
                        .claim()
                        .ok_or_else(|| malformed(path, *line, format!("bad claim {:?}", e.payload)))?;
                    if e.kind == EventKind::ClaimAdded {
                        if e.position > tape.len() {
                            return Err(malformed(path, *line, format!("position {} past tape end", e.position)));
                        }
                        tape.insert(e.position, claim);
                    } else if tape.get(e.position) == Some(&claim) {
                        tape.remove(e.position);
                    } else {
                        return Err(malformed(path, *line, format!("{claim} is not at position {}", e.position)));
                    }
                }
            }
            i += 1;
        }
        let next = ClaimsList(tape.clone());
        if next != snapshot {
            *graph.edges.entry((snapshot, next.clone())).or_default() += 1;
            *graph.visits.entry(next.clone()).or_default() += 1;
            snapshot = next;
        }
    }
    Ok(())
}

pub fn build_graph(paths: &[PathBuf]) -> Result<TransitionGraph, CliError> {
    let mut graph = TransitionGraph::default();
    for path in paths {
        for records in read_trace(path)?.values() {
            replay(&mut graph, path, records)?;
        }
    }
    Ok(graph)
}

pub fn run(global: &Global, args: &GraphArgs) -> Result<bool, CliError> {
    let format = global.format.unwrap_or(crate::args::Format::Csv);
    let traces = if args.traces.is_empty() {
        vec![global.out.join(super::simulate::TRACE_FILE)]
    } else {
        args.traces.clone()
    };
    let graph = build_graph(&traces)?;
    std::fs::create_dir_all(&global.out).map_err(io_error(&global.out))?;
    graph.edge_table().write(&global.out, "graph_edges", format)?;
    graph.node_table().write(&global.out, "graph_nodes", format)?;
    println!("{} nodes, {} edges", graph.visits.len(), graph.edges.len());
    Ok(true)
}
