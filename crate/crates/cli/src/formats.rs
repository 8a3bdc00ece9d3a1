//! On-disk formats: roster, ledger log, SNAP edge list, partition CSV and
//! worker lists.
//!
//! * Roster: one participant id per line, strictly ascending bytewise.
//! * Ledger: JSON lines `{"seq": 3, "participant_id": "alice", "payload": "<base64>"}`,
//!   `payload` optional.
//! * Edge list: whitespace separated vertex id pairs; lines starting with `#`
//!   or `%` and blank lines are skipped.
//! * Partition: CSV with header `vertex_id,community_id`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use workerset_core::community::Partition;
use workerset_core::graph::{SocialGraph, VertexId};
use workerset_core::ledger::{Ledger, LedgerRecord};
use workerset_core::{ParticipantId, ParticipantList};

use crate::error::{CliError, Result};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Lines without their terminator, numbered from 1.
fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::input(path, format!("line {}: {e}", i + 1)))?;
        out.push((i + 1, line.strip_suffix('\r').unwrap_or(&line).to_owned()));
    }
    Ok(out)
}

/// Hex SHA-256 of a file's bytes.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn read_roster(path: &Path) -> Result<ParticipantList> {
    let mut ids: Vec<ParticipantId> = Vec::new();
    for (no, line) in lines(path)? {
        if line.is_empty() {
            return Err(CliError::input(path, format!("line {no}: empty participant id")));
        }
        let id = ParticipantId::from(line.as_str());
        if let Some(prev) = ids.last() {
            if *prev >= id {
                return Err(CliError::input(
                    path,
                    format!("line {no}: {id} does not sort after {prev}; the roster must be strictly ascending"),
                ));
            }
        }
        ids.push(id);
    }
    Ok(ParticipantList::from_sorted(ids).expect("checked ascending"))
}

pub fn write_roster(roster: &ParticipantList, mut w: impl Write) -> io::Result<()> {
    for id in roster.iter() {
        w.write_all(id.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerLine {
    seq: u64,
    participant_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payload: Option<String>,
}

/// Replays a ledger log against the roster. The returned ledger has its
/// commit window closed.
pub fn read_ledger(path: &Path, roster: &ParticipantList) -> Result<Ledger> {
    let mut ledger = Ledger::new(roster.clone());
    for (no, line) in lines(path)? {
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| CliError::input(path, format!("line {no}: {m}"));
        let rec: LedgerLine = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let payload = match rec.payload {
            Some(p) => BASE64.decode(p).map_err(|e| err(format!("payload: {e}")))?,
            None => Vec::new(),
        };
        ledger
            .replay_record(rec.seq, ParticipantId::from(rec.participant_id.as_str()), payload)
            .map_err(|e| err(e.to_string()))?;
    }
    ledger.close_window();
    Ok(ledger)
}

pub fn write_ledger(records: &[LedgerRecord], mut w: impl Write) -> io::Result<()> {
    for r in records {
        let line = LedgerLine {
            seq: r.seq,
            participant_id: String::from_utf8_lossy(r.participant_id.as_bytes()).into_owned(),
            payload: (!r.payload.is_empty()).then(|| BASE64.encode(&r.payload)),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

fn parse_edge_line(line: &str) -> Option<std::result::Result<(VertexId, VertexId), String>> {
    let t = line.trim();
    if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
        return None;
    }
    let mut fields = t.split_whitespace();
    let mut next = || -> std::result::Result<VertexId, String> {
        let f = fields.next().ok_or("expected two vertex ids")?;
        f.parse().map_err(|_| format!("{f:?} is not a vertex id"))
    };
    Some(next().and_then(|u| Ok((u, next()?))))
}

pub fn read_edge_list(path: &Path) -> Result<SocialGraph> {
    let mut edges = Vec::new();
    for (no, line) in lines(path)? {
        if let Some(edge) = parse_edge_line(&line) {
            edges.push(edge.map_err(|m| CliError::input(path, format!("line {no}: {m}")))?);
        }
    }
    Ok(SocialGraph::from_edges(edges))
}

/// One `u v` line per edge with `u < v`, sorted.
pub fn write_edge_list(g: &SocialGraph, mut w: impl Write) -> io::Result<()> {
    for (u, v) in g.canonical_edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()
}

#[derive(Debug, Serialize, Deserialize)]
struct PartitionRow {
    vertex_id: VertexId,
    community_id: u32,
}

pub fn write_partition(g: &SocialGraph, p: &Partition, w: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for v in 0..g.vertex_count() as u32 {
        csv.serialize(PartitionRow {
            vertex_id: g.id(v),
            community_id: p.community_of(v),
        })
        .map_err(CliError::output)?;
    }
    csv.flush().map_err(CliError::output)
}

/// Reads a partition of `g`; every vertex must appear exactly once.
pub fn read_partition(g: &SocialGraph, path: &Path) -> Result<Partition> {
    let mut assignment = vec![0u32; g.vertex_count()];
    let mut csv = csv::Reader::from_reader(open(path)?);
    for (i, row) in csv.deserialize::<PartitionRow>().enumerate() {
        let err = |m: String| CliError::input(path, format!("row {}: {m}", i + 1));
        let row = row.map_err(|e| err(e.to_string()))?;
        let v = g
            .index_of(row.vertex_id)
            .ok_or_else(|| err(format!("vertex {} is not in the graph", row.vertex_id)))?;
        if assignment[v as usize] != 0 {
            return Err(err(format!("vertex {} listed twice", row.vertex_id)));
        }
        assignment[v as usize] = row.community_id;
    }
    if let Some(v) = assignment.iter().position(|&c| c == 0) {
        return Err(CliError::input(
            path,
            format!("vertex {} has no community", g.id(v as u32)),
        ));
    }
    Partition::new(assignment).map_err(|e| CliError::input(path, e.to_string()))
}

/// Vertex ids, one per line, resolved to vertex indices of `g`.
pub fn read_workers(g: &SocialGraph, path: &Path) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for (no, line) in lines(path)? {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |m: String| CliError::input(path, format!("line {no}: {m}"));
        let id: VertexId = t.parse().map_err(|_| err(format!("{t:?} is not a vertex id")))?;
        out.push(
            g.index_of(id)
                .ok_or_else(|| err(format!("vertex {id} is not in the graph")))?,
        );
    }
    Ok(out)
}
