//! Edge-list files, JSON coloring reports and DOT export.
//!
//! Edge lists start with a header `n m`, followed by `m` lines `u v` with
//! 0-indexed vertices. Blank lines and lines starting with `#` are ignored.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::Graph;
use crate::packing::{ColorClass, PackingColoring, PackingSequence};
use crate::pipelines::{PathClass, PipelineOutput};
use crate::verify::{self, Violation};

pub const REPORT_FORMAT: &str = "packpaint-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: missing header `n m`")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header `{text}`, expected `n m`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: malformed edge `{text}`, expected `u v`")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("line {line}: header declares {expected} edges but {found} were listed")]
    EdgeCount {
        line: usize,
        expected: usize,
        found: usize,
    },
}

pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count().max(1);
    let (hline, header) = lines
        .next()
        .ok_or(ParseError::MissingHeader { line: last_line })?;
    let (n, m) = parse_pair(header).ok_or_else(|| ParseError::MalformedHeader {
        line: hline,
        text: header.to_string(),
    })?;
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines {
        let (u, v) = parse_pair(text).ok_or_else(|| ParseError::MalformedEdge {
            line,
            text: text.to_string(),
        })?;
        for vertex in [u, v] {
            if vertex >= n {
                return Err(ParseError::VertexOutOfRange { line, vertex, n });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, vertex: u });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(ParseError::Duplicate { line, u, v });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount {
            line: last_line,
            expected: m,
            found: edges.len(),
        });
    }
    Ok(Graph::from_edges(n, &edges).expect("edges validated above"))
}

fn parse_pair(text: &str) -> Option<(usize, usize)> {
    let mut it = text.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

/// Canonical form: header, then edges with `u < v` in sorted order.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Hex SHA-256 of the canonical edge list.
pub fn graph_digest(g: &Graph) -> String {
    hex::encode(Sha256::digest(write_edge_list(g).as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSummary {
    pub n: usize,
    pub m: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportClass {
    /// `1_2`, `2_1`, `3_1` and so on.
    pub label: String,
    pub parameter: u32,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub layer_sizes: Vec<usize>,
    pub residual: usize,
    pub e: usize,
    pub e_prime: usize,
    pub c: usize,
    pub recolor_steps: usize,
    pub path_types: BTreeMap<String, usize>,
    pub escalation: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub format: String,
    pub input: InputSummary,
    pub pipeline: String,
    pub seed: u64,
    pub sequence: String,
    pub budget: String,
    pub classes: Vec<ReportClass>,
    pub trace: TraceSummary,
    pub verification: Verification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported report format `{0}`")]
    Format(String),
    #[error("bad sequence in report: {0}")]
    Sequence(#[from] crate::packing::SequenceParseError),
    #[error("report was made for a different graph (digest {report}, graph {graph})")]
    DigestMismatch { report: String, graph: String },
    #[error("stored verdict (valid = {stored}) disagrees with recomputed verdict")]
    VerdictMismatch { stored: bool },
}

fn class_labels(col: &PackingColoring) -> Vec<String> {
    let mut counters: BTreeMap<u32, usize> = BTreeMap::new();
    col.classes
        .iter()
        .map(|c| {
            let i = counters.entry(c.parameter).or_insert(0);
            *i += 1;
            format!("{}_{}", c.parameter, i)
        })
        .collect()
}

fn path_class_name(class: PathClass) -> String {
    match class {
        PathClass::P1 => "p1".into(),
        PathClass::P2 => "p2".into(),
        PathClass::P3 => "p3".into(),
        PathClass::P4 => "p4".into(),
        PathClass::Length(l) => format!("length_{l}"),
    }
}

impl ColoringReport {
    pub fn new(g: &Graph, out: &PipelineOutput, seed: u64, elapsed: Option<Duration>) -> Self {
        let labels = class_labels(&out.coloring);
        let classes = out
            .coloring
            .classes
            .iter()
            .zip(labels)
            .map(|(c, label)| {
                let mut vertices = c.vertices.clone();
                vertices.sort_unstable();
                ReportClass {
                    label,
                    parameter: c.parameter,
                    vertices,
                }
            })
            .collect();
        let t = &out.trace;
        let mut path_types = BTreeMap::new();
        for p in &t.paths {
            *path_types.entry(path_class_name(p.class)).or_insert(0) += 1;
        }
        let verdict = verify::verify(g, &out.budget, &out.coloring);
        let valid = matches!(&verdict, Ok(v) if v.is_empty());
        let violations = verdict.unwrap_or_default();
        ColoringReport {
            format: REPORT_FORMAT.to_string(),
            input: InputSummary {
                n: g.n(),
                m: g.m(),
                sha256: graph_digest(g),
            },
            pipeline: t.pipeline.name().to_string(),
            seed,
            sequence: out.sequence.to_string(),
            budget: out.budget.to_string(),
            classes,
            trace: TraceSummary {
                layer_sizes: t.layers.iter().map(Vec::len).collect(),
                residual: t.residual.len(),
                e: t.e.len(),
                e_prime: t.e_prime.len(),
                c: t.c.len(),
                recolor_steps: t.recolor_log.len(),
                path_types,
                escalation: serde_json::to_value(t.escalation)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                notes: t.notes.clone(),
            },
            verification: Verification { valid, violations },
            timings: elapsed.map(|d| Timings {
                total_ms: d.as_secs_f64() * 1e3,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let report: ColoringReport = serde_json::from_str(text)?;
        if report.format != REPORT_FORMAT {
            return Err(ReportError::Format(report.format));
        }
        Ok(report)
    }

    pub fn coloring(&self) -> PackingColoring {
        PackingColoring {
            classes: self
                .classes
                .iter()
                .map(|c| ColorClass {
                    parameter: c.parameter,
                    vertices: c.vertices.clone(),
                })
                .collect(),
            uncolored: Vec::new(),
        }
    }

    pub fn sequence(&self) -> Result<PackingSequence, ReportError> {
        Ok(self.sequence.parse()?)
    }

    /// Checks that the report belongs to `g` and that the stored verdict
    /// matches one recomputed against the stored budget.
    pub fn recheck(&self, g: &Graph) -> Result<(), ReportError> {
        let digest = graph_digest(g);
        if digest != self.input.sha256 {
            return Err(ReportError::DigestMismatch {
                report: self.input.sha256.clone(),
                graph: digest,
            });
        }
        let budget: PackingSequence = self.budget.parse()?;
        let valid = verify::is_valid(g, &budget, &self.coloring());
        if valid != self.verification.valid {
            return Err(ReportError::VerdictMismatch {
                stored: self.verification.valid,
            });
        }
        Ok(())
    }
}

const PALETTE: [&str; 10] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6", "#bcf60c",
    "#fabebe", "#008080",
];

/// Graphviz rendering with one fill color per class.
pub fn to_dot(g: &Graph, col: &PackingColoring) -> String {
    let labels = class_labels(col);
    let mut label_of = vec![None; g.n()];
    for (i, class) in col.classes.iter().enumerate() {
        for &v in &class.vertices {
            if v < g.n() {
                label_of[v] = Some(i);
            }
        }
    }
    let mut out = String::from("graph packing {\n  node [style=filled];\n");
    for v in g.vertices() {
        match label_of[v] {
            Some(i) => {
                let _ = writeln!(
                    out,
                    "  {v} [label=\"{v}\\n{}\", fillcolor=\"{}\"];",
                    labels[i],
                    PALETTE[i % PALETTE.len()]
                );
            }
            None => {
                let _ = writeln!(out, "  {v} [fillcolor=\"white\"];");
            }
        }
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::pipelines::{color_auto, PipelineOptions};

    #[test]
    fn parse_examples() {
        let k3 = parse_edge_list("3 3\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(k3.edges(), gen::complete(3).edges());
        assert_eq!(
            parse_edge_list("2 1\n0 0\n"),
            Err(ParseError::SelfLoop { line: 2, vertex: 0 })
        );
        let one = parse_edge_list("1 0\n").unwrap();
        assert_eq!((one.n(), one.m()), (1, 0));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let dup = "# c\n3 2\n0 1\n\n1 0\n";
        assert_eq!(
            parse_edge_list(dup),
            Err(ParseError::Duplicate {
                line: 5,
                u: 1,
                v: 0
            })
        );
        assert!(matches!(
            parse_edge_list("3 1\n0 7\n"),
            Err(ParseError::VertexOutOfRange {
                line: 2,
                vertex: 7,
                n: 3
            })
        ));
        assert!(matches!(
            parse_edge_list("x\n"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 1 2\n"),
            Err(ParseError::MalformedEdge { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n"),
            Err(ParseError::EdgeCount {
                expected: 2,
                found: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_edge_list("# only\n"),
            Err(ParseError::MissingHeader { .. })
        ));
    }

    #[test]
    fn writer_parser_roundtrip() {
        let g = gen::petersen();
        let text = write_edge_list(&g);
        assert_eq!(write_edge_list(&parse_edge_list(&text).unwrap()), text);
    }

    #[test]
    fn report_roundtrip_and_recheck() {
        let g = gen::gkt(5, 3).unwrap();
        let out = color_auto(&g, &PipelineOptions::default()).unwrap();
        let report = ColoringReport::new(&g, &out, 0, None);
        assert_eq!(report.sequence, "(1^4,2^1)");
        assert!(!report.to_json().contains("timings"));
        let back = ColoringReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
        back.recheck(&g).unwrap();
        assert!(matches!(
            back.recheck(&gen::petersen()),
            Err(ReportError::DigestMismatch { .. })
        ));

        let timed = ColoringReport::new(&g, &out, 0, Some(Duration::from_millis(3)));
        assert!(timed.to_json().contains("total_ms"));
    }

    #[test]
    fn tampered_report_is_caught() {
        let g = gen::cycle(6).unwrap();
        let out = color_auto(&g, &PipelineOptions::default()).unwrap();
        let mut report = ColoringReport::new(&g, &out, 0, None);
        let moved = report.classes[1].vertices.remove(0);
        report.classes[0].vertices.push(moved);
        assert!(matches!(
            report.recheck(&g),
            Err(ReportError::VerdictMismatch { stored: true })
        ));
    }

    #[test]
    fn dot_lists_every_edge() {
        let g = gen::path(3);
        let out = color_auto(&g, &PipelineOptions::default()).unwrap();
        let dot = to_dot(&g, &out.coloring);
        assert!(dot.contains("0 -- 1;") && dot.contains("1 -- 2;"));
        assert!(dot.contains("1_1"));
    }
}
