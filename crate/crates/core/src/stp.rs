//! Reading and writing the SteinLib STP subset: `Comment`, `Graph` and `Terminals`
//! sections. Other sections are skipped with a warning.

use crate::error::{Error, Result};
use crate::graph::{Edge, Instance};
use crate::rational::{parse_cost, to_literal};
use std::collections::HashSet;
use std::fmt::Write as _;

const HEADER: &str = "33D32945 STP File, STP Format Version 1.0";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Comment,
    Graph,
    Terminals,
    Skipped,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, message: message.into() }
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_stp(text: &str) -> Result<Instance> {
    let mut section = Section::None;
    let mut nodes: Option<usize> = None;
    let mut declared_edges: Option<(usize, usize)> = None;
    let mut declared_terminals: Option<(usize, usize)> = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen_pairs = HashSet::new();
    let mut terminals: Vec<usize> = Vec::new();
    let mut seen_graph = false;
    let mut seen_terminals = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let head = toks.next().unwrap();
        let key = head.to_ascii_lowercase();
        if section == Section::None {
            match key.as_str() {
                "section" => {}
                "eof" => break,
                _ if line == 1 && content.starts_with("33D32945") => continue,
                _ => return Err(syntax(line, format!("expected `SECTION`, found `{head}`"))),
            }
            let name = toks.next().ok_or_else(|| syntax(line, "missing section name"))?;
            section = match name.to_ascii_lowercase().as_str() {
                "comment" => Section::Comment,
                "graph" => {
                    if seen_graph {
                        return Err(syntax(line, "repeated Graph section"));
                    }
                    seen_graph = true;
                    Section::Graph
                }
                "terminals" => {
                    if seen_terminals {
                        return Err(syntax(line, "repeated Terminals section"));
                    }
                    seen_terminals = true;
                    Section::Terminals
                }
                other => {
                    log::warn!("line {line}: ignoring unsupported section `{other}`");
                    Section::Skipped
                }
            };
            continue;
        }
        if key == "end" {
            if section == Section::Graph {
                if let Some((m, at)) = declared_edges {
                    if m != edges.len() {
                        return Err(syntax(at, format!("declared {m} edges, found {}", edges.len())));
                    }
                }
            }
            if section == Section::Terminals {
                if let Some((k, at)) = declared_terminals {
                    if k != terminals.len() {
                        return Err(syntax(at, format!("declared {k} terminals, found {}", terminals.len())));
                    }
                }
            }
            section = Section::None;
            continue;
        }
        match section {
            Section::Comment | Section::Skipped => {}
            Section::Graph => match key.as_str() {
                "nodes" => nodes = Some(number(toks.next(), line, "node count")?),
                "edges" => declared_edges = Some((number(toks.next(), line, "edge count")?, line)),
                "e" => {
                    let n = nodes.ok_or_else(|| syntax(line, "edge before `Nodes`"))?;
                    let u = number(toks.next(), line, "edge endpoint")?;
                    let v = number(toks.next(), line, "edge endpoint")?;
                    let c = toks.next().ok_or_else(|| syntax(line, "missing edge cost"))?;
                    let cost = parse_cost(c).map_err(|e| syntax(line, e.to_string()))?;
                    if u == 0 || v == 0 || u > n || v > n {
                        return Err(syntax(line, format!("edge endpoint outside 1..={n}")));
                    }
                    if u == v {
                        return Err(syntax(line, "self-loop"));
                    }
                    if cost < crate::rational::int(0) {
                        return Err(syntax(line, "negative edge cost"));
                    }
                    if !seen_pairs.insert((u.min(v), u.max(v))) {
                        return Err(Error::DuplicateEdge { line, u, v });
                    }
                    edges.push(Edge::new(u - 1, v - 1, cost));
                }
                _ => return Err(syntax(line, format!("unexpected `{head}` in Graph section"))),
            },
            Section::Terminals => match key.as_str() {
                "terminals" => declared_terminals = Some((number(toks.next(), line, "terminal count")?, line)),
                "t" => {
                    let n = nodes.ok_or_else(|| syntax(line, "terminal before the Graph section"))?;
                    let id = number(toks.next(), line, "terminal id")?;
                    if id == 0 || id > n {
                        return Err(Error::TerminalOutOfRange { line, id, nodes: n });
                    }
                    if terminals.contains(&(id - 1)) {
                        return Err(syntax(line, format!("terminal {id} listed twice")));
                    }
                    terminals.push(id - 1);
                }
                _ => return Err(syntax(line, format!("unexpected `{head}` in Terminals section"))),
            },
            Section::None => unreachable!(),
        }
        if toks.next().is_some() && matches!(section, Section::Graph | Section::Terminals) {
            return Err(syntax(line, "trailing tokens"));
        }
    }
    if section != Section::None {
        return Err(syntax(text.lines().count(), "unterminated section"));
    }
    if !seen_graph {
        return Err(Error::MissingSection("Graph"));
    }
    if !seen_terminals {
        return Err(Error::MissingSection("Terminals"));
    }
    let n = nodes.ok_or(Error::MissingSection("Graph/Nodes"))?;
    Instance::new(n, terminals, edges)
}

/// Canonical STP text; terminals are listed in increasing order.
pub fn write_stp(inst: &Instance, name: Option<&str>) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "SECTION Comment").unwrap();
    writeln!(out, "Name \"{}\"", name.unwrap_or("instance")).unwrap();
    writeln!(out, "END").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "SECTION Graph").unwrap();
    writeln!(out, "Nodes {}", inst.n()).unwrap();
    writeln!(out, "Edges {}", inst.edges().len()).unwrap();
    for e in inst.edges() {
        writeln!(out, "E {} {} {}", e.u + 1, e.v + 1, to_literal(&e.cost)).unwrap();
    }
    writeln!(out, "END").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "SECTION Terminals").unwrap();
    writeln!(out, "Terminals {}", inst.terminals().len()).unwrap();
    for t in inst.terminals() {
        writeln!(out, "T {}", t + 1).unwrap();
    }
    writeln!(out, "END").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "EOF").unwrap();
    out
}
