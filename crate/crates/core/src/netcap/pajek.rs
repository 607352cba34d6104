//! Pajek `.net` files.
//!
//! ```text
//! *Vertices 3
//! 1 "0"
//! 2 "1"
//! 3 "2"
//! *Edges
//! 1 2 5
//! ```
//!
//! Vertices are 1-based and labelled with the 0-based agent id. Meeting
//! networks go under `*Edges` with the meeting count as weight; knowledge
//! networks go under `*Arcs` without weights.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::{ArcInfo, KnowledgeNetwork, LinkGraph, MeetingNetwork};
use crate::error::{Error, Result};

/// Graph kinds that can be written as Pajek.
pub trait PajekLinks: LinkGraph {
    fn weighted_links(&self) -> Vec<(u32, u32, Option<u64>)>;
}

impl PajekLinks for MeetingNetwork {
    fn weighted_links(&self) -> Vec<(u32, u32, Option<u64>)> {
        self.edges().map(|((a, b), w)| (a, b, Some(w))).collect()
    }
}

impl PajekLinks for KnowledgeNetwork {
    fn weighted_links(&self) -> Vec<(u32, u32, Option<u64>)> {
        self.arcs().map(|((i, j), _)| (i, j, None)).collect()
    }
}

pub fn write_pajek<G: PajekLinks + ?Sized>(graph: &G) -> String {
    let mut out = String::new();
    let n = graph.node_count();
    writeln!(out, "*Vertices {n}").unwrap();
    for v in 0..n {
        writeln!(out, "{} \"{v}\"", v + 1).unwrap();
    }
    out.push_str(if graph.is_directed() { "*Arcs\n" } else { "*Edges\n" });
    for (a, b, w) in graph.weighted_links() {
        match w {
            Some(w) => writeln!(out, "{} {} {w}", a + 1, b + 1).unwrap(),
            None => writeln!(out, "{} {}", a + 1, b + 1).unwrap(),
        }
    }
    out
}

pub fn export_pajek<G: PajekLinks + ?Sized>(graph: &G, path: &Path) -> Result<()> {
    let text = write_pajek(graph);
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// A parsed `.net` file with 0-based node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PajekGraph {
    pub n: usize,
    pub directed: bool,
    pub links: Vec<(u32, u32, Option<u64>)>,
}

impl PajekGraph {
    pub fn into_meeting(self) -> Result<MeetingNetwork> {
        let mut g = MeetingNetwork::new(self.n);
        for (a, b, w) in self.links {
            g.add_meetings(a, b, w.unwrap_or(1))?;
        }
        Ok(g)
    }

    /// Pajek carries no belief payload; arcs get a default [`ArcInfo`].
    pub fn into_knowledge(self) -> Result<KnowledgeNetwork> {
        let mut g = KnowledgeNetwork::new(self.n);
        for (i, j, _) in self.links {
            g.insert_arc(i, j, ArcInfo::default())?;
        }
        Ok(g)
    }
}

pub fn read_pajek(path: &Path) -> Result<PajekGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pajek(&text, path)
}

pub fn parse_pajek(text: &str, source: &Path) -> Result<PajekGraph> {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Vertices,
        Links,
    }
    let err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };

    let mut n = None;
    let mut directed = false;
    let mut links = Vec::new();
    let mut section = Section::Start;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(header) = line.strip_prefix('*') {
            let mut parts = header.split_whitespace();
            let keyword = parts.next().unwrap_or("").to_ascii_lowercase();
            match keyword.as_str() {
                "vertices" => {
                    let count = parts
                        .next()
                        .and_then(|c| c.parse::<usize>().ok())
                        .ok_or_else(|| err(line_no, "missing vertex count".into()))?;
                    n = Some(count);
                    section = Section::Vertices;
                }
                "edges" | "arcs" => {
                    if n.is_none() {
                        return Err(err(line_no, "link section before *Vertices".into()));
                    }
                    directed = keyword == "arcs";
                    section = Section::Links;
                }
                other => return Err(err(line_no, format!("unknown section *{other}"))),
            }
            continue;
        }
        match section {
            Section::Start => return Err(err(line_no, "data before *Vertices".into())),
            Section::Vertices => {}
            Section::Links => {
                let count = n.unwrap_or(0);
                let mut fields = line.split_whitespace();
                let mut node = |name: &str| -> Result<u32> {
                    let v: usize = fields
                        .next()
                        .and_then(|f| f.parse().ok())
                        .ok_or_else(|| err(line_no, format!("bad {name} vertex")))?;
                    if v == 0 || v > count {
                        return Err(err(line_no, format!("vertex {v} out of range 1..={count}")));
                    }
                    Ok((v - 1) as u32)
                };
                let a = node("first")?;
                let b = node("second")?;
                let w = match fields.next() {
                    None => None,
                    Some(f) => Some(
                        f.parse::<u64>()
                            .map_err(|_| err(line_no, format!("bad weight `{f}`")))?,
                    ),
                };
                links.push((a, b, w));
            }
        }
    }
    let n = n.ok_or_else(|| err(0, "no *Vertices line".into()))?;
    Ok(PajekGraph { n, directed, links })
}
