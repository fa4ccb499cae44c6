//! Text formats: instances, layouts, discount tables and numeric output.
//!
//! Instance files are line oriented:
//!
//! ```text
//! p exttsp <n> <m> <directed|undirected>
//! c free-form comment (`c key value` pairs are read back as metadata)
//! e <u> <v> <w>
//! ```
//!
//! Vertex ids are positive integers. When every id is at most `n` they are
//! used as is; otherwise the distinct ids are numbered in increasing order and
//! the remaining vertices get fresh ids above the largest one. Directed
//! instances are merged into undirected ones on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{merge_directed, Graph, Layout, Vertex};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    /// External id of every vertex; index 0 is unused.
    pub ids: Vec<u64>,
    pub directed: bool,
    /// Comment lines without the leading `c `.
    pub comments: Vec<String>,
}

impl Instance {
    /// Wraps a graph with identity ids.
    pub fn new(graph: Graph) -> Self {
        let ids = (0..=graph.n() as u64).collect();
        Instance {
            graph,
            ids,
            directed: false,
            comments: Vec::new(),
        }
    }

    pub fn with_comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    /// Value of the first `c <key> <value>` comment.
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let mut parts = c.splitn(2, char::is_whitespace);
            (parts.next() == Some(key)).then(|| parts.next().unwrap_or("").trim())
        })
    }

    fn identity_ids(&self) -> bool {
        self.ids.iter().enumerate().all(|(i, &id)| id == i as u64)
    }

    /// Internal vertex of an external id.
    pub fn vertex(&self, id: u64) -> Option<Vertex> {
        if self.identity_ids() {
            return (id >= 1 && id <= self.graph.n() as u64).then_some(id as usize);
        }
        self.ids[1..].iter().position(|&x| x == id).map(|i| i + 1)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str, line: usize) -> Result<T> {
    let s = field.ok_or_else(|| parse_err(line, format!("missing {}", what)))?;
    s.parse()
        .map_err(|_| parse_err(line, format!("cannot read {} from '{}'", what, s)))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize, bool)> = None;
    let mut comments = Vec::new();
    let mut raw: Vec<(u64, u64, f64, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        match fields.next() {
            Some("c") => {
                let rest = trimmed[1..].trim_start();
                comments.push(rest.to_string());
            }
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(ln, "second problem line"));
                }
                if fields.next() != Some("exttsp") {
                    return Err(parse_err(ln, "problem line must read 'p exttsp <n> <m> <directed|undirected>'"));
                }
                let n: usize = parse_field(fields.next(), "vertex count", ln)?;
                let m: usize = parse_field(fields.next(), "edge count", ln)?;
                let directed = match fields.next() {
                    Some("directed") => true,
                    Some("undirected") => false,
                    other => {
                        return Err(parse_err(
                            ln,
                            format!("expected 'directed' or 'undirected', found {:?}", other.unwrap_or("")),
                        ))
                    }
                };
                if fields.next().is_some() {
                    return Err(parse_err(ln, "trailing fields on problem line"));
                }
                header = Some((n, m, directed));
            }
            Some("e") => {
                if header.is_none() {
                    return Err(parse_err(ln, "edge before the problem line"));
                }
                let u: u64 = parse_field(fields.next(), "endpoint", ln)?;
                let v: u64 = parse_field(fields.next(), "endpoint", ln)?;
                let w: f64 = parse_field(fields.next(), "weight", ln)?;
                if fields.next().is_some() {
                    return Err(parse_err(ln, "trailing fields on edge line"));
                }
                if u == 0 || v == 0 {
                    return Err(parse_err(ln, "vertex ids start at 1"));
                }
                if !(w > 0.0 && w.is_finite()) {
                    return Err(parse_err(ln, format!("weight {} must be positive", w)));
                }
                if u == v {
                    return Err(parse_err(ln, format!("self-loop on vertex {}", u)));
                }
                raw.push((u, v, w, ln));
            }
            Some(tag) => return Err(parse_err(ln, format!("unknown record type '{}'", tag))),
            None => unreachable!(),
        }
    }
    let (n, m, directed) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if raw.len() != m {
        return Err(parse_err(0, format!("problem line declares {} edges but {} were given", m, raw.len())));
    }

    let mut distinct: Vec<u64> = raw.iter().flat_map(|&(u, v, _, _)| [u, v]).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() > n {
        return Err(parse_err(0, format!("{} distinct vertex ids but n = {}", distinct.len(), n)));
    }
    let identity = distinct.last().is_none_or(|&max| max <= n as u64);
    let ids: Vec<u64> = if identity {
        (0..=n as u64).collect()
    } else {
        let max = *distinct.last().unwrap();
        let mut ids = vec![0];
        ids.extend_from_slice(&distinct);
        ids.extend((1..=(n - distinct.len()) as u64).map(|i| max + i));
        ids
    };
    let map = |id: u64| -> Vertex {
        if identity {
            id as usize
        } else {
            distinct.binary_search(&id).unwrap() + 1
        }
    };
    let arcs: Vec<(Vertex, Vertex, f64)> = raw.iter().map(|&(u, v, w, _)| (map(u), map(v), w)).collect();
    let graph = if directed {
        merge_directed(n, &arcs)?
    } else {
        Graph::new(n, arcs)?
    };
    Ok(Instance {
        graph,
        ids,
        directed,
        comments,
    })
}

/// Writes the merged undirected form with the original ids.
pub fn serialize_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    for c in &inst.comments {
        if c.is_empty() {
            out.push_str("c\n");
        } else {
            let _ = writeln!(out, "c {}", c);
        }
    }
    let _ = writeln!(out, "p exttsp {} {} undirected", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "e {} {} {}", inst.ids[e.u], inst.ids[e.v], e.w);
    }
    out
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    fs::write(path, serialize_instance(inst)).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))
}

/// Reads a layout given as external ids in position order.
pub fn parse_layout(text: &str, inst: &Instance) -> Result<Layout> {
    let n = inst.graph.n();
    let mut order = Vec::with_capacity(n);
    for token in text.split_whitespace() {
        let id: u64 = token
            .parse()
            .map_err(|_| Error::InvalidLayout(format!("'{}' is not a vertex id", token)))?;
        let v = inst
            .vertex(id)
            .ok_or_else(|| Error::InvalidLayout(format!("vertex {} is not in the instance", id)))?;
        order.push(v);
    }
    Layout::from_order(n, order)
}

pub fn serialize_layout(layout: &Layout, inst: &Instance) -> String {
    let mut out = String::new();
    for (i, &v) in layout.order().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", inst.ids[v]);
    }
    out.push('\n');
    out
}

pub fn read_layout(path: &Path, inst: &Instance) -> Result<Layout> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    parse_layout(&text, inst)
}

/// Whitespace-separated values `f(1) .. f(k)`.
pub fn parse_table(text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidDiscount(format!("'{}' is not a number", t)))
        })
        .collect()
}

/// Fixed-point rendering with 12 significant digits.
pub fn format_value(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = if x == 0.0 { 0 } else { x.abs().log10().floor() as i32 };
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P4: &str = "c a path\np exttsp 4 3 undirected\ne 1 2 3\ne 2 3 1\ne 3 4 2.5\n";

    #[test]
    fn parse_basic() {
        let inst = parse_instance(P4).unwrap();
        assert_eq!(inst.graph.n(), 4);
        assert_eq!(inst.graph.weight(3, 4), Some(2.5));
        assert_eq!(inst.comments, vec!["a path".to_string()]);
        assert!(!inst.directed);
    }

    #[test]
    fn round_trip() {
        let inst = parse_instance(P4).unwrap();
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn directed_arcs_merge() {
        let inst = parse_instance("p exttsp 3 3 directed\ne 1 2 3\ne 2 1 2\ne 2 3 1\n").unwrap();
        assert_eq!(inst.graph.m(), 2);
        assert_eq!(inst.graph.weight(1, 2), Some(5.0));
        assert!(inst.directed);
    }

    #[test]
    fn sparse_ids_are_remapped() {
        let inst = parse_instance("p exttsp 4 2 undirected\ne 10 30 1\ne 30 20 2\n").unwrap();
        assert_eq!(inst.ids, vec![0, 10, 20, 30, 31]);
        assert_eq!(inst.graph.weight(1, 3), Some(1.0));
        assert_eq!(inst.graph.weight(2, 3), Some(2.0));
        let layout = parse_layout("31 10 30 20", &inst).unwrap();
        assert_eq!(layout.order(), &[4, 1, 3, 2]);
        assert_eq!(serialize_layout(&layout, &inst), "31 10 30 20\n");
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "e 1 2 1\n",
            "p exttsp 2 1 sideways\ne 1 2 1\n",
            "p exttsp 2 1 undirected\ne 1 2 0\n",
            "p exttsp 2 1 undirected\ne 1 2 -3\n",
            "p exttsp 2 1 undirected\ne 1 1 3\n",
            "p exttsp 2 2 undirected\ne 1 2 3\n",
            "p exttsp 2 1 undirected\ne 1 2 x\n",
            "p exttsp 2 1 undirected\ne 0 2 1\n",
            "p exttsp 2 1 undirected\ne 1 2 1 9\n",
            "p exttsp 2 2 undirected\ne 1 2 1\ne 3 4 1\n",
            "p exttsp 2 0 undirected\np exttsp 2 0 undirected\n",
            "x 1\n",
        ] {
            assert!(parse_instance(bad).is_err(), "accepted {:?}", bad);
        }
    }

    #[test]
    fn layouts_must_be_permutations() {
        let inst = parse_instance(P4).unwrap();
        assert!(parse_layout("1 2 3", &inst).is_err());
        assert!(parse_layout("1 2 3 3", &inst).is_err());
        assert!(parse_layout("1 2 3 5", &inst).is_err());
        assert!(parse_layout("1 2 3 a", &inst).is_err());
        assert_eq!(parse_layout("4 3\n2 1", &inst).unwrap().order(), &[4, 3, 2, 1]);
    }

    #[test]
    fn metadata_comments() {
        let inst = Instance::new(Graph::edgeless(2)).with_comment("seed 17").with_comment("generator random-tree");
        assert_eq!(inst.meta("seed"), Some("17"));
        assert_eq!(inst.meta("generator"), Some("random-tree"));
        assert_eq!(inst.meta("missing"), None);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(5.0), "5.00000000000");
        assert_eq!(format_value(16.0), "16.0000000000");
        assert_eq!(format_value(0.0), "0.00000000000");
        assert_eq!(format_value(0.25), "0.250000000000");
        assert_eq!(format_value(-2.5), "-2.50000000000");
        assert_eq!(format_value(1234567.0), "1234567.00000");
    }

    #[test]
    fn tables() {
        assert_eq!(parse_table("1 0.5\n0.25 0").unwrap(), vec![1.0, 0.5, 0.25, 0.0]);
        assert!(parse_table("1 x").is_err());
    }
}
