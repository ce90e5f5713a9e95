//! Text formats: edge lists, partition sidecars and CSV dumps.
//!
//! Node ids are 1-based in every file and 0-based in memory.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use specgap_core::{Embedding, Graph, Partition, SpectralBasis};

use crate::report::RationalJson;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error(transparent)]
    Graph(#[from] specgap_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Parses an edge list: a header `n <count>` (or `n=<count>`), then one
/// `u v` pair per line. `#` starts a comment; `;` also separates lines.
pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut n = None;
    let mut edges = Vec::new();
    let records = text
        .lines()
        .enumerate()
        .flat_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("");
            line.split(';').map(move |r| (i + 1, r.trim()))
        })
        .filter(|(_, r)| !r.is_empty());
    for (line, record) in records {
        let err = |msg: String| FormatError::Parse { line, msg };
        let Some(count) = n else {
            let rest = record
                .strip_prefix('n')
                .ok_or(FormatError::MissingHeader)?
                .trim_start_matches([' ', '\t', '='].as_slice());
            let count: usize = rest
                .parse()
                .map_err(|_| err(format!("bad node count `{rest}`")))?;
            n = Some(count);
            continue;
        };
        let mut fields = record.split_whitespace();
        let mut id = |what: &str| -> Result<usize, FormatError> {
            let tok = fields.next().ok_or_else(|| err(format!("missing {what} endpoint")))?;
            let id: usize = tok.parse().map_err(|_| err(format!("bad node id `{tok}`")))?;
            if id == 0 || id > count {
                return Err(err(format!("node id {id} outside 1..={count}")));
            }
            Ok(id - 1)
        };
        let (u, v) = (id("first")?, id("second")?);
        if fields.next().is_some() {
            return Err(err("more than two fields".into()));
        }
        edges.push((u, v));
    }
    let n = n.ok_or(FormatError::MissingHeader)?;
    Ok(Graph::from_edges(n, edges)?)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.node_count());
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", u + 1, v + 1).expect("writing to a String");
    }
    out
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Partition file written next to generated graphs and clustering results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema: u32,
    /// Where the partition came from, e.g. `ring`, `planted` or `lloyd`.
    pub source: String,
    pub node_count: usize,
    /// 1-based node ids per block.
    pub blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conductances: Vec<RationalJson>,
    /// Closed-form block conductance, for families that have one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<RationalJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<serde_json::Value>,
}

impl Sidecar {
    pub fn new(source: &str, g: &Graph, p: &Partition) -> Result<Self, FormatError> {
        Ok(Self {
            schema: 1,
            source: source.into(),
            node_count: g.node_count(),
            blocks: one_based(p),
            conductances: p.conductances(g)?.iter().map(RationalJson::from).collect(),
            closed_form: None,
            parameters: None,
        })
    }

    pub fn partition(&self) -> Result<Partition, FormatError> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&v| {
                        v.checked_sub(1).ok_or(FormatError::Parse {
                            line: 0,
                            msg: "node ids are 1-based".into(),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(Partition::new(self.node_count, blocks)?)
    }
}

pub fn parse_sidecar(text: &str) -> Result<Sidecar, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn one_based(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks().iter().map(|b| b.iter().map(|v| v + 1).collect()).collect()
}

/// Header `node,f_1..f_k`, a `lambda` row with `λ_1..λ_k`, then one row per node.
pub fn format_eigen_csv(basis: &SpectralBasis) -> String {
    let k = basis.k();
    let mut out = String::from("node");
    for j in 1..=k {
        write!(out, ",f_{j}").unwrap();
    }
    out.push_str("\nlambda");
    for x in &basis.eigenvalues[..k] {
        write!(out, ",{x:?}").unwrap();
    }
    out.push('\n');
    for v in 0..basis.node_count() {
        write!(out, "{}", v + 1).unwrap();
        for x in basis.vectors.row(v) {
            write!(out, ",{x:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Header `node,weight,x_1..x_k`, then one row per node.
pub fn format_embedding_csv(e: &Embedding) -> String {
    let mut out = String::from("node,weight");
    for j in 1..=e.dim() {
        write!(out, ",x_{j}").unwrap();
    }
    out.push('\n');
    for v in 0..e.len() {
        write!(out, "{},{}", v + 1, e.weights[v]).unwrap();
        for x in e.point(v) {
            write!(out, ",{x:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_to_string(path: &Path) -> anyhow::Result<String> {
    use anyhow::Context;
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BARBELL: &str = "n 6\n1 2\n1 3\n2 3\n3 4\n4 5\n4 6\n5 6\n";

    #[test]
    fn parse_examples() {
        let tri = parse_edge_list("n=3; 1 2; 2 3; 1 3").unwrap();
        assert_eq!(tri.degrees(), &[2, 2, 2]);
        let bb = parse_edge_list("n=6; 1 2;1 3;2 3;4 5;4 6;5 6;3 4").unwrap();
        assert_eq!(bb.degrees(), &[2, 2, 3, 3, 2, 2]);
        assert!(matches!(
            parse_edge_list("n=2; 1 1"),
            Err(FormatError::Graph(specgap_core::Error::SelfLoop(0)))
        ));
    }

    #[test]
    fn comments_duplicates_and_errors() {
        let g = parse_edge_list("# header next\nn 3\n1 2 # first\n2 1\n\n2 3\n3 1\n").unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(matches!(parse_edge_list("1 2\n"), Err(FormatError::MissingHeader)));
        assert!(matches!(parse_edge_list("n 3\n1 4\n"), Err(FormatError::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("n 3\n1 2\n"), Err(FormatError::Graph(_))));
        assert!(parse_edge_list("n 3\n1 2 3\n").is_err());
        assert!(parse_edge_list("n x\n").is_err());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = parse_edge_list(BARBELL).unwrap();
        assert_eq!(format_edge_list(&g), BARBELL);
        let shuffled = parse_edge_list("n 6\n5 6\n3 4\n2 1\n6 4\n1 3\n4 5\n3 2\n").unwrap();
        assert_eq!(format_edge_list(&shuffled), BARBELL);
    }

    #[test]
    fn sidecar_round_trip() {
        let g = parse_edge_list(BARBELL).unwrap();
        let p = Partition::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let side = Sidecar::new("test", &g, &p).unwrap();
        assert_eq!(side.blocks, vec![vec![1, 2, 3], vec![4, 5, 6]]);
        let text = serde_json::to_string(&side).unwrap();
        let back = parse_sidecar(&text).unwrap();
        assert_eq!(back, side);
        assert_eq!(back.partition().unwrap(), p);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
