//! Text formats: tab-separated edge lists (optional `# n=<count>` header),
//! headerless feature CSV, and `<node>\t<label>` partition files.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! save-then-load reproduces values bit for bit.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::{Edge, Graph, NodeFeatures, Partition};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub graph: Graph,
    /// Self-loops and duplicate / reversed pairs collapsed on ingestion.
    pub dropped: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn parse_header(line: &str) -> Option<&str> {
    line.trim_start_matches('#').trim().strip_prefix("n=")
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListLoad> {
    let mut declared_n = None;
    let mut pairs: Vec<Edge> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(value) = parse_header(line) {
                let n = value.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad node count {value:?}"),
                })?;
                declared_n = Some(n);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected two node ids, got {line:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid node id {s:?}"),
            })
        };
        pairs.push((parse(a)?, parse(b)?));
    }
    let max_id = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared_n.unwrap_or(max_id);
    let (graph, dropped) = Graph::from_edges_lenient(n, &pairs)?;
    Ok(EdgeListLoad { graph, dropped })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let loaded = parse_edge_list(&read(path)?)?;
    if loaded.dropped > 0 {
        log::warn!(
            "{}: collapsed {} duplicate, reversed or self-loop pairs",
            path.display(),
            loaded.dropped
        );
    }
    Ok(loaded.graph)
}

/// Edge list with arbitrary string ids. Ids are mapped to `0..n` in
/// lexicographic order; the returned vector maps dense id to name.
pub fn load_named_edge_list(path: impl AsRef<Path>) -> Result<(Graph, Vec<String>)> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut raw_pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected two node ids, got {line:?}"),
            });
        };
        raw_pairs.push((a.to_string(), b.to_string()));
    }
    let names: Vec<String> = raw_pairs
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let id = |s: &String| names.binary_search(s).expect("name collected above");
    let pairs: Vec<Edge> = raw_pairs.iter().map(|(a, b)| (id(a), id(b))).collect();
    let (graph, dropped) = Graph::from_edges_lenient(names.len(), &pairs)?;
    if dropped > 0 {
        log::warn!("{}: collapsed {dropped} pairs", path.display());
    }
    Ok((graph, names))
}

pub fn save_id_map(path: impl AsRef<Path>, names: &[String]) -> Result<()> {
    let mut out = String::new();
    for (i, name) in names.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{name}");
    }
    write(path.as_ref(), &out)
}

pub fn save_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let mut out = format!("# n={}\n", g.n());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u}\t{v}");
    }
    write(path.as_ref(), &out)
}

/// Loads a headerless CSV feature matrix. With `expected_rows`, a row-count
/// mismatch is reported as `DimensionMismatch`.
pub fn load_features(path: impl AsRef<Path>, expected_rows: Option<usize>) -> Result<NodeFeatures> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        msg: format!("invalid feature value {s:?}"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {} columns, got {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if let Some(n) = expected_rows {
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.len(),
            });
        }
    }
    let d = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let data = Array2::from_shape_vec((flat.len() / d.max(1), d), flat)
        .map_err(|e| Error::InvalidParam(e.to_string()))?;
    NodeFeatures::new(data)
}

pub fn save_features(path: impl AsRef<Path>, x: &NodeFeatures) -> Result<()> {
    let mut out = String::new();
    for row in x.matrix().rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    write(path.as_ref(), &out)
}

pub fn save_partition(path: impl AsRef<Path>, p: &Partition) -> Result<()> {
    let mut out = String::new();
    for (u, l) in p.labels().iter().enumerate() {
        let _ = writeln!(out, "{u}\t{l}");
    }
    write(path.as_ref(), &out)
}

pub fn load_partition(path: impl AsRef<Path>, expected_n: Option<usize>) -> Result<Partition> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad(format!("expected node and label, got {line:?}")));
        };
        let node = a.parse::<usize>().map_err(|_| bad(format!("invalid node {a:?}")))?;
        let label = b.parse::<usize>().map_err(|_| bad(format!("invalid label {b:?}")))?;
        entries.push((i + 1, node, label));
    }
    let n = expected_n.unwrap_or(entries.len());
    let mut labels = vec![None; n];
    for (line, node, label) in entries {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
        if labels[node].replace(label).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("node {node} listed twice"),
            });
        }
    }
    let covered = labels.iter().filter(|l| l.is_some()).count();
    if covered != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: covered,
        });
    }
    Ok(Partition::new(labels.into_iter().flatten().collect()))
}
