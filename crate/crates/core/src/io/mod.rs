//! File formats: edge lists, opinion and tweet-count files, instance JSON,
//! flat key-value configuration, and the experiment results CSV.

mod config;
mod records;

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{InstanceData, OpinionInstance, UndirectedGraph};

pub use config::{parse_config, ExperimentConfig};
pub use records::{append_records, format_float, read_records, write_records, ExperimentRecord, CSV_HEADER};

/// Meaningful lines of a text file with their 1-based line numbers; blank
/// lines and `#` comments are skipped.
fn content_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_owned()));
    }
    Ok(out)
}

fn parse_field<T: FromStr>(path: &Path, line: usize, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::parse(path, line, format!("cannot parse {what} from {field:?}")))
}

/// Reads an edge list: header `n m`, then `m` lines `u v` with 0-based
/// endpoints. Duplicate edges collapse; self-loops are rejected.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<UndirectedGraph> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    let Some((header_line, header)) = lines.first() else {
        return Err(Error::parse(path, 1, "missing `n m` header"));
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::parse(path, *header_line, "header must be `n m`"));
    }
    let n: usize = parse_field(path, *header_line, fields[0], "node count")?;
    let m: usize = parse_field(path, *header_line, fields[1], "edge count")?;
    if lines.len() - 1 != m {
        return Err(Error::parse(
            path,
            *header_line,
            format!("header declares {m} edges, file has {}", lines.len() - 1),
        ));
    }
    let mut g = UndirectedGraph::empty(n).map_err(|e| Error::parse(path, *header_line, e.to_string()))?;
    for (line, text) in &lines[1..] {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(path, *line, "expected `u v`"));
        }
        let u: usize = parse_field(path, *line, fields[0], "endpoint")?;
        let v: usize = parse_field(path, *line, fields[1], "endpoint")?;
        if u == v {
            return Err(Error::parse(path, *line, format!("self-loop at node {u}")));
        }
        if u >= n || v >= n {
            return Err(Error::parse(path, *line, format!("endpoint out of range for {n} nodes")));
        }
        g.insert_edge(u, v)?;
    }
    Ok(g)
}

pub fn save_edge_list(g: &UndirectedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    writeln!(out, "{} {}", g.node_count(), g.edge_count()).expect("write to Vec");
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("write to Vec");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Scale of raw opinion scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpinionScale {
    /// Sentiment scores from 0 (full opposition) to 10 (full support).
    ZeroTen,
    Unit,
}

impl FromStr for OpinionScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_ten" | "0-10" | "ten" => Ok(OpinionScale::ZeroTen),
            "unit" | "0-1" => Ok(OpinionScale::Unit),
            _ => Err(Error::InvalidParameter(format!("unknown opinion scale {s:?}"))),
        }
    }
}

/// One opinion per line, normalized to `[0, 1]`. Out-of-range values are
/// clamped with a warning. `expected` checks the count against the graph.
pub fn load_opinions(path: impl AsRef<Path>, scale: OpinionScale, expected: Option<usize>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    if let Some(n) = expected {
        if lines.len() != n {
            return Err(Error::DimensionMismatch {
                what: "opinion file entries",
                expected: n,
                actual: lines.len(),
            });
        }
    }
    lines
        .iter()
        .map(|(line, text)| {
            let raw: f64 = parse_field(path, *line, text, "opinion")?;
            if !raw.is_finite() {
                return Err(Error::parse(path, *line, "opinion must be finite"));
            }
            let value = match scale {
                OpinionScale::ZeroTen => raw / 10.0,
                OpinionScale::Unit => raw,
            };
            if !(0.0..=1.0).contains(&value) {
                warn!("{}:{line}: opinion {raw} outside the scale, clamped", path.display());
            }
            Ok(value.clamp(0.0, 1.0))
        })
        .collect()
}

pub fn save_opinions(values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// One nonnegative integer tweet count per line.
pub fn load_tweet_counts(path: impl AsRef<Path>, expected: Option<usize>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    if let Some(n) = expected {
        if lines.len() != n {
            return Err(Error::DimensionMismatch {
                what: "tweet count entries",
                expected: n,
                actual: lines.len(),
            });
        }
    }
    lines
        .iter()
        .map(|(line, text)| parse_field(path, *line, text, "tweet count"))
        .collect()
}

/// Resistance drawn from the band for a user's tweet count. Users with no
/// parsed tweets fall into the lowest band.
pub fn resistance_from_tweets(tweets: u64, rng: &mut impl Rng) -> f64 {
    let (low, high) = match tweets {
        0..=5 => (0.4, 0.6),
        6..=10 => (0.5, 0.7),
        11..=20 => (0.6, 0.8),
        _ => (0.7, 0.9),
    };
    rng.random_range(low..=high)
}

/// A real-world network with per-user opinions and optional tweet counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub graph: UndirectedGraph,
    pub opinions: Vec<f64>,
    pub tweet_counts: Option<Vec<u64>>,
}

impl DatasetBundle {
    pub fn load(
        edges: impl AsRef<Path>,
        opinions: impl AsRef<Path>,
        scale: OpinionScale,
        tweets: Option<&Path>,
    ) -> Result<Self> {
        let graph = load_edge_list(edges)?;
        let n = graph.node_count();
        let opinions = load_opinions(opinions, scale, Some(n))?;
        let tweet_counts = tweets.map(|p| load_tweet_counts(p, Some(n))).transpose()?;
        Ok(Self {
            graph,
            opinions,
            tweet_counts,
        })
    }

    /// Instance with tweet-based resistances when counts are present, and
    /// `default_resistance` everywhere otherwise.
    pub fn to_instance(&self, default_resistance: f64, rng: &mut impl Rng) -> Result<OpinionInstance> {
        let resistance = match &self.tweet_counts {
            Some(tw) => tw.iter().map(|&t| resistance_from_tweets(t, rng)).collect(),
            None => vec![default_resistance; self.graph.node_count()],
        };
        OpinionInstance::new(
            crate::graph::InfluenceMatrix::from_undirected(&self.graph),
            resistance,
            self.opinions.clone(),
        )
    }
}

pub fn save_instance(inst: &OpinionInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, &InstanceData::from(inst))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<OpinionInstance> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let data: InstanceData = serde_json::from_reader(BufReader::new(file))?;
    OpinionInstance::try_from(data)
}
