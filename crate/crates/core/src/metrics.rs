//! Objectives and analysis metrics. All averages use population (1/n)
//! normalization.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, UndirectedGraph};

/// Mean innate opinion, the crowd's estimate.
pub fn theta_hat(s: &[f64]) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("mean of an empty opinion vector".into()));
    }
    Ok(mean(s))
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Mean squared deviation of the equilibrium from `theta_hat`.
pub fn mse(x_star: &[f64], theta_hat: f64) -> f64 {
    x_star.iter().map(|x| (x - theta_hat).powi(2)).sum::<f64>() / x_star.len() as f64
}

/// Variance of the equilibrium about its own mean.
pub fn polarization(x_star: &[f64]) -> f64 {
    mse(x_star, mean(x_star))
}

pub fn bias_squared(x_star: &[f64], theta_hat: f64) -> f64 {
    (theta_hat - mean(x_star)).powi(2)
}

/// `|A ∩ B| / |A ∪ B|`, with `J(∅, ∅) = 1`.
pub fn jaccard(a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Signed percentage change `100 (after - before) / before`.
pub fn relative_change(before: f64, after: f64) -> Result<f64> {
    if !(before > 0.0) {
        return Err(Error::InvalidParameter(format!("relative change needs a positive baseline, got {before}")));
    }
    Ok(100.0 * (after - before) / before)
}

/// Objectives and decomposition for one equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub theta_hat: f64,
    pub theta_hat_star: f64,
    pub mse: f64,
    pub polarization: f64,
    pub bias_sq: f64,
}

impl MetricReport {
    pub fn new(innate: &[f64], x_star: &[f64]) -> Result<Self> {
        if innate.len() != x_star.len() {
            return Err(Error::DimensionMismatch {
                what: "equilibrium vector",
                expected: innate.len(),
                actual: x_star.len(),
            });
        }
        let theta_hat = theta_hat(innate)?;
        Ok(Self {
            theta_hat,
            theta_hat_star: mean(x_star),
            mse: mse(x_star, theta_hat),
            polarization: polarization(x_star),
            bias_sq: bias_squared(x_star, theta_hat),
        })
    }
}

/// Distance key for [`distance_group_mse`]; `None` means unreachable.
pub type Distance = Option<usize>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceGroup {
    pub mse: f64,
    pub size: usize,
}

/// Groups nodes by hop distance to the nearest stooge and reports the MSE of
/// each group. Finite distances sort before the unreachable group.
pub fn distance_group_mse(
    g: &UndirectedGraph,
    stooges: &BTreeSet<NodeId>,
    x_star: &[f64],
    theta_hat: f64,
) -> Result<BTreeMap<DistanceKey, DistanceGroup>> {
    let n = g.node_count();
    if stooges.is_empty() {
        return Err(Error::InvalidParameter("need at least one stooge".into()));
    }
    if x_star.len() != n {
        return Err(Error::DimensionMismatch {
            what: "equilibrium vector",
            expected: n,
            actual: x_star.len(),
        });
    }
    let mut dist: Vec<Distance> = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in stooges {
        if s >= n {
            return Err(Error::NodeOutOfRange { node: s, n });
        }
        dist[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued nodes have a distance");
        for &v in g.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }

    let mut sums: BTreeMap<DistanceKey, (f64, usize)> = BTreeMap::new();
    for (v, d) in dist.into_iter().enumerate() {
        let entry = sums.entry(DistanceKey(d)).or_default();
        entry.0 += (x_star[v] - theta_hat).powi(2);
        entry.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(k, (sq, size))| {
            (
                k,
                DistanceGroup {
                    mse: sq / size as f64,
                    size,
                },
            )
        })
        .collect())
}

/// Hop distance ordered with the unreachable group last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DistanceKey(pub Distance);

impl Ord for DistanceKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.0, other.0) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        }
    }
}

impl PartialOrd for DistanceKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for DistanceKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("inf"),
        }
    }
}
