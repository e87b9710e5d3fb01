//! Distance partition of a graph around a reference vertex.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{Graph, GraphError};

/// `strata[k]` holds the vertices at graph distance `k` from `reference`,
/// ascending. Vertices outside the reference component appear in no stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stratification {
    pub reference: usize,
    pub strata: Vec<Vec<usize>>,
    /// True when some vertices are unreachable from the reference.
    pub proper_component: bool,
    #[serde(skip)]
    distance: Vec<Option<usize>>,
}

impl Stratification {
    pub fn depth(&self) -> usize {
        self.strata.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.strata.iter().map(Vec::len).collect()
    }

    /// Stratum index of `v`, or `None` when `v` is unreachable.
    pub fn distance(&self, v: usize) -> Option<usize> {
        self.distance.get(v).copied().flatten()
    }

    pub fn component_size(&self) -> usize {
        self.strata.iter().map(Vec::len).sum()
    }

    pub fn component(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.strata.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Checks the layering invariants against `g`: every vertex of stratum
    /// `k >= 1` has a neighbor in stratum `k - 1`, and no edge spans two or
    /// more strata.
    pub fn check(&self, g: &Graph) -> bool {
        if self.strata.first().map(Vec::as_slice) != Some(&[self.reference][..]) {
            return false;
        }
        for (k, stratum) in self.strata.iter().enumerate() {
            for &v in stratum {
                if self.distance(v) != Some(k) {
                    return false;
                }
                let mut has_parent = k == 0;
                for &w in g.neighbors(v) {
                    match self.distance(w) {
                        Some(j) if j.abs_diff(k) >= 2 => return false,
                        Some(j) if j + 1 == k => has_parent = true,
                        None => return false,
                        _ => {}
                    }
                }
                if !has_parent {
                    return false;
                }
            }
        }
        true
    }
}

/// Breadth-first distance partition from `o`.
pub fn stratify(g: &Graph, o: usize) -> Result<Stratification, GraphError> {
    let n = g.vertex_count();
    if o >= n {
        return Err(GraphError::IndexOutOfRange { vertex: o, n });
    }
    let mut distance = vec![None; n];
    distance[o] = Some(0);
    let mut strata: Vec<Vec<usize>> = vec![vec![o]];
    let mut queue = VecDeque::from([o]);
    while let Some(u) = queue.pop_front() {
        let d = distance[u].expect("queued vertices have a distance");
        for &w in g.neighbors(u) {
            if distance[w].is_none() {
                distance[w] = Some(d + 1);
                if strata.len() <= d + 1 {
                    strata.push(Vec::new());
                }
                strata[d + 1].push(w);
                queue.push_back(w);
            }
        }
    }
    for s in &mut strata {
        s.sort_unstable();
    }
    let reached: usize = strata.iter().map(Vec::len).sum();
    Ok(Stratification {
        reference: o,
        strata,
        proper_component: reached < n,
        distance,
    })
}
