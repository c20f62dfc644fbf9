//! Intersection digraph: `i -> j` iff `i` demands an attribute that `j` supplies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::BipartiteDigraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range for a graph on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
}

/// Simple digraph with sorted out- and in-adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Self { n, out_adj: vec![Vec::new(); n], in_adj: vec![Vec::new(); n] }
    }

    /// Complete digraph: every ordered pair of distinct nodes.
    pub fn complete(n: usize) -> Self {
        let out_adj: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n as u32).filter(|&j| j as usize != i).collect())
            .collect();
        let in_adj = out_adj.clone();
        Self { n, out_adj, in_adj }
    }

    /// Builds from an edge list, rejecting self-loops, out-of-range ids and duplicates.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut out_adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            out_adj[u].push(v as u32);
        }
        for (u, row) in out_adj.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u, w[0] as usize));
            }
        }
        Ok(Self::from_out_adjacency(out_adj))
    }

    /// `out_adj` rows must already be sorted, deduplicated and loop-free.
    fn from_out_adjacency(out_adj: Vec<Vec<u32>>) -> Self {
        let n = out_adj.len();
        let mut in_adj = vec![Vec::new(); n];
        for (u, row) in out_adj.iter().enumerate() {
            for &v in row {
                in_adj[v as usize].push(u as u32);
            }
        }
        Self { n, out_adj, in_adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[u32] {
        &self.in_adj[i]
    }

    pub fn out_degree(&self, i: usize) -> Result<usize, GraphError> {
        self.check(i)?;
        Ok(self.out_adj[i].len())
    }

    pub fn in_degree(&self, i: usize) -> Result<usize, GraphError> {
        self.check(i)?;
        Ok(self.in_adj[i].len())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.out_adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u, v as usize)))
    }

    pub(crate) fn check(&self, i: usize) -> Result<(), GraphError> {
        if i < self.n {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange { node: i, n: self.n })
        }
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let edges: Vec<(usize, usize)> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Self::from_edges(self.n, &edges).expect("a permutation preserves simplicity")
    }
}

/// Projects `H` onto the actors.
///
/// Each actor's out-list is the union of supplier lists over its demanded
/// attributes, sorted and deduplicated, with the actor itself removed.
pub fn project(h: &BipartiteDigraph) -> Digraph {
    let out_adj: Vec<Vec<u32>> = (0..h.n())
        .into_par_iter()
        .map(|i| {
            let mut targets: Vec<u32> = h
                .demand(i)
                .iter()
                .flat_map(|&k| h.supply(k as usize).iter().copied())
                .filter(|&j| j as usize != i)
                .collect();
            targets.sort_unstable();
            targets.dedup();
            targets
        })
        .collect();
    Digraph::from_out_adjacency(out_adj)
}
