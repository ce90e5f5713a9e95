//! Undirected, unweighted simple graphs and the volume/conductance
//! combinatorics defined on node subsets.
//!
//! Node ids are 0-based here. Every node must have at least one neighbour, so
//! `D^{-1/2}` always exists and every nonempty set has positive volume.

use alloc::{vec, vec::Vec};

use crate::{Error, Rational, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    degrees: Vec<u64>,
    edge_count: usize,
}

impl Graph {
    /// Builds the canonical graph on `n` nodes from 0-based edge pairs.
    ///
    /// Repeated edges (in either orientation) collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let degrees: Vec<u64> = adjacency.iter().map(|l| l.len() as u64).collect();
        let total: u64 = degrees.iter().sum();
        if total == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::IsolatedNode(v));
        }
        Ok(Self {
            adjacency,
            degrees,
            edge_count: (total / 2) as usize,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// `2|E|`, the volume of the whole node set.
    pub fn total_volume(&self) -> u64 {
        2 * self.edge_count as u64
    }

    /// Disjoint union; nodes of `other` are shifted by `self.node_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.node_count();
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + shift, v + shift)));
        Graph::from_edges(shift + other.node_count(), edges)
            .expect("union of valid graphs is valid")
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Membership mask of a node set, rejecting out-of-range ids.
    pub fn mask(&self, set: &[usize]) -> Result<Vec<bool>> {
        let n = self.node_count();
        let mut mask = vec![false; n];
        for &v in set {
            if v >= n {
                return Err(Error::NodeOutOfRange { id: v, n });
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// `μ(S) = Σ_{v∈S} d_v`.
    pub fn volume(&self, set: &[usize]) -> Result<u64> {
        Ok(self.volume_of_mask(&self.mask(set)?))
    }

    /// `|E(S, V \ S)|`.
    pub fn boundary_edges(&self, set: &[usize]) -> Result<u64> {
        Ok(self.boundary_of_mask(&self.mask(set)?))
    }

    /// `φ(S) = |E(S, V \ S)| / μ(S)`, exact.
    pub fn conductance(&self, set: &[usize]) -> Result<Rational> {
        let mask = self.mask(set)?;
        let volume = self.volume_of_mask(&mask);
        if volume == 0 {
            return Err(Error::EmptySet);
        }
        Ok(Rational::new(
            self.boundary_of_mask(&mask) as i128,
            volume as i128,
        ))
    }

    /// `μ(A △ S) = μ(A \ S) + μ(S \ A)`.
    pub fn sym_diff_volume(&self, a: &[usize], s: &[usize]) -> Result<u64> {
        let a = self.mask(a)?;
        let s = self.mask(s)?;
        Ok(a.iter()
            .zip(&s)
            .zip(&self.degrees)
            .filter(|((x, y), _)| x != y)
            .map(|(_, &d)| d)
            .sum())
    }

    pub(crate) fn volume_of_mask(&self, mask: &[bool]) -> u64 {
        mask.iter()
            .zip(&self.degrees)
            .filter(|(m, _)| **m)
            .map(|(_, &d)| d)
            .sum()
    }

    pub(crate) fn boundary_of_mask(&self, mask: &[bool]) -> u64 {
        self.edges().filter(|&(u, v)| mask[u] != mask[v]).count() as u64
    }
}
