//! Seeded generators of well-clustered graphs with a planted partition.

use alloc::{format, vec::Vec};

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Graph, Partition, Rational, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub graph: Graph,
    pub planted: Partition,
    /// Realized `φ` of every planted block.
    pub conductances: Vec<Rational>,
}

impl Generated {
    fn new(graph: Graph, planted: Partition) -> Result<Self> {
        let conductances = planted.conductances(&graph)?;
        Ok(Self {
            graph,
            planted,
            conductances,
        })
    }
}

/// `k` cliques `K_s` on a ring, `bridges` disjoint edges between neighbouring
/// cliques (a single pair when `k = 2`).
///
/// Seed 0 uses the canonical layout: bridge `b` joins node `s − 1 − b` of a
/// clique to node `b` of the next one, so `(k, s, bridges) = (2, 3, 1)` is the
/// barbell on six nodes. Any other seed draws the endpoints at random.
pub fn ring_of_cliques(k: usize, s: usize, bridges: usize, seed: u64) -> Result<Generated> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k}, need k >= 2")));
    }
    if s < 3 {
        return Err(Error::InvalidParameter(format!("clique size {s}, need >= 3")));
    }
    if bridges > s {
        return Err(Error::InvalidParameter(format!(
            "{bridges} bridges cannot have distinct endpoints in cliques of size {s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for c in 0..k {
        let base = c * s;
        for i in 0..s {
            for j in i + 1..s {
                edges.push((base + i, base + j));
            }
        }
    }
    let pairs = if k == 2 { 1 } else { k };
    for c in 0..pairs {
        let (from, to) = (c * s, ((c + 1) % k) * s);
        let (left, right): (Vec<usize>, Vec<usize>) = if seed == 0 {
            ((0..bridges).map(|b| s - 1 - b).collect(), (0..bridges).collect())
        } else {
            let mut l: Vec<usize> = (0..s).collect();
            let mut r: Vec<usize> = (0..s).collect();
            l.shuffle(&mut rng);
            r.shuffle(&mut rng);
            (l[..bridges].to_vec(), r[..bridges].to_vec())
        };
        for (a, b) in left.into_iter().zip(right) {
            edges.push((from + a, to + b));
        }
    }
    let graph = Graph::from_edges(k * s, edges)?;
    let planted = Partition::new(k * s, (0..k).map(|c| (c * s..(c + 1) * s).collect()).collect())?;
    Generated::new(graph, planted)
}

/// Closed-form conductance of every clique in [`ring_of_cliques`].
pub fn ring_block_conductance(k: usize, s: usize, bridges: usize) -> Rational {
    let cut = if k == 2 { bridges } else { 2 * bridges } as i128;
    Rational::new(cut, (s * (s - 1)) as i128 + cut)
}

/// Construction attempts before [`planted_partition`] gives up.
pub const PLANTED_MAX_RETRIES: usize = 100;

/// Stochastic block model with `k` blocks of `block_size` nodes: edges inside
/// blocks with probability `p_in`, across blocks with `p_out`.
///
/// Draws are repeated until no node is isolated and every block induces a
/// connected subgraph.
pub fn planted_partition(
    k: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<Generated> {
    if k < 2 || block_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "k = {k}, block size = {block_size}; need k >= 2 and size >= 2"
        )));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..p_in).contains(&p_out) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= p_out < p_in <= 1, got p_in = {p_in}, p_out = {p_out}"
        )));
    }
    let n = k * block_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<Vec<usize>> = (0..k)
        .map(|c| (c * block_size..(c + 1) * block_size).collect())
        .collect();
    let planted = Partition::new(n, blocks)?;
    for _ in 0..PLANTED_MAX_RETRIES {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let p = if planted.label(u) == planted.label(v) {
                    p_in
                } else {
                    p_out
                };
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let Ok(graph) = Graph::from_edges(n, edges) else {
            continue;
        };
        if blocks_connected(&graph, &planted) {
            return Generated::new(graph, planted);
        }
    }
    Err(Error::RetriesExhausted(PLANTED_MAX_RETRIES))
}

fn blocks_connected(g: &Graph, p: &Partition) -> bool {
    p.blocks().iter().enumerate().all(|(label, block)| {
        let mut seen = alloc::vec![false; g.node_count()];
        let mut stack = alloc::vec![block[0]];
        seen[block[0]] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !seen[w] && p.label(w) == label {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == block.len()
    })
}
