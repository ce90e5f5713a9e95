//! `k`-way node partitions, block conductances and block matching.

use alloc::{format, vec, vec::Vec};

use crate::{Error, Graph, Rational, Result};

/// A partition of `{0..n}` into `k ≥ 2` nonempty, pairwise disjoint blocks.
///
/// Blocks keep their given order; node ids inside a block are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(node_count: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least 2 blocks, got {}",
                blocks.len()
            )));
        }
        let mut labels = vec![usize::MAX; node_count];
        let mut blocks = blocks;
        for (i, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {i} is empty")));
            }
            block.sort_unstable();
            for &v in block.iter() {
                if v >= node_count {
                    return Err(Error::NodeOutOfRange {
                        id: v,
                        n: node_count,
                    });
                }
                if labels[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "node {v} appears in more than one block"
                    )));
                }
                labels[v] = i;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("node {v} is not covered")));
        }
        Ok(Self { blocks, labels })
    }

    /// Builds a partition from per-node block labels in `0..k`.
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        let mut blocks = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidPartition(format!(
                    "label {l} of node {v} is not below k = {k}"
                )));
            }
            blocks[l].push(v);
        }
        Self::new(labels.len(), blocks)
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    /// Same partition with blocks reordered so that new block `j` is old block `order[j]`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        Self::new(
            self.node_count(),
            order.iter().map(|&i| self.blocks[i].clone()).collect(),
        )
    }

    /// Block order that sorts blocks by their smallest node.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.k()).collect();
        order.sort_by_key(|&i| self.blocks[i][0]);
        order
    }

    pub(crate) fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.node_count() != g.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "partition covers {} nodes, graph has {}",
                self.node_count(),
                g.node_count()
            )));
        }
        Ok(())
    }

    pub fn volumes(&self, g: &Graph) -> Result<Vec<u64>> {
        self.check_graph(g)?;
        let mut vols = vec![0; self.k()];
        for (v, &l) in self.labels.iter().enumerate() {
            vols[l] += g.degree(v);
        }
        Ok(vols)
    }

    pub fn boundaries(&self, g: &Graph) -> Result<Vec<u64>> {
        self.check_graph(g)?;
        let mut cut = vec![0; self.k()];
        for (u, v) in g.edges() {
            let (a, b) = (self.labels[u], self.labels[v]);
            if a != b {
                cut[a] += 1;
                cut[b] += 1;
            }
        }
        Ok(cut)
    }

    pub fn conductances(&self, g: &Graph) -> Result<Vec<Rational>> {
        let vols = self.volumes(g)?;
        let cut = self.boundaries(g)?;
        Ok(cut
            .iter()
            .zip(&vols)
            .map(|(&c, &v)| Rational::new(c as i128, v as i128))
            .collect())
    }
}

/// `max_i φ(S_i)`.
pub fn max_conductance(g: &Graph, p: &Partition) -> Result<Rational> {
    Ok(p.conductances(g)?
        .into_iter()
        .max()
        .expect("partitions have at least two blocks"))
}

/// `(1/k) Σ_i φ(S_i)`, exact. Fails only if the exact sum overflows `i128`.
pub fn avg_conductance(g: &Graph, p: &Partition) -> Result<Rational> {
    use num_traits::CheckedAdd;
    let k = p.k() as i128;
    let mut sum = Rational::from_integer(0);
    for phi in p.conductances(g)? {
        sum = sum.checked_add(&phi).ok_or_else(|| {
            Error::InvalidParameter(format!("average conductance overflows for k = {k}"))
        })?;
    }
    Ok(sum / k)
}

/// Floating-point average conductance; never overflows.
pub fn avg_conductance_f64(g: &Graph, p: &Partition) -> Result<f64> {
    let vols = p.volumes(g)?;
    let cut = p.boundaries(g)?;
    let sum: f64 = cut.iter().zip(&vols).map(|(&c, &v)| c as f64 / v as f64).sum();
    Ok(sum / p.k() as f64)
}

/// Renumbering of `a` against `s`: block `a_i` is paired with `s_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub perm: Vec<usize>,
    /// `μ(A_i △ S_{perm[i]})` per `i`.
    pub diffs: Vec<u64>,
}

impl Matching {
    pub fn total(&self) -> u64 {
        self.diffs.iter().sum()
    }
}

/// Largest `k` solved by exhaustive permutation search.
pub const BRUTE_FORCE_MAX_K: usize = 8;

/// Pairs the blocks of `a` with those of `s` minimizing `Σ_i μ(A_i △ S_{π(i)})`.
///
/// Up to [`BRUTE_FORCE_MAX_K`] blocks every permutation is tried in
/// lexicographic order and the first optimum wins; above that the Hungarian
/// method solves the assignment problem.
pub fn match_partitions(g: &Graph, a: &Partition, s: &Partition) -> Result<Matching> {
    if a.k() != s.k() {
        return Err(Error::DimensionMismatch(format!(
            "partitions have {} and {} blocks",
            a.k(),
            s.k()
        )));
    }
    a.check_graph(g)?;
    s.check_graph(g)?;
    let cost = sym_diff_matrix(g, a, s);
    let perm = if a.k() <= BRUTE_FORCE_MAX_K {
        brute_force_assignment(&cost)
    } else {
        hungarian(&cost)
    };
    let diffs = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).collect();
    Ok(Matching { perm, diffs })
}

/// `cost[i][j] = μ(A_i △ S_j)`.
pub(crate) fn sym_diff_matrix(g: &Graph, a: &Partition, s: &Partition) -> Vec<Vec<u64>> {
    let k = a.k();
    // μ(A_i △ S_j) = μ(A_i) + μ(S_j) - 2 μ(A_i ∩ S_j)
    let mut overlap = vec![vec![0u64; k]; k];
    for v in 0..g.node_count() {
        overlap[a.label(v)][s.label(v)] += g.degree(v);
    }
    let va: Vec<u64> = overlap.iter().map(|row| row.iter().sum()).collect();
    let vs: Vec<u64> = (0..k).map(|j| overlap.iter().map(|row| row[j]).sum()).collect();
    (0..k)
        .map(|i| (0..k).map(|j| va[i] + vs[j] - 2 * overlap[i][j]).collect())
        .collect()
}

pub(crate) fn brute_force_assignment(cost: &[Vec<u64>]) -> Vec<usize> {
    let k = cost.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    let mut best_cost = u64::MAX;
    loop {
        let c: u64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        if c < best_cost {
            best_cost = c;
            best.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

/// Advances to the next permutation in lexicographic order.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Hungarian method with potentials, O(k³). Returns `perm[row] = column`.
fn hungarian(cost: &[Vec<u64>]) -> Vec<usize> {
    let n = cost.len();
    let c = |i: usize, j: usize| cost[i - 1][j - 1] as i128;
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i128::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i128::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = c(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;

    fn part(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validity() {
        assert!(Partition::new(3, vec![vec![0, 1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(Partition::new(3, vec![vec![0], vec![1, 3]]).is_err());
        let p = Partition::from_labels(&[1, 0, 1], 2).unwrap();
        assert_eq!(p.blocks(), &[vec![1], vec![0, 2]]);
    }

    #[test]
    fn block_conductances() {
        let b = barbell6();
        let halves = part(6, &[&[0, 1, 2], &[3, 4, 5]]);
        assert_eq!(max_conductance(&b, &halves).unwrap(), Rational::new(1, 7));
        assert_eq!(avg_conductance(&b, &halves).unwrap(), Rational::new(1, 7));
        let tt = two_triangles();
        assert_eq!(max_conductance(&tt, &halves).unwrap(), Rational::new(0, 1));
        assert_eq!(avg_conductance(&tt, &halves).unwrap(), Rational::new(0, 1));
        let lopsided = part(6, &[&[2], &[0, 1, 3, 4, 5]]);
        assert_eq!(max_conductance(&b, &lopsided).unwrap(), Rational::new(1, 1));
        assert_eq!(avg_conductance(&b, &lopsided).unwrap(), Rational::new(7, 11));
        assert!((avg_conductance_f64(&b, &lopsided).unwrap() - 7.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn volumes_sum_to_total() {
        let b = barbell6();
        let p = part(6, &[&[0, 5], &[1, 3], &[2, 4]]);
        assert_eq!(p.volumes(&b).unwrap().iter().sum::<u64>(), b.total_volume());
    }

    #[test]
    fn matching_examples() {
        let b = barbell6();
        let halves = part(6, &[&[0, 1, 2], &[3, 4, 5]]);
        let m = match_partitions(&b, &halves, &halves).unwrap();
        assert_eq!(m.perm, vec![0, 1]);
        assert_eq!(m.diffs, vec![0, 0]);

        let swapped = part(6, &[&[3, 4, 5], &[0, 1, 2]]);
        let m = match_partitions(&b, &halves, &swapped).unwrap();
        assert_eq!(m.perm, vec![1, 0]);
        assert_eq!(m.diffs, vec![0, 0]);

        // identity: 3 + 3; swap: μ({0..3}△{3,4,5}) + μ({4,5}△{0,1,2}) = 11 + 11
        let a = part(6, &[&[0, 1, 2, 3], &[4, 5]]);
        let m = match_partitions(&b, &a, &halves).unwrap();
        assert_eq!(m.perm, vec![0, 1]);
        assert_eq!(m.diffs, vec![3, 3]);

        let three = part(6, &[&[0], &[1], &[2, 3, 4, 5]]);
        assert!(match_partitions(&b, &three, &halves).is_err());
    }

    #[test]
    fn lexicographic_tie_break() {
        // every assignment costs the same
        let cost = vec![vec![1; 3]; 3];
        assert_eq!(brute_force_assignment(&cost), vec![0, 1, 2]);
    }

    #[test]
    fn permutations_in_order() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    fn total(cost: &[Vec<u64>], perm: &[usize]) -> u64 {
        perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force(
            cost in (1usize..7).prop_flat_map(|k| {
                proptest::collection::vec(proptest::collection::vec(0u64..50, k), k)
            })
        ) {
            let h = hungarian(&cost);
            let mut sorted = h.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..cost.len()).collect::<Vec<_>>());
            prop_assert_eq!(total(&cost, &h), total(&cost, &brute_force_assignment(&cost)));
        }
    }

    #[test]
    fn large_k_uses_assignment_solver() {
        // ten singleton-ish blocks on a path, second partition is a rotation
        let n = 20;
        let edges = (0..n - 1).map(|v| (v, v + 1));
        let g = Graph::from_edges(n, edges).unwrap();
        let a: Vec<Vec<usize>> = (0..10).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let s: Vec<Vec<usize>> = (0..10).map(|i| a[(i + 3) % 10].clone()).collect();
        let a = Partition::new(n, a).unwrap();
        let s = Partition::new(n, s).unwrap();
        let m = match_partitions(&g, &a, &s).unwrap();
        assert_eq!(m.total(), 0);
        for (i, &j) in m.perm.iter().enumerate() {
            assert_eq!(a.block(i), s.block(j));
        }
    }
}
