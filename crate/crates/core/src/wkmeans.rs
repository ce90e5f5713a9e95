//! Degree-weighted k-means on an [`Embedding`].
//!
//! Node `v` stands for `d_v` identical copies of `F(v)`. Assignments are made
//! per node, so all copies of a point always land in the same cluster, and
//! the weighted cost `Σ_i Σ_{v∈A_i} d_v ‖F(v) − z_i‖²` equals the plain
//! k-means cost on the expanded multiset.

use alloc::{format, vec, vec::Vec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{
    linalg::dist_sq, Embedding, Error, Matrix, Partition, Result,
};

/// Points closer than this are treated as the same point.
pub const DISTINCT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydConfig {
    pub max_iters: usize,
    /// Stop once the relative cost decrease of an iteration drops below this.
    pub rel_tol: f64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub partition: Partition,
    /// `k × dim`; row `i` is the weighted centroid of block `i`.
    pub centers: Matrix,
    pub cost: f64,
    pub iterations: usize,
    pub seed: u64,
    /// False when the run stopped at `max_iters`.
    pub converged: bool,
    /// Cost after each iteration.
    pub cost_trace: Vec<f64>,
}

fn check_partition(e: &Embedding, p: &Partition) -> Result<()> {
    if p.node_count() != e.len() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} nodes, embedding has {}",
            p.node_count(),
            e.len()
        )));
    }
    Ok(())
}

/// `D(A_1..A_k, c_1..c_k) = Σ_i Σ_{v∈A_i} d_v ‖F(v) − c_i‖²`.
pub fn cluster_cost(e: &Embedding, p: &Partition, centers: &Matrix) -> Result<f64> {
    check_partition(e, p)?;
    if centers.rows() != p.k() || centers.cols() != e.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} centers for {} blocks in dimension {}",
            centers.rows(),
            centers.cols(),
            p.k(),
            e.dim()
        )));
    }
    Ok(labelled_cost(e, p.labels(), centers))
}

fn labelled_cost(e: &Embedding, labels: &[usize], centers: &Matrix) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(v, &l)| e.weights[v] as f64 * dist_sq(e.point(v), centers.row(l)))
        .sum()
}

/// Weighted centroid of every block.
pub fn weighted_centroids(e: &Embedding, p: &Partition) -> Result<Matrix> {
    check_partition(e, p)?;
    Ok(labelled_centroids(e, p.labels(), p.k()))
}

fn labelled_centroids(e: &Embedding, labels: &[usize], k: usize) -> Matrix {
    let mut sums = Matrix::zeros(k, e.dim());
    let mut mass = vec![0.0; k];
    for (v, &l) in labels.iter().enumerate() {
        let w = e.weights[v] as f64;
        mass[l] += w;
        for (s, x) in sums.row_mut(l).iter_mut().zip(e.point(v)) {
            *s += w * x;
        }
    }
    for (l, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            sums.row_mut(l).iter_mut().for_each(|s| *s /= m);
        }
    }
    sums
}

/// Groups nodes whose points lie within [`DISTINCT_TOLERANCE`] of a group's
/// first member. Groups are ordered by their first node.
pub fn distinct_groups(e: &Embedding) -> Vec<Vec<usize>> {
    let tol_sq = DISTINCT_TOLERANCE * DISTINCT_TOLERANCE;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in 0..e.len() {
        match groups
            .iter_mut()
            .find(|g| dist_sq(e.point(g[0]), e.point(v)) <= tol_sq)
        {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    groups
}

fn check_input(e: &Embedding, k: usize) -> Result<()> {
    if let Some(v) = (0..e.len()).find(|&v| e.point(v).iter().any(|x| !x.is_finite())) {
        return Err(Error::NonFinite(v));
    }
    if k == 0 {
        return Err(Error::InvalidK {
            k,
            reason: "need at least one cluster",
        });
    }
    if k > distinct_groups(e).len() {
        return Err(Error::InvalidK {
            k,
            reason: "more clusters than distinct embedded points",
        });
    }
    Ok(())
}

/// Index drawn with probability proportional to `weights`.
fn sample_weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}

/// k-means++ on the expanded multiset: first center ∝ `d_v`, the rest
/// ∝ `d_v · dist²` to the nearest chosen center.
fn seed_centers(e: &Embedding, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let tol_sq = DISTINCT_TOLERANCE * DISTINCT_TOLERANCE;
    let n = e.len();
    let mut centers = Matrix::zeros(k, e.dim());
    let weights: Vec<f64> = e.weights.iter().map(|&d| d as f64).collect();
    let first = sample_weighted(rng, &weights);
    centers.row_mut(0).copy_from_slice(e.point(first));
    let mut nearest: Vec<f64> = (0..n).map(|v| dist_sq(e.point(v), e.point(first))).collect();
    for c in 1..k {
        let scores: Vec<f64> = (0..n)
            .map(|v| {
                if nearest[v] <= tol_sq {
                    0.0
                } else {
                    weights[v] * nearest[v]
                }
            })
            .collect();
        let pick = sample_weighted(rng, &scores);
        centers.row_mut(c).copy_from_slice(e.point(pick));
        for (v, best) in nearest.iter_mut().enumerate() {
            *best = best.min(dist_sq(e.point(v), e.point(pick)));
        }
    }
    centers
}

/// Nearest center per node; ties go to the lowest center index.
fn assign(e: &Embedding, centers: &Matrix, labels: &mut [usize]) {
    for (v, label) in labels.iter_mut().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..centers.rows() {
            let d = dist_sq(e.point(v), centers.row(c));
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        *label = best;
    }
}

/// Refills each empty cluster with the node of largest weighted distance to
/// its center, taken from a cluster that keeps at least one member.
fn repair_empty(e: &Embedding, centers: &mut Matrix, labels: &mut [usize]) {
    let k = centers.rows();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (v, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let score = e.weights[v] as f64 * dist_sq(e.point(v), centers.row(l));
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((v, score));
            }
        }
        let (v, _) = best.expect("k never exceeds the node count");
        sizes[labels[v]] -= 1;
        labels[v] = empty;
        sizes[empty] = 1;
        centers.row_mut(empty).copy_from_slice(e.point(v));
    }
}

/// Weighted Lloyd iteration from k-means++ seeding. Deterministic in `seed`.
pub fn lloyd(e: &Embedding, k: usize, seed: u64, config: &LloydConfig) -> Result<ClusteringResult> {
    check_input(e, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seed_centers(e, k, &mut rng);
    let mut labels = vec![0; e.len()];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        assign(e, &centers, &mut labels);
        repair_empty(e, &mut centers, &mut labels);
        centers = labelled_centroids(e, &labels, k);
        let cost = labelled_cost(e, &labels, &centers);
        trace.push(cost);
        if cost == 0.0 || (prev.is_finite() && prev - cost <= config.rel_tol * prev) {
            converged = true;
            break;
        }
        prev = cost;
    }
    let partition = Partition::from_labels(&labels, k)?;
    let cost = labelled_cost(e, &labels, &centers);
    Ok(ClusteringResult {
        partition,
        centers,
        cost,
        iterations,
        seed,
        converged,
        cost_trace: trace,
    })
}

/// Lowest-cost run over `seeds`; the earliest seed wins ties.
pub fn best_of(
    e: &Embedding,
    k: usize,
    seeds: &[u64],
    config: &LloydConfig,
) -> Result<ClusteringResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("empty seed list".into()));
    }
    let mut best: Option<ClusteringResult> = None;
    for &seed in seeds {
        let run = lloyd(e, k, seed, config)?;
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    Ok(best.expect("seed list is nonempty"))
}

/// Result for a given partition, with centers at the weighted centroids.
pub fn evaluate_partition(e: &Embedding, p: &Partition) -> Result<ClusteringResult> {
    let centers = weighted_centroids(e, p)?;
    let cost = cluster_cost(e, p, &centers)?;
    Ok(ClusteringResult {
        partition: p.clone(),
        centers,
        cost,
        iterations: 0,
        seed: 0,
        converged: true,
        cost_trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{embed_njw, embed_sm, EmbeddingKind};
    use crate::graph::fixtures::*;
    use crate::spectra::bottom_k;
    use crate::Graph;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn toy(points: &[f64], weights: &[u64]) -> Embedding {
        let rows: Vec<[f64; 1]> = points.iter().map(|&x| [x]).collect();
        Embedding::from_points(
            EmbeddingKind::Sm,
            Matrix::from_rows(&rows).unwrap(),
            weights.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn cost_examples() {
        let zero = Embedding::from_points(EmbeddingKind::Sm, Matrix::zeros(4, 2), vec![1; 4]).unwrap();
        let p = Partition::from_labels(&[0, 0, 1, 1], 2).unwrap();
        assert_eq!(cluster_cost(&zero, &p, &Matrix::zeros(2, 2)).unwrap(), 0.0);

        // one block {0, 1} with weights (1, 3): centroid 3/4, cost 3/16 + 3/16 = 3/4;
        // a second singleton block at 10 contributes nothing
        let e = toy(&[0.0, 1.0, 10.0], &[1, 3, 1]);
        let p = Partition::from_labels(&[0, 0, 1], 2).unwrap();
        let c = weighted_centroids(&e, &p).unwrap();
        assert_eq!(c.row(0), &[0.75]);
        assert_abs_diff_eq!(cluster_cost(&e, &p, &c).unwrap(), 0.75, epsilon = 1e-15);
        assert!(cluster_cost(&e, &p, &Matrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn planted_two_triangles_cost_zero() {
        let g = two_triangles();
        let e = embed_sm(&bottom_k(&g, 2).unwrap(), &g).unwrap();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1], 2).unwrap();
        let c = weighted_centroids(&e, &p).unwrap();
        assert!(cluster_cost(&e, &p, &c).unwrap() < 1e-28);
    }

    #[test]
    fn recovers_two_triangles() {
        let g = two_triangles();
        let basis = bottom_k(&g, 2).unwrap();
        for e in [embed_sm(&basis, &g).unwrap(), embed_njw(&basis, &g).unwrap()] {
            for seed in 0..10 {
                let r = lloyd(&e, 2, seed, &LloydConfig::default()).unwrap();
                assert!(r.cost < 1e-28);
                let mut blocks = r.partition.blocks().to_vec();
                blocks.sort();
                assert_eq!(blocks, vec![vec![0, 1, 2], vec![3, 4, 5]]);
            }
        }
    }

    #[test]
    fn singletons_when_k_equals_n() {
        let e = toy(&[0.0, 1.0, 3.0, 7.0], &[1, 2, 1, 2]);
        let r = lloyd(&e, 4, 3, &LloydConfig::default()).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.partition.blocks().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn input_errors() {
        let e = toy(&[0.0, 0.0, 1.0], &[1, 1, 1]);
        assert!(matches!(
            lloyd(&e, 3, 0, &LloydConfig::default()),
            Err(Error::InvalidK { .. })
        ));
        let bad = toy(&[0.0, f64::NAN, 1.0], &[1, 1, 1]);
        assert_eq!(lloyd(&bad, 2, 0, &LloydConfig::default()), Err(Error::NonFinite(1)));
        assert!(best_of(&e, 2, &[], &LloydConfig::default()).is_err());
    }

    #[test]
    fn single_seed_best_of_is_lloyd() {
        let g = barbell6();
        let e = embed_sm(&bottom_k(&g, 2).unwrap(), &g).unwrap();
        let cfg = LloydConfig::default();
        assert_eq!(best_of(&e, 2, &[7], &cfg).unwrap(), lloyd(&e, 2, 7, &cfg).unwrap());
    }

    #[test]
    fn barbell_halves() {
        let g = barbell6();
        let e = embed_sm(&bottom_k(&g, 2).unwrap(), &g).unwrap();
        let seeds: Vec<u64> = (1..=20).collect();
        let r = best_of(&e, 2, &seeds, &LloydConfig::default()).unwrap();
        let mut blocks = r.partition.blocks().to_vec();
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        for &s in &seeds {
            assert!(r.cost <= lloyd(&e, 2, s, &LloydConfig::default()).unwrap().cost);
        }
    }

    #[test]
    fn repair_fills_empty_cluster() {
        let e = toy(&[0.0, 1.0, 5.0, 6.0], &[1, 1, 1, 4]);
        let mut centers = Matrix::from_rows(&[[0.0], [100.0], [5.5]]).unwrap();
        let mut labels = vec![0; 4];
        assign(&e, &centers, &mut labels);
        assert_eq!(labels, vec![0, 0, 2, 2]);
        repair_empty(&e, &mut centers, &mut labels);
        // candidates: node 1 (0.0 + 1·1), node 2 (0.25), node 3 (4·0.25 = 1); node 1 wins the tie
        assert_eq!(labels, vec![0, 1, 2, 2]);
    }

    fn random_embedding(seed: u64, n: usize, dim: usize) -> Embedding {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = Matrix::from_fn(n, dim, |_, _| rng.random_range(-1.0..1.0));
        let weights = (0..n).map(|_| rng.random_range(1..6)).collect();
        Embedding::from_points(EmbeddingKind::Sm, points, weights).unwrap()
    }

    proptest! {
        #[test]
        fn expansion_equivalence(seed in any::<u64>(), n in 2usize..11, k in 2usize..4) {
            let e = random_embedding(seed, n, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            let labels: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.random_range(0..k) }).collect();
            prop_assume!(k <= n);
            let p = Partition::from_labels(&labels, k).unwrap();
            let centers = Matrix::from_fn(k, 3, |_, _| rng.random_range(-1.0..1.0));
            let weighted = cluster_cost(&e, &p, &centers).unwrap();
            let mut expanded = 0.0;
            for (v, &label) in labels.iter().enumerate() {
                for _ in 0..e.weights[v] {
                    expanded += dist_sq(e.point(v), centers.row(label));
                }
            }
            prop_assert!((weighted - expanded).abs() <= 1e-12 * expanded.max(1e-300));
        }

        #[test]
        fn lloyd_monotone_and_consistent(seed in any::<u64>(), n in 4usize..30) {
            let e = random_embedding(seed, n, 2);
            let r = lloyd(&e, 3, seed, &LloydConfig::default()).unwrap();
            for w in r.cost_trace.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
            let recomputed = cluster_cost(&e, &r.partition, &r.centers).unwrap();
            prop_assert!((recomputed - r.cost).abs() <= 1e-12 * r.cost.max(1e-300));
            let centroids = weighted_centroids(&e, &r.partition).unwrap();
            let at_centroids = cluster_cost(&e, &r.partition, &centroids).unwrap();
            prop_assert!(r.cost - at_centroids <= 1e-12 * r.cost.max(1e-300));
            prop_assert_eq!(r.clone(), lloyd(&e, 3, seed, &LloydConfig::default()).unwrap());
        }

        #[test]
        fn relabeling_keeps_cost(seed in any::<u64>()) {
            let e = random_embedding(seed, 8, 2);
            let p = Partition::from_labels(&[0, 1, 2, 0, 1, 2, 0, 1], 3).unwrap();
            let c = weighted_centroids(&e, &p).unwrap();
            let q = p.reordered(&[2, 0, 1]).unwrap();
            let cq = weighted_centroids(&e, &q).unwrap();
            let a = cluster_cost(&e, &p, &c).unwrap();
            let b = cluster_cost(&e, &q, &cq).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }

    #[test]
    fn assumption_a_structural() {
        // every node gets exactly one label, so all d_v copies share a cluster
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)]).unwrap();
        let e = embed_sm(&bottom_k(&g, 2).unwrap(), &g).unwrap();
        let r = lloyd(&e, 2, 1, &LloydConfig::default()).unwrap();
        assert_eq!(r.partition.labels().len(), 5);
    }
}
