//! Brute-force ground truth for small instances.
//!
//! `k`-way partitions are enumerated as restricted-growth strings, so each
//! set partition is visited exactly once. All conductance comparisons are
//! exact.

use alloc::{vec, vec::Vec};
use core::cmp::Ordering;

use num_traits::Zero;

use crate::{
    linalg::dist_sq,
    partition::avg_conductance_f64,
    ratio_to_f64,
    wkmeans::distinct_groups,
    Embedding, Error, Graph, Matrix, Partition, Rational, Result, SpectralBasis,
};

/// Largest graph handed to the conductance oracle.
pub const MAX_ORACLE_NODES: usize = 14;
/// Largest number of distinct points handed to the k-means oracle.
pub const MAX_KMEANS_POINTS: usize = 12;
/// Largest `k` handed to the k-means oracle.
pub const MAX_KMEANS_K: usize = 4;

/// Calls `visit` with the block labels of every partition of `0..n` into
/// exactly `k` nonempty blocks. Labels form a restricted-growth string: node 0
/// has label 0 and each label is at most one more than every earlier label.
pub fn for_each_k_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut labels = vec![0usize; n];
    // prefix_max[i] = max(labels[0..=i])
    let mut prefix_max = vec![0usize; n];
    fn recurse(
        i: usize,
        n: usize,
        k: usize,
        labels: &mut [usize],
        prefix_max: &mut [usize],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if i == n {
            if prefix_max[n - 1] + 1 == k {
                visit(labels);
            }
            return;
        }
        let max_before = prefix_max[i - 1];
        let top = (max_before + 1).min(k - 1);
        for label in 0..=top {
            let new_max = max_before.max(label);
            // enough nodes must remain to open the missing blocks
            if k - 1 - new_max > n - 1 - i {
                continue;
            }
            labels[i] = label;
            prefix_max[i] = new_max;
            recurse(i + 1, n, k, labels, prefix_max, visit);
        }
    }
    if n == 1 {
        if k == 1 {
            visit(&labels);
        }
        return;
    }
    recurse(1, n, k, &mut labels, &mut prefix_max, &mut visit);
}

fn guard_graph(g: &Graph, k: usize) -> Result<()> {
    if g.node_count() > MAX_ORACLE_NODES {
        return Err(Error::SizeGuard {
            what: "nodes",
            got: g.node_count(),
            limit: MAX_ORACLE_NODES,
        });
    }
    if k < 2 || k > g.node_count() {
        return Err(Error::InvalidK {
            k,
            reason: "need 2 <= k <= n",
        });
    }
    Ok(())
}

/// Exhaustive conductance optima of a graph for one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceOptima {
    /// `φ_k(G)`.
    pub phi_k: Rational,
    /// Every `φ_k`-optimal partition, in enumeration order.
    pub optima: Vec<Partition>,
    /// `φ̄_k(G)`.
    pub phi_bar_k: Rational,
    /// First `φ̄_k`-optimal partition in enumeration order.
    pub phi_bar_partition: Partition,
}

/// Compares `a/b` with `c/d` for positive denominators.
fn cmp_frac(a: u64, b: u64, c: u64, d: u64) -> Ordering {
    (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
}

pub fn conductance_optima(g: &Graph, k: usize) -> Result<ConductanceOptima> {
    guard_graph(g, k)?;
    let n = g.node_count();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let degrees = g.degrees();
    let mut vol = vec![0u64; k];
    let mut cut = vec![0u64; k];
    // best max conductance as (boundary, volume)
    let mut best_max: Option<(u64, u64)> = None;
    let mut optima: Vec<Vec<usize>> = Vec::new();
    let mut best_avg: Option<(Rational, usize)> = None;

    for_each_k_partition(n, k, |labels| {
        vol.iter_mut().for_each(|x| *x = 0);
        cut.iter_mut().for_each(|x| *x = 0);
        for (v, &l) in labels.iter().enumerate() {
            vol[l] += degrees[v];
        }
        for &(u, v) in &edges {
            let (a, b) = (labels[u], labels[v]);
            if a != b {
                cut[a] += 1;
                cut[b] += 1;
            }
        }
        let mut worst = (cut[0], vol[0]);
        for i in 1..k {
            if cmp_frac(cut[i], vol[i], worst.0, worst.1) == Ordering::Greater {
                worst = (cut[i], vol[i]);
            }
        }
        let order = match best_max {
            None => Ordering::Less,
            Some((c, v)) => cmp_frac(worst.0, worst.1, c, v),
        };
        if order == Ordering::Greater {
            return;
        }
        if order == Ordering::Less {
            best_max = Some(worst);
            optima.clear();
            best_avg = None;
        }
        let avg = (0..k)
            .map(|i| Rational::new(cut[i] as i128, vol[i] as i128))
            .fold(Rational::zero(), |acc, x| acc + x)
            / k as i128;
        if best_avg.as_ref().is_none_or(|(b, _)| avg < *b) {
            best_avg = Some((avg, optima.len()));
        }
        optima.push(labels.to_vec());
    });

    let (c, v) = best_max.expect("at least one k-partition exists for k <= n");
    let (phi_bar_k, idx) = best_avg.expect("optimal set is nonempty");
    let optima = optima
        .iter()
        .map(|labels| Partition::from_labels(labels, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConductanceOptima {
        phi_k: Rational::new(c as i128, v as i128),
        phi_bar_partition: optima[idx].clone(),
        optima,
        phi_bar_k,
    })
}

/// `φ_k(G)` and every partition attaining it.
pub fn phi_k_exact(g: &Graph, k: usize) -> Result<(Rational, Vec<Partition>)> {
    let o = conductance_optima(g, k)?;
    Ok((o.phi_k, o.optima))
}

/// `φ̄_k(G)` and a `φ̄_k`-optimal partition (which is also `φ_k`-optimal).
pub fn phi_bar_k_exact(g: &Graph, k: usize) -> Result<(Rational, Partition)> {
    let o = conductance_optima(g, k)?;
    Ok((o.phi_bar_k, o.phi_bar_partition))
}

/// Exact optimum of the weighted k-means cost over partitions of the distinct
/// embedded points, centers at weighted centroids.
pub fn kmeans_opt_exact(e: &Embedding, k: usize) -> Result<f64> {
    let groups = distinct_groups(e);
    if groups.len() > MAX_KMEANS_POINTS {
        return Err(Error::SizeGuard {
            what: "distinct points",
            got: groups.len(),
            limit: MAX_KMEANS_POINTS,
        });
    }
    if k > MAX_KMEANS_K {
        return Err(Error::SizeGuard {
            what: "k",
            got: k,
            limit: MAX_KMEANS_K,
        });
    }
    if k == 0 || k > groups.len() {
        return Err(Error::InvalidK {
            k,
            reason: "need 1 <= k <= distinct points",
        });
    }
    let dim = e.dim();
    let mut best = f64::INFINITY;
    let mut centers = Matrix::zeros(k, dim);
    let mut mass = vec![0.0; k];
    for_each_k_partition(groups.len(), k, |labels| {
        centers = Matrix::zeros(k, dim);
        mass.iter_mut().for_each(|m| *m = 0.0);
        for (gi, group) in groups.iter().enumerate() {
            let l = labels[gi];
            for &v in group {
                let w = e.weights[v] as f64;
                mass[l] += w;
                for (c, x) in centers.row_mut(l).iter_mut().zip(e.point(v)) {
                    *c += w * x;
                }
            }
        }
        for (l, &m) in mass.iter().enumerate() {
            centers.row_mut(l).iter_mut().for_each(|c| *c /= m);
        }
        let mut cost = 0.0;
        for (gi, group) in groups.iter().enumerate() {
            for &v in group {
                cost += e.weights[v] as f64 * dist_sq(e.point(v), centers.row(labels[gi]));
            }
        }
        if cost < best {
            best = cost;
        }
    });
    Ok(best)
}

/// Whether [`kmeans_opt_exact`] accepts this instance.
pub fn kmeans_oracle_feasible(e: &Embedding, k: usize) -> bool {
    k <= MAX_KMEANS_K && distinct_groups(e).len() <= MAX_KMEANS_POINTS
}

/// Where the reference partition of a [`GapReport`] comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapSource<'a> {
    /// Exhaustive enumeration; the report is certified.
    Oracle,
    /// A planted partition used as a surrogate for the optimum.
    Provided(&'a Partition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub k: usize,
    /// `λ_{k+1}`.
    pub lambda_next: f64,
    /// `φ_k(G)`, or the max block conductance of the provided partition.
    pub phi_k: Rational,
    /// `φ̄_k(G)`, or the average block conductance of the provided partition.
    pub phi_bar_k: f64,
    /// `φ̄_k` as an exact rational when it fits.
    pub phi_bar_k_exact: Option<Rational>,
    /// `λ_{k+1} / φ_k`, `+∞` when `φ_k = 0`.
    pub upsilon: f64,
    /// `λ_{k+1} / φ̄_k`, `+∞` when `φ̄_k = 0`.
    pub psi: f64,
    pub mu_max: u64,
    pub mu_min: u64,
    /// `μ_max / μ_min`.
    pub beta: f64,
    /// True when `φ_k` and `φ̄_k` come from the oracle.
    pub certified: bool,
    /// The `φ̄_k`-optimal (or provided) partition `S_1..S_k`.
    pub partition: Partition,
    /// Number of `φ_k`-optimal partitions found (oracle only).
    pub optimal_count: Option<usize>,
}

/// Smallest `λ_{k+1}` treated as nonzero when `φ̄_k = 0`.
pub const ZERO_EIGENVALUE: f64 = 1e-10;

fn gap_ratio(lambda: f64, phi: f64) -> Result<f64> {
    if phi == 0.0 {
        if lambda <= ZERO_EIGENVALUE {
            return Err(Error::DegenerateGap);
        }
        Ok(f64::INFINITY)
    } else {
        Ok(lambda / phi)
    }
}

/// `Υ`, `Ψ`, `β` and friends for `g` with the eigenvalues in `basis`.
pub fn gaps(g: &Graph, basis: &SpectralBasis, source: GapSource<'_>) -> Result<GapReport> {
    check_basis(g, basis)?;
    match source {
        GapSource::Oracle => certified_gaps(g, basis, &conductance_optima(g, basis.k())?),
        GapSource::Provided(p) => {
            let k = basis.k();
            if p.k() != k {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "partition has {} blocks, basis has k = {k}",
                    p.k()
                )));
            }
            let exact = crate::avg_conductance(g, p).ok();
            let bar = match &exact {
                Some(r) => ratio_to_f64(r),
                None => avg_conductance_f64(g, p)?,
            };
            build(g, basis, crate::max_conductance(g, p)?, exact, bar, p.clone(), false, None)
        }
    }
}

/// [`gaps`] from optima that were already enumerated.
pub fn certified_gaps(
    g: &Graph,
    basis: &SpectralBasis,
    optima: &ConductanceOptima,
) -> Result<GapReport> {
    check_basis(g, basis)?;
    if optima.phi_bar_partition.k() != basis.k() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "optima are for k = {}, basis has k = {}",
            optima.phi_bar_partition.k(),
            basis.k()
        )));
    }
    build(
        g,
        basis,
        optima.phi_k,
        Some(optima.phi_bar_k),
        ratio_to_f64(&optima.phi_bar_k),
        optima.phi_bar_partition.clone(),
        true,
        Some(optima.optima.len()),
    )
}

fn check_basis(g: &Graph, basis: &SpectralBasis) -> Result<()> {
    if basis.node_count() != g.node_count() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "basis has {} rows, graph has {} nodes",
            basis.node_count(),
            g.node_count()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build(
    g: &Graph,
    basis: &SpectralBasis,
    phi_k: Rational,
    phi_bar_k_exact: Option<Rational>,
    phi_bar_k: f64,
    partition: Partition,
    certified: bool,
    optimal_count: Option<usize>,
) -> Result<GapReport> {
    let lambda_next = basis.lambda_next();
    let vols = partition.volumes(g)?;
    let mu_max = *vols.iter().max().expect("k >= 2");
    let mu_min = *vols.iter().min().expect("k >= 2");
    Ok(GapReport {
        k: basis.k(),
        lambda_next,
        upsilon: gap_ratio(lambda_next, ratio_to_f64(&phi_k))?,
        psi: gap_ratio(lambda_next, phi_bar_k)?,
        phi_k,
        phi_bar_k,
        phi_bar_k_exact,
        mu_max,
        mu_min,
        beta: mu_max as f64 / mu_min as f64,
        certified,
        partition,
        optimal_count,
    })
}
