use alloc::{format, vec::Vec};

use libm::sqrt;

use super::{Inequality, BOUND_TOL, DISCONNECTED_RESIDUAL};
use crate::{
    linalg::{dist_sq, norm},
    wkmeans::cluster_cost,
    Embedding, EmbeddingKind, Error, GapReport, Matrix, Result,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Report {
    pub checked: usize,
    /// Pairs with `a = u`, where both sides vanish.
    pub degenerate: usize,
    /// Largest `‖a/‖a‖ − u‖ / ‖a − u‖` seen; at most 2.
    pub worst_ratio: f64,
    pub violations: usize,
}

/// Checks `‖a/‖a‖ − u‖ ≤ 2‖a − u‖` for unit `u` and nonzero `a`.
pub fn check_lemma3(samples: &[(Vec<f64>, Vec<f64>)]) -> Result<Lemma3Report> {
    let mut rep = Lemma3Report {
        checked: 0,
        degenerate: 0,
        worst_ratio: 0.0,
        violations: 0,
    };
    for (idx, (a, u)) in samples.iter().enumerate() {
        if a.len() != u.len() {
            return Err(Error::DimensionMismatch(format!("pair {idx}: lengths differ")));
        }
        let len = norm(a);
        if len == 0.0 {
            return Err(Error::InvalidParameter(format!("pair {idx}: a is zero")));
        }
        if (norm(u) - 1.0).abs() > BOUND_TOL {
            return Err(Error::InvalidParameter(format!("pair {idx}: u is not a unit vector")));
        }
        let unit: Vec<f64> = a.iter().map(|x| x / len).collect();
        let lhs = sqrt(dist_sq(&unit, u));
        let rhs = sqrt(dist_sq(a, u));
        rep.checked += 1;
        if lhs > 2.0 * rhs + 1e-12 {
            rep.violations += 1;
        }
        if rhs == 0.0 {
            rep.degenerate += 1;
        } else {
            rep.worst_ratio = rep.worst_ratio.max(lhs / rhs);
        }
    }
    Ok(rep)
}

/// Allowed deviation of NJW center distances from 2.
pub const NJW_DISTANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Report {
    pub kind: EmbeddingKind,
    /// Row `i` is `c_i`: `u_i / √μ(S_i)` (SM) or `u_i` (NJW).
    pub centers: Matrix,
    /// `δ_ij = ‖c_i − c_j‖²`.
    pub delta: Matrix,
    /// `D(S_1..S_k, c_1..c_k)`.
    pub d_value: f64,
    /// `4k/Ψ` (SM) or `16kμ_max/Ψ` (NJW).
    pub omega: f64,
    pub inequalities: Vec<Inequality>,
}

/// Centers built from the columns of the Procrustes rotation `u` and the
/// partition of `gap`; `e` must come from the basis `u` was fitted on.
pub fn lemma4_centers(gap: &GapReport, u: &Matrix, e: &Embedding) -> Result<Lemma4Report> {
    let k = gap.k;
    let s = &gap.partition;
    if u.rows() != k || u.cols() != k || e.dim() != k {
        return Err(Error::DimensionMismatch(format!(
            "k = {k}, U is {}x{}, embedding dimension {}",
            u.rows(),
            u.cols(),
            e.dim()
        )));
    }
    let volumes: Vec<u64> = (0..k)
        .map(|i| s.block(i).iter().map(|&v| e.weights[v]).sum())
        .collect();
    let centers = Matrix::from_fn(k, k, |i, j| match e.kind {
        EmbeddingKind::Sm => u[(j, i)] / sqrt(volumes[i] as f64),
        EmbeddingKind::Njw => u[(j, i)],
    });
    let delta = Matrix::from_fn(k, k, |i, j| dist_sq(centers.row(i), centers.row(j)));
    let d_value = cluster_cost(e, s, &centers)?;
    let psi = gap.psi;
    let omega = match e.kind {
        EmbeddingKind::Sm => 4.0 * k as f64 / psi,
        EmbeddingKind::Njw => 16.0 * k as f64 * gap.mu_max as f64 / psi,
    };

    let mut inequalities = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let d = delta[(i, j)];
            inequalities.push(match e.kind {
                EmbeddingKind::Sm => {
                    let floor = 1.0 / volumes[i].min(volumes[j]) as f64;
                    Inequality::new(format!("1/min(mu_{i}, mu_{j}) <= delta_{i}{j}"), floor, d)
                }
                EmbeddingKind::Njw => Inequality::with_tolerance(
                    format!("|delta_{i}{j} - 2| <= 0"),
                    (d - 2.0).abs(),
                    0.0,
                    NJW_DISTANCE_TOL,
                ),
            });
        }
    }
    let tol = if psi.is_infinite() {
        DISCONNECTED_RESIDUAL
    } else {
        BOUND_TOL
    };
    inequalities.push(
        Inequality::with_tolerance("D(S, c) <= omega", d_value, omega, tol)
            .applicable(psi >= k as f64)
            .certified(gap.certified),
    );
    Ok(Lemma4Report {
        kind: e.kind,
        centers,
        delta,
        d_value,
        omega,
        inequalities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::ring_of_cliques;
    use crate::graph::fixtures::*;
    use crate::theory::check_structure;
    use crate::{bottom_k, embed::embed, gaps, GapSource, Graph};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn run(g: &Graph, k: usize, kind: EmbeddingKind) -> Lemma4Report {
        let basis = bottom_k(g, k).unwrap();
        let gap = gaps(g, &basis, GapSource::Oracle).unwrap();
        let st = check_structure(g, &basis, &gap).unwrap();
        let e = embed(kind, &basis, g).unwrap();
        lemma4_centers(&gap, &st.procrustes.orthogonal, &e).unwrap()
    }

    #[test]
    fn lemma3_examples() {
        let u = alloc::vec![0.6, 0.8];
        let twice: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        let rep = check_lemma3(&[(twice, u.clone()), (u.clone(), u.clone())]).unwrap();
        assert_eq!((rep.checked, rep.degenerate, rep.violations), (2, 1, 0));
        assert_eq!(rep.worst_ratio, 0.0);
        assert!(check_lemma3(&[(alloc::vec![0.0, 0.0], u.clone())]).is_err());
        assert!(check_lemma3(&[(alloc::vec![1.0, 0.0], alloc::vec![2.0, 0.0])]).is_err());
    }

    #[test]
    fn lemma3_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<_> = (0..10_000)
            .map(|_| {
                let u: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                let len = norm(&u);
                let u: Vec<f64> = u.iter().map(|x| x / len).collect();
                let a: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
                (a, u)
            })
            .collect();
        let rep = check_lemma3(&samples).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.worst_ratio <= 2.0 + 1e-12);
    }

    #[test]
    fn disconnected_centers() {
        let sm = run(&two_triangles(), 2, EmbeddingKind::Sm);
        assert_abs_diff_eq!(sm.delta[(0, 1)], 1.0 / 3.0, epsilon = 1e-12);
        assert!(sm.d_value <= 1e-20);
        let njw = run(&two_triangles(), 2, EmbeddingKind::Njw);
        assert_abs_diff_eq!(njw.delta[(0, 1)], 2.0, epsilon = 1e-12);
        for rep in [sm, njw] {
            assert!(rep.inequalities.iter().all(|i| i.holds));
        }
    }

    #[test]
    fn barbell_and_ring_centers() {
        for g in [barbell6(), ring_of_cliques(3, 4, 1, 0).unwrap().graph] {
            let k = if g.node_count() == 6 { 2 } else { 3 };
            for kind in [EmbeddingKind::Sm, EmbeddingKind::Njw] {
                let rep = run(&g, k, kind);
                assert!(rep.inequalities.iter().all(|i| i.holds), "{:?}", rep.inequalities);
            }
        }
    }
}
