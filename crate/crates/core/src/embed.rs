//! Spectral embedding maps and the degree-weighted point set they produce.
//!
//! With `P = Fᵀ` and `p_v` its `v`-th column (row `v` of `F`):
//! Shi–Malik maps `v ↦ p_v / √d_v`, Ng–Jordan–Weiss maps `v ↦ p_v / ‖p_v‖₂`.
//! Node `v` carries weight `d_v`, standing for `d_v` copies of its point.

use alloc::{format, vec::Vec};

use crate::{linalg::norm, Error, Graph, Matrix, Result, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbeddingKind {
    Sm,
    Njw,
}

impl EmbeddingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingKind::Sm => "sm",
            EmbeddingKind::Njw => "njw",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    /// `n × k`; row `v` is `F(v)`.
    pub points: Matrix,
    /// `d_v` per node.
    pub weights: Vec<u64>,
}

/// Rows with `‖p_v‖₂` at or below this cannot be normalized.
pub const MIN_ROW_NORM: f64 = 1e-12;

impl Embedding {
    /// Wraps arbitrary weighted points, e.g. for k-means on synthetic data.
    pub fn from_points(kind: EmbeddingKind, points: Matrix, weights: Vec<u64>) -> Result<Self> {
        if points.rows() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points but {} weights",
                points.rows(),
                weights.len()
            )));
        }
        Ok(Self {
            kind,
            points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn point(&self, v: usize) -> &[f64] {
        self.points.row(v)
    }
}

fn check_dims(basis: &SpectralBasis, g: &Graph) -> Result<()> {
    if basis.node_count() != g.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} rows, graph has {} nodes",
            basis.node_count(),
            g.node_count()
        )));
    }
    Ok(())
}

pub fn embed_sm(basis: &SpectralBasis, g: &Graph) -> Result<Embedding> {
    check_dims(basis, g)?;
    let mut points = basis.vectors.clone();
    for v in 0..g.node_count() {
        let s = libm::sqrt(g.degree(v) as f64);
        points.row_mut(v).iter_mut().for_each(|x| *x /= s);
    }
    Embedding::from_points(EmbeddingKind::Sm, points, g.degrees().to_vec())
}

pub fn embed_njw(basis: &SpectralBasis, g: &Graph) -> Result<Embedding> {
    check_dims(basis, g)?;
    let mut points = basis.vectors.clone();
    for v in 0..g.node_count() {
        let row = points.row_mut(v);
        let len = norm(row);
        if len <= MIN_ROW_NORM {
            return Err(Error::DegenerateRow(v));
        }
        row.iter_mut().for_each(|x| *x /= len);
    }
    Embedding::from_points(EmbeddingKind::Njw, points, g.degrees().to_vec())
}

pub fn embed(kind: EmbeddingKind, basis: &SpectralBasis, g: &Graph) -> Result<Embedding> {
    match kind {
        EmbeddingKind::Sm => embed_sm(basis, g),
        EmbeddingKind::Njw => embed_njw(basis, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::linalg::{dist_sq, dot};
    use crate::spectra::bottom_k;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn two_triangles_collapse() {
        let g = two_triangles();
        let basis = bottom_k(&g, 2).unwrap();
        for e in [embed_sm(&basis, &g).unwrap(), embed_njw(&basis, &g).unwrap()] {
            for block in [[0, 1, 2], [3, 4, 5]] {
                for &v in &block[1..] {
                    assert!(dist_sq(e.point(v), e.point(block[0])) < 1e-24);
                }
            }
        }
        let njw = embed_njw(&basis, &g).unwrap();
        assert_abs_diff_eq!(dot(njw.point(0), njw.point(3)), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_sq(njw.point(0), njw.point(3)), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn single_edge_one_dimension() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let basis = bottom_k(&g, 1).unwrap();
        let e = embed_sm(&basis, &g).unwrap();
        assert_abs_diff_eq!(e.point(0)[0], e.point(1)[0], epsilon = 1e-15);
    }

    #[test]
    fn sm_rows_are_scaled_basis_rows() {
        let g = barbell6();
        let basis = bottom_k(&g, 2).unwrap();
        let e = embed_sm(&basis, &g).unwrap();
        for v in 0..6 {
            for j in 0..2 {
                let direct = basis.vectors[(v, j)] / libm::sqrt(g.degree(v) as f64);
                assert_eq!(e.point(v)[j], direct);
            }
        }
        assert_eq!(e.weights, alloc::vec![2, 2, 3, 3, 2, 2]);
    }

    #[test]
    fn zero_row_rejected() {
        let g = barbell6();
        let mut f = Matrix::from_fn(6, 2, |i, j| ((i + j) % 3) as f64);
        f.row_mut(4).fill(0.0);
        let basis = SpectralBasis::from_parts(alloc::vec![0.0, 0.1, 0.2], f).unwrap();
        assert_eq!(embed_njw(&basis, &g), Err(Error::DegenerateRow(4)));
        assert!(embed_sm(&basis, &g).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let basis = bottom_k(&triangle(), 2).unwrap();
        assert!(embed_sm(&basis, &barbell6()).is_err());
    }

    fn rotation(theta: f64) -> Matrix {
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        Matrix::from_rows(&[[c, -s], [s, c]]).unwrap()
    }

    proptest! {
        #[test]
        fn njw_unit_rows_and_sm_relation(g in arb_graph()) {
            let basis = bottom_k(&g, 2).unwrap();
            let sm = embed_sm(&basis, &g).unwrap();
            if let Ok(njw) = embed_njw(&basis, &g) {
                for v in 0..g.node_count() {
                    prop_assert!((norm(njw.point(v)) - 1.0).abs() <= 1e-10);
                    let len = norm(sm.point(v));
                    for j in 0..2 {
                        prop_assert!((njw.point(v)[j] - sm.point(v)[j] / len).abs() <= 1e-10);
                    }
                }
            }
        }

        #[test]
        fn rotation_preserves_geometry(g in arb_graph(), theta in 0.0f64..core::f64::consts::TAU) {
            let basis = bottom_k(&g, 2).unwrap();
            let rotated = SpectralBasis::from_parts(
                basis.eigenvalues.clone(),
                basis.vectors.matmul(&rotation(theta)).unwrap(),
            ).unwrap();
            let a = embed_sm(&basis, &g).unwrap();
            let b = embed_sm(&rotated, &g).unwrap();
            for u in 0..g.node_count() {
                prop_assert!((norm(a.point(u)) - norm(b.point(u))).abs() <= 1e-12);
                for v in 0..u {
                    let da = dist_sq(a.point(u), a.point(v));
                    let db = dist_sq(b.point(u), b.point(v));
                    prop_assert!((da - db).abs() <= 1e-12);
                }
            }
        }
    }
}
