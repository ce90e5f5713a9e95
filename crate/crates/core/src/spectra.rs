//! Normalized Laplacian `ℒ = I − D^{-1/2} W D^{-1/2}` and its bottom eigenpairs.

use alloc::{vec, vec::Vec};

use crate::{eig_sym, Error, Graph, Matrix, Result, SymMatrix};

pub fn normalized_laplacian(g: &Graph) -> SymMatrix {
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| 1.0 / libm::sqrt(d as f64))
        .collect();
    SymMatrix::from_lower(g.node_count(), |i, j| {
        if i == j {
            1.0
        } else if g.has_edge(i, j) {
            -inv_sqrt[i] * inv_sqrt[j]
        } else {
            0.0
        }
    })
}

/// Bottom-`k` eigenvectors of `ℒ` together with the bottom `k + 1` eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    /// `λ_1 ≤ … ≤ λ_{k+1}`.
    pub eigenvalues: Vec<f64>,
    /// `n × k`, column `i` is `f_{i+1}`. Row `v` is `p_v`.
    pub vectors: Matrix,
}

/// Entries at or below this magnitude are skipped when fixing eigenvector signs.
pub const SIGN_THRESHOLD: f64 = 1e-12;

impl SpectralBasis {
    pub fn k(&self) -> usize {
        self.vectors.cols()
    }

    pub fn node_count(&self) -> usize {
        self.vectors.rows()
    }

    /// `λ_{k+1}`.
    pub fn lambda_next(&self) -> f64 {
        self.eigenvalues[self.k()]
    }

    /// Builds a basis from raw parts, e.g. a rotated or synthetic `F`.
    pub fn from_parts(eigenvalues: Vec<f64>, vectors: Matrix) -> Result<Self> {
        if eigenvalues.len() != vectors.cols() + 1 {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} eigenvalues for {} vectors",
                eigenvalues.len(),
                vectors.cols()
            )));
        }
        Ok(Self {
            eigenvalues,
            vectors,
        })
    }
}

/// Flips `column` so its first entry of magnitude above [`SIGN_THRESHOLD`] is positive.
pub(crate) fn fix_sign(m: &mut Matrix, column: usize) {
    let first = (0..m.rows())
        .map(|i| m[(i, column)])
        .find(|x| x.abs() > SIGN_THRESHOLD);
    if matches!(first, Some(x) if x < 0.0) {
        for i in 0..m.rows() {
            m[(i, column)] = -m[(i, column)];
        }
    }
}

/// Computes the bottom-`k` basis of `ℒ(g)`; requires `1 ≤ k < n`.
pub fn bottom_k(g: &Graph, k: usize) -> Result<SpectralBasis> {
    let n = g.node_count();
    if k == 0 || k >= n {
        return Err(Error::InvalidK {
            k,
            reason: "need 1 <= k < n",
        });
    }
    let eigen = eig_sym(&normalized_laplacian(g))?;
    let mut vectors = Matrix::zeros(n, k);
    for j in 0..k {
        vectors.set_column(j, &eigen.vectors.column(j));
        fix_sign(&mut vectors, j);
    }
    Ok(SpectralBasis {
        eigenvalues: eigen.values[..=k].to_vec(),
        vectors,
    })
}

/// Whole spectrum of `ℒ(g)`, ascending.
pub fn spectrum(g: &Graph) -> Result<Vec<f64>> {
    Ok(eig_sym(&normalized_laplacian(g))?.values)
}

/// `max_i ‖ℒ f_i − λ_i f_i‖₂` over the retained pairs.
pub fn max_residual(g: &Graph, basis: &SpectralBasis) -> f64 {
    let l = normalized_laplacian(g);
    let mut worst = 0.0f64;
    for j in 0..basis.k() {
        let f = basis.vectors.column(j);
        let lf = l.mul_vec(&f);
        let mut r = vec![0.0; f.len()];
        for i in 0..f.len() {
            r[i] = lf[i] - basis.eigenvalues[j] * f[i];
        }
        worst = worst.max(crate::linalg::norm(&r));
    }
    worst
}
