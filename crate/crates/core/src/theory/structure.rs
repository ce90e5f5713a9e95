//! Alignment of the bottom eigenvectors with the normalized cluster indicators.

use alloc::{format, vec::Vec};

use libm::sqrt;

use super::{Inequality, BOUND_TOL};
use crate::{
    eig_sym, linalg::orthonormalize_columns, normalized_laplacian, Error, GapReport, Graph,
    Matrix, Partition, Result, SpectralBasis, SymMatrix,
};

/// `Ḡ` for a partition: column `i` is `ḡ_i`, equal to `√(d_v / μ(S_i))` on `S_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorBasis {
    pub gbar: Matrix,
    pub source: Partition,
    pub volumes: Vec<u64>,
}

pub fn normalized_indicators(g: &Graph, p: &Partition) -> Result<IndicatorBasis> {
    let volumes = p.volumes(g)?;
    let gbar = Matrix::from_fn(g.node_count(), p.k(), |v, i| {
        if p.label(v) == i {
            sqrt(g.degree(v) as f64 / volumes[i] as f64)
        } else {
            0.0
        }
    });
    Ok(IndicatorBasis {
        gbar,
        source: p.clone(),
        volumes,
    })
}

/// `ḡ_iᵀ ℒ ḡ_i` per block; equals `φ(S_i)`.
pub fn indicator_quadratic_forms(g: &Graph, ind: &IndicatorBasis) -> Vec<f64> {
    let l = normalized_laplacian(g);
    (0..ind.gbar.cols())
        .map(|i| l.quadratic_form(&ind.gbar.column(i)))
        .collect()
}

/// Singular values at or below this make `C` rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Solution of `min_U ‖FU − Ḡ‖_F` over orthogonal `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct Procrustes {
    /// `C = FᵀḠ`; entry `(j, i)` is `f_jᵀ ḡ_i`.
    pub coeff: Matrix,
    /// `U = ABᵀ` from `C = AΣBᵀ`.
    pub orthogonal: Matrix,
    /// Singular values of `C`, descending.
    pub singular_values: Vec<f64>,
    /// `‖FU − Ḡ‖_F`.
    pub residual: f64,
    pub rank_deficient: bool,
}

fn check_shapes(f: &Matrix, gbar: &Matrix) -> Result<()> {
    if f.rows() != gbar.rows() || f.cols() != gbar.cols() {
        return Err(Error::DimensionMismatch(format!(
            "F is {}x{}, Ḡ is {}x{}",
            f.rows(),
            f.cols(),
            gbar.rows(),
            gbar.cols()
        )));
    }
    Ok(())
}

/// The SVD of the `k × k` matrix `C` comes from the eigendecomposition of
/// `CᵀC`; left vectors are `C b_i / σ_i`, completed to an orthonormal basis
/// when `C` is rank deficient.
pub fn procrustes(f: &Matrix, gbar: &Matrix) -> Result<Procrustes> {
    check_shapes(f, gbar)?;
    let k = f.cols();
    let c = f.tr_mul(gbar)?;
    let ctc = SymMatrix::try_from_matrix(c.tr_mul(&c)?)?;
    let eig = eig_sym(&ctc)?;
    let order: Vec<usize> = (0..k).rev().collect();
    let b = Matrix::from_fn(k, k, |r, i| eig.vectors[(r, order[i])]);
    let singular_values: Vec<f64> = order.iter().map(|&i| sqrt(eig.values[i].max(0.0))).collect();
    let cb = c.matmul(&b)?;
    let mut a = Matrix::from_fn(k, k, |r, i| {
        if singular_values[i] > RANK_TOL {
            cb[(r, i)] / singular_values[i]
        } else {
            0.0
        }
    });
    let rank_deficient = orthonormalize_columns(&mut a, RANK_TOL) > 0;
    let u = a.matmul(&b.transpose())?;
    let residual = f.matmul(&u)?.sub(gbar)?.frobenius();
    Ok(Procrustes {
        coeff: c,
        orthogonal: u,
        singular_values,
        residual,
        rank_deficient,
    })
}

/// Tolerance on `‖YᵀY − (I − CᵀC)‖_max`.
pub const LEMMA7_TOL: f64 = 1e-10;

/// `‖YᵀY − (I − CᵀC)‖_max` with `C = FᵀḠ` and `Y = FC − Ḡ`.
pub fn check_lemma7(f: &Matrix, gbar: &Matrix) -> Result<f64> {
    check_shapes(f, gbar)?;
    let k = f.cols();
    let c = f.tr_mul(gbar)?;
    let y = f.matmul(&c)?.sub(gbar)?;
    let rhs = Matrix::identity(k).sub(&c.tr_mul(&c)?)?;
    y.tr_mul(&y)?.max_abs_diff(&rhs)
}

/// Residual allowed when `Ψ = +∞` and the eigenspace should match `Ḡ` exactly.
pub const DISCONNECTED_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub k: usize,
    pub psi: f64,
    pub certified: bool,
    pub procrustes: Procrustes,
    /// `‖R‖_F` with `R = C − U`.
    pub remainder_norm: f64,
    /// `k/Ψ + √(k/Ψ)`.
    pub bound_loose: f64,
    /// `2√(k/Ψ)`.
    pub bound_simple: f64,
    /// `Σ_i Σ_{v∈S_i} ‖p_v − √(d_v/μ(S_i)) u_i‖²`.
    pub ball_sum: f64,
    /// `‖I − Σ‖_F`.
    pub identity_gap: f64,
    /// `‖I − CᵀC‖_F`.
    pub gram_gap: f64,
    /// `‖Y‖_F²`.
    pub projection_error: f64,
    pub inequalities: Vec<Inequality>,
}

/// Checks the alignment `‖FU − Ḡ‖_F` against the partition of `gap`.
pub fn check_structure(g: &Graph, basis: &SpectralBasis, gap: &GapReport) -> Result<StructureReport> {
    let k = basis.k();
    let s = &gap.partition;
    if s.k() != k || gap.k != k {
        return Err(Error::DimensionMismatch(format!(
            "basis has k = {k}, gap report has k = {} with {} blocks",
            gap.k,
            s.k()
        )));
    }
    let ind = normalized_indicators(g, s)?;
    let f = &basis.vectors;
    let pr = procrustes(f, &ind.gbar)?;
    let u = &pr.orthogonal;

    let remainder_norm = pr.coeff.sub(u)?.frobenius();
    let identity_gap = sqrt(pr.singular_values.iter().map(|s| (1.0 - s) * (1.0 - s)).sum());
    let gram_gap = Matrix::identity(k).sub(&pr.coeff.tr_mul(&pr.coeff)?)?.frobenius();
    let projection_error = {
        let y = f.matmul(&pr.coeff)?.sub(&ind.gbar)?;
        let n = y.frobenius();
        n * n
    };
    let mut ball_sum = 0.0;
    for v in 0..g.node_count() {
        let i = s.label(v);
        let scale = sqrt(g.degree(v) as f64 / ind.volumes[i] as f64);
        ball_sum += (0..k)
            .map(|j| {
                let d = f[(v, j)] - scale * u[(j, i)];
                d * d
            })
            .sum::<f64>();
    }

    let psi = gap.psi;
    let kp = k as f64 / psi;
    let bound_loose = kp + sqrt(kp);
    let bound_simple = 2.0 * sqrt(kp);
    let big_gap = psi >= k as f64;
    let cert = gap.certified;
    let tol = if psi.is_infinite() {
        DISCONNECTED_RESIDUAL
    } else {
        BOUND_TOL
    };
    let orth_dev = u.tr_mul(u)?.max_abs_diff(&Matrix::identity(k))?;
    let inequalities = alloc::vec![
        Inequality::new("orthogonality: |U^T U - I|_max <= 0", orth_dev, 0.0),
        Inequality::with_tolerance("residual <= k/psi + sqrt(k/psi)", pr.residual, bound_loose, tol)
            .certified(cert),
        Inequality::with_tolerance("residual <= 2 sqrt(k/psi)", pr.residual, bound_simple, tol)
            .applicable(big_gap)
            .certified(cert),
        Inequality::with_tolerance("ball sum <= 4k/psi", ball_sum, 4.0 * kp, tol)
            .applicable(big_gap)
            .certified(cert),
        Inequality::with_tolerance("|R|_F <= k/psi", remainder_norm, kp, tol).certified(cert),
        Inequality::new("|I - Sigma|_F <= |I - C^T C|_F", identity_gap, gram_gap),
        Inequality::new("|I - C^T C|_F <= |Y|_F^2", gram_gap, projection_error),
        Inequality::with_tolerance("|Y|_F^2 <= k/psi", projection_error, kp, tol).certified(cert),
    ];
    Ok(StructureReport {
        k,
        psi,
        certified: cert,
        procrustes: pr,
        remainder_norm,
        bound_loose,
        bound_simple,
        ball_sum,
        identity_gap,
        gram_gap,
        projection_error,
        inequalities,
    })
}
