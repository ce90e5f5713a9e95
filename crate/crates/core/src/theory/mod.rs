//! Numerical checkers for the guarantees of spectral clustering on
//! well-clustered graphs.
//!
//! Every checked statement is recorded as an [`Inequality`]. An inequality
//! is *applicable* when the hypotheses of the statement are met and
//! *certified* when its inputs (`Ψ`, and `α` where it appears) are exact
//! rather than surrogates. Only applicable, certified inequalities that fail
//! count as violations; everything else is advisory.

use alloc::string::String;

mod bounds;
mod lemmas;
mod structure;

pub use self::{
    bounds::{
        check_theorem1, check_theorem2, check_theorem3_contrapositive, theorem3_lower_bound,
        AlphaHat, BoundReport, ClusterBound, Theorem2Report, Theorem3Outcome, THEOREM3_MAX_K,
        ZERO_COST,
    },
    lemmas::{check_lemma3, lemma4_centers, Lemma3Report, Lemma4Report, NJW_DISTANCE_TOL},
    structure::{
        check_lemma7, check_structure, indicator_quadratic_forms, normalized_indicators,
        procrustes, IndicatorBasis, Procrustes, StructureReport, DISCONNECTED_RESIDUAL,
        LEMMA7_TOL, RANK_TOL,
    },
};

/// Absolute slack granted to every floating-point comparison.
pub const BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    /// `lhs ≤ rhs + BOUND_TOL`.
    pub holds: bool,
    pub applicable: bool,
    pub certified: bool,
}

impl Inequality {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_tolerance(name, lhs, rhs, BOUND_TOL)
    }

    pub fn with_tolerance(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + tol,
            applicable: true,
            certified: true,
        }
    }

    pub fn applicable(mut self, yes: bool) -> Self {
        self.applicable = yes;
        self
    }

    pub fn certified(mut self, yes: bool) -> Self {
        self.certified = yes;
        self
    }

    /// An applicable, certified inequality that does not hold.
    pub fn violated(&self) -> bool {
        self.applicable && self.certified && !self.holds
    }
}

/// Names of the violated inequalities in `list`.
pub fn violations(list: &[Inequality]) -> impl Iterator<Item = &str> {
    list.iter().filter(|i| i.violated()).map(|i| i.name.as_str())
}
