//! JSON report schema (version 1).
//!
//! Exact rationals serialize as `{num, den, value}`; reals that may be
//! infinite serialize as numbers or the strings `"inf"` / `"-inf"`.

use serde::{Deserialize, Serialize, Serializer};
use specgap_core::{
    ratio_to_f64,
    theory::{Inequality, Theorem3Outcome},
    GapReport, Matrix, Rational,
};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            x if x.is_finite() => s.serialize_f64(x),
            x if x == f64::INFINITY => s.serialize_str("inf"),
            x if x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            _ => s.serialize_str("nan"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: i128,
    pub den: i128,
    pub value: f64,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        Self {
            num: *r.numer(),
            den: *r.denom(),
            value: ratio_to_f64(r),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityJson {
    pub name: String,
    pub lhs: Real,
    pub rhs: Real,
    pub slack: Real,
    pub holds: bool,
    pub applicable: bool,
    pub certified: bool,
}

impl From<&Inequality> for InequalityJson {
    fn from(i: &Inequality) -> Self {
        Self {
            name: i.name.clone(),
            lhs: Real(i.lhs),
            rhs: Real(i.rhs),
            slack: Real(i.slack),
            holds: i.holds,
            applicable: i.applicable,
            certified: i.certified,
        }
    }
}

pub fn inequalities(list: &[Inequality]) -> Vec<InequalityJson> {
    list.iter().map(InequalityJson::from).collect()
}

pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphJson {
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapJson {
    /// `oracle` or `planted`.
    pub source: &'static str,
    pub certified: bool,
    pub lambda_next: f64,
    pub phi_k: RationalJson,
    pub phi_bar_k: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_bar_k_exact: Option<RationalJson>,
    pub upsilon: Real,
    pub psi: Real,
    pub mu_max: u64,
    pub mu_min: u64,
    pub beta: f64,
    pub partition: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_count: Option<usize>,
}

impl From<&GapReport> for GapJson {
    fn from(g: &GapReport) -> Self {
        Self {
            source: if g.certified { "oracle" } else { "planted" },
            certified: g.certified,
            lambda_next: g.lambda_next,
            phi_k: (&g.phi_k).into(),
            phi_bar_k: Real(g.phi_bar_k),
            phi_bar_k_exact: g.phi_bar_k_exact.as_ref().map(RationalJson::from),
            upsilon: Real(g.upsilon),
            psi: Real(g.psi),
            mu_max: g.mu_max,
            mu_min: g.mu_min,
            beta: g.beta,
            partition: crate::io::one_based(&g.partition),
            optimal_count: g.optimal_count,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem3Json {
    pub epsilon: f64,
    /// `not_applicable`, `bound_satisfied`, `witness`, `unwitnessed`, `violation` or `error`.
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<Real>,
    pub cost: f64,
    /// 1-based block index matched with each cluster.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Theorem3Json {
    pub fn new(epsilon: f64, cost: f64, outcome: &specgap_core::Result<Theorem3Outcome>) -> Self {
        let (outcome, lower_bound, witness) = match outcome {
            Ok(Theorem3Outcome::NotApplicable) => ("not_applicable", None, None),
            Ok(Theorem3Outcome::BoundSatisfied { lower_bound }) => {
                ("bound_satisfied", Some(*lower_bound), None)
            }
            Ok(Theorem3Outcome::Witness { lower_bound, perm }) => (
                "witness",
                Some(*lower_bound),
                Some(perm.iter().map(|j| j + 1).collect()),
            ),
            Ok(Theorem3Outcome::Unwitnessed { lower_bound }) => {
                ("unwitnessed", Some(*lower_bound), None)
            }
            Err(specgap_core::Error::LowerBoundViolation { bound, .. }) => {
                ("violation", Some(*bound), None)
            }
            Err(_) => ("error", None, None),
        };
        Self {
            epsilon,
            outcome,
            lower_bound: lower_bound.map(Real),
            cost,
            witness,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.outcome == "violation"
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports are serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_and_rationals() {
        assert_eq!(serde_json::to_string(&Real(0.5)).unwrap(), "0.5");
        assert_eq!(serde_json::to_string(&Real(f64::INFINITY)).unwrap(), "\"inf\"");
        let r = RationalJson::from(&Rational::new(2, 14));
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            format!("{{\"num\":1,\"den\":7,\"value\":{}}}", 1.0 / 7.0)
        );
    }
}
