//! Pass/fail records with replayable witnesses.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cone::{ConeSpec, Inequality};
use crate::group::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Status {
    Pass,
    Fail,
}

/// A recorded parameter value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum Param {
    Real(f64),
    Count(u64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Real(v)
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Count(v as u64)
    }
}

impl From<u64> for Param {
    fn from(v: u64) -> Self {
        Param::Count(v)
    }
}

impl From<bool> for Param {
    fn from(v: bool) -> Self {
        Param::Flag(v)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

impl From<String> for Param {
    fn from(v: String) -> Self {
        Param::Text(v)
    }
}

/// Evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Witness {
    /// `point` was expected to be inside (or outside) `base · cone` and was not.
    Membership {
        base: Point,
        cone: ConeSpec,
        point: Point,
        relative: Point,
        tol: f64,
        expected_inside: bool,
        inequalities: Vec<Inequality>,
    },
    /// On the plane `z = 0` the flat and full cones disagree at `point`.
    SliceDisagreement {
        alpha: f64,
        point: Point,
        tol: f64,
        flat: bool,
        full: bool,
    },
    /// `zeta` has no sign change on the segment `{eta} x [-tau0, tau0]`.
    NoRoot {
        t: f64,
        base: Point,
        eta: f64,
        zeta_lo: f64,
        zeta_hi: f64,
    },
    /// The slope of a point `(s eta, eta, 0)` exceeded its bound.
    SlopeBound {
        t: f64,
        base: Point,
        eta: f64,
        tau: f64,
        s: f64,
        ideal_bound: f64,
        bound: f64,
    },
    /// No common centered rectangle was found.
    EmptyDomain {
        eta0: f64,
        tau0: f64,
        reason: String,
    },
    /// A target node was not covered by a transformed graph.
    Uncovered {
        t: f64,
        base: Point,
        eta: f64,
        tau: f64,
    },
    /// Two distinct samples share a projection.
    NotAGraph { first: Point, second: Point },
}

impl Witness {
    /// Builds a membership witness for `point` against `base · cone`.
    pub fn membership(
        base: Point,
        cone: ConeSpec,
        point: Point,
        tol: f64,
        expected_inside: bool,
    ) -> Self {
        let relative = base.relative(point);
        Witness::Membership {
            base,
            cone,
            point,
            relative,
            tol,
            expected_inside,
            inequalities: cone.inequalities(relative, tol),
        }
    }

    /// Re-evaluates the witness in isolation. `Some(true)` when the violation
    /// reproduces, `None` when the witness needs the original surface.
    pub fn replay(&self) -> Option<bool> {
        match self {
            Witness::Membership {
                base,
                cone,
                point,
                tol,
                expected_inside,
                ..
            } => Some(cone.test(base.relative(*point), *tol) != *expected_inside),
            Witness::SliceDisagreement {
                alpha, point, tol, ..
            } => {
                let flat = ConeSpec::flat(*alpha).ok()?.test(*point, *tol);
                let full = ConeSpec::full(*alpha).ok()?.test(*point, *tol);
                Some(flat != full)
            }
            Witness::NoRoot {
                zeta_lo, zeta_hi, ..
            } => Some(!(*zeta_lo < 0.0 && 0.0 < *zeta_hi)),
            Witness::SlopeBound { s, bound, .. } => Some(s.abs() > *bound),
            Witness::EmptyDomain { eta0, tau0, .. } => Some(!(*eta0 > 0.0 && *tau0 > 0.0)),
            Witness::Uncovered { .. } => None,
            Witness::NotAGraph { first, second } => {
                let (a, b) = (first.project(), second.project());
                Some(
                    first != second
                        && (a.eta() - b.eta()).abs() <= crate::cloud::DUPLICATE_TOL
                        && (a.tau() - b.tau()).abs() <= crate::cloud::DUPLICATE_TOL,
                )
            }
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Certificate {
    pub check: String,
    pub status: Status,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub witness: Option<Witness>,
    pub parameters: BTreeMap<String, Param>,
}

impl Certificate {
    /// A passing certificate with no parameters yet.
    pub fn new(check: &str) -> Self {
        Certificate {
            check: check.to_string(),
            status: Status::Pass,
            witness: None,
            parameters: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: impl Into<Param>) -> Self {
        self.parameters.insert(name.to_string(), value.into());
        self
    }

    pub fn set_param(&mut self, name: &str, value: impl Into<Param>) {
        self.parameters.insert(name.to_string(), value.into());
    }

    pub fn fail(mut self, witness: Witness) -> Self {
        self.status = Status::Fail;
        self.witness = Some(witness);
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn real(&self, name: &str) -> Option<f64> {
        match self.parameters.get(name) {
            Some(Param::Real(v)) => Some(*v),
            Some(Param::Count(v)) => Some(*v as f64),
            _ => None,
        }
    }

    /// Replays the witness of a failed certificate; passing certificates
    /// have nothing to replay.
    pub fn replay(&self) -> Option<bool> {
        self.witness.as_ref().and_then(Witness::replay)
    }
}
