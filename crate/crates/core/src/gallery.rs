//! Deterministic sample clouds for the two classical counterexamples and for
//! a few surfaces with the full cone property, with the statuses the
//! checkers must report on them.

use alloc::string::String;
use alloc::vec::Vec;

use crate::certificate::{Certificate, Status};
use crate::cloud::PointCloud;
use crate::float::linspace;
use crate::graph::{sample_graph, GraphFunction, Rect};
use crate::group::Point;
use crate::verify::{check_flat_property, check_full_at_base, check_full_property};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", content = "value", rename_all = "snake_case")
)]
pub enum ExampleKind {
    /// `{(x, 0, x³) : x ∈ [0, 1]}`: flat but not full at the origin.
    CubicCurve,
    /// The origin together with the plane `x = 1` minus the slit
    /// `{(1, s, 0) : |s| < 1}`.
    PuncturedPlane,
    /// The plane `x = 0`.
    VerticalPlane,
    /// The graph of `φ ≡ c`, the plane `x = c`.
    ConstantGraph(f64),
    /// The graph of `φ(η, τ) = slope · η`, the plane `x = slope · y`.
    LinearGraph(f64),
}

/// A gallery fixture with its sampling.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExampleSpec {
    pub name: String,
    pub kind: ExampleKind,
    /// Nodes per sampled axis.
    pub nodes: usize,
    /// Sampled coordinates range over `[-half_width, half_width]` (for the
    /// punctured plane: `y ∈ [-2 h, 2 h]`, `z ∈ [-h, h]`).
    pub half_width: f64,
    /// Points of the punctured plane with `|z|` at most this are treated
    /// as lying on the slit.
    pub exclusion_tol: f64,
    /// Recorded for reports; every generator is a fixed grid.
    pub seed: u64,
}

impl ExampleSpec {
    /// The default sampling of each fixture.
    pub fn new(kind: ExampleKind) -> Self {
        let (name, nodes) = match kind {
            ExampleKind::CubicCurve => ("cubic", 1000),
            ExampleKind::PuncturedPlane => ("punctured", 9),
            ExampleKind::VerticalPlane => ("vertical", 21),
            ExampleKind::ConstantGraph(_) => ("constant", 41),
            ExampleKind::LinearGraph(_) => ("linear", 41),
        };
        ExampleSpec {
            name: String::from(name),
            kind,
            nodes,
            half_width: 1.0,
            exclusion_tol: 1e-9,
            seed: 0,
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidParameter(
                "fixtures need at least two nodes per axis",
            ));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidParameter(
                "half width must be positive and finite",
            ));
        }
        if !(self.exclusion_tol >= 0.0 && self.exclusion_tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.exclusion_tol));
        }
        match self.kind {
            ExampleKind::ConstantGraph(v) | ExampleKind::LinearGraph(v) if !v.is_finite() => {
                Err(Error::NonFinite {
                    name: "fixture parameter",
                    value: v,
                })
            }
            _ => Ok(()),
        }
    }

    /// The graph function behind graph fixtures.
    pub fn graph(&self) -> Result<Option<GraphFunction>> {
        self.validate()?;
        let dom = Rect::centered(self.half_width, self.half_width)?;
        Ok(match self.kind {
            ExampleKind::ConstantGraph(c) => Some(GraphFunction::constant(c, dom)?),
            ExampleKind::LinearGraph(s) => Some(GraphFunction::affine(0.0, s, 0.0, dom)?),
            ExampleKind::VerticalPlane => Some(GraphFunction::constant(0.0, dom)?),
            _ => None,
        })
    }
}

/// Samples the fixture.
pub fn generate(spec: &ExampleSpec) -> Result<PointCloud> {
    spec.validate()?;
    let (n, h) = (spec.nodes, spec.half_width);
    Ok(match spec.kind {
        ExampleKind::CubicCurve => linspace(0.0, 1.0, n)
            .map(|x| Point::raw(x, 0.0, x * x * x))
            .collect(),
        ExampleKind::PuncturedPlane => {
            let mut pts = alloc::vec![Point::ORIGIN];
            for y in linspace(-2.0 * h, 2.0 * h, n) {
                for z in linspace(-h, h, n) {
                    if !(z.abs() <= spec.exclusion_tol && y.abs() < 1.0) {
                        pts.push(Point::raw(1.0, y, z));
                    }
                }
            }
            PointCloud::new(pts)
        }
        ExampleKind::VerticalPlane => {
            let mut pts = Vec::with_capacity(n * n);
            for y in linspace(-h, h, n) {
                for z in linspace(-h, h, n) {
                    pts.push(Point::raw(0.0, y, z));
                }
            }
            PointCloud::new(pts)
        }
        ExampleKind::ConstantGraph(_) | ExampleKind::LinearGraph(_) => {
            let phi = spec
                .graph()?
                .ok_or(Error::InvalidParameter("not a graph fixture"))?;
            sample_graph(&phi, n, n)?
        }
    })
}

/// Which checker a predicted status refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckKind {
    Flat,
    Full,
    /// Full cone property with the origin as the only base point.
    FullAtOrigin,
}

/// A predicted checker outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Expectation {
    pub check: CheckKind,
    pub alpha: f64,
    pub status: Status,
}

fn expect(check: CheckKind, alpha: f64, status: Status) -> Expectation {
    Expectation {
        check,
        alpha,
        status,
    }
}

/// Ground-truth statuses of the fixture.
pub fn expected_behavior(spec: &ExampleSpec) -> Vec<Expectation> {
    use CheckKind::*;
    use Status::*;
    match spec.kind {
        ExampleKind::CubicCurve => alloc::vec![
            expect(Flat, 1.0, Pass),
            expect(FullAtOrigin, 0.1, Fail),
            expect(FullAtOrigin, 0.25, Fail),
            expect(FullAtOrigin, 1.0, Fail),
        ],
        ExampleKind::PuncturedPlane => {
            alloc::vec![expect(Flat, 1.0, Pass), expect(FullAtOrigin, 1.0, Fail)]
        }
        ExampleKind::VerticalPlane | ExampleKind::ConstantGraph(_) => {
            alloc::vec![expect(Flat, 1.0, Pass), expect(Full, 1.0, Pass)]
        }
        ExampleKind::LinearGraph(s) => {
            let alpha = if s == 0.0 {
                1.0
            } else {
                (1.0 / s.abs()).min(1.0)
            };
            alloc::vec![expect(Flat, alpha, Pass), expect(Full, alpha, Pass)]
        }
    }
}

/// One expectation next to the certificate the checker produced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Outcome {
    pub expected: Expectation,
    pub certificate: Certificate,
}

impl Outcome {
    pub fn agrees(&self) -> bool {
        self.expected.status == self.certificate.status
    }
}

/// Runs every predicted check of the fixture on its samples.
pub fn run_expected(spec: &ExampleSpec, tol: f64) -> Result<Vec<Outcome>> {
    let cloud = generate(spec)?;
    expected_behavior(spec)
        .into_iter()
        .map(|e| {
            let certificate = match e.check {
                CheckKind::Flat => check_flat_property(&cloud, e.alpha, tol)?,
                CheckKind::Full => check_full_property(&cloud, e.alpha, tol, None)?,
                CheckKind::FullAtOrigin => check_full_at_base(&cloud, Point::ORIGIN, e.alpha, tol)?,
            };
            Ok(Outcome {
                expected: e,
                certificate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z).unwrap()
    }

    #[test]
    fn cubic_three_nodes() {
        let c = generate(&ExampleSpec::new(ExampleKind::CubicCurve).with_nodes(3)).unwrap();
        assert_eq!(
            c.points(),
            &[p(0.0, 0.0, 0.0), p(0.5, 0.0, 0.125), p(1.0, 0.0, 1.0)]
        );
    }

    #[test]
    fn vertical_plane_corners() {
        let c = generate(&ExampleSpec::new(ExampleKind::VerticalPlane).with_nodes(2)).unwrap();
        assert_eq!(c.len(), 4);
        for q in [
            p(0.0, -1.0, -1.0),
            p(0.0, -1.0, 1.0),
            p(0.0, 1.0, -1.0),
            p(0.0, 1.0, 1.0),
        ] {
            assert!(c.points().contains(&q));
        }
    }

    #[test]
    fn punctured_plane_respects_slit() {
        let c = generate(&ExampleSpec::new(ExampleKind::PuncturedPlane)).unwrap();
        assert!(c.points().contains(&Point::ORIGIN));
        assert!(c.points().contains(&p(1.0, 2.0, 0.0)));
        assert!(c.points().contains(&p(1.0, 1.0, 0.0)));
        assert!(!c.points().contains(&p(1.0, 0.5, 0.0)));
        assert_eq!(c.len(), 1 + 81 - 3);
    }

    #[test]
    fn verifier_matches_table() {
        for kind in [
            ExampleKind::CubicCurve,
            ExampleKind::PuncturedPlane,
            ExampleKind::VerticalPlane,
            ExampleKind::ConstantGraph(0.3),
            ExampleKind::LinearGraph(2.0),
            ExampleKind::LinearGraph(0.0),
        ] {
            let spec = ExampleSpec::new(kind).with_nodes(match kind {
                ExampleKind::CubicCurve => 200,
                ExampleKind::PuncturedPlane => 9,
                _ => 11,
            });
            for o in run_expected(&spec, 1e-9).unwrap() {
                assert!(o.agrees(), "{kind:?}: {o:?}");
                if !o.certificate.is_pass() {
                    assert_eq!(o.certificate.replay(), Some(true));
                }
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&ExampleSpec::new(ExampleKind::CubicCurve).with_nodes(1)).is_err());
        assert!(generate(&ExampleSpec::new(ExampleKind::ConstantGraph(f64::NAN))).is_err());
    }
}
