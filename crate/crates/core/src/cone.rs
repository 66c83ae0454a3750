//! Cone families and their membership predicates.
//!
//! Every strict inequality `a < b` is decided as `a < b - tol`, so a positive
//! `tol` shrinks the open cones. The flat cone's `z = 0` constraint becomes
//! `|z| <= tol`, a thin slab.

use alloc::vec;
use alloc::vec::Vec;

use crate::certificate::{Certificate, Witness};
use crate::cloud::PointCloud;
use crate::group::Point;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConeKind {
    /// `C(α) = {|y| < α|x|, |z| < α x²/2}`.
    Full,
    /// `fC(α) = {(x, y, 0) : |y| < α|x|}`.
    Flat,
    /// `C(β, r)`: the full cone cut to `|x| < r`.
    TruncatedFull,
    /// `vC(β, r) = {(x, 0, u x²/2) : |u| < β, |x| < r}`.
    Vertical,
}

impl ConeKind {
    pub fn needs_radius(self) -> bool {
        matches!(self, ConeKind::TruncatedFull | ConeKind::Vertical)
    }
}

/// One of the four cone families with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConeSpec {
    kind: ConeKind,
    aperture: f64,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    radius: Option<f64>,
}

/// One evaluated defining inequality, kept for witnesses.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Inequality {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

impl ConeSpec {
    pub fn new(kind: ConeKind, aperture: f64, radius: Option<f64>) -> Result<Self> {
        if !(aperture > 0.0) || !aperture.is_finite() {
            return Err(Error::InvalidCone("aperture must be positive and finite"));
        }
        match (kind.needs_radius(), radius) {
            (true, None) => return Err(Error::InvalidCone("this cone kind needs a radius")),
            (false, Some(_)) => return Err(Error::InvalidCone("this cone kind takes no radius")),
            (true, Some(r)) if !(r > 0.0) || !r.is_finite() => {
                return Err(Error::InvalidCone("radius must be positive and finite"))
            }
            _ => {}
        }
        Ok(ConeSpec {
            kind,
            aperture,
            radius,
        })
    }

    pub fn full(alpha: f64) -> Result<Self> {
        Self::new(ConeKind::Full, alpha, None)
    }

    pub fn flat(alpha: f64) -> Result<Self> {
        Self::new(ConeKind::Flat, alpha, None)
    }

    pub fn truncated_full(beta: f64, r: f64) -> Result<Self> {
        Self::new(ConeKind::TruncatedFull, beta, Some(r))
    }

    pub fn vertical(beta: f64, r: f64) -> Result<Self> {
        Self::new(ConeKind::Vertical, beta, Some(r))
    }

    pub fn kind(&self) -> ConeKind {
        self.kind
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// Same family and radius with another aperture.
    pub fn with_aperture(&self, aperture: f64) -> Result<Self> {
        Self::new(self.kind, aperture, self.radius)
    }

    /// Membership of `p` with margin `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        Ok(self.test(p, tol))
    }

    /// Membership of `p` in `base · cone`, i.e. of `base⁻¹ p` in the cone.
    pub fn contains_translated(&self, base: Point, p: Point, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        Ok(self.test(base.relative(p), tol))
    }

    /// Membership without validating `tol`.
    #[inline]
    pub(crate) fn test(&self, p: Point, tol: f64) -> bool {
        let (x, y, z) = (p.x(), p.y(), p.z());
        let a = self.aperture;
        match self.kind {
            ConeKind::Full => y.abs() < a * x.abs() - tol && z.abs() < a * x * x / 2.0 - tol,
            ConeKind::Flat => y.abs() < a * x.abs() - tol && z.abs() <= tol,
            ConeKind::TruncatedFull => {
                let r = self.radius.unwrap_or(0.0);
                x.abs() < r - tol && y.abs() < a * x.abs() - tol && z.abs() < a * x * x / 2.0 - tol
            }
            ConeKind::Vertical => {
                let r = self.radius.unwrap_or(0.0);
                x != 0.0
                    && y.abs() <= tol
                    && x.abs() < r - tol
                    && (2.0 * z / (x * x)).abs() < a - tol
            }
        }
    }

    /// The defining inequalities of the cone evaluated at `p`.
    pub fn inequalities(&self, p: Point, tol: f64) -> Vec<Inequality> {
        let (x, y, z) = (p.x(), p.y(), p.z());
        let a = self.aperture;
        let lt = |label, lhs: f64, rhs: f64| Inequality {
            label,
            lhs,
            rhs,
            holds: lhs < rhs,
        };
        let le = |label, lhs: f64, rhs: f64| Inequality {
            label,
            lhs,
            rhs,
            holds: lhs <= rhs,
        };
        let slope = lt("|y| < a|x| - tol", y.abs(), a * x.abs() - tol);
        let height = lt("|z| < a x^2/2 - tol", z.abs(), a * x * x / 2.0 - tol);
        let r = self.radius.unwrap_or(0.0);
        let width = lt("|x| < r - tol", x.abs(), r - tol);
        match self.kind {
            ConeKind::Full => vec![slope, height],
            ConeKind::Flat => vec![slope, le("|z| <= tol", z.abs(), tol)],
            ConeKind::TruncatedFull => vec![width, slope, height],
            ConeKind::Vertical => {
                let u = if x != 0.0 {
                    2.0 * z / (x * x)
                } else {
                    f64::INFINITY
                };
                vec![
                    Inequality {
                        label: "x != 0",
                        lhs: x.abs(),
                        rhs: 0.0,
                        holds: x != 0.0,
                    },
                    le("|y| <= tol", y.abs(), tol),
                    width,
                    lt("|2z/x^2| < a - tol", u.abs(), a - tol),
                ]
            }
        }
    }
}

/// Checks `fC(α) = C(α) ∩ {z = 0}` on the samples lying in the slab
/// `|z| <= tol`; samples off the slab are skipped.
pub fn flat_equals_full_slice(alpha: f64, samples: &PointCloud, tol: f64) -> Result<Certificate> {
    check_tol(tol)?;
    let flat = ConeSpec::flat(alpha)?;
    let full = ConeSpec::full(alpha)?;
    let mut cert = Certificate::new("flat-equals-full-slice")
        .param("alpha", alpha)
        .param("tol", tol)
        .param("samples", samples.len());
    let mut examined = 0usize;
    for &p in samples.points() {
        if p.z().abs() > tol {
            continue;
        }
        examined += 1;
        let (in_flat, in_full) = (flat.test(p, tol), full.test(p, tol));
        if in_flat != in_full {
            cert.set_param("examined", examined);
            return Ok(cert.fail(Witness::SliceDisagreement {
                alpha,
                point: p,
                tol,
                flat: in_flat,
                full: in_full,
            }));
        }
    }
    cert.set_param("examined", examined);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ConeSpec::full(0.0).is_err());
        assert!(ConeSpec::flat(-1.0).is_err());
        assert!(ConeSpec::new(ConeKind::Full, 1.0, Some(1.0)).is_err());
        assert!(ConeSpec::new(ConeKind::Vertical, 1.0, None).is_err());
        assert!(ConeSpec::truncated_full(1.0, 0.0).is_err());
        assert!(ConeSpec::vertical(1.0, f64::INFINITY).is_err());
        assert!(ConeSpec::full(1.0)
            .unwrap()
            .contains(Point::ORIGIN, -1.0)
            .is_err());
        assert!(ConeSpec::full(1.0)
            .unwrap()
            .contains(Point::ORIGIN, f64::NAN)
            .is_err());
    }

    #[test]
    fn flat_membership() {
        let c = ConeSpec::flat(0.5).unwrap();
        assert!(c.contains(p(1.0, 0.4, 0.0), 0.0).unwrap());
        assert!(!c.contains(p(1.0, 0.6, 0.0), 0.0).unwrap());
        assert!(!c.contains(p(1.0, 0.4, 1e-3), 0.0).unwrap());
        assert!(c.contains(p(1.0, 0.4, 1e-10), 1e-9).unwrap());
    }

    #[test]
    fn full_membership_cubic_witness() {
        // 0.001 < 0.25 * 0.01 / 2 = 0.00125
        let c = ConeSpec::full(0.25).unwrap();
        assert!(c.contains(p(0.1, 0.0, 0.001), 0.0).unwrap());
        assert!(!c.contains(p(0.1, 0.0, 0.0013), 0.0).unwrap());
    }

    #[test]
    fn truncated_membership() {
        let c = ConeSpec::truncated_full(1.0, 1.0).unwrap();
        assert!(c.contains(p(0.5, 0.2, 0.05), 0.0).unwrap());
        assert!(!c.contains(p(1.5, 0.2, 0.05), 0.0).unwrap());
    }

    #[test]
    fn vertical_membership() {
        let c = ConeSpec::vertical(1.0, 1.0).unwrap();
        // u = 2 * 0.05 / 0.25 = 0.4
        assert!(c.contains(p(0.5, 0.0, 0.05), 0.0).unwrap());
        assert!(!c.contains(p(0.5, 0.01, 0.05), 0.0).unwrap());
        assert!(!c.contains(p(0.5, 0.0, 0.2), 0.0).unwrap());
        assert!(!c.contains(p(0.0, 0.0, 0.0), 0.0).unwrap());
        assert!(!c.contains(p(1.2, 0.0, 0.0), 0.0).unwrap());
    }

    #[test]
    fn x_zero_is_never_inside() {
        let q = p(0.0, 0.0, 0.0);
        for c in [
            ConeSpec::full(3.0).unwrap(),
            ConeSpec::flat(3.0).unwrap(),
            ConeSpec::truncated_full(3.0, 2.0).unwrap(),
            ConeSpec::vertical(3.0, 2.0).unwrap(),
        ] {
            assert!(!c.contains(q, 0.0).unwrap());
            assert!(!c.contains(p(0.0, 0.0, 1e-9), 0.0).unwrap());
        }
    }

    #[test]
    fn translated_membership() {
        let flat = ConeSpec::flat(1.0).unwrap();
        let target = p(0.5, 0.0, 0.05);
        // (s eta, eta, 0) with eta = -0.2, s = 0.3; base⁻¹ target = (0.56, 0.2, 0).
        let base = p(-0.06, -0.2, 0.0);
        let rel = base.relative(target);
        assert!(rel.max_abs_diff(&p(0.56, 0.2, 0.0)) < 1e-15);
        assert!(flat.contains_translated(base, target, 0.0).unwrap());
        // With the opposite sign on the first coordinate the relative point is
        // (0.44, 0.2, 0), still inside fC(1).
        let other = p(0.06, -0.2, 0.0);
        assert!(other.relative(target).max_abs_diff(&p(0.44, 0.2, 0.0)) < 1e-15);
        assert!(flat.contains_translated(other, target, 0.0).unwrap());
        assert_eq!(
            flat.contains_translated(Point::ORIGIN, target, 0.0)
                .unwrap(),
            flat.contains(target, 0.0).unwrap()
        );
        for c in [
            flat,
            ConeSpec::full(2.0).unwrap(),
            ConeSpec::vertical(2.0, 1.0).unwrap(),
        ] {
            assert!(!c.contains_translated(target, target, 0.0).unwrap());
        }
    }

    #[test]
    fn inequalities_agree_with_test() {
        let cones = [
            ConeSpec::full(0.7).unwrap(),
            ConeSpec::flat(0.7).unwrap(),
            ConeSpec::truncated_full(0.7, 0.9).unwrap(),
            ConeSpec::vertical(0.7, 0.9).unwrap(),
        ];
        let pts = [
            p(0.5, 0.1, 0.02),
            p(0.5, 0.0, 0.02),
            p(0.5, 0.0, 0.0),
            p(1.0, 0.9, 0.0),
            p(0.0, 0.0, 0.0),
        ];
        for c in cones {
            for q in pts {
                let all = c.inequalities(q, 0.0).iter().all(|i| i.holds);
                assert_eq!(all, c.test(q, 0.0), "{c:?} {q:?}");
            }
        }
    }

    #[test]
    fn slice_identity() {
        let pts = PointCloud::new(alloc::vec![
            p(1.0, 0.5, 0.0),
            p(-1.0, 2.0, 0.0),
            p(1.0, 0.5, 0.1)
        ]);
        let cert = flat_equals_full_slice(1.0, &pts, 0.0).unwrap();
        assert!(cert.is_pass());
        assert_eq!(cert.real("examined"), Some(2.0));
    }
}
