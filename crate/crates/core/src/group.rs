//! The first Heisenberg group: `R^3` with the product
//! `(x,y,z)(x',y',z') = (x+x', y+y', z+z' + (xy' - x'y)/2)`.

use core::fmt;
use core::ops::Mul;

use crate::float;
use crate::{Error, Result};

/// A point of the Heisenberg group. All coordinates are finite.
#[derive(Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Point {
    x: f64,
    y: f64,
    z: f64,
}

/// A point of the `(eta, tau)` parameter plane of intrinsic graphs.
#[derive(Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PlanePoint {
    eta: f64,
    tau: f64,
}

fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

impl Point {
    pub const ORIGIN: Point = Point {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Ok(Point {
            x: finite("x", x)?,
            y: finite("y", y)?,
            z: finite("z", z)?,
        })
    }

    /// Builds a point from coordinates already known to be finite.
    pub(crate) const fn raw(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    #[inline]
    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Group product `self · other`.
    #[inline]
    pub fn product(self, other: Point) -> Point {
        Point {
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z + (self.x * other.y - other.x * self.y) / 2.0,
        }
    }

    /// The group inverse, `(-x, -y, -z)`.
    #[inline]
    pub fn inverse(self) -> Point {
        Point {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// `self⁻¹ · other`, the position of `other` as seen from `self`.
    #[inline]
    pub fn relative(self, other: Point) -> Point {
        self.inverse().product(other)
    }

    /// The dilation `δ_λ(x,y,z) = (λx, λy, λ²z)`.
    pub fn dilate(self, lambda: f64) -> Result<Point> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveDilation(lambda));
        }
        Ok(Point {
            x: lambda * self.x,
            y: lambda * self.y,
            z: lambda * lambda * self.z,
        })
    }

    /// The shear automorphism `M_t(x,y,z) = (x, y + t x, z)`.
    #[inline]
    pub fn shear(self, t: f64) -> Point {
        Point {
            x: self.x,
            y: self.y + t * self.x,
            z: self.z,
        }
    }

    /// Rotation by `theta` around the `z` axis.
    pub fn rotate_z(self, theta: f64) -> Point {
        let (s, c) = float::sin_cos(theta);
        Point {
            x: self.x * c - self.y * s,
            y: self.x * s + self.y * c,
            z: self.z,
        }
    }

    /// The graph projection `π(x,y,z) = (y, z + xy/2)`.
    #[inline]
    pub fn project(self) -> PlanePoint {
        PlanePoint {
            eta: self.y,
            tau: self.z + self.x * self.y / 2.0,
        }
    }

    /// `(0, eta, tau) · (x, 0, 0)`, the inverse of [`Point::project`] once the
    /// `x` coordinate is known.
    #[inline]
    pub fn lift(plane: PlanePoint, x: f64) -> Point {
        Point::raw(0.0, plane.eta, plane.tau).product(Point::raw(x, 0.0, 0.0))
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Point) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

impl Mul for Point {
    type Output = Point;

    #[inline]
    fn mul(self, rhs: Point) -> Point {
        self.product(rhs)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl PlanePoint {
    pub fn new(eta: f64, tau: f64) -> Result<Self> {
        Ok(PlanePoint {
            eta: finite("eta", eta)?,
            tau: finite("tau", tau)?,
        })
    }

    pub(crate) const fn raw(eta: f64, tau: f64) -> Self {
        PlanePoint { eta, tau }
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

impl fmt::Debug for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.eta, self.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z).unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(p(1.0, 0.0, 0.0) * p(0.0, 1.0, 0.0), p(1.0, 1.0, 0.5));
        assert_eq!(Point::ORIGIN * p(0.3, -2.0, 7.0), p(0.3, -2.0, 7.0));
        assert_eq!(
            p(0.5, 0.0, 0.125).inverse() * p(1.0, 0.0, 1.0),
            p(0.5, 0.0, 0.875)
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p(1.0, 2.0, 3.0).inverse(), p(-1.0, -2.0, -3.0));
        assert_eq!(Point::ORIGIN.inverse(), Point::ORIGIN);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Point::new(f64::NAN, 0.0, 0.0),
            Err(Error::NonFinite { name: "x", .. })
        ));
        assert!(Point::new(0.0, 0.0, f64::INFINITY).is_err());
        assert!(PlanePoint::new(0.0, f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn dilation() {
        assert_eq!(p(1.0, 1.0, 1.0).dilate(2.0).unwrap(), p(2.0, 2.0, 4.0));
        let q = p(0.3, -0.7, 1.1);
        assert_eq!(q.dilate(1.0).unwrap(), q);
        assert_eq!(q.dilate(0.0), Err(Error::NonPositiveDilation(0.0)));
        assert!(q.dilate(-1.0).is_err());
        assert!(q.dilate(f64::NAN).is_err());
    }

    #[test]
    fn shear_and_rotation() {
        assert_eq!(p(1.0, 2.0, 3.0).shear(1.0), p(1.0, 3.0, 3.0));
        let q = p(0.3, -0.7, 1.1);
        assert_eq!(q.shear(0.0), q);
        assert_eq!(q.rotate_z(0.0), q);
        let r = p(1.0, 0.0, 0.0).rotate_z(core::f64::consts::FRAC_PI_2);
        assert!(r.max_abs_diff(&p(0.0, 1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn projection() {
        let pr = p(1.0, 2.0, 3.0).project();
        assert_eq!((pr.eta(), pr.tau()), (2.0, 4.0));
        let pr = p(5.0, 0.0, -1.5).project();
        assert_eq!((pr.eta(), pr.tau()), (0.0, -1.5));
        let q = p(0.4, -1.3, 0.25);
        assert!(Point::lift(q.project(), q.x()).max_abs_diff(&q) < 1e-15);
    }
}
