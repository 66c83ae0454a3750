//! Cone-property checkers on point clouds and sampled checks of the cone
//! inclusions that turn flat cones into full cones.
//!
//! Pairwise checks are plain `O(N²)` loops over ordered pairs; the first
//! violating pair in index order is reported, so results do not depend on
//! scheduling. [`Pruner`] is the hook for skipping pairs that cannot
//! violate.

use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{Certificate, Witness};
use crate::cloud::PointCloud;
use crate::cone::ConeSpec;
use crate::float::linspace;
use crate::group::Point;
use crate::{Error, Result};

/// The slab `o · {|x| < radius}` around `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Neighborhood {
    pub center: Point,
    pub radius: f64,
}

impl Neighborhood {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(
                "neighborhood radius must be positive",
            ));
        }
        Ok(Neighborhood { center, radius })
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.relative(*p).x().abs() < self.radius
    }
}

/// Decides which ordered pairs a pairwise check may skip. Implementations
/// must only skip pairs for which `base⁻¹ q` cannot lie in the cone.
pub trait Pruner {
    fn skip(&self, base: &Point, q: &Point) -> bool;
}

/// Visits every pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllPairs;

impl Pruner for AllPairs {
    #[inline]
    fn skip(&self, _: &Point, _: &Point) -> bool {
        false
    }
}

fn validate_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Runs the pairwise cone test: fails at the first `(p, q)`, `q ≠ p`, with
/// `q ∈ p · cone`, where `p` ranges over the cloud points accepted by
/// `restrict`.
pub fn check_cone_property(
    name: &str,
    cloud: &PointCloud,
    cone: ConeSpec,
    tol: f64,
    restrict: Option<Neighborhood>,
    pruner: &dyn Pruner,
) -> Result<Certificate> {
    validate_tol(tol)?;
    let mut cert = Certificate::new(name)
        .param("alpha", cone.aperture())
        .param("tol", tol)
        .param("points", cloud.len());
    if let Some(r) = restrict {
        cert.set_param("restrict_radius", r.radius);
    }
    let pts = cloud.points();
    let mut bases = 0usize;
    let mut pairs = 0u64;
    for (i, p) in pts.iter().enumerate() {
        if restrict.is_some_and(|r| !r.contains(p)) {
            continue;
        }
        bases += 1;
        let inv = p.inverse();
        for (j, q) in pts.iter().enumerate() {
            if i == j || pruner.skip(p, q) {
                continue;
            }
            pairs += 1;
            if cone.test(inv * *q, tol) {
                cert.set_param("bases", bases);
                cert.set_param("pairs_checked", pairs);
                return Ok(cert.fail(Witness::membership(*p, cone, *q, tol, false)));
            }
        }
    }
    cert.set_param("bases", bases);
    cert.set_param("pairs_checked", pairs);
    Ok(cert)
}

/// `α`-flat cone property: `fC(α) ∩ p⁻¹S = ∅` for every sample `p`.
pub fn check_flat_property(cloud: &PointCloud, alpha: f64, tol: f64) -> Result<Certificate> {
    check_cone_property("flat", cloud, ConeSpec::flat(alpha)?, tol, None, &AllPairs)
}

/// `α`-full cone property `C(α) ∩ p⁻¹S = ∅`, optionally only for base
/// points in `restrict`.
pub fn check_full_property(
    cloud: &PointCloud,
    alpha: f64,
    tol: f64,
    restrict: Option<Neighborhood>,
) -> Result<Certificate> {
    check_cone_property(
        "full",
        cloud,
        ConeSpec::full(alpha)?,
        tol,
        restrict,
        &AllPairs,
    )
}

/// `α`-full cone property at the single base point `base`: no sample
/// other than `base` lies in `base · C(α)`.
pub fn check_full_at_base(
    cloud: &PointCloud,
    base: Point,
    alpha: f64,
    tol: f64,
) -> Result<Certificate> {
    validate_tol(tol)?;
    let cone = ConeSpec::full(alpha)?;
    let cert = Certificate::new("full-at-base")
        .param("alpha", alpha)
        .param("tol", tol)
        .param("points", cloud.len());
    let inv = base.inverse();
    for &q in cloud.points() {
        if q.max_abs_diff(&base) > crate::cloud::DUPLICATE_TOL && cone.test(inv * q, tol) {
            return Ok(cert.fail(Witness::membership(base, cone, q, tol, false)));
        }
    }
    Ok(cert)
}

/// The largest `α` for which [`check_flat_property`] passes: the minimum of
/// `|y|/|x|` over pairs with `p⁻¹q = (x, y, z)`, `|z| <= tol`, `x ≠ 0`.
/// Infinite when no pair constrains it.
pub fn max_flat_aperture(cloud: &PointCloud, tol: f64) -> Result<f64> {
    validate_tol(tol)?;
    if cloud.len() < 2 {
        return Err(Error::InvalidParameter(
            "aperture needs at least two points",
        ));
    }
    let pts = cloud.points();
    let mut best = f64::INFINITY;
    for (i, p) in pts.iter().enumerate() {
        let inv = p.inverse();
        for q in &pts[i + 1..] {
            let d = inv * *q;
            if d.z().abs() <= tol && d.x() != 0.0 {
                best = best.min(d.y().abs() / d.x().abs());
            }
        }
    }
    Ok(best)
}

/// Best rotation found by [`best_rotation_aperture`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RotationAperture {
    pub theta: f64,
    pub alpha: f64,
}

/// Searches `θ = -π/2 + kπ/n`, `k = 0..n`, for the rotation around the `z`
/// axis maximizing [`max_flat_aperture`]. Ties go to the smallest `|θ|`,
/// then to the positive angle.
pub fn best_rotation_aperture(
    cloud: &PointCloud,
    n_angles: usize,
    tol: f64,
) -> Result<RotationAperture> {
    if n_angles == 0 {
        return Err(Error::InvalidParameter("need at least one angle"));
    }
    let mut best: Option<RotationAperture> = None;
    for k in 0..n_angles {
        let theta = -PI / 2.0 + PI * k as f64 / n_angles as f64;
        let alpha = max_flat_aperture(&cloud.rotate_z(theta), tol)?;
        let better = match best {
            None => true,
            Some(b) => {
                alpha > b.alpha
                    || (alpha == b.alpha
                        && (theta.abs() < b.theta.abs()
                            || (theta.abs() == b.theta.abs() && theta > b.theta)))
            }
        };
        if better {
            best = Some(RotationAperture { theta, alpha });
        }
    }
    best.ok_or(Error::InvalidParameter("need at least one angle"))
}

/// The slope grid used for `s ∈ (-1/β, 1/β)`: midpoints of `n` equal cells.
pub fn open_slope_grid(beta: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| (-1.0 + (2 * k + 1) as f64 / n as f64) / beta)
}

/// Checks one instance of the vertical-set inclusion: with `η = -u x`,
/// `(x, 0, u x²/2) ∈ (s η, η, 0) · fC(β)`. Returns the witness on failure.
pub fn vertical_inclusion_instance(beta: f64, x: f64, u: f64, s: f64, tol: f64) -> Option<Witness> {
    let point = Point::raw(x, 0.0, u * x * x / 2.0);
    let eta = -u * x;
    let base = Point::raw(s * eta, eta, 0.0);
    let cone = ConeSpec::flat(beta).ok()?;
    (!cone.test(base.relative(point), tol))
        .then(|| Witness::membership(base, cone, point, tol, true))
}

fn positive(v: f64, what: &'static str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(what))
    }
}

/// Samples `(x, 0, u x²/2)` with `|u| < β/2 - tol`, `0 < |x| < 2ε/β - tol`
/// and checks that each lies in `(s η, η, 0) · fC(β)` for `η = -u x` and
/// every `s` of the open slope grid of `n_s` values.
pub fn check_lemma_vertical_inclusion(
    beta: f64,
    epsilon: f64,
    n_samples: usize,
    n_s: usize,
    tol: f64,
    seed: u64,
) -> Result<Certificate> {
    positive(beta, "beta must be positive")?;
    positive(epsilon, "epsilon must be positive")?;
    validate_tol(tol)?;
    if n_samples == 0 || n_s == 0 {
        return Err(Error::InvalidParameter("sample counts must be positive"));
    }
    let r = 2.0 * epsilon / beta;
    let (x_max, u_max) = (r - tol, beta / 2.0 - tol);
    if !(x_max > 0.0 && u_max > 0.0) {
        return Err(Error::InvalidParameter(
            "tolerance exceeds the vertical set",
        ));
    }
    let cert = Certificate::new("lemma-vertical-inclusion")
        .param("beta", beta)
        .param("epsilon", epsilon)
        .param("samples", n_samples)
        .param("s_values", n_s)
        .param("tol", tol)
        .param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_samples {
        let mut x = 0.0;
        while x == 0.0 {
            x = rng.random_range(-x_max..x_max);
        }
        let u = rng.random_range(-u_max..u_max);
        for s in open_slope_grid(beta, n_s) {
            if let Some(w) = vertical_inclusion_instance(beta, x, u, s, tol) {
                return Ok(cert.fail(w));
            }
        }
    }
    Ok(cert)
}

/// Samples both sides of `C(β, r) = ∪_{|t|<β} M_t(vC(β, r))`.
///
/// Forward: `p ∈ C(β, r)` maps by `M_{-t}`, `t = y/x`, into `vC(β, r)`.
/// Backward: `M_t q ∈ C(β, r)` for `q ∈ vC(β, r)`, `|t| < β`.
/// Samples are drawn from the hypothesis set shrunk by `tol` measured in
/// the units of the inequality being concluded, and kept by rejection.
pub fn check_shear_union_identity(
    beta: f64,
    r: f64,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Certificate> {
    positive(beta, "beta must be positive")?;
    positive(r, "radius must be positive")?;
    validate_tol(tol)?;
    let full = ConeSpec::truncated_full(beta, r)?;
    let vertical = ConeSpec::vertical(beta, r)?;
    let mut cert = Certificate::new("shear-union-identity")
        .param("beta", beta)
        .param("radius", r)
        .param("samples", n_samples)
        .param("tol", tol)
        .param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 1000 * n_samples.max(1);

    let mut kept = 0usize;
    let mut draws = 0usize;
    while kept < n_samples && draws < budget {
        draws += 1;
        let x = rng.random_range(-r..r);
        let v = rng.random_range(-beta..beta);
        let u = rng.random_range(-beta..beta);
        let p = Point::raw(x, v * x, u * x * x / 2.0);
        if x == 0.0 || !full.test(p, tol) || !((2.0 * p.z() / (x * x)).abs() < beta - tol) {
            continue;
        }
        kept += 1;
        let t = p.y() / p.x();
        let back = p.shear(-t);
        if !(t.abs() < beta) || !vertical.test(back, tol) {
            cert.set_param("forward_checked", kept);
            return Ok(cert.fail(Witness::membership(
                Point::ORIGIN,
                vertical,
                back,
                tol,
                true,
            )));
        }
    }
    cert.set_param("forward_checked", kept);
    if kept < n_samples {
        return Err(Error::InvalidParameter(
            "rejection sampling budget exhausted",
        ));
    }

    kept = 0;
    draws = 0;
    while kept < n_samples && draws < budget {
        draws += 1;
        let x = rng.random_range(-r..r);
        let u = rng.random_range(-beta..beta);
        let t = rng.random_range(-beta..beta);
        let shrunk = x != 0.0
            && x.abs() < r - tol
            && u.abs() * x * x / 2.0 < beta * x * x / 2.0 - tol
            && t.abs() * x.abs() < beta * x.abs() - tol;
        if !shrunk {
            continue;
        }
        kept += 1;
        let q = Point::raw(x, 0.0, u * x * x / 2.0);
        let image = q.shear(t);
        if !full.test(image, tol) {
            cert.set_param("backward_checked", kept);
            return Ok(cert.fail(Witness::membership(Point::ORIGIN, full, image, tol, true)));
        }
    }
    cert.set_param("backward_checked", kept);
    if kept < n_samples {
        return Err(Error::InvalidParameter(
            "rejection sampling budget exhausted",
        ));
    }
    Ok(cert)
}

/// Samples `p ∈ fC(α/2)` and checks `M_{-t} p ∈ fC(α)` for `n_t` evenly
/// spaced `t ∈ [-α/2, α/2]`, i.e. `fC(α/2) ⊂ M_t fC(α)`.
pub fn check_remark_shear_flat(
    alpha: f64,
    n_samples: usize,
    n_t: usize,
    tol: f64,
    seed: u64,
) -> Result<Certificate> {
    positive(alpha, "alpha must be positive")?;
    validate_tol(tol)?;
    if n_t == 0 {
        return Err(Error::InvalidParameter("need at least one shear"));
    }
    let half = ConeSpec::flat(alpha / 2.0)?;
    let flat = ConeSpec::flat(alpha)?;
    let mut cert = Certificate::new("remark-shear-flat")
        .param("alpha", alpha)
        .param("samples", n_samples)
        .param("t_values", n_t)
        .param("tol", tol)
        .param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut kept, mut draws) = (0usize, 0usize);
    while kept < n_samples && draws < 1000 * n_samples.max(1) {
        draws += 1;
        let x: f64 = rng.random_range(-1.0..1.0);
        let v = rng.random_range(-alpha / 2.0..alpha / 2.0);
        let p = Point::raw(x, v * x.abs(), 0.0);
        if !half.test(p, tol) {
            continue;
        }
        kept += 1;
        for t in linspace(-alpha / 2.0, alpha / 2.0, n_t) {
            let sheared = p.shear(-t);
            if !flat.test(sheared, tol) {
                cert.set_param("checked", kept);
                return Ok(cert.fail(Witness::membership(Point::ORIGIN, flat, sheared, tol, true)));
            }
        }
    }
    cert.set_param("checked", kept);
    if kept < n_samples {
        return Err(Error::InvalidParameter(
            "rejection sampling budget exhausted",
        ));
    }
    Ok(cert)
}
