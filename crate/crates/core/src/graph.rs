//! Intrinsic graphs `Γ_φ = {(0, η, τ)(φ(η, τ), 0, 0)}` over rectangles.
//!
//! A graph is given by a [`GraphFunction`]: a constant, an affine map, or a
//! bilinear interpolant of a [`SurfaceGrid`]. Transformed graphs
//! `M_t(p⁻¹ Γ_φ)` are resampled on a lattice and re-read as graphs by
//! piecewise-linear interpolation over their projections.

use alloc::vec::Vec;

use crate::bisect::{bisect, NoSignChange};
use crate::cloud::{PointCloud, DUPLICATE_TOL};
use crate::float::{self, linspace};
use crate::group::{PlanePoint, Point};
#[cfg(feature = "delaunay")]
use crate::mesh::EdgeFilter;
use crate::mesh::TriMesh;
use crate::{Error, Result};

/// Points farther than this (relative to `max(1, |x|)`) from the graph in
/// the `x` direction are not considered on it.
pub const ON_GRAPH_TOL: f64 = 1e-9;

/// An axis-aligned rectangle `[eta_min, eta_max] x [tau_min, tau_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Rect {
    pub eta_min: f64,
    pub eta_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
}

impl Rect {
    pub fn new(eta_min: f64, eta_max: f64, tau_min: f64, tau_max: f64) -> Result<Self> {
        let all_finite = [eta_min, eta_max, tau_min, tau_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || !(eta_min < eta_max) || !(tau_min < tau_max) {
            return Err(Error::InvalidGrid(
                "rectangle bounds must be finite and increasing",
            ));
        }
        Ok(Rect {
            eta_min,
            eta_max,
            tau_min,
            tau_max,
        })
    }

    /// `[-eta0, eta0] x [-tau0, tau0]`.
    pub fn centered(eta0: f64, tau0: f64) -> Result<Self> {
        Self::new(-eta0, eta0, -tau0, tau0)
    }

    /// Centered at `(eta, tau)` with the given half-widths.
    pub fn around(center: PlanePoint, eta0: f64, tau0: f64) -> Result<Self> {
        Self::new(
            center.eta() - eta0,
            center.eta() + eta0,
            center.tau() - tau0,
            center.tau() + tau0,
        )
    }

    pub fn contains(&self, eta: f64, tau: f64) -> bool {
        self.eta_min <= eta && eta <= self.eta_max && self.tau_min <= tau && tau <= self.tau_max
    }

    pub fn center(&self) -> PlanePoint {
        PlanePoint::raw(
            (self.eta_min + self.eta_max) / 2.0,
            (self.tau_min + self.tau_max) / 2.0,
        )
    }

    /// Largest half-widths `(eta0, tau0)` such that the centered rectangle
    /// `[-eta0, eta0] x [-tau0, tau0]` lies inside `self`.
    pub fn symmetric_half_widths(&self) -> (f64, f64) {
        (
            (-self.eta_min).min(self.eta_max),
            (-self.tau_min).min(self.tau_max),
        )
    }

    /// Lattice nodes `(eta_i, tau_j)`, `eta` outermost.
    pub fn lattice(&self, n_eta: usize, n_tau: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let taus = linspace(self.tau_min, self.tau_max, n_tau);
        linspace(self.eta_min, self.eta_max, n_eta)
            .flat_map(move |e| taus.clone().map(move |t| (e, t)))
    }
}

/// Values of `φ` on a rectangular lattice; `phi[i * n_tau + j] = φ(eta[i], tau[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    eta: Vec<f64>,
    tau: Vec<f64>,
    phi: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

impl SurfaceGrid {
    pub fn new(eta: Vec<f64>, tau: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if eta.len() < 2 || tau.len() < 2 {
            return Err(Error::InvalidGrid("grids need at least two nodes per axis"));
        }
        if !strictly_increasing(&eta) || !strictly_increasing(&tau) {
            return Err(Error::InvalidGrid(
                "grid nodes must be finite and strictly increasing",
            ));
        }
        if phi.len() != eta.len() * tau.len() {
            return Err(Error::InvalidGrid("phi does not match the grid dimensions"));
        }
        if !phi.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("phi values must be finite"));
        }
        Ok(SurfaceGrid { eta, tau, phi })
    }

    /// Samples `f` on the `n_eta x n_tau` lattice of `rect`.
    pub fn tabulate(
        rect: Rect,
        n_eta: usize,
        n_tau: usize,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self> {
        let eta: Vec<f64> = linspace(rect.eta_min, rect.eta_max, n_eta).collect();
        let tau: Vec<f64> = linspace(rect.tau_min, rect.tau_max, n_tau).collect();
        let phi = rect.lattice(n_eta, n_tau).map(|(e, t)| f(e, t)).collect();
        Self::new(eta, tau, phi)
    }

    pub fn eta_values(&self) -> &[f64] {
        &self.eta
    }

    pub fn tau_values(&self) -> &[f64] {
        &self.tau
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.phi[i * self.tau.len() + j]
    }

    pub fn domain(&self) -> Rect {
        Rect {
            eta_min: self.eta[0],
            eta_max: self.eta[self.eta.len() - 1],
            tau_min: self.tau[0],
            tau_max: self.tau[self.tau.len() - 1],
        }
    }

    fn cell(nodes: &[f64], v: f64) -> (usize, f64) {
        let k = nodes.partition_point(|&n| n <= v).clamp(1, nodes.len() - 1) - 1;
        let w = (v - nodes[k]) / (nodes[k + 1] - nodes[k]);
        (k, w.clamp(0.0, 1.0))
    }

    /// Bilinear interpolation; callers guarantee `(eta, tau)` is in the domain.
    fn bilinear(&self, eta: f64, tau: f64) -> f64 {
        let (i, u) = Self::cell(&self.eta, eta);
        let (j, v) = Self::cell(&self.tau, tau);
        let f00 = self.value(i, j);
        let f01 = self.value(i, j + 1);
        let f10 = self.value(i + 1, j);
        let f11 = self.value(i + 1, j + 1);
        (1.0 - u) * ((1.0 - v) * f00 + v * f01) + u * ((1.0 - v) * f10 + v * f11)
    }

    /// Largest difference quotient along `tau`, which is the Lipschitz
    /// constant of the bilinear interpolant in `tau`.
    pub fn tau_lipschitz(&self) -> f64 {
        let nt = self.tau.len();
        let mut l: f64 = 0.0;
        for i in 0..self.eta.len() {
            for j in 0..nt - 1 {
                let d = (self.value(i, j + 1) - self.value(i, j)).abs()
                    / (self.tau[j + 1] - self.tau[j]);
                l = l.max(d);
            }
        }
        l
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Constant(f64),
    Affine { offset: f64, d_eta: f64, d_tau: f64 },
    Grid(SurfaceGrid),
}

/// A continuous function `φ` on a rectangle, defining the graph `Γ_φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    domain: Rect,
    shape: Shape,
}

impl GraphFunction {
    pub fn constant(value: f64, domain: Rect) -> Result<Self> {
        Self::affine(value, 0.0, 0.0, domain).map(|g| GraphFunction {
            shape: Shape::Constant(value),
            ..g
        })
    }

    /// `φ(η, τ) = offset + d_eta η + d_tau τ`.
    pub fn affine(offset: f64, d_eta: f64, d_tau: f64, domain: Rect) -> Result<Self> {
        if ![offset, d_eta, d_tau].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "affine coefficients must be finite",
            ));
        }
        Ok(GraphFunction {
            domain,
            shape: Shape::Affine {
                offset,
                d_eta,
                d_tau,
            },
        })
    }

    pub fn from_grid(grid: SurfaceGrid) -> Self {
        GraphFunction {
            domain: grid.domain(),
            shape: Shape::Grid(grid),
        }
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn grid(&self) -> Option<&SurfaceGrid> {
        match &self.shape {
            Shape::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// A short description of the representation, for reports.
    pub fn describe(&self) -> &'static str {
        match self.shape {
            Shape::Constant(_) => "constant",
            Shape::Affine { .. } => "affine",
            Shape::Grid(_) => "grid",
        }
    }

    pub fn eval(&self, eta: f64, tau: f64) -> Result<f64> {
        if !self.domain.contains(eta, tau) {
            return Err(Error::OutOfDomain { eta, tau });
        }
        Ok(self.eval_unchecked(eta, tau))
    }

    pub(crate) fn eval_unchecked(&self, eta: f64, tau: f64) -> f64 {
        match &self.shape {
            Shape::Constant(c) => *c,
            Shape::Affine {
                offset,
                d_eta,
                d_tau,
            } => offset + d_eta * eta + d_tau * tau,
            Shape::Grid(g) => g.bilinear(eta, tau),
        }
    }

    /// Lipschitz constant of `φ` in `tau`.
    pub fn tau_lipschitz(&self) -> f64 {
        match &self.shape {
            Shape::Constant(_) => 0.0,
            Shape::Affine { d_tau, .. } => d_tau.abs(),
            Shape::Grid(g) => g.tau_lipschitz(),
        }
    }

    /// Tabulates `self` on an `n_eta x n_tau` lattice of its domain.
    pub fn to_grid(&self, n_eta: usize, n_tau: usize) -> Result<SurfaceGrid> {
        SurfaceGrid::tabulate(self.domain, n_eta, n_tau, |e, t| self.eval_unchecked(e, t))
    }

    /// Distance in `x` between `p` and the graph point over `π(p)`.
    pub fn defect(&self, p: Point) -> Result<f64> {
        let pr = p.project();
        Ok((self.eval(pr.eta(), pr.tau())? - p.x()).abs())
    }

    /// Whether `p` lies on the graph up to [`ON_GRAPH_TOL`].
    pub fn on_graph(&self, p: Point) -> bool {
        self.defect(p)
            .map(|d| d <= ON_GRAPH_TOL * p.x().abs().max(1.0))
            .unwrap_or(false)
    }
}

/// `(φ(η,τ), η, τ - η φ(η,τ)/2)`, the graph point over `(eta, tau)`.
pub fn graph_point(phi: &GraphFunction, eta: f64, tau: f64) -> Result<Point> {
    let x = phi.eval(eta, tau)?;
    Ok(Point::raw(x, eta, tau - eta * x / 2.0))
}

/// `ζ(η, τ) = τ - η φ(η, τ)/2`, the `z` coordinate of the graph point.
pub fn zeta(phi: &GraphFunction, eta: f64, tau: f64) -> Result<f64> {
    Ok(tau - eta * phi.eval(eta, tau)? / 2.0)
}

/// A point `(s η, η, 0)` of the graph found by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FlatIntersection {
    pub eta: f64,
    pub s: f64,
    pub tau: f64,
    /// `ζ(η, τ)` at the returned root.
    pub residual: f64,
    /// Width of the final bisection bracket.
    pub bracket: f64,
    /// Bound on the error in `s` caused by stopping the bisection:
    /// `L_τ · root_tol / |η|`, zero at `η = 0`.
    pub slack: f64,
}

/// Finds `τ` in `[-τ0, τ0]` with `ζ(η, τ) = 0` by bisection, and returns the
/// slope `s = φ(η, τ)/η` of the graph point `(s η, η, ~0)`.
///
/// The domain must contain `[-τ0, τ0]` around `tau = 0`; `τ0` is the largest
/// such half-width. Fails with [`Error::NotFound`] unless
/// `ζ(η, -τ0) < 0 < ζ(η, τ0)`.
pub fn flat_intersection(
    phi: &GraphFunction,
    beta: f64,
    eta: f64,
    root_tol: f64,
) -> Result<FlatIntersection> {
    if !(beta > 0.0) || !(root_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "beta and root_tol must be positive",
        ));
    }
    let dom = phi.domain();
    let (_, tau0) = dom.symmetric_half_widths();
    if !(tau0 > 0.0) {
        return Err(Error::InvalidGrid(
            "domain must contain tau = 0 in its interior",
        ));
    }
    if !(dom.eta_min <= eta && eta <= dom.eta_max) {
        return Err(Error::OutOfDomain { eta, tau: 0.0 });
    }
    let z = |tau: f64| tau - eta * phi.eval_unchecked(eta, tau) / 2.0;
    let (lo, hi) = (z(-tau0), z(tau0));
    if !(lo < 0.0 && 0.0 < hi) {
        return Err(Error::NotFound {
            eta,
            zeta_lo: lo,
            zeta_hi: hi,
        });
    }
    let root = bisect(z, -tau0, tau0, root_tol).map_err(|NoSignChange { f_lo, f_hi }| {
        Error::NotFound {
            eta,
            zeta_lo: f_lo,
            zeta_hi: f_hi,
        }
    })?;
    let (s, slack) = if eta == 0.0 {
        (0.0, 0.0)
    } else {
        (
            phi.eval_unchecked(eta, root.x) / eta,
            phi.tau_lipschitz() * root_tol / eta.abs(),
        )
    };
    Ok(FlatIntersection {
        eta,
        s,
        tau: root.x,
        residual: root.value,
        bracket: root.width,
        slack,
    })
}

/// `ε = min{η0, sqrt(τ0 β)}`, the half-width of the `η` range on which
/// [`flat_intersection`] is guaranteed to succeed for a `β`-flat graph.
pub fn intersection_radius(eta0: f64, tau0: f64, beta: f64) -> f64 {
    eta0.min(float::sqrt(tau0 * beta))
}

/// Graph points on the regular `n_eta x n_tau` lattice of the domain.
pub fn sample_graph(phi: &GraphFunction, n_eta: usize, n_tau: usize) -> Result<PointCloud> {
    if n_eta < 2 || n_tau < 2 {
        return Err(Error::InvalidGrid("sample counts must be at least 2"));
    }
    let dom = phi.domain();
    Ok(PointCloud::new(
        dom.lattice(n_eta, n_tau)
            .map(|(e, t)| {
                let x = phi.eval_unchecked(e, t);
                Point::raw(x, e, t - e * x / 2.0)
            })
            .collect(),
    ))
}

/// Resampling and rasterization densities for transformed graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Lattice used to resample the source graph, per axis.
    pub resample: usize,
    /// Lattice of the produced grid function, per axis.
    pub nodes: usize,
    /// Raster nodes per half-axis when searching common rectangles.
    pub raster: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            resample: 41,
            nodes: 41,
            raster: 40,
        }
    }
}

/// Samples of `M_t(p⁻¹ Γ_φ)` on the resampling lattice, with the mesh over
/// their projections.
#[derive(Debug, Clone)]
pub struct TransformedGraph {
    pub t: f64,
    pub base: Point,
    pub points: Vec<Point>,
    pub mesh: TriMesh,
}

impl TransformedGraph {
    pub fn new(phi: &GraphFunction, t: f64, base: Point, resample: usize) -> Result<Self> {
        if resample < 2 {
            return Err(Error::InvalidGrid(
                "resampling needs at least two nodes per axis",
            ));
        }
        let inv = base.inverse();
        let points: Vec<Point> = phi
            .domain()
            .lattice(resample, resample)
            .map(|(e, tau)| {
                let x = phi.eval_unchecked(e, tau);
                (inv * Point::raw(x, e, tau - e * x / 2.0)).shear(t)
            })
            .collect();
        let verts = points.iter().map(|w| {
            let pr = w.project();
            [pr.eta(), pr.tau()]
        });
        let mesh = TriMesh::structured(
            resample,
            resample,
            verts.collect(),
            points.iter().map(Point::x).collect(),
        );
        Ok(TransformedGraph {
            t,
            base,
            points,
            mesh,
        })
    }

    /// Largest `(e, t)` with `[-e, e] x [-t, t]` inside the bounding box of
    /// the projected image.
    pub fn symmetric_extent(&self) -> (f64, f64) {
        match self.mesh.bounds() {
            Some((lo, hi)) => ((-lo[0]).min(hi[0]), (-lo[1]).min(hi[1])),
            None => (0.0, 0.0),
        }
    }
}

fn check_base(phi: &GraphFunction, p: Point) -> Result<()> {
    let d = phi.defect(p)?;
    if d > ON_GRAPH_TOL * p.x().abs().max(1.0) {
        return Err(Error::NotOnGraph { defect: d });
    }
    Ok(())
}

/// `φ_{t,p}` on `target`: the function whose graph is `M_t(p⁻¹ Γ_φ)` over
/// `target`, tabulated on an `opts.nodes` lattice.
pub fn reparameterize(
    phi: &GraphFunction,
    t: f64,
    p: Point,
    target: Rect,
    opts: &SamplingOptions,
) -> Result<GraphFunction> {
    check_base(phi, p)?;
    let image = TransformedGraph::new(phi, t, p, opts.resample)?;
    reparameterize_image(&image, target, opts.nodes)
}

/// Reads an already transformed graph as a grid function over `target`.
pub fn reparameterize_image(
    image: &TransformedGraph,
    target: Rect,
    nodes: usize,
) -> Result<GraphFunction> {
    let n = nodes.max(2);
    let mut values = Vec::with_capacity(n * n);
    for (e, tau) in target.lattice(n, n) {
        match image.mesh.interpolate([e, tau]) {
            Some(x) => values.push(x),
            None => return Err(Error::NotRepresentable { eta: e, tau }),
        }
    }
    let grid = SurfaceGrid::new(
        linspace(target.eta_min, target.eta_max, n).collect(),
        linspace(target.tau_min, target.tau_max, n).collect(),
        values,
    )?;
    Ok(GraphFunction::from_grid(grid))
}

/// Largest-area rectangle `[-i h, i h] x [-j k, j k]` (shifted to `center`)
/// whose raster nodes all satisfy `covered`, shrunk by one raster step.
/// `extent` bounds the search; `half` is the number of raster steps per
/// half-axis.
pub(crate) fn largest_centered_rect(
    center: [f64; 2],
    extent: (f64, f64),
    half: usize,
    mut covered: impl FnMut([f64; 2]) -> bool,
) -> Option<(f64, f64)> {
    if !(extent.0 > 0.0 && extent.1 > 0.0) || half < 2 {
        return None;
    }
    let side = 2 * half + 1;
    let (h, k) = (extent.0 / half as f64, extent.1 / half as f64);
    // prefix[(a+1) * (side+1) + (b+1)] counts uncovered nodes in [0..=a] x [0..=b]
    let mut prefix = alloc::vec![0u32; (side + 1) * (side + 1)];
    for a in 0..side {
        for b in 0..side {
            let q = [
                center[0] + (a as f64 - half as f64) * h,
                center[1] + (b as f64 - half as f64) * k,
            ];
            let miss = u32::from(!covered(q));
            prefix[(a + 1) * (side + 1) + b + 1] =
                miss + prefix[a * (side + 1) + b + 1] + prefix[(a + 1) * (side + 1) + b]
                    - prefix[a * (side + 1) + b];
        }
    }
    let misses = |i: usize, j: usize| {
        let (a0, a1, b0, b1) = (half - i, half + i + 1, half - j, half + j + 1);
        prefix[a1 * (side + 1) + b1] + prefix[a0 * (side + 1) + b0]
            - prefix[a0 * (side + 1) + b1]
            - prefix[a1 * (side + 1) + b0]
    };
    let mut best: Option<(usize, usize)> = None;
    for i in 1..=half {
        if misses(i, 0) > 0 {
            break;
        }
        // largest j with no misses, by bisection on the monotone predicate
        let (mut lo, mut hi) = (0usize, half);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if misses(i, mid) == 0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        if best.is_none_or(|(bi, bj)| i * lo > bi * bj) {
            best = Some((i, lo));
        }
    }
    let (i, j) = best?;
    if i < 2 || j < 2 {
        return None;
    }
    Some(((i - 1) as f64 * h, (j - 1) as f64 * k))
}

/// The largest centered rectangle `[-η0, η0] x [-τ0, τ0]` contained in the
/// projection of `M_t(p⁻¹ Γ_φ)` for every base point `p` and every `t`.
///
/// Coverage is decided on a raster of `2 raster + 1` nodes per axis spanning
/// the common symmetric extent of all images; the result is shrunk by one
/// raster step.
pub fn common_domain(
    phi: &GraphFunction,
    alpha: f64,
    base_points: &[Point],
    t_grid: &[f64],
    opts: &SamplingOptions,
) -> Result<Rect> {
    common_domain_within(phi, alpha, base_points, t_grid, opts, None)
}

/// As [`common_domain`], with the raster extent fixed to `extent` instead of
/// being derived from the images.
pub fn common_domain_within(
    phi: &GraphFunction,
    alpha: f64,
    base_points: &[Point],
    t_grid: &[f64],
    opts: &SamplingOptions,
    extent: Option<(f64, f64)>,
) -> Result<Rect> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter("alpha must be positive"));
    }
    if base_points.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one base point and one shear",
        ));
    }
    if t_grid.iter().any(|t| !(t.abs() <= alpha / 2.0)) {
        return Err(Error::InvalidParameter(
            "shears must lie in [-alpha/2, alpha/2]",
        ));
    }
    for &p in base_points {
        check_base(phi, p)?;
    }
    let mut images = Vec::with_capacity(base_points.len() * t_grid.len());
    for &p in base_points {
        for &t in t_grid {
            images.push(TransformedGraph::new(phi, t, p, opts.resample)?);
        }
    }
    let extent = extent.unwrap_or_else(|| {
        images
            .iter()
            .fold((f64::INFINITY, f64::INFINITY), |acc, im| {
                let e = im.symmetric_extent();
                (acc.0.min(e.0), acc.1.min(e.1))
            })
    });
    let (eta0, tau0) = largest_centered_rect([0.0, 0.0], extent, opts.raster, |q| {
        images.iter().all(|im| im.mesh.covers(q))
    })
    .ok_or(Error::EmptyDomain)?;
    Rect::centered(eta0, tau0)
}

#[cfg(feature = "delaunay")]
/// A grid function fitted to a point cloud read as an intrinsic graph.
#[derive(Debug, Clone)]
pub struct FittedGraph {
    pub phi: GraphFunction,
    /// The sample whose projection is closest to the centroid of all
    /// projections; the fitted domain is centered at its projection.
    pub center: Point,
}

/// Fits a grid function to `cloud` by piecewise-linear interpolation of `x`
/// over the projections `π(p)`.
///
/// Fails with [`Error::NotAGraph`] if two samples share a projection, and
/// with [`Error::EmptyDomain`] if the triangulated projections cover no
/// rectangle around the center sample (e.g. when they are collinear).
#[cfg(feature = "delaunay")]
pub fn fit_cloud(cloud: &PointCloud, opts: &SamplingOptions) -> Result<FittedGraph> {
    if cloud.len() < 3 {
        return Err(Error::EmptyDomain);
    }
    let pts = cloud.points();
    let proj: Vec<[f64; 2]> = pts
        .iter()
        .map(|p| {
            let pr = p.project();
            [pr.eta(), pr.tau()]
        })
        .collect();
    if let Some((first, _)) = projection_collision(cloud) {
        let pr = first.project();
        return Err(Error::NotAGraph {
            eta: pr.eta(),
            tau: pr.tau(),
        });
    }
    let n = pts.len() as f64;
    let centroid = proj
        .iter()
        .fold([0.0, 0.0], |acc, q| [acc[0] + q[0] / n, acc[1] + q[1] / n]);
    let center_idx = (0..pts.len())
        .min_by(|&a, &b| {
            let d = |i: usize| {
                let (u, v) = (proj[i][0] - centroid[0], proj[i][1] - centroid[1]);
                u * u + v * v
            };
            let (da, db) = (d(a), d(b));
            da.total_cmp(&db).then(a.cmp(&b))
        })
        .unwrap_or(0);
    let c = proj[center_idx];
    let mesh = TriMesh::delaunay(
        proj,
        pts.iter().map(Point::x).collect(),
        EdgeFilter::MedianMultiple(3.0),
    );
    let (lo, hi) = mesh.bounds().ok_or(Error::EmptyDomain)?;
    let extent = (
        (c[0] - lo[0]).min(hi[0] - c[0]),
        (c[1] - lo[1]).min(hi[1] - c[1]),
    );
    let (eta0, tau0) = largest_centered_rect(c, extent, opts.raster, |q| mesh.covers(q))
        .ok_or(Error::EmptyDomain)?;
    let rect = Rect::around(PlanePoint::raw(c[0], c[1]), eta0, tau0)?;
    let n = opts.nodes.max(2);
    let mut values = Vec::with_capacity(n * n);
    for (e, tau) in rect.lattice(n, n) {
        values.push(
            mesh.interpolate([e, tau])
                .ok_or(Error::NotRepresentable { eta: e, tau })?,
        );
    }
    let grid = SurfaceGrid::new(
        linspace(rect.eta_min, rect.eta_max, n).collect(),
        linspace(rect.tau_min, rect.tau_max, n).collect(),
        values,
    )?;
    Ok(FittedGraph {
        phi: GraphFunction::from_grid(grid),
        center: pts[center_idx],
    })
}

/// The first pair of distinct samples sharing a projection, if any.
pub fn projection_collision(cloud: &PointCloud) -> Option<(Point, Point)> {
    let pts = cloud.points();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    let pr: Vec<PlanePoint> = pts.iter().map(|p| p.project()).collect();
    order.sort_by(|&a, &b| pr[a].eta().total_cmp(&pr[b].eta()).then(a.cmp(&b)));
    let mut found: Option<(usize, usize)> = None;
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if pr[b].eta() - pr[a].eta() > DUPLICATE_TOL {
                break;
            }
            if (pr[b].tau() - pr[a].tau()).abs() <= DUPLICATE_TOL {
                let pair = (a.min(b), a.max(b));
                if found.is_none_or(|f| pair < f) {
                    found = Some(pair);
                }
            }
        }
    }
    found.map(|(a, b)| (pts[a], pts[b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rect {
        Rect::centered(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(SurfaceGrid::new(
            alloc::vec![0.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0, 0.0]
        )
        .is_err());
        assert!(SurfaceGrid::new(
            alloc::vec![1.0, 0.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0; 4]
        )
        .is_err());
        assert!(SurfaceGrid::new(
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0; 3]
        )
        .is_err());
        assert!(SurfaceGrid::new(
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0, 0.0, f64::NAN, 0.0]
        )
        .is_err());
        assert!(Rect::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn bilinear_matches_affine() {
        let f = |e: f64, t: f64| 0.2 - 0.4 * e + 1.5 * t;
        let g = GraphFunction::from_grid(SurfaceGrid::tabulate(unit(), 5, 7, f).unwrap());
        for (e, t) in [(0.0, 0.0), (0.31, -0.77), (1.0, 1.0), (-1.0, 0.5)] {
            assert!((g.eval(e, t).unwrap() - f(e, t)).abs() < 1e-14);
        }
        assert!((g.tau_lipschitz() - 1.5).abs() < 1e-12);
        assert!(matches!(g.eval(1.5, 0.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn graph_point_examples() {
        let one = GraphFunction::constant(1.0, Rect::new(-3.0, 3.0, -3.0, 3.0).unwrap()).unwrap();
        assert_eq!(
            graph_point(&one, 2.0, 3.0).unwrap(),
            Point::new(1.0, 2.0, 2.0).unwrap()
        );
        assert_eq!(zeta(&one, 2.0, 3.0).unwrap(), 2.0);
        let zero = GraphFunction::constant(0.0, unit()).unwrap();
        assert_eq!(
            graph_point(&zero, 0.5, -0.25).unwrap(),
            Point::new(0.0, 0.5, -0.25).unwrap()
        );
        assert_eq!(zeta(&zero, 0.5, -0.25).unwrap(), -0.25);
        assert!(graph_point(&zero, 2.0, 0.0).is_err());
    }

    #[test]
    fn zeta_signs_at_eta_zero() {
        let g = GraphFunction::affine(0.3, 2.0, -5.0, Rect::centered(1.0, 0.7).unwrap()).unwrap();
        assert_eq!(zeta(&g, 0.0, 0.7).unwrap(), 0.7);
        assert_eq!(zeta(&g, 0.0, -0.7).unwrap(), -0.7);
    }

    #[test]
    fn flat_intersection_vanishing_phi() {
        let zero = GraphFunction::constant(0.0, unit()).unwrap();
        for eta in [-0.5, 0.0, 0.25] {
            let r = flat_intersection(&zero, 1.0, eta, 1e-12).unwrap();
            assert_eq!(r.s, 0.0);
            assert!(r.tau.abs() < 1e-12);
        }
    }

    #[test]
    fn flat_intersection_constant_closed_form() {
        let c = 0.3;
        let g = GraphFunction::constant(c, unit()).unwrap();
        let eta = 0.6;
        let r = flat_intersection(&g, 1.0, eta, 1e-10).unwrap();
        assert!((r.tau - eta * c / 2.0).abs() <= 1e-10);
        assert!((r.s - c / eta).abs() < 1e-12);
        assert!(r.residual.abs() <= 1e-10);
    }

    #[test]
    fn flat_intersection_not_found() {
        // ζ(η, τ) = τ - η c/2 has its root outside [-τ0, τ0] when η c/2 > τ0.
        let g = GraphFunction::constant(10.0, Rect::centered(1.0, 0.1).unwrap()).unwrap();
        assert!(matches!(
            flat_intersection(&g, 1.0, 0.5, 1e-10),
            Err(Error::NotFound { .. })
        ));
        assert!(matches!(
            flat_intersection(&g, 1.0, 2.0, 1e-10),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn epsilon_formula() {
        assert_eq!(intersection_radius(1.0, 0.5, 2.0), 1.0);
        assert_eq!(intersection_radius(1.0, 0.08, 0.5), 0.2);
    }

    #[test]
    fn sample_graph_counts() {
        let zero = GraphFunction::constant(0.0, unit()).unwrap();
        let c = sample_graph(&zero, 2, 2).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c
            .iter()
            .all(|p| p.x() == 0.0 && p.y().abs() == 1.0 && p.z().abs() == 1.0));
        assert!(sample_graph(&zero, 1, 5).is_err());
        assert_eq!(sample_graph(&zero, 5, 3).unwrap().len(), 15);
    }

    #[test]
    fn reparameterize_identity() {
        let f = |e: f64, t: f64| 0.1 * e + 0.05 * t * t;
        let g = GraphFunction::from_grid(SurfaceGrid::tabulate(unit(), 21, 21, f).unwrap());
        let opts = SamplingOptions {
            resample: 21,
            nodes: 11,
            raster: 20,
        };
        let sub = Rect::new(-0.5, 0.75, -1.0, 0.2).unwrap();
        let r = reparameterize(&g, 0.0, Point::ORIGIN, sub, &opts).unwrap();
        for (e, t) in sub.lattice(11, 11) {
            assert!((r.eval(e, t).unwrap() - g.eval(e, t).unwrap()).abs() < 1e-12);
        }
        let whole = reparameterize(&g, 0.0, Point::ORIGIN, unit(), &opts).unwrap();
        assert!((whole.eval(1.0, -1.0).unwrap() - f(1.0, -1.0)).abs() < 1e-12);
    }

    #[test]
    fn reparameterize_vertical_plane_stays_zero() {
        let zero = GraphFunction::constant(0.0, unit()).unwrap();
        let opts = SamplingOptions {
            resample: 11,
            nodes: 9,
            raster: 10,
        };
        let p = graph_point(&zero, 0.2, -0.3).unwrap();
        for t in [-0.5, 0.0, 0.4] {
            let r = reparameterize(&zero, t, p, Rect::centered(0.5, 0.5).unwrap(), &opts).unwrap();
            let g = r.grid().unwrap();
            assert!(g.phi_values().iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn reparameterize_rejects_uncovered_and_off_graph() {
        let zero = GraphFunction::constant(0.0, unit()).unwrap();
        let opts = SamplingOptions {
            resample: 11,
            nodes: 9,
            raster: 10,
        };
        let p = graph_point(&zero, 0.5, 0.5).unwrap();
        assert!(matches!(
            reparameterize(&zero, 0.0, p, Rect::centered(0.9, 0.9).unwrap(), &opts),
            Err(Error::NotRepresentable { .. })
        ));
        let off = Point::new(0.3, 0.0, 0.0).unwrap();
        assert!(matches!(
            reparameterize(&zero, 0.0, off, Rect::centered(0.2, 0.2).unwrap(), &opts),
            Err(Error::NotOnGraph { .. })
        ));
    }

    #[test]
    fn common_domain_identity_is_whole_image() {
        let g = GraphFunction::constant(0.0, unit()).unwrap();
        let opts = SamplingOptions {
            resample: 21,
            nodes: 21,
            raster: 20,
        };
        let r = common_domain(&g, 1.0, &[Point::ORIGIN], &[0.0], &opts).unwrap();
        // one raster step (0.05) short of the full square
        assert!(
            (r.eta_max - 0.95).abs() < 1e-12 && (r.tau_max - 0.95).abs() < 1e-12,
            "{r:?}"
        );
    }

    #[test]
    fn common_domain_rejects_bad_shears() {
        let g = GraphFunction::constant(0.0, unit()).unwrap();
        let opts = SamplingOptions::default();
        assert!(common_domain(&g, 1.0, &[Point::ORIGIN], &[0.6], &opts).is_err());
        assert!(common_domain(&g, 1.0, &[], &[0.0], &opts).is_err());
    }

    #[cfg(feature = "delaunay")]
    #[test]
    fn fit_cloud_recovers_grid_surface() {
        let f = |e: f64, t: f64| 0.2 * e - 0.1 * t;
        let g = GraphFunction::affine(0.0, 0.2, -0.1, unit()).unwrap();
        let cloud = sample_graph(&g, 21, 21).unwrap();
        let opts = SamplingOptions {
            resample: 21,
            nodes: 11,
            raster: 20,
        };
        let fit = fit_cloud(&cloud, &opts).unwrap();
        let dom = fit.phi.domain();
        assert!(dom.eta_max - dom.eta_min > 1.0);
        for (e, t) in dom.lattice(5, 5) {
            assert!((fit.phi.eval(e, t).unwrap() - f(e, t)).abs() < 1e-9);
        }
    }

    #[cfg(feature = "delaunay")]
    #[test]
    fn fit_cloud_rejects_curves_and_non_graphs() {
        let curve: PointCloud = (0..50)
            .map(|i| {
                let x = i as f64 / 49.0;
                Point::new(x, 0.0, x * x * x).unwrap()
            })
            .collect();
        assert!(matches!(
            fit_cloud(&curve, &SamplingOptions::default()),
            Err(Error::EmptyDomain)
        ));
        let two = PointCloud::from_coords(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            fit_cloud(&two, &SamplingOptions::default()),
            Err(Error::NotAGraph { .. })
        ));
        assert!(projection_collision(&two).is_some());
    }
}
