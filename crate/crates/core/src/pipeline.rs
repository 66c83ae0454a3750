//! End-to-end run of the flat-to-full argument on one sampled surface.
//!
//! Each step of the argument becomes a [`Certificate`], in this order:
//! `flat-check`, `common-domain`, `epsilon`, `intersection-sweep`,
//! `vertical-exclusion`, `shear-union`, `truncated-full`, `local-full`.
//! A failed flat check aborts the run. Later failures stop the run too,
//! since every stage consumes the radii produced by the previous ones.
//!
//! The last stage is the direct pairwise check of the `α/4`-full cone
//! property on the certified neighborhood, so a passing report is always
//! backed by the independent checker.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::certificate::{Certificate, Witness};
use crate::cloud::{PointCloud, DUPLICATE_TOL};
use crate::cone::ConeSpec;
use crate::float::{linspace, sqrt};
#[cfg(feature = "delaunay")]
use crate::graph::fit_cloud;
use crate::graph::{
    common_domain, flat_intersection, graph_point, intersection_radius, projection_collision,
    reparameterize_image, sample_graph, GraphFunction, Rect, SamplingOptions, TransformedGraph,
};
use crate::group::Point;
use crate::verify::{
    check_flat_property, check_full_property, check_shear_union_identity, Neighborhood,
};
use crate::{Error, Result};

/// The surface under test: a graph function, or raw samples that are fitted
/// by piecewise-linear interpolation first.
#[derive(Debug, Clone)]
pub enum Surface {
    Graph(GraphFunction),
    Cloud(PointCloud),
}

/// Grid densities, tolerances and seed of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub alpha: f64,
    /// Shears sampled in `[-α/2, α/2]`.
    pub n_t: usize,
    /// Base points per axis; the base grid has `n_p²` points.
    pub n_p: usize,
    /// `η` values sampled in `[-ε, ε]`.
    pub n_eta: usize,
    /// Cap on the number of samples entering pairwise checks.
    pub n_pairs: usize,
    /// Lattice per axis used to sample a graph surface.
    pub graph_nodes: usize,
    /// Samples per direction of the shear-union stage.
    pub n_union: usize,
    pub tol: f64,
    pub root_tol: f64,
    pub sampling: SamplingOptions,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(alpha: f64) -> Self {
        PipelineConfig {
            alpha,
            n_t: 21,
            n_p: 3,
            n_eta: 101,
            n_pairs: 2500,
            graph_nodes: 41,
            n_union: 2000,
            tol: 1e-9,
            root_tol: 1e-10,
            sampling: SamplingOptions::default(),
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter("alpha must be positive and finite"));
        }
        if self.n_t == 0
            || self.n_p == 0
            || self.n_eta < 2
            || self.n_pairs < 2
            || self.graph_nodes < 2
        {
            return Err(Error::InvalidParameter("pipeline grid counts too small"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.tol));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::InvalidParameter("root_tol must be positive"));
        }
        Ok(())
    }
}

/// Outcome of [`run_theorem_pipeline`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PipelineReport {
    pub alpha_in: f64,
    pub alpha_out: f64,
    /// The surface point all transformed images are centered at.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub center: Option<Point>,
    /// Common centered domain `[-η0, η0] x [-τ0, τ0]`.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub v0: Option<Rect>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub epsilon: Option<f64>,
    /// The slab on whose base points the full property was certified.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub neighborhood: Option<Neighborhood>,
    pub per_stage: Vec<Certificate>,
    pub passed: bool,
}

impl PipelineReport {
    fn new(alpha: f64) -> Self {
        PipelineReport {
            alpha_in: alpha,
            alpha_out: alpha / 4.0,
            center: None,
            v0: None,
            epsilon: None,
            neighborhood: None,
            per_stage: Vec::new(),
            passed: false,
        }
    }

    pub fn stage(&self, name: &str) -> Option<&Certificate> {
        self.per_stage.iter().find(|c| c.check == name)
    }

    /// Records `cert`; returns whether the run may continue.
    fn push(&mut self, cert: Certificate) -> bool {
        let ok = cert.is_pass();
        self.per_stage.push(cert);
        ok
    }
}

/// Number of certificates in a complete run.
pub const STAGE_COUNT: usize = 8;

/// Aperture for `--alpha auto`: the measured flat aperture of the samples,
/// capped at `cap` because flat-free samples measure `+∞`.
pub fn auto_alpha(surface: &Surface, config: &PipelineConfig, cap: f64) -> Result<f64> {
    let samples = surface_samples(surface, config)?;
    Ok(crate::verify::max_flat_aperture(&samples, config.tol)?.min(cap))
}

fn surface_samples(surface: &Surface, config: &PipelineConfig) -> Result<PointCloud> {
    let cloud = match surface {
        Surface::Graph(phi) => sample_graph(phi, config.graph_nodes, config.graph_nodes)?,
        Surface::Cloud(c) => c.clone(),
    };
    Ok(cloud.subsample(config.n_pairs, config.seed))
}

fn empty_domain(reason: &str) -> Witness {
    Witness::EmptyDomain {
        eta0: 0.0,
        tau0: 0.0,
        reason: reason.to_string(),
    }
}

/// Runs every stage on `surface` at aperture `config.alpha`.
///
/// Errors are reserved for invalid configurations; a surface that breaks
/// the argument yields a report with a failed stage.
pub fn run_theorem_pipeline(surface: &Surface, config: &PipelineConfig) -> Result<PipelineReport> {
    config.validate()?;
    let alpha = config.alpha;
    let tol = config.tol;
    let mut report = PipelineReport::new(alpha);
    let samples = surface_samples(surface, config)?;

    let mut flat = check_flat_property(&samples, alpha, tol)?;
    flat.check = String::from("flat-check");
    flat.set_param("seed", config.seed);
    if !report.push(flat) {
        return Ok(report);
    }

    // Common domain of all images M_t(p⁻¹ S).
    let t_grid: Vec<f64> = linspace(-alpha / 2.0, alpha / 2.0, config.n_t).collect();
    let mut domain = Certificate::new("common-domain")
        .param("t_values", config.n_t)
        .param("base_points", config.n_p * config.n_p)
        .param("resample", config.sampling.resample)
        .param("raster", config.sampling.raster);
    let fitted = match surface {
        Surface::Graph(phi) => Ok((
            phi.clone(),
            graph_point(
                phi,
                phi.domain().center().eta(),
                phi.domain().center().tau(),
            )?,
        )),
        #[cfg(feature = "delaunay")]
        Surface::Cloud(cloud) => fit_cloud(cloud, &config.sampling).map(|f| (f.phi, f.center)),
        #[cfg(not(feature = "delaunay"))]
        Surface::Cloud(_) => Err(Error::InvalidParameter(
            "fitting point clouds needs the `delaunay` feature",
        )),
    };
    let (phi, center) = match fitted {
        Ok(v) => v,
        Err(Error::NotAGraph { .. }) => {
            let w = match surface {
                Surface::Cloud(c) => projection_collision(c)
                    .map(|(first, second)| Witness::NotAGraph { first, second }),
                Surface::Graph(_) => None,
            };
            report.push(domain.fail(w.unwrap_or_else(|| empty_domain("samples are not a graph"))));
            return Ok(report);
        }
        Err(Error::EmptyDomain) => {
            report.push(domain.fail(empty_domain("projected samples cover no rectangle")));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.center = Some(center);
    let bases = base_grid(&phi, config.n_p)?;
    let v0 = match common_domain(&phi, alpha, &bases, &t_grid, &config.sampling) {
        Ok(r) => r,
        Err(Error::EmptyDomain) => {
            report.push(domain.fail(empty_domain(
                "transformed graphs share no centered rectangle",
            )));
            return Ok(report);
        }
        Err(Error::NotOnGraph { .. }) => {
            report.push(domain.fail(empty_domain("base point off the fitted graph")));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let (eta0, tau0) = v0.symmetric_half_widths();
    domain.set_param("eta0", eta0);
    domain.set_param("tau0", tau0);
    report.v0 = Some(v0);
    report.push(domain);

    let epsilon = intersection_radius(eta0, tau0, alpha / 2.0);
    let mut eps = Certificate::new("epsilon")
        .param("eta0", eta0)
        .param("tau0", tau0)
        .param("beta", alpha / 2.0)
        .param("epsilon", epsilon)
        .param("sqrt_tau0_beta", sqrt(tau0 * alpha / 2.0));
    if !(epsilon > 0.0) {
        eps = eps.fail(Witness::EmptyDomain {
            eta0,
            tau0,
            reason: "epsilon is not positive".to_string(),
        });
    }
    report.epsilon = Some(epsilon);
    if !report.push(eps) {
        return Ok(report);
    }

    let images = bases
        .iter()
        .flat_map(|&p| t_grid.iter().map(move |&t| (t, p)))
        .map(|(t, p)| TransformedGraph::new(&phi, t, p, config.sampling.resample))
        .collect::<Result<Vec<_>>>()?;

    if !report.push(intersection_sweep(&images, v0, epsilon, config)?) {
        return Ok(report);
    }
    if !report.push(vertical_exclusion(&images, v0, epsilon, config)?) {
        return Ok(report);
    }

    let (beta, radius) = (alpha / 4.0, 4.0 * epsilon / alpha);
    let mut union = check_shear_union_identity(beta, radius, config.n_union, tol, config.seed)?;
    union.check = String::from("shear-union");
    if !report.push(union) {
        return Ok(report);
    }

    if !report.push(truncated_full(&samples, &bases, beta, radius, tol)?) {
        return Ok(report);
    }

    let hood = Neighborhood::new(center, 2.0 * epsilon / alpha)?;
    report.neighborhood = Some(hood);
    let mut local = check_full_property(&samples, beta, tol, Some(hood))?;
    local.check = String::from("local-full");
    report.passed = report.push(local) && report.per_stage.len() == STAGE_COUNT;
    Ok(report)
}

/// Graph points over the `n x n` lattice of the middle half of the domain.
fn base_grid(phi: &GraphFunction, n: usize) -> Result<Vec<Point>> {
    let dom = phi.domain();
    let c = dom.center();
    let (he, ht) = (
        (dom.eta_max - dom.eta_min) / 4.0,
        (dom.tau_max - dom.tau_min) / 4.0,
    );
    let region = if n == 1 {
        return Ok(alloc::vec![graph_point(phi, c.eta(), c.tau())?]);
    } else {
        Rect::new(c.eta() - he, c.eta() + he, c.tau() - ht, c.tau() + ht)?
    };
    region
        .lattice(n, n)
        .map(|(e, t)| graph_point(phi, e, t))
        .collect()
}

/// Finds the flat points `(s η, η, 0)` of every image over `|η| <= ε` and
/// bounds their slopes by `2/α` plus the bisection slack.
fn intersection_sweep(
    images: &[TransformedGraph],
    v0: Rect,
    epsilon: f64,
    config: &PipelineConfig,
) -> Result<Certificate> {
    let alpha = config.alpha;
    let beta = alpha / 2.0;
    let ideal = 1.0 / beta;
    let mut cert = Certificate::new("intersection-sweep")
        .param("beta", beta)
        .param("eta_values", config.n_eta)
        .param("images", images.len())
        .param("root_tol", config.root_tol)
        .param("ideal_bound", ideal);
    let mut worst_slack = 0.0f64;
    let mut worst_s = 0.0f64;
    for image in images {
        let phi_tp = match reparameterize_image(image, v0, config.sampling.nodes) {
            Ok(f) => f,
            Err(Error::NotRepresentable { eta, tau }) => {
                return Ok(cert.fail(Witness::Uncovered {
                    t: image.t,
                    base: image.base,
                    eta,
                    tau,
                }));
            }
            Err(e) => return Err(e),
        };
        for eta in linspace(-epsilon, epsilon, config.n_eta) {
            let hit = match flat_intersection(&phi_tp, beta, eta, config.root_tol) {
                Ok(h) => h,
                Err(Error::NotFound {
                    zeta_lo, zeta_hi, ..
                }) => {
                    return Ok(cert.fail(Witness::NoRoot {
                        t: image.t,
                        base: image.base,
                        eta,
                        zeta_lo,
                        zeta_hi,
                    }));
                }
                Err(e) => return Err(e),
            };
            worst_slack = worst_slack.max(hit.slack);
            worst_s = worst_s.max(hit.s.abs());
            let bound = ideal + hit.slack;
            if hit.s.abs() > bound {
                return Ok(cert.fail(Witness::SlopeBound {
                    t: image.t,
                    base: image.base,
                    eta,
                    tau: hit.tau,
                    s: hit.s,
                    ideal_bound: ideal,
                    bound,
                }));
            }
        }
    }
    cert.set_param("inflated_bound", ideal + worst_slack);
    cert.set_param("max_abs_s", worst_s);
    Ok(cert)
}

/// No sample of any image `M_t(p⁻¹ S)` lies in `vC(α/4, 4ε/α)`. The
/// interpolated curve over `η = 0` is checked as well.
fn vertical_exclusion(
    images: &[TransformedGraph],
    v0: Rect,
    epsilon: f64,
    config: &PipelineConfig,
) -> Result<Certificate> {
    let alpha = config.alpha;
    let cone = ConeSpec::vertical(alpha / 4.0, 4.0 * epsilon / alpha)?;
    let mut cert = Certificate::new("vertical-exclusion")
        .param("beta", alpha / 4.0)
        .param("radius", 4.0 * epsilon / alpha)
        .param("tol", config.tol);
    let mut checked = 0usize;
    for image in images {
        for &q in &image.points {
            checked += 1;
            if cone.test(q, config.tol) {
                cert.set_param("checked", checked);
                return Ok(cert.fail(Witness::membership(
                    Point::ORIGIN,
                    cone,
                    q,
                    config.tol,
                    false,
                )));
            }
        }
        for tau in linspace(v0.tau_min, v0.tau_max, config.sampling.nodes.max(2)) {
            let Some(x) = image.mesh.interpolate([0.0, tau]) else {
                continue;
            };
            checked += 1;
            let q = Point::raw(x, 0.0, tau);
            if cone.test(q, config.tol) {
                cert.set_param("checked", checked);
                return Ok(cert.fail(Witness::membership(
                    Point::ORIGIN,
                    cone,
                    q,
                    config.tol,
                    false,
                )));
            }
        }
    }
    cert.set_param("checked", checked);
    Ok(cert)
}

/// No sample of `S` other than `p` lies in `p · C(β, r)`, for every base `p`.
fn truncated_full(
    samples: &PointCloud,
    bases: &[Point],
    beta: f64,
    radius: f64,
    tol: f64,
) -> Result<Certificate> {
    let cone = ConeSpec::truncated_full(beta, radius)?;
    let cert = Certificate::new("truncated-full")
        .param("beta", beta)
        .param("radius", radius)
        .param("tol", tol)
        .param("base_points", bases.len())
        .param("points", samples.len());
    for &p in bases {
        let inv = p.inverse();
        for &q in samples.points() {
            if p.max_abs_diff(&q) > DUPLICATE_TOL && cone.test(inv * q, tol) {
                return Ok(cert.fail(Witness::membership(p, cone, q, tol, false)));
            }
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;

    fn quick(alpha: f64) -> PipelineConfig {
        PipelineConfig {
            n_t: 5,
            n_eta: 21,
            graph_nodes: 21,
            n_union: 200,
            sampling: SamplingOptions {
                resample: 21,
                nodes: 21,
                raster: 20,
            },
            ..PipelineConfig::new(alpha)
        }
    }

    #[test]
    fn plane_passes_every_stage() {
        let phi = GraphFunction::constant(0.0, Rect::centered(1.0, 1.0).unwrap()).unwrap();
        let r = run_theorem_pipeline(&Surface::Graph(phi), &quick(1.0)).unwrap();
        assert!(r.passed, "{:#?}", r.per_stage);
        assert_eq!(r.per_stage.len(), STAGE_COUNT);
        assert_eq!(r.alpha_out, 0.25);
        let (e0, t0) = r.v0.unwrap().symmetric_half_widths();
        assert_eq!(r.epsilon.unwrap(), e0.min(sqrt(t0 * 0.5)));
    }

    #[cfg(feature = "delaunay")]
    #[test]
    fn cubic_curve_stops_at_common_domain() {
        let cloud: PointCloud = linspace(0.0, 1.0, 200)
            .map(|x| Point::new(x, 0.0, x * x * x).unwrap())
            .collect();
        let r = run_theorem_pipeline(&Surface::Cloud(cloud), &quick(1.0)).unwrap();
        assert!(!r.passed);
        assert_eq!(r.per_stage.len(), 2);
        assert!(r.per_stage[0].is_pass());
        assert!(!r.per_stage[1].is_pass());
        assert_eq!(r.per_stage[1].check, "common-domain");
    }

    #[test]
    fn flat_failure_aborts() {
        let cloud =
            PointCloud::from_coords(&[[0.0, 0.0, 0.0], [1.0, 0.1, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let r = run_theorem_pipeline(&Surface::Cloud(cloud), &quick(0.5)).unwrap();
        assert_eq!(r.per_stage.len(), 1);
        assert_eq!(r.per_stage[0].replay(), Some(true));
    }

    #[test]
    fn auto_alpha_is_capped() {
        let phi = GraphFunction::constant(0.1, Rect::centered(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(
            auto_alpha(&Surface::Graph(phi), &quick(1.0), 1.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn rejects_bad_config() {
        let phi = GraphFunction::constant(0.0, Rect::centered(1.0, 1.0).unwrap()).unwrap();
        assert!(run_theorem_pipeline(&Surface::Graph(phi), &quick(-1.0)).is_err());
    }
}
