//! Executes a [`RunConfig`] and renders its report.

use std::fs;
use std::io::Write;
use std::path::Path;

use heiscone_core::gallery::{generate, run_expected, ExampleKind};
use heiscone_core::graph::graph_point;
use heiscone_core::pipeline::{auto_alpha, run_theorem_pipeline};
use heiscone_core::verify::{
    best_rotation_aperture, check_flat_property, check_full_at_base, check_full_property,
    check_lemma_vertical_inclusion, check_remark_shear_flat, check_shear_union_identity,
    max_flat_aperture, Neighborhood,
};
use heiscone_core::{
    Certificate, ConeKind, GraphFunction, PipelineConfig, Point, PointCloud, Surface,
};
use serde_json::{json, Map, Value};

use crate::cli::{AlphaArg, Command, ConeArg, RunConfig, Source};
use crate::error::CliError;
use crate::input::{load_surface, LoadedSurface};

/// A rendered report and whether it is a pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// The surface named by the configuration, as samples and as a pipeline
/// input.
struct Loaded {
    label: String,
    cloud: PointCloud,
    surface: Surface,
    graph_nodes: Option<usize>,
}

fn load(source: &Source) -> Result<Loaded, CliError> {
    match source {
        Source::File(path) => {
            let label = path.display().to_string();
            match load_surface(path)? {
                LoadedSurface::Cloud(cloud) => Ok(Loaded {
                    label,
                    surface: Surface::Cloud(cloud.clone()),
                    cloud,
                    graph_nodes: None,
                }),
                LoadedSurface::Grid(grid) => {
                    let mut pts = Vec::with_capacity(grid.phi_values().len());
                    for &e in grid.eta_values() {
                        for &t in grid.tau_values() {
                            pts.push((e, t));
                        }
                    }
                    let phi = GraphFunction::from_grid(grid);
                    let cloud = pts
                        .into_iter()
                        .map(|(e, t)| graph_point(&phi, e, t))
                        .collect::<Result<PointCloud, _>>()?;
                    Ok(Loaded {
                        label,
                        cloud,
                        surface: Surface::Graph(phi),
                        graph_nodes: None,
                    })
                }
            }
        }
        Source::Gallery(spec) => {
            let cloud = generate(spec)?;
            let label = match spec.kind {
                ExampleKind::ConstantGraph(v) | ExampleKind::LinearGraph(v) => {
                    format!("gallery:{}:{v}", spec.name)
                }
                _ => format!("gallery:{}", spec.name),
            };
            let (surface, graph_nodes) = match spec.graph()? {
                Some(phi) => (Surface::Graph(phi), Some(spec.nodes)),
                None => (Surface::Cloud(cloud.clone()), None),
            };
            Ok(Loaded {
                label,
                cloud,
                surface,
                graph_nodes,
            })
        }
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

/// Resolves `--alpha`; `auto` measures the flat aperture of the samples.
fn resolve_alpha(config: &RunConfig, cloud: &PointCloud) -> Result<(f64, Option<f64>), CliError> {
    match config.alpha {
        Some(AlphaArg::Value(a)) => Ok((a, None)),
        Some(AlphaArg::Auto) => {
            let measured = max_flat_aperture(cloud, config.tol)?;
            Ok((measured.min(config.alpha_cap), Some(measured)))
        }
        None => Err(CliError::Usage("--alpha is required".into())),
    }
}

fn annotate(cert: &mut Certificate, label: &str, config: &RunConfig, measured: Option<f64>) {
    cert.set_param("input", label);
    cert.set_param("seed", config.seed);
    if let Some(m) = measured {
        cert.set_param("alpha_source", "auto");
        cert.set_param("alpha_cap", config.alpha_cap);
        cert.set_param("measured_unbounded", m.is_infinite());
        if m.is_finite() {
            cert.set_param("measured_aperture", m);
        }
    }
}

fn certificate_outcome(cert: &Certificate) -> Outcome {
    Outcome {
        body: render(&to_value(cert)),
        passed: cert.is_pass(),
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize to JSON");
    s.push('\n');
    s
}

/// Runs the command and renders its report (JSON, or CSV for `export`).
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::CheckFlat => {
            let s = load(source(config)?)?;
            let (alpha, measured) = resolve_alpha(config, &s.cloud)?;
            let mut cert = check_flat_property(&s.cloud, alpha, config.tol)?;
            annotate(&mut cert, &s.label, config, measured);
            Ok(certificate_outcome(&cert))
        }
        Command::CheckFull => {
            let s = load(source(config)?)?;
            let (alpha, measured) = resolve_alpha(config, &s.cloud)?;
            let mut cert = match (config.base, config.radius) {
                (None, _) => check_full_property(&s.cloud, alpha, config.tol, None)?,
                (Some(b), None) => {
                    check_full_at_base(&s.cloud, Point::new(b[0], b[1], b[2])?, alpha, config.tol)?
                }
                (Some(b), Some(r)) => {
                    let hood = Neighborhood::new(Point::new(b[0], b[1], b[2])?, r)?;
                    check_full_property(&s.cloud, alpha, config.tol, Some(hood))?
                }
            };
            annotate(&mut cert, &s.label, config, measured);
            Ok(certificate_outcome(&cert))
        }
        Command::Aperture => aperture(config),
        Command::Pipeline => pipeline(config),
        Command::Lemmas => lemmas(config),
        Command::Gallery => gallery(config),
        Command::Export => export(config),
    }
}

fn source(config: &RunConfig) -> Result<&Source, CliError> {
    config
        .source
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --input or --gallery".into()))
}

fn aperture(config: &RunConfig) -> Result<Outcome, CliError> {
    let s = load(source(config)?)?;
    let alpha = max_flat_aperture(&s.cloud, config.tol)?;
    let mut report = Map::new();
    report.insert("check".into(), json!("aperture"));
    report.insert("status".into(), json!("pass"));
    report.insert("alpha".into(), finite_or_null(alpha));
    report.insert("unbounded".into(), json!(alpha.is_infinite()));
    report.insert(
        "parameters".into(),
        json!({ "input": s.label, "points": s.cloud.len(), "tol": config.tol, "seed": config.seed }),
    );
    if config.angles > 0 {
        let r = best_rotation_aperture(&s.cloud, config.angles, config.tol)?;
        report.insert(
            "rotation".into(),
            json!({
                "angles": config.angles,
                "theta": r.theta,
                "alpha": finite_or_null(r.alpha),
                "unbounded": r.alpha.is_infinite(),
            }),
        );
    }
    Ok(Outcome {
        body: render(&Value::Object(report)),
        passed: true,
    })
}

fn pipeline(config: &RunConfig) -> Result<Outcome, CliError> {
    let s = load(source(config)?)?;
    let mut pc = PipelineConfig::new(1.0);
    pc.n_t = config.grids.n_t;
    pc.n_p = config.grids.n_p;
    pc.n_eta = config.grids.n_eta;
    pc.n_pairs = config.grids.n_pairs;
    pc.tol = config.tol;
    pc.seed = config.seed;
    if let Some(n) = s.graph_nodes {
        pc.graph_nodes = n;
    }
    let (alpha, source) = match config.alpha {
        Some(AlphaArg::Value(a)) => (a, "given"),
        _ => (auto_alpha(&s.surface, &pc, config.alpha_cap)?, "auto"),
    };
    pc.alpha = alpha;
    let report = run_theorem_pipeline(&s.surface, &pc)?;
    let mut v = to_value(&report);
    let obj = v.as_object_mut().expect("report is an object");
    obj.insert("check".into(), json!("pipeline"));
    obj.insert(
        "status".into(),
        json!(if report.passed { "pass" } else { "fail" }),
    );
    obj.insert(
        "parameters".into(),
        json!({
            "input": s.label,
            "alpha_source": source,
            "alpha_cap": config.alpha_cap,
            "n_t": pc.n_t,
            "n_p": pc.n_p,
            "n_eta": pc.n_eta,
            "n_pairs": pc.n_pairs,
            "graph_nodes": pc.graph_nodes,
            "n_union": pc.n_union,
            "tol": pc.tol,
            "root_tol": pc.root_tol,
            "resample": pc.sampling.resample,
            "nodes": pc.sampling.nodes,
            "raster": pc.sampling.raster,
            "seed": pc.seed,
        }),
    );
    Ok(Outcome {
        body: render(&v),
        passed: report.passed,
    })
}

/// The parameter sets exercised by `lemmas`.
pub const VERTICAL_CASES: [(f64, f64); 3] = [(1.0, 0.5), (0.5, 0.2), (2.0, 1.0)];
pub const UNION_CASES: [(f64, f64); 2] = [(1.0, 1.0), (0.5, 2.0)];
pub const SHEAR_FLAT_APERTURES: [f64; 3] = [0.5, 1.0, 2.0];

fn lemmas(config: &RunConfig) -> Result<Outcome, CliError> {
    let n = config.samples;
    let mut certs = Vec::new();
    let mut k = 0u64;
    let mut next_seed = || {
        k += 1;
        config.seed.wrapping_add(k)
    };
    for (beta, eps) in VERTICAL_CASES {
        certs.push(check_lemma_vertical_inclusion(
            beta,
            eps,
            n,
            101,
            config.tol,
            next_seed(),
        )?);
    }
    for (beta, r) in UNION_CASES {
        certs.push(check_shear_union_identity(
            beta,
            r,
            n,
            config.tol,
            next_seed(),
        )?);
    }
    for alpha in SHEAR_FLAT_APERTURES {
        certs.push(check_remark_shear_flat(
            alpha,
            n,
            21,
            config.tol,
            next_seed(),
        )?);
    }
    let passed = certs.iter().all(Certificate::is_pass);
    let v = json!({
        "check": "lemmas",
        "status": if passed { "pass" } else { "fail" },
        "parameters": { "samples": n, "tol": config.tol, "seed": config.seed },
        "certificates": to_value(&certs),
    });
    Ok(Outcome {
        body: render(&v),
        passed,
    })
}

fn gallery(config: &RunConfig) -> Result<Outcome, CliError> {
    let Some(Source::Gallery(spec)) = &config.source else {
        return Err(CliError::Usage("`gallery` needs --gallery".into()));
    };
    let outcomes = run_expected(spec, config.tol)?;
    let passed = outcomes.iter().all(|o| o.agrees());
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut v = to_value(o);
            v["agrees"] = json!(o.agrees());
            v
        })
        .collect();
    let v = json!({
        "check": "gallery",
        "status": if passed { "pass" } else { "fail" },
        "fixture": to_value(spec),
        "parameters": { "tol": config.tol, "seed": config.seed },
        "outcomes": rows,
    });
    Ok(Outcome {
        body: render(&v),
        passed,
    })
}

fn export(config: &RunConfig) -> Result<Outcome, CliError> {
    let cloud = match (&config.cone, &config.source) {
        (Some(c), _) => cone_surface(c, 41)?,
        (None, Some(src)) => load(src)?.cloud,
        (None, None) => {
            return Err(CliError::Usage(
                "`export` needs --cone, --input or --gallery".into(),
            ))
        }
    };
    Ok(Outcome {
        body: cloud_csv(&cloud),
        passed: true,
    })
}

/// Samples of the boundary of a cone over `|x| <= radius`, `n` nodes per
/// parameter.
pub fn cone_surface(cone: &ConeArg, n: usize) -> Result<PointCloud, CliError> {
    let (a, r) = (cone.aperture, cone.radius);
    let lin = |lo: f64, hi: f64| (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64);
    let mut pts = Vec::new();
    for x in lin(-r, r) {
        for v in lin(-1.0, 1.0) {
            match cone.kind {
                ConeKind::Full | ConeKind::TruncatedFull => {
                    for sign in [-1.0, 1.0] {
                        pts.push(Point::new(x, sign * a * x.abs(), v * a * x * x / 2.0)?);
                        pts.push(Point::new(x, v * a * x.abs(), sign * a * x * x / 2.0)?);
                    }
                }
                ConeKind::Flat => pts.push(Point::new(x, v * a * x.abs(), 0.0)?),
                ConeKind::Vertical => pts.push(Point::new(x, 0.0, v * a * x * x / 2.0)?),
            }
        }
    }
    Ok(PointCloud::new(pts))
}

/// `x,y,z` CSV of the cloud, one point per row.
pub fn cloud_csv(cloud: &PointCloud) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "z"]).expect("writing to memory");
    for p in cloud {
        let [x, y, z] = p.coords();
        w.write_record([x.to_string(), y.to_string(), z.to_string()])
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV is UTF-8")
}

/// Writes the report to `output`, or to stdout.
pub fn emit_report(outcome: &Outcome, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, &outcome.body).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
