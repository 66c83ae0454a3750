//! Algebra of the first Heisenberg group, its cone families and intrinsic
//! graphs, together with checkers that verify on sampled surfaces that the
//! `α`-flat cone property yields the local `α/4`-full cone property.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to get
//! `std::error::Error` integration, and `serde` to serialize reports.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bisect;
pub mod certificate;
pub mod cloud;
pub mod cone;
pub mod gallery;
pub mod graph;
pub mod group;
pub mod mesh;
pub mod pipeline;
pub mod verify;

mod float;

pub use certificate::{Certificate, Param, Status, Witness};
pub use cloud::PointCloud;
pub use cone::{ConeKind, ConeSpec};
pub use graph::{GraphFunction, Rect, SurfaceGrid};
pub use group::{PlanePoint, Point};
pub use pipeline::{PipelineConfig, PipelineReport, Surface};

/// Errors shared by every module of the crate.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate {name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("invalid cone: {0}")]
    InvalidCone(&'static str),
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("({eta}, {tau}) lies outside the graph domain")]
    OutOfDomain { eta: f64, tau: f64 },
    #[error("no sign change of zeta on the vertical segment at eta={eta}: zeta(-tau0)={zeta_lo}, zeta(tau0)={zeta_hi}")]
    NotFound {
        eta: f64,
        zeta_lo: f64,
        zeta_hi: f64,
    },
    #[error("point does not lie on the graph (x defect {defect})")]
    NotOnGraph { defect: f64 },
    #[error("transformed graph does not cover the target rectangle at ({eta}, {tau})")]
    NotRepresentable { eta: f64, tau: f64 },
    #[error(
        "no common centered domain: the projected images share no rectangle around the origin"
    )]
    EmptyDomain,
    #[error(
        "point cloud is not an intrinsic graph: two samples share the projection ({eta}, {tau})"
    )]
    NotAGraph { eta: f64, tau: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
