//! Piecewise-linear interpolation over triangulated scattered samples of the
//! `(eta, tau)` plane. Coverage of a query point means it lies in some
//! triangle of the mesh.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "delaunay")]
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::float;

/// Slack on barycentric coordinates so that nodes lying on shared edges or
/// on the outer boundary are covered.
const BARY_SLACK: f64 = 1e-9;

/// Which Delaunay triangles to keep.
#[cfg(feature = "delaunay")]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeFilter {
    None,
    /// Drop triangles whose longest edge exceeds the given length.
    MaxLength(f64),
    /// Drop triangles whose longest edge exceeds `k` times the median
    /// longest edge.
    MedianMultiple(f64),
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    verts: Vec<[f64; 2]>,
    values: Vec<f64>,
    tris: Vec<[u32; 3]>,
    index: BucketIndex,
}

#[derive(Debug, Clone)]
struct BucketIndex {
    min: [f64; 2],
    max: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    starts: Vec<u32>,
    items: Vec<u32>,
}

#[cfg(feature = "delaunay")]
struct Site {
    pos: Point2<f64>,
    idx: usize,
}

#[cfg(feature = "delaunay")]
impl HasPosition for Site {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

#[inline]
fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

#[cfg(feature = "delaunay")]
#[inline]
fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    float::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]))
}

impl TriMesh {
    /// Mesh over a structured `rows x cols` lattice of vertices stored row
    /// by row; each lattice cell is split into two triangles.
    pub fn structured(rows: usize, cols: usize, verts: Vec<[f64; 2]>, values: Vec<f64>) -> Self {
        assert_eq!(verts.len(), rows * cols);
        assert_eq!(values.len(), rows * cols);
        let mut tris = Vec::with_capacity(2 * rows.saturating_sub(1) * cols.saturating_sub(1));
        let at = |i: usize, j: usize| (i * cols + j) as u32;
        for i in 0..rows.saturating_sub(1) {
            for j in 0..cols.saturating_sub(1) {
                tris.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                tris.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        Self::from_parts(verts, values, tris)
    }

    #[cfg(feature = "delaunay")]
    /// Delaunay mesh of scattered sites. Triangles rejected by `filter` are
    /// discarded so that gaps in the data stay uncovered.
    pub fn delaunay(verts: Vec<[f64; 2]>, values: Vec<f64>, filter: EdgeFilter) -> Self {
        assert_eq!(verts.len(), values.len());
        let sites = verts
            .iter()
            .enumerate()
            .map(|(idx, v)| Site {
                pos: Point2::new(v[0], v[1]),
                idx,
            })
            .collect();
        let mut faces: Vec<([u32; 3], f64)> = Vec::new();
        if let Ok(dt) = DelaunayTriangulation::<Site>::bulk_load(sites) {
            for face in dt.inner_faces() {
                let [a, b, c] = face.vertices().map(|v| v.data().idx);
                let (pa, pb, pc) = (verts[a], verts[b], verts[c]);
                let longest = dist(pa, pb).max(dist(pb, pc)).max(dist(pc, pa));
                faces.push(([a as u32, b as u32, c as u32], longest));
            }
        }
        let limit = match filter {
            EdgeFilter::None => f64::INFINITY,
            EdgeFilter::MaxLength(m) => m,
            EdgeFilter::MedianMultiple(k) if !faces.is_empty() => {
                let mut longest: Vec<f64> = faces.iter().map(|f| f.1).collect();
                longest.sort_by(f64::total_cmp);
                k * longest[longest.len() / 2]
            }
            EdgeFilter::MedianMultiple(_) => f64::INFINITY,
        };
        let tris = faces
            .into_iter()
            .filter(|f| f.1 <= limit)
            .map(|f| f.0)
            .collect();
        Self::from_parts(verts, values, tris)
    }

    fn from_parts(verts: Vec<[f64; 2]>, values: Vec<f64>, tris: Vec<[u32; 3]>) -> Self {
        let index = BucketIndex::build(&verts, &tris);
        TriMesh {
            verts,
            values,
            tris,
            index,
        }
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    /// Bounding box `[min, max]` of the triangulated region, if any.
    pub fn bounds(&self) -> Option<([f64; 2], [f64; 2])> {
        (!self.tris.is_empty()).then_some((self.index.min, self.index.max))
    }

    /// Interpolated value at `q`, or `None` when no triangle covers `q`.
    pub fn interpolate(&self, q: [f64; 2]) -> Option<f64> {
        for &t in self.index.candidates(q) {
            let [a, b, c] = self.tris[t as usize];
            let (pa, pb, pc) = (
                self.verts[a as usize],
                self.verts[b as usize],
                self.verts[c as usize],
            );
            let d = cross(pa, pb, pc);
            if d == 0.0 {
                continue;
            }
            let lb = cross(pa, q, pc) / d;
            let lc = cross(pa, pb, q) / d;
            let la = 1.0 - lb - lc;
            if la >= -BARY_SLACK && lb >= -BARY_SLACK && lc >= -BARY_SLACK {
                let v = la * self.values[a as usize]
                    + lb * self.values[b as usize]
                    + lc * self.values[c as usize];
                return Some(v);
            }
        }
        None
    }

    pub fn covers(&self, q: [f64; 2]) -> bool {
        self.interpolate(q).is_some()
    }
}

impl BucketIndex {
    fn build(verts: &[[f64; 2]], tris: &[[u32; 3]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for t in tris {
            for &v in t {
                let p = verts[v as usize];
                for k in 0..2 {
                    min[k] = min[k].min(p[k]);
                    max[k] = max[k].max(p[k]);
                }
            }
        }
        if tris.is_empty() {
            return BucketIndex {
                min: [0.0; 2],
                max: [0.0; 2],
                cell: [1.0; 2],
                dims: [1, 1],
                starts: vec![0, 0],
                items: Vec::new(),
            };
        }
        let side = (float::sqrt(tris.len() as f64 / 2.0) as usize).clamp(1, 512);
        let dims = [side, side];
        let cell = [
            ((max[0] - min[0]) / side as f64).max(f64::MIN_POSITIVE),
            ((max[1] - min[1]) / side as f64).max(f64::MIN_POSITIVE),
        ];
        let ncell = dims[0] * dims[1];
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); ncell];
        let slack = [cell[0] * 1e-6, cell[1] * 1e-6];
        let locate = |v: f64, k: usize| -> usize {
            let c = float::floor((v - min[k]) / cell[k]);
            (c.max(0.0) as usize).min(dims[k] - 1)
        };
        for (ti, t) in tris.iter().enumerate() {
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for &v in t {
                let p = verts[v as usize];
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            for cx in locate(lo[0] - slack[0], 0)..=locate(hi[0] + slack[0], 0) {
                for cy in locate(lo[1] - slack[1], 1)..=locate(hi[1] + slack[1], 1) {
                    buckets[cx * dims[1] + cy].push(ti as u32);
                }
            }
        }
        let mut starts = Vec::with_capacity(ncell + 1);
        let mut items = Vec::new();
        starts.push(0);
        for b in buckets {
            items.extend(b);
            starts.push(items.len() as u32);
        }
        BucketIndex {
            min,
            max,
            cell,
            dims,
            starts,
            items,
        }
    }

    fn candidates(&self, q: [f64; 2]) -> &[u32] {
        let mut idx = [0usize; 2];
        for k in 0..2 {
            let pad = self.cell[k] * 1e-6;
            if q[k] < self.min[k] - pad || q[k] > self.max[k] + pad || q[k].is_nan() {
                return &[];
            }
            let c = float::floor((q[k] - self.min[k]) / self.cell[k]);
            idx[k] = (c.max(0.0) as usize).min(self.dims[k] - 1);
        }
        let b = idx[0] * self.dims[1] + idx[1];
        &self.items[self.starts[b] as usize..self.starts[b + 1] as usize]
    }
}
