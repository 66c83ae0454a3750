//! Finite samples of a surface.

use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::Point;
use crate::Result;

/// Points closer than this in every coordinate are collapsed.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// A finite set of points without near-duplicates, in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    /// Collects `points`, dropping later copies of any point within
    /// [`DUPLICATE_TOL`] of an earlier one.
    pub fn new(points: Vec<Point>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].x().total_cmp(&points[b].x()).then(a.cmp(&b)));
        let mut dropped = alloc::vec![false; points.len()];
        for (k, &i) in order.iter().enumerate() {
            if dropped[i] {
                continue;
            }
            for &j in &order[k + 1..] {
                if points[j].x() - points[i].x() > DUPLICATE_TOL {
                    break;
                }
                if !dropped[j] && points[i].max_abs_diff(&points[j]) <= DUPLICATE_TOL {
                    // keep whichever came first in the input
                    if j > i {
                        dropped[j] = true;
                    } else {
                        dropped[i] = true;
                        break;
                    }
                }
            }
        }
        let points = points
            .into_iter()
            .zip(dropped)
            .filter_map(|(p, d)| (!d).then_some(p))
            .collect();
        PointCloud { points }
    }

    pub fn from_coords(coords: &[[f64; 3]]) -> Result<Self> {
        let pts = coords
            .iter()
            .map(|c| Point::new(c[0], c[1], c[2]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(pts))
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Applies `f` pointwise and re-collapses duplicates.
    pub fn map(&self, f: impl FnMut(&Point) -> Point) -> Self {
        Self::new(self.points.iter().map(f).collect())
    }

    /// The left translate `g · self`.
    pub fn translate(&self, g: Point) -> Self {
        self.map(|p| g * *p)
    }

    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        let pts = self
            .points
            .iter()
            .map(|p| p.dilate(lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(pts))
    }

    pub fn rotate_z(&self, theta: f64) -> Self {
        self.map(|p| p.rotate_z(theta))
    }

    /// Keeps only the points satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Point) -> bool) -> Self {
        PointCloud {
            points: self.points.iter().copied().filter(|p| keep(p)).collect(),
        }
    }

    /// At most `max` points chosen uniformly without replacement, in their
    /// original order. Clouds already small enough are returned unchanged.
    pub fn subsample(&self, max: usize, seed: u64) -> Self {
        if self.points.len() <= max {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = index::sample(&mut rng, self.points.len(), max).into_vec();
        chosen.sort_unstable();
        PointCloud {
            points: chosen.into_iter().map(|i| self.points[i]).collect(),
        }
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point;
    type IntoIter = core::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

impl FromIterator<Point> for PointCloud {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
