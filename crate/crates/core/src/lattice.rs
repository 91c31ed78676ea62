//! Integer lattice points, their meet/join algebra, grid adjacency and the
//! identity embedding into real coordinates.
//!
//! `Ord` on [`LatticePoint`] is the lexicographic order used for enumeration.
//! The lattice order (the one meet and join induce) is the component-wise
//! order exposed by [`LatticePoint::le_componentwise`].

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(LatticePoint(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Component-wise `self <= other`.
    pub fn le_componentwise(&self, other: &LatticePoint) -> Result<bool> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    fn zip_with(&self, other: &LatticePoint, f: impl Fn(i64, i64) -> i64) -> Result<LatticePoint> {
        check_dims(self.dim(), other.dim())?;
        Ok(LatticePoint(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point of R^n with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPoint(DVector<f64>);

impl ContinuousPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(index) = v.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ContinuousPoint(v))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Component-wise minimum.
    pub fn meet(&self, other: &ContinuousPoint) -> Result<ContinuousPoint> {
        check_dims(self.dim(), other.dim())?;
        Ok(ContinuousPoint(self.0.zip_map(&other.0, f64::min)))
    }

    /// Component-wise maximum.
    pub fn join(&self, other: &ContinuousPoint) -> Result<ContinuousPoint> {
        check_dims(self.dim(), other.dim())?;
        Ok(ContinuousPoint(self.0.zip_map(&other.0, f64::max)))
    }
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

pub fn meet(a: &LatticePoint, b: &LatticePoint) -> Result<LatticePoint> {
    a.zip_with(b, i64::min)
}

pub fn join(a: &LatticePoint, b: &LatticePoint) -> Result<LatticePoint> {
    a.zip_with(b, i64::max)
}

pub fn grid_distance(a: &LatticePoint, b: &LatticePoint) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let sq: f64 =
        a.0.iter()
            .zip(&b.0)
            .map(|(&x, &y)| {
                let d = (x - y) as f64;
                d * d
            })
            .sum();
    Ok(sq.sqrt())
}

/// True iff the points differ in exactly one component, and by exactly one.
pub fn is_adjacent(a: &LatticePoint, b: &LatticePoint) -> Result<bool> {
    check_dims(a.dim(), b.dim())?;
    let mut differing = a.0.iter().zip(&b.0).filter(|(x, y)| x != y);
    Ok(match (differing.next(), differing.next()) {
        (Some((x, y)), None) => x.abs_diff(*y) == 1,
        _ => false,
    })
}

pub fn embed(a: &LatticePoint) -> ContinuousPoint {
    ContinuousPoint(DVector::from_iterator(
        a.dim(),
        a.0.iter().map(|&c| c as f64),
    ))
}

/// A finite, duplicate-free set of lattice points kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    dimension: usize,
    points: Vec<LatticePoint>,
}

impl Lattice {
    /// Builds a lattice from an arbitrary point list. Duplicates collapse.
    pub fn new(dimension: usize, points: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut points: Vec<LatticePoint> = points.into_iter().collect();
        for p in &points {
            check_dims(dimension, p.dim())?;
        }
        points.sort_unstable();
        points.dedup();
        Ok(Lattice { dimension, points })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LatticePoint> {
        self.points.iter()
    }

    /// Position of `p` in the enumeration order.
    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.index_of(p).is_some()
    }

    /// All adjacent pairs `(i, j)` with `i < j`, as enumeration indices.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            for axis in 0..self.dimension {
                let mut next = p.0.clone();
                next[axis] += 1;
                let next = LatticePoint(next);
                if let Some(j) = self.index_of(&next) {
                    debug_assert!(is_adjacent(p, &next).unwrap_or(false));
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }
}

impl<'a> IntoIterator for &'a Lattice {
    type Item = &'a LatticePoint;
    type IntoIter = std::slice::Iter<'a, LatticePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Every integer tuple in the closed box `[lower, upper]`, lexicographically.
pub fn generate_box_lattice(lower: &LatticePoint, upper: &LatticePoint) -> Result<Lattice> {
    check_dims(lower.dim(), upper.dim())?;
    for (axis, (&lo, &hi)) in lower.0.iter().zip(&upper.0).enumerate() {
        if lo > hi {
            return Err(Error::InvertedBounds {
                axis,
                lower: lo,
                upper: hi,
            });
        }
    }
    let n = lower.dim();
    let mut points = Vec::new();
    let mut cursor = lower.0.clone();
    // Odometer with the last axis varying fastest gives lexicographic order.
    'outer: loop {
        points.push(LatticePoint(cursor.clone()));
        let mut axis = n;
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            if cursor[axis] < upper.0[axis] {
                cursor[axis] += 1;
                break;
            }
            cursor[axis] = lower.0[axis];
        }
    }
    Ok(Lattice {
        dimension: n,
        points,
    })
}
