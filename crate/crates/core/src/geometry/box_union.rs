//! Finite unions of half-open boxes kept in a canonical disjoint form.
//!
//! On the line a union is a sorted list of disjoint, non-touching intervals.
//! In the plane it is a list of vertical slabs `[x0, x1) × Y` where `Y` is a
//! canonical interval set; adjacent slabs with equal `Y` are merged, so two
//! unions describing the same set compare equal.

use super::cube::{check_dim, Aabb};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

impl SetOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersection => a && b,
            SetOp::Difference => a && !b,
        }
    }
}

/// Canonical union of half-open intervals on the line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    iv: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { iv: Vec::new() }
    }

    pub fn from_intervals(mut v: Vec<(f64, f64)>) -> Self {
        v.retain(|&(lo, hi)| hi > lo);
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { iv: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.iv
    }

    pub fn is_empty(&self) -> bool {
        self.iv.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.iv.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn combine(&self, other: &IntervalSet, op: SetOp) -> IntervalSet {
        let a: Vec<f64> = self.iv.iter().flat_map(|&(l, h)| [l, h]).collect();
        let b: Vec<f64> = other.iv.iter().flat_map(|&(l, h)| [l, h]).collect();
        let (mut i, mut j) = (0, 0);
        let mut cur = false;
        let mut start = 0.0;
        let mut out = Vec::new();
        while i < a.len() || j < b.len() {
            let x = match (a.get(i), b.get(j)) {
                (Some(&p), Some(&q)) => p.min(q),
                (Some(&p), None) => p,
                (None, Some(&q)) => q,
                (None, None) => unreachable!(),
            };
            while i < a.len() && a[i] == x {
                i += 1;
            }
            while j < b.len() && b[j] == x {
                j += 1;
            }
            let now = op.apply(i % 2 == 1, j % 2 == 1);
            if now != cur {
                if now {
                    start = x;
                } else {
                    out.push((start, x));
                }
                cur = now;
            }
        }
        IntervalSet { iv: out }
    }

    fn locate(&self, x: f64) -> Option<usize> {
        // last interval with lo <= x
        let k = self.iv.partition_point(|&(lo, _)| lo <= x);
        if k == 0 {
            None
        } else {
            Some(k - 1)
        }
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.locate(x).is_some_and(|k| x < self.iv[k].1)
    }

    /// `[lo, hi)` lies inside the set.
    pub fn contains_interval(&self, lo: f64, hi: f64) -> bool {
        if hi <= lo {
            return true;
        }
        self.locate(lo).is_some_and(|k| hi <= self.iv[k].1)
    }

    pub fn intersects_interval(&self, lo: f64, hi: f64) -> bool {
        if hi <= lo {
            return false;
        }
        let k = self.iv.partition_point(|&(_, h)| h <= lo);
        k < self.iv.len() && self.iv[k].0 < hi
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> IntervalSet {
        IntervalSet::from_intervals(self.iv.iter().map(|&(l, h)| (f(l), f(h))).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Slab {
    x0: f64,
    x1: f64,
    ys: IntervalSet,
}

/// Canonical union of half-open rectangles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlabSet {
    slabs: Vec<Slab>,
}

impl SlabSet {
    fn push_canonical(out: &mut Vec<Slab>, x0: f64, x1: f64, ys: IntervalSet) {
        if ys.is_empty() || x1 <= x0 {
            return;
        }
        if let Some(last) = out.last_mut() {
            if last.x1 == x0 && last.ys == ys {
                last.x1 = x1;
                return;
            }
        }
        out.push(Slab { x0, x1, ys });
    }

    pub fn from_rects(rects: &[Aabb]) -> SlabSet {
        let mut rs: Vec<&Aabb> = rects.iter().filter(|r| !r.is_empty()).collect();
        rs.sort_by(|a, b| a.lo[0].total_cmp(&b.lo[0]));
        let mut xs: Vec<f64> = rs.iter().flat_map(|r| [r.lo[0], r.hi[0]]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut out = Vec::new();
        let mut active: Vec<&Aabb> = Vec::new();
        let mut next = 0;
        for w in xs.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            active.retain(|r| r.hi[0] > x0);
            while next < rs.len() && rs[next].lo[0] <= x0 {
                if rs[next].hi[0] > x0 {
                    active.push(rs[next]);
                }
                next += 1;
            }
            let ys = IntervalSet::from_intervals(active.iter().map(|r| (r.lo[1], r.hi[1])).collect());
            Self::push_canonical(&mut out, x0, x1, ys);
        }
        SlabSet { slabs: out }
    }

    pub fn measure(&self) -> f64 {
        self.slabs.iter().map(|s| (s.x1 - s.x0) * s.ys.measure()).sum()
    }

    pub fn combine(&self, other: &SlabSet, op: SetOp) -> SlabSet {
        let mut xs: Vec<f64> = self
            .slabs
            .iter()
            .chain(other.slabs.iter())
            .flat_map(|s| [s.x0, s.x1])
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let empty = IntervalSet::empty();
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        for w in xs.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            while i < self.slabs.len() && self.slabs[i].x1 <= x0 {
                i += 1;
            }
            while j < other.slabs.len() && other.slabs[j].x1 <= x0 {
                j += 1;
            }
            let ya = match self.slabs.get(i) {
                Some(s) if s.x0 <= x0 => &s.ys,
                _ => &empty,
            };
            let yb = match other.slabs.get(j) {
                Some(s) if s.x0 <= x0 => &s.ys,
                _ => &empty,
            };
            Self::push_canonical(&mut out, x0, x1, ya.combine(yb, op));
        }
        SlabSet { slabs: out }
    }

    pub fn rects(&self) -> Vec<Aabb> {
        self.slabs
            .iter()
            .flat_map(|s| {
                s.ys.intervals()
                    .iter()
                    .map(move |&(y0, y1)| Aabb::rect(s.x0, s.x1, y0, y1))
            })
            .collect()
    }

    pub fn contains_rect(&self, r: &Aabb) -> bool {
        if r.is_empty() {
            return true;
        }
        let k = self.slabs.partition_point(|s| s.x1 <= r.lo[0]);
        let mut x = r.lo[0];
        for s in &self.slabs[k..] {
            if s.x0 > x {
                return false;
            }
            if !s.ys.contains_interval(r.lo[1], r.hi[1]) {
                return false;
            }
            x = s.x1;
            if x >= r.hi[0] {
                return true;
            }
        }
        false
    }

    pub fn intersects_rect(&self, r: &Aabb) -> bool {
        if r.is_empty() {
            return false;
        }
        let k = self.slabs.partition_point(|s| s.x1 <= r.lo[0]);
        self.slabs[k..]
            .iter()
            .take_while(|s| s.x0 < r.hi[0])
            .any(|s| s.ys.intersects_interval(r.lo[1], r.hi[1]))
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        let k = self.slabs.partition_point(|s| s.x1 <= p[0]);
        self.slabs
            .get(k)
            .is_some_and(|s| s.x0 <= p[0] && s.ys.contains_point(p[1]))
    }

    fn map(&self, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) -> SlabSet {
        let rects: Vec<Aabb> = self
            .rects()
            .into_iter()
            .map(|r| Aabb::rect(fx(r.lo[0]), fx(r.hi[0]), fy(r.lo[1]), fy(r.hi[1])))
            .collect();
        SlabSet::from_rects(&rects)
    }
}

/// Disjoint finite union of half-open boxes in dimension 1 or 2.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxUnion {
    Line(IntervalSet),
    Plane(SlabSet),
}

impl BoxUnion {
    pub fn empty(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(match dim {
            1 => BoxUnion::Line(IntervalSet::empty()),
            _ => BoxUnion::Plane(SlabSet::default()),
        })
    }

    pub fn from_boxes(dim: usize, boxes: &[Aabb]) -> Result<Self> {
        check_dim(dim)?;
        if let Some(b) = boxes.iter().find(|b| b.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim,
            });
        }
        Ok(match dim {
            1 => BoxUnion::Line(IntervalSet::from_intervals(
                boxes.iter().map(|b| (b.lo[0], b.hi[0])).collect(),
            )),
            _ => BoxUnion::Plane(SlabSet::from_rects(boxes)),
        })
    }

    pub fn from_box(b: Aabb) -> Self {
        BoxUnion::from_boxes(b.dim, &[b]).expect("box has a valid dimension")
    }

    pub fn from_intervals(iv: Vec<(f64, f64)>) -> Self {
        BoxUnion::Line(IntervalSet::from_intervals(iv))
    }

    pub fn dim(&self) -> usize {
        match self {
            BoxUnion::Line(_) => 1,
            BoxUnion::Plane(_) => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            BoxUnion::Line(s) => s.is_empty(),
            BoxUnion::Plane(s) => s.slabs.is_empty(),
        }
    }

    /// Lebesgue measure: the sum of the disjoint box volumes.
    pub fn measure(&self) -> f64 {
        match self {
            BoxUnion::Line(s) => s.measure(),
            BoxUnion::Plane(s) => s.measure(),
        }
    }

    pub fn combine(&self, other: &BoxUnion, op: SetOp) -> Result<BoxUnion> {
        match (self, other) {
            (BoxUnion::Line(a), BoxUnion::Line(b)) => Ok(BoxUnion::Line(a.combine(b, op))),
            (BoxUnion::Plane(a), BoxUnion::Plane(b)) => Ok(BoxUnion::Plane(a.combine(b, op))),
            _ => Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            }),
        }
    }

    pub fn union(&self, other: &BoxUnion) -> Result<BoxUnion> {
        self.combine(other, SetOp::Union)
    }

    pub fn intersection(&self, other: &BoxUnion) -> Result<BoxUnion> {
        self.combine(other, SetOp::Intersection)
    }

    pub fn difference(&self, other: &BoxUnion) -> Result<BoxUnion> {
        self.combine(other, SetOp::Difference)
    }

    pub fn is_subset_of(&self, other: &BoxUnion) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    /// The canonical disjoint boxes.
    pub fn boxes(&self) -> Vec<Aabb> {
        match self {
            BoxUnion::Line(s) => s.iv.iter().map(|&(l, h)| Aabb::interval(l, h)).collect(),
            BoxUnion::Plane(s) => s.rects(),
        }
    }

    pub fn intervals(&self) -> Option<&[(f64, f64)]> {
        match self {
            BoxUnion::Line(s) => Some(s.intervals()),
            BoxUnion::Plane(_) => None,
        }
    }

    pub fn contains_box(&self, b: &Aabb) -> bool {
        match self {
            BoxUnion::Line(s) => s.contains_interval(b.lo[0], b.hi[0]),
            BoxUnion::Plane(s) => s.contains_rect(b),
        }
    }

    pub fn intersects_box(&self, b: &Aabb) -> bool {
        match self {
            BoxUnion::Line(s) => s.intersects_interval(b.lo[0], b.hi[0]),
            BoxUnion::Plane(s) => s.intersects_rect(b),
        }
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        match self {
            BoxUnion::Line(s) => s.contains_point(p[0]),
            BoxUnion::Plane(s) => s.contains_point(p),
        }
    }

    pub fn bbox(&self) -> Option<Aabb> {
        match self {
            BoxUnion::Line(s) => {
                let (lo, hi) = (s.iv.first()?.0, s.iv.last()?.1);
                Some(Aabb::interval(lo, hi))
            }
            BoxUnion::Plane(s) => {
                let x0 = s.slabs.first()?.x0;
                let x1 = s.slabs.last()?.x1;
                let mut y0 = f64::INFINITY;
                let mut y1 = f64::NEG_INFINITY;
                for sl in &s.slabs {
                    y0 = y0.min(sl.ys.iv[0].0);
                    y1 = y1.max(sl.ys.iv[sl.ys.iv.len() - 1].1);
                }
                Some(Aabb::rect(x0, x1, y0, y1))
            }
        }
    }

    /// Image under an increasing map `f(axis, coordinate)` applied per axis.
    pub fn map_axes(&self, f: impl Fn(usize, f64) -> f64) -> BoxUnion {
        match self {
            BoxUnion::Line(s) => BoxUnion::Line(s.map(|x| f(0, x))),
            BoxUnion::Plane(s) => BoxUnion::Plane(s.map(|x| f(0, x), |y| f(1, y))),
        }
    }

    /// Image under `y ↦ center + factor·(y − center)`, `factor > 0`.
    pub fn dilate_about(&self, center: &[f64], factor: f64) -> BoxUnion {
        match self {
            BoxUnion::Line(s) => BoxUnion::Line(s.map(|y| center[0] + factor * (y - center[0]))),
            BoxUnion::Plane(s) => BoxUnion::Plane(s.map(
                |x| center[0] + factor * (x - center[0]),
                |y| center[1] + factor * (y - center[1]),
            )),
        }
    }

    /// Smallest `k` such that every box coordinate is a multiple of `2^-k`;
    /// `None` for the empty set.
    pub fn dyadic_level(&self) -> Option<i32> {
        self.boxes()
            .iter()
            .flat_map(|b| (0..b.dim).flat_map(move |k| [b.lo[k], b.hi[k]]))
            .map(dyadic_level_of)
            .max()
    }
}

/// Smallest `k` with `x · 2^k` an integer (`i32::MIN` for zero).
pub fn dyadic_level_of(x: f64) -> i32 {
    if x == 0.0 {
        return i32::MIN;
    }
    let bits = x.abs().to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let tz = mant.trailing_zeros() as i32;
    -(exp + tz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[(f64, f64)]) -> BoxUnion {
        BoxUnion::from_intervals(v.to_vec())
    }

    #[test]
    fn empty_and_unit_measure() {
        assert_eq!(BoxUnion::empty(1).unwrap().measure(), 0.0);
        assert_eq!(line(&[(0.0, 1.0)]).measure(), 1.0);
    }

    #[test]
    fn overlapping_union_measure() {
        assert_eq!(line(&[(0.0, 1.0), (0.5, 2.0)]).measure(), 2.0);
    }

    #[test]
    fn touching_intervals_merge() {
        let u = line(&[(0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(u.intervals().unwrap(), &[(0.0, 2.0)]);
    }

    #[test]
    fn difference_removes_half() {
        let d = line(&[(0.0, 2.0)]).difference(&line(&[(0.0, 1.0)])).unwrap();
        assert_eq!(d.intervals().unwrap(), &[(1.0, 2.0)]);
        assert_eq!(d.measure(), 1.0);
    }

    #[test]
    fn disjoint_intersection_is_empty() {
        let i = line(&[(0.0, 1.0)]).intersection(&line(&[(1.0, 2.0)])).unwrap();
        assert!(i.is_empty());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = line(&[(0.0, 1.0)]);
        let b = BoxUnion::from_box(Aabb::rect(0.0, 1.0, 0.0, 1.0));
        assert!(matches!(a.union(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn plane_canonical_form_is_unique() {
        // the same L-shape built two ways
        let a = BoxUnion::from_boxes(
            2,
            &[Aabb::rect(0.0, 2.0, 0.0, 1.0), Aabb::rect(0.0, 1.0, 1.0, 2.0)],
        )
        .unwrap();
        let b = BoxUnion::from_boxes(
            2,
            &[Aabb::rect(0.0, 1.0, 0.0, 2.0), Aabb::rect(1.0, 2.0, 0.0, 1.0)],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.measure(), 3.0);
        assert!(a.contains_box(&Aabb::rect(0.25, 0.75, 0.5, 1.75)));
        assert!(!a.contains_box(&Aabb::rect(0.5, 1.5, 0.5, 1.5)));
        assert!(a.intersects_box(&Aabb::rect(0.5, 1.5, 0.5, 1.5)));
    }

    #[test]
    fn plane_difference() {
        let sq = BoxUnion::from_box(Aabb::rect(0.0, 2.0, 0.0, 2.0));
        let hole = BoxUnion::from_box(Aabb::rect(0.5, 1.0, 0.5, 1.0));
        let d = sq.difference(&hole).unwrap();
        assert_eq!(d.measure(), 4.0 - 0.25);
        assert!(!d.contains_point(&[0.75, 0.75]));
        assert!(d.contains_point(&[1.5, 0.75]));
        assert!(d.union(&hole).unwrap() == sq);
    }

    #[test]
    fn dyadic_levels() {
        assert_eq!(dyadic_level_of(1.0), 0);
        assert_eq!(dyadic_level_of(0.75), 2);
        assert_eq!(dyadic_level_of(-3.0 / 1024.0), 10);
        assert_eq!(dyadic_level_of(4.0), -2);
        assert_eq!(line(&[(0.0, 0.5), (0.75, 1.0)]).dyadic_level(), Some(2));
    }

    #[test]
    fn dilation_scales_measure() {
        let u = line(&[(0.0, 1.0), (3.0, 3.5)]);
        let d = u.dilate_about(&[1.0], 2.0);
        assert_eq!(d.measure(), 3.0);
        assert_eq!(d.intervals().unwrap(), &[(-1.0, 1.0), (5.0, 6.0)]);
    }
}
