//! Greedy dyadic Whitney decomposition of a grid-aligned open set.
//!
//! A dyadic cube `Q ⊆ Ω` is emitted as soon as `2·diam(Q) ≤ dist(Q, Ωᶜ)`.
//! Otherwise its children are examined, down to a floor level where the
//! remaining cubes inside `Ω` are emitted with `flagged = true`. Because the
//! parent of an unflagged cube failed the test, `dist(Q, Ωᶜ) ≤ 6·diam(Q)`.

use super::box_union::BoxUnion;
use super::cube::{Aabb, Cube, DyadicCube};
use crate::error::{Error, Result};

/// Floor depth (levels below the alignment level of `Ω`) used by
/// [`default_floor`]. Chosen so that the flagged boundary layer stays under
/// one percent of `|Ω|` for sets built from a few grid cells.
pub const DEFAULT_FLOOR_DEPTH_1D: i32 = 9;
pub const DEFAULT_FLOOR_DEPTH_2D: i32 = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyCube {
    pub cube: DyadicCube,
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct WhitneyDecomposition {
    pub source: BoxUnion,
    pub floor_level: i32,
    pub cubes: Vec<WhitneyCube>,
}

/// Distance from `Ω`'s complement, precomputed for repeated queries.
pub struct ComplementDistance {
    bbox: Option<Aabb>,
    holes: Vec<Aabb>,
    omega: BoxUnion,
}

impl ComplementDistance {
    pub fn new(omega: &BoxUnion) -> Self {
        let bbox = omega.bbox();
        let holes = match bbox {
            Some(b) => BoxUnion::from_box(b)
                .difference(omega)
                .expect("bbox has the dimension of omega")
                .boxes(),
            None => Vec::new(),
        };
        ComplementDistance {
            bbox,
            holes,
            omega: omega.clone(),
        }
    }

    /// Euclidean distance between the closed box `q` and the closure of `Ωᶜ`.
    pub fn distance(&self, q: &Aabb) -> f64 {
        let Some(bb) = self.bbox else { return 0.0 };
        if !self.omega.contains_box(q) {
            return 0.0;
        }
        self.distance_inside(q, bb)
    }

    // `q ⊆ Ω` already established
    fn distance_inside(&self, q: &Aabb, bb: Aabb) -> f64 {
        let mut d = f64::INFINITY;
        for k in 0..q.dim {
            d = d.min(q.lo[k] - bb.lo[k]).min(bb.hi[k] - q.hi[k]);
        }
        for h in &self.holes {
            d = d.min(q.distance(h));
        }
        d.max(0.0)
    }
}

/// `d(Q, ℝⁿ∖Ω)` for a cube given by center and side.
pub fn dist_to_complement(q: &Cube, omega: &BoxUnion) -> Result<f64> {
    if q.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            got: q.dim(),
        });
    }
    Ok(ComplementDistance::new(omega).distance(&q.to_box()))
}

/// Default floor level for `omega`: its dyadic alignment level plus a fixed depth.
pub fn default_floor(omega: &BoxUnion) -> i32 {
    let depth = if omega.dim() == 1 {
        DEFAULT_FLOOR_DEPTH_1D
    } else {
        DEFAULT_FLOOR_DEPTH_2D
    };
    omega.dyadic_level().unwrap_or(0).max(0) + depth
}

pub fn whitney(omega: &BoxUnion, floor_level: i32) -> Result<WhitneyDecomposition> {
    let mut out = WhitneyDecomposition {
        source: omega.clone(),
        floor_level,
        cubes: Vec::new(),
    };
    let Some(bb) = omega.bbox() else {
        return Ok(out);
    };
    if omega.dyadic_level().is_some_and(|k| k > floor_level) {
        return Err(Error::NotGridAligned { level: floor_level });
    }
    let dim = omega.dim();
    let extent = (0..dim).map(|k| bb.hi[k] - bb.lo[k]).fold(0.0, f64::max);
    // coarsest level whose cubes are at least as large as the bounding box
    let top = (-extent.log2().ceil() as i32).min(floor_level);
    let s = (-(top as f64)).exp2();
    let range = |k: usize| -> (i64, i64) {
        ((bb.lo[k] / s).floor() as i64, (bb.hi[k] / s).ceil() as i64)
    };
    let dist = ComplementDistance::new(omega);
    let mut stack: Vec<DyadicCube> = Vec::new();
    let (x0, x1) = range(0);
    let mut roots: Vec<DyadicCube> = if dim == 1 {
        (x0..x1).map(|i| DyadicCube::new(top, &[i]).unwrap()).collect()
    } else {
        let (y0, y1) = range(1);
        (x0..x1)
            .flat_map(|i| (y0..y1).map(move |j| DyadicCube::new(top, &[i, j]).unwrap()))
            .collect()
    };
    // Z-order of the roots, matching the depth-first order of their descendants
    roots.sort_by_key(|q| z_key(q, 0));
    stack.extend(roots.into_iter().rev());
    while let Some(q) = stack.pop() {
        let b = q.to_box();
        if !omega.intersects_box(&b) {
            continue;
        }
        if omega.contains_box(&b) {
            if 2.0 * q.diam() <= dist.distance_inside(&b, bb) {
                out.cubes.push(WhitneyCube { cube: q, flagged: false });
                continue;
            }
            if q.level >= floor_level {
                out.cubes.push(WhitneyCube { cube: q, flagged: true });
                continue;
            }
        } else if q.level >= floor_level {
            return Err(Error::NotGridAligned { level: floor_level });
        }
        stack.extend(q.children().rev());
    }
    Ok(out)
}

// Dyadic cubes are nested or disjoint, and each one covers a contiguous run
// of Z-order keys at the finest level present. The family is disjoint iff
// those runs do not overlap.
fn dyadic_disjoint(cubes: impl Iterator<Item = DyadicCube> + Clone) -> bool {
    let Some(finest) = cubes.clone().map(|q| q.level).max() else {
        return true;
    };
    let mut runs: Vec<(u128, u128)> = cubes
        .map(|q| {
            let shift = (finest - q.level) as u32;
            let key = z_key(&q, shift);
            (key, key + (1u128 << (q.dim as u32 * shift)))
        })
        .collect();
    // decompositions are emitted in Z-order, so the sort is usually skipped
    if !runs.windows(2).all(|w| w[0] <= w[1]) {
        runs.sort_unstable();
    }
    runs.windows(2).all(|w| w[0].1 <= w[1].0)
}

/// Z-order key of the lower corner of `q` refined by `shift` levels, first
/// axis most significant. Flipping the sign bit keeps the order of signed
/// indices and every dyadic alignment.
fn z_key(q: &DyadicCube, shift: u32) -> u128 {
    let mut key = 0u128;
    for k in 0..q.dim {
        let u = ((q.index[k] << shift) as u64) ^ (1 << 63);
        key |= if q.dim == 1 { u as u128 } else { spread(u) << (q.dim - 1 - k) };
    }
    key
}

/// Bits of `x` moved to the even positions.
fn spread(x: u64) -> u128 {
    let mut v = x as u128;
    v = (v | (v << 32)) & 0x0000_0000_ffff_ffff_0000_0000_ffff_ffff;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff_0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff_00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f_0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333_3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555_5555_5555_5555_5555;
    v
}

/// Summary of the structural checks on a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyAudit {
    pub cover_exact: bool,
    pub disjoint: bool,
    pub bracket_ok: bool,
    pub flagged_floor_ok: bool,
    pub min_dist_ratio: f64,
    pub max_dist_ratio: f64,
    pub flagged_measure: f64,
    pub flagged_count: usize,
}

impl WhitneyDecomposition {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn flagged_measure(&self) -> f64 {
        self.cubes
            .iter()
            .filter(|c| c.flagged)
            .map(|c| c.cube.to_box().volume())
            .sum()
    }

    pub fn audit(&self) -> WhitneyAudit {
        let dist = ComplementDistance::new(&self.source);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut bracket_ok = true;
        let mut inside = true;
        let mut flagged_floor_ok = true;
        let mut total = 0.0;
        for c in &self.cubes {
            let b = c.cube.to_box();
            total += b.volume();
            let contained = self.source.contains_box(&b);
            inside &= contained;
            if c.flagged {
                flagged_floor_ok &= c.cube.level == self.floor_level;
                continue;
            }
            let d = match dist.bbox {
                Some(bb) if contained => dist.distance_inside(&b, bb),
                _ => 0.0,
            };
            let ratio = d / c.cube.diam();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            bracket_ok &= (2.0..=8.0).contains(&ratio);
        }
        let disjoint = dyadic_disjoint(self.cubes.iter().map(|c| c.cube));
        WhitneyAudit {
            cover_exact: inside && disjoint && total == self.source.measure(),
            disjoint,
            bracket_ok,
            flagged_floor_ok,
            min_dist_ratio: if lo.is_finite() { lo } else { f64::NAN },
            max_dist_ratio: hi,
            flagged_measure: self.flagged_measure(),
            flagged_count: self.cubes.iter().filter(|c| c.flagged).count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_nearest_endpoint() {
        let omega = BoxUnion::from_intervals(vec![(0.0, 1.0)]);
        let q = Cube::new(&[0.5], 0.2).unwrap();
        let d = dist_to_complement(&q, &omega).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
        let out = Cube::new(&[1.0], 0.2).unwrap();
        assert_eq!(dist_to_complement(&out, &omega).unwrap(), 0.0);
    }

    #[test]
    fn overlap_detection() {
        let a = DyadicCube::new(1, &[0, 1]).unwrap();
        let b = DyadicCube::new(3, &[1, 5]).unwrap();
        let c = DyadicCube::new(3, &[4, 5]).unwrap();
        assert!(!dyadic_disjoint([a, b].into_iter()));
        assert!(dyadic_disjoint([a, c].into_iter()));
        assert!(!dyadic_disjoint([c, c].into_iter()));
        // the finest cube sits at an odd offset from the coarse one
        let d = DyadicCube::new(2, &[1, 2]).unwrap();
        let e = DyadicCube::new(3, &[3, 5]).unwrap();
        assert!(!dyadic_disjoint([d, e].into_iter()));
        assert!(dyadic_disjoint([d, DyadicCube::new(3, &[1, 5]).unwrap()].into_iter()));
        let line = [DyadicCube::new(0, &[-1]).unwrap(), DyadicCube::new(2, &[-3]).unwrap()];
        assert!(!dyadic_disjoint(line.into_iter()));
        for x in [0u64, 1, 0b1011, 0xdead_beef, 1 << 40, u64::MAX] {
            let slow = (0..64).fold(0u128, |acc, b| acc | (((x >> b) & 1) as u128) << (2 * b));
            assert_eq!(spread(x), slow);
        }
    }

    #[test]
    fn empty_set_has_no_cubes() {
        let w = whitney(&BoxUnion::empty(1).unwrap(), 10).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn unit_interval_cover_and_bracket() {
        let omega = BoxUnion::from_intervals(vec![(0.0, 1.0)]);
        let w = whitney(&omega, 10).unwrap();
        let a = w.audit();
        assert!(a.cover_exact);
        assert!(a.bracket_ok, "{a:?}");
        assert!(a.flagged_floor_ok);
        let total: f64 = w.cubes.iter().map(|c| c.cube.to_box().volume()).sum();
        assert_eq!(total, 1.0);
    }

    #[test]
    fn misaligned_set_is_rejected() {
        let omega = BoxUnion::from_intervals(vec![(0.0, 0.3)]);
        assert!(matches!(whitney(&omega, 10), Err(Error::NotGridAligned { .. })));
    }

    #[test]
    fn plane_l_shape() {
        let omega = BoxUnion::from_boxes(
            2,
            &[Aabb::rect(0.0, 1.0, 0.0, 0.5), Aabb::rect(0.0, 0.5, 0.5, 1.0)],
        )
        .unwrap();
        let w = whitney(&omega, 8).unwrap();
        let a = w.audit();
        assert!(a.cover_exact && a.bracket_ok, "{a:?}");
        assert!(a.max_dist_ratio <= 6.0 + 1e-12);
    }
}
