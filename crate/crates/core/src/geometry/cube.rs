use crate::error::{invalid, Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 2;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

/// Half-open axis-aligned box `[lo, hi)` in dimension 1 or 2.
///
/// Unused trailing coordinates are kept at zero so that derived equality is
/// meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub dim: usize,
    pub lo: [f64; MAX_DIM],
    pub hi: [f64; MAX_DIM],
}

impl Aabb {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len())?;
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        let mut b = Aabb {
            dim: lo.len(),
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for k in 0..lo.len() {
            if !(lo[k].is_finite() && hi[k].is_finite()) {
                return Err(invalid("box", "non-finite coordinate"));
            }
            b.lo[k] = lo[k];
            b.hi[k] = hi[k];
        }
        Ok(b)
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Aabb {
            dim: 1,
            lo: [lo, 0.0],
            hi: [hi, 0.0],
        }
    }

    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Aabb {
            dim: 2,
            lo: [x0, y0],
            hi: [x1, y1],
        }
    }

    pub fn is_empty(&self) -> bool {
        (0..self.dim).any(|k| self.hi[k] <= self.lo[k])
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        (0..self.dim).map(|k| self.hi[k] - self.lo[k]).product()
    }

    /// Euclidean distance between the closures of two boxes.
    pub fn distance(&self, other: &Aabb) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dim {
            let gap = (other.lo[k] - self.hi[k]).max(self.lo[k] - other.hi[k]).max(0.0);
            s += gap * gap;
        }
        s.sqrt()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        (0..self.dim).all(|k| self.lo[k] <= p[k] && p[k] < self.hi[k])
    }
}

/// Axis-aligned cube `Q(x, r)` given by its center and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    dim: usize,
    center: [f64; MAX_DIM],
    side: f64,
}

impl Cube {
    pub fn new(center: &[f64], side: f64) -> Result<Self> {
        check_dim(center.len())?;
        if !(side > 0.0 && side.is_finite()) {
            return Err(invalid("side", format!("must be positive, got {side}")));
        }
        let mut c = [0.0; MAX_DIM];
        c[..center.len()].copy_from_slice(center);
        Ok(Cube {
            dim: center.len(),
            center: c,
            side,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// `rQ`: same center, side multiplied by `factor`.
    pub fn dilate(&self, factor: f64) -> Result<Cube> {
        Cube::new(self.center(), self.side * factor)
    }

    pub fn diam(&self) -> f64 {
        (self.dim as f64).sqrt() * self.side
    }

    pub fn to_box(&self) -> Aabb {
        let h = self.side / 2.0;
        let mut b = Aabb {
            dim: self.dim,
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for k in 0..self.dim {
            b.lo[k] = self.center[k] - h;
            b.hi[k] = self.center[k] + h;
        }
        b
    }
}

/// Dyadic cube of level `k`: side `2^-k`, lower corner `index * 2^-k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub dim: usize,
    pub level: i32,
    pub index: [i64; MAX_DIM],
}

impl DyadicCube {
    pub fn new(level: i32, index: &[i64]) -> Result<Self> {
        check_dim(index.len())?;
        let mut ix = [0; MAX_DIM];
        ix[..index.len()].copy_from_slice(index);
        Ok(DyadicCube {
            dim: index.len(),
            level,
            index: ix,
        })
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn diam(&self) -> f64 {
        (self.dim as f64).sqrt() * self.side()
    }

    pub fn to_box(&self) -> Aabb {
        let s = self.side();
        let mut b = Aabb {
            dim: self.dim,
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for k in 0..self.dim {
            b.lo[k] = self.index[k] as f64 * s;
            b.hi[k] = (self.index[k] + 1) as f64 * s;
        }
        b
    }

    pub fn to_cube(&self) -> Cube {
        let s = self.side();
        let mut c = [0.0; MAX_DIM];
        for (k, ck) in c.iter_mut().enumerate().take(self.dim) {
            *ck = (self.index[k] as f64 + 0.5) * s;
        }
        Cube {
            dim: self.dim,
            center: c,
            side: s,
        }
    }

    pub fn center(&self) -> [f64; MAX_DIM] {
        self.to_cube().center
    }

    pub fn parent(&self) -> DyadicCube {
        let mut p = *self;
        p.level -= 1;
        for k in 0..self.dim {
            p.index[k] = self.index[k].div_euclid(2);
        }
        p
    }

    /// The `2^dim` children in lexicographic index order (last axis fastest).
    pub fn children(&self) -> impl DoubleEndedIterator<Item = DyadicCube> + ExactSizeIterator {
        let parent = *self;
        (0..1usize << self.dim).map(move |bits| {
            let mut c = parent;
            c.level += 1;
            for k in 0..parent.dim {
                let bit = (bits >> (parent.dim - 1 - k)) & 1;
                c.index[k] = 2 * parent.index[k] + bit as i64;
            }
            c
        })
    }

    /// True if `other` is this cube or one of its descendants.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if other.dim != self.dim || other.level < self.level {
            return false;
        }
        let shift = (other.level - self.level) as u32;
        (0..self.dim).all(|k| other.index[k] >> shift == self.index[k])
    }
}
