//! Piecewise-constant functions on a uniform dyadic grid over `[-L, L)^dim`.

mod corpus;
mod distribution;
mod text;

pub use corpus::{corpus, CorpusSpec};
pub use distribution::{weak_l1_norm, DistributionReport, AUGMENT_FACTOR};
pub use text::{parse_step_function, write_step_function};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dyadic_level_of, Aabb, BoxUnion, MAX_DIM};
use crate::weights::MeasureSpec;

/// Cells of side `2^-level` tiling the window `[-L, L)^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    level: i32,
    per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, level: i32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", "must be positive"));
        }
        if dyadic_level_of(half_width) > level + 1 {
            return Err(invalid(
                "half_width",
                format!("window side 2*{half_width} is not a multiple of 2^-{level}"),
            ));
        }
        let per_axis = (2.0 * half_width * (level as f64).exp2()) as usize;
        let total = per_axis.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if per_axis == 0 || total > 1 << 26 {
            return Err(invalid("level", format!("{total} cells is out of range")));
        }
        Ok(GridSpec {
            dim,
            half_width,
            level,
            per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn cell_side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_side().powi(self.dim as i32)
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn cell_count(&self) -> usize {
        self.per_axis.pow(self.dim as u32)
    }

    /// Cell boundaries along one axis.
    pub fn axis_breaks(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.cell_side();
        (0..=self.per_axis).map(move |k| -self.half_width + k as f64 * h)
    }

    /// Row-major multi-index (last axis fastest).
    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.per_axis, idx % self.per_axis],
        }
    }

    pub fn cell_box(&self, idx: usize) -> Aabb {
        let m = self.multi_index(idx);
        let h = self.cell_side();
        let mut b = Aabb {
            dim: self.dim,
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for k in 0..self.dim {
            b.lo[k] = -self.half_width + m[k] as f64 * h;
            b.hi[k] = b.lo[k] + h;
        }
        b
    }

    pub fn cell_center(&self, idx: usize) -> [f64; MAX_DIM] {
        let b = self.cell_box(idx);
        let mut c = [0.0; MAX_DIM];
        for k in 0..self.dim {
            c[k] = 0.5 * (b.lo[k] + b.hi[k]);
        }
        c
    }

    /// Index of the cell containing `x`, if inside the window.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let h = self.cell_side();
        let mut idx = 0;
        for &xk in x.iter().take(self.dim) {
            let k = ((xk + self.half_width) / h).floor();
            if k < 0.0 || k >= self.per_axis as f64 {
                return None;
            }
            idx = idx * self.per_axis + k as usize;
        }
        Some(idx)
    }

    pub fn window(&self) -> Aabb {
        let l = self.half_width;
        match self.dim {
            1 => Aabb::interval(-l, l),
            _ => Aabb::rect(-l, l, -l, l),
        }
    }

    pub fn with_level(&self, level: i32) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.half_width, level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(invalid(
                "values",
                format!("expected {} cell values, got {}", grid.cell_count(), values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite cell value"));
        }
        Ok(StepFunction { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.cell_count();
        StepFunction {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.cell_count())
            .map(|i| f(&grid.cell_center(i)[..grid.dim]))
            .collect();
        StepFunction::new(grid, values)
    }

    /// `c · 1_B` for a union of grid cells `B`; cells are included when their center lies in `B`.
    pub fn indicator(grid: GridSpec, set: &BoxUnion, c: f64) -> Result<Self> {
        if set.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: set.dim(),
            });
        }
        let dim = grid.dim;
        StepFunction::from_fn(grid, |x| if set.contains_point(&x[..dim]) { c } else { 0.0 })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.grid.locate(x).map_or(0.0, |i| self.values[i])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        if self.grid != other.grid {
            return Err(invalid("grid", "step functions live on different grids"));
        }
        Ok(StepFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn cell_masses(&self, mu: &MeasureSpec) -> Vec<f64> {
        match mu {
            MeasureSpec::Lebesgue => vec![self.grid.cell_volume(); self.values.len()],
            _ => (0..self.values.len())
                .map(|i| mu.box_mass(&self.grid.cell_box(i)))
                .collect(),
        }
    }

    /// `∫ f dμ`, exact for Lebesgue and for closed-form weights.
    pub fn integral(&self, mu: &MeasureSpec) -> Result<f64> {
        mu.check_dim(self.dim())?;
        if mu.is_lebesgue() {
            return Ok(self.values.iter().sum::<f64>() * self.grid.cell_volume());
        }
        Ok(self
            .values
            .iter()
            .zip(self.cell_masses(mu))
            .map(|(v, m)| v * m)
            .sum())
    }

    pub fn l1_norm(&self, mu: &MeasureSpec) -> Result<f64> {
        self.map(f64::abs).integral(mu)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// Exact union of the cells where `f > λ` (or `|f| > λ` with `absolute`).
    pub fn superlevel(&self, lambda: f64, absolute: bool) -> BoxUnion {
        self.cells_where(|v| if absolute { v.abs() > lambda } else { v > lambda })
    }

    /// Union of the cells whose value satisfies `pred`.
    pub fn cells_where(&self, pred: impl Fn(f64) -> bool) -> BoxUnion {
        let n = self.grid.per_axis;
        let mut boxes = Vec::new();
        // runs along the last axis
        let rows = if self.dim() == 1 { 1 } else { n };
        for row in 0..rows {
            let mut k = 0;
            while k < n {
                if !pred(self.values[row * n + k]) {
                    k += 1;
                    continue;
                }
                let start = k;
                while k < n && pred(self.values[row * n + k]) {
                    k += 1;
                }
                let a = self.grid.cell_box(row * n + start);
                let b = self.grid.cell_box(row * n + k - 1);
                let mut r = a;
                r.hi[self.dim() - 1] = b.hi[self.dim() - 1];
                boxes.push(r);
            }
        }
        BoxUnion::from_boxes(self.dim(), &boxes).expect("cells share the grid dimension")
    }

    /// `f · 1_B` for a union of cells `B`.
    pub fn restrict(&self, set: &BoxUnion) -> StepFunction {
        let dim = self.dim();
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if !set.contains_point(&self.grid.cell_center(i)[..dim]) {
                *v = 0.0;
            }
        }
        out
    }

    /// The same function on a finer grid.
    pub fn refine(&self, level: i32) -> Result<StepFunction> {
        if level < self.grid.level {
            return Err(invalid("level", "refinement can only increase the level"));
        }
        let fine = self.grid.with_level(level)?;
        let src = self;
        StepFunction::from_fn(fine, |x| src.value_at(x))
    }

    /// Cells with nonzero values, as `(index, value)`.
    pub fn support_cells(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| *v != 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{CubeFamily, Weight};

    fn line(level: i32) -> GridSpec {
        GridSpec::new(1, 2.0, level).unwrap()
    }

    fn plateau(grid: &GridSpec, lo: f64, hi: f64, c: f64) -> StepFunction {
        StepFunction::from_fn(grid.clone(), |x| if x[0] >= lo && x[0] < hi { c } else { 0.0 }).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1, 0.3, 4).is_err());
        assert!(GridSpec::new(3, 1.0, 4).is_err());
        let g = GridSpec::new(2, 1.0, 3).unwrap();
        assert_eq!(g.cell_count(), 256);
        assert_eq!(g.locate(&[-1.0, -1.0]), Some(0));
        assert_eq!(g.locate(&[1.0, 0.0]), None);
    }

    #[test]
    fn zero_function_has_empty_superlevel() {
        let f = StepFunction::zeros(line(4));
        assert!(f.superlevel(0.5, true).is_empty());
    }

    #[test]
    fn plateau_superlevel() {
        let f = plateau(&line(4), 0.0, 1.0, 2.0);
        let s = f.superlevel(1.0, false);
        assert_eq!(s.intervals().unwrap(), &[(0.0, 1.0)]);
        assert_eq!(s.measure(), 1.0);
    }

    #[test]
    fn indicator_integrals() {
        let f = plateau(&line(6), 0.0, 1.0, 1.0);
        assert_eq!(f.integral(&MeasureSpec::Lebesgue).unwrap(), 1.0);
        let fam = CubeFamily::new(2.0, 4).unwrap();
        let mu = MeasureSpec::weighted(Weight::power_law(0.5).unwrap(), 2.0, &fam).unwrap();
        assert!((f.integral(&mu).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn refine_preserves_integral() {
        let g = line(3);
        let f = StepFunction::from_fn(g, |x| x[0].sin().abs()).unwrap();
        let r = f.refine(6).unwrap();
        let (a, b) = (
            f.integral(&MeasureSpec::Lebesgue).unwrap(),
            r.integral(&MeasureSpec::Lebesgue).unwrap(),
        );
        assert!((a - b).abs() < 1e-14);
        assert_eq!(f.superlevel(0.5, true), r.superlevel(0.5, true));
    }

    #[test]
    fn plane_superlevel_runs() {
        let g = GridSpec::new(2, 1.0, 2).unwrap();
        let f = StepFunction::from_fn(g, |x| if x[0] < 0.0 && x[1] < 0.5 { 3.0 } else { 0.0 }).unwrap();
        let s = f.superlevel(1.0, false);
        assert_eq!(s.measure(), 1.5);
        assert_eq!(s.boxes().len(), 1);
    }
}
