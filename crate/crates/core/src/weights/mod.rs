//! Weights on the line, weighted measures and Muckenhoupt analytics.

mod ap;
mod params;

pub use ap::{ap_constant, weighted_doubling_check, ApEstimate, CubeFamily, DoublingAudit};
pub use params::{choose_r, h_func, hytonen_rhs, k_func, ParamSelection};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Aabb, BoxUnion};
use crate::stepfn::GridSpec;

/// Positive step weight on a 1D grid, equal to `tail` outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWeight {
    grid: GridSpec,
    values: Vec<f64>,
    tail: f64,
    // prefix[k] = ∫ over the first k cells
    prefix: Vec<f64>,
}

impl StepWeight {
    pub fn new(grid: GridSpec, values: Vec<f64>, tail: f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::LineOnly {
                what: "step weight",
                dim: grid.dim(),
            });
        }
        if values.len() != grid.cell_count() {
            return Err(invalid("values", "length does not match the grid"));
        }
        if values.iter().chain([&tail]).any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(invalid("values", "step weights must be positive and finite"));
        }
        let h = grid.cell_side();
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in &values {
            acc += v * h;
            prefix.push(acc);
        }
        Ok(StepWeight {
            grid,
            values,
            tail,
            prefix,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    fn cumulative(&self, x: f64) -> f64 {
        let l = self.grid.half_width();
        let h = self.grid.cell_side();
        if x <= -l {
            return self.tail * (x + l);
        }
        let n = self.values.len();
        if x >= l {
            return self.prefix[n] + self.tail * (x - l);
        }
        let k = (((x + l) / h).floor() as usize).min(n - 1);
        self.prefix[k] + self.values[k] * (x - (-l + k as f64 * h))
    }

    fn density(&self, x: f64) -> f64 {
        let l = self.grid.half_width();
        if x < -l || x >= l {
            return self.tail;
        }
        let k = (((x + l) / self.grid.cell_side()).floor() as usize).min(self.values.len() - 1);
        self.values[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    ConstantOne,
    /// `|x|^alpha` with `alpha > -1`.
    PowerLaw { alpha: f64 },
    Step(StepWeight),
}

fn power_antiderivative(x: f64, alpha: f64) -> f64 {
    x.signum() * x.abs().powf(alpha + 1.0) / (alpha + 1.0)
}

impl Weight {
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(invalid(
                "alpha",
                format!("|x|^{alpha} is not locally integrable on the line"),
            ));
        }
        Ok(Weight::PowerLaw { alpha })
    }

    pub fn step(grid: GridSpec, values: Vec<f64>, tail: f64) -> Result<Self> {
        Ok(Weight::Step(StepWeight::new(grid, values, tail)?))
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            Weight::ConstantOne => 1.0,
            Weight::PowerLaw { alpha } => x.abs().powf(*alpha),
            Weight::Step(s) => s.density(x),
        }
    }

    /// `w([a, b))` in closed form.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Weight::ConstantOne => b - a,
            Weight::PowerLaw { alpha } => {
                power_antiderivative(b, *alpha) - power_antiderivative(a, *alpha)
            }
            Weight::Step(s) => s.cumulative(b) - s.cumulative(a),
        }
    }

    /// `w^exponent`, failing when the result is not locally integrable.
    pub fn power(&self, exponent: f64) -> Result<Weight> {
        match self {
            Weight::ConstantOne => Ok(Weight::ConstantOne),
            Weight::PowerLaw { alpha } => {
                let e = alpha * exponent;
                if e <= -1.0 {
                    return Err(invalid(
                        "exponent",
                        format!("|x|^{e} is not locally integrable"),
                    ));
                }
                Ok(Weight::PowerLaw { alpha: e })
            }
            Weight::Step(s) => Weight::step(
                s.grid.clone(),
                s.values.iter().map(|v| v.powf(exponent)).collect(),
                s.tail.powf(exponent),
            ),
        }
    }

    /// Points where the density is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Weight::ConstantOne => Vec::new(),
            Weight::PowerLaw { .. } => vec![0.0],
            Weight::Step(s) => s.grid.axis_breaks().collect(),
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, Weight::PowerLaw { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Weight::ConstantOne => "one".into(),
            Weight::PowerLaw { alpha } => format!("power({alpha})"),
            Weight::Step(s) => format!("step(tail={})", s.tail),
        }
    }
}

/// A weight with the exponent `p` of its Muckenhoupt class and an `[w]_{A_p}` estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasure {
    weight: Weight,
    ap: ApEstimate,
}

impl WeightedMeasure {
    pub fn new(weight: Weight, p: f64, family: &CubeFamily) -> Result<Self> {
        let ap = ap_constant(&weight, p, family)?;
        Ok(WeightedMeasure { weight, ap })
    }

    /// Uses a caller-supplied characteristic (e.g. a known upper bound).
    pub fn with_estimate(weight: Weight, ap: ApEstimate) -> Self {
        WeightedMeasure { weight, ap }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn p(&self) -> f64 {
        self.ap.p
    }

    pub fn ap(&self) -> f64 {
        self.ap.value
    }

    pub fn estimate(&self) -> &ApEstimate {
        &self.ap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Lebesgue,
    Weighted(WeightedMeasure),
}

impl MeasureSpec {
    pub fn weighted(weight: Weight, p: f64, family: &CubeFamily) -> Result<Self> {
        Ok(MeasureSpec::Weighted(WeightedMeasure::new(weight, p, family)?))
    }

    pub fn weight(&self) -> Option<&Weight> {
        match self {
            MeasureSpec::Lebesgue => None,
            MeasureSpec::Weighted(m) => Some(&m.weight),
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self, MeasureSpec::Lebesgue)
    }

    /// Weighted measures live on the line.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            MeasureSpec::Weighted(_) if dim != 1 => Err(Error::LineOnly {
                what: "weighted measure",
                dim,
            }),
            _ => Ok(()),
        }
    }

    pub fn box_mass(&self, b: &Aabb) -> f64 {
        match self {
            MeasureSpec::Lebesgue => b.volume(),
            MeasureSpec::Weighted(m) => {
                debug_assert_eq!(b.dim, 1);
                m.weight.interval_mass(b.lo[0], b.hi[0])
            }
        }
    }

    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        match self {
            MeasureSpec::Lebesgue => (b - a).max(0.0),
            MeasureSpec::Weighted(m) => m.weight.interval_mass(a, b),
        }
    }

    pub fn measure(&self, s: &BoxUnion) -> f64 {
        match (self, s) {
            (MeasureSpec::Lebesgue, _) => s.measure(),
            (MeasureSpec::Weighted(m), BoxUnion::Line(iv)) => iv
                .intervals()
                .iter()
                .map(|&(a, b)| m.weight.interval_mass(a, b))
                .sum(),
            (MeasureSpec::Weighted(_), BoxUnion::Plane(_)) => {
                panic!("weighted measures are defined on the line only")
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            MeasureSpec::Lebesgue => 1.0,
            MeasureSpec::Weighted(m) => m.weight.density(x),
        }
    }

    /// `C_{μ,a}`: `a^n` for Lebesgue, `a^{np}[w]_{A_p}` for an `A_p` weight.
    pub fn doubling_constant(&self, a: f64, dim: usize) -> f64 {
        match self {
            MeasureSpec::Lebesgue => a.powi(dim as i32),
            MeasureSpec::Weighted(m) => a.powf(dim as f64 * m.p()) * m.ap(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            MeasureSpec::Lebesgue => "lebesgue".into(),
            MeasureSpec::Weighted(m) => m.weight.label(),
        }
    }
}
