use super::gauss::GL3;
use super::CzKernel;
use crate::error::{invalid, Error, Result};
use crate::stepfn::{GridSpec, StepFunction};

/// Source cells closer than this many widths use the closed-form cell integral.
pub const NEAR_CELLS: f64 = 10.0;

fn check_inputs<K: CzKernel + ?Sized>(k: &K, f: &StepFunction, eps: f64) -> Result<()> {
    if k.dim() != 1 || f.dim() != 1 {
        return Err(Error::LineOnly {
            what: "operator application",
            dim: f.dim().max(k.dim()),
        });
    }
    let h = f.grid().cell_side();
    if !(eps >= h) {
        return Err(invalid(
            "eps",
            format!("truncation {eps} is below the source resolution {h}"),
        ));
    }
    Ok(())
}

fn truncated_at<K: CzKernel + ?Sized>(k: &K, f: &StepFunction, x: f64, eps: f64) -> f64 {
    let g = f.grid();
    let h = g.cell_side();
    let mut sum = 0.0;
    for (i, v) in f.support_cells() {
        let b = g.cell_box(i);
        let (a, b) = (b.lo[0], b.hi[0]);
        for (p, q) in [(a, b.min(x - eps)), (a.max(x + eps), b)] {
            if q <= p {
                continue;
            }
            let dist = if x < p { p - x } else { x - q };
            let exact = if dist < NEAR_CELLS * h { k.cell_integral(x, p, q) } else { None };
            sum += v * exact.unwrap_or_else(|| GL3.integrate(p, q, |y| k.eval(&[x], &[y])));
        }
    }
    sum
}

/// `∫_{|x−y|>ε} K(x,y) f(y) dy` at each point of `xs`.
pub fn apply_at<K: CzKernel + ?Sized>(k: &K, f: &StepFunction, xs: &[f64], eps: f64) -> Result<Vec<f64>> {
    check_inputs(k, f, eps)?;
    Ok(xs.iter().map(|&x| truncated_at(k, f, x, eps)).collect())
}

/// Truncated operator sampled at the cell midpoints of `eval_grid`.
pub fn apply<K: CzKernel + ?Sized>(
    k: &K,
    f: &StepFunction,
    eval_grid: &GridSpec,
    eps: f64,
) -> Result<StepFunction> {
    if eval_grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: eval_grid.dim(),
        });
    }
    let xs: Vec<f64> = (0..eval_grid.cell_count())
        .map(|i| eval_grid.cell_center(i)[0])
        .collect();
    StepFunction::new(eval_grid.clone(), apply_at(k, f, &xs, eps)?)
}
