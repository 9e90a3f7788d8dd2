use super::StepFunction;
use crate::error::{invalid, Result};
use crate::weights::MeasureSpec;

/// Augmented levels sit at `AUGMENT_FACTOR · v` for every distinct `|v|`.
pub const AUGMENT_FACTOR: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub lambdas: Vec<f64>,
    pub superlevel_measures: Vec<f64>,
    pub weak_norm: f64,
    /// Level at which `weak_norm` is attained.
    pub argmax: f64,
}

impl DistributionReport {
    pub fn products(&self) -> impl Iterator<Item = f64> + '_ {
        self.lambdas
            .iter()
            .zip(&self.superlevel_measures)
            .map(|(l, m)| l * m)
    }

    pub fn is_monotone(&self) -> bool {
        self.superlevel_measures.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `sup λ·μ({|f| > λ})` over `lambdas`, optionally augmented with the points
/// just below each distinct `|value|`, where the supremum of a step function is attained.
pub fn weak_l1_norm(
    f: &StepFunction,
    lambdas: &[f64],
    mu: &MeasureSpec,
    augment: bool,
) -> Result<DistributionReport> {
    if lambdas.is_empty() && !augment {
        return Err(invalid("lambdas", "empty level grid"));
    }
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(invalid("lambdas", "levels must be positive and finite"));
    }
    mu.check_dim(f.dim())?;
    let mut grid = lambdas.to_vec();
    if augment {
        grid.extend(
            f.values()
                .iter()
                .map(|v| v.abs())
                .filter(|v| *v > 0.0)
                .map(|v| AUGMENT_FACTOR * v),
        );
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        // f ≡ 0 with augmentation only
        grid.push(1.0);
    }

    // Distribution function from the sorted multiset of |values|.
    let masses: Vec<(f64, f64)> = {
        let mut m: Vec<(f64, f64)> = f
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| {
                let mass = match mu {
                    MeasureSpec::Lebesgue => f.grid().cell_volume(),
                    _ => mu.box_mass(&f.grid().cell_box(i)),
                };
                (v.abs(), mass)
            })
            .collect();
        m.sort_by(|a, b| b.0.total_cmp(&a.0));
        m
    };
    // grid ascending; sweep values descending from the largest level
    let mut measures = vec![0.0; grid.len()];
    let mut acc = 0.0;
    let mut k = 0;
    for (slot, &lam) in grid.iter().enumerate().rev() {
        while k < masses.len() && masses[k].0 > lam {
            acc += masses[k].1;
            k += 1;
        }
        measures[slot] = acc;
    }
    let (mut weak_norm, mut argmax) = (0.0, grid[0]);
    for (l, m) in grid.iter().zip(&measures) {
        if l * m > weak_norm {
            weak_norm = l * m;
            argmax = *l;
        }
    }
    Ok(DistributionReport {
        lambdas: grid,
        superlevel_measures: measures,
        weak_norm,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::GridSpec;

    fn steps(vals: &[(f64, f64, f64)]) -> StepFunction {
        let g = GridSpec::new(1, 4.0, 4).unwrap();
        StepFunction::from_fn(g, |x| {
            vals.iter()
                .filter(|(a, b, _)| x[0] >= *a && x[0] < *b)
                .map(|v| v.2)
                .sum()
        })
        .unwrap()
    }

    #[test]
    fn indicator_weak_norm() {
        let f = steps(&[(0.0, 1.0, 1.0)]);
        let r = weak_l1_norm(&f, &[0.5, 2.0], &MeasureSpec::Lebesgue, true).unwrap();
        assert!((r.weak_norm - 1.0).abs() < 1e-11);
        assert!(r.is_monotone());
    }

    #[test]
    fn two_plateaus() {
        // λ just below 1 gives 1·2, just below 2 gives 2·1
        let f = steps(&[(0.0, 1.0, 2.0), (1.0, 2.0, 1.0)]);
        let r = weak_l1_norm(&f, &[0.1], &MeasureSpec::Lebesgue, true).unwrap();
        assert!((r.weak_norm - 2.0).abs() < 1e-11, "{}", r.weak_norm);
    }

    #[test]
    fn homogeneity() {
        let f = steps(&[(0.0, 0.5, 3.0), (-1.0, 1.0, 1.0)]);
        let a = weak_l1_norm(&f, &[], &MeasureSpec::Lebesgue, true).unwrap();
        let b = weak_l1_norm(&f.scale(-2.5), &[], &MeasureSpec::Lebesgue, true).unwrap();
        assert!((b.weak_norm - 2.5 * a.weak_norm).abs() < 1e-12);
    }

    #[test]
    fn empty_grid_rejected() {
        let f = steps(&[]);
        assert!(weak_l1_norm(&f, &[], &MeasureSpec::Lebesgue, false).is_err());
        let r = weak_l1_norm(&f, &[], &MeasureSpec::Lebesgue, true).unwrap();
        assert_eq!(r.weak_norm, 0.0);
    }
}
