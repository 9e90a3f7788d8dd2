//! Good/bad split of a nonnegative step function at height `λ` with
//! cancellation sets of prescribed measure, and the three-term bound for the
//! bad part.

mod experiments;
mod radius;
mod split;

pub use experiments::{
    theorem1_experiment, theorem2_envelope, theorem2_experiment, Theorem1Row, Theorem2Report,
    Theorem2Row,
};
pub use split::{split_terms, SplitReport, Transformed};

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::geometry::{whitney, BoxUnion, Cube, DyadicCube, WhitneyDecomposition};
use crate::stepfn::StepFunction;
use crate::weights::MeasureSpec;

const MEASURE_TOL: f64 = 1e-9;

/// `b_i = f·1_{Q_i}` together with its cancellation set `E_i`.
#[derive(Debug, Clone)]
pub struct BadPart {
    pub cube: DyadicCube,
    pub flagged: bool,
    pub part: StepFunction,
    pub center: Vec<f64>,
    /// `∫ b_i dμ`
    pub mass: f64,
    /// Side of `Q(c_i, r_i)`.
    pub radius: f64,
    /// `Q(c_i, r_i) ∖ ⋃_{k<i} E_k`
    pub cancel: BoxUnion,
    /// `μ(E_i)`
    pub cancel_measure: f64,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub lambda: f64,
    pub mu: MeasureSpec,
    pub omega: BoxUnion,
    pub whitney: WhitneyDecomposition,
    pub good: StepFunction,
    pub bad_parts: Vec<BadPart>,
    /// `⋃ E_i`
    pub cancel: BoxUnion,
    /// `⋃ Q(c_i, 2√n r_i)`
    pub cancel_star: BoxUnion,
}

fn dilation(dim: usize) -> f64 {
    2.0 * (dim as f64).sqrt()
}

/// Decomposes `f ≥ 0` at height `λ`. The Whitney floor defaults to the grid
/// level and may not be finer.
pub fn decompose(
    f: &StepFunction,
    lambda: f64,
    mu: &MeasureSpec,
    floor_level: Option<i32>,
) -> Result<Decomposition> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    mu.check_dim(f.dim())?;
    if let Some(v) = f.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Hypothesis(format!(
            "f must be nonnegative, found value {v}"
        )));
    }
    let grid = f.grid().clone();
    let floor = floor_level.unwrap_or(grid.level());
    if floor > grid.level() {
        return Err(invalid(
            "floor_level",
            format!("must not exceed the grid level {}", grid.level()),
        ));
    }
    let dim = f.dim();
    let omega = f.superlevel(lambda, false);
    let wd = whitney(&omega, floor)?;
    let good = f.map(|v| if v > lambda { 0.0 } else { v });
    let mut bad_parts = Vec::with_capacity(wd.len());
    let mut cancel = BoxUnion::empty(dim)?;
    let mut star_boxes = Vec::new();
    for wc in &wd.cubes {
        let qbox = wc.cube.to_box();
        let part = f.restrict(&BoxUnion::from_box(qbox));
        let mass = part.integral(mu)?;
        let center = wc.cube.center()[..dim].to_vec();
        let solved = radius::solve_radius(mu, &center, mass / lambda, &cancel)?;
        cancel = cancel.union(&solved.set)?;
        if solved.r > 0.0 {
            star_boxes.push(Cube::new(&center, dilation(dim) * solved.r)?.to_box());
        }
        bad_parts.push(BadPart {
            cube: wc.cube,
            flagged: wc.flagged,
            part,
            center,
            mass,
            radius: solved.r,
            cancel: solved.set,
            cancel_measure: solved.mass,
        });
    }
    Ok(Decomposition {
        lambda,
        mu: mu.clone(),
        omega,
        whitney: wd,
        good,
        bad_parts,
        cancel,
        cancel_star: BoxUnion::from_boxes(dim, &star_boxes)?,
    })
}

/// Outcome of every structural check on a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionAudit {
    pub reconstruction_exact: bool,
    pub good_max: f64,
    pub cube_mass: f64,
    pub cube_mass_bound: f64,
    pub max_measure_error: f64,
    pub cancel_disjoint: bool,
    pub max_mean_residual: f64,
    pub inclusion_ok: bool,
    pub flagged: usize,
    pub parts: usize,
}

impl DecompositionAudit {
    pub fn failures(&self, lambda: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.reconstruction_exact {
            out.push("reconstruction");
        }
        if self.good_max > lambda {
            out.push("good part exceeds lambda");
        }
        if self.cube_mass > self.cube_mass_bound {
            out.push("cube mass");
        }
        if self.max_measure_error > MEASURE_TOL {
            out.push("cancellation measure");
        }
        if !self.cancel_disjoint {
            out.push("cancellation sets overlap");
        }
        if self.max_mean_residual > MEASURE_TOL {
            out.push("mean zero");
        }
        if !self.inclusion_ok {
            out.push("inclusion");
        }
        out
    }
}

impl Decomposition {
    pub fn audit(&self, f: &StepFunction) -> Result<DecompositionAudit> {
        let mu = &self.mu;
        let mut sum = self.good.values().to_vec();
        for b in &self.bad_parts {
            for (s, v) in sum.iter_mut().zip(b.part.values()) {
                *s += v;
            }
        }
        let reconstruction_exact = sum == f.values();
        let cube_mass: f64 = self
            .bad_parts
            .iter()
            .map(|b| mu.box_mass(&b.cube.to_box()))
            .sum();
        let cube_mass_bound = f.l1_norm(mu)? / self.lambda;
        let mut max_measure_error: f64 = 0.0;
        let mut max_mean_residual: f64 = 0.0;
        let mut cancel_disjoint = true;
        let mut seen = BoxUnion::empty(f.dim())?;
        for b in &self.bad_parts {
            let target = b.mass / self.lambda;
            let m = mu.measure(&b.cancel);
            if target > 0.0 {
                max_measure_error = max_measure_error.max((m - target).abs() / target);
                max_mean_residual =
                    max_mean_residual.max((b.mass - self.lambda * m).abs() / b.mass);
            } else if m != 0.0 {
                max_measure_error = f64::INFINITY;
            }
            cancel_disjoint &= seen.intersection(&b.cancel)?.is_empty();
            seen = seen.union(&b.cancel)?;
        }
        let cover = self.omega.union(&self.cancel_star)?;
        let factor = dilation(f.dim());
        let inclusion_ok = self.bad_parts.iter().filter(|b| !b.flagged).all(|b| {
            let q = b.cube.to_cube().dilate(factor).expect("positive side");
            let inner = cover.contains_box(&q.to_box());
            let outer = b.radius == 0.0
                || cover.contains_box(
                    &Cube::new(&b.center, factor * b.radius)
                        .expect("positive radius")
                        .to_box(),
                );
            inner && outer
        });
        Ok(DecompositionAudit {
            reconstruction_exact,
            good_max: self.good.max_abs(),
            cube_mass,
            cube_mass_bound,
            max_measure_error,
            cancel_disjoint,
            max_mean_residual,
            inclusion_ok,
            flagged: self.bad_parts.iter().filter(|b| b.flagged).count(),
            parts: self.bad_parts.len(),
        })
    }

    /// `μ(E)`
    pub fn cancel_measure(&self) -> f64 {
        self.mu.measure(&self.cancel)
    }

    /// Line-oriented text form: one `part` line per cube followed by its `E_i` boxes.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let dim = self.omega.dim();
        writeln!(s, "lambda {:.16e}", self.lambda).unwrap();
        writeln!(s, "measure {}", self.mu.label()).unwrap();
        writeln!(s, "omega {:.16e}", self.mu.measure(&self.omega)).unwrap();
        writeln!(s, "parts {}", self.bad_parts.len()).unwrap();
        for (i, b) in self.bad_parts.iter().enumerate() {
            let idx: Vec<String> = b.cube.index[..dim].iter().map(|k| k.to_string()).collect();
            writeln!(
                s,
                "part {i} level {} index {} flagged {} a {:.16e} r {:.16e}",
                b.cube.level,
                idx.join(" "),
                u8::from(b.flagged),
                b.mass,
                b.radius
            )
            .unwrap();
            for e in b.cancel.boxes() {
                let coords: Vec<String> = (0..dim)
                    .flat_map(|k| [e.lo[k], e.hi[k]])
                    .map(|v| format!("{v:.16e}"))
                    .collect();
                writeln!(s, "  e {}", coords.join(" ")).unwrap();
            }
        }
        writeln!(s, "cancel {:.16e}", self.cancel_measure()).unwrap();
        writeln!(s, "cancel_star {:.16e}", self.mu.measure(&self.cancel_star)).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::GridSpec;

    fn line(level: i32) -> GridSpec {
        GridSpec::new(1, 2.0, level).unwrap()
    }

    #[test]
    fn below_lambda_is_all_good() {
        let f = StepFunction::from_fn(line(4), |x| if x[0].abs() < 1.0 { 0.5 } else { 0.0 }).unwrap();
        let d = decompose(&f, 1.0, &MeasureSpec::Lebesgue, None).unwrap();
        assert!(d.omega.is_empty() && d.bad_parts.is_empty() && d.cancel.is_empty());
        assert_eq!(d.good, f);
    }

    #[test]
    fn box_of_height_two() {
        let f = StepFunction::from_fn(line(5), |x| if (0.0..1.0).contains(&x[0]) { 2.0 } else { 0.0 }).unwrap();
        let d = decompose(&f, 1.0, &MeasureSpec::Lebesgue, None).unwrap();
        assert_eq!(d.omega.intervals().unwrap(), &[(0.0, 1.0)]);
        let total: f64 = d.bad_parts.iter().map(|b| b.mass).sum();
        assert_eq!(total, 2.0);
        assert!((d.cancel_measure() - 2.0).abs() < 1e-12);
        let a = d.audit(&f).unwrap();
        assert!(a.failures(1.0).is_empty(), "{a:?}");
    }

    #[test]
    fn single_part_radius() {
        // one cell of height 16 and width 1/32 carries mass 0.5
        let f = StepFunction::from_fn(line(5), |x| if (0.0..1.0 / 32.0).contains(&x[0]) { 16.0 } else { 0.0 }).unwrap();
        let d = decompose(&f, 1.0, &MeasureSpec::Lebesgue, None).unwrap();
        assert_eq!(d.bad_parts.len(), 1);
        assert!((d.bad_parts[0].radius - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_and_fine_floor() {
        let f = StepFunction::from_fn(line(3), |x| x[0]).unwrap();
        assert!(matches!(
            decompose(&f, 1.0, &MeasureSpec::Lebesgue, None),
            Err(Error::Hypothesis(_))
        ));
        let f = f.map(f64::abs);
        assert!(decompose(&f, 1.0, &MeasureSpec::Lebesgue, Some(4)).is_err());
    }

    #[test]
    fn plane_audit() {
        let g = GridSpec::new(2, 1.0, 3).unwrap();
        let f = StepFunction::from_fn(g, |x| if x[0].abs() < 0.5 && x[1].abs() < 0.25 { 3.0 } else { 0.2 }).unwrap();
        let d = decompose(&f, 1.0, &MeasureSpec::Lebesgue, None).unwrap();
        let a = d.audit(&f).unwrap();
        assert!(a.failures(1.0).is_empty(), "{a:?}");
        assert!(d.dump().starts_with("lambda 1.0000000000000000e0\n"));
    }
}
