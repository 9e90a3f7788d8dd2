use rayon::prelude::*;

use super::{decompose, SplitReport, Transformed};
use crate::error::Result;
use crate::stepfn::StepFunction;
use crate::weights::{ap_constant, ApEstimate, CubeFamily, MeasureSpec, Weight, WeightedMeasure};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Row {
    pub f_id: usize,
    pub lambda: f64,
    /// `|{|Tf| > λ}|`
    pub measure: f64,
    pub l1: f64,
    /// `λ·|{|Tf| > λ}| / ‖f‖₁`
    pub ratio: f64,
    pub split: SplitReport,
}

fn run_rows<R: Send>(
    corpus: &[StepFunction],
    row: impl Fn(usize, &StepFunction) -> Result<Vec<R>> + Sync,
) -> Result<Vec<R>> {
    let per_f: Vec<Result<Vec<R>>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| row(i, f))
        .collect();
    let mut out = Vec::new();
    for r in per_f {
        out.extend(r?);
    }
    Ok(out)
}

/// Weak-type ratios and split bounds for the Hilbert transform, one row per `(f, λ)`.
pub fn theorem1_experiment(
    corpus: &[StepFunction],
    lambdas: &[f64],
    floor_level: Option<i32>,
) -> Result<Vec<Theorem1Row>> {
    let mu = MeasureSpec::Lebesgue;
    run_rows(corpus, |f_id, f| {
        let t = Transformed::new(f, &mu)?;
        lambdas
            .iter()
            .map(|&lambda| {
                let dec = decompose(f, lambda, &mu, floor_level)?;
                let split = t.split(&dec)?;
                Ok(Theorem1Row {
                    f_id,
                    lambda,
                    measure: split.direct,
                    l1: t.l1(),
                    ratio: lambda * split.direct / t.l1(),
                    split,
                })
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Row {
    pub f_id: usize,
    pub lambda: f64,
    /// `w({|T(fw)|/w > λ})`
    pub measure: f64,
    /// `‖f‖_{L¹(w)}`
    pub l1: f64,
    /// `λ·measure / (‖f‖_{L¹(w)}·envelope)`
    pub normalized: f64,
    pub split: Option<SplitReport>,
}

#[derive(Debug, Clone)]
pub struct Theorem2Report {
    pub weight: Weight,
    pub ap: ApEstimate,
    /// `[w]_{A_p}·max{p, log(e + [w]_{A_p})}`
    pub envelope: f64,
    pub rows: Vec<Theorem2Row>,
}

impl Theorem2Report {
    pub fn max_normalized(&self) -> f64 {
        self.rows.iter().map(|r| r.normalized).fold(0.0, f64::max)
    }
}

pub fn theorem2_envelope(p: f64, ap: f64) -> f64 {
    ap * p.max((std::f64::consts::E + ap).ln())
}

/// Weighted weak-type measures normalized by the `A_p` envelope. With
/// `with_split` the weighted three-term bound is computed as well.
pub fn theorem2_experiment(
    corpus: &[StepFunction],
    lambdas: &[f64],
    w: &Weight,
    p: f64,
    family: &CubeFamily,
    with_split: bool,
    floor_level: Option<i32>,
) -> Result<Theorem2Report> {
    let ap = ap_constant(w, p, family)?;
    let envelope = theorem2_envelope(p, ap.value);
    let mu = MeasureSpec::Weighted(WeightedMeasure::with_estimate(w.clone(), ap.clone()));
    let rows = run_rows(corpus, |f_id, f| {
        let t = Transformed::new(f, &mu)?;
        lambdas
            .iter()
            .map(|&lambda| {
                let (measure, split) = if with_split {
                    let s = t.split(&decompose(f, lambda, &mu, floor_level)?)?;
                    (s.direct, Some(s))
                } else {
                    (t.superlevel_measure(lambda)?, None)
                };
                Ok(Theorem2Row {
                    f_id,
                    lambda,
                    measure,
                    l1: t.l1(),
                    normalized: lambda * measure / (t.l1() * envelope),
                    split,
                })
            })
            .collect()
    })?;
    Ok(Theorem2Report {
        weight: w.clone(),
        ap,
        envelope,
        rows,
    })
}
