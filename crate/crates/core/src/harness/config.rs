//! TOML experiment configuration. Every section is optional except
//! `[experiment]`; unknown keys are rejected.

use serde::Deserialize;

use super::HarnessError;
use crate::geometry::{DEFAULT_FLOOR_DEPTH_1D, DEFAULT_FLOOR_DEPTH_2D};
use crate::stepfn::{CorpusSpec, GridSpec};
use crate::weights::{CubeFamily, Weight};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub operator: OperatorSection,
    #[serde(default)]
    pub lambda: LambdaSection,
    #[serde(default)]
    pub corpus: CorpusSection,
    #[serde(default)]
    pub weight: WeightSection,
    #[serde(default)]
    pub whitney: WhitneySection,
    #[serde(default)]
    pub audit: AuditSection,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub golden: GoldenSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub id: String,
    /// Report path used when `--out` is absent; stdout when both are.
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub dim: usize,
    pub half_width: f64,
    pub level: i32,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            dim: 1,
            half_width: 1.0,
            level: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSection {
    /// Only `"hilbert"` is available.
    pub kind: String,
    /// Random samples per axiom and evaluation points per function.
    pub samples: usize,
    pub seed: u64,
}

impl Default for OperatorSection {
    fn default() -> Self {
        OperatorSection {
            kind: "hilbert".into(),
            samples: 1000,
            seed: 0,
        }
    }
}

/// `count` levels `2^t` for `t` evenly spaced in `[log2_min, log2_max]`,
/// unless `values` lists them explicitly.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaSection {
    pub count: usize,
    pub log2_min: f64,
    pub log2_max: f64,
    pub values: Option<Vec<f64>>,
    /// Adds the levels just below every value of `f` (weak-norm only).
    pub augment: bool,
}

impl Default for LambdaSection {
    fn default() -> Self {
        LambdaSection {
            count: 5,
            log2_min: -2.0,
            log2_max: 2.0,
            values: None,
            augment: false,
        }
    }
}

impl LambdaSection {
    pub fn levels(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        if self.count == 1 {
            return vec![self.log2_min.exp2()];
        }
        let step = (self.log2_max - self.log2_min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| (self.log2_min + k as f64 * step).exp2())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    pub count: usize,
    pub seed: u64,
    pub value_max: f64,
    pub support_fraction: f64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        let d = CorpusSpec::default();
        CorpusSection {
            count: d.count,
            seed: d.seed,
            value_max: d.value_max,
            support_fraction: d.support_fraction,
        }
    }
}

impl CorpusSection {
    pub fn spec(&self) -> CorpusSpec {
        CorpusSpec {
            count: self.count,
            seed: self.seed,
            value_max: self.value_max,
            support_fraction: self.support_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightSection {
    /// `"one"`, `"power"` (one run per entry of `alphas`) or `"step"`.
    pub kind: String,
    pub alphas: Vec<f64>,
    pub p: f64,
    /// Finest level of the interval family for `[w]_{A_p}`.
    pub family_level: i32,
    /// Step weight values on `[-L, L)`; the length fixes the step level.
    pub step_values: Vec<f64>,
    pub step_tail: f64,
    /// Also compute the weighted three-term split in `theorem2`.
    pub split: bool,
}

impl Default for WeightSection {
    fn default() -> Self {
        WeightSection {
            kind: "one".into(),
            alphas: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            p: 2.0,
            family_level: 12,
            step_values: Vec::new(),
            step_tail: 1.0,
            split: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WhitneySection {
    /// Whitney floor for decompositions; defaults to the grid level.
    pub floor_level: Option<i32>,
    /// Floor depths below the alignment level swept by `whitney`.
    pub depths: Option<Vec<i32>>,
    pub sets: usize,
    pub seed: u64,
}

impl Default for WhitneySection {
    fn default() -> Self {
        WhitneySection {
            floor_level: None,
            depths: None,
            sets: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    pub seed: u64,
    pub lemma1_cases: usize,
    pub lemma1_bound: f64,
    pub lemma2_line_cases: usize,
    pub lemma2_plane_cases: usize,
    pub lemma2_plane_tolerance: f64,
    pub doubling_trials: usize,
    /// Relative slack on `‖Hf‖₂ ≤ ‖f‖₂` over the evaluation window.
    pub l2_slack: f64,
    pub oracle_tolerance: f64,
    pub flagged_fraction: f64,
}

impl Default for AuditSection {
    fn default() -> Self {
        AuditSection {
            seed: 0,
            lemma1_cases: 100,
            lemma1_bound: 0.7,
            lemma2_line_cases: 200,
            lemma2_plane_cases: 50,
            lemma2_plane_tolerance: 1e-3,
            doubling_trials: 1000,
            l2_slack: 0.05,
            oracle_tolerance: 1e-6,
            flagged_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub p: Vec<f64>,
    pub ap: Vec<f64>,
    /// Points of the log grid on `[1, 10^6]` for the monotonicity of h and k.
    pub grid_points: usize,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection {
            p: vec![1.1, 1.5, 2.0, 3.0, 5.0, 10.0],
            ap: vec![1.0, 1.5, 2.0, 5.0, 10.0, 100.0, 1e4, 1e6],
            grid_points: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoldenSection {
    pub tolerance: f64,
    pub quadrature_tolerance: f64,
    /// Compare only these columns and footers, at `override_tolerance` if set.
    pub columns: Option<Vec<String>>,
    pub override_tolerance: Option<f64>,
}

impl Default for GoldenSection {
    fn default() -> Self {
        GoldenSection {
            tolerance: 1e-9,
            quadrature_tolerance: 1e-5,
            columns: None,
            override_tolerance: None,
        }
    }
}

fn bad(field: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        line: None,
        reason: format!("`{field}`: {}", reason.into()),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config {
            line: e.span().map(|s| line_of(text, s.start)),
            reason: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let g = &self.grid;
        if !(1..=2).contains(&g.dim) {
            return Err(bad("grid.dim", "must be 1 or 2"));
        }
        if !(0..=22).contains(&g.level) {
            return Err(bad("grid.level", "must lie in 0..=22"));
        }
        self.grid_spec()?;
        if self.operator.kind != "hilbert" {
            return Err(bad("operator.kind", "only \"hilbert\" is available"));
        }
        if self.operator.samples == 0 {
            return Err(bad("operator.samples", "must be positive"));
        }
        let l = &self.lambda;
        if l.values.is_none() && l.count == 0 {
            return Err(bad("lambda.count", "must be positive"));
        }
        if !(l.log2_min.is_finite() && l.log2_max.is_finite() && l.log2_min <= l.log2_max) {
            return Err(bad("lambda.log2_min", "range must be finite and ordered"));
        }
        if self.lambda.levels().iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(bad("lambda.values", "levels must be positive and finite"));
        }
        let c = &self.corpus;
        if c.count == 0 {
            return Err(bad("corpus.count", "must be positive"));
        }
        if !(c.value_max > 0.0 && c.value_max.is_finite()) {
            return Err(bad("corpus.value_max", "must be positive"));
        }
        if !(c.support_fraction > 0.0 && c.support_fraction <= 1.0) {
            return Err(bad("corpus.support_fraction", "must lie in (0, 1]"));
        }
        let w = &self.weight;
        if !(w.p > 1.0 && w.p.is_finite()) {
            return Err(bad("weight.p", "must exceed 1"));
        }
        match w.kind.as_str() {
            "one" => {}
            "power" if w.alphas.is_empty() => return Err(bad("weight.alphas", "must not be empty")),
            "power" => {
                if w.alphas.iter().any(|a| !(*a >= 0.0 && *a < w.p - 1.0)) {
                    return Err(bad(
                        "weight.alphas",
                        "each alpha must lie in [0, p - 1) so that |x|^alpha is in A_p",
                    ));
                }
            }
            "step" => {
                self.step_weight()?;
            }
            other => return Err(bad("weight.kind", format!("unknown weight `{other}`"))),
        }
        if w.family_level < -20 || w.family_level > 24 {
            return Err(bad("weight.family_level", "must lie in -20..=24"));
        }
        if let Some(f) = self.whitney.floor_level {
            if f > g.level {
                return Err(bad("whitney.floor_level", "must not exceed grid.level"));
            }
        }
        if let Some(d) = &self.whitney.depths {
            if d.is_empty() || d.iter().any(|k| !(0..=16).contains(k)) {
                return Err(bad("whitney.depths", "depths must lie in 0..=16"));
            }
        }
        let a = &self.audit;
        for (name, v) in [
            ("audit.lemma1_bound", a.lemma1_bound),
            ("audit.lemma2_plane_tolerance", a.lemma2_plane_tolerance),
            ("audit.l2_slack", a.l2_slack),
            ("audit.oracle_tolerance", a.oracle_tolerance),
            ("audit.flagged_fraction", a.flagged_fraction),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(name, "must be nonnegative and finite"));
            }
        }
        let p = &self.params;
        if p.p.iter().any(|v| !(*v > 1.0 && v.is_finite())) {
            return Err(bad("params.p", "entries must exceed 1"));
        }
        if p.ap.iter().any(|v| !(*v >= 1.0 && v.is_finite())) {
            return Err(bad("params.ap", "entries must be at least 1"));
        }
        if p.grid_points < 2 {
            return Err(bad("params.grid_points", "must be at least 2"));
        }
        let gd = &self.golden;
        for (name, v) in [
            ("golden.tolerance", gd.tolerance),
            ("golden.quadrature_tolerance", gd.quadrature_tolerance),
            ("golden.override_tolerance", gd.override_tolerance.unwrap_or(0.0)),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(name, "must be nonnegative and finite"));
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec, HarnessError> {
        GridSpec::new(self.grid.dim, self.grid.half_width, self.grid.level)
            .map_err(|e| bad("grid", e.to_string()))
    }

    pub fn family(&self) -> Result<CubeFamily, HarnessError> {
        CubeFamily::new(self.grid.half_width, self.weight.family_level)
            .map_err(|e| bad("weight.family_level", e.to_string()))
    }

    fn step_weight(&self) -> Result<Weight, HarnessError> {
        let w = &self.weight;
        let n = w.step_values.len();
        let cells_per_unit = n as f64 / (2.0 * self.grid.half_width);
        let level = cells_per_unit.log2();
        if n == 0 || level.fract() != 0.0 {
            return Err(bad(
                "weight.step_values",
                "length must be 2·half_width·2^k for an integer k",
            ));
        }
        let grid = GridSpec::new(1, self.grid.half_width, level as i32)
            .map_err(|e| bad("weight.step_values", e.to_string()))?;
        Weight::step(grid, w.step_values.clone(), w.step_tail)
            .map_err(|e| bad("weight.step_values", e.to_string()))
    }

    /// The weights swept by weighted subcommands.
    pub fn weights(&self) -> Result<Vec<Weight>, HarnessError> {
        Ok(match self.weight.kind.as_str() {
            "power" => self
                .weight
                .alphas
                .iter()
                .map(|&a| Weight::power_law(a).map_err(|e| bad("weight.alphas", e.to_string())))
                .collect::<Result<_, _>>()?,
            "step" => vec![self.step_weight()?],
            _ => vec![Weight::ConstantOne],
        })
    }

    pub fn whitney_depths(&self) -> Vec<i32> {
        self.whitney.depths.clone().unwrap_or_else(|| {
            let top = if self.grid.dim == 1 {
                DEFAULT_FLOOR_DEPTH_1D
            } else {
                DEFAULT_FLOOR_DEPTH_2D
            };
            (1..=top).step_by(2).chain([top]).collect::<std::collections::BTreeSet<_>>().into_iter().collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::parse("[experiment]\nid = \"t\"\n").unwrap();
        assert_eq!(c.grid, GridSection::default());
        assert_eq!(c.lambda.levels(), vec![0.25, 0.5, 1.0, 2.0, 4.0]);
        assert_eq!(c.whitney_depths(), vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn unknown_key_names_the_line() {
        let err = ExperimentConfig::parse("[experiment]\nid = \"t\"\n\n[grid]\nlevle = 3\n").unwrap_err();
        match err {
            HarnessError::Config { line, reason } => {
                assert_eq!(line, Some(5));
                assert!(reason.contains("levle"), "{reason}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn out_of_range_values() {
        for bad in [
            "[grid]\ndim = 3",
            "[weight]\nkind = \"power\"\nalphas = [1.5]",
            "[lambda]\nvalues = [0.0]",
            "[weight]\nkind = \"step\"\nstep_values = [1.0, 2.0, 3.0]",
        ] {
            let text = format!("[experiment]\nid = \"t\"\n{bad}\n");
            assert!(ExperimentConfig::parse(&text).is_err(), "{bad}");
        }
    }
}
