use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cases::{point_off_jumps, random_cubes, random_mean_zero, random_open_set};
use super::config::ExperimentConfig;
use super::report::{Cell, CsvReport};
use super::{HarnessError, Outcome, Subcommand};
use crate::decomposition::{decompose, theorem1_experiment, theorem2_experiment};
use crate::geometry::{lemma2_check, lemma2_dilation_witness, whitney, BoxUnion};
use crate::operators::{
    apply_at, hilbert_exact, kernel_axiom_report, lemma1_tail, CzKernel, EvalWindow, HilbertKernel,
    JumpDensity,
};
use crate::stepfn::{corpus, weak_l1_norm, StepFunction};
use crate::weights::{
    ap_constant, choose_r, h_func, k_func, weighted_doubling_check, MeasureSpec, Weight,
    WeightedMeasure,
};

type Run = Result<Outcome, HarnessError>;

pub(super) fn dispatch(cmd: Subcommand, cfg: &ExperimentConfig) -> Run {
    match cmd {
        Subcommand::Whitney => run_whitney(cfg),
        Subcommand::Decompose => run_decompose(cfg),
        Subcommand::WeakNorm => run_weak_norm(cfg),
        Subcommand::Hilbert => run_hilbert(cfg),
        Subcommand::Lemma1 => run_lemma1(cfg),
        Subcommand::Lemma2 => run_lemma2(cfg),
        Subcommand::Ap => run_ap(cfg),
        Subcommand::Params => run_params(cfg),
        Subcommand::Theorem1 => run_theorem1(cfg),
        Subcommand::Theorem2 => run_theorem2(cfg),
        Subcommand::Axioms => run_axioms(cfg),
    }
}

fn line_only(cfg: &ExperimentConfig, what: &str) -> Result<(), HarnessError> {
    if cfg.grid.dim != 1 {
        return Err(HarnessError::Config {
            line: None,
            reason: format!("`grid.dim`: {what} runs on the line only"),
        });
    }
    Ok(())
}

fn measures(cfg: &ExperimentConfig) -> Result<Vec<MeasureSpec>, HarnessError> {
    if cfg.weight.kind == "one" {
        return Ok(vec![MeasureSpec::Lebesgue]);
    }
    line_only(cfg, "a weighted measure")?;
    let family = cfg.family()?;
    cfg.weights()?
        .into_iter()
        .map(|w| Ok(MeasureSpec::Weighted(WeightedMeasure::new(w, cfg.weight.p, &family)?)))
        .collect()
}

fn finish(report: CsvReport, failures: Vec<String>) -> Run {
    let mut report = report;
    report.footer("failures", failures.len());
    Ok(Outcome { report, failures })
}

fn run_whitney(cfg: &ExperimentConfig) -> Run {
    let grid = cfg.grid_spec()?;
    let depths = cfg.whitney_depths();
    let default_depth = *depths.iter().max().expect("nonempty depths");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.whitney.seed);
    let sets: Vec<BoxUnion> = (0..cfg.whitney.sets).map(|_| random_open_set(&grid, &mut rng)).collect();
    let mut report = CsvReport::new(&[
        "set_id", "depth", "floor_level", "cubes", "flagged", "flagged_fraction", "min_ratio",
        "max_ratio", "cover_exact", "bracket_ok",
    ]);
    let mut failures = Vec::new();
    let mut worst_fraction: f64 = 0.0;
    for (i, omega) in sets.iter().enumerate() {
        let align = omega.dyadic_level().unwrap_or(0).max(0);
        let mut prev = f64::INFINITY;
        for &d in &depths {
            let wd = whitney(omega, align + d)?;
            let a = wd.audit();
            let frac = a.flagged_measure / omega.measure();
            if !(a.cover_exact && a.disjoint) {
                failures.push(format!("set {i} depth {d}: cover is not exact"));
            }
            if !a.bracket_ok {
                failures.push(format!("set {i} depth {d}: Whitney bracket violated"));
            }
            if frac > prev {
                failures.push(format!("set {i} depth {d}: flagged mass increased"));
            }
            if d == default_depth {
                worst_fraction = worst_fraction.max(frac);
                if frac > cfg.audit.flagged_fraction {
                    failures.push(format!("set {i}: flagged fraction {frac} at the default floor"));
                }
            }
            prev = frac;
            report.push(vec![
                i.into(),
                d.into(),
                (align + d).into(),
                wd.len().into(),
                a.flagged_count.into(),
                frac.into(),
                a.min_dist_ratio.into(),
                a.max_dist_ratio.into(),
                (a.cover_exact && a.disjoint).into(),
                a.bracket_ok.into(),
            ]);
        }
    }
    report.footer("max_flagged_fraction", worst_fraction);
    finish(report, failures)
}

fn run_decompose(cfg: &ExperimentConfig) -> Run {
    let grid = cfg.grid_spec()?;
    let fs = corpus(&grid, &cfg.corpus.spec())?;
    let lambdas = cfg.lambda.levels();
    let mut report = CsvReport::new(&[
        "measure", "f_id", "lambda", "parts", "flagged", "omega", "cube_mass", "cube_bound",
        "cancel", "max_measure_error", "max_mean_residual", "good_max", "reconstruction",
        "inclusion", "pass",
    ]);
    let mut failures = Vec::new();
    for mu in measures(cfg)? {
        let rows: Vec<_> = fs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                lambdas
                    .iter()
                    .map(|&lambda| {
                        let d = decompose(f, lambda, &mu, cfg.whitney.floor_level)?;
                        let a = d.audit(f)?;
                        Ok((i, lambda, mu.measure(&d.omega), d.cancel_measure(), a))
                    })
                    .collect::<crate::Result<Vec<_>>>()
            })
            .collect::<crate::Result<Vec<_>>>()?;
        for (i, lambda, omega, cancel, a) in rows.into_iter().flatten() {
            let bad = a.failures(lambda);
            for b in &bad {
                failures.push(format!("{} f {i} lambda {lambda}: {b}", mu.label()));
            }
            report.push(vec![
                mu.label().into(),
                i.into(),
                lambda.into(),
                a.parts.into(),
                a.flagged.into(),
                omega.into(),
                a.cube_mass.into(),
                a.cube_mass_bound.into(),
                cancel.into(),
                a.max_measure_error.into(),
                a.max_mean_residual.into(),
                a.good_max.into(),
                a.reconstruction_exact.into(),
                a.inclusion_ok.into(),
                bad.is_empty().into(),
            ]);
        }
    }
    finish(report, failures)
}

fn run_weak_norm(cfg: &ExperimentConfig) -> Run {
    let grid = cfg.grid_spec()?;
    let fs = corpus(&grid, &cfg.corpus.spec())?;
    let lambdas = cfg.lambda.levels();
    let mut report = CsvReport::new(&["measure", "f_id", "l1", "weak_norm", "argmax", "ratio", "monotone"]);
    let mut failures = Vec::new();
    for mu in measures(cfg)? {
        for (i, f) in fs.iter().enumerate() {
            let d = weak_l1_norm(f, &lambdas, &mu, cfg.lambda.augment)?;
            let l1 = f.l1_norm(&mu)?;
            let ratio = d.weak_norm / l1;
            if ratio > 1.0 + 1e-12 {
                failures.push(format!("f {i}: weak norm exceeds the L1 norm"));
            }
            if !d.is_monotone() {
                failures.push(format!("f {i}: distribution function is not monotone"));
            }
            report.push(vec![
                mu.label().into(),
                i.into(),
                l1.into(),
                d.weak_norm.into(),
                d.argmax.into(),
                ratio.into(),
                d.is_monotone().into(),
            ]);
        }
    }
    finish(report, failures)
}

/// Cell-midpoint samples of `Tf` over the evaluation window, truncated at one cell.
fn window_l2(f: &StepFunction) -> crate::Result<f64> {
    let w = EvalWindow::around(f.grid());
    let xs: Vec<f64> = (0..w.count).map(|m| w.point(m)).collect();
    let h = f.grid().cell_side();
    let out = apply_at(&HilbertKernel::default(), f, &xs, h)?;
    Ok((out.iter().map(|v| v * v).sum::<f64>() * w.step).sqrt())
}

fn run_hilbert(cfg: &ExperimentConfig) -> Run {
    line_only(cfg, "the Hilbert transform")?;
    let grid = cfg.grid_spec()?;
    let fs = corpus(&grid, &cfg.corpus.spec())?;
    let h = grid.cell_side();
    let samples = cfg.operator.samples;
    let seed = cfg.operator.seed;
    let rows: Vec<_> = fs
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let jumps: Vec<f64> = JumpDensity::from_step(f)?.jumps().into_iter().map(|j| j.0).collect();
            let w = EvalWindow::around(f.grid());
            let xs: Vec<f64> = (0..samples)
                .filter_map(|_| point_off_jumps(&jumps, h, w.lo(), w.hi(), &mut rng))
                .collect();
            let approx = apply_at(&HilbertKernel::default(), f, &xs, h)?;
            let mut err: f64 = 0.0;
            for (x, a) in xs.iter().zip(&approx) {
                // the truncation removes (x − h, x + h), on which f is constant
                err = err.max((a - hilbert_exact(f, *x)?).abs());
            }
            Ok((i, f.l2_norm(), window_l2(f)?, xs.len(), err))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut report = CsvReport::new(&["f_id", "l2", "l2_window", "l2_ratio", "points", "max_error"])
        .with_quadrature_columns(&["l2_window", "l2_ratio", "max_error"]);
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut worst_err: f64 = 0.0;
    for (i, l2, out, n, err) in rows {
        let ratio = out / l2;
        worst_ratio = worst_ratio.max(ratio);
        worst_err = worst_err.max(err);
        if ratio > 1.0 + cfg.audit.l2_slack {
            failures.push(format!("f {i}: L2 ratio {ratio}"));
        }
        if err > cfg.audit.oracle_tolerance {
            failures.push(format!("f {i}: quadrature differs from the exact transform by {err}"));
        }
        report.push(vec![i.into(), l2.into(), out.into(), ratio.into(), n.into(), err.into()]);
    }
    report.footer("max_l2_ratio", worst_ratio);
    report.footer("max_error", worst_err);
    finish(report, failures)
}

fn run_lemma1(cfg: &ExperimentConfig) -> Run {
    line_only(cfg, "the tail estimate")?;
    let grid = cfg.grid_spec()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.audit.seed);
    let cases: Vec<_> = (0..cfg.audit.lemma1_cases).map(|_| random_mean_zero(&grid, &mut rng)).collect();
    let k = HilbertKernel::default();
    let tails = cases
        .par_iter()
        .map(|(f, q)| lemma1_tail(&k, f, q))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut report = CsvReport::new(&["case", "center", "side", "l1", "quadrature", "remainder", "tail", "ratio"])
        .with_quadrature_columns(&["quadrature", "tail", "ratio"]);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, ((_, q), t)) in cases.iter().zip(&tails).enumerate() {
        worst = worst.max(t.ratio());
        if t.ratio() > cfg.audit.lemma1_bound {
            failures.push(format!("case {i}: tail ratio {}", t.ratio()));
        }
        report.push(vec![
            i.into(),
            q.center()[0].into(),
            q.side().into(),
            t.l1.into(),
            t.quadrature.into(),
            t.remainder.into(),
            t.tail.into(),
            t.ratio().into(),
        ]);
    }
    report.footer("max_ratio", worst);
    report.footer("smooth_const", k.smooth_const());
    finish(report, failures)
}

fn run_lemma2(cfg: &ExperimentConfig) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.audit.seed);
    let mut line_measures = vec![MeasureSpec::Lebesgue];
    if cfg.weight.kind != "one" {
        line_measures.extend(measures(cfg)?);
    }
    let mut report = CsvReport::new(&[
        "case", "dim", "measure", "cubes", "a", "lhs", "rhs", "ratio", "holds", "witness",
    ]);
    let mut failures = Vec::new();
    let mut case = 0usize;
    let plan = [
        (1usize, cfg.audit.lemma2_line_cases, 1e-12),
        (2, cfg.audit.lemma2_plane_cases, cfg.audit.lemma2_plane_tolerance),
    ];
    for (dim, count, tol) in plan {
        for _ in 0..count {
            let cubes = random_cubes(dim, &mut rng);
            let a = rand::Rng::gen_range(&mut rng, 1.5..4.0);
            let witness = lemma2_dilation_witness(&cubes, a)?.iter().all(|t| t.contained());
            if dim == 1 && !witness {
                failures.push(format!("case {case}: dilation witness not contained"));
            }
            let mus: &[MeasureSpec] = if dim == 1 { &line_measures } else { &[MeasureSpec::Lebesgue] };
            for mu in mus {
                let c = lemma2_check(&cubes, a, mu)?;
                let holds = c.holds(tol);
                if !holds {
                    failures.push(format!("case {case} ({}): {} > {}", mu.label(), c.lhs, c.rhs));
                }
                report.push(vec![
                    case.into(),
                    dim.into(),
                    mu.label().into(),
                    cubes.len().into(),
                    a.into(),
                    c.lhs.into(),
                    c.rhs.into(),
                    (c.lhs / c.rhs).into(),
                    holds.into(),
                    witness.into(),
                ]);
            }
            case += 1;
        }
    }
    finish(report, failures)
}

fn run_ap(cfg: &ExperimentConfig) -> Run {
    let family = cfg.family()?;
    let p = cfg.weight.p;
    let mut report = CsvReport::new(&[
        "weight", "p", "ap", "cubes", "argmax_lo", "argmax_hi", "doubling_max_ratio", "pass",
    ]);
    let mut failures = Vec::new();
    let mut weights = cfg.weights()?;
    if !weights.contains(&Weight::ConstantOne) {
        weights.insert(0, Weight::ConstantOne);
    }
    for w in &weights {
        let est = ap_constant(w, p, &family)?;
        let audit = weighted_doubling_check(w, p, est.value, cfg.audit.doubling_trials, cfg.audit.seed);
        let pass = est.value >= 1.0 && audit.passed();
        if !pass {
            failures.push(format!("{}: ap {} doubling {}", w.label(), est.value, audit.max_ratio));
        }
        report.push(vec![
            w.label().into(),
            p.into(),
            est.value.into(),
            est.cubes_examined.into(),
            est.argmax.0.into(),
            est.argmax.1.into(),
            audit.max_ratio.into(),
            pass.into(),
        ]);
    }
    report.footer("family", family.describe());
    finish(report, failures)
}

fn run_params(cfg: &ExperimentConfig) -> Run {
    let mut report = CsvReport::new(&[
        "p", "ap", "m", "r", "r_conj", "r_pow", "rr_envelope", "ap_pow", "ap_envelope", "pass",
    ]);
    let mut failures = Vec::new();
    for &p in &cfg.params.p {
        for &ap in &cfg.params.ap {
            let s = choose_r(p, ap)?;
            let pass = s.invariants_hold();
            for (name, ok) in s.checks() {
                if !ok {
                    failures.push(format!("p {p} ap {ap}: {name}"));
                }
            }
            report.push(vec![
                p.into(),
                ap.into(),
                s.m.into(),
                s.r.into(),
                s.r_conj.into(),
                s.bound_rr.into(),
                s.rr_envelope().into(),
                s.bound_ap.into(),
                s.ap_envelope().into(),
                pass.into(),
            ]);
        }
    }
    let n = cfg.params.grid_points;
    let xs: Vec<f64> = (0..n).map(|i| 10f64.powf(6.0 * i as f64 / (n - 1) as f64)).collect();
    let hs = xs.iter().map(|&x| h_func(x)).collect::<crate::Result<Vec<_>>>()?;
    let ks = xs.iter().map(|&x| k_func(x)).collect::<crate::Result<Vec<_>>>()?;
    let h_ok = hs.iter().all(|v| *v <= 4.0) && hs.windows(2).all(|w| w[1] <= w[0]);
    let k_ok = ks.iter().all(|v| (1.0..=std::f64::consts::E).contains(v)) && ks.windows(2).all(|w| w[1] >= w[0]);
    if !h_ok {
        failures.push("h is not bounded by 4 and non-increasing".into());
    }
    if !k_ok {
        failures.push("k is not within [1, e] and non-decreasing".into());
    }
    report.footer("h(1)", h_func(1.0)?);
    report.footer("k(1)", k_func(1.0)?);
    report.footer("h_nonincreasing", h_ok);
    report.footer("k_nondecreasing", k_ok);
    finish(report, failures)
}

fn run_theorem1(cfg: &ExperimentConfig) -> Run {
    line_only(cfg, "theorem1")?;
    let grid = cfg.grid_spec()?;
    let fs = corpus(&grid, &cfg.corpus.spec())?;
    let rows = theorem1_experiment(&fs, &cfg.lambda.levels(), cfg.whitney.floor_level)?;
    let mut report = CsvReport::new(&[
        "f_id", "lambda", "lhs", "l1", "ratio", "good", "I", "II", "III", "total",
    ]);
    let mut failures = Vec::new();
    let mut sup: f64 = 0.0;
    let mut worst_total: f64 = 0.0;
    for r in &rows {
        let s = r.split;
        sup = sup.max(r.ratio);
        worst_total = worst_total.max(s.normalized_total());
        if !s.dominates() {
            failures.push(format!("f {} lambda {}: {} exceeds the split total {}", r.f_id, r.lambda, s.direct, s.total));
        }
        report.push(vec![
            r.f_id.into(),
            r.lambda.into(),
            r.measure.into(),
            r.l1.into(),
            r.ratio.into(),
            s.good_term.into(),
            s.term_i.into(),
            s.term_ii.into(),
            s.term_iii.into(),
            s.total.into(),
        ]);
    }
    report.footer("sup_ratio", sup);
    report.footer("max_total_ratio", worst_total);
    finish(report, failures)
}

fn run_theorem2(cfg: &ExperimentConfig) -> Run {
    line_only(cfg, "theorem2")?;
    let grid = cfg.grid_spec()?;
    let fs = corpus(&grid, &cfg.corpus.spec())?;
    let family = cfg.family()?;
    let lambdas = cfg.lambda.levels();
    let mut report = CsvReport::new(&[
        "weight", "p", "ap", "envelope", "f_id", "lambda", "measure", "l1", "normalized", "total",
        "dominates",
    ])
    .with_quadrature_columns(&["measure", "normalized", "total"]);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for w in cfg.weights()? {
        let rep = theorem2_experiment(
            &fs,
            &lambdas,
            &w,
            cfg.weight.p,
            &family,
            cfg.weight.split,
            cfg.whitney.floor_level,
        )?;
        worst = worst.max(rep.max_normalized());
        for r in &rep.rows {
            let (total, dom) = match r.split {
                Some(s) => {
                    if !s.dominates() {
                        failures.push(format!("{} f {} lambda {}: split does not dominate", w.label(), r.f_id, r.lambda));
                    }
                    (Cell::Float(s.total), Cell::Bool(s.dominates()))
                }
                None => (Cell::Text(String::new()), Cell::Text(String::new())),
            };
            report.push(vec![
                w.label().into(),
                cfg.weight.p.into(),
                rep.ap.value.into(),
                rep.envelope.into(),
                r.f_id.into(),
                r.lambda.into(),
                r.measure.into(),
                r.l1.into(),
                r.normalized.into(),
                total,
                dom,
            ]);
        }
    }
    report.footer("max_normalized", worst);
    finish(report, failures)
}

fn run_axioms(cfg: &ExperimentConfig) -> Run {
    let n = cfg.operator.samples;
    let seed = cfg.operator.seed;
    let h = HilbertKernel::default();
    // negative control: must fail the size audit
    let halved = HilbertKernel {
        size_const: h.size_const / 2.0,
        ..h
    };
    let kernels: [(&str, &HilbertKernel, bool); 2] = [("hilbert", &h, true), ("hilbert_halved_size", &halved, false)];
    let mut report = CsvReport::new(&[
        "kernel", "samples", "size_product", "size_ratio", "smooth_ratio", "passed", "expected",
    ]);
    let mut failures = Vec::new();
    for (name, k, expect) in kernels {
        let r = kernel_axiom_report(k, n, seed);
        if r.passed() != expect {
            failures.push(format!("{name}: axiom audit passed = {}, expected {expect}", r.passed()));
        }
        report.push(vec![
            name.into(),
            r.samples.into(),
            r.size_product.into(),
            r.size_ratio.into(),
            r.smooth_ratio.into(),
            r.passed().into(),
            expect.into(),
        ]);
    }
    finish(report, failures)
}
