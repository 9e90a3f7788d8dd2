//! Library results against independent brute-force computations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weaktype::decomposition::{decompose, Transformed};
use weaktype::geometry::{
    dist_to_complement, lemma2_check, lemma2_dilation_witness, whitney, Aabb, BoxUnion, Cube,
    DyadicCube,
};
use weaktype::harness::cases::random_cubes;
use weaktype::operators::hilbert_exact;
use weaktype::stepfn::{corpus, CorpusSpec, GridSpec, StepFunction};
use weaktype::weights::{CubeFamily, MeasureSpec, Weight};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// endpoints on the 2^-10 lattice so that a 2^-20 raster is exact
fn lattice_intervals(r: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..r.gen_range(1..4))
        .map(|_| {
            let a = r.gen_range(-1024i32..1024);
            let b = a + r.gen_range(1..512);
            (a as f64 / 1024.0, b as f64 / 1024.0)
        })
        .collect()
}

fn raster_measure(sets: &[&[(f64, f64)]], keep: impl Fn(&[bool]) -> bool) -> f64 {
    let h = (-20f64).exp2();
    let n = (4.0 / h) as usize;
    let mut count = 0usize;
    let mut hit = vec![false; sets.len()];
    for m in 0..n {
        let x = -2.0 + (m as f64 + 0.5) * h;
        for (k, s) in sets.iter().enumerate() {
            hit[k] = s.iter().any(|&(a, b)| a <= x && x < b);
        }
        count += keep(&hit) as usize;
    }
    count as f64 * h
}

#[test]
fn inclusion_exclusion_on_random_pairs() {
    let mut r = rng(1);
    for case in 0..100 {
        let (ia, ib) = (lattice_intervals(&mut r), lattice_intervals(&mut r));
        let a = BoxUnion::from_intervals(ia.clone());
        let b = BoxUnion::from_intervals(ib.clone());
        let union = a.union(&b).unwrap().measure();
        let inter = a.intersection(&b).unwrap().measure();
        assert_eq!(union + inter, a.measure() + b.measure(), "case {case}");
        if case < 10 {
            let sets: [&[(f64, f64)]; 2] = [&ia, &ib];
            assert_eq!(union, raster_measure(&sets, |h| h[0] || h[1]));
            assert_eq!(inter, raster_measure(&sets, |h| h[0] && h[1]));
        }
    }
}

#[test]
fn l_shape_distance_matches_raster() {
    let omega = BoxUnion::from_boxes(
        2,
        &[Aabb::rect(0.0, 2.0, 0.0, 1.0), Aabb::rect(0.0, 1.0, 1.0, 2.0)],
    )
    .unwrap();
    let q = Cube::new(&[0.5, 0.75], 0.25).unwrap();
    let d = dist_to_complement(&q, &omega).unwrap();
    // complement pixels in a neighbourhood, resolution 2^-12
    let h = (-12f64).exp2();
    let qb = q.to_box();
    let mut best = f64::INFINITY;
    let n = (4.0 / h) as i64;
    for i in 0..n {
        let x = -1.0 + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = -1.0 + (j as f64 + 0.5) * h;
            if omega.contains_point(&[x, y]) {
                continue;
            }
            let dx = (qb.lo[0] - x).max(x - qb.hi[0]).max(0.0);
            let dy = (qb.lo[1] - y).max(y - qb.hi[1]).max(0.0);
            best = best.min(dx.hypot(dy));
        }
    }
    assert!((d - best).abs() <= h, "{d} vs {best}");
    assert!((d - 0.375).abs() < 1e-15);
}

#[test]
fn unit_interval_whitney_matches_exhaustive_search() {
    let omega = BoxUnion::from_intervals(vec![(0.0, 1.0)]);
    let floor = 10;
    let d = whitney(&omega, floor).unwrap();
    let passes = |k: i32, j: i64| {
        let s = (-(k as f64)).exp2();
        let (lo, hi) = (j as f64 * s, (j + 1) as f64 * s);
        2.0 * s <= lo.min(1.0 - hi)
    };
    let mut expect = Vec::new();
    for k in 0..=floor {
        for j in 0..(1i64 << k) {
            let ancestor_passes = (0..k).any(|a| passes(a, j >> (k - a)));
            if ancestor_passes {
                continue;
            }
            if passes(k, j) {
                expect.push((DyadicCube::new(k, &[j]).unwrap(), false));
            } else if k == floor {
                expect.push((DyadicCube::new(k, &[j]).unwrap(), true));
            }
        }
    }
    let mut got: Vec<_> = d.cubes.iter().map(|c| (c.cube, c.flagged)).collect();
    got.sort_by_key(|c| c.0);
    expect.sort_by_key(|c| c.0);
    assert_eq!(got, expect);
    let largest = got.iter().map(|c| c.0).min_by_key(|q| q.level).unwrap();
    assert_eq!(largest.level, 3);
}

#[test]
fn two_cube_dilation_values() {
    let cubes = [Cube::new(&[0.0], 1.0).unwrap(), Cube::new(&[0.6], 0.5).unwrap()];
    let c = lemma2_check(&cubes, 3.0, &MeasureSpec::Lebesgue).unwrap();
    // [-0.5, 0.85) and its dilate [-1.5, 1.5)
    assert!((c.rhs - 3.0 * 1.35).abs() < 1e-12);
    assert!((c.lhs - 3.0).abs() < 1e-12);
}

// exact y-lengths on x-columns through pixel centres
fn column_measure(rects: &[Aabb], h: f64) -> f64 {
    let x0 = rects.iter().map(|r| r.lo[0]).fold(f64::INFINITY, f64::min);
    let x1 = rects.iter().map(|r| r.hi[0]).fold(f64::NEG_INFINITY, f64::max);
    let n = ((x1 - x0) / h).ceil() as usize;
    let mut total = 0.0;
    for m in 0..n {
        let x = x0 + (m as f64 + 0.5) * h;
        let mut ys: Vec<(f64, f64)> = rects
            .iter()
            .filter(|r| r.lo[0] <= x && x < r.hi[0])
            .map(|r| (r.lo[1], r.hi[1]))
            .collect();
        ys.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut len = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for (a, b) in ys {
            cur = match cur {
                Some((c, d)) if a <= d => Some((c, d.max(b))),
                Some((c, d)) => {
                    len += d - c;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((c, d)) = cur {
            len += d - c;
        }
        total += len * h;
    }
    total
}

#[test]
fn plane_dilation_against_columns() {
    let mut r = rng(2);
    let h = (-11f64).exp2();
    for case in 0..50 {
        let cubes = random_cubes(2, &mut r);
        let a = [1.5, 2.0, 4.0][case % 3];
        let c = lemma2_check(&cubes, a, &MeasureSpec::Lebesgue).unwrap();
        assert!(c.lhs <= c.rhs * (1.0 + 1e-12), "case {case}");
        let dilated: Vec<Aabb> = cubes.iter().map(|q| q.dilate(a).unwrap().to_box()).collect();
        let slack: f64 = h * dilated.iter().map(|b| b.hi[1] - b.lo[1]).sum::<f64>();
        let oracle = column_measure(&dilated, h);
        assert!((c.lhs - oracle).abs() <= slack, "case {case}: {} vs {oracle}", c.lhs);
    }
}

#[test]
fn random_line_witnesses() {
    let mut r = rng(3);
    for case in 0..100 {
        let n = r.gen_range(1..=6);
        let cubes: Vec<Cube> = (0..n)
            .map(|_| Cube::new(&[r.gen_range(-1.0..1.0)], 10f64.powf(r.gen_range(-2.0..0.0))).unwrap())
            .collect();
        let a = r.gen_range(1.5..4.0);
        let w = lemma2_dilation_witness(&cubes, a).unwrap();
        assert!(w.iter().all(|t| t.contained()), "case {case}");
    }
}

#[test]
fn superlevel_matches_cell_scan() {
    let mut r = rng(4);
    let grid = GridSpec::new(1, 1.0, 8).unwrap();
    for _ in 0..20 {
        let values = (0..grid.cell_count()).map(|_| r.gen_range(-3.0..3.0)).collect();
        let f = StepFunction::new(grid.clone(), values).unwrap();
        let lambda = r.gen_range(0.0..2.5);
        let h = grid.cell_side();
        let above = f.values().iter().filter(|v| **v > lambda).count() as f64 * h;
        let above_abs = f.values().iter().filter(|v| v.abs() > lambda).count() as f64 * h;
        assert!((f.superlevel(lambda, false).measure() - above).abs() < 1e-12);
        assert!((f.superlevel(lambda, true).measure() - above_abs).abs() < 1e-12);
    }
}

#[test]
fn sqrt_weighted_integral() {
    let grid = GridSpec::new(1, 1.0, 6).unwrap();
    let f = StepFunction::indicator(grid, &BoxUnion::from_intervals(vec![(0.0, 1.0)]), 1.0).unwrap();
    let family = CubeFamily::new(1.0, 8).unwrap();
    let mu = MeasureSpec::weighted(Weight::power_law(0.5).unwrap(), 2.0, &family).unwrap();
    let exact = f.integral(&mu).unwrap();
    let n = 1_000_000;
    let riemann: f64 = (0..n).map(|m| ((m as f64 + 0.5) / n as f64).sqrt()).sum::<f64>() / n as f64;
    assert!((exact - 2.0 / 3.0).abs() < 1e-15);
    assert!((exact - riemann).abs() < 1e-8);
}

#[test]
fn sqrt_weight_doubling_at_origin() {
    let w = Weight::power_law(0.5).unwrap();
    let ap = 4.0 / 3.0;
    for a in [1.5, 2.0, 3.0, 8.0] {
        for r in [1e-3, 0.1, 1.0] {
            let small = w.interval_mass(-r / 2.0, r / 2.0);
            let big = w.interval_mass(-a * r / 2.0, a * r / 2.0);
            let closed = 2.0 * (r / 2.0f64).powf(1.5) / 1.5;
            assert!((small - closed).abs() <= 1e-15 * closed.max(1.0));
            let ratio = big / (a * a * ap * small);
            assert!((ratio - a.powf(1.5) / (a * a * ap)).abs() < 1e-12);
            assert!(ratio <= 1.0);
        }
    }
}

#[test]
fn hilbert_reference_values() {
    let grid = GridSpec::new(1, 2.0, 6).unwrap();
    let f = StepFunction::indicator(grid, &BoxUnion::from_intervals(vec![(-1.0, 1.0)]), 1.0).unwrap();
    // (1/π) ∫_{-1}^{1} dy/(3 − y), summed by the midpoint rule
    let n = 200_000;
    let quad: f64 = (0..n)
        .map(|m| 1.0 / (3.0 - (-1.0 + (m as f64 + 0.5) * 2.0 / n as f64)))
        .sum::<f64>()
        * 2.0
        / n as f64
        / PI;
    let at3 = hilbert_exact(&f, 3.0).unwrap();
    assert!((at3 - quad).abs() < 1e-9);
    assert!((at3 - 2f64.ln() / PI).abs() < 1e-15);
    assert!(hilbert_exact(&f, 0.0).unwrap().abs() < 1e-15);
    assert!(hilbert_exact(&f, 1.0).is_err());
}

#[test]
fn hilbert_far_field() {
    let grid = GridSpec::new(1, 1.0, 10).unwrap();
    for f in corpus(&grid, &CorpusSpec { count: 5, ..CorpusSpec::default() }).unwrap() {
        let mass = f.integral(&MeasureSpec::Lebesgue).unwrap() / PI;
        for x in [1e3, -1e3] {
            let v = x * hilbert_exact(&f, x).unwrap();
            assert!((v - mass).abs() <= 0.01 * mass, "{v} vs {mass}");
        }
    }
}

#[test]
fn box_of_height_two_baseline() {
    let grid = GridSpec::new(1, 2.0, 8).unwrap();
    let f = StepFunction::indicator(grid, &BoxUnion::from_intervals(vec![(0.0, 1.0)]), 2.0).unwrap();
    let mu = MeasureSpec::Lebesgue;
    let d = decompose(&f, 1.0, &mu, None).unwrap();
    let a: f64 = d.bad_parts.iter().map(|p| p.mass).sum();
    assert!((a - 2.0).abs() < 1e-12);
    assert!((d.cancel_measure() - 2.0).abs() < 1e-9);
    let s = Transformed::new(&f, &mu).unwrap().split(&d).unwrap();
    // |{|2·H1_[0,1)| > 1}| = 2/sinh(π/2)
    assert!((s.direct - 2.0 / (PI / 2.0).sinh()).abs() < 1e-9);
    assert!(s.dominates());
    let normalized = s.normalized_total();
    assert!(normalized.is_finite() && normalized > s.direct / 2.0);
}
