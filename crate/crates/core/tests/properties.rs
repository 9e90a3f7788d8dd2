use proptest::prelude::*;

use weaktype::decomposition::decompose;
use weaktype::geometry::{whitney, BoxUnion};
use weaktype::operators::{apply_at, CzKernel, HilbertKernel};
use weaktype::stepfn::{parse_step_function, weak_l1_norm, write_step_function, GridSpec, StepFunction};
use weaktype::weights::MeasureSpec;

const LEVEL: i32 = 6;

fn grid() -> GridSpec {
    GridSpec::new(1, 1.0, LEVEL).unwrap()
}

fn cell_values(max: f64) -> impl Strategy<Value = Vec<f64>> {
    let n = grid().cell_count();
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..max, -max..0.0], n)
}

fn nonnegative_values(max: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..max], grid().cell_count())
}

fn step(values: Vec<f64>) -> StepFunction {
    StepFunction::new(grid(), values).unwrap()
}

fn intervals() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-64i32..64, 1i32..32), 1..5).prop_map(|v| {
        v.into_iter()
            .map(|(a, w)| (a as f64 / 64.0, (a + w) as f64 / 64.0))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_audit_is_clean(values in nonnegative_values(4.0), lambda in 0.1f64..3.0) {
        let f = step(values);
        let d = decompose(&f, lambda, &MeasureSpec::Lebesgue, None).unwrap();
        let a = d.audit(&f).unwrap();
        prop_assert!(a.failures(lambda).is_empty(), "{:?}", a.failures(lambda));
        prop_assert!(d.good.max_abs() <= lambda);
    }

    #[test]
    fn decomposition_is_scale_covariant(values in nonnegative_values(4.0), lambda in 0.1f64..3.0) {
        // f/λ is invariant under (f, λ) → (2f, 2λ)
        let f = step(values);
        let mu = MeasureSpec::Lebesgue;
        let d1 = decompose(&f, lambda, &mu, None).unwrap();
        let d2 = decompose(&f.scale(2.0), 2.0 * lambda, &mu, None).unwrap();
        prop_assert_eq!(&d1.omega, &d2.omega);
        prop_assert_eq!(d1.bad_parts.len(), d2.bad_parts.len());
        for (p, q) in d1.bad_parts.iter().zip(&d2.bad_parts) {
            prop_assert!((p.radius - q.radius).abs() <= 1e-9 * p.radius.max(1e-12));
            prop_assert!((2.0 * p.mass - q.mass).abs() <= 1e-12 * q.mass.abs().max(1.0));
        }
    }

    #[test]
    fn truncated_hilbert_is_linear(
        u in cell_values(2.0),
        v in cell_values(2.0),
        a in -3.0f64..3.0,
        xs in prop::collection::vec(-3.0f64..3.0, 1..8),
    ) {
        let k = HilbertKernel::default();
        let (f, g) = (step(u), step(v));
        let h = grid().cell_side();
        let combo = f.scale(a).add(&g).unwrap();
        let lhs = apply_at(&k, &combo, &xs, h).unwrap();
        let tf = apply_at(&k, &f, &xs, h).unwrap();
        let tg = apply_at(&k, &g, &xs, h).unwrap();
        for i in 0..xs.len() {
            let scale = 1.0 + tf[i].abs() + tg[i].abs();
            prop_assert!((lhs[i] - (a * tf[i] + tg[i])).abs() <= 1e-12 * scale * (1.0 + a.abs()));
        }
    }

    #[test]
    fn kernel_is_antisymmetric(x in -10.0f64..10.0, y in -10.0f64..10.0) {
        prop_assume!((x - y).abs() > 1e-6);
        let k = HilbertKernel::default();
        prop_assert_eq!(k.eval(&[x], &[y]), -k.eval(&[y], &[x]));
    }

    #[test]
    fn weak_norm_is_homogeneous(values in cell_values(4.0), c in 0.1f64..10.0) {
        let f = step(values);
        let mu = MeasureSpec::Lebesgue;
        let base = weak_l1_norm(&f, &[], &mu, true);
        prop_assume!(base.is_ok());
        let w = base.unwrap().weak_norm;
        let scaled = weak_l1_norm(&f.scale(c), &[], &mu, true).unwrap().weak_norm;
        prop_assert!((scaled - c * w).abs() <= 1e-12 * (c * w).max(1.0));
        prop_assert!(w <= f.l1_norm(&mu).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn box_union_algebra(a in intervals(), b in intervals()) {
        let (a, b) = (BoxUnion::from_intervals(a), BoxUnion::from_intervals(b));
        let u = a.union(&b).unwrap();
        let i = a.intersection(&b).unwrap();
        let d = a.difference(&b).unwrap();
        prop_assert_eq!(u.measure() + i.measure(), a.measure() + b.measure());
        prop_assert_eq!(d.union(&i).unwrap(), a.clone());
        prop_assert!(d.intersection(&b).unwrap().is_empty());
        prop_assert!(i.is_subset_of(&a).unwrap() && a.is_subset_of(&u).unwrap());
    }

    #[test]
    fn whitney_covers_aligned_sets(a in intervals(), depth in 1i32..8) {
        let omega = BoxUnion::from_intervals(a);
        let w = whitney(&omega, 6 + depth).unwrap();
        let audit = w.audit();
        prop_assert!(audit.cover_exact && audit.bracket_ok && audit.flagged_floor_ok);
    }

    #[test]
    fn text_round_trip(values in cell_values(5.0)) {
        let f = step(values);
        prop_assert_eq!(parse_step_function(&write_step_function(&f)).unwrap(), f);
    }
}
