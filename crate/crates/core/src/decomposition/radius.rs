//! `r ↦ μ(Q(c, r) ∖ U)` inversion.

use crate::error::{Error, Result};
use crate::geometry::{BoxUnion, Cube};
use crate::weights::{MeasureSpec, Weight};

const REL_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;
const MAX_DOUBLINGS: usize = 400;

#[derive(Debug, Clone)]
pub(crate) struct Solved {
    pub r: f64,
    pub set: BoxUnion,
    pub mass: f64,
}

fn cube_box(center: &[f64], r: f64) -> BoxUnion {
    BoxUnion::from_box(Cube::new(center, r).expect("positive radius").to_box())
}

fn evaluate(mu: &MeasureSpec, center: &[f64], r: f64, taken: &BoxUnion) -> Solved {
    let set = cube_box(center, r)
        .difference(taken)
        .expect("same dimension");
    let mass = mu.measure(&set);
    Solved { r, set, mass }
}

fn close(m: f64, target: f64) -> bool {
    (m - target).abs() <= REL_TOL * target
}

fn bisect(
    mu: &MeasureSpec,
    center: &[f64],
    target: f64,
    taken: &BoxUnion,
    mut lo: f64,
    mut hi: f64,
) -> Result<Solved> {
    let mut best: Option<Solved> = None;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            break;
        }
        let s = evaluate(mu, center, mid, taken);
        if close(s.mass, target) {
            return Ok(s);
        }
        if s.mass < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if best
            .as_ref()
            .is_none_or(|b| (b.mass - target).abs() > (s.mass - target).abs())
        {
            best = Some(s);
        }
    }
    match best {
        Some(b) if (b.mass - target).abs() <= 1e3 * REL_TOL * target => Ok(b),
        Some(b) => Err(Error::RootFinding(format!(
            "radius bisection stalled at r = {} with mass {} (target {target})",
            b.r, b.mass
        ))),
        None => Err(Error::RootFinding("empty bracket".into())),
    }
}

fn upper_bracket(
    mu: &MeasureSpec,
    center: &[f64],
    target: f64,
    taken: &BoxUnion,
    start: f64,
) -> Result<Solved> {
    let mut r = start;
    for _ in 0..MAX_DOUBLINGS {
        let s = evaluate(mu, center, r, taken);
        if s.mass >= target {
            return Ok(s);
        }
        r *= 2.0;
    }
    Err(Error::RootFinding(format!(
        "available mass around {center:?} stays below {target}"
    )))
}

/// Smallest-effort `r` with `μ(Q(c, r) ∖ taken) = target`.
///
/// On the line with a piecewise-constant density the map is piecewise linear
/// in `r` with breaks at `2|t − c|` for the endpoints `t` of `taken` and the
/// weight steps, so it is inverted exactly on the bracketing piece.
pub(crate) fn solve_radius(
    mu: &MeasureSpec,
    center: &[f64],
    target: f64,
    taken: &BoxUnion,
) -> Result<Solved> {
    if !(target >= 0.0 && target.is_finite()) {
        return Err(Error::RootFinding(format!("invalid target mass {target}")));
    }
    let dim = center.len();
    if target == 0.0 {
        return Ok(Solved {
            r: 0.0,
            set: BoxUnion::empty(dim)?,
            mass: 0.0,
        });
    }
    let piecewise_linear = dim == 1 && mu.weight().is_none_or(Weight::is_piecewise_constant);
    if !piecewise_linear {
        let start = target.powf(1.0 / dim as f64).max(1e-6);
        let hi = upper_bracket(mu, center, target, taken, start)?;
        if close(hi.mass, target) {
            return Ok(hi);
        }
        return bisect(mu, center, target, taken, 0.0, hi.r);
    }
    let c = center[0];
    let mut breaks: Vec<f64> = taken
        .intervals()
        .unwrap_or(&[])
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(mu.weight().map(Weight::breakpoints).unwrap_or_default())
        .map(|t| 2.0 * (t - c).abs())
        .filter(|r| *r > 0.0)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let k = breaks.partition_point(|&r| evaluate(mu, center, r, taken).mass < target);
    let (r_lo, m_lo) = match k {
        0 => (0.0, 0.0),
        _ => (breaks[k - 1], evaluate(mu, center, breaks[k - 1], taken).mass),
    };
    let hi = if k < breaks.len() {
        evaluate(mu, center, breaks[k], taken)
    } else {
        let start = if r_lo > 0.0 { 2.0 * r_lo } else { target.max(1e-6) };
        upper_bracket(mu, center, target, taken, start)?
    };
    if close(hi.mass, target) {
        return Ok(hi);
    }
    let r = r_lo + (target - m_lo) * (hi.r - r_lo) / (hi.mass - m_lo);
    if r > r_lo && r < hi.r {
        let s = evaluate(mu, center, r, taken);
        if close(s.mass, target) {
            return Ok(s);
        }
    }
    bisect(mu, center, target, taken, r_lo, hi.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::GridSpec;
    use crate::weights::{CubeFamily, WeightedMeasure};

    #[test]
    fn lebesgue_free_space() {
        let s = solve_radius(&MeasureSpec::Lebesgue, &[0.3], 0.5, &BoxUnion::empty(1).unwrap()).unwrap();
        assert!((s.r - 0.5).abs() < 1e-15);
        let (a, b) = s.set.intervals().unwrap()[0];
        assert!((a - 0.05).abs() < 1e-15 && (b - 0.55).abs() < 1e-15);
    }

    #[test]
    fn skips_taken_mass() {
        // [−0.5, 0.5) is taken, so the cube has to grow to side 1.5
        let taken = BoxUnion::from_intervals(vec![(-0.5, 0.5)]);
        let s = solve_radius(&MeasureSpec::Lebesgue, &[0.0], 0.5, &taken).unwrap();
        assert!((s.r - 1.5).abs() < 1e-14, "{}", s.r);
        assert!((s.mass - 0.5).abs() < 1e-15);
    }

    #[test]
    fn step_weight_is_inverted_exactly() {
        let g = GridSpec::new(1, 1.0, 1).unwrap();
        let w = Weight::step(g, vec![1.0, 2.0, 3.0, 4.0], 5.0).unwrap();
        let fam = CubeFamily::new(1.0, 3).unwrap();
        let mu = MeasureSpec::Weighted(WeightedMeasure::new(w, 2.0, &fam).unwrap());
        for target in [0.01, 0.7, 2.5, 9.0, 40.0] {
            let s = solve_radius(&mu, &[0.1], target, &BoxUnion::empty(1).unwrap()).unwrap();
            assert!((s.mass - target).abs() <= 1e-12 * target, "{target}: {}", s.mass);
        }
    }

    #[test]
    fn power_weight_by_bisection() {
        let w = Weight::power_law(0.5).unwrap();
        let fam = CubeFamily::new(1.0, 4).unwrap();
        let mu = MeasureSpec::Weighted(WeightedMeasure::new(w, 2.0, &fam).unwrap());
        let s = solve_radius(&mu, &[0.0], 2.0 / 3.0, &BoxUnion::empty(1).unwrap()).unwrap();
        // w(Q(0, r)) = (4/3)(r/2)^{3/2}, so half of w([−1, 1)) needs r = 2^{1/3}
        assert!((s.r - 2f64.cbrt()).abs() < 1e-9, "{}", s.r);
    }

    #[test]
    fn plane_square() {
        let taken = BoxUnion::from_box(crate::geometry::Aabb::rect(0.0, 1.0, 0.0, 1.0));
        let s = solve_radius(&MeasureSpec::Lebesgue, &[0.0, 0.0], 3.0, &taken).unwrap();
        // side r: r² − (r/2)² ... corner square of side r/2 is taken
        assert!((s.r * s.r * 0.75 - 3.0).abs() < 1e-10, "{}", s.r);
    }
}
