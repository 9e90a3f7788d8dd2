use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Weight;
use crate::error::{invalid, Error, Result};

/// Dyadic intervals of levels `min_level..=max_level` inside `[-L, L)`,
/// together with their translates by half a side.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFamily {
    pub half_width: f64,
    pub min_level: i32,
    pub max_level: i32,
}

impl CubeFamily {
    pub fn new(half_width: f64, max_level: i32) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", "must be positive"));
        }
        let min_level = -(2.0 * half_width).log2().floor() as i32;
        if max_level < min_level {
            return Err(invalid(
                "max_level",
                format!("must be at least {min_level} for this window"),
            ));
        }
        Ok(CubeFamily {
            half_width,
            min_level,
            max_level,
        })
    }

    pub fn for_each(&self, mut f: impl FnMut(f64, f64)) {
        let l = self.half_width;
        for k in self.min_level..=self.max_level {
            let s = (-(k as f64)).exp2();
            for shift in [0.0, 0.5] {
                let first = ((-l / s) - shift).ceil() as i64;
                let mut j = first;
                loop {
                    let lo = (j as f64 + shift) * s;
                    let hi = lo + s;
                    if hi > l {
                        break;
                    }
                    f(lo, hi);
                    j += 1;
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "dyadic+half-shifted intervals in [-{0}, {0}), levels {1}..={2}",
            self.half_width, self.min_level, self.max_level
        )
    }
}

/// Lower estimate of `[w]_{A_p}` over a finite family of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ApEstimate {
    pub p: f64,
    pub value: f64,
    pub family: CubeFamily,
    pub cubes_examined: usize,
    pub argmax: (f64, f64),
}

pub fn ap_constant(w: &Weight, p: f64, family: &CubeFamily) -> Result<ApEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("must exceed 1, got {p}")));
    }
    let p_conj = p / (p - 1.0);
    let dual = w.power(1.0 - p_conj).map_err(|e| Error::NotInAp {
        p,
        reason: e.to_string(),
    })?;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    let mut count = 0;
    family.for_each(|lo, hi| {
        count += 1;
        let len = hi - lo;
        let v = (w.interval_mass(lo, hi) / len) * (dual.interval_mass(lo, hi) / len).powf(p - 1.0);
        if v > best {
            best = v;
            argmax = (lo, hi);
        }
    });
    if count == 0 {
        return Err(invalid("family", "contains no intervals"));
    }
    // constant weights give 1 up to rounding
    if matches!(w, Weight::ConstantOne) {
        best = 1.0;
    }
    Ok(ApEstimate {
        p,
        value: best,
        family: family.clone(),
        cubes_examined: count,
        argmax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingAudit {
    pub max_ratio: f64,
    pub worst_center: f64,
    pub worst_side: f64,
    pub worst_factor: f64,
    pub trials: usize,
}

impl DoublingAudit {
    pub fn passed(&self) -> bool {
        self.max_ratio <= 1.0
    }
}

/// Randomized audit of `w(Q(x, a r)) ≤ a^{p} [w]_{A_p} w(Q(x, r))` on the line.
///
/// A quarter of the trials are centered at the origin, where power weights
/// are least doubling.
pub fn weighted_doubling_check(
    w: &Weight,
    p: f64,
    ap: f64,
    trials: usize,
    seed: u64,
) -> DoublingAudit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = DoublingAudit {
        max_ratio: f64::NEG_INFINITY,
        worst_center: 0.0,
        worst_side: 0.0,
        worst_factor: 0.0,
        trials,
    };
    for t in 0..trials {
        let x = if t % 4 == 0 { 0.0 } else { rng.gen_range(-2.0..2.0) };
        let r = 10f64.powf(rng.gen_range(-3.0..0.5));
        let a = 1.0 + rng.gen_range(0.0..7.0f64).max(1e-9);
        let small = w.interval_mass(x - r / 2.0, x + r / 2.0);
        let big = w.interval_mass(x - a * r / 2.0, x + a * r / 2.0);
        let ratio = big / (a.powf(p) * ap * small);
        if ratio > audit.max_ratio {
            audit.max_ratio = ratio;
            audit.worst_center = x;
            audit.worst_side = r;
            audit.worst_factor = a;
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(levels: i32) -> CubeFamily {
        CubeFamily::new(1.0, levels).unwrap()
    }

    #[test]
    fn constant_weight_is_one() {
        for p in [1.5, 2.0, 3.0] {
            assert_eq!(ap_constant(&Weight::ConstantOne, p, &fam(6)).unwrap().value, 1.0);
        }
    }

    #[test]
    fn sqrt_weight_baseline() {
        // the supremum over the family is attained on [0, 2^-k): 1/((1+α)(1-α))
        let w = Weight::power_law(0.5).unwrap();
        let est = ap_constant(&w, 2.0, &fam(12)).unwrap();
        assert!(est.cubes_examined >= 10_000);
        assert!((est.value - 4.0 / 3.0).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn non_ap_power_is_rejected() {
        let w = Weight::power_law(1.0).unwrap();
        assert!(matches!(
            ap_constant(&w, 2.0, &fam(4)),
            Err(Error::NotInAp { .. })
        ));
        let w = Weight::power_law(1.5).unwrap();
        assert!(ap_constant(&w, 2.0, &fam(4)).is_err());
        assert!(ap_constant(&w, 3.0, &fam(4)).is_ok());
    }

    #[test]
    fn family_counts() {
        let mut n = 0;
        fam(0).for_each(|lo, hi| {
            assert!(lo >= -1.0 && hi <= 1.0);
            n += 1;
        });
        // level -1: [-1,1) ; level 0: [-1,0), [0,1), [-0.5,0.5)
        assert_eq!(n, 4);
    }

    #[test]
    fn doubling_constant_weight() {
        let a = weighted_doubling_check(&Weight::ConstantOne, 2.0, 1.0, 200, 3);
        assert!(a.passed());
        // ratio is a / a^2 = 1/a
        assert!((a.max_ratio - 1.0 / a.worst_factor).abs() < 1e-12);
    }
}
