use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GridSpec, StepFunction};
use crate::error::{invalid, Result};

/// Parameters of the pseudo-random test corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub count: usize,
    pub seed: u64,
    /// Values lie in `[0, value_max]`.
    pub value_max: f64,
    /// Supports lie in `[-s·L, s·L]^dim`.
    pub support_fraction: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 50,
            seed: 0,
            value_max: 4.0,
            support_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Tent,
    Plateau,
    Bump,
}

#[derive(Debug, Clone, Copy)]
struct Profile {
    shape: Shape,
    center: f64,
    radius: f64,
}

impl Profile {
    fn draw(rng: &mut ChaCha8Rng, reach: f64) -> Profile {
        let shape = match rng.gen_range(0..3) {
            0 => Shape::Tent,
            1 => Shape::Plateau,
            _ => Shape::Bump,
        };
        let radius = reach * rng.gen_range(0.05..0.5);
        let center = rng.gen_range(-(reach - radius)..=(reach - radius));
        let mut p = Profile {
            shape,
            center,
            radius,
        };
        if let Shape::Plateau = shape {
            // plateau edges on the 1/32 lattice so every grid with J ≥ 5 resolves them
            let snap = |t: f64| (t * 32.0).round() / 32.0;
            let (mut a, mut b) = (snap(center - radius), snap(center + radius));
            a = a.max(-reach);
            b = b.min(reach);
            if b <= a {
                b = a + 1.0 / 32.0;
            }
            p.center = 0.5 * (a + b);
            p.radius = 0.5 * (b - a);
        }
        p
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.radius;
        match self.shape {
            Shape::Tent => (1.0 - t.abs()).max(0.0),
            Shape::Plateau => {
                if x >= self.center - self.radius && x < self.center + self.radius {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Bump if t.abs() < 1.0 => 0.5 * (1.0 + (PI * t).cos()),
            Shape::Bump => 0.0,
        }
    }
}

struct Feature {
    height: f64,
    axes: Vec<Profile>,
}

/// Deterministic list of nonnegative step functions on `grid`.
///
/// The random draws do not depend on the grid level, so the same seed on a
/// finer grid samples the same underlying profiles.
pub fn corpus(grid: &GridSpec, spec: &CorpusSpec) -> Result<Vec<StepFunction>> {
    if !(spec.value_max > 0.0 && spec.value_max.is_finite()) {
        return Err(invalid("value_max", "must be positive"));
    }
    if !(spec.support_fraction > 0.0 && spec.support_fraction <= 1.0) {
        return Err(invalid("support_fraction", "must lie in (0, 1]"));
    }
    let reach = spec.support_fraction * grid.half_width();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let n = rng.gen_range(1..=4);
        let features: Vec<Feature> = (0..n)
            .map(|_| Feature {
                height: spec.value_max * rng.gen_range(0.25..1.0),
                axes: (0..grid.dim()).map(|_| Profile::draw(&mut rng, reach)).collect(),
            })
            .collect();
        let vmax = spec.value_max;
        let f = StepFunction::from_fn(grid.clone(), |x| {
            let s: f64 = features
                .iter()
                .map(|ft| {
                    ft.height * ft.axes.iter().zip(x).map(|(p, &xk)| p.eval(xk)).product::<f64>()
                })
                .sum();
            s.min(vmax)
        })?;
        out.push(f);
    }
    Ok(out)
}
