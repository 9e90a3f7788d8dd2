//! Superlevel sets `{x : |Tρ(x)| / s(x) > λ}` of a field on the whole line.
//!
//! The field is sampled at the midpoints of an evaluation lattice covering
//! three times the source window and, beyond it, out to the distance where
//! the size bound `|Tρ(x)| ≤ C‖ρ‖₁ / dist(x, supp ρ)` certifies the set is
//! empty. Crossings are located by bisection. Around each logarithmic
//! singularity the set is read off the local model `a·ln|x − t| + R` when the
//! structure is much smaller than a lattice cell.

use super::field::{Field, Singularity};
use crate::error::{invalid, Result};
use crate::geometry::IntervalSet;
use crate::stepfn::GridSpec;
use crate::weights::Weight;

/// Midpoints `origin + (m + ½)·step`, `m < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalWindow {
    pub origin: f64,
    pub step: f64,
    pub count: usize,
}

impl EvalWindow {
    /// Ratio of the evaluation window to the source window.
    pub const FACTOR: f64 = 3.0;

    pub fn around(grid: &GridSpec) -> EvalWindow {
        let l = Self::FACTOR * grid.half_width();
        EvalWindow {
            origin: -l,
            step: grid.cell_side(),
            count: (2.0 * l / grid.cell_side()).round() as usize,
        }
    }

    pub fn lo(&self) -> f64 {
        self.origin
    }

    pub fn hi(&self) -> f64 {
        self.origin + self.count as f64 * self.step
    }

    pub fn point(&self, m: usize) -> f64 {
        self.origin + (m as f64 + 0.5) * self.step
    }
}

/// Local-model radius as a fraction of the distance to other features.
const LOCAL_FRACTION: f64 = 1e-4;
/// Spacing of far samples relative to the distance to the nearest feature.
const FAR_SPACING: f64 = 0.01;
const BISECTION_STEPS: usize = 80;
const GOLDEN_STEPS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Regular,
    /// Endpoints of an analytic segment around singularity `i`.
    SegLo(usize),
    SegHi(usize),
    Spike,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    x: f64,
    v: f64,
    kind: Kind,
}

/// λ-independent sampling data for one field.
pub struct Sampler<'a> {
    field: &'a dyn Field,
    scale: Option<&'a Weight>,
    window: EvalWindow,
    lattice: Vec<f64>,
    sing: Vec<Singularity>,
    radius: Vec<f64>,
    zeros: Vec<f64>,
    mass: f64,
    hull: Option<(f64, f64)>,
}

impl<'a> Sampler<'a> {
    pub fn new(field: &'a dyn Field, scale: Option<&'a Weight>, window: EvalWindow) -> Self {
        let lattice = field.midpoint_values(window.origin, window.step, window.count);
        Self::with_lattice(field, scale, window, lattice)
    }

    /// Reuses precomputed midpoint values (e.g. from a linear combination).
    pub fn with_lattice(
        field: &'a dyn Field,
        scale: Option<&'a Weight>,
        window: EvalWindow,
        lattice: Vec<f64>,
    ) -> Self {
        assert_eq!(lattice.len(), window.count);
        let mut sing: Vec<Singularity> = field
            .singularities()
            .into_iter()
            .filter(|s| s.coef != 0.0)
            .collect();
        sing.sort_by(|a, b| a.at.total_cmp(&b.at));
        let zeros: Vec<f64> = match scale {
            Some(Weight::PowerLaw { alpha }) if *alpha > 0.0 => vec![0.0],
            _ => Vec::new(),
        };
        let radius = (0..sing.len())
            .map(|i| {
                let t = sing[i].at;
                let mut gap = window.step;
                if i > 0 {
                    gap = gap.min(t - sing[i - 1].at);
                }
                if i + 1 < sing.len() {
                    gap = gap.min(sing[i + 1].at - t);
                }
                for z in &zeros {
                    gap = gap.min((t - z).abs());
                }
                LOCAL_FRACTION * gap
            })
            .collect();
        Sampler {
            field,
            scale,
            window,
            lattice,
            sing,
            radius,
            zeros,
            mass: field.mass(),
            hull: field.hull(),
        }
    }

    fn s(&self, x: f64) -> f64 {
        self.scale.map_or(1.0, |w| w.density(x))
    }

    fn scaled(&self, x: f64, v: f64) -> f64 {
        if v == 0.0 {
            return 0.0;
        }
        let s = self.s(x);
        if s == 0.0 {
            f64::INFINITY
        } else {
            v.abs() / s
        }
    }

    fn above(&self, x: f64, lambda: f64) -> bool {
        self.scaled(x, self.field.value(x)) > lambda
    }

    /// Lower bound of the scale on `{y : |y| ≥ r}` for the far-field bound.
    fn scale_floor(&self, r: f64) -> f64 {
        match self.scale {
            None | Some(Weight::ConstantOne) => 1.0,
            Some(Weight::PowerLaw { alpha }) => r.max(0.0).powf(*alpha),
            Some(Weight::Step(s)) => s.values().iter().copied().fold(s.tail(), f64::min),
        }
    }

    /// Smallest `X ≥ edge` beyond which the size bound keeps the scaled field below `λ`.
    /// `edge` is the hull endpoint, `x ↦ sign·x` maps the side onto the positive axis.
    fn cutoff(&self, edge: f64, sign: f64, lambda: f64) -> f64 {
        let c = self.field.size_const() * self.mass;
        let bound = |x: f64| c / ((sign * (x - edge)) * self.scale_floor(sign * x));
        let start = match self.scale {
            Some(Weight::PowerLaw { .. }) => {
                if sign * edge >= 0.0 {
                    edge
                } else {
                    0.0
                }
            }
            _ => edge,
        };
        let mut step = (sign * (start - edge)).max(1e-3).max(c / lambda);
        let mut hi = start + sign * step;
        for _ in 0..200 {
            if bound(hi) <= lambda {
                break;
            }
            step *= 2.0;
            hi = start + sign * step;
        }
        let mut lo = start;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if bound(mid) <= lambda {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn nearest_feature(&self, x: f64) -> f64 {
        let k = self.sing.partition_point(|s| s.at < x);
        let mut d = f64::INFINITY;
        if k > 0 {
            d = d.min(x - self.sing[k - 1].at);
        }
        if k < self.sing.len() {
            d = d.min(self.sing[k].at - x);
        }
        if let Some((a, b)) = self.hull {
            if x > b {
                d = d.min(x - b);
            } else if x < a {
                d = d.min(a - x);
            }
        }
        d
    }

    fn far_samples(&self, from: f64, to: f64, out: &mut Vec<Sample>) {
        // from → to, in either direction
        let dir = if to > from { 1.0 } else { -1.0 };
        let mut x = from;
        while dir * (to - x) > 0.0 {
            let step = (FAR_SPACING * self.nearest_feature(x)).max(self.window.step);
            x = if dir * (to - x) <= step { to } else { x + dir * step };
            out.push(Sample {
                x,
                v: self.field.value(x),
                kind: Kind::Regular,
            });
        }
    }

    fn crossing(&self, mut a: f64, mut b: f64, above_a: bool, lambda: f64) -> f64 {
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.above(m, lambda) == above_a {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    fn sign_change(&self, mut a: f64, mut b: f64, sign_a: bool) -> f64 {
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (self.field.value(m) > 0.0) == sign_a {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Golden-section search for the extremum of the scaled field on `(a, b)`.
    fn golden(&self, mut a: f64, mut b: f64, maximize: bool) -> (f64, f64) {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |x: f64| {
            let u = self.scaled(x, self.field.value(x));
            if maximize {
                u
            } else {
                -u
            }
        };
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..GOLDEN_STEPS {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        let (x, v) = if fc > fd { (c, fc) } else { (d, fd) };
        (x, if maximize { v } else { -v })
    }

    /// The superlevel set at `λ > 0`.
    pub fn superlevel(&self, lambda: f64) -> Result<IntervalSet> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be positive"));
        }
        let Some((hlo, hhi)) = self.hull else {
            return Ok(IntervalSet::empty());
        };
        if self.mass == 0.0 {
            return Ok(IntervalSet::empty());
        }
        let w = self.window;
        let mut samples: Vec<Sample> = (0..w.count)
            .map(|m| Sample {
                x: w.point(m),
                v: self.lattice[m],
                kind: Kind::Regular,
            })
            .collect();
        let right = self.cutoff(hhi, 1.0, lambda).max(w.hi());
        let left = self.cutoff(hlo, -1.0, lambda).min(w.lo());
        self.far_samples(w.hi(), right, &mut samples);
        self.far_samples(w.lo(), left, &mut samples);
        if right > w.hi() || left < w.lo() {
            // window edges themselves are sample points in that case
            for x in [w.lo(), w.hi()] {
                samples.push(Sample {
                    x,
                    v: self.field.value(x),
                    kind: Kind::Regular,
                });
            }
        }
        for &z in &self.zeros {
            samples.push(Sample {
                x: z,
                v: self.field.value(z),
                kind: Kind::Regular,
            });
        }

        let mut analytic: Vec<(f64, f64)> = Vec::new();
        for (i, s) in self.sing.iter().enumerate() {
            let delta = self.radius[i];
            let (a, r, t) = (s.coef, s.regular, s.at);
            let side = |sign: f64| {
                let lam = lambda * self.s(t + sign * 0.5 * delta);
                let inner = ((-lam - r * a.signum()) / a.abs()).exp();
                let outer = ((lam - r * a.signum()) / a.abs()).exp();
                (inner, outer)
            };
            let (l_in, l_out) = side(-1.0);
            let (r_in, r_out) = side(1.0);
            if l_in < delta && r_in < delta && delta > 0.0 {
                let edge = a * delta.ln() + r;
                samples.push(Sample {
                    x: t - delta,
                    v: edge,
                    kind: Kind::SegLo(i),
                });
                samples.push(Sample {
                    x: t + delta,
                    v: edge,
                    kind: Kind::SegHi(i),
                });
                analytic.push((t - l_in, t + r_in));
                if l_out < delta {
                    analytic.push((t - delta, t - l_out));
                }
                if r_out < delta {
                    analytic.push((t + r_out, t + delta));
                }
            } else {
                samples.push(Sample {
                    x: t,
                    v: -a.signum() * f64::INFINITY,
                    kind: Kind::Spike,
                });
            }
        }

        samples.sort_by(|a, b| a.x.total_cmp(&b.x));
        // drop regular samples inside analytic segments and duplicates
        let mut cleaned: Vec<Sample> = Vec::with_capacity(samples.len());
        let mut inside = false;
        for s in samples {
            match s.kind {
                Kind::SegLo(_) => inside = true,
                Kind::SegHi(_) => inside = false,
                Kind::Regular if inside => continue,
                _ => {}
            }
            if let Some(last) = cleaned.last() {
                if last.x == s.x {
                    if s.kind == Kind::Regular {
                        continue;
                    }
                    cleaned.pop();
                }
            }
            cleaned.push(s);
        }
        let mut samples = cleaned;

        // probe sampled local extrema for excursions between samples
        let mut extra = Vec::new();
        for i in 1..samples.len().saturating_sub(1) {
            let (p, c, n) = (samples[i - 1], samples[i], samples[i + 1]);
            if c.kind != Kind::Regular || p.kind == Kind::Spike || n.kind == Kind::Spike {
                continue;
            }
            let (up, uc, un) = (self.scaled(p.x, p.v), self.scaled(c.x, c.v), self.scaled(n.x, n.v));
            let probe_max = uc <= lambda && uc > 0.5 * lambda && uc >= up && uc >= un;
            let probe_min = uc > lambda && uc < 2.0 * lambda && uc <= up && uc <= un;
            if probe_max || probe_min {
                let (x, u) = self.golden(p.x, n.x, probe_max);
                if (probe_max && u > lambda) || (probe_min && u <= lambda) {
                    extra.push(Sample {
                        x,
                        v: self.field.value(x),
                        kind: Kind::Regular,
                    });
                }
            }
        }
        if !extra.is_empty() {
            samples.extend(extra);
            samples.sort_by(|a, b| a.x.total_cmp(&b.x));
            samples.dedup_by(|a, b| a.x == b.x);
        }

        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut open: Option<f64> = None;
        let state = |s: &Sample| self.scaled(s.x, s.v) > lambda;
        if state(&samples[0]) {
            open = Some(samples[0].x);
        }
        for pair in samples.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            let (ap, aq) = (state(&p), state(&q));
            if let (Kind::SegLo(i), Kind::SegHi(j)) = (p.kind, q.kind) {
                if i == j {
                    if let Some(s) = open.take() {
                        out.push((s, p.x));
                    }
                    if aq {
                        open = Some(q.x);
                    }
                    continue;
                }
            }
            if ap != aq {
                let c = self.crossing(p.x, q.x, ap, lambda);
                if ap {
                    out.push((open.take().unwrap_or(p.x), c));
                } else {
                    open = Some(c);
                }
            } else if ap && p.v != 0.0 && q.v != 0.0 && (p.v > 0.0) != (q.v > 0.0) {
                let z = self.sign_change(p.x, q.x, p.v > 0.0);
                let c1 = self.crossing(p.x, z, true, lambda);
                out.push((open.take().unwrap_or(p.x), c1));
                open = Some(self.crossing(z, q.x, false, lambda));
            }
        }
        if let Some(s) = open {
            out.push((s, samples.last().unwrap().x));
        }
        out.extend(analytic);
        Ok(IntervalSet::from_intervals(out))
    }
}

/// One-shot superlevel set of `|Tρ|/s` (or `|Tρ|` when `scale` is `None`).
pub fn superlevel_set(
    field: &dyn Field,
    scale: Option<&Weight>,
    window: EvalWindow,
    lambda: f64,
) -> Result<IntervalSet> {
    Sampler::new(field, scale, window).superlevel(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{HilbertField, JumpDensity};
    use crate::stepfn::StepFunction;
    use std::f64::consts::PI;

    fn unit_box(level: i32) -> (HilbertField, EvalWindow) {
        let g = GridSpec::new(1, 1.0, level).unwrap();
        let f = StepFunction::from_fn(g.clone(), |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        (
            HilbertField::new(JumpDensity::from_step(&f).unwrap()),
            EvalWindow::around(&g),
        )
    }

    #[test]
    fn unit_box_closed_form() {
        let (f, w) = unit_box(6);
        let s = Sampler::new(&f, None, w);
        for lambda in [0.05, 0.25, 1.0, 3.0] {
            let got = s.superlevel(lambda).unwrap().measure();
            let want = 2.0 / (PI * lambda).sinh();
            assert!((got / want - 1.0).abs() < 1e-9, "λ={lambda}: {got} vs {want}");
        }
    }

    #[test]
    fn tiny_spikes_use_the_local_model() {
        // a small jump gives a spike far below lattice resolution
        let g = GridSpec::new(1, 1.0, 6).unwrap();
        let pieces = [(0.0, 0.5, 0.05)];
        let d = JumpDensity::from_pieces(&pieces, Some(crate::operators::Lattice::of_grid(&g)));
        let f = HilbertField::new(d);
        let set = superlevel_set(&f, None, EvalWindow::around(&g), 0.25).unwrap();
        // near each endpoint |Hf| ≈ (0.05/π)|ln(2d)|, so each spike has width exp(−5π)
        let want = 2.0 * (-5.0 * PI).exp();
        assert!((set.measure() / want - 1.0).abs() < 1e-3, "{} vs {want}", set.measure());
    }
}
