use super::gauss::GL8;
use super::CzKernel;
use crate::error::{Error, Result};
use crate::geometry::Cube;
use crate::stepfn::StepFunction;
use crate::weights::MeasureSpec;

/// Panels per octave of distance from the cube center.
const PANELS_PER_OCTAVE: usize = 4;
/// The quadrature covers `s ≤ |y − c| ≤ 2^OCTAVES·s`.
const OCTAVES: usize = 12;
const MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// `quadrature + remainder`
    pub tail: f64,
    pub quadrature: f64,
    /// Certified bound for `|y − c| > 2^OCTAVES·s`.
    pub remainder: f64,
    pub l1: f64,
}

impl TailEstimate {
    pub fn ratio(&self) -> f64 {
        if self.l1 == 0.0 {
            0.0
        } else {
            self.tail / self.l1
        }
    }
}

fn transform<K: CzKernel + ?Sized>(k: &K, cells: &[(f64, f64, f64)], y: f64) -> f64 {
    cells
        .iter()
        .map(|&(a, b, v)| {
            v * k
                .cell_integral(y, a, b)
                .unwrap_or_else(|| GL8.integrate(a, b, |z| k.eval(&[y], &[z])))
        })
        .sum()
}

fn abs_integral(tf: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    // split at sign changes seen on the panel nodes
    let mut pts: Vec<f64> = vec![a];
    pts.extend(GL8.mapped(a, b).map(|p| p.0));
    pts.push(b);
    let vals: Vec<f64> = pts.iter().map(|&x| tf(x)).collect();
    let mut cuts = vec![a];
    for i in 0..pts.len() - 1 {
        if (vals[i] > 0.0) != (vals[i + 1] > 0.0) {
            let (mut lo, mut hi, pos) = (pts[i], pts[i + 1], vals[i] > 0.0);
            for _ in 0..100 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                if (tf(m) > 0.0) == pos {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
    }
    cuts.push(b);
    cuts.windows(2)
        .map(|w| GL8.integrate(w[0], w[1], &tf).abs())
        .sum()
}

/// `∫_{ℝ∖Q(c, 2s)} |Tf|` for a mean-zero `f` supported in the cube `Q(c, s)`.
pub fn lemma1_tail<K: CzKernel + ?Sized>(k: &K, f: &StepFunction, q: &Cube) -> Result<TailEstimate> {
    if f.dim() != 1 || q.dim() != 1 || k.dim() != 1 {
        return Err(Error::LineOnly {
            what: "the tail estimate",
            dim: f.dim().max(q.dim()),
        });
    }
    let qb = q.to_box();
    let g = f.grid();
    let mut cells = Vec::new();
    for (i, v) in f.support_cells() {
        let b = g.cell_box(i);
        if b.lo[0] < qb.lo[0] || b.hi[0] > qb.hi[0] {
            return Err(Error::Hypothesis(format!(
                "f is nonzero on [{}, {}) outside the cube",
                b.lo[0], b.hi[0]
            )));
        }
        cells.push((b.lo[0], b.hi[0], v));
    }
    let l1 = f.l1_norm(&MeasureSpec::Lebesgue)?;
    let mean = f.integral(&MeasureSpec::Lebesgue)?;
    if mean.abs() > MEAN_TOL * l1 {
        return Err(Error::Hypothesis(format!(
            "f must have integral zero, got {mean} with L1 norm {l1}"
        )));
    }
    if l1 == 0.0 {
        return Ok(TailEstimate {
            tail: 0.0,
            quadrature: 0.0,
            remainder: 0.0,
            l1,
        });
    }
    let c = q.center()[0];
    let s = q.side();
    let tf = |y: f64| transform(k, &cells, y);
    let ratio = 2f64.powf(1.0 / PANELS_PER_OCTAVE as f64);
    let mut quadrature = 0.0;
    let mut inner = s;
    for _ in 0..PANELS_PER_OCTAVE * OCTAVES {
        let outer = inner * ratio;
        quadrature += abs_integral(&tf, c + inner, c + outer);
        quadrature += abs_integral(&tf, c - outer, c - inner);
        inner = outer;
    }
    let reach = inner;
    let delta = k.smooth_delta();
    let remainder = 2.0 * k.smooth_const() * l1 * (0.5 * s).powf(delta) / (delta * reach.powf(delta));
    Ok(TailEstimate {
        tail: quadrature + remainder,
        quadrature,
        remainder,
        l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::HilbertKernel;
    use crate::stepfn::GridSpec;
    use std::f64::consts::PI;

    fn dipole(shift: f64, r: f64) -> (StepFunction, Cube) {
        let g = GridSpec::new(1, 4.0, 8).unwrap();
        let f = StepFunction::from_fn(g, |x| {
            let t = x[0] - shift;
            if (-r / 2.0..0.0).contains(&t) {
                1.0
            } else if (0.0..r / 2.0).contains(&t) {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        (f, Cube::new(&[shift], r).unwrap())
    }

    #[test]
    fn dipole_tail_is_bounded() {
        let (f, q) = dipole(0.0, 0.5);
        let t = lemma1_tail(&HilbertKernel::default(), &f, &q).unwrap();
        assert!(t.ratio() <= 2.0 / PI, "{t:?}");
        // closed form: |Hf(y)| = (1/π)|ln(y²/|y² − r²/4|)|, integrated over |y| > r
        let r = 0.5;
        let n = 400_000;
        let lo: f64 = r;
        let hi = r * 4096.0;
        let (u0, u1) = (lo.ln(), hi.ln());
        let du = (u1 - u0) / n as f64;
        let direct: f64 = (0..n)
            .map(|i| {
                let y = (u0 + (i as f64 + 0.5) * du).exp();
                2.0 * (y * y / (y * y - r * r / 4.0)).ln().abs() / PI * y * du
            })
            .sum();
        assert!((t.quadrature - direct).abs() < 1e-6 * direct, "{} vs {direct}", t.quadrature);
    }

    #[test]
    fn zero_function_and_hypotheses() {
        let g = GridSpec::new(1, 1.0, 4).unwrap();
        let q = Cube::new(&[0.0], 0.5).unwrap();
        let t = lemma1_tail(&HilbertKernel::default(), &StepFunction::zeros(g.clone()), &q).unwrap();
        assert_eq!(t.tail, 0.0);
        let bump = StepFunction::from_fn(g, |x| if x[0].abs() < 0.2 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(
            lemma1_tail(&HilbertKernel::default(), &bump, &q),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn translation_invariant() {
        let (f, q) = dipole(0.0, 0.25);
        let (g, p) = dipole(1.5, 0.25);
        let k = HilbertKernel::default();
        let a = lemma1_tail(&k, &f, &q).unwrap().tail;
        let b = lemma1_tail(&k, &g, &p).unwrap().tail;
        assert!((a - b).abs() < 1e-9 * a);
    }
}
