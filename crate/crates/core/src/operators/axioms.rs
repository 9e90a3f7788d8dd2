use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CzKernel;
use crate::geometry::MAX_DIM;

/// Largest observed ratios against the size and smoothness bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomReport {
    pub samples: usize,
    /// `max |K(x,y)|·|x−y|^n`
    pub size_product: f64,
    pub size_ratio: f64,
    pub smooth_ratio: f64,
}

impl AxiomReport {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn size_ok(&self) -> bool {
        self.size_ratio <= 1.0 + Self::TOLERANCE
    }

    pub fn smooth_ok(&self) -> bool {
        self.smooth_ratio <= 1.0 + Self::TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.size_ok() && self.smooth_ok()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> [f64; MAX_DIM] {
    let mut p = [0.0; MAX_DIM];
    for c in p.iter_mut().take(dim) {
        *c = rng.gen_range(-scale..scale);
    }
    p
}

/// Random unit direction scaled by `len`.
fn offset(rng: &mut ChaCha8Rng, dim: usize, len: f64) -> [f64; MAX_DIM] {
    loop {
        let v = random_point(rng, dim, 1.0);
        let n = norm(&v[..dim]);
        if n > 1e-3 && n <= 1.0 {
            let mut out = [0.0; MAX_DIM];
            for k in 0..dim {
                out[k] = v[k] * len / n;
            }
            return out;
        }
    }
}

fn shifted(p: &[f64; MAX_DIM], d: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
    [p[0] + d[0], p[1] + d[1]]
}

/// Samples admissible pairs and triples at log-uniform separations. Every
/// fourth smoothness sample sits on the boundary `|x−x'| = |x−y|/2`.
pub fn kernel_axiom_report<K: CzKernel + ?Sized>(k: &K, samples: usize, seed: u64) -> AxiomReport {
    let n = k.dim();
    let delta = k.smooth_delta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AxiomReport {
        samples,
        size_product: 0.0,
        size_ratio: 0.0,
        smooth_ratio: 0.0,
    };
    for s in 0..samples {
        let x = random_point(&mut rng, n, 4.0);
        let sep = 10f64.powf(rng.gen_range(-4.0..2.0));
        let y = shifted(&x, &offset(&mut rng, n, sep));
        let d = norm(&[x[0] - y[0], x[1] - y[1]][..n]);

        let prod = k.eval(&x[..n], &y[..n]).abs() * d.powi(n as i32);
        rep.size_product = rep.size_product.max(prod);
        rep.size_ratio = rep.size_ratio.max(prod / k.size_const());

        let t = if s % 4 == 0 { 0.5 } else { rng.gen_range(1e-6..0.5) };
        let moved = offset(&mut rng, n, t * d);
        let bound = |step: f64| k.smooth_const() * step.powf(delta) / d.powf(n as f64 + delta);
        let step = norm(&moved[..n]);
        // perturb the first argument, then the second
        let x2 = shifted(&x, &moved);
        let dx = (k.eval(&x[..n], &y[..n]) - k.eval(&x2[..n], &y[..n])).abs();
        let y2 = shifted(&y, &moved);
        let dy = (k.eval(&x[..n], &y[..n]) - k.eval(&x[..n], &y2[..n])).abs();
        rep.smooth_ratio = rep.smooth_ratio.max(dx.max(dy) / bound(step));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::HilbertKernel;
    use std::f64::consts::PI;

    #[test]
    fn hilbert_passes() {
        let r = kernel_axiom_report(&HilbertKernel::default(), 5000, 1);
        assert!(r.passed(), "{r:?}");
        assert!((r.size_product - 1.0 / PI).abs() < 1e-14);
        // boundary samples approach the constant from below
        assert!(r.smooth_ratio > 0.9);
    }

    #[test]
    fn halved_size_constant_fails() {
        let k = HilbertKernel {
            size_const: 0.5 / PI,
            ..HilbertKernel::default()
        };
        let r = kernel_axiom_report(&k, 100, 1);
        assert!(!r.size_ok());
        assert!((r.size_ratio - 2.0).abs() < 1e-12);
    }
}
