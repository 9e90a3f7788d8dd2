use std::f64::consts::PI;

/// A Calderón–Zygmund kernel with its size and smoothness constants.
pub trait CzKernel: Sync {
    fn dim(&self) -> usize;

    /// `K(x, y)` for `x ≠ y`.
    fn eval(&self, x: &[f64], y: &[f64]) -> f64;

    /// `|K(x,y)| ≤ size_const / |x−y|^dim`.
    fn size_const(&self) -> f64;

    /// Hölder exponent `δ ∈ (0, 1]`.
    fn smooth_delta(&self) -> f64;

    /// `|K(x,y) − K(x',y)| ≤ smooth_const·|x−x'|^δ / |x−y|^{dim+δ}` for `|x−x'| ≤ |x−y|/2`.
    fn smooth_const(&self) -> f64;

    /// `∫_a^b K(x, y) dy` in closed form, for `x ∉ (a, b)`, when available.
    fn cell_integral(&self, _x: f64, _a: f64, _b: f64) -> Option<f64> {
        None
    }
}

/// `1/(π(x−y))` on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertKernel {
    pub size_const: f64,
    pub smooth_const: f64,
}

impl Default for HilbertKernel {
    fn default() -> Self {
        HilbertKernel {
            size_const: 1.0 / PI,
            smooth_const: 2.0 / PI,
        }
    }
}

impl CzKernel for HilbertKernel {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        1.0 / (PI * (x[0] - y[0]))
    }

    fn size_const(&self) -> f64 {
        self.size_const
    }

    fn smooth_delta(&self) -> f64 {
        1.0
    }

    fn smooth_const(&self) -> f64 {
        self.smooth_const
    }

    fn cell_integral(&self, x: f64, a: f64, b: f64) -> Option<f64> {
        Some(((x - a).abs() / (x - b).abs()).ln() / PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetric() {
        let k = HilbertKernel::default();
        for (x, y) in [(0.3, -1.2), (5.0, 4.999), (-2.0, 7.5)] {
            assert_eq!(k.eval(&[x], &[y]), -k.eval(&[y], &[x]));
        }
    }

    #[test]
    fn cell_integral_matches_quadrature() {
        let k = HilbertKernel::default();
        let (x, a, b) = (0.2, 1.0, 3.0);
        let n = 200_000;
        let h = (b - a) / n as f64;
        let mid: f64 = (0..n).map(|i| k.eval(&[x], &[a + (i as f64 + 0.5) * h]) * h).sum();
        assert!((k.cell_integral(x, a, b).unwrap() - mid).abs() < 1e-10);
    }
}
