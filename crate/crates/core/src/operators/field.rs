//! Transforms of densities viewed as functions on the whole line, with the
//! structure needed to measure their superlevel sets.

use std::f64::consts::PI;

use super::density::JumpDensity;
use super::gauss::GL4;
use crate::error::{Error, Result};
use crate::weights::Weight;

/// Near `at` the field equals `coef·ln|x − at| + regular` up to `o(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub at: f64,
    pub coef: f64,
    pub regular: f64,
}

/// A transform `Tρ` evaluated off its singular points.
pub trait Field: Sync {
    /// Signed value; only meaningful away from the singular points.
    fn value(&self, x: f64) -> f64;

    /// Values at `origin + (m + ½)·step` for `m < count`.
    fn midpoint_values(&self, origin: f64, step: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|m| self.value(origin + (m as f64 + 0.5) * step))
            .collect()
    }

    fn singularities(&self) -> Vec<Singularity>;

    /// `∫|ρ|`, used with the size bound off the support hull.
    fn mass(&self) -> f64;

    fn hull(&self) -> Option<(f64, f64)>;

    /// Constant in `|Tρ(x)| ≤ size_const·mass / dist(x, hull)`.
    fn size_const(&self) -> f64 {
        1.0 / PI
    }
}

/// The exact Hilbert transform of a piecewise-constant density.
#[derive(Debug, Clone)]
pub struct HilbertField {
    density: JumpDensity,
}

impl HilbertField {
    pub fn new(density: JumpDensity) -> Self {
        HilbertField { density }
    }

    pub fn density(&self) -> &JumpDensity {
        &self.density
    }
}

impl Field for HilbertField {
    fn value(&self, x: f64) -> f64 {
        self.density.log_potential(x) / PI
    }

    fn midpoint_values(&self, origin: f64, step: f64, count: usize) -> Vec<f64> {
        let mut v = self.density.log_potential_midpoints(origin, step, count);
        for x in v.iter_mut() {
            *x /= PI;
        }
        v
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.density
            .log_potential_at_jumps()
            .into_iter()
            .map(|(t, j, r)| Singularity {
                at: t,
                coef: j / PI,
                regular: r / PI,
            })
            .collect()
    }

    fn mass(&self) -> f64 {
        self.density.l1_norm()
    }

    fn hull(&self) -> Option<(f64, f64)> {
        self.density.hull()
    }
}

/// Depth of the geometric refinement toward the origin.
const GRADED_LEVELS: i32 = 40;

/// `H(φ·|x|^α)` for piecewise-constant `φ` and `α ≥ 0`, via
/// `H(φw)(x) = w(x)·Hφ(x) + (1/π)∫ φ(y)(w(y) − w(x))/(x − y) dy`.
///
/// The second integrand has no singularity at `y = x`; it is integrated by
/// 4-point Gauss–Legendre on panels no wider than the lattice step, graded
/// geometrically toward the origin.
#[derive(Debug, Clone)]
pub struct PowerField {
    alpha: f64,
    base: JumpDensity,
    nodes: Vec<f64>,
    coefs: Vec<f64>,
    wnodes: Vec<f64>,
    mass: f64,
}

impl PowerField {
    pub fn new(base: JumpDensity, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("the weighted transform needs alpha >= 0, got {alpha}"),
            });
        }
        let pieces = base.pieces();
        let max_panel = match (base.lattice(), base.hull()) {
            (Some(l), _) => l.step,
            (None, Some((a, b))) => (b - a) / 1024.0,
            (None, None) => 1.0,
        };
        let mut nodes = Vec::new();
        let mut coefs = Vec::new();
        let mut push_panel = |a: f64, b: f64, v: f64| {
            for (y, w) in GL4.mapped(a, b) {
                nodes.push(y);
                coefs.push(v * w);
            }
        };
        let mut mass = 0.0;
        let w = Weight::PowerLaw { alpha };
        for &(a, b, v) in &pieces {
            mass += v.abs() * w.interval_mass(a, b);
            let parts: Vec<(f64, f64)> = if a < 0.0 && b > 0.0 {
                vec![(a, 0.0), (0.0, b)]
            } else {
                vec![(a, b)]
            };
            for (a, b) in parts {
                let n = ((b - a) / max_panel).ceil().max(1.0) as usize;
                let s = (b - a) / n as f64;
                for k in 0..n {
                    let (p, q) = (a + k as f64 * s, if k + 1 == n { b } else { a + (k + 1) as f64 * s });
                    if alpha > 0.0 && (p == 0.0 || q == 0.0) {
                        // geometric panels toward the origin
                        let sign = if q == 0.0 { -1.0 } else { 1.0 };
                        let mut outer = q - p;
                        for _ in 0..GRADED_LEVELS {
                            let inner = 0.5 * outer;
                            let (u, v2) = (sign * inner, sign * outer);
                            push_panel(u.min(v2), u.max(v2), v);
                            outer = inner;
                        }
                        push_panel((sign * outer).min(0.0), (sign * outer).max(0.0), v);
                    } else {
                        push_panel(p, q, v);
                    }
                }
            }
        }
        let wnodes = nodes.iter().map(|y: &f64| y.abs().powf(alpha)).collect();
        Ok(PowerField {
            alpha,
            base,
            nodes,
            coefs,
            wnodes,
            mass,
        })
    }

    fn w(&self, x: f64) -> f64 {
        x.abs().powf(self.alpha)
    }

    fn correction(&self, x: f64, wx: f64) -> f64 {
        let mut s = 0.0;
        for ((y, c), wy) in self.nodes.iter().zip(&self.coefs).zip(&self.wnodes) {
            let d = x - y;
            if d != 0.0 {
                s += c * (wy - wx) / d;
            }
        }
        s
    }
}

impl Field for PowerField {
    fn value(&self, x: f64) -> f64 {
        let wx = self.w(x);
        let main = if wx > 0.0 { wx * self.base.log_potential(x) } else { 0.0 };
        (main + self.correction(x, wx)) / PI
    }

    fn midpoint_values(&self, origin: f64, step: f64, count: usize) -> Vec<f64> {
        let logs = self.base.log_potential_midpoints(origin, step, count);
        logs.iter()
            .enumerate()
            .map(|(m, l)| {
                let x = origin + (m as f64 + 0.5) * step;
                let wx = self.w(x);
                (wx * l + self.correction(x, wx)) / PI
            })
            .collect()
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.base
            .log_potential_at_jumps()
            .into_iter()
            .filter(|(t, _, _)| *t != 0.0 || self.alpha == 0.0)
            .map(|(t, j, r)| {
                let wt = self.w(t);
                Singularity {
                    at: t,
                    coef: j * wt / PI,
                    regular: (wt * r + self.correction(t, wt)) / PI,
                }
            })
            .collect()
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn hull(&self) -> Option<(f64, f64)> {
        self.base.hull()
    }
}

/// `ρ·w` for a piecewise-constant weight, on the common refinement of breakpoints.
pub fn weighted_density(rho: &JumpDensity, w: &Weight) -> Result<JumpDensity> {
    if !w.is_piecewise_constant() {
        return Err(Error::InvalidParameter {
            name: "weight",
            reason: "expected a piecewise-constant weight".into(),
        });
    }
    let mut pieces = Vec::new();
    let breaks = w.breakpoints();
    for (a, b, v) in rho.pieces() {
        let lo = breaks.partition_point(|t| *t <= a);
        let hi = breaks.partition_point(|t| *t < b);
        let mut cuts = vec![a];
        cuts.extend_from_slice(&breaks[lo..hi]);
        cuts.push(b);
        for c in cuts.windows(2) {
            let (p, q) = (c[0], c[1]);
            if q > p {
                pieces.push((p, q, v * w.interval_mass(p, q) / (q - p)));
            }
        }
    }
    Ok(JumpDensity::from_pieces(&pieces, rho.lattice()))
}

/// The field of `T(ρ w)` for the Hilbert kernel, exact where `w` is piecewise constant.
pub fn weighted_field(rho: &JumpDensity, w: Option<&Weight>) -> Result<Box<dyn Field>> {
    Ok(match w {
        None | Some(Weight::ConstantOne) => Box::new(HilbertField::new(rho.clone())),
        Some(Weight::PowerLaw { alpha }) => Box::new(PowerField::new(rho.clone(), *alpha)?),
        Some(w @ Weight::Step(_)) => Box::new(HilbertField::new(weighted_density(rho, w)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::density::Lattice;

    fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
        let whole = GL4.integrate(a, b, f);
        let m = 0.5 * (a + b);
        let halves = GL4.integrate(a, m, f) + GL4.integrate(m, b, f);
        if depth == 0 || (whole - halves).abs() < 1e-13 {
            halves
        } else {
            adaptive(f, a, m, depth - 1) + adaptive(f, m, b, depth - 1)
        }
    }

    #[test]
    fn power_field_matches_direct_quadrature() {
        // ρ = 1_[0,1)·|y|^α at a point away from the support
        let lat = Some(Lattice { origin: -1.0, step: 1.0 / 64.0 });
        let rho = JumpDensity::from_pieces(&[(0.0, 1.0, 1.0)], lat);
        for alpha in [0.3, 0.7] {
            let f = PowerField::new(rho.clone(), alpha).unwrap();
            for x in [-0.37, 1.61, 3.0] {
                let want = adaptive(&|y: f64| y.powf(alpha) / (x - y), 0.0, 1.0, 30) / PI;
                let got = f.value(x);
                assert!((got - want).abs() < 1e-8, "alpha={alpha} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn power_field_inside_support() {
        // x inside: PV ∫_0^1 y^α/(x−y) dy = x^α·ln(x/(1−x)) + ∫ (y^α − x^α)/(x−y)
        let lat = Some(Lattice { origin: -1.0, step: 1.0 / 64.0 });
        let rho = JumpDensity::from_pieces(&[(0.0, 1.0, 1.0)], lat);
        let alpha = 0.5;
        let f = PowerField::new(rho, alpha).unwrap();
        let x: f64 = 0.4;
        let reg = |y: f64| (y.powf(alpha) - x.powf(alpha)) / (x - y);
        let want = (x.powf(alpha) * (x / (1.0 - x)).ln() + adaptive(&reg, 0.0, x, 40) + adaptive(&reg, x, 1.0, 40)) / PI;
        assert!((f.value(x) - want).abs() < 1e-7, "{} vs {want}", f.value(x));
    }

    #[test]
    fn zero_exponent_is_unweighted() {
        let rho = JumpDensity::from_pieces(&[(-0.5, 0.25, 2.0)], None);
        let p = PowerField::new(rho.clone(), 0.0).unwrap();
        let h = HilbertField::new(rho);
        for x in [-3.0, 0.1, 0.9] {
            assert!((p.value(x) - h.value(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn step_weight_product() {
        use crate::stepfn::GridSpec;
        let g = GridSpec::new(1, 1.0, 1).unwrap();
        let w = Weight::step(g, vec![1.0, 2.0, 3.0, 4.0], 5.0).unwrap();
        let rho = JumpDensity::from_pieces(&[(-0.25, 0.75, 1.0)], None);
        let p = weighted_density(&rho, &w).unwrap();
        assert_eq!(p.pieces(), vec![(-0.25, 0.0, 2.0), (0.0, 0.5, 3.0), (0.5, 0.75, 4.0)]);
    }
}
