//! Piecewise-constant densities on the line stored by their jumps, and the
//! exact Hilbert transform `Hρ(x) = (1/π) Σ_j J_j ln|x − t_j|`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::IntervalSet;
use crate::stepfn::{GridSpec, StepFunction};

/// Uniform lattice `origin + k·step` on which most jumps sit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub origin: f64,
    pub step: f64,
}

impl Lattice {
    pub fn of_grid(grid: &GridSpec) -> Lattice {
        Lattice {
            origin: -grid.half_width(),
            step: grid.cell_side(),
        }
    }

    pub fn point(&self, k: i64) -> f64 {
        self.origin + k as f64 * self.step
    }

    /// Index of `t` when `t` lies exactly on the lattice.
    pub fn index_of(&self, t: f64) -> Option<i64> {
        let k = ((t - self.origin) / self.step).round();
        if k.abs() < 1e15 && self.point(k as i64) == t {
            Some(k as i64)
        } else {
            None
        }
    }
}

/// A compactly supported piecewise-constant density.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpDensity {
    lattice: Option<Lattice>,
    // lattice jumps sorted by index, all nonzero
    on_idx: Vec<i64>,
    on_jump: Vec<f64>,
    // free jumps sorted by position, all nonzero
    off: Vec<(f64, f64)>,
}

fn merge_lattice(mut v: Vec<(i64, f64)>) -> (Vec<i64>, Vec<f64>) {
    v.sort_by_key(|p| p.0);
    let mut merged: Vec<(i64, f64)> = Vec::with_capacity(v.len());
    for (k, j) in v {
        match merged.last_mut() {
            Some(last) if last.0 == k => last.1 += j,
            _ => merged.push((k, j)),
        }
    }
    merged.into_iter().filter(|p| p.1 != 0.0).unzip()
}

fn merge_off(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (t, j) in v {
        match out.last_mut() {
            Some(last) if last.0 == t => last.1 += j,
            _ => out.push((t, j)),
        }
    }
    out.retain(|p| p.1 != 0.0);
    out
}

impl JumpDensity {
    pub fn zero(lattice: Option<Lattice>) -> Self {
        JumpDensity {
            lattice,
            on_idx: Vec::new(),
            on_jump: Vec::new(),
            off: Vec::new(),
        }
    }

    /// Density given as pieces `(a, b, value)` on `[a, b)`. Jumps landing
    /// exactly on `lattice` are stored as lattice jumps.
    pub fn from_pieces(pieces: &[(f64, f64, f64)], lattice: Option<Lattice>) -> Self {
        let mut on = Vec::new();
        let mut off = Vec::new();
        for &(a, b, v) in pieces {
            if b <= a || v == 0.0 {
                continue;
            }
            for (t, j) in [(a, v), (b, -v)] {
                match lattice.and_then(|l| l.index_of(t)) {
                    Some(k) => on.push((k, j)),
                    None => off.push((t, j)),
                }
            }
        }
        let (on_idx, on_jump) = merge_lattice(on);
        JumpDensity {
            lattice,
            on_idx,
            on_jump,
            off: merge_off(off),
        }
    }

    pub fn from_step(f: &StepFunction) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::LineOnly {
                what: "the Hilbert transform",
                dim: f.dim(),
            });
        }
        let lat = Lattice::of_grid(f.grid());
        let vals = f.values();
        let mut on = Vec::with_capacity(vals.len() + 1);
        let mut prev = 0.0;
        for (k, &v) in vals.iter().chain([&0.0]).enumerate() {
            if v != prev {
                on.push((k as i64, v - prev));
            }
            prev = v;
        }
        let (on_idx, on_jump) = merge_lattice(on);
        Ok(JumpDensity {
            lattice: Some(lat),
            on_idx,
            on_jump,
            off: Vec::new(),
        })
    }

    /// `c·1_S` for a union of intervals.
    pub fn from_set(set: &IntervalSet, c: f64, lattice: Option<Lattice>) -> Self {
        let pieces: Vec<_> = set.intervals().iter().map(|&(a, b)| (a, b, c)).collect();
        JumpDensity::from_pieces(&pieces, lattice)
    }

    pub fn lattice(&self) -> Option<Lattice> {
        self.lattice
    }

    /// `self + c·other`; lattice jumps combine index-wise so cancellations are exact.
    pub fn add_scaled(&self, c: f64, other: &JumpDensity) -> JumpDensity {
        let lattice = self.lattice.or(other.lattice);
        let mut on: Vec<(i64, f64)> = self
            .on_idx
            .iter()
            .copied()
            .zip(self.on_jump.iter().copied())
            .collect();
        let mut off = self.off.clone();
        let same = match (self.lattice, other.lattice) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        for (&k, &j) in other.on_idx.iter().zip(&other.on_jump) {
            let t = other.lattice.expect("lattice jumps need a lattice").point(k);
            match (same, lattice.and_then(|l| l.index_of(t))) {
                (true, Some(k2)) => on.push((k2, c * j)),
                _ => off.push((t, c * j)),
            }
        }
        for &(t, j) in &other.off {
            match lattice.and_then(|l| l.index_of(t)) {
                Some(k) => on.push((k, c * j)),
                None => off.push((t, c * j)),
            }
        }
        let (on_idx, on_jump) = merge_lattice(on);
        JumpDensity {
            lattice,
            on_idx,
            on_jump,
            off: merge_off(off),
        }
    }

    pub fn scale(&self, c: f64) -> JumpDensity {
        JumpDensity::zero(self.lattice).add_scaled(c, self)
    }

    pub fn is_zero(&self) -> bool {
        self.on_idx.is_empty() && self.off.is_empty()
    }

    pub fn jump_count(&self) -> usize {
        self.on_idx.len() + self.off.len()
    }

    pub fn lattice_jumps(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.on_idx.iter().copied().zip(self.on_jump.iter().copied())
    }

    pub fn free_jumps(&self) -> &[(f64, f64)] {
        &self.off
    }

    /// All jumps `(t, J)` sorted by position.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = match self.lattice {
            Some(l) => self.lattice_jumps().map(|(k, j)| (l.point(k), j)).collect(),
            None => Vec::new(),
        };
        v.extend_from_slice(&self.off);
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    /// Constant pieces `(a, b, value)` with nonzero value.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let jumps = self.jumps();
        let mut out = Vec::new();
        let mut level = 0.0;
        for w in jumps.windows(2) {
            level += w[0].1;
            if level != 0.0 && w[1].0 > w[0].0 {
                out.push((w[0].0, w[1].0, level));
            }
        }
        out
    }

    /// `∫|ρ|`.
    pub fn l1_norm(&self) -> f64 {
        self.pieces().iter().map(|(a, b, v)| v.abs() * (b - a)).sum()
    }

    /// `∫ρ`.
    pub fn integral(&self) -> f64 {
        // ∫ρ = −Σ J_j t_j for a compactly supported density
        -self.jumps().iter().map(|(t, j)| t * j).sum::<f64>()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.jumps().iter().take_while(|(t, _)| *t <= x).map(|p| p.1).sum()
    }

    /// Closed hull of the support, `None` for the zero density.
    pub fn hull(&self) -> Option<(f64, f64)> {
        let j = self.jumps();
        Some((j.first()?.0, j.last()?.0))
    }

    /// `π·Hρ(x)` without checks; `±∞` at jump points.
    pub fn log_potential(&self, x: f64) -> f64 {
        let mut s = 0.0;
        if let Some(l) = self.lattice {
            for (&k, &j) in self.on_idx.iter().zip(&self.on_jump) {
                s += j * (x - l.point(k)).abs().ln();
            }
        }
        for &(t, j) in &self.off {
            s += j * (x - t).abs().ln();
        }
        s
    }

    /// `Hρ(x)`, an error at a jump point.
    pub fn hilbert(&self, x: f64) -> Result<f64> {
        let at_jump = self.off.iter().any(|p| p.0 == x)
            || self
                .lattice
                .and_then(|l| l.index_of(x))
                .is_some_and(|k| self.on_idx.binary_search(&k).is_ok());
        if at_jump {
            return Err(Error::JumpPoint { x });
        }
        Ok(self.log_potential(x) / PI)
    }

    /// `π·Hρ` at midpoints `origin + (m + ½)·step`, `m < count`, of a lattice
    /// with the same step. Lattice jumps use a table of `ln|d + ½|`.
    pub fn log_potential_midpoints(&self, origin: f64, step: f64, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        let aligned = self.lattice.and_then(|l| {
            let shift = (origin - l.origin) / step;
            (l.step == step && shift.fract() == 0.0).then_some(shift as i64)
        });
        match aligned {
            Some(shift) if !self.on_idx.is_empty() => {
                // x_m − t_k = (m + shift − k + ½)·step
                let kmin = self.on_idx[0];
                let kmax = *self.on_idx.last().unwrap();
                let dmin = shift - kmax;
                let dmax = count as i64 - 1 + shift - kmin;
                let table: Vec<f64> = (dmin..=dmax).map(|d| (d as f64 + 0.5).abs().ln()).collect();
                let total: f64 = self.on_jump.iter().sum();
                let base = total * step.ln();
                for o in out.iter_mut() {
                    *o = base;
                }
                for (&k, &j) in self.on_idx.iter().zip(&self.on_jump) {
                    let off = (shift - k - dmin) as usize;
                    let row = &table[off..off + count];
                    for (o, t) in out.iter_mut().zip(row) {
                        *o += j * t;
                    }
                }
            }
            Some(_) => {}
            None => {
                let l = self.lattice.unwrap_or(Lattice { origin, step });
                for (m, o) in out.iter_mut().enumerate() {
                    let x = origin + (m as f64 + 0.5) * step;
                    *o = self
                        .lattice_jumps()
                        .map(|(k, j)| j * (x - l.point(k)).abs().ln())
                        .sum();
                }
            }
        }
        for (m, o) in out.iter_mut().enumerate() {
            let x = origin + (m as f64 + 0.5) * step;
            for &(t, j) in &self.off {
                *o += j * (x - t).abs().ln();
            }
        }
        out
    }

    /// For every jump `t_j`, `π·Hρ(t_j)` with the `j`-th term left out.
    pub fn log_potential_at_jumps(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.jump_count());
        if let Some(l) = self.lattice {
            let n = self.on_idx.len();
            if n > 0 {
                let span = (self.on_idx[n - 1] - self.on_idx[0]) as usize;
                let table: Vec<f64> = (0..=span).map(|d| (d as f64).ln()).collect();
                let total: f64 = self.on_jump.iter().sum();
                let ln_h = l.step.ln();
                for i in 0..n {
                    let ki = self.on_idx[i];
                    let mut s = (total - self.on_jump[i]) * ln_h;
                    for j in 0..n {
                        if j != i {
                            s += self.on_jump[j] * table[(ki - self.on_idx[j]).unsigned_abs() as usize];
                        }
                    }
                    let t = l.point(ki);
                    for &(u, jj) in &self.off {
                        s += jj * (t - u).abs().ln();
                    }
                    out.push((t, self.on_jump[i], s));
                }
            }
        }
        for (i, &(t, j)) in self.off.iter().enumerate() {
            let mut s = 0.0;
            if let Some(l) = self.lattice {
                for (k, jj) in self.lattice_jumps() {
                    s += jj * (t - l.point(k)).abs().ln();
                }
            }
            for (i2, &(u, jj)) in self.off.iter().enumerate() {
                if i2 != i {
                    s += jj * (t - u).abs().ln();
                }
            }
            out.push((t, j, s));
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

/// Exact Hilbert transform of a step function on the line.
pub fn hilbert_exact(f: &StepFunction, x: f64) -> Result<f64> {
    JumpDensity::from_step(f)?.hilbert(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_fn(level: i32, lo: f64, hi: f64) -> StepFunction {
        let g = GridSpec::new(1, 2.0, level).unwrap();
        StepFunction::from_fn(g, |x| if x[0] >= lo && x[0] < hi { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn symmetric_box() {
        let f = box_fn(4, -1.0, 1.0);
        assert!((hilbert_exact(&f, 3.0).unwrap() - 2f64.ln() / PI).abs() < 1e-15);
        assert_eq!(hilbert_exact(&f, 0.0).unwrap(), 0.0);
        assert!(matches!(hilbert_exact(&f, 1.0), Err(Error::JumpPoint { .. })));
        // interior cell boundary without a jump is a regular point
        assert!(hilbert_exact(&f, 0.5).is_ok());
    }

    #[test]
    fn pieces_round_trip() {
        let f = box_fn(3, -0.5, 1.25);
        let d = JumpDensity::from_step(&f).unwrap();
        assert_eq!(d.pieces(), vec![(-0.5, 1.25, 1.0)]);
        assert_eq!(d.l1_norm(), 1.75);
        assert_eq!(d.integral(), 1.75);
        assert_eq!(d.hull(), Some((-0.5, 1.25)));
    }

    #[test]
    fn cancellation_is_exact() {
        let f = box_fn(4, -1.0, 1.0);
        let d = JumpDensity::from_step(&f).unwrap();
        assert!(d.add_scaled(-1.0, &d).is_zero());
        let lat = d.lattice();
        let free = JumpDensity::from_pieces(&[(0.1, 0.3, 2.0)], lat);
        assert_eq!(free.free_jumps().len(), 2);
        let sum = d.add_scaled(1.0, &free);
        assert_eq!(sum.jump_count(), 4);
        assert!((sum.value_at(0.2) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_table_matches_direct() {
        let g = GridSpec::new(1, 1.0, 5).unwrap();
        let f = StepFunction::from_fn(g.clone(), |x| (3.0 * x[0]).sin().max(0.0)).unwrap();
        let d = JumpDensity::from_step(&f)
            .unwrap()
            .add_scaled(0.5, &JumpDensity::from_pieces(&[(0.013, 2.7, 1.0)], None));
        let h = g.cell_side();
        let fast = d.log_potential_midpoints(-3.0, h, 6 * 32);
        for (m, v) in fast.iter().enumerate() {
            let x = -3.0 + (m as f64 + 0.5) * h;
            assert!((v - d.log_potential(x)).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn regular_parts_at_jumps() {
        let d = JumpDensity::from_pieces(&[(-1.0, 0.5, 1.0), (0.25, 0.375, -2.0)], Some(Lattice { origin: 0.0, step: 0.125 }))
            .add_scaled(1.0, &JumpDensity::from_pieces(&[(0.3, 0.7, 1.0)], None));
        for (t, j, r) in d.log_potential_at_jumps() {
            let eps = 1e-9;
            let near = d.log_potential(t + eps) - j * eps.ln();
            assert!((near - r).abs() < 1e-6, "t={t}");
        }
    }
}
