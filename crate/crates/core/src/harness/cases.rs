//! Seeded random inputs for the audits.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Aabb, BoxUnion, Cube};
use crate::stepfn::{GridSpec, StepFunction};

/// A union of one to four random grid-aligned boxes, each at least two cells wide.
pub fn random_open_set(grid: &GridSpec, rng: &mut ChaCha8Rng) -> BoxUnion {
    let n = grid.per_axis() as i64;
    let h = grid.cell_side();
    let l = grid.half_width();
    let count = rng.gen_range(1..=4);
    let boxes: Vec<Aabb> = (0..count)
        .map(|_| {
            let mut lo = [0.0; 2];
            let mut hi = [0.0; 2];
            for k in 0..grid.dim() {
                let len = rng.gen_range(2..=(n / 4).max(2));
                let start = rng.gen_range(0..=(n - len));
                lo[k] = -l + start as f64 * h;
                hi[k] = -l + (start + len) as f64 * h;
            }
            Aabb::new(&lo[..grid.dim()], &hi[..grid.dim()]).expect("nonempty box")
        })
        .collect();
    BoxUnion::from_boxes(grid.dim(), &boxes).expect("boxes share the grid dimension")
}

/// A random mean-zero function supported in a random dyadic subcube of the window.
pub fn random_mean_zero(grid: &GridSpec, rng: &mut ChaCha8Rng) -> (StepFunction, Cube) {
    let l = grid.half_width();
    let j = grid.level();
    // side between 4 cells and a quarter of the window
    let coarsest = (-(l / 2.0).log2()).ceil() as i32;
    let level = rng.gen_range(coarsest.min(j - 2)..=j - 2);
    let side = (-(level as f64)).exp2();
    let slots = (2.0 * l / side).round() as i64;
    let k = rng.gen_range(0..slots);
    let lo = -l + k as f64 * side;
    let q = Cube::new(&[lo + side / 2.0], side).expect("positive side");
    let mut f = StepFunction::from_fn(grid.clone(), |x| {
        if x[0] >= lo && x[0] < lo + side {
            1.0
        } else {
            0.0
        }
    })
    .expect("line grid");
    let inside: Vec<usize> = (0..grid.cell_count()).filter(|&i| f.values()[i] != 0.0).collect();
    let mut v: Vec<f64> = inside.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let mut values = vec![0.0; grid.cell_count()];
    for (i, x) in inside.iter().zip(v) {
        values[*i] = x;
    }
    f = StepFunction::new(grid.clone(), values).expect("matching length");
    (f, q)
}

/// One to eight cubes with centers in `[-1, 1]^dim` and sides in `[10^-2, 1]`.
pub fn random_cubes(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Cube> {
    let n = rng.gen_range(1..=8);
    (0..n)
        .map(|_| {
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Cube::new(&c, 10f64.powf(rng.gen_range(-2.0..0.0))).expect("positive side")
        })
        .collect()
}

/// Piecewise constant on blocks of width `1/16`, zero outside `[-L/2, L/2)`.
pub fn random_staircase(grid: &GridSpec, rng: &mut ChaCha8Rng) -> StepFunction {
    let l = grid.half_width();
    let blocks = (l * 16.0).round() as usize;
    let heights: Vec<f64> = (0..blocks)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-2.0..2.0) })
        .collect();
    StepFunction::from_fn(grid.clone(), |x| {
        let t = x[0] + l / 2.0;
        if t < 0.0 || t >= l {
            0.0
        } else {
            heights[((t * 16.0) as usize).min(blocks - 1)]
        }
    })
    .expect("line grid")
}

/// A point at least one source cell away from every jump, drawn from `[lo, hi)`.
pub fn point_off_jumps(jumps: &[f64], h: f64, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    for _ in 0..1000 {
        let x = rng.gen_range(lo..hi);
        let k = jumps.partition_point(|t| *t < x);
        let near = [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter_map(|i| jumps.get(i))
            .any(|t| (t - x).abs() < h);
        if !near {
            return Some(x);
        }
    }
    None
}
