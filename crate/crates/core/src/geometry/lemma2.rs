//! Dilation of finite cube unions under a doubling measure.

use super::box_union::BoxUnion;
use super::cube::Cube;
use crate::error::{invalid, Error, Result};
use crate::weights::MeasureSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Check {
    /// `μ(⋃ Q(x_j, a·r_j))`
    pub lhs: f64,
    /// `C_{μ,a} · μ(⋃ Q(x_j, r_j))`
    pub rhs: f64,
    pub doubling_constant: f64,
}

impl Lemma2Check {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_tol)
    }
}

fn validate(cubes: &[Cube], a: f64) -> Result<usize> {
    let first = cubes
        .first()
        .ok_or_else(|| invalid("cubes", "at least one cube is required"))?;
    if !(a > 1.0 && a.is_finite()) {
        return Err(invalid("a", format!("dilation factor must exceed 1, got {a}")));
    }
    let dim = first.dim();
    if let Some(c) = cubes.iter().find(|c| c.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: c.dim(),
        });
    }
    Ok(dim)
}

pub fn cube_union(cubes: &[Cube]) -> Result<BoxUnion> {
    let dim = cubes.first().map_or(1, Cube::dim);
    let boxes: Vec<_> = cubes.iter().map(Cube::to_box).collect();
    BoxUnion::from_boxes(dim, &boxes)
}

pub fn lemma2_check(cubes: &[Cube], a: f64, mu: &MeasureSpec) -> Result<Lemma2Check> {
    let dim = validate(cubes, a)?;
    mu.check_dim(dim)?;
    let dilated: Vec<Cube> = cubes.iter().map(|c| c.dilate(a)).collect::<Result<_>>()?;
    let c = mu.doubling_constant(a, dim);
    Ok(Lemma2Check {
        lhs: mu.measure(&cube_union(&dilated)?),
        rhs: c * mu.measure(&cube_union(cubes)?),
        doubling_constant: c,
    })
}

/// One step of the greedy disjointification used to prove the dilation bound.
#[derive(Debug, Clone)]
pub struct WitnessTriple {
    /// Position of this cube in the caller's list.
    pub input_index: usize,
    /// `F_j = Q(x_j, r_j) ∖ ⋃_{k<j} F_k`
    pub part: BoxUnion,
    /// `F̃_j`, the image of `F_j` under dilation by `a` about `x_j`.
    pub dilated_part: BoxUnion,
    /// `F_j* = Q(x_j, a r_j) ∖ ⋃_{k<j} F_k*`
    pub star_part: BoxUnion,
}

impl WitnessTriple {
    pub fn contained(&self) -> bool {
        self.star_part
            .is_subset_of(&self.dilated_part)
            .expect("parts share a dimension")
    }
}

/// `{a(y − c) + c : y ∈ part}` for `part ⊆ q`. Endpoints on the boundary of
/// `q` land exactly on the boundary of `aq`, so containment tests against
/// dilated cubes see no rounding.
fn dilate_part(part: &BoxUnion, q: &Cube, a: f64) -> Result<BoxUnion> {
    let inner = q.to_box();
    let outer = q.dilate(a)?.to_box();
    let c = q.center();
    Ok(part.map_axes(|k, t| {
        if t == inner.lo[k] {
            outer.lo[k]
        } else if t == inner.hi[k] {
            outer.hi[k]
        } else {
            c[k] + a * (t - c[k])
        }
    }))
}

/// Processes cubes by non-increasing side (ties by input index).
pub fn lemma2_dilation_witness(cubes: &[Cube], a: f64) -> Result<Vec<WitnessTriple>> {
    let dim = validate(cubes, a)?;
    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by(|&i, &j| cubes[j].side().total_cmp(&cubes[i].side()));
    let mut covered = BoxUnion::empty(dim)?;
    let mut covered_star = BoxUnion::empty(dim)?;
    let mut out = Vec::with_capacity(cubes.len());
    for i in order {
        let q = &cubes[i];
        let part = BoxUnion::from_box(q.to_box()).difference(&covered)?;
        let star_part = BoxUnion::from_box(q.dilate(a)?.to_box()).difference(&covered_star)?;
        covered = covered.union(&part)?;
        covered_star = covered_star.union(&star_part)?;
        out.push(WitnessTriple {
            input_index: i,
            dilated_part: dilate_part(&part, q, a)?,
            part,
            star_part,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cube_equality() {
        let q = [Cube::new(&[0.0], 1.0).unwrap()];
        let c = lemma2_check(&q, 2.0, &MeasureSpec::Lebesgue).unwrap();
        assert_eq!((c.lhs, c.rhs), (2.0, 2.0));
        let w = lemma2_dilation_witness(&q, 2.0).unwrap();
        assert_eq!(w[0].star_part, w[0].dilated_part);
        assert_eq!(w[0].star_part, BoxUnion::from_intervals(vec![(-1.0, 1.0)]));
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = [Cube::new(&[0.0], 1.0).unwrap()];
        assert!(lemma2_check(&q, 1.0, &MeasureSpec::Lebesgue).is_err());
        assert!(lemma2_check(&[], 2.0, &MeasureSpec::Lebesgue).is_err());
    }

    #[test]
    fn nested_cubes_strict_containment() {
        let q = [
            Cube::new(&[0.25], 0.5).unwrap(),
            Cube::new(&[0.0], 2.0).unwrap(),
        ];
        let w = lemma2_dilation_witness(&q, 2.0).unwrap();
        // the big cube goes first
        assert_eq!(w[0].input_index, 1);
        assert!(w[1].part.is_empty());
        assert!(w.iter().all(WitnessTriple::contained));
        assert!(w[1].star_part.is_empty());
        // strict: F̃_1 = [-2, 2) = F_1*, the inner part adds nothing
        assert_eq!(w[0].dilated_part.measure(), 4.0);
    }
}
