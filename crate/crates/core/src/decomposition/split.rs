use super::Decomposition;
use crate::error::{invalid, Error, Result};
use crate::geometry::BoxUnion;
use crate::operators::{weighted_field, EvalWindow, Field, JumpDensity, Sampler};
use crate::stepfn::StepFunction;
use crate::weights::MeasureSpec;

/// Measures of the pieces bounding `μ({|T(fw)|/w > λ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitReport {
    pub lambda: f64,
    /// `μ({|T(fw)|/w > λ})`, measured directly.
    pub direct: f64,
    /// `μ({|T(gw)|/w > λ/2})`
    pub good_term: f64,
    /// `μ(Ω ∪ E*)`
    pub term_i: f64,
    /// `μ({x ∉ Ω ∪ E* : |T((b − λ1_E)w)|/w > λ/4})`
    pub term_ii: f64,
    /// `μ({|T(w1_E)|/w > 1/4})`
    pub term_iii: f64,
    pub total: f64,
    /// `‖f‖_{L¹(μ)} / λ`
    pub rhs_scale: f64,
}

impl SplitReport {
    pub fn dominates(&self) -> bool {
        self.direct <= self.total + 1e-9
    }

    pub fn normalized_total(&self) -> f64 {
        self.total / self.rhs_scale
    }
}

/// The Hilbert transform of `f·w` with its lattice samples, shared by every `λ`.
pub struct Transformed<'a> {
    f: &'a StepFunction,
    mu: MeasureSpec,
    rho: JumpDensity,
    field: Box<dyn Field>,
    window: EvalWindow,
    lattice: Vec<f64>,
    l1: f64,
}

impl<'a> Transformed<'a> {
    pub fn new(f: &'a StepFunction, mu: &MeasureSpec) -> Result<Self> {
        mu.check_dim(f.dim())?;
        let rho = JumpDensity::from_step(f)?;
        let field = weighted_field(&rho, mu.weight())?;
        let window = EvalWindow::around(f.grid());
        let lattice = field.midpoint_values(window.origin, window.step, window.count);
        Ok(Transformed {
            f,
            mu: mu.clone(),
            rho,
            field,
            window,
            lattice,
            l1: f.l1_norm(mu)?,
        })
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    fn measure(&self, field: &dyn Field, lattice: Vec<f64>, level: f64) -> Result<BoxUnion> {
        let set = Sampler::with_lattice(field, self.mu.weight(), self.window, lattice).superlevel(level)?;
        Ok(BoxUnion::Line(set))
    }

    /// `{|T(fw)|/w > λ}`
    pub fn superlevel(&self, lambda: f64) -> Result<BoxUnion> {
        self.measure(self.field.as_ref(), self.lattice.clone(), lambda)
    }

    pub fn superlevel_measure(&self, lambda: f64) -> Result<f64> {
        Ok(self.mu.measure(&self.superlevel(lambda)?))
    }

    pub fn split(&self, dec: &Decomposition) -> Result<SplitReport> {
        if dec.mu != self.mu {
            return Err(invalid("measure", "decomposition was built for another measure"));
        }
        if dec.good.grid() != self.f.grid() {
            return Err(Error::DimensionMismatch {
                expected: self.f.grid().cell_count(),
                got: dec.good.grid().cell_count(),
            });
        }
        let lambda = dec.lambda;
        let w = self.mu.weight();
        let lat = self.rho.lattice();
        let bad = self.f.sub(&dec.good)?;
        let rho_b = JumpDensity::from_step(&bad)?;
        let cancel = dec.cancel.intervals().unwrap_or(&[]);
        let rho_e = JumpDensity::from_pieces(
            &cancel.iter().map(|&(a, b)| (a, b, 1.0)).collect::<Vec<_>>(),
            lat,
        );
        let field_b = weighted_field(&rho_b, w)?;
        let field_e = weighted_field(&rho_e, w)?;
        let field_g = weighted_field(&self.rho.add_scaled(-1.0, &rho_b), w)?;
        let field_be = weighted_field(&rho_b.add_scaled(-lambda, &rho_e), w)?;
        let win = self.window;
        let lat_b = field_b.midpoint_values(win.origin, win.step, win.count);
        let lat_e = field_e.midpoint_values(win.origin, win.step, win.count);
        let lat_g: Vec<f64> = self.lattice.iter().zip(&lat_b).map(|(f, b)| f - b).collect();
        let lat_be: Vec<f64> = lat_b.iter().zip(&lat_e).map(|(b, e)| b - lambda * e).collect();

        let direct = self.superlevel_measure(lambda)?;
        let good_term = self.mu.measure(&self.measure(field_g.as_ref(), lat_g, lambda / 2.0)?);
        let cover = dec.omega.union(&dec.cancel_star)?;
        let term_i = self.mu.measure(&cover);
        let far = self
            .measure(field_be.as_ref(), lat_be, lambda / 4.0)?
            .difference(&cover)?;
        let term_ii = self.mu.measure(&far);
        let term_iii = self.mu.measure(&self.measure(field_e.as_ref(), lat_e, 0.25)?);
        Ok(SplitReport {
            lambda,
            direct,
            good_term,
            term_i,
            term_ii,
            term_iii,
            total: good_term + term_i + term_ii + term_iii,
            rhs_scale: self.l1 / lambda,
        })
    }
}

/// The split of `μ({|T(fw)|/w > λ})` for a decomposition of `f`.
pub fn split_terms(dec: &Decomposition, f: &StepFunction) -> Result<SplitReport> {
    Transformed::new(f, &dec.mu)?.split(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::decompose;
    use crate::stepfn::GridSpec;

    #[test]
    fn below_lambda_has_only_good_term() {
        let g = GridSpec::new(1, 1.0, 6).unwrap();
        let f = StepFunction::from_fn(g, |x| if (0.0..0.5).contains(&x[0]) { 0.5 } else { 0.0 }).unwrap();
        let d = decompose(&f, 1.0, &MeasureSpec::Lebesgue, None).unwrap();
        let s = split_terms(&d, &f).unwrap();
        assert_eq!((s.term_i, s.term_ii, s.term_iii), (0.0, 0.0, 0.0));
        assert_eq!(s.total, s.good_term);
        // g = f, and the good threshold is λ/2
        let direct_half = Transformed::new(&f, &d.mu).unwrap().superlevel_measure(0.5).unwrap();
        assert!((s.good_term - direct_half).abs() < 1e-12);
    }

    #[test]
    fn box_of_height_two_is_dominated() {
        let g = GridSpec::new(1, 1.0, 7).unwrap();
        let f = StepFunction::from_fn(g, |x| if (0.0..1.0).contains(&x[0]) { 2.0 } else { 0.0 }).unwrap();
        let d = decompose(&f, 1.0, &MeasureSpec::Lebesgue, None).unwrap();
        let s = split_terms(&d, &f).unwrap();
        assert!(s.dominates(), "{s:?}");
        assert_eq!(s.rhs_scale, 2.0);
        assert!(s.normalized_total().is_finite());
        // |{|H(2·1_[0,1))| > 1}| = 2/sinh(π/2)
        let want = 2.0 / (std::f64::consts::FRAC_PI_2).sinh();
        assert!((s.direct - want).abs() < 1e-9 * want, "{} vs {want}", s.direct);
    }
}
