use std::f64::consts::E;

use crate::error::{invalid, Result};

fn check_p_ap(p: f64, ap: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("must exceed 1, got {p}")));
    }
    if !(ap >= 1.0 && ap.is_finite()) {
        return Err(invalid("ap", format!("A_p characteristics are at least 1, got {ap}")));
    }
    Ok(())
}

/// Sharp weighted `L^p` envelope `p·p'·[w]^{max(1, 1/(p-1))}` with the implied
/// constant set to one.
pub fn hytonen_rhs(p: f64, ap: f64) -> Result<f64> {
    check_p_ap(p, ap)?;
    let p_conj = p / (p - 1.0);
    Ok(p * p_conj * ap.powf(f64::max(1.0, 1.0 / (p - 1.0))))
}

/// `h(x) = (1/x)(1+x)^{1+1/x}` on `[1, ∞)`.
pub fn h_func(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(invalid("x", format!("h is defined on [1, inf), got {x}")));
    }
    Ok((1.0 + x).powf(1.0 + 1.0 / x) / x)
}

/// `k(x) = x^{1/log(e+x)}` on `[1, ∞)`.
pub fn k_func(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(invalid("x", format!("k is defined on [1, inf), got {x}")));
    }
    Ok(x.powf(1.0 / (E + x).ln()))
}

/// The auxiliary exponent used for the good part of the weighted estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSelection {
    pub p: f64,
    pub ap: f64,
    /// `max{p, log(e + [w]_{A_p})}`
    pub m: f64,
    pub r: f64,
    pub r_conj: f64,
    /// `r^{r'}`
    pub bound_rr: f64,
    /// `[w]_{A_p}^{r'}`
    pub bound_ap: f64,
}

impl ParamSelection {
    pub fn rr_envelope(&self) -> f64 {
        4.0 * self.m
    }

    pub fn ap_envelope(&self) -> f64 {
        E * self.ap
    }

    /// Every invariant of the selection, by name.
    pub fn checks(&self) -> [(&'static str, bool); 5] {
        [
            ("r>2", self.r > 2.0),
            ("r'<2", self.r_conj < 2.0),
            (
                "conjugate",
                (1.0 / self.r + 1.0 / self.r_conj - 1.0).abs() <= 1e-12,
            ),
            ("r^r'<=4m", self.bound_rr <= self.rr_envelope()),
            ("ap^r'<=e*ap", self.bound_ap <= self.ap_envelope()),
        ]
    }

    pub fn invariants_hold(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }
}

pub fn choose_r(p: f64, ap: f64) -> Result<ParamSelection> {
    check_p_ap(p, ap)?;
    let m = p.max((E + ap).ln());
    let r = 1.0 + m;
    let r_conj = 1.0 + 1.0 / m;
    Ok(ParamSelection {
        p,
        ap,
        m,
        r,
        r_conj,
        bound_rr: r.powf(r_conj),
        bound_ap: ap.powf(r_conj),
    })
}
