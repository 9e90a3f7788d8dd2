//! Gauss–Legendre rules on `[-1, 1]`.

pub struct Rule {
    pub nodes: &'static [f64],
    pub weights: &'static [f64],
}

pub const GL3: Rule = Rule {
    nodes: &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
    weights: &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
};

pub const GL4: Rule = Rule {
    nodes: &[
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_26,
        0.339_981_043_584_856_26,
        0.861_136_311_594_052_6,
    ],
    weights: &[
        0.347_854_845_137_453_7,
        0.652_145_154_862_546_2,
        0.652_145_154_862_546_2,
        0.347_854_845_137_453_7,
    ],
};

pub const GL8: Rule = Rule {
    nodes: &[
        -0.960_289_856_497_536_2,
        -0.796_666_477_413_626_7,
        -0.525_532_409_916_329,
        -0.183_434_642_495_649_78,
        0.183_434_642_495_649_78,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_2,
    ],
    weights: &[
        0.101_228_536_290_376_69,
        0.222_381_034_453_374_34,
        0.313_706_645_877_887_05,
        0.362_683_783_378_361_77,
        0.362_683_783_378_361_77,
        0.313_706_645_877_887_05,
        0.222_381_034_453_374_34,
        0.101_228_536_290_376_69,
    ],
};

impl Rule {
    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(self.weights)
            .map(move |(x, w)| (c + r * x, r * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        for (rule, deg) in [(&GL3, 5), (&GL4, 7), (&GL8, 15)] {
            let got = rule.integrate(-0.5, 2.0, |x| x.powi(deg));
            let want = (2f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!((got - want).abs() < 1e-12 * want.abs(), "deg {deg}");
        }
    }
}
