//! Finite truncations of countable products of SFTs.

use crate::dyadic::{pow2_exponent, Dyadic};
use crate::error::{Error, Result};
use crate::systems::sft::Sft;
use crate::systems::word::UpPoint;

/// A finite product of SFT factors. Factor `n` (1-based) carries weight
/// `2^{-n}` in the product metric, so the whole space has diameter < 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    factors: Vec<Sft>,
}

impl Product {
    pub fn new(factors: Vec<Sft>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Input("product needs at least one factor".into()));
        }
        Ok(Product { factors })
    }

    pub fn factors(&self) -> &[Sft] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn point_valid(&self, p: &ProductPoint) -> bool {
        p.components.len() == self.factors.len()
            && p.components.iter().zip(&self.factors).all(|(c, f)| f.point_valid(c))
    }

    pub fn apply(&self, p: &ProductPoint) -> Result<ProductPoint> {
        if !self.point_valid(p) {
            return Err(Error::Validity("product point has an invalid component".into()));
        }
        Ok(ProductPoint { components: p.components.iter().map(|c| c.shifted()).collect() })
    }

    /// `d(x, y) = sum_n 2^{-n} d_n(x_n, y_n)`, exactly.
    pub fn distance(&self, x: &ProductPoint, y: &ProductPoint) -> Result<Dyadic> {
        if x.components.len() != self.factors.len() || y.components.len() != self.factors.len() {
            return Err(Error::TypeMismatch("product point of wrong arity".into()));
        }
        let mut sum = Dyadic::zero();
        for (n, ((xc, yc), f)) in x.components.iter().zip(&y.components).zip(&self.factors).enumerate() {
            let d = f.distance(xc, yc);
            sum = &sum + &(&Dyadic::pow2(-((n + 1) as i64)) * &d);
        }
        Ok(sum)
    }
}

/// One exact point per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductPoint {
    pub components: Vec<UpPoint>,
}

impl std::fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Smallest depth `D` with tail `sum_{n > D} 2^{-n} < eps/2`, i.e. `D = k + 2`
/// for `eps = 2^{-k}`.
pub fn product_truncation_depth(eps: &Dyadic) -> Result<u32> {
    let k = pow2_exponent(eps)?;
    Ok(k + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::word::Word;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    #[test]
    fn truncation_depth_examples() {
        assert_eq!(product_truncation_depth(&Dyadic::pow2(-3)).unwrap(), 5);
        assert_eq!(product_truncation_depth(&Dyadic::one()).unwrap(), 2);
        assert_eq!(product_truncation_depth(&Dyadic::pow2(-1)).unwrap(), 3);
        assert!(product_truncation_depth(&Dyadic::parse("3/4").unwrap()).is_err());
    }

    #[test]
    fn product_metric_weights_factors() {
        let p = Product::new(vec![Sft::full_shift(2), Sft::full_shift(2)]).unwrap();
        let x = ProductPoint { components: vec![up("", "0"), up("", "0")] };
        let y = ProductPoint { components: vec![up("", "1"), up("", "0")] };
        // factor 1 differs at index 0: 2^{-1} * 1
        assert_eq!(p.distance(&x, &y).unwrap(), Dyadic::pow2(-1));
        let z = ProductPoint { components: vec![up("", "1"), up("0", "1")] };
        // add factor 2: 2^{-2} * 2^{-1}
        assert_eq!(
            p.distance(&x, &z).unwrap(),
            &Dyadic::pow2(-1) + &Dyadic::pow2(-3)
        );
    }
}
