//! Finite presentations of the zero-dimensional systems handled by the
//! toolkit: full shifts and SFTs, finite-depth odometers, and finite
//! truncations of SFT products, with exact points and exact dyadic metrics.
//!
//! All values are immutable after construction and every operation is pure.

mod odometer;
mod product;
mod sft;
mod word;

pub mod io;

pub use odometer::{Odometer, OdometerPoint};
pub use product::{product_truncation_depth, Product, ProductPoint};
pub use sft::Sft;
pub use word::{ApproxPoint, Symbol, UpPoint, Word};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// A presented system of any of the three supported kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum System {
    Sft(Sft),
    Odometer(Odometer),
    Product(Product),
}

/// An exact point of a [`System`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Sft(UpPoint),
    Odometer(OdometerPoint),
    Product(ProductPoint),
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Sft(p) => write!(f, "{p}"),
            Point::Odometer(p) => write!(f, "{p}"),
            Point::Product(p) => write!(f, "{p}"),
        }
    }
}

impl System {
    /// Total membership test.
    pub fn validate_point(&self, p: &Point) -> bool {
        match (self, p) {
            (System::Sft(s), Point::Sft(x)) => s.point_valid(x),
            (System::Odometer(o), Point::Odometer(x)) => o.point_valid(x),
            (System::Product(pr), Point::Product(x)) => pr.point_valid(x),
            _ => false,
        }
    }

    /// The exact image of `p` under the system map (shift or +1).
    pub fn apply_map(&self, p: &Point) -> Result<Point> {
        if !self.validate_point(p) {
            return Err(Error::Validity(format!("{p} is not a point of the system")));
        }
        Ok(match (self, p) {
            (System::Sft(_), Point::Sft(x)) => Point::Sft(x.shifted()),
            (System::Odometer(o), Point::Odometer(x)) => Point::Odometer(o.successor(x)?),
            (System::Product(pr), Point::Product(x)) => Point::Product(pr.apply(x)?),
            _ => unreachable!("validated above"),
        })
    }

    pub fn apply_map_n(&self, p: &Point, n: usize) -> Result<Point> {
        if !self.validate_point(p) {
            return Err(Error::Validity(format!("{p} is not a point of the system")));
        }
        Ok(match (self, p) {
            (System::Sft(_), Point::Sft(x)) => Point::Sft(x.shifted_by(n)),
            (System::Odometer(o), Point::Odometer(x)) => {
                let mut cur = x.clone();
                for _ in 0..n {
                    cur = o.successor(&cur)?;
                }
                Point::Odometer(cur)
            }
            (System::Product(_), Point::Product(x)) => Point::Product(ProductPoint {
                components: x.components.iter().map(|c| c.shifted_by(n)).collect(),
            }),
            _ => unreachable!("validated above"),
        })
    }

    /// Exact distance between two exact points.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<Dyadic> {
        match (self, x, y) {
            (System::Sft(s), Point::Sft(a), Point::Sft(b)) => Ok(s.distance(a, b)),
            (System::Odometer(o), Point::Odometer(a), Point::Odometer(b)) => o.distance(a, b),
            (System::Product(p), Point::Product(a), Point::Product(b)) => p.distance(a, b),
            _ => Err(Error::TypeMismatch("distance between points of different kinds".into())),
        }
    }

    /// Strict comparison `d(x, y) < eps` without computing the full distance.
    pub fn distance_below(&self, x: &Point, y: &Point, eps: &Dyadic) -> Result<bool> {
        if eps > &Dyadic::one() {
            return Ok(true); // every space here has diameter <= 1
        }
        if let (System::Sft(s), Point::Sft(a), Point::Sft(b)) = (self, x, y) {
            if let Some(e) = eps.as_pow2() {
                return Ok(s.distance_below_pow2(a, b, (-e) as u32));
            }
        }
        Ok(&self.distance(x, y)? < eps)
    }
}

/// Certified distance interval between two approximate shift points:
/// `lo <= d(true_x, true_y) <= hi`.
pub fn approx_distance(x: &ApproxPoint, y: &ApproxPoint) -> (Dyadic, Dyadic) {
    let known = x.prefix().len().min(y.prefix().len());
    for n in 0..known {
        if x.prefix()[n] != y.prefix()[n] {
            let d = Dyadic::pow2(-(n as i64));
            return (d.clone(), d);
        }
    }
    (Dyadic::zero(), Dyadic::pow2(-(known as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    #[test]
    fn full_shift_rotation() {
        let s = System::Sft(Sft::full_shift(2));
        let img = s.apply_map(&Point::Sft(up("", "01"))).unwrap();
        assert_eq!(img, Point::Sft(up("", "10")));
    }

    #[test]
    fn mixed_arguments_rejected() {
        let s = System::Sft(Sft::full_shift(2));
        let o = Odometer::new(vec![2]).unwrap().zero_point();
        assert!(s.distance(&Point::Sft(up("", "0")), &Point::Odometer(o)).is_err());
    }

    #[test]
    fn approx_distance_interval() {
        let a = ApproxPoint::new(Word::parse("0101").unwrap(), 3).unwrap();
        let b = ApproxPoint::new(Word::parse("0100").unwrap(), 3).unwrap();
        assert_eq!(approx_distance(&a, &b), (Dyadic::pow2(-3), Dyadic::pow2(-3)));
        let c = ApproxPoint::new(Word::parse("01").unwrap(), 1).unwrap();
        assert_eq!(approx_distance(&a, &c), (Dyadic::zero(), Dyadic::pow2(-2)));
    }

    #[cfg(test)]
    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_up_point(alphabet: u8) -> impl Strategy<Value = UpPoint> {
            (
                proptest::collection::vec(0..alphabet, 0..6),
                proptest::collection::vec(0..alphabet, 1..6),
            )
                .prop_map(|(pre, per)| {
                    UpPoint::new(
                        Word::from_symbols(pre.into_iter().map(Symbol).collect()),
                        Word::from_symbols(per.into_iter().map(Symbol).collect()),
                    )
                    .unwrap()
                })
        }

        proptest! {
            #[test]
            fn shift_preserves_full_shift_membership(p in arb_up_point(3)) {
                let s = Sft::full_shift(3);
                prop_assert!(s.point_valid(&p));
                prop_assert!(s.point_valid(&p.shifted()));
            }

            #[test]
            fn metric_axioms_on_points(a in arb_up_point(2), b in arb_up_point(2), c in arb_up_point(2)) {
                let s = Sft::full_shift(2);
                let dab = s.distance(&a, &b);
                let dba = s.distance(&b, &a);
                prop_assert_eq!(&dab, &dba);
                prop_assert_eq!(dab.is_zero(), a == b);
                let dac = s.distance(&a, &c);
                let dcb = s.distance(&c, &b);
                prop_assert!(dab <= &dac + &dcb);
            }

            #[test]
            fn canonicalization_idempotent(p in arb_up_point(3)) {
                let q = UpPoint::new(p.preperiod().clone(), p.period().clone()).unwrap();
                prop_assert_eq!(p, q);
            }

            #[test]
            fn golden_mean_shift_preserves_validity(p in arb_up_point(2)) {
                let g = Sft::golden_mean();
                if g.point_valid(&p) {
                    prop_assert!(g.point_valid(&p.shifted()));
                }
            }
        }
    }
}
