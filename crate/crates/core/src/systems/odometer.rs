//! Finite-depth odometer (adding machine) presentations.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// An odometer truncated at depth `J`, given by a divisibility scale
/// `s_1 | s_2 | ... | s_J`. All claims about an odometer are made at its
/// stored depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    scale: Vec<u64>,
}

impl Odometer {
    pub fn new(scale: Vec<u64>) -> Result<Self> {
        if scale.is_empty() {
            return Err(Error::Input("odometer scale must be nonempty".into()));
        }
        if scale.iter().any(|&s| s == 0) {
            return Err(Error::Input("scale entries must be positive".into()));
        }
        for w in scale.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Input(format!("{} does not divide {}", w[0], w[1])));
            }
        }
        Ok(Odometer { scale })
    }

    pub fn scale(&self) -> &[u64] {
        &self.scale
    }

    pub fn depth(&self) -> usize {
        self.scale.len()
    }

    pub fn point_valid(&self, p: &OdometerPoint) -> bool {
        if p.coords.len() != self.scale.len() {
            return false;
        }
        if p.coords.iter().zip(&self.scale).any(|(&x, &s)| x >= s) {
            return false;
        }
        p.coords
            .windows(2)
            .zip(self.scale.windows(2))
            .all(|(c, s)| c[1] % s[0] == c[0] % s[0])
    }

    pub fn zero_point(&self) -> OdometerPoint {
        OdometerPoint { coords: vec![0; self.scale.len()] }
    }

    /// The +1 map: every coordinate increments mod its modulus.
    pub fn successor(&self, p: &OdometerPoint) -> Result<OdometerPoint> {
        if !self.point_valid(p) {
            return Err(Error::Validity(format!("{p} is not a point of this odometer")));
        }
        Ok(OdometerPoint {
            coords: p.coords.iter().zip(&self.scale).map(|(&x, &s)| (x + 1) % s).collect(),
        })
    }

    /// Same rule as the shift metric, read on coordinates.
    pub fn distance(&self, x: &OdometerPoint, y: &OdometerPoint) -> Result<Dyadic> {
        if x.coords.len() != self.scale.len() || y.coords.len() != self.scale.len() {
            return Err(Error::TypeMismatch("odometer point of wrong depth".into()));
        }
        match x.coords.iter().zip(&y.coords).position(|(a, b)| a != b) {
            None => Ok(Dyadic::zero()),
            Some(k) => Ok(Dyadic::pow2(-(k as i64))),
        }
    }
}

/// Compatible coordinates `(x_1, ..., x_J)` with `x_{j+1} = x_j (mod s_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OdometerPoint {
    pub coords: Vec<u64>,
}

impl std::fmt::Display for OdometerPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "coords=")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn successor_examples() {
        let o = Odometer::new(vec![2, 4, 8]).unwrap();
        let p = OdometerPoint { coords: vec![1, 3, 7] };
        assert_eq!(o.successor(&p).unwrap().coords, vec![0, 0, 0]);
        let q = OdometerPoint { coords: vec![1, 1, 1] };
        assert_eq!(o.successor(&q).unwrap().coords, vec![0, 2, 2]);
    }

    #[test]
    fn compatibility_checked() {
        let o = Odometer::new(vec![2, 4]).unwrap();
        assert!(!o.point_valid(&OdometerPoint { coords: vec![1, 2] }));
        assert!(o.point_valid(&OdometerPoint { coords: vec![1, 3] }));
        assert!(Odometer::new(vec![2, 3]).is_err());
    }

    #[test]
    fn orbit_of_zero_has_full_cardinality() {
        let o = Odometer::new(vec![2, 4, 8]).unwrap();
        let mut p = o.zero_point();
        let mut seen = std::collections::HashSet::new();
        loop {
            if !seen.insert(p.clone()) {
                break;
            }
            p = o.successor(&p).unwrap();
        }
        assert_eq!(seen.len(), 8);
    }
}
