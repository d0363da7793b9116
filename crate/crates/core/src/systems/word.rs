//! Symbols, finite words and exact eventually-periodic points.

use std::fmt;

use crate::error::{Error, Result};

/// One letter of the alphabet `{0, ..., d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite word over the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Word(indices.iter().map(|&i| Symbol(i as u8)).collect())
    }

    /// Parses a digit string like `"0101"`. Alphabets larger than 10 have no
    /// text form.
    pub fn parse(s: &str) -> Result<Self> {
        let mut symbols = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| Error::Parse(format!("bad symbol {c:?} in word {s:?}")))?;
            symbols.push(Symbol(d as u8));
        }
        Ok(Word(symbols))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn repeated(&self, times: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() * times);
        for _ in 0..times {
            v.extend_from_slice(&self.0);
        }
        Word(v)
    }
}

impl std::ops::Index<usize> for Word {
    type Output = Symbol;
    fn index(&self, i: usize) -> &Symbol {
        &self.0[i]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.0)?;
        }
        Ok(())
    }
}

/// An exact point of a shift space: the infinite word `preperiod . period^inf`.
///
/// Stored in canonical form (shortest preperiod, primitive period), so two
/// `UpPoint` values are equal iff they denote the same infinite sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpPoint {
    preperiod: Word,
    period: Word,
}

impl UpPoint {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Input("period word must be nonempty".into()));
        }
        let mut p = UpPoint { preperiod, period };
        p.canonicalize();
        Ok(p)
    }

    pub fn periodic(period: Word) -> Result<Self> {
        UpPoint::new(Word::empty(), period)
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn is_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    fn canonicalize(&mut self) {
        // Primitive period: shrink to the shortest generating block.
        let n = self.period.len();
        for d in 1..n {
            if n % d == 0 && self.period == self.period.slice(0, d).repeated(n / d) {
                self.period = self.period.slice(0, d);
                break;
            }
        }
        // Shortest preperiod: while the last preperiod symbol equals the last
        // period symbol, absorb it by rotating the period right.
        while let Some(&last) = self.preperiod.symbols().last() {
            let plen = self.period.len();
            if self.period[plen - 1] != last {
                break;
            }
            self.preperiod = self.preperiod.slice(0, self.preperiod.len() - 1);
            let mut rotated = Vec::with_capacity(plen);
            rotated.push(self.period[plen - 1]);
            rotated.extend_from_slice(&self.period.symbols()[..plen - 1]);
            self.period = Word(rotated);
        }
    }

    pub fn symbol_at(&self, n: usize) -> Symbol {
        if n < self.preperiod.len() {
            self.preperiod[n]
        } else {
            self.period[(n - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The first `len` symbols.
    pub fn prefix(&self, len: usize) -> Word {
        Word((0..len).map(|n| self.symbol_at(n)).collect())
    }

    /// The image under the shift map (drop the first symbol).
    pub fn shifted(&self) -> UpPoint {
        let mut p = if self.preperiod.is_empty() {
            let mut rot: Vec<Symbol> = self.period.symbols()[1..].to_vec();
            rot.push(self.period[0]);
            UpPoint { preperiod: Word::empty(), period: Word(rot) }
        } else {
            UpPoint {
                preperiod: self.preperiod.slice(1, self.preperiod.len()),
                period: self.period.clone(),
            }
        };
        p.canonicalize();
        p
    }

    pub fn shifted_by(&self, n: usize) -> UpPoint {
        // Shift the representation directly instead of iterating n times.
        if n == 0 {
            return self.clone();
        }
        let pre = self.preperiod.len();
        let mut p = if n <= pre {
            UpPoint {
                preperiod: self.preperiod.slice(n, pre),
                period: self.period.clone(),
            }
        } else {
            let k = (n - pre) % self.period.len();
            let mut rot: Vec<Symbol> = self.period.symbols()[k..].to_vec();
            rot.extend_from_slice(&self.period.symbols()[..k]);
            UpPoint { preperiod: Word::empty(), period: Word(rot) }
        };
        p.canonicalize();
        p
    }

    /// Index of the first disagreement with `other`, or `None` if equal.
    ///
    /// Two eventually periodic sequences either disagree before
    /// `max(preperiods) + lcm(periods)` or are equal.
    pub fn first_disagreement(&self, other: &UpPoint) -> Option<usize> {
        let pre = self.preperiod.len().max(other.preperiod.len());
        let l = num_integer::lcm(self.period.len(), other.period.len());
        (0..pre + l).find(|&n| self.symbol_at(n) != other.symbol_at(n))
    }

    /// True iff the two points agree on indices `0..depth`.
    pub fn agrees_to_depth(&self, other: &UpPoint, depth: usize) -> bool {
        (0..depth).all(|n| self.symbol_at(n) == other.symbol_at(n))
    }
}

impl fmt::Display for UpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pre={} per={}", self.preperiod, self.period)
    }
}

/// A finite-precision representative of a point: the true point lies in the
/// closed cylinder of the first `resolution + 1` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxPoint {
    prefix: Word,
    resolution: usize,
}

impl ApproxPoint {
    pub fn new(prefix: Word, resolution: usize) -> Result<Self> {
        if prefix.len() < resolution + 1 {
            return Err(Error::Input(format!(
                "prefix length {} below resolution requirement {}",
                prefix.len(),
                resolution + 1
            )));
        }
        Ok(ApproxPoint { prefix, resolution })
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn symbol_at(&self, n: usize) -> Option<Symbol> {
        self.prefix.symbols().get(n).copied()
    }
}

impl fmt::Display for ApproxPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix={} res={}", self.prefix, self.resolution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    #[test]
    fn canonical_form_is_minimal() {
        // 0(10)^inf = (01)^inf
        let p = up("0", "10");
        assert!(p.is_periodic());
        assert_eq!(p.period().to_string(), "01");
        // (0101)^inf reduces to (01)^inf
        assert_eq!(up("", "0101"), up("", "01"));
        // 1 0 0 0 ... keeps its preperiod
        let q = up("1", "0");
        assert_eq!(q.preperiod().to_string(), "1");
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let p = up("0110", "1010");
        let q = UpPoint::new(p.preperiod().clone(), p.period().clone()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn shift_rotates_periodic_points() {
        let p = up("", "01");
        assert_eq!(p.shifted(), up("", "10"));
        assert_eq!(p.shifted_by(2), p);
        let q = up("1", "0");
        assert_eq!(q.shifted(), up("", "0"));
    }

    #[test]
    fn disagreement_index() {
        assert_eq!(up("", "0").first_disagreement(&up("000", "1")), Some(3));
        assert_eq!(up("", "01").first_disagreement(&up("", "0011")), Some(1));
        assert_eq!(up("", "01").first_disagreement(&up("0", "10")), None);
    }
}
