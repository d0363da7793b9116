//! Vertex-shift presentations of subshifts of finite type.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::systems::word::{Symbol, UpPoint, Word};

/// An SFT presented by an alphabet `{0, ..., d}` and an allowed-transition
/// relation. Every symbol must have at least one successor and one
/// predecessor (essential graph). The expansivity constant is fixed at 1/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    alphabet: usize,
    allowed: Vec<bool>, // row-major (alphabet x alphabet)
}

impl Sft {
    pub fn new(alphabet: usize, allowed: Vec<bool>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::Input("alphabet must be nonempty".into()));
        }
        if allowed.len() != alphabet * alphabet {
            return Err(Error::Input("transition relation has wrong shape".into()));
        }
        let sft = Sft { alphabet, allowed };
        for a in 0..alphabet {
            if sft.successors(a).next().is_none() {
                return Err(Error::Input(format!("symbol {a} has no allowed successor")));
            }
            if !(0..alphabet).any(|b| sft.is_allowed_idx(b, a)) {
                return Err(Error::Input(format!("symbol {a} has no allowed predecessor")));
            }
        }
        Ok(sft)
    }

    pub fn from_forbidden(alphabet: usize, forbidden: &[(usize, usize)]) -> Result<Self> {
        let mut allowed = vec![true; alphabet * alphabet];
        for &(a, b) in forbidden {
            if a >= alphabet || b >= alphabet {
                return Err(Error::Input(format!("forbidden pair ({a},{b}) out of range")));
            }
            allowed[a * alphabet + b] = false;
        }
        Sft::new(alphabet, allowed)
    }

    pub fn full_shift(alphabet: usize) -> Self {
        Sft::new(alphabet, vec![true; alphabet * alphabet]).expect("full shift is essential")
    }

    /// The binary SFT forbidding the word 11.
    pub fn golden_mean() -> Self {
        Sft::from_forbidden(2, &[(1, 1)]).expect("golden mean is essential")
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn is_full_shift(&self) -> bool {
        self.allowed.iter().all(|&b| b)
    }

    /// Points at distance >= 1/2 at some iterate are distinct.
    pub fn expansivity_constant(&self) -> Dyadic {
        Dyadic::pow2(-1)
    }

    pub fn is_allowed(&self, a: Symbol, b: Symbol) -> bool {
        self.is_allowed_idx(a.index(), b.index())
    }

    pub fn is_allowed_idx(&self, a: usize, b: usize) -> bool {
        self.allowed[a * self.alphabet + b]
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet).filter(move |&b| self.is_allowed_idx(a, b))
    }

    pub fn predecessors(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet).filter(move |&a| self.is_allowed_idx(a, b))
    }

    pub fn symbol_in_range(&self, s: Symbol) -> bool {
        s.index() < self.alphabet
    }

    pub fn word_legal(&self, w: &Word) -> bool {
        if w.symbols().iter().any(|&s| !self.symbol_in_range(s)) {
            return false;
        }
        w.symbols().windows(2).all(|p| self.is_allowed(p[0], p[1]))
    }

    /// Membership of `preperiod . period^inf`, including the junction pair and
    /// the wrap pair of the period.
    pub fn point_valid(&self, p: &UpPoint) -> bool {
        if !self.word_legal(p.preperiod()) || !self.word_legal(p.period()) {
            return false;
        }
        let per = p.period();
        if !self.is_allowed(per[per.len() - 1], per[0]) {
            return false;
        }
        if let Some(&last) = p.preperiod().symbols().last() {
            if !self.is_allowed(last, per[0]) {
                return false;
            }
        }
        true
    }

    /// The lexicographically least legal point extending `w`.
    ///
    /// Greedy smallest-successor continuation; it is eventually periodic
    /// because the greedy successor map is deterministic.
    pub fn freeze(&self, w: &Word) -> Result<UpPoint> {
        if w.is_empty() {
            return Err(Error::Input("cannot freeze the empty cylinder".into()));
        }
        if !self.word_legal(w) {
            return Err(Error::Validity(format!("word {w} is not legal")));
        }
        let least = |a: usize| -> usize {
            self.successors(a).next().expect("essential graph has successors")
        };
        // Follow the greedy map until a symbol repeats among greedy-visited ones.
        let mut tail: Vec<usize> = Vec::new();
        let mut seen = vec![usize::MAX; self.alphabet];
        let mut cur = w[w.len() - 1].index();
        loop {
            if seen[cur] != usize::MAX {
                let cycle_start = seen[cur];
                let pre_syms: Vec<usize> = w
                    .symbols()
                    .iter()
                    .map(|s| s.index())
                    .chain(tail[..cycle_start].iter().copied())
                    .collect();
                let per_syms: Vec<usize> = tail[cycle_start..].to_vec();
                return UpPoint::new(Word::from_indices(&pre_syms), Word::from_indices(&per_syms));
            }
            seen[cur] = tail.len();
            let next = least(cur);
            tail.push(next);
            cur = next;
        }
    }

    /// Shift metric: `2^{-k}` with `k` the first disagreement index; 0 when equal.
    pub fn distance(&self, x: &UpPoint, y: &UpPoint) -> Dyadic {
        match x.first_disagreement(y) {
            None => Dyadic::zero(),
            Some(k) => Dyadic::pow2(-(k as i64)),
        }
    }

    /// `d(x, y) < 2^{-k}` iff the points agree on indices `0..=k`.
    pub fn distance_below_pow2(&self, x: &UpPoint, y: &UpPoint, k: u32) -> bool {
        x.agrees_to_depth(y, k as usize + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    #[test]
    fn golden_mean_point_validity() {
        let g = Sft::golden_mean();
        assert!(g.point_valid(&up("", "010")));
        assert!(!g.point_valid(&up("1", "1")));
        // wrap pair: (1)(1) illegal even though the word "01" is legal
        assert!(!g.point_valid(&up("", "11")));
        assert!(g.point_valid(&up("", "01")));
    }

    #[test]
    fn essentiality_enforced() {
        // 0 -> 1 only, 1 -> nothing
        let r = Sft::new(2, vec![false, true, false, false]);
        assert!(r.is_err());
    }

    #[test]
    fn freeze_is_lex_least() {
        let g = Sft::golden_mean();
        assert_eq!(g.freeze(&Word::parse("1").unwrap()).unwrap(), up("1", "0"));
        assert_eq!(g.freeze(&Word::parse("0").unwrap()).unwrap(), up("", "0"));
        let f = Sft::full_shift(3);
        assert_eq!(f.freeze(&Word::parse("21").unwrap()).unwrap(), up("21", "0"));
    }

    #[test]
    fn shift_metric_values() {
        let f = Sft::full_shift(2);
        assert!(f.distance(&up("", "0"), &up("", "0")).is_zero());
        assert_eq!(f.distance(&up("", "0"), &up("000", "1")), Dyadic::pow2(-3));
        assert_eq!(f.distance(&up("", "01"), &up("", "0011")), Dyadic::pow2(-1));
    }
}
