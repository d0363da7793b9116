//! Entropy enclosures, the equicontinuity/positive-entropy dichotomy, the
//! seven-way positive-entropy report, and horizon-stamped point classifiers
//! for the recurrence hierarchy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chains::{decompose, DecompositionReport};
use crate::embedding::{chacon_word, transitive_word};
use crate::error::{Error, Result};
use crate::systems::{Sft, Symbol, UpPoint, Word};

// ---------------------------------------------------------------------------
// Certified rational logarithms
// ---------------------------------------------------------------------------

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Interval enclosure of `atanh(z)` for `0 <= z <= 1/2`, by the odd series
/// with an explicit geometric tail bound.
fn atanh_enclosure(z: &BigRational, terms: usize) -> (BigRational, BigRational) {
    let z2 = z * z;
    let mut sum = BigRational::zero();
    let mut pow = z.clone();
    for j in 0..terms {
        sum += &pow / BigRational::from_integer(BigInt::from(2 * j as i64 + 1));
        pow *= &z2;
    }
    // remainder <= z^{2K+1} / ((2K+1)(1 - z^2))
    let tail = &pow / (BigRational::from_integer(BigInt::from(2 * terms as i64 + 1))
        * (BigRational::one() - z2));
    (sum.clone(), sum + tail)
}

/// Interval enclosure of `ln x` for a positive rational, to width below `tol`.
pub fn ln_enclosure(x: &BigRational, tol: &BigRational) -> (BigRational, BigRational) {
    assert!(x.is_positive(), "ln of a nonpositive rational");
    // write x = m * 2^e with 1 <= m < 2
    let mut m = x.clone();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut e: i64 = 0;
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        e -= 1;
    }
    let mut terms = 8usize;
    loop {
        let zm = (&m - BigRational::one()) / (&m + BigRational::one());
        let (am_lo, am_hi) = atanh_enclosure(&zm, terms);
        let (l2_lo, l2_hi) = atanh_enclosure(&rat(1, 3), terms);
        let two_r = BigRational::from_integer(BigInt::from(2));
        let (lo, hi) = if e >= 0 {
            let er = BigRational::from_integer(BigInt::from(e));
            (&two_r * (&am_lo + &er * &l2_lo), &two_r * (&am_hi + &er * &l2_hi))
        } else {
            let er = BigRational::from_integer(BigInt::from(-e));
            (&two_r * (&am_lo - &er * &l2_hi), &two_r * (&am_hi - &er * &l2_lo))
        };
        if &hi - &lo < *tol {
            return (lo, hi);
        }
        terms *= 2;
    }
}

// ---------------------------------------------------------------------------
// Entropy
// ---------------------------------------------------------------------------

/// Entropy of an essential SFT: a certified rational enclosure of the log of
/// the Perron root, plus the characteristic polynomial of the dominant basic
/// set as algebraic description.
#[derive(Debug, Clone)]
pub struct EntropyValue {
    pub lo: BigRational,
    pub hi: BigRational,
    /// Exactly zero (graph is a disjoint union of cycles plus transients).
    pub exact_zero: bool,
    /// Coefficients (constant first) of a monic integer polynomial whose
    /// largest real root is the Perron root.
    pub annihilator: Vec<BigInt>,
    pub description: String,
}

impl EntropyValue {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn excludes_zero(&self) -> bool {
        !self.exact_zero && self.lo.is_positive()
    }
}

/// Integer characteristic polynomial by the Faddeev-LeVerrier recursion.
fn char_poly(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    let ar: Vec<Vec<BigRational>> = a
        .iter()
        .map(|row| row.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    let mut coeffs = vec![BigRational::one()]; // leading coefficient
    for k in 1..=n {
        // M_k = A * M_{k-1} + c_{n-k+1} I
        let mut am = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for t in 0..n {
                    s += &ar[i][t] * &m[t][j];
                }
                am[i][j] = s;
            }
        }
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += coeffs.last().expect("nonempty");
        }
        m = am;
        // c = -tr(A M_k) / k
        let mut tr = BigRational::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &ar[i][t] * &m[t][i];
            }
        }
        coeffs.push(-tr / BigRational::from_integer(BigInt::from(k as i64)));
    }
    // coefficients of x^n + c_1 x^{n-1} + ... + c_n, constant first
    coeffs
        .into_iter()
        .rev()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// Collatz-Wielandt enclosure of the Perron root of a primitive nonnegative
/// integer matrix, iterated until the relative width drops below `rel_tol`.
fn perron_enclosure(b: &[Vec<BigInt>], rel_tol: &BigRational) -> (BigRational, BigRational) {
    let n = b.len();
    let mut v: Vec<BigInt> = vec![BigInt::one(); n];
    let mut best: Option<(BigRational, BigRational)> = None;
    for _ in 0..20_000 {
        let bv: Vec<BigInt> = (0..n)
            .map(|i| (0..n).map(|j| &b[i][j] * &v[j]).sum())
            .collect();
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for i in 0..n {
            let q = BigRational::new(bv[i].clone(), v[i].clone());
            if lo.as_ref().is_none_or(|l| &q < l) {
                lo = Some(q.clone());
            }
            if hi.as_ref().is_none_or(|h| &q > h) {
                hi = Some(q);
            }
        }
        let (lo, hi) = (lo.expect("nonempty"), hi.expect("nonempty"));
        let keep = match &best {
            Some((blo, bhi)) => &hi - &lo < bhi - blo,
            None => true,
        };
        if keep {
            best = Some((lo.clone(), hi.clone()));
        }
        if (&hi - &lo) / &lo < *rel_tol {
            return (lo, hi);
        }
        // reduce the vector to keep bigint growth in check
        let g = bv.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
        v = if g > BigInt::one() { bv.iter().map(|x| x / &g).collect() } else { bv };
    }
    best.expect("at least one iteration")
}

fn restrict(sft: &Sft, symbols: &[Symbol]) -> Vec<Vec<BigInt>> {
    symbols
        .iter()
        .map(|a| {
            symbols
                .iter()
                .map(|b| if sft.is_allowed(*a, *b) { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|t| &a[i][t] * &b[t][j]).sum()).collect())
        .collect()
}

/// True iff the basic set is a single cycle (each symbol has exactly one
/// in-component successor).
fn is_simple_cycle(sft: &Sft, symbols: &[Symbol]) -> bool {
    symbols.iter().all(|a| {
        sft.successors(a.index())
            .filter(|&b| symbols.iter().any(|s| s.index() == b))
            .count()
            == 1
    })
}

/// Certified enclosure of the topological entropy `log lambda(A)`.
///
/// Each basic set contributes the Perron root of its component matrix; the
/// period structure is handled by iterating the a-step matrix on one
/// elementary class, which is primitive.
pub fn sft_entropy(sft: &Sft, tol: &BigRational) -> EntropyValue {
    let report = decompose(sft);
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    let mut exact_zero = true;
    let mut annihilator = vec![BigInt::zero(), BigInt::one()]; // x
    let mut description = "0 (the nonwandering part is a union of cycles)".to_string();
    for b in &report.basic_sets {
        if is_simple_cycle(sft, &b.symbols) {
            continue; // contributes log 1 = 0
        }
        exact_zero = false;
        // a-step matrix on one elementary class is primitive
        let comp = restrict(sft, &b.symbols);
        let mut power = comp.clone();
        for _ in 1..b.period {
            power = mat_mul(&power, &comp);
        }
        let class_pos: Vec<usize> = b.classes[0]
            .iter()
            .map(|s| b.symbols.iter().position(|t| t == s).expect("class inside component"))
            .collect();
        let class_mat: Vec<Vec<BigInt>> = class_pos
            .iter()
            .map(|&i| class_pos.iter().map(|&j| power[i][j].clone()).collect())
            .collect();
        // log lambda = log(lambda^a) / a: demand width a*tol/2 on the inner log
        let a = BigInt::from(b.period as i64);
        let rel = tol * BigRational::new(a.clone(), BigInt::from(4));
        let (plo, phi) = perron_enclosure(&class_mat, &rel);
        let inner_tol = tol * BigRational::new(a.clone(), BigInt::from(2));
        let (llo, _) = ln_enclosure(&plo, &inner_tol);
        let (_, lhi) = ln_enclosure(&phi, &inner_tol);
        let a_rat = BigRational::from_integer(a);
        let (clo, chi) = (llo / &a_rat, lhi / &a_rat);
        if chi > hi {
            hi = chi;
            lo = clo;
            annihilator = char_poly(&comp);
            let symbols: String = b.symbols.iter().map(|s| s.0.to_string()).collect();
            description = format!(
                "log of the largest root of {} (component {{{symbols}}}, period {})",
                poly_string(&annihilator),
                b.period
            );
        }
    }
    if exact_zero {
        lo = BigRational::zero();
        hi = BigRational::zero();
    }
    EntropyValue { lo, hi, exact_zero, annihilator, description }
}

fn poly_string(coeffs: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let term = match i {
            0 => format!("{c}"),
            1 => format!("{c}*x"),
            _ => format!("{c}*x^{i}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Number of legal words of length `n` (transfer-matrix count).
pub fn word_complexity(sft: &Sft, n: usize) -> BigInt {
    assert!(n >= 1);
    let d = sft.alphabet_size();
    let mut v = vec![BigInt::one(); d];
    for _ in 1..n {
        v = (0..d)
            .map(|a| sft.successors(a).map(|b| v[b].clone()).sum())
            .collect();
    }
    v.into_iter().sum()
}

// ---------------------------------------------------------------------------
// Dichotomy and the seven-way report
// ---------------------------------------------------------------------------

/// A factor map onto the binary full shift built from two distinct loops
/// through a common vertex: the two loop powers have equal length `m` and
/// free concatenation, so `m`-blocks decode the binary stream.
#[derive(Debug, Clone)]
pub struct LoopEmbedding {
    pub vertex: Symbol,
    pub m: usize,
    pub anchors: [Word; 2],
}

impl LoopEmbedding {
    pub fn encode(&self, alpha: &Word) -> Word {
        let mut w = Word::empty();
        for s in alpha.symbols() {
            w = w.concat(&self.anchors[s.index().min(1)]);
        }
        w
    }
}

#[derive(Debug, Clone)]
pub enum Dichotomy {
    /// The nonwandering part is a disjoint union of cycles.
    Equicontinuous { report: DecompositionReport },
    PositiveEntropy { witness: LoopEmbedding, entropy: EntropyValue },
}

/// Two distinct simple cycles through a common vertex of a basic set with
/// more edges than vertices, as equal-length loop words.
fn two_loops(sft: &Sft, symbols: &[Symbol]) -> Option<LoopEmbedding> {
    let inside = |v: usize| symbols.iter().any(|s| s.index() == v);
    for v in symbols {
        let succ: Vec<usize> = sft.successors(v.index()).filter(|&b| inside(b)).collect();
        if succ.len() < 2 {
            continue;
        }
        // shortest in-component path from each successor back to v
        let mut loops = Vec::new();
        for &u in succ.iter().take(2) {
            let mut prev = vec![usize::MAX; sft.alphabet_size()];
            let mut queue = std::collections::VecDeque::from([u]);
            prev[u] = u;
            while let Some(w) = queue.pop_front() {
                if w == v.index() {
                    break;
                }
                for t in sft.successors(w) {
                    if inside(t) && prev[t] == usize::MAX {
                        prev[t] = w;
                        queue.push_back(t);
                    }
                }
            }
            let mut path = vec![v.index()];
            if u == v.index() {
                // self-loop
            } else {
                let mut rev = vec![v.index()];
                let mut cur = v.index();
                while cur != u {
                    cur = prev[cur];
                    rev.push(cur);
                }
                rev.reverse();
                path.extend(rev[..rev.len() - 1].iter().copied());
            }
            loops.push(Word::from_indices(&path));
        }
        let (l1, l2) = (loops[0].len(), loops[1].len());
        let m = num_integer::lcm(l1, l2);
        return Some(LoopEmbedding {
            vertex: *v,
            m,
            anchors: [loops[0].repeated(m / l1), loops[1].repeated(m / l2)],
        });
    }
    None
}

/// Either the system is a union of cycles (equicontinuous on its
/// nonwandering part) or it has positive entropy, witnessed by an embedded
/// binary full shift for a power of the map.
pub fn classify_dichotomy(sft: &Sft) -> Dichotomy {
    let report = decompose(sft);
    for b in &report.basic_sets {
        if !is_simple_cycle(sft, &b.symbols) {
            let witness = two_loops(sft, &b.symbols).expect("non-cycle component has two loops");
            let entropy = sft_entropy(sft, &rat(1, 1_000_000));
            return Dichotomy::PositiveEntropy { witness, entropy };
        }
    }
    Dichotomy::Equicontinuous { report }
}

#[derive(Debug, Clone)]
pub struct ConditionOutcome {
    pub holds: bool,
    pub witness: String,
}

/// Outcomes of the seven equivalent positive-entropy conditions, evaluated by
/// their SFT realizations. All seven must agree on every essential SFT.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    pub conditions: Vec<ConditionOutcome>,
}

impl EntropyReport {
    pub fn unanimous(&self) -> Option<bool> {
        let first = self.conditions[0].holds;
        self.conditions.iter().all(|c| c.holds == first).then_some(first)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.conditions.iter().enumerate() {
            out.push_str(&format!("condition {}: {} witness={}\n", i + 1, c.holds, c.witness));
        }
        out
    }
}

pub fn positive_entropy_report(sft: &Sft) -> EntropyReport {
    let entropy = sft_entropy(sft, &rat(1, 1_000_000));
    let report = decompose(sft);
    let rich = report
        .basic_sets
        .iter()
        .find(|b| !is_simple_cycle(sft, &b.symbols));
    let loops = rich.and_then(|b| two_loops(sft, &b.symbols));

    let c1 = ConditionOutcome {
        holds: entropy.excludes_zero(),
        witness: if entropy.exact_zero {
            "entropy exactly 0".into()
        } else {
            format!("entropy in [{}, {}]", dec(&entropy.lo), dec(&entropy.hi))
        },
    };
    let c2 = ConditionOutcome {
        holds: rich.is_some(),
        witness: match rich {
            Some(b) => format!(
                "basic set {{{}}} carries two distinct cycles (period {})",
                b.symbols.iter().map(|s| s.0.to_string()).collect::<String>(),
                b.period
            ),
            None => "every basic set is a single cycle".into(),
        },
    };
    let c3 = ConditionOutcome {
        holds: loops.is_some(),
        witness: match &loops {
            Some(l) => format!("symbol {} splits into loops {} and {}", l.vertex.0, l.anchors[0], l.anchors[1]),
            None => "no nonwandering symbol admits two loops".into(),
        },
    };
    let c4 = ConditionOutcome {
        holds: loops.is_some(),
        witness: match &loops {
            Some(l) => format!("binary full shift for f^{} with anchors {} / {}", l.m, l.anchors[0], l.anchors[1]),
            None => "no embedded full shift".into(),
        },
    };
    // Hierarchy gaps, decided on the symbol streams that the embedded full
    // shift carries; they exist exactly when the embedding does.
    let (c5, c6, c7) = match &loops {
        Some(l) => {
            let horizon = 1 << 12;
            let depth = 3;
            let full = Sft::full_shift(2);
            let a1 = UpPoint::new(Word::parse("1").unwrap(), Word::parse("0").unwrap()).unwrap();
            let r1 = point_classifier(&full, ClassifiedPoint::Exact(&a1), horizon, 1, 32)
                .expect("exact stream");
            let t2 = transitive_word(2, horizon + depth);
            let r2 = point_classifier(&full, ClassifiedPoint::Sampled(&t2), horizon, depth, 32)
                .expect("sampled stream");
            let t3 = chacon_word(horizon + depth);
            let r3 = point_classifier(&full, ClassifiedPoint::Sampled(&t3), horizon, depth, 32)
                .expect("sampled stream");
            (
                ConditionOutcome {
                    holds: r1.nonwandering && !r1.recurrent,
                    witness: format!("encoded 1000... = {}...", preview(&l.encode(&Word::parse("100").unwrap()))),
                },
                ConditionOutcome {
                    holds: r2.recurrent && !r2.minimal,
                    witness: format!(
                        "encoded transitive stream, return gap grows to {}",
                        r2.syndetic_bound.unwrap_or(0)
                    ),
                },
                ConditionOutcome {
                    holds: r3.minimal && !r3.regularly_recurrent,
                    witness: format!("encoded Chacon stream, RR refuted for k <= {}", r3.k_cap),
                },
            )
        }
        None => {
            let none = |what: &str| ConditionOutcome {
                holds: false,
                witness: format!("{what} is empty (union of cycles)"),
            };
            (none("Omega \\ R"), none("R \\ M"), none("M \\ RR"))
        }
    };
    EntropyReport { conditions: vec![c1, c2, c3, c4, c5, c6, c7] }
}

fn preview(w: &Word) -> String {
    let cut = w.len().min(24);
    w.slice(0, cut).to_string()
}

/// Decimal rendering of a rational, truncated to `digits` fractional digits.
pub fn dec(x: &BigRational) -> String {
    decimal_string(x, 12)
}

pub fn decimal_string(x: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x * BigRational::from_integer(scale.clone())).floor().to_integer();
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let whole = &abs / &scale;
    let frac = &abs % &scale;
    let frac_s = format!("{:0>width$}", frac.to_string(), width = digits as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, whole, frac_s)
}

// ---------------------------------------------------------------------------
// Point classifier
// ---------------------------------------------------------------------------

/// A point handed to the classifier: exact (symbols available at any index)
/// or sampled to a finite depth.
#[derive(Debug, Clone, Copy)]
pub enum ClassifiedPoint<'a> {
    Exact(&'a UpPoint),
    Sampled(&'a Word),
}

impl ClassifiedPoint<'_> {
    fn symbol_at(&self, n: usize) -> Symbol {
        match self {
            ClassifiedPoint::Exact(p) => p.symbol_at(n),
            ClassifiedPoint::Sampled(w) => w[n],
        }
    }

    fn known_depth(&self) -> Option<usize> {
        match self {
            ClassifiedPoint::Exact(_) => None,
            ClassifiedPoint::Sampled(w) => Some(w.len()),
        }
    }
}

/// Horizon-stamped recurrence flags. The implication chain
/// periodic => RR => minimal => recurrent => nonwandering holds among the
/// asserted flags; refutations ship with replayable witnesses.
#[derive(Debug, Clone)]
pub struct ClassifierReport {
    pub horizon: usize,
    pub depth: usize,
    pub k_cap: usize,
    /// Exact, not horizon-stamped; only asserted for exact points.
    pub periodic: bool,
    pub periodic_exact: bool,
    pub recurrent: bool,
    pub minimal: bool,
    pub regularly_recurrent: bool,
    pub nonwandering: bool,
    /// Largest observed return gap.
    pub syndetic_bound: Option<usize>,
    /// Gap exceeding the first-half bound, refuting minimality: (start, len).
    pub minimal_gap_witness: Option<(usize, usize)>,
    /// A modulus k certifying RR at the horizon, if any.
    pub rr_modulus: Option<usize>,
    /// Per-k refutation witnesses: (k, first multiple of k missing the cylinder).
    pub rr_refutations: Vec<(usize, usize)>,
}

impl ClassifierReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "periodic: {}{}\n",
            self.periodic,
            if self.periodic_exact { " (exact)" } else { " (not asserted)" }
        ));
        out.push_str(&format!("recurrent@{}: {}\n", self.horizon, self.recurrent));
        out.push_str(&format!(
            "minimal@{}: {} gap-bound={:?} witness={:?}\n",
            self.horizon, self.minimal, self.syndetic_bound, self.minimal_gap_witness
        ));
        out.push_str(&format!(
            "regularly-recurrent@{}: {} modulus={:?} refuted-k={}\n",
            self.horizon,
            self.regularly_recurrent,
            self.rr_modulus,
            self.rr_refutations.len()
        ));
        out.push_str(&format!("nonwandering@{}: {}\n", self.horizon, self.nonwandering));
        out
    }
}

/// Classifies one point at horizon `H` and cylinder depth `t`.
///
/// Returns to the depth-`t` cylinder of the point are scanned over `[1, H]`;
/// minimality compares second-half gaps against the bound realized in the
/// first half; regular recurrence scans arithmetic progressions up to
/// modulus `k_cap`; nonwandering holds when the cylinder word can be legally
/// extended back to itself.
pub fn point_classifier(
    sft: &Sft,
    point: ClassifiedPoint,
    horizon: usize,
    depth: usize,
    k_cap: usize,
) -> Result<ClassifierReport> {
    if depth == 0 {
        return Err(Error::Input("cylinder depth must be positive".into()));
    }
    if let Some(have) = point.known_depth() {
        let need = horizon + depth;
        if have < need {
            return Err(Error::Depth { have, need });
        }
    }
    let w: Vec<Symbol> = (0..depth).map(|n| point.symbol_at(n)).collect();
    let matches = |n: usize| (0..depth).all(|t| point.symbol_at(n + t) == w[t]);

    let (periodic, periodic_exact) = match point {
        ClassifiedPoint::Exact(p) => (p.is_periodic(), true),
        ClassifiedPoint::Sampled(_) => (false, false),
    };

    let returns: Vec<usize> = (1..=horizon).filter(|&n| matches(n)).collect();
    let recurrent_evidence = !returns.is_empty();

    // Gap profile including the censored trailing stretch.
    let mut gaps: Vec<(usize, usize)> = Vec::with_capacity(returns.len() + 1);
    let mut prev = 0usize;
    for &n in &returns {
        gaps.push((prev, n - prev));
        prev = n;
    }
    gaps.push((prev, horizon - prev));
    let half = horizon / 2;
    let first_half_bound = gaps
        .iter()
        .filter(|(start, len)| start + len <= half && *len > 0)
        .map(|&(_, len)| len)
        .max();
    let mut minimal_gap_witness = None;
    if let Some(bound) = first_half_bound {
        for &(start, len) in &gaps {
            if start + len > half && len > bound {
                minimal_gap_witness = Some((start, len));
                break;
            }
        }
    }
    let minimal_evidence =
        recurrent_evidence && first_half_bound.is_some() && minimal_gap_witness.is_none();
    let syndetic_bound = gaps.iter().map(|&(_, len)| len).max();

    // Regular recurrence along arithmetic progressions.
    let mut rr_modulus = None;
    let mut rr_refutations = Vec::new();
    for k in 1..=k_cap {
        let mut fail = None;
        let mut n = k;
        while n <= horizon {
            if !matches(n) {
                fail = Some(n);
                break;
            }
            n += k;
        }
        match fail {
            None => {
                rr_modulus = Some(k);
                break;
            }
            Some(n) => rr_refutations.push((k, n)),
        }
    }
    let rr = rr_modulus.is_some();

    // Nonwandering via word recurrence in the language: a legal return path
    // from the last to the first cylinder symbol.
    let nonwandering_evidence = {
        let from = w[depth - 1].index();
        let to = w[0].index();
        let mut seen = vec![false; sft.alphabet_size()];
        let mut queue = std::collections::VecDeque::new();
        for b in sft.successors(from) {
            if !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
        let mut found = seen[to];
        while let Some(v) = queue.pop_front() {
            if found {
                break;
            }
            for b in sft.successors(v) {
                if !seen[b] {
                    seen[b] = true;
                    if b == to {
                        found = true;
                    }
                    queue.push_back(b);
                }
            }
        }
        found
    };

    // Close the flags upward along the implication chain.
    let regularly_recurrent = rr || periodic;
    let minimal = minimal_evidence || regularly_recurrent;
    let recurrent = recurrent_evidence || minimal;
    let nonwandering = nonwandering_evidence || recurrent;

    Ok(ClassifierReport {
        horizon,
        depth,
        k_cap,
        periodic,
        periodic_exact,
        recurrent,
        minimal,
        regularly_recurrent,
        nonwandering,
        syndetic_bound,
        minimal_gap_witness,
        rr_modulus,
        rr_refutations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_enclosure_brackets_known_values() {
        let tol = rat(1, 1_000_000_000);
        let (lo, hi) = ln_enclosure(&BigRational::from_integer(BigInt::from(2)), &tol);
        let ln2 = 0.6931471805599453f64;
        assert!(lo <= hi);
        assert!(to_f64(&(&hi - &lo)) < 1e-9);
        assert!((to_f64(&lo) - ln2).abs() < 2e-9);
        let (lo, hi) = ln_enclosure(&rat(1, 3), &tol);
        let l = (1f64 / 3.0).ln();
        assert!((to_f64(&lo) - l).abs() < 2e-9 && (to_f64(&hi) - l).abs() < 2e-9);
    }

    fn to_f64(x: &BigRational) -> f64 {
        decimal_string(x, 15).parse::<f64>().expect("decimal rendering parses")
    }

    #[test]
    fn entropy_of_standard_examples() {
        let tol = rat(1, 1_000_000_000);
        let full = sft_entropy(&Sft::full_shift(2), &tol);
        let ln2 = 0.6931471805599453f64;
        assert!((to_f64(&full.lo) - ln2).abs() < 2e-9 && (to_f64(&full.hi) - ln2).abs() < 2e-9);
        assert!(!full.exact_zero);

        let gm = sft_entropy(&Sft::golden_mean(), &tol);
        let lphi = 0.4812118250596034f64;
        assert!((to_f64(&gm.lo) - lphi).abs() < 2e-9 && (to_f64(&gm.hi) - lphi).abs() < 2e-9);
        assert!(to_f64(&gm.width()) < 1e-9);
        // characteristic polynomial x^2 - x - 1
        assert_eq!(gm.annihilator, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);

        // disjoint 3-cycle: exactly zero
        let mut allowed = vec![false; 9];
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            allowed[a * 3 + b] = true;
        }
        let cyc = sft_entropy(&Sft::new(3, allowed).unwrap(), &tol);
        assert!(cyc.exact_zero);
        assert!(cyc.lo.is_zero() && cyc.hi.is_zero());
    }

    #[test]
    fn word_complexity_examples() {
        assert_eq!(word_complexity(&Sft::full_shift(2), 3), BigInt::from(8));
        assert_eq!(word_complexity(&Sft::golden_mean(), 3), BigInt::from(5));
        let mut allowed = vec![false; 9];
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            allowed[a * 3 + b] = true;
        }
        assert_eq!(word_complexity(&Sft::new(3, allowed).unwrap(), 10), BigInt::from(3));
    }

    #[test]
    fn dichotomy_examples() {
        match classify_dichotomy(&Sft::full_shift(2)) {
            Dichotomy::PositiveEntropy { witness, .. } => {
                assert_eq!(witness.anchors[0].len(), witness.m);
            }
            _ => panic!("full shift has positive entropy"),
        }
        // cycles of length 2 and 3, disjoint
        let mut allowed = vec![false; 25];
        for (a, b) in [(0, 1), (1, 0), (2, 3), (3, 4), (4, 2)] {
            allowed[a * 5 + b] = true;
        }
        match classify_dichotomy(&Sft::new(5, allowed).unwrap()) {
            Dichotomy::Equicontinuous { .. } => {}
            _ => panic!("disjoint cycles are equicontinuous"),
        }
    }

    #[test]
    fn seven_conditions_agree_on_small_cases() {
        for sft in [Sft::full_shift(2), Sft::golden_mean()] {
            let rep = positive_entropy_report(&sft);
            assert_eq!(rep.unanimous(), Some(true));
        }
        let mut allowed = vec![false; 16];
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            allowed[a * 4 + b] = true;
        }
        let rep = positive_entropy_report(&Sft::new(4, allowed).unwrap());
        assert_eq!(rep.unanimous(), Some(false));
    }

    #[test]
    fn classifier_on_standard_streams() {
        let full = Sft::full_shift(2);
        let h = 1 << 12;

        let fixed = UpPoint::periodic(Word::parse("0").unwrap()).unwrap();
        let r = point_classifier(&full, ClassifiedPoint::Exact(&fixed), h, 2, 8).unwrap();
        assert!(r.periodic && r.regularly_recurrent && r.minimal && r.recurrent && r.nonwandering);

        let alpha = UpPoint::new(Word::parse("1").unwrap(), Word::parse("0").unwrap()).unwrap();
        let r = point_classifier(&full, ClassifiedPoint::Exact(&alpha), h, 1, 8).unwrap();
        assert!(r.nonwandering && !r.recurrent && !r.minimal && !r.regularly_recurrent);

        let trans = transitive_word(2, h + 3);
        let r = point_classifier(&full, ClassifiedPoint::Sampled(&trans), h, 3, 8).unwrap();
        assert!(r.recurrent && !r.minimal);
        assert!(r.minimal_gap_witness.is_some());

        let ch = chacon_word(10_000 + 3);
        let r = point_classifier(&full, ClassifiedPoint::Sampled(&ch), 10_000, 3, 32).unwrap();
        assert!(r.minimal && !r.regularly_recurrent);
        assert_eq!(r.rr_refutations.len(), 32);
    }

    #[test]
    fn classifier_respects_hierarchy_on_cycles() {
        // disjoint cycle SFT: every point is regularly recurrent
        let mut allowed = vec![false; 4];
        allowed[1] = true; // 0 -> 1
        allowed[2] = true; // 1 -> 0
        let sft = Sft::new(2, allowed).unwrap();
        let p = UpPoint::periodic(Word::parse("01").unwrap()).unwrap();
        let r = point_classifier(&sft, ClassifiedPoint::Exact(&p), 64, 2, 8).unwrap();
        assert!(r.regularly_recurrent && r.minimal && r.recurrent && r.nonwandering);
    }
}
