//! Invariant measures on SFTs with exact rational cylinder masses, the
//! weak-* metric over the cylinder-indicator family, Sigmund candidate
//! streams, and the approximation pipeline producing a periodic measure
//! within any prescribed weak-* distance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{pow2_exponent, Dyadic};
use crate::error::{Error, Result};
use crate::specification::{periodic_spec_point, spec_constant, SpecRequest, SpecWindow};
use crate::systems::{Point, Sft, Symbol, System, UpPoint, Word};

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow2_rat(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

// ---------------------------------------------------------------------------
// The function family: cylinder indicators in a fixed enumeration
// ---------------------------------------------------------------------------

/// Deterministic enumeration of all words over the alphabet, ordered by
/// length then lexicographically; `xi_i` is the indicator of the cylinder
/// `[w_i]` with conventional norm 1, so term `i` of the metric weighs
/// `2^{-(i+1)}`.
pub fn enumerated_word(alphabet: usize, index: usize) -> Word {
    debug_assert!(index >= 1);
    let mut i = index - 1;
    let mut len = 1usize;
    loop {
        let count = alphabet.pow(len as u32);
        if i < count {
            let mut w = vec![0u8; len];
            let mut v = i;
            for t in (0..len).rev() {
                w[t] = (v % alphabet) as u8;
                v /= alphabet;
            }
            return Word::from_symbols(w.into_iter().map(Symbol).collect());
        }
        i -= count;
        len += 1;
    }
}

// ---------------------------------------------------------------------------
// Measure representations
// ---------------------------------------------------------------------------

/// A rational stochastic matrix with its exact stationary vector, supported
/// on allowed transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovMeasure {
    pub p: Vec<Vec<BigRational>>,
    pub pi: Vec<BigRational>,
}

/// An invariant (or empirical) measure with exact rational cylinder masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureRepr {
    /// Uniform mass on a periodic orbit (point has empty preperiod).
    Periodic { alphabet: usize, point: UpPoint },
    Markov { alphabet: usize, markov: MarkovMeasure },
    /// Finite Birkhoff average along a known prefix.
    Empirical { alphabet: usize, prefix: Word, n: usize },
}

impl MeasureRepr {
    pub fn alphabet(&self) -> usize {
        match self {
            MeasureRepr::Periodic { alphabet, .. }
            | MeasureRepr::Markov { alphabet, .. }
            | MeasureRepr::Empirical { alphabet, .. } => *alphabet,
        }
    }

    pub fn render(&self) -> String {
        match self {
            MeasureRepr::Periodic { point, .. } => format!("periodic point={point}\n"),
            MeasureRepr::Markov { markov, .. } => {
                let rows: Vec<String> = markov
                    .p
                    .iter()
                    .map(|r| r.iter().map(rat_str).collect::<Vec<_>>().join(","))
                    .collect();
                let pi: Vec<String> = markov.pi.iter().map(rat_str).collect();
                format!("markov P={} pi={}\n", rows.join(";"), pi.join(","))
            }
            MeasureRepr::Empirical { prefix, n, .. } => {
                format!("empirical point={prefix} n={n}\n")
            }
        }
    }

    pub fn parse(alphabet: usize, text: &str) -> Result<Self> {
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::Parse("empty measure".into()))?;
        if let Some(rest) = line.strip_prefix("periodic point=") {
            let point = crate::systems::io::parse_up_point(rest)?;
            periodic_orbit_measure(alphabet, &point)
        } else if let Some(rest) = line.strip_prefix("markov P=") {
            let (rows_s, pi_s) = rest
                .split_once(" pi=")
                .ok_or_else(|| Error::Parse("markov measure missing pi=".into()))?;
            let p: Vec<Vec<BigRational>> = rows_s
                .split(';')
                .map(|row| row.split(',').map(parse_rat).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let pi: Vec<BigRational> =
                pi_s.split(',').map(parse_rat).collect::<Result<_>>()?;
            Ok(MeasureRepr::Markov { alphabet, markov: MarkovMeasure { p, pi } })
        } else if let Some(rest) = line.strip_prefix("empirical point=") {
            let (w_s, n_s) = rest
                .split_once(" n=")
                .ok_or_else(|| Error::Parse("empirical measure missing n=".into()))?;
            let prefix = Word::parse(w_s.trim())?;
            let n: usize =
                n_s.trim().parse().map_err(|_| Error::Parse("bad empirical n".into()))?;
            empirical_measure(alphabet, prefix, n)
        } else {
            Err(Error::Parse(format!("unknown measure line {line:?}")))
        }
    }
}

pub fn rat_str(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let den: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

/// Uniform mass `1/p` on the orbit of a periodic point.
pub fn periodic_orbit_measure(alphabet: usize, point: &UpPoint) -> Result<MeasureRepr> {
    if !point.is_periodic() {
        return Err(Error::Input("periodic-orbit measure needs an empty preperiod".into()));
    }
    Ok(MeasureRepr::Periodic { alphabet, point: point.clone() })
}

/// The finite Birkhoff average over the first `n` shifts of a known prefix.
pub fn empirical_measure(alphabet: usize, prefix: Word, n: usize) -> Result<MeasureRepr> {
    if n == 0 {
        return Err(Error::Input("empirical measure needs n >= 1".into()));
    }
    if prefix.len() < n {
        return Err(Error::Depth { have: prefix.len(), need: n });
    }
    Ok(MeasureRepr::Empirical { alphabet, prefix, n })
}

/// Validates a Markov kernel against an SFT and solves for its exact
/// stationary vector.
pub fn markov_measure(sft: &Sft, p: Vec<Vec<BigRational>>) -> Result<MeasureRepr> {
    let d = sft.alphabet_size();
    if p.len() != d || p.iter().any(|r| r.len() != d) {
        return Err(Error::Input("kernel has wrong shape".into()));
    }
    for (a, row) in p.iter().enumerate() {
        let mut sum = BigRational::zero();
        for (b, v) in row.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::Input("negative kernel entry".into()));
            }
            if v.is_positive() && !sft.is_allowed_idx(a, b) {
                return Err(Error::Input(format!("kernel charges forbidden transition {a}{b}")));
            }
            sum += v;
        }
        if !sum.is_one() {
            return Err(Error::Input(format!("row {a} sums to {sum}, not 1")));
        }
    }
    let pi = markov_stationary(&p)?;
    Ok(MeasureRepr::Markov { alphabet: d, markov: MarkovMeasure { p, pi } })
}

/// Exact stationary vector of an irreducible rational stochastic matrix.
pub fn markov_stationary(p: &[Vec<BigRational>]) -> Result<Vec<BigRational>> {
    let n = p.len();
    if n == 0 {
        return Err(Error::Input("empty kernel".into()));
    }
    // irreducibility of the support graph
    let comps = {
        let succ = |v: usize| -> Vec<usize> {
            (0..n).filter(|&u| p[v][u].is_positive()).collect()
        };
        let mut reach_all = true;
        for start in 0..n {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for u in succ(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            if seen.iter().any(|&s| !s) {
                reach_all = false;
                break;
            }
        }
        reach_all
    };
    if !comps {
        return Err(Error::Reducible);
    }
    // Solve pi (P - I) = 0 with sum(pi) = 1: columns of (P^T - I), last row
    // replaced by the normalization.
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    let mut rhs: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in 0..n - 1 {
        for j in 0..n {
            m[i][j] = p[j][i].clone() - if i == j { BigRational::one() } else { BigRational::zero() };
        }
    }
    for j in 0..n {
        m[n - 1][j] = BigRational::one();
    }
    rhs[n - 1] = BigRational::one();
    // Gaussian elimination with nonzero pivots.
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::Reducible)?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].clone();
        for j in col..n {
            m[col][j] = &m[col][j] / &inv;
        }
        rhs[col] = &rhs[col] / &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..n {
                    let sub = &factor * &m[col][j];
                    m[r][j] = &m[r][j] - &sub;
                }
                let sub = &factor * &rhs[col];
                rhs[r] = &rhs[r] - &sub;
            }
        }
    }
    Ok(rhs)
}

// ---------------------------------------------------------------------------
// Cylinder masses and the weak-* metric
// ---------------------------------------------------------------------------

/// Exact mass of the cylinder `[w]`.
pub fn cylinder_mass(measure: &MeasureRepr, w: &Word) -> Result<BigRational> {
    if w.is_empty() {
        return Ok(BigRational::one());
    }
    if w.symbols().iter().any(|s| s.index() >= measure.alphabet()) {
        return Err(Error::Input("cylinder word out of alphabet".into()));
    }
    match measure {
        MeasureRepr::Periodic { point, .. } => {
            let p = point.period().len();
            let count = (0..p)
                .filter(|&t| (0..w.len()).all(|l| point.symbol_at(t + l) == w[l]))
                .count();
            Ok(BigRational::new(BigInt::from(count), BigInt::from(p)))
        }
        MeasureRepr::Markov { markov, .. } => {
            let mut mass = markov.pi[w[0].index()].clone();
            for pair in w.symbols().windows(2) {
                mass *= &markov.p[pair[0].index()][pair[1].index()];
            }
            Ok(mass)
        }
        MeasureRepr::Empirical { prefix, n, .. } => {
            let need = n + w.len() - 1;
            if prefix.len() < need {
                return Err(Error::Depth { have: prefix.len(), need });
            }
            let count = (0..*n)
                .filter(|&i| (0..w.len()).all(|l| prefix[i + l] == w[l]))
                .count();
            Ok(BigRational::new(BigInt::from(count), BigInt::from(*n)))
        }
    }
}

/// Certified enclosure `lo <= D(mu, nu) <= hi` with `hi - lo` below the tail
/// tolerance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub terms: usize,
}

impl DistanceInterval {
    pub fn render(&self) -> String {
        format!("lo={}\nhi={}\nterms={}\n", rat_str(&self.lo), rat_str(&self.hi), self.terms)
    }
}

/// The weak-* series truncated once the tail `2^{-(I+1)}` drops below the
/// tolerance: each term is `|mu[w_i] - nu[w_i]| / 2^{i+1}`.
pub fn weak_star_distance(
    mu: &MeasureRepr,
    nu: &MeasureRepr,
    tail_tol: &BigRational,
) -> Result<DistanceInterval> {
    if mu.alphabet() != nu.alphabet() {
        return Err(Error::TypeMismatch("measures над different alphabets".into()));
    }
    if !tail_tol.is_positive() {
        return Err(Error::Input("tail tolerance must be positive".into()));
    }
    let mut terms = 0usize;
    let mut tail = pow2_rat(-1);
    while &tail >= tail_tol {
        terms += 1;
        tail /= big(2);
    }
    let mut lo = BigRational::zero();
    for i in 1..=terms {
        let w = enumerated_word(mu.alphabet(), i);
        let diff = (cylinder_mass(mu, &w)? - cylinder_mass(nu, &w)?).abs();
        lo += diff * pow2_rat(-(i as i64 + 1));
    }
    let hi = &lo + &tail;
    Ok(DistanceInterval { lo, hi, terms })
}

// ---------------------------------------------------------------------------
// Sigmund candidate stream
// ---------------------------------------------------------------------------

/// Deterministic stream of periodic-orbit measures with (least rotation)
/// cycle length at least `ell`, ordered by period then lexicographically.
pub struct SigmundCandidates {
    sft: Sft,
    period: usize,
    buffer: std::collections::VecDeque<UpPoint>,
}

pub fn sigmund_candidates(sft: &Sft, ell: usize) -> SigmundCandidates {
    SigmundCandidates {
        sft: sft.clone(),
        period: ell.max(1).saturating_sub(1),
        buffer: std::collections::VecDeque::new(),
    }
}

impl SigmundCandidates {
    fn refill(&mut self) {
        while self.buffer.is_empty() {
            self.period += 1;
            if self.period > 24 {
                // periods are unbounded; the stream is consumed lazily and a
                // desk-scale cap keeps enumeration affordable
                return;
            }
            let mut cycle = Vec::new();
            enumerate_cycles(&self.sft, self.period, &mut cycle, &mut self.buffer);
        }
    }
}

fn enumerate_cycles(
    sft: &Sft,
    len: usize,
    prefix: &mut Vec<usize>,
    out: &mut std::collections::VecDeque<UpPoint>,
) {
    if prefix.len() == len {
        let first = prefix[0];
        let last = prefix[len - 1];
        if sft.is_allowed_idx(last, first) && is_least_rotation(prefix) {
            let w = Word::from_indices(prefix);
            let p = UpPoint::periodic(w).expect("nonempty cycle");
            if p.period().len() == len {
                // primitive cycles only; powers repeat smaller-period measures
                out.push_back(p);
            }
        }
        return;
    }
    let range: Vec<usize> = if prefix.is_empty() {
        (0..sft.alphabet_size()).collect()
    } else {
        sft.successors(prefix[prefix.len() - 1]).collect()
    };
    for b in range {
        prefix.push(b);
        enumerate_cycles(sft, len, prefix, out);
        prefix.pop();
    }
}

fn is_least_rotation(w: &[usize]) -> bool {
    let n = w.len();
    for s in 1..n {
        for t in 0..n {
            match w[(s + t) % n].cmp(&w[t]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => continue,
            }
        }
    }
    true
}

impl Iterator for SigmundCandidates {
    type Item = MeasureRepr;

    fn next(&mut self) -> Option<MeasureRepr> {
        if self.buffer.is_empty() {
            self.refill();
        }
        let point = self.buffer.pop_front()?;
        let alphabet = self.sft.alphabet_size();
        Some(MeasureRepr::Periodic { alphabet, point })
    }
}

// ---------------------------------------------------------------------------
// The approximation pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ApproxDiagnostics {
    /// Partition depth.
    pub t: usize,
    /// Number of partition classes with positive mass.
    pub s: usize,
    /// Birkhoff sample length.
    pub n_len: usize,
    /// Specification constant used for the window request.
    pub m_const: usize,
    /// Number of windows.
    pub m_windows: usize,
    /// Period of the constructed point.
    pub p: usize,
}

#[derive(Debug, Clone)]
pub struct ApproxOutcome {
    pub nu: MeasureRepr,
    pub z: Point,
    pub interval: DistanceInterval,
    pub diagnostics: ApproxDiagnostics,
}

/// Approximates an invariant measure by a periodic-orbit measure within
/// weak-* distance `eps`, with a certified interval.
///
/// Pipeline: fix the cylinder-indicator budget for `eps`; partition by
/// depth-`t` cylinders; draw seeded kernel-typical words and verify their
/// finite Birkhoff averages against the exact masses (retrying with longer
/// samples until the check passes); round the masses to integer window
/// multiplicities by largest remainder; visit every representative with a
/// specification request of period `m(N+M)`; return the periodic-orbit
/// measure of the constructed point together with the exact distance
/// enclosure.
pub fn approximate_measure(
    sft: &Sft,
    mu: &MeasureRepr,
    eps: &Dyadic,
    seed: u64,
) -> Result<ApproxOutcome> {
    let k = pow2_exponent(eps)?;
    let eps_rat = eps.to_rational();
    let tail_tol = &eps_rat / big(4);
    match mu {
        MeasureRepr::Periodic { point, .. } => {
            let interval = weak_star_distance(mu, mu, &tail_tol)?;
            return Ok(ApproxOutcome {
                nu: mu.clone(),
                z: Point::Sft(point.clone()),
                interval,
                diagnostics: ApproxDiagnostics {
                    t: 0,
                    s: 0,
                    n_len: 0,
                    m_const: 0,
                    m_windows: 0,
                    p: point.period().len(),
                },
            });
        }
        MeasureRepr::Empirical { .. } => {
            return Err(Error::Input("approximation takes a Markov or periodic measure".into()))
        }
        MeasureRepr::Markov { .. } => {}
    }

    // (i) function budget: indicators w_1..w_I with tail 2^{-(I+1)} <= eps/4
    let mut budget = 0usize;
    let mut tail = pow2_rat(-1);
    while tail >= tail_tol {
        budget += 1;
        tail /= big(2);
    }
    let family: Vec<Word> =
        (1..=budget).map(|i| enumerated_word(sft.alphabet_size(), i)).collect();
    let t = family.iter().map(Word::len).max().expect("nonempty family");

    // (ii) partition into depth-t cylinders of positive mass
    let mut classes: Vec<(Word, BigRational)> = Vec::new();
    enumerate_legal_words(sft, t, &mut |w| {
        let mass = cylinder_mass(mu, &w)?;
        if mass.is_positive() {
            classes.push((w, mass));
        }
        Ok(())
    })?;
    let s = classes.len();
    if s == 0 {
        return Err(Error::Input("measure has empty support at partition depth".into()));
    }

    // specification scale: windows must transfer indicator reads exactly
    let eps_spec = Dyadic::pow2(-(t as i64 + 2));
    let system = System::Sft(sft.clone());
    let m_const = spec_constant(&system, &eps_spec)?;

    // (iii) seeded typical words, Birkhoff-checked against exact masses
    let err_budget = &eps_rat / big(8);
    let mut n_len = 16usize;
    let min_n = 16 * m_const * (1usize << k);
    while n_len < min_n {
        n_len *= 2; // keeps 2M/N <= eps/8
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let markov = match mu {
        MeasureRepr::Markov { markov, .. } => markov,
        _ => unreachable!("other kinds returned above"),
    };
    let mut reps: Vec<Word> = Vec::new();
    const N_CAP: usize = 1 << 22;
    loop {
        reps.clear();
        let sample_len = n_len + t + m_const + k as usize + 16;
        let mut all_ok = true;
        for (w0, _) in &classes {
            let sample = sample_markov_word(markov, w0, sample_len, &mut rng);
            let emp = empirical_measure(sft.alphabet_size(), sample.clone(), n_len)?;
            for w in &family {
                if !sft.word_legal(w) {
                    continue;
                }
                let diff = (cylinder_mass(&emp, w)? - cylinder_mass(mu, w)?).abs();
                if diff >= err_budget {
                    all_ok = false;
                    break;
                }
            }
            if !all_ok {
                break;
            }
            reps.push(sample);
        }
        if all_ok {
            break;
        }
        n_len *= 2;
        if n_len > N_CAP {
            return Err(Error::CapExceeded(format!(
                "Birkhoff check (eps/8 = {}) still failing at N = {}",
                err_budget, n_len
            )));
        }
    }

    // (iv) integer weights by largest remainder: sum m_j = m, |mu(P_j) - m_j/m| <= 1/m
    let m_total = 8 * s * (1usize << k) + 1;
    let weights = largest_remainder(&classes, m_total);

    // (v) the window request: p = m(N+M), window r follows its class word
    let p = m_total * (n_len + m_const);
    let mut windows = Vec::with_capacity(m_total);
    let mut class_of_window = Vec::with_capacity(m_total);
    for (j, w_j) in weights.iter().enumerate() {
        for _ in 0..*w_j {
            class_of_window.push(j);
        }
    }
    debug_assert_eq!(class_of_window.len(), m_total);
    for (r, &j) in class_of_window.iter().enumerate() {
        let a = r * (n_len + m_const);
        let b = a + n_len - 1;
        let x = backward_extension(sft, &reps[j], a)?;
        windows.push(SpecWindow { a, b, point: Point::Sft(x) });
    }
    let req = SpecRequest { eps: eps_spec.clone(), windows, p };

    // (vi) the specification point and (vii) its orbit measure
    let (z, _cert) = periodic_spec_point(&system, &req)?;
    let z_up = match &z {
        Point::Sft(x) => x.clone(),
        _ => unreachable!("SFT system"),
    };
    let nu = periodic_orbit_measure(sft.alphabet_size(), &z_up)?;
    let interval = weak_star_distance(mu, &nu, &tail_tol)?;
    if interval.hi >= eps_rat {
        return Err(Error::CapExceeded(format!(
            "distance interval [{}, {}] misses eps = {}; violated proof-step: indicator transfer",
            rat_str(&interval.lo),
            rat_str(&interval.hi),
            eps
        )));
    }
    Ok(ApproxOutcome {
        nu,
        z,
        interval,
        diagnostics: ApproxDiagnostics { t, s, n_len, m_const, m_windows: m_total, p },
    })
}

fn enumerate_legal_words(
    sft: &Sft,
    len: usize,
    f: &mut dyn FnMut(Word) -> Result<()>,
) -> Result<()> {
    fn go(
        sft: &Sft,
        len: usize,
        prefix: &mut Vec<usize>,
        f: &mut dyn FnMut(Word) -> Result<()>,
    ) -> Result<()> {
        if prefix.len() == len {
            return f(Word::from_indices(prefix));
        }
        let range: Vec<usize> = if prefix.is_empty() {
            (0..sft.alphabet_size()).collect()
        } else {
            sft.successors(prefix[prefix.len() - 1]).collect()
        };
        for b in range {
            prefix.push(b);
            go(sft, len, prefix, f)?;
            prefix.pop();
        }
        Ok(())
    }
    go(sft, len, &mut Vec::new(), f)
}

/// Kernel-typical word of the given length starting with the class word:
/// successive letters drawn from the transition row by an exact rational
/// inverse-CDF over a 64-bit uniform draw.
fn sample_markov_word(
    markov: &MarkovMeasure,
    start: &Word,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Word {
    let mut out: Vec<usize> = start.symbols().iter().map(|s| s.index()).collect();
    while out.len() < len {
        let row = &markov.p[out[out.len() - 1]];
        let draw = BigRational::new(BigInt::from(rng.gen::<u64>()), BigInt::one() << 64);
        let mut acc = BigRational::zero();
        let mut chosen = row.len() - 1;
        for (b, q) in row.iter().enumerate() {
            acc += q;
            if draw < acc {
                chosen = b;
                break;
            }
        }
        out.push(chosen);
    }
    Word::from_indices(&out)
}

fn largest_remainder(classes: &[(Word, BigRational)], m: usize) -> Vec<usize> {
    let m_rat = big(m as i64);
    let mut floors: Vec<usize> = Vec::with_capacity(classes.len());
    let mut remainders: Vec<(BigRational, usize)> = Vec::with_capacity(classes.len());
    let mut total = 0usize;
    for (j, (_, mass)) in classes.iter().enumerate() {
        let scaled = mass * &m_rat;
        let fl = scaled.floor();
        let f: usize = fl.to_integer().to_string().parse().expect("small floor");
        floors.push(f);
        total += f;
        remainders.push((&scaled - fl, j));
    }
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut need = m - total;
    for (_, j) in remainders {
        if need == 0 {
            break;
        }
        floors[j] += 1;
        need -= 1;
    }
    floors
}

/// A point whose orbit reaches the sampled word after exactly `steps` steps:
/// the word is extended backward by greedy least predecessors and frozen.
fn backward_extension(sft: &Sft, word: &Word, steps: usize) -> Result<UpPoint> {
    let mut back = Vec::with_capacity(steps);
    let mut cur = word[0].index();
    for _ in 0..steps {
        let p = sft
            .predecessors(cur)
            .next()
            .expect("essential graph has predecessors");
        back.push(p);
        cur = p;
    }
    back.reverse();
    let full = Word::from_indices(&back).concat(word);
    sft.freeze(&full)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    fn bernoulli_half() -> MeasureRepr {
        let h = BigRational::new(BigInt::one(), BigInt::from(2));
        markov_measure(
            &Sft::full_shift(2),
            vec![vec![h.clone(), h.clone()], vec![h.clone(), h]],
        )
        .unwrap()
    }

    #[test]
    fn enumeration_orders_by_length_then_lex() {
        let words: Vec<String> =
            (1..=7).map(|i| enumerated_word(2, i).to_string()).collect();
        assert_eq!(words, vec!["0", "1", "00", "01", "10", "11", "000"]);
    }

    #[test]
    fn cylinder_masses() {
        let mu = bernoulli_half();
        assert_eq!(
            cylinder_mass(&mu, &Word::parse("01").unwrap()).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(4))
        );
        let per = periodic_orbit_measure(2, &up("", "01")).unwrap();
        assert_eq!(
            cylinder_mass(&per, &Word::parse("0").unwrap()).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(2))
        );
        let per3 = periodic_orbit_measure(2, &up("", "001")).unwrap();
        assert_eq!(
            cylinder_mass(&per3, &Word::parse("0").unwrap()).unwrap(),
            BigRational::new(BigInt::from(2), BigInt::from(3))
        );
        assert!(periodic_orbit_measure(2, &up("1", "0")).is_err());
    }

    #[test]
    fn parry_markov_on_golden_mean() {
        let g = Sft::golden_mean();
        let h = BigRational::new(BigInt::one(), BigInt::from(2));
        let mu = markov_measure(
            &g,
            vec![vec![h.clone(), h.clone()], vec![BigRational::one(), BigRational::zero()]],
        )
        .unwrap();
        match &mu {
            MeasureRepr::Markov { markov, .. } => {
                assert_eq!(markov.pi[0], BigRational::new(BigInt::from(2), BigInt::from(3)));
                assert_eq!(markov.pi[1], BigRational::new(BigInt::one(), BigInt::from(3)));
            }
            _ => panic!("expected markov"),
        }
        // mass of "00" = pi_0 * P_00 = 1/3
        assert_eq!(
            cylinder_mass(&mu, &Word::parse("00").unwrap()).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(3))
        );
    }

    #[test]
    fn stationary_examples() {
        let pi = markov_stationary(&[
            vec![BigRational::zero(), BigRational::one()],
            vec![BigRational::one(), BigRational::zero()],
        ])
        .unwrap();
        assert_eq!(pi[0], BigRational::new(BigInt::one(), BigInt::from(2)));
        let pi = markov_stationary(&[vec![BigRational::one()]]).unwrap();
        assert_eq!(pi[0], BigRational::one());
        // reducible: identity on two states
        assert!(markov_stationary(&[
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ])
        .is_err());
    }

    #[test]
    fn weak_star_basics() {
        let mu = bernoulli_half();
        let tol = BigRational::new(BigInt::one(), BigInt::from(1024));
        let d = weak_star_distance(&mu, &mu, &tol).unwrap();
        assert!(d.lo.is_zero());
        assert!(d.hi <= tol);

        let zero = periodic_orbit_measure(2, &up("", "0")).unwrap();
        let one = periodic_orbit_measure(2, &up("", "1")).unwrap();
        let d = weak_star_distance(&zero, &one, &tol).unwrap();
        // first two terms contribute |1-0|/4 + |0-1|/8 already
        assert!(d.lo >= BigRational::new(BigInt::from(3), BigInt::from(8)));

        let d2 = weak_star_distance(&zero, &zero, &tol).unwrap();
        assert!(d2.lo.is_zero());
    }

    #[test]
    fn measure_invariance_of_masses() {
        // mu[w] = sum_a mu[aw] for markov and periodic kinds
        let g = Sft::golden_mean();
        let h = BigRational::new(BigInt::one(), BigInt::from(2));
        let mu = markov_measure(
            &g,
            vec![vec![h.clone(), h.clone()], vec![BigRational::one(), BigRational::zero()]],
        )
        .unwrap();
        let per = periodic_orbit_measure(2, &up("", "00101")).unwrap();
        for m in [&mu, &per] {
            for i in 1..=14usize {
                let w = enumerated_word(2, i);
                let mut sum = BigRational::zero();
                for a in 0..2usize {
                    let mut ext = Word::from_indices(&[a]);
                    ext = ext.concat(&w);
                    sum += cylinder_mass(m, &ext).unwrap();
                }
                assert_eq!(sum, cylinder_mass(m, &w).unwrap());
            }
        }
    }

    #[test]
    fn sigmund_stream_starts_with_fixed_points() {
        let first: Vec<String> = sigmund_candidates(&Sft::full_shift(2), 1)
            .take(4)
            .map(|m| match m {
                MeasureRepr::Periodic { point, .. } => point.period().to_string(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(first, vec!["0", "1", "01", "001"]);
        // golden mean excludes the all-ones cycle
        let gm: Vec<String> = sigmund_candidates(&Sft::golden_mean(), 2)
            .take(3)
            .map(|m| match m {
                MeasureRepr::Periodic { point, .. } => point.period().to_string(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(gm, vec!["01", "001", "0001"]);
    }

    #[test]
    fn approximate_periodic_measure_short_circuits() {
        let mu = periodic_orbit_measure(2, &up("", "01")).unwrap();
        let out =
            approximate_measure(&Sft::full_shift(2), &mu, &Dyadic::pow2(-2), 7).unwrap();
        assert_eq!(out.nu, mu);
        assert!(out.interval.lo.is_zero());
    }

    #[test]
    fn approximate_bernoulli_quarter() {
        let mu = bernoulli_half();
        let out =
            approximate_measure(&Sft::full_shift(2), &mu, &Dyadic::pow2(-2), 20240601).unwrap();
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        assert!(out.interval.hi < quarter);
        match &out.nu {
            MeasureRepr::Periodic { point, .. } => assert!(point.is_periodic()),
            _ => panic!("expected periodic output"),
        }
    }
}
