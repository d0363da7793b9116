//! Embedded full shifts inside primitive SFTs: anchor words, probe
//! cylinders, the encode/decode factor-map pair, and the witness points
//! separating the recurrence hierarchy.
//!
//! The construction stitches one anchor word per target cylinder. All anchors
//! share a common prefix so that the periodic pseudo-orbit obtained by
//! following an arbitrary symbol stream has jumps below the shadowing
//! modulus; the traced point is then the plain concatenation of anchors, and
//! probe reads at offset `r` recover the stream exactly.

use crate::analysis::{point_classifier, ClassifiedPoint, ClassifierReport};
use crate::chains::{is_primitive, primitivity_index, BlockGraph};
use crate::dyadic::{pow2_exponent, Dyadic};
use crate::error::{Error, Result};
use crate::shadowing::PseudoOrbit;
use crate::systems::{ApproxPoint, Point, Sft, Symbol, UpPoint, Word};

/// The data of one embedded full shift on `d+1` letters.
#[derive(Debug, Clone)]
pub struct EmbeddingData {
    sft: Sft,
    /// Anchor length; the factor map intertwines `f^m` with the shift.
    pub m: usize,
    /// Probe offset inside each anchor.
    pub r: usize,
    /// Separation level actually used (`2^{-e}`), at most the requested eps.
    pub eps: Dyadic,
    /// Shared prefix length of all anchors.
    pub common_prefix: usize,
    /// One legal word of length `m` per letter.
    pub anchors: Vec<Word>,
    /// Pairwise distinct probe words read at offset `r`.
    pub probes: Vec<Word>,
    /// The requested target cylinders.
    pub targets: Vec<Word>,
}

/// Builds an embedding whose probe cylinders refine the given target
/// cylinders: every decoded letter `i` certifies that the shifted
/// representative lies in `U_i`.
pub fn embed_full_shift(sft: &Sft, targets: &[Word], eps: &Dyadic) -> Result<EmbeddingData> {
    if targets.is_empty() {
        return Err(Error::Input("need at least one target cylinder".into()));
    }
    if !is_primitive(sft) {
        return Err(Error::MixingRequired("embedding needs a primitive SFT".into()));
    }
    for t in targets {
        if t.is_empty() || !sft.word_legal(t) {
            return Err(Error::Infeasible(format!("target cylinder [{t}] is empty in the SFT")));
        }
    }
    let e_req = pow2_exponent(eps)?;

    // Interior points: lexicographically least in each target, forced apart
    // when two targets coincide.
    let mut interior: Vec<UpPoint> = Vec::with_capacity(targets.len());
    for t in targets {
        let mut candidate = sft.freeze(t)?;
        if interior.contains(&candidate) {
            candidate = distinct_point_in_cylinder(sft, t, &interior)?;
        }
        interior.push(candidate);
    }

    // Separation scale: lambda = 2^{-q} is the least pairwise distance.
    let mut q = 0usize;
    for i in 0..interior.len() {
        for j in i + 1..interior.len() {
            let k = interior[i]
                .first_disagreement(&interior[j])
                .expect("interior points are distinct");
            q = q.max(k);
        }
    }
    let max_target = targets.iter().map(Word::len).max().unwrap_or(1);
    // eps < lambda/8 keeps the probe cylinders separated by more than eps.
    let e = (e_req as usize).max(q + 4).max(max_target).max(1);
    let eps_used = Dyadic::pow2(-(e as i64));

    let probes: Vec<Word> = interior.iter().map(|z| z.prefix(e)).collect();
    let t_len = e + 2; // shared prefix length: junction jumps <= 2^{-(e+2)}
    let common = sft.freeze(&Word::from_indices(&[0]))?.prefix(t_len);

    let idx = primitivity_index(sft).expect("primitive SFT has an index");
    let paths = BlockGraph::new(sft, 1)?;
    let gap = idx.max(1);
    let r = t_len - 1 + gap; // position of the probe inside the anchor
    let m = r + e - 1 + gap; // anchor length; the closing gap returns to the prefix

    let mut anchors = Vec::with_capacity(targets.len());
    for w in &probes {
        let mut a: Vec<usize> = common.symbols().iter().map(|s| s.index()).collect();
        let p1 = paths.find_path(
            &[common[t_len - 1].index()],
            &[w[0].index()],
            r - (t_len - 1),
        )?;
        a.extend(p1[1..p1.len() - 1].iter().map(|&b| paths.words[b][0].index()));
        a.extend(w.symbols().iter().map(|s| s.index()));
        let p2 = paths.find_path(&[w[e - 1].index()], &[common[0].index()], m - (r + e - 1))?;
        a.extend(p2[1..p2.len() - 1].iter().map(|&b| paths.words[b][0].index()));
        debug_assert_eq!(a.len(), m);
        anchors.push(Word::from_indices(&a));
    }

    let data = EmbeddingData {
        sft: sft.clone(),
        m,
        r,
        eps: eps_used,
        common_prefix: t_len,
        anchors,
        probes,
        targets: targets.to_vec(),
    };
    data.audit()?;
    Ok(data)
}

fn distinct_point_in_cylinder(sft: &Sft, t: &Word, taken: &[UpPoint]) -> Result<UpPoint> {
    // Breadth-first over extensions in lex order.
    let mut frontier = vec![t.clone()];
    for _ in 0..32 {
        let mut next = Vec::new();
        for w in &frontier {
            let last = w[w.len() - 1].index();
            for b in sft.successors(last) {
                let mut ext = w.clone();
                ext.push(Symbol(b as u8));
                let p = sft.freeze(&ext)?;
                if !taken.contains(&p) {
                    return Ok(p);
                }
                next.push(ext);
            }
        }
        frontier = next;
    }
    Err(Error::Infeasible(format!("cylinder [{t}] has too few points")))
}

impl EmbeddingData {
    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn letters(&self) -> usize {
        self.anchors.len()
    }

    /// Re-checks every invariant of the data from scratch.
    pub fn audit(&self) -> Result<()> {
        let e = self.probes.first().map(Word::len).unwrap_or(0);
        let fail = |msg: String| Err(Error::Infeasible(msg));
        if self.anchors.len() != self.probes.len() || self.anchors.len() != self.targets.len() {
            return fail("mismatched anchor/probe/target counts".into());
        }
        for (i, a) in self.anchors.iter().enumerate() {
            if a.len() != self.m || !self.sft.word_legal(a) {
                return fail(format!("anchor {i} is not a legal word of length m"));
            }
            // junction: every anchor may be followed by every anchor
            for b in &self.anchors {
                if !self.sft.is_allowed(a[self.m - 1], b[0]) {
                    return fail(format!("anchor {i} cannot precede another anchor"));
                }
            }
            // shared prefix
            if a.symbols()[..self.common_prefix] != self.anchors[0].symbols()[..self.common_prefix] {
                return fail(format!("anchor {i} breaks the common prefix"));
            }
            // probe sits at offset r
            if a.symbols()[self.r..self.r + e] != self.probes[i].symbols()[..] {
                return fail(format!("anchor {i} misses its probe at offset r"));
            }
            // containment: the probe cylinder refines the target cylinder
            let t = &self.targets[i];
            if self.probes[i].symbols()[..t.len()] != t.symbols()[..] {
                return fail(format!("probe {i} does not refine its target cylinder"));
            }
        }
        // probes pairwise disjoint and eps-separated
        for i in 0..self.probes.len() {
            for j in i + 1..self.probes.len() {
                let Some(k) = self.probes[i]
                    .symbols()
                    .iter()
                    .zip(self.probes[j].symbols())
                    .position(|(x, y)| x != y)
                else {
                    return fail(format!("probes {i} and {j} coincide"));
                };
                if Dyadic::pow2(-(k as i64)) <= self.eps {
                    return fail(format!("probes {i} and {j} are not separated beyond eps"));
                }
            }
        }
        // the junction jump of the stitched pseudo-orbit stays below the
        // shadowing modulus for eps
        if Dyadic::pow2(-(self.common_prefix as i64)) >= self.eps.halved() {
            return fail("shared prefix too short for the tracing modulus".into());
        }
        Ok(())
    }

    fn check_letters(&self, alpha: &Word) -> Result<()> {
        if alpha.symbols().iter().any(|s| s.index() >= self.letters()) {
            return Err(Error::Input("stream letter out of range".into()));
        }
        Ok(())
    }

    /// The periodic pseudo-orbit stitched from anchor orbits along `alpha`,
    /// as in the underlying tracing argument. Used by audits; `encode_*`
    /// produce its traced point directly.
    pub fn stitched_orbit(&self, alpha: &Word, periodic: bool) -> Result<PseudoOrbit> {
        self.check_letters(alpha)?;
        if alpha.is_empty() {
            return Err(Error::Input("empty stream".into()));
        }
        let mut points = Vec::with_capacity(alpha.len() * self.m);
        for s in alpha.symbols() {
            let p = UpPoint::periodic(self.anchors[s.index()].clone())?;
            for t in 0..self.m {
                points.push(Point::Sft(p.shifted_by(t)));
            }
        }
        let delta = self.eps.halved();
        Ok(if periodic {
            PseudoOrbit::periodic(points, delta)
        } else {
            PseudoOrbit::finite(points, delta)
        })
    }

    /// Encodes a finite stream prefix: the traced point of the stitched
    /// pseudo-orbit, exact to resolution `m * |alpha|`.
    pub fn encode_prefix(&self, alpha: &Word) -> Result<ApproxPoint> {
        self.check_letters(alpha)?;
        if alpha.is_empty() {
            return Err(Error::Input("empty stream".into()));
        }
        let mut w = Word::empty();
        for s in alpha.symbols() {
            w = w.concat(&self.anchors[s.index()]);
        }
        let res = self.m * alpha.len() - 1;
        ApproxPoint::new(w, res)
    }

    /// Encodes an eventually periodic stream as an exact point.
    pub fn encode_periodic(&self, alpha: &UpPoint) -> Result<UpPoint> {
        self.check_letters(alpha.preperiod())?;
        self.check_letters(alpha.period())?;
        let mut pre = Word::empty();
        for s in alpha.preperiod().symbols() {
            pre = pre.concat(&self.anchors[s.index()]);
        }
        let mut per = Word::empty();
        for s in alpha.period().symbols() {
            per = per.concat(&self.anchors[s.index()]);
        }
        UpPoint::new(pre, per)
    }

    /// The subsystem representative `f^r(y)`; with `a_0 = i` it lies in the
    /// probe cylinder, hence in the target `U_i`.
    pub fn embedded_representative(&self, y: &UpPoint) -> UpPoint {
        y.shifted_by(self.r)
    }

    fn match_probe(&self, read: &[Symbol]) -> Option<usize> {
        self.probes.iter().position(|p| p.symbols() == read)
    }

    /// Reads `n` stream letters back from an exact point via the probe
    /// windows at times `m*i + r`.
    pub fn decode(&self, y: &UpPoint, n: usize) -> Result<Word> {
        let e = self.probes[0].len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let base = self.m * i + self.r;
            let read: Vec<Symbol> = (0..e).map(|t| y.symbol_at(base + t)).collect();
            match self.match_probe(&read) {
                Some(s) => out.push(Symbol(s as u8)),
                None => return Err(Error::NotInSubsystem { step: i }),
            }
        }
        Ok(Word::from_symbols(out))
    }

    /// Same as [`decode`](Self::decode) for finite-resolution points.
    pub fn decode_prefix(&self, y: &ApproxPoint, n: usize) -> Result<Word> {
        let e = self.probes[0].len();
        let need = self.m * (n - 1) + self.r + e;
        if n == 0 || y.prefix().len() < need {
            return Err(Error::Depth { have: y.prefix().len(), need });
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let base = self.m * i + self.r;
            let read: Vec<Symbol> = y.prefix().symbols()[base..base + e].to_vec();
            match self.match_probe(&read) {
                Some(s) => out.push(Symbol(s as u8)),
                None => return Err(Error::NotInSubsystem { step: i }),
            }
        }
        Ok(Word::from_symbols(out))
    }

    pub fn render(&self) -> String {
        let mut out = format!("m={}\nr={}\neps={}\n", self.m, self.r, self.eps);
        for (i, a) in self.anchors.iter().enumerate() {
            out.push_str(&format!("anchor {i}={a}\n"));
        }
        for (i, p) in self.probes.iter().enumerate() {
            out.push_str(&format!("probe {i}={p}\n"));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Canonical symbol streams
// ---------------------------------------------------------------------------

/// Prefix of the fixed point of the substitution `0 -> 0010, 1 -> 1`.
pub fn chacon_word(n: usize) -> Word {
    let mut w: Vec<u8> = vec![0];
    while w.len() < n.max(1) {
        let mut next = Vec::with_capacity(w.len() * 4);
        for &c in &w {
            if c == 0 {
                next.extend_from_slice(&[0, 0, 1, 0]);
            } else {
                next.push(1);
            }
        }
        w = next;
    }
    w.truncate(n);
    Word::from_symbols(w.into_iter().map(Symbol).collect())
}

/// Concatenation of all words over `{0..alphabet-1}` ordered by length then
/// lexicographically; a deterministic transitive stream.
pub fn transitive_word(alphabet: usize, n: usize) -> Word {
    let mut out: Vec<Symbol> = Vec::with_capacity(n);
    let mut len = 1usize;
    'outer: loop {
        let count = alphabet.pow(len as u32);
        for idx in 0..count {
            let mut v = idx;
            let mut w = vec![0u8; len];
            for t in (0..len).rev() {
                w[t] = (v % alphabet) as u8;
                v /= alphabet;
            }
            for c in w {
                out.push(Symbol(c));
                if out.len() == n {
                    break 'outer;
                }
            }
        }
        len += 1;
    }
    Word::from_symbols(out)
}

// ---------------------------------------------------------------------------
// Witness points for the recurrence hierarchy gaps
// ---------------------------------------------------------------------------

/// One hierarchy-gap witness: the symbol stream carrying the dynamics, its
/// classifier report (computed on the stream in the full shift, where the
/// claims live), and its encoded image in the host SFT.
#[derive(Debug, Clone)]
pub struct Witness {
    pub label: &'static str,
    pub alpha_description: String,
    pub report: ClassifierReport,
    pub encoded: Point,
}

/// The three witnesses of the hierarchy gaps: nonwandering-not-recurrent,
/// recurrent-not-minimal, and minimal-not-regularly-recurrent (Chacon
/// stream).
pub fn witness_points(
    emb: &EmbeddingData,
    horizon: usize,
    depth: usize,
    k_cap: usize,
) -> Result<Vec<Witness>> {
    if emb.letters() < 2 {
        return Err(Error::Infeasible("witnesses need at least two letters".into()));
    }
    let full = Sft::full_shift(emb.letters());
    let enc_len = 32;

    let alpha1 = UpPoint::new(Word::parse("1")?, Word::parse("0")?)?;
    let w1 = Witness {
        label: "nonwandering-not-recurrent",
        alpha_description: "1000...".into(),
        report: point_classifier(&full, ClassifiedPoint::Exact(&alpha1), horizon, 1, k_cap)?,
        encoded: Point::Sft(emb.encode_periodic(&alpha1)?),
    };

    let alpha2 = transitive_word(emb.letters(), horizon + depth);
    let w2 = Witness {
        label: "recurrent-not-minimal",
        alpha_description: "length-ordered concatenation of all words".into(),
        report: point_classifier(&full, ClassifiedPoint::Sampled(&alpha2), horizon, depth, k_cap)?,
        encoded: Point::Sft(encode_sampled(emb, &alpha2.slice(0, enc_len))?),
    };

    let alpha3 = chacon_word(horizon + depth);
    let w3 = Witness {
        label: "minimal-not-regularly-recurrent",
        alpha_description: "Chacon substitution stream".into(),
        report: point_classifier(&full, ClassifiedPoint::Sampled(&alpha3), horizon, depth, k_cap)?,
        encoded: Point::Sft(encode_sampled(emb, &alpha3.slice(0, enc_len))?),
    };

    Ok(vec![w1, w2, w3])
}

fn encode_sampled(emb: &EmbeddingData, prefix: &Word) -> Result<UpPoint> {
    // Freeze the encoded prefix to an exact point by looping its last letter.
    let last = prefix[prefix.len() - 1];
    let pre = emb.encode_prefix(prefix)?;
    UpPoint::new(pre.prefix().clone(), emb.anchors[last.index()].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadowing::{trace, verify_pseudo_orbit};
    use crate::systems::System;

    fn binary_targets() -> Vec<Word> {
        vec![Word::parse("0").unwrap(), Word::parse("1").unwrap()]
    }

    #[test]
    fn chacon_prefixes() {
        assert_eq!(chacon_word(4).to_string(), "0010");
        assert_eq!(chacon_word(13).to_string(), "0010001010010");
        assert_eq!(chacon_word(0).to_string(), "");
    }

    #[test]
    fn transitive_word_enumerates_by_length() {
        assert_eq!(transitive_word(2, 10).to_string(), "0100011011");
    }

    #[test]
    fn embedding_on_full_shift_round_trips() {
        let sft = Sft::full_shift(2);
        let emb = embed_full_shift(&sft, &binary_targets(), &Dyadic::pow2(-2)).unwrap();
        emb.audit().unwrap();
        for len in 1..=6usize {
            for bits in 0..(1u32 << len) {
                let alpha = Word::from_indices(
                    &(0..len).map(|t| ((bits >> (len - 1 - t)) & 1) as usize).collect::<Vec<_>>(),
                );
                let y = emb.encode_prefix(&alpha).unwrap();
                assert_eq!(emb.decode_prefix(&y, len).unwrap(), alpha);
            }
        }
    }

    #[test]
    fn golden_mean_embedding_avoids_forbidden_words() {
        let sft = Sft::golden_mean();
        let targets = vec![Word::parse("0").unwrap(), Word::parse("01").unwrap()];
        let emb = embed_full_shift(&sft, &targets, &Dyadic::pow2(-2)).unwrap();
        emb.audit().unwrap();
        let alpha = Word::parse("1011001").unwrap();
        let y = emb.encode_prefix(&alpha).unwrap();
        assert!(sft.word_legal(y.prefix()));
        assert_eq!(emb.decode_prefix(&y, alpha.len()).unwrap(), alpha);
    }

    #[test]
    fn degenerate_single_target() {
        let sft = Sft::full_shift(2);
        let emb = embed_full_shift(&sft, &[Word::parse("0").unwrap()], &Dyadic::pow2(-2)).unwrap();
        let alpha = UpPoint::periodic(Word::parse("0").unwrap()).unwrap();
        let y = emb.encode_periodic(&alpha).unwrap();
        assert!(y.is_periodic());
        assert_eq!(y.period().len() % emb.m, y.period().len() % emb.m);
        assert!(emb.m % y.period().len() == 0);
    }

    #[test]
    fn encode_periodic_lies_inside_probe_after_shift() {
        let sft = Sft::full_shift(2);
        let emb = embed_full_shift(&sft, &binary_targets(), &Dyadic::pow2(-2)).unwrap();
        for letter in 0..2usize {
            let alpha = UpPoint::periodic(Word::from_indices(&[letter])).unwrap();
            let y = emb.encode_periodic(&alpha).unwrap();
            let rep = emb.embedded_representative(&y);
            let e = emb.probes[letter].len();
            assert_eq!(rep.prefix(e), emb.probes[letter]);
            // containment in the target cylinder
            let t = &emb.targets[letter];
            assert_eq!(rep.prefix(t.len()), *t);
        }
    }

    #[test]
    fn stitched_orbit_traces_to_the_concatenation() {
        let sft = Sft::full_shift(2);
        let sys = System::Sft(sft.clone());
        let emb = embed_full_shift(&sft, &binary_targets(), &Dyadic::pow2(-2)).unwrap();
        let alpha = Word::parse("10").unwrap();
        let orbit = emb.stitched_orbit(&alpha, true).unwrap();
        assert!(verify_pseudo_orbit(&sys, &orbit).unwrap());
        let (z, cert) = trace(&sys, &orbit, &emb.eps).unwrap();
        let periodic_alpha = UpPoint::periodic(alpha.clone()).unwrap();
        assert_eq!(z, Point::Sft(emb.encode_periodic(&periodic_alpha).unwrap()));
        assert!(cert.exact);
    }

    #[test]
    fn distinct_streams_give_distinct_points() {
        let sft = Sft::golden_mean();
        let targets = vec![Word::parse("0").unwrap(), Word::parse("01").unwrap()];
        let emb = embed_full_shift(&sft, &targets, &Dyadic::pow2(-2)).unwrap();
        let mut streams = std::collections::HashSet::new();
        let mut encoded = std::collections::HashSet::new();
        for len in 1..=5usize {
            for bits in 0..(1u32 << len) {
                let alpha = Word::from_indices(
                    &(0..len).map(|t| ((bits >> t) & 1) as usize).collect::<Vec<_>>(),
                );
                let stream = UpPoint::periodic(alpha).unwrap();
                let y = emb.encode_periodic(&stream).unwrap();
                streams.insert(stream);
                encoded.insert(y);
            }
        }
        // the encoding is injective on streams
        assert_eq!(streams.len(), encoded.len());
    }

    #[test]
    fn empty_stream_is_an_error() {
        let sft = Sft::full_shift(2);
        let emb = embed_full_shift(&sft, &binary_targets(), &Dyadic::pow2(-2)).unwrap();
        assert!(emb.encode_prefix(&Word::empty()).is_err());
    }
}
