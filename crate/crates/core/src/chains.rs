//! Chain structure of SFTs: topological decomposition into basic and
//! elementary sets, primitivity indices, chain-mixing constants and explicit
//! exact-length chain construction.

use std::collections::BTreeMap;

use crate::dyadic::{pow2_exponent, Dyadic};
use crate::error::{Error, Result};
use crate::shadowing::{verify_pseudo_orbit, PseudoOrbit};
use crate::systems::{Point, Sft, Symbol, System, UpPoint, Word};

// ---------------------------------------------------------------------------
// Strongly connected components
// ---------------------------------------------------------------------------

/// Kosaraju with explicit stacks; components are returned in reverse
/// topological order of the condensation.
fn strongly_connected_components(n: usize, succ: &dyn Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for start in 0..n {
        if used[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        used[start] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let next = succ(v).get(*i).copied();
            *i += 1;
            match next {
                Some(u) if !used[u] => {
                    used[u] = true;
                    stack.push((u, 0));
                }
                Some(_) => {}
                None => {
                    order.push(v);
                    stack.pop();
                }
            }
        }
    }
    let mut rev = vec![Vec::new(); n];
    for v in 0..n {
        for u in succ(v) {
            rev[u].push(v);
        }
    }
    let mut comp = Vec::new();
    used.fill(false);
    for &v in order.iter().rev() {
        if used[v] {
            continue;
        }
        let mut component = Vec::new();
        let mut stack = vec![v];
        used[v] = true;
        while let Some(w) = stack.pop() {
            component.push(w);
            for &u in &rev[w] {
                if !used[u] {
                    used[u] = true;
                    stack.push(u);
                }
            }
        }
        component.sort_unstable();
        comp.push(component);
    }
    comp
}

// ---------------------------------------------------------------------------
// Topological decomposition
// ---------------------------------------------------------------------------

/// One basic set: an irreducible component meeting a cycle, its period `a`,
/// and the `a` elementary classes permuted cyclically by the shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSet {
    pub symbols: Vec<Symbol>,
    pub period: usize,
    pub classes: Vec<Vec<Symbol>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub basic_sets: Vec<BasicSet>,
    /// Symbols of the presentation that lie in no basic set.
    pub transient: Vec<Symbol>,
}

impl DecompositionReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for b in &self.basic_sets {
            let symbols: String = b.symbols.iter().map(|s| s.0.to_string()).collect();
            let classes: Vec<String> = b
                .classes
                .iter()
                .map(|c| c.iter().map(|s| s.0.to_string()).collect())
                .collect();
            out.push_str(&format!(
                "basic period={} symbols={} classes={}\n",
                b.period,
                symbols,
                classes.join("|")
            ));
        }
        if !self.transient.is_empty() {
            let t: String = self.transient.iter().map(|s| s.0.to_string()).collect();
            out.push_str(&format!("transient symbols={t}\n"));
        }
        out
    }
}

/// Splits an essential SFT into basic sets (cycle-bearing strongly connected
/// components) with their periods and elementary classes.
///
/// The period is the gcd of the layering discrepancies `dist(u)+1-dist(v)`
/// over internal edges, which equals the gcd of the component's cycle
/// lengths.
pub fn decompose(sft: &Sft) -> DecompositionReport {
    let n = sft.alphabet_size();
    let succ = |v: usize| sft.successors(v).collect::<Vec<_>>();
    let comps = strongly_connected_components(n, &succ);
    let mut basic_sets = Vec::new();
    let mut transient = Vec::new();
    for comp in comps {
        let in_comp = |v: usize| comp.binary_search(&v).is_ok();
        let has_cycle =
            comp.len() > 1 || sft.is_allowed_idx(comp[0], comp[0]);
        if !has_cycle {
            transient.push(Symbol(comp[0] as u8));
            continue;
        }
        // BFS layering from the smallest symbol of the component.
        let root = comp[0];
        let mut dist = vec![i64::MIN; n];
        dist[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for u in sft.successors(v) {
                if in_comp(u) && dist[u] == i64::MIN {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        let mut g: i64 = 0;
        for &v in &comp {
            for u in sft.successors(v) {
                if in_comp(u) {
                    g = num_integer::gcd(g, dist[v] + 1 - dist[u]);
                }
            }
        }
        let a = g.unsigned_abs() as usize;
        debug_assert!(a >= 1, "cycle-bearing component has positive period");
        let mut classes = vec![Vec::new(); a];
        for &v in &comp {
            let r = (dist[v].rem_euclid(a as i64)) as usize;
            classes[r].push(Symbol(v as u8));
        }
        // Rotate so the class of the smallest symbol comes first.
        let r0 = (dist[root].rem_euclid(a as i64)) as usize;
        classes.rotate_left(r0);
        basic_sets.push(BasicSet {
            symbols: comp.iter().map(|&v| Symbol(v as u8)).collect(),
            period: a,
            classes,
        });
    }
    transient.sort_unstable();
    DecompositionReport { basic_sets, transient }
}

/// True iff the transition graph is irreducible and aperiodic.
pub fn is_primitive(sft: &Sft) -> bool {
    let report = decompose(sft);
    report.transient.is_empty()
        && report.basic_sets.len() == 1
        && report.basic_sets[0].period == 1
        && report.basic_sets[0].symbols.len() == sft.alphabet_size()
}

// ---------------------------------------------------------------------------
// Primitivity index via boolean matrix powers
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct BoolMatrix {
    n: usize,
    rows: Vec<Vec<u64>>, // bitset rows
}

impl BoolMatrix {
    fn words(n: usize) -> usize {
        n.div_ceil(64)
    }

    fn from_relation(n: usize, rel: &dyn Fn(usize, usize) -> bool) -> Self {
        let w = Self::words(n);
        let mut rows = vec![vec![0u64; w]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..n {
                if rel(i, j) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        }
        BoolMatrix { n, rows }
    }

    fn multiply(&self, other: &BoolMatrix) -> BoolMatrix {
        let w = Self::words(self.n);
        let mut rows = vec![vec![0u64; w]; self.n];
        for i in 0..self.n {
            let out = &mut rows[i];
            for j in 0..self.n {
                if self.rows[i][j / 64] >> (j % 64) & 1 == 1 {
                    for (o, v) in out.iter_mut().zip(&other.rows[j]) {
                        *o |= v;
                    }
                }
            }
        }
        BoolMatrix { n: self.n, rows }
    }

    fn all_positive(&self) -> bool {
        let full_words = self.n / 64;
        let rem = self.n % 64;
        self.rows.iter().all(|row| {
            row[..full_words].iter().all(|&w| w == u64::MAX)
                && (rem == 0 || row[full_words] == (1u64 << rem) - 1)
        })
    }
}

/// Least `m` with every `m`-step transition count positive, or `None` when
/// the cap `(alphabet-1)^2 + 1` is exceeded (graph not primitive).
///
/// For an essential graph positivity of powers is monotone, so the index is
/// found by repeated squaring followed by a binary search.
pub fn primitivity_index(sft: &Sft) -> Option<usize> {
    let n = sft.alphabet_size();
    let a = BoolMatrix::from_relation(n, &|i, j| sft.is_allowed_idx(i, j));
    primitivity_index_matrix(&a, (n - 1) * (n - 1) + 1)
}

fn primitivity_index_matrix(a: &BoolMatrix, cap: usize) -> Option<usize> {
    if a.all_positive() {
        return Some(1);
    }
    // Find the first power of two at or past the index.
    let mut powers = vec![a.clone()]; // powers[t] = a^(2^t)
    let mut m = 1usize;
    loop {
        let last = powers.last().expect("nonempty");
        if last.all_positive() {
            break;
        }
        if m > cap {
            return None;
        }
        let sq = last.multiply(last);
        powers.push(sq);
        m *= 2;
    }
    // Binary search the least positive exponent; A^lo not positive, A^hi positive.
    let mut lo = m / 2;
    let mut hi = m;
    let mut base_exp = m / 2;
    let mut base = powers[powers.len() - 2].clone();
    while hi - lo > 1 {
        // test exponent mid = base_exp + 2^t for decreasing t
        let t = powers.len() - 1;
        let mut found = None;
        for tt in (0..t).rev() {
            let cand_exp = base_exp + (1 << tt);
            if cand_exp >= hi {
                continue;
            }
            let cand = base.multiply(&powers[tt]);
            if cand.all_positive() {
                hi = cand_exp;
            } else {
                lo = cand_exp;
                base = cand;
                base_exp = cand_exp;
            }
            found = Some(());
        }
        if found.is_none() {
            break;
        }
    }
    if hi > cap {
        None
    } else {
        Some(hi)
    }
}

// ---------------------------------------------------------------------------
// Higher-block presentations
// ---------------------------------------------------------------------------

/// The `order`-block graph of an SFT: vertices are legal words of the given
/// length, edges are overlaps of `order - 1` symbols.
pub struct BlockGraph {
    pub order: usize,
    pub words: Vec<Word>,
    index: BTreeMap<Vec<u8>, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl BlockGraph {
    pub fn new(sft: &Sft, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Input("block order must be positive".into()));
        }
        let mut words: Vec<Vec<u8>> = (0..sft.alphabet_size()).map(|a| vec![a as u8]).collect();
        for _ in 1..order {
            let mut next = Vec::new();
            for w in &words {
                let last = *w.last().expect("nonempty") as usize;
                for b in sft.successors(last) {
                    let mut ext = w.clone();
                    ext.push(b as u8);
                    next.push(ext);
                }
            }
            words = next;
        }
        words.sort_unstable();
        let index: BTreeMap<Vec<u8>, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut succ = vec![Vec::new(); words.len()];
        let mut pred = vec![Vec::new(); words.len()];
        for (i, w) in words.iter().enumerate() {
            let last = w[order - 1] as usize;
            for b in sft.successors(last) {
                let mut key: Vec<u8> = w[1..].to_vec();
                key.push(b as u8);
                if let Some(&j) = index.get(&key) {
                    succ[i].push(j);
                    pred[j].push(i);
                }
            }
        }
        let words = words
            .into_iter()
            .map(|w| Word::from_symbols(w.into_iter().map(Symbol).collect()))
            .collect();
        Ok(BlockGraph { order, words, index, succ, pred })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn key_of(w: &Word) -> Vec<u8> {
        w.symbols().iter().map(|s| s.0).collect()
    }

    /// Index of the block formed by the first `order` symbols of a point.
    pub fn block_of_point(&self, p: &UpPoint) -> Option<usize> {
        self.index.get(&Self::key_of(&p.prefix(self.order))).copied()
    }

    /// All blocks extending a (shorter) cylinder word, or the single block
    /// cut from a longer word.
    pub fn blocks_extending(&self, w: &Word) -> Vec<usize> {
        if w.len() >= self.order {
            return self
                .index
                .get(&Self::key_of(&w.slice(0, self.order)))
                .map(|&i| vec![i])
                .unwrap_or_default();
        }
        let key = Self::key_of(w);
        self.words
            .iter()
            .enumerate()
            .filter(|(_, bw)| bw.symbols().iter().map(|s| s.0).take(key.len()).eq(key.iter().copied()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Least `m` with positive `m`-step counts between all block pairs.
    ///
    /// Computed directly on small graphs; larger primitive graphs use the
    /// exact identity `index(block graph) = index(base graph) + order - 1`.
    pub fn primitivity_index(&self, sft: &Sft) -> Option<usize> {
        if self.len() == 1 {
            return if self.succ[0].contains(&0) { Some(1) } else { None };
        }
        const DIRECT_LIMIT: usize = 512;
        if self.len() <= DIRECT_LIMIT {
            let a = BoolMatrix::from_relation(self.len(), &|i, j| self.succ[i].contains(&j));
            return primitivity_index_matrix(&a, (self.len() - 1) * (self.len() - 1) + 1);
        }
        primitivity_index(sft).map(|i0| i0 + self.order - 1)
    }

    /// A path with exactly `edges` edges from some source block to some
    /// target block, chosen deterministically (lexicographically least).
    ///
    /// Backward reach sets are stored until they saturate; past saturation
    /// the prefix of the path is a greedy least-successor walk.
    pub fn find_path(&self, sources: &[usize], targets: &[usize], edges: usize) -> Result<Vec<usize>> {
        const LAYER_CAP: usize = 1 << 14;
        let nw = self.len().div_ceil(64);
        let full = {
            let mut v = vec![u64::MAX; nw];
            let rem = self.len() % 64;
            if rem != 0 {
                v[nw - 1] = (1u64 << rem) - 1;
            }
            v
        };
        let mut layers: Vec<Vec<u64>> = Vec::new();
        let mut t0 = vec![0u64; nw];
        for &t in targets {
            t0[t / 64] |= 1 << (t % 64);
        }
        layers.push(t0);
        let mut saturated_at = None;
        while layers.len() <= edges.min(LAYER_CAP) {
            let last = layers.last().expect("nonempty");
            if *last == full {
                saturated_at = Some(layers.len() - 1);
                break;
            }
            let mut next = vec![0u64; nw];
            for b in 0..self.len() {
                if last[b / 64] >> (b % 64) & 1 == 1 {
                    for &p in &self.pred[b] {
                        next[p / 64] |= 1 << (p % 64);
                    }
                }
            }
            layers.push(next);
        }
        let in_layer = |layers: &Vec<Vec<u64>>, l: usize, b: usize| layers[l][b / 64] >> (b % 64) & 1 == 1;

        let mut path = Vec::with_capacity(edges + 1);
        let mut remaining;
        let mut cur;
        match saturated_at {
            Some(l0) if edges >= l0 => {
                // any walk of length edges - l0, then an exact finish
                cur = *sources.iter().min().ok_or_else(|| Error::InfeasibleLength { length: edges + 1 })?;
                path.push(cur);
                for _ in 0..edges - l0 {
                    cur = *self.succ[cur]
                        .iter()
                        .min()
                        .ok_or_else(|| Error::InfeasibleLength { length: edges + 1 })?;
                    path.push(cur);
                }
                remaining = l0;
            }
            _ => {
                if edges >= layers.len() {
                    return Err(Error::InfeasibleLength { length: edges + 1 });
                }
                cur = *sources
                    .iter()
                    .filter(|&&s| in_layer(&layers, edges, s))
                    .min()
                    .ok_or_else(|| Error::InfeasibleLength { length: edges + 1 })?;
                path.push(cur);
                remaining = edges;
            }
        }
        while remaining > 0 {
            cur = *self.succ[cur]
                .iter()
                .filter(|&&s| in_layer(&layers, remaining - 1, s))
                .min()
                .ok_or_else(|| Error::InfeasibleLength { length: edges + 1 })?;
            path.push(cur);
            remaining -= 1;
        }
        Ok(path)
    }
}

/// Dense vertex-shift presentation of the `order`-block recoding, with the
/// dictionary from block symbols back to words. Only for small block counts.
pub fn block_presentation(sft: &Sft, order: usize) -> Result<(Sft, Vec<Word>)> {
    let bg = BlockGraph::new(sft, order)?;
    if bg.len() > 4096 {
        return Err(Error::Input(format!("block presentation too large ({} blocks)", bg.len())));
    }
    let n = bg.len();
    let mut allowed = vec![false; n * n];
    for (i, js) in bg.succ.iter().enumerate() {
        for &j in js {
            allowed[i * n + j] = true;
        }
    }
    Ok((Sft::new(n, allowed)?, bg.words))
}

// ---------------------------------------------------------------------------
// Chain mixing and explicit chains
// ---------------------------------------------------------------------------

/// A constant `M` such that for every `n >= M` and any two endpoint cylinders
/// an eps-chain of length `n` exists: one more than the primitivity index of
/// the `(k+2)`-block presentation for `eps = 2^{-k}`.
pub fn chain_mixing_constant(sft: &Sft, eps: &Dyadic) -> Result<usize> {
    if eps > &Dyadic::one() {
        return Ok(1);
    }
    if !is_primitive(sft) {
        return Err(Error::MixingRequired("chain mixing needs a primitive SFT".into()));
    }
    let k = pow2_exponent(eps)?;
    let bg = BlockGraph::new(sft, k as usize + 2)?;
    let idx = bg
        .primitivity_index(sft)
        .ok_or_else(|| Error::MixingRequired("block graph is not primitive".into()))?;
    Ok(idx + 1)
}

/// An explicit eps-chain plan: cylinder words whose frozen points form the
/// chain.
#[derive(Debug, Clone)]
pub struct ChainPlan {
    pub eps: Dyadic,
    pub words: Vec<Word>,
}

impl ChainPlan {
    /// Freezes every word to its lexicographically least legal point.
    pub fn expand(&self, sft: &Sft) -> Result<Vec<UpPoint>> {
        self.words.iter().map(|w| sft.freeze(w)).collect()
    }

    /// Re-checks the chain as a finite pseudo-orbit at jump bound eps.
    pub fn verify(&self, sft: &Sft) -> Result<bool> {
        let pts = self.expand(sft)?.into_iter().map(Point::Sft).collect();
        let orbit = PseudoOrbit::finite(pts, self.eps.clone());
        verify_pseudo_orbit(&System::Sft(sft.clone()), &orbit)
    }
}

/// Builds an eps-chain of length `n` from the cylinder `[from]` to the
/// cylinder `[to]`. Lengths below the chain-mixing constant are still
/// attempted; an error is returned only when no chain of that exact length
/// exists.
pub fn connect(sft: &Sft, from: &Word, to: &Word, n: usize, eps: &Dyadic) -> Result<ChainPlan> {
    if n == 0 {
        return Err(Error::Input("chain length must be positive".into()));
    }
    if !sft.word_legal(from) || !sft.word_legal(to) || from.is_empty() || to.is_empty() {
        return Err(Error::Validity("endpoint words must be nonempty and legal".into()));
    }
    if eps > &Dyadic::one() {
        // Every step is an eps-jump; pad with the least symbol.
        let filler = Word::from_indices(&[0]);
        let mut words = vec![from.clone()];
        for _ in 0..n.saturating_sub(2) {
            words.push(filler.clone());
        }
        if n > 1 {
            words.push(to.clone());
        }
        return Ok(ChainPlan { eps: eps.clone(), words });
    }
    let k = pow2_exponent(eps)?;
    let bg = BlockGraph::new(sft, k as usize + 2)?;
    let sources = bg.blocks_extending(from);
    let targets = bg.blocks_extending(to);
    if sources.is_empty() || targets.is_empty() {
        return Err(Error::Validity("endpoint cylinder is empty in the SFT".into()));
    }
    if n == 1 {
        // a length-1 chain is a single point in both cylinders
        let common: Vec<usize> =
            sources.iter().filter(|s| targets.contains(s)).copied().collect();
        let &b = common.first().ok_or(Error::InfeasibleLength { length: 1 })?;
        let w = longer(from, to, &bg.words[b]);
        return Ok(ChainPlan { eps: eps.clone(), words: vec![w] });
    }
    let path = bg.find_path(&sources, &targets, n - 1)?;
    let mut words: Vec<Word> = path.iter().map(|&b| bg.words[b].clone()).collect();
    if from.len() > bg.order {
        words[0] = from.clone();
    }
    let last = words.len() - 1;
    if to.len() > bg.order {
        words[last] = to.clone();
    }
    Ok(ChainPlan { eps: eps.clone(), words })
}

fn longer(a: &Word, b: &Word, block: &Word) -> Word {
    let mut best = block.clone();
    if a.len() > best.len() {
        best = a.clone();
    }
    if b.len() > best.len() {
        best = b.clone();
    }
    best
}
