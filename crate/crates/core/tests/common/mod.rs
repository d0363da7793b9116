//! Shared helpers for the integration suites: seeded generators and
//! brute-force oracles kept independent of the library construction paths.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use symdyn::systems::{Sft, Symbol, UpPoint, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random essential SFT on the given alphabet (rejection sampling).
pub fn random_essential_sft(rng: &mut ChaCha8Rng, alphabet: usize) -> Sft {
    loop {
        let allowed: Vec<bool> = (0..alphabet * alphabet).map(|_| rng.gen_bool(0.55)).collect();
        if let Ok(sft) = Sft::new(alphabet, allowed) {
            return sft;
        }
    }
}

/// A random legal periodic point of the SFT (period length in `1..=max_len`).
pub fn random_periodic_point(rng: &mut ChaCha8Rng, sft: &Sft, max_len: usize) -> UpPoint {
    loop {
        let len = rng.gen_range(1..=max_len);
        let mut syms = Vec::with_capacity(len);
        syms.push(rng.gen_range(0..sft.alphabet_size()));
        for _ in 1..len {
            let succ: Vec<usize> = sft.successors(syms[syms.len() - 1]).collect();
            syms.push(succ[rng.gen_range(0..succ.len())]);
        }
        if sft.is_allowed_idx(syms[len - 1], syms[0]) {
            return UpPoint::periodic(Word::from_indices(&syms)).expect("nonempty");
        }
    }
}

/// A random valid point with a short preperiod.
pub fn random_point(rng: &mut ChaCha8Rng, sft: &Sft, max_len: usize) -> UpPoint {
    let per = random_periodic_point(rng, sft, max_len);
    let pre_len = rng.gen_range(0..=3usize);
    if pre_len == 0 {
        return per;
    }
    // walk backwards from the period start
    let mut back = Vec::with_capacity(pre_len);
    let mut cur = per.period()[0].index();
    for _ in 0..pre_len {
        let preds: Vec<usize> = sft.predecessors(cur).collect();
        let p = preds[rng.gen_range(0..preds.len())];
        back.push(p);
        cur = p;
    }
    back.reverse();
    UpPoint::new(Word::from_indices(&back), per.period().clone()).expect("nonempty period")
}

// ---------------------------------------------------------------------------
// Brute-force graph oracles (kept simple and construction-free)
// ---------------------------------------------------------------------------

/// Symbols lying on some cycle, grouped by mutual reachability.
pub fn oracle_basic_sets(sft: &Sft) -> Vec<Vec<Symbol>> {
    let n = sft.alphabet_size();
    let reach = reachability(sft);
    let mut groups: Vec<Vec<Symbol>> = Vec::new();
    let mut assigned = vec![false; n];
    for v in 0..n {
        if assigned[v] || !on_cycle(sft, v) {
            continue;
        }
        let mut group = Vec::new();
        for u in v..n {
            if !assigned[u] && on_cycle(sft, u) && reach[v][u] && reach[u][v] {
                assigned[u] = true;
                group.push(Symbol(u as u8));
            }
        }
        groups.push(group);
    }
    groups
}

fn reachability(sft: &Sft) -> Vec<Vec<bool>> {
    let n = sft.alphabet_size();
    let mut reach = vec![vec![false; n]; n];
    for (a, row) in reach.iter_mut().enumerate() {
        for b in sft.successors(a) {
            row[b] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

fn on_cycle(sft: &Sft, v: usize) -> bool {
    // a path v -> v of length 1..=alphabet exists
    let n = sft.alphabet_size();
    let mut frontier = vec![false; n];
    frontier[v] = true;
    for _ in 0..n {
        let mut next = vec![false; n];
        for a in 0..n {
            if frontier[a] {
                for b in sft.successors(a) {
                    next[b] = true;
                }
            }
        }
        if next[v] {
            return true;
        }
        frontier = next;
    }
    false
}

/// gcd of the lengths of all simple cycles inside a symbol group.
pub fn oracle_component_period(sft: &Sft, symbols: &[Symbol]) -> usize {
    let inside = |v: usize| symbols.iter().any(|s| s.index() == v);
    let mut g = 0usize;
    for start in symbols {
        let mut path = vec![start.index()];
        let mut visited = vec![false; sft.alphabet_size()];
        visited[start.index()] = true;
        cycle_dfs(sft, start.index(), &mut path, &mut visited, &inside, &mut g);
    }
    g
}

fn cycle_dfs(
    sft: &Sft,
    root: usize,
    path: &mut Vec<usize>,
    visited: &mut Vec<bool>,
    inside: &dyn Fn(usize) -> bool,
    g: &mut usize,
) {
    let cur = *path.last().expect("nonempty");
    for b in sft.successors(cur) {
        if !inside(b) || b < root {
            continue; // canonical: smallest vertex of the cycle is the root
        }
        if b == root {
            *g = num_integer::gcd(*g, path.len());
        } else if !visited[b] {
            visited[b] = true;
            path.push(b);
            cycle_dfs(sft, root, path, visited, inside, g);
            path.pop();
            visited[b] = false;
        }
    }
}

/// Exact eps-chain feasibility oracle: breadth-first over pairs
/// (depth-`order` word, steps), deciding whether a chain of exactly `n`
/// points joins a point of `[from]` to a point of `[to]`.
pub fn oracle_chain_exists(sft: &Sft, from: &Word, to: &Word, n: usize, k: u32) -> bool {
    // a chain step constrains k+1 leading symbols of the next element
    let order = k as usize + 2;
    let words = legal_words(sft, order);
    let starts: Vec<&Word> = words.iter().filter(|w| extends(w, from)).collect();
    let targets: Vec<&Word> = words.iter().filter(|w| extends(w, to)).collect();
    if n == 1 {
        return starts.iter().any(|w| targets.iter().any(|t| t == w));
    }
    let mut frontier: Vec<&Word> = starts;
    for _ in 0..n - 1 {
        let mut next: Vec<&Word> = Vec::new();
        for w in &frontier {
            for cand in &words {
                // jump condition: candidate agrees with the shift of w on k+1 symbols
                if (0..order - 1).all(|i| cand[i] == w[i + 1]) && !next.contains(&cand) {
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    frontier.iter().any(|w| targets.iter().any(|t| t == w))
}

pub fn legal_words(sft: &Sft, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    words_dfs(sft, len, &mut prefix, &mut out);
    out
}

fn words_dfs(sft: &Sft, len: usize, prefix: &mut Vec<usize>, out: &mut Vec<Word>) {
    if prefix.len() == len {
        out.push(Word::from_indices(prefix));
        return;
    }
    let range: Vec<usize> = if prefix.is_empty() {
        (0..sft.alphabet_size()).collect()
    } else {
        sft.successors(prefix[prefix.len() - 1]).collect()
    };
    for b in range {
        prefix.push(b);
        words_dfs(sft, len, prefix, out);
        prefix.pop();
    }
}

fn extends(w: &Word, prefix: &Word) -> bool {
    prefix.len() <= w.len() && (0..prefix.len()).all(|i| w[i] == prefix[i])
}
