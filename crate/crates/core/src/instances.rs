//! Two further quantizations: directed graphs (kets are sorted edge lists,
//! vertex relabelings act as basis permutations) and words in a finitely
//! presented group (kets are letter strings, group laws act as moves).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussmoves::SearchLimits;
use crate::quantum::{BasisKet, Family, Motif, PermutationUnitary};

pub const MAX_ISO_VERTICES: usize = 10;

/// A finite simple directed graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedGraph {
    n: u32,
    edges: BTreeSet<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl DirectedGraph {
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidMotif { family: "graph", reason: format!("self-loop at {a}") });
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::InvalidMotif { family: "graph", reason: format!("edge ({a},{b}) outside 1..={n}") });
            }
            set.insert((a, b));
        }
        Ok(DirectedGraph { n, edges: set })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        DirectedGraph::new(raw.n, raw.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson { n: self.n, edges: self.edges.iter().copied().collect() }).expect("serializable")
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    /// Number of edges.
    pub fn degree(&self) -> usize {
        self.edges.len()
    }

    /// Size of the single-edge alphabet.
    pub fn alphabet_size(n: u32) -> u64 {
        n as u64 * n.saturating_sub(1) as u64
    }

    /// Position of `(a, b)` in the lexicographic list of ordered pairs of
    /// distinct vertices.
    pub fn edge_symbol(n: u32, a: u32, b: u32) -> u32 {
        (a - 1) * (n - 1) + if b < a { b - 1 } else { b - 2 }
    }

    fn edge_from_symbol(n: u32, s: u32) -> (u32, u32) {
        let a = s / (n - 1) + 1;
        let r = s % (n - 1);
        let b = if r + 1 < a { r + 1 } else { r + 2 };
        (a, b)
    }

    fn decode(payload: &[u8]) -> Option<DirectedGraph> {
        let words: Vec<u32> = payload.chunks(4).map(|c| c.try_into().ok().map(u32::from_le_bytes)).collect::<Option<_>>()?;
        let (&n, rest) = words.split_first()?;
        if n < 2 || rest.iter().any(|&s| s as u64 >= Self::alphabet_size(n)) {
            return None;
        }
        DirectedGraph::new(n, rest.iter().map(|&s| Self::edge_from_symbol(n, s))).ok()
    }

    pub fn permuted(&self, sigma: &[u32]) -> Result<DirectedGraph> {
        check_permutation(sigma, self.n)?;
        DirectedGraph::new(self.n, self.edges.iter().map(|&(a, b)| (sigma[a as usize - 1], sigma[b as usize - 1])))
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} {{", self.n)?;
        write!(f, "{}", self.edges.iter().map(|(a, b)| format!("({a},{b})")).join(","))?;
        write!(f, "}}")
    }
}

impl Motif for DirectedGraph {
    const FAMILY: Family = Family::Graph;

    /// Vertex count, then edge symbols in lexicographic edge order, as
    /// little-endian `u32`s.
    fn encode(&self) -> Vec<u8> {
        let mut out = self.n.to_le_bytes().to_vec();
        for &(a, b) in &self.edges {
            out.extend(Self::edge_symbol(self.n, a, b).to_le_bytes());
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::InvalidMotif { family: "graph", reason: "the ket of a graph without edges is undefined".into() });
        }
        Ok(())
    }
}

pub fn graph_ket(g: &DirectedGraph) -> Result<BasisKet> {
    g.to_ket()
}

fn check_permutation(sigma: &[u32], n: u32) -> Result<()> {
    let image: BTreeSet<u32> = sigma.iter().copied().collect();
    if sigma.len() != n as usize || image.len() != sigma.len() || image.iter().any(|&s| s == 0 || s > n) {
        return Err(Error::NotBijection(format!("{sigma:?} is not a permutation of 1..={n}")));
    }
    Ok(())
}

/// `sigma G` together with the basis permutation it induces on graph kets
/// with `n` vertices.
pub fn permute_graph(g: &DirectedGraph, sigma: &[u32]) -> Result<(DirectedGraph, PermutationUnitary)> {
    let image = g.permuted(sigma)?;
    let mut inv = vec![0u32; sigma.len()];
    for (k, &s) in sigma.iter().enumerate() {
        inv[s as usize - 1] = k as u32 + 1;
    }
    let n = g.n;
    let act = |perm: Vec<u32>| {
        move |k: &BasisKet| -> Option<BasisKet> {
            let h = DirectedGraph::decode(k.payload())?;
            if h.n != n {
                return None;
            }
            h.permuted(&perm).ok()?.to_ket().ok()
        }
    };
    let name = format!("sigma{sigma:?}");
    Ok((image, PermutationUnitary::new(Family::Graph, name, act(sigma.to_vec()), act(inv))))
}

/// A relabeling `sigma` with `sigma G = H`, by exhaustive search.
pub fn isomorphic_graphs(g: &DirectedGraph, h: &DirectedGraph) -> Result<Option<Vec<u32>>> {
    if g.n != h.n {
        return Err(Error::DimensionMismatch(format!("{} vs {} vertices", g.n, h.n)));
    }
    if g.n as usize > MAX_ISO_VERTICES {
        return Err(Error::CapExceeded { what: "vertices", value: g.n as usize, cap: MAX_ISO_VERTICES });
    }
    if g.edges.len() != h.edges.len() {
        return Ok(None);
    }
    let degrees = |x: &DirectedGraph| {
        let mut d = vec![(0usize, 0usize); x.n as usize];
        for &(a, b) in &x.edges {
            d[a as usize - 1].0 += 1;
            d[b as usize - 1].1 += 1;
        }
        d
    };
    let (dg, dh) = (degrees(g), degrees(h));
    if dg.iter().sorted().ne(dh.iter().sorted()) {
        return Ok(None);
    }
    for perm in (1..=g.n).permutations(g.n as usize) {
        // vertex v may only go to a vertex with the same in/out degrees
        if perm.iter().enumerate().any(|(v, &s)| dg[v] != dh[s as usize - 1]) {
            continue;
        }
        if g.edges.iter().all(|&(a, b)| h.edges.contains(&(perm[a as usize - 1], perm[b as usize - 1]))) {
            return Ok(Some(perm));
        }
    }
    Ok(None)
}

/// A word over `x_i`, `x_i^{-1}` (`i = 1..=n`) and the identity symbol `*`.
/// Letters are `+i`, `-i` and `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    generators: u32,
    letters: Vec<i32>,
}

impl GroupWord {
    pub fn new(generators: u32, letters: Vec<i32>) -> Result<Self> {
        if let Some(l) = letters.iter().find(|l| l.unsigned_abs() > generators) {
            return Err(Error::InvalidMotif { family: "word", reason: format!("letter {l} outside {generators} generators") });
        }
        Ok(GroupWord { generators, letters })
    }

    /// Parse `x1 x2^-1 * x3`; a bare `x` means `x1`. `^{-1}` is accepted.
    pub fn parse(text: &str, generators: u32) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "*" {
                letters.push(0);
                continue;
            }
            let body = tok.strip_prefix('x').ok_or_else(|| Error::Parse(format!("bad letter `{tok}`")))?;
            let (idx, inverse) = match body.split_once('^') {
                Some((i, "-1" | "{-1}")) => (i, true),
                Some(_) => return Err(Error::Parse(format!("bad exponent in `{tok}`"))),
                None => (body, false),
            };
            let i: i32 = if idx.is_empty() { 1 } else { idx.parse().map_err(|_| Error::Parse(format!("bad letter `{tok}`")))? };
            if i <= 0 {
                return Err(Error::Parse(format!("bad generator index in `{tok}`")));
            }
            letters.push(if inverse { -i } else { i });
        }
        GroupWord::new(generators, letters)
    }

    pub fn blank(generators: u32, len: usize) -> Self {
        GroupWord { generators, letters: vec![0; len] }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn generators(&self) -> u32 {
        self.generators
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn with(&self, letters: Vec<i32>) -> GroupWord {
        GroupWord { generators: self.generators, letters }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.letters.iter().map(|&l| match l {
            0 => "*".to_string(),
            l if l > 0 => format!("x{l}"),
            l => format!("x{}^-1", -l),
        });
        write!(f, "{}", parts.format(" "))
    }
}

impl Motif for GroupWord {
    const FAMILY: Family = Family::Word;

    /// Generator count, then one symbol per position from the `2n + 1`
    /// letter alphabet (`*` = 0, `x_i` = `2i - 1`, `x_i^{-1}` = `2i`).
    fn encode(&self) -> Vec<u8> {
        let mut out = self.generators.to_le_bytes().to_vec();
        for &l in &self.letters {
            let s: u32 = match l {
                0 => 0,
                l if l > 0 => 2 * l as u32 - 1,
                l => 2 * l.unsigned_abs(),
            };
            out.extend(s.to_le_bytes());
        }
        out
    }

    fn validate(&self) -> Result<()> {
        GroupWord::new(self.generators, self.letters.clone()).map(|_| ())
    }
}

pub fn word_ket(w: &GroupWord) -> Result<BasisKet> {
    w.to_ket()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Presentation {
    pub generators: u32,
    #[serde(default)]
    pub relators: Vec<Vec<i32>>,
}

impl Presentation {
    pub fn free(generators: u32) -> Self {
        Presentation { generators, relators: vec![] }
    }

    pub fn new(generators: u32, relators: Vec<Vec<i32>>) -> Result<Self> {
        let p = Presentation { generators, relators };
        p.check()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Presentation = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        for r in &self.relators {
            if r.is_empty() || r.iter().any(|&l| l == 0 || l.unsigned_abs() > self.generators) {
                return Err(Error::Parse(format!("bad relator {r:?} for {} generators", self.generators)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum WordRule {
    Cancel,
    Uncancel,
    BlankSwap,
    Cyclic,
    CyclicInverse,
    RelatorDelete,
    RelatorInsert,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordMove {
    pub rule: WordRule,
    pub position: usize,
    /// Inserted pair for `uncancel`: the letter placed first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub letter: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relator: Option<usize>,
    #[serde(skip)]
    pub result: GroupWord,
}

/// Every single-move image of `w`, in a fixed order; results may repeat.
pub fn word_moves(w: &GroupWord, p: &Presentation) -> Vec<WordMove> {
    let l = &w.letters;
    let m = l.len();
    let mut out = Vec::new();
    let mut push = |rule, position, letter, relator, letters: Vec<i32>| {
        out.push(WordMove { rule, position, letter, relator, result: w.with(letters) });
    };
    for i in 0..m.saturating_sub(1) {
        let (a, b) = (l[i], l[i + 1]);
        if a != 0 && a == -b {
            let mut x = l.clone();
            x[i] = 0;
            x[i + 1] = 0;
            push(WordRule::Cancel, i, None, None, x);
        }
        if a == 0 && b == 0 {
            for g in 1..=w.generators as i32 {
                for first in [g, -g] {
                    let mut x = l.clone();
                    x[i] = first;
                    x[i + 1] = -first;
                    push(WordRule::Uncancel, i, Some(first), None, x);
                }
            }
        }
        if (a == 0) != (b == 0) {
            let mut x = l.clone();
            x.swap(i, i + 1);
            push(WordRule::BlankSwap, i, None, None, x);
        }
    }
    if m > 0 {
        let mut x = l.clone();
        x.rotate_right(1);
        push(WordRule::Cyclic, 0, None, None, x);
        let mut x = l.clone();
        x.rotate_left(1);
        push(WordRule::CyclicInverse, 0, None, None, x);
    }
    for (ri, r) in p.relators.iter().enumerate() {
        let k = r.len();
        if k > m {
            continue;
        }
        for i in 0..=m - k {
            let window = &l[i..i + k];
            if window == r.as_slice() {
                let mut x = l.clone();
                x[i..i + k].iter_mut().for_each(|c| *c = 0);
                push(WordRule::RelatorDelete, i, None, Some(ri), x);
            }
            if window.iter().all(|&c| c == 0) {
                let mut x = l.clone();
                x[i..i + k].copy_from_slice(r);
                push(WordRule::RelatorInsert, i, None, Some(ri), x);
            }
        }
    }
    out
}

/// The move that undoes `mv`, found among the moves of its result.
pub fn reverse_word_move(before: &GroupWord, mv: &WordMove, p: &Presentation) -> Option<WordMove> {
    let want = match mv.rule {
        WordRule::Cancel => WordRule::Uncancel,
        WordRule::Uncancel => WordRule::Cancel,
        WordRule::BlankSwap => WordRule::BlankSwap,
        WordRule::Cyclic => WordRule::CyclicInverse,
        WordRule::CyclicInverse => WordRule::Cyclic,
        WordRule::RelatorDelete => WordRule::RelatorInsert,
        WordRule::RelatorInsert => WordRule::RelatorDelete,
    };
    word_moves(&mv.result, p)
        .into_iter()
        .find(|m| m.rule == want && m.position == mv.position && &m.result == before)
}

/// The transposition `|w> <-> |w'>` for one move.
pub fn word_move_unitary(before: &GroupWord, mv: &WordMove) -> Result<PermutationUnitary> {
    PermutationUnitary::transposition(before.to_ket()?, mv.result.to_ket()?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordEquivalence {
    Path(Vec<WordMove>),
    Unknown,
    DistinctWithinBound,
}

pub fn bounded_word_equivalence(
    w1: &GroupWord,
    w2: &GroupWord,
    p: &Presentation,
    limits: SearchLimits,
) -> Result<WordEquivalence> {
    if w1.len() != w2.len() || w1.generators != w2.generators {
        return Err(Error::DimensionMismatch(format!("word lengths {} and {}", w1.len(), w2.len())));
    }
    let mut parent: HashMap<GroupWord, Option<(GroupWord, WordMove)>> = HashMap::from([(w1.clone(), None)]);
    let mut queue = VecDeque::from([(w1.clone(), 0usize)]);
    let mut truncated = false;
    while let Some((cur, depth)) = queue.pop_front() {
        if &cur == w2 {
            let mut path = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, mv))) = parent.get(&at) {
                path.push(mv.clone());
                at = prev.clone();
            }
            path.reverse();
            return Ok(WordEquivalence::Path(path));
        }
        if depth == limits.max_depth {
            continue;
        }
        for mv in word_moves(&cur, p) {
            if parent.contains_key(&mv.result) {
                continue;
            }
            if parent.len() >= limits.max_states {
                truncated = true;
                break;
            }
            parent.insert(mv.result.clone(), Some((cur.clone(), mv.clone())));
            queue.push_back((mv.result.clone(), depth + 1));
        }
    }
    Ok(if truncated { WordEquivalence::Unknown } else { WordEquivalence::DistinctWithinBound })
}
