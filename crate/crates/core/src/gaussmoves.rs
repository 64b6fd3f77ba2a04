//! Rewrite system on quantum Gauss codes: fixed-length token words with
//! blanks, the three Reidemeister-type moves, blank transport, cyclic
//! rotation and index relabeling, plus a bounded equivalence search.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codecs::gauss::{check_tokens, format_gauss, scan_tokens};
use crate::codecs::GaussToken;
use crate::error::{Error, Result};
use crate::quantum::{Family, Motif};

/// A length-`M` word over `V[N]`; `n = None` means an unbounded index supply.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumGaussWord {
    tokens: Vec<GaussToken>,
    n: Option<u32>,
}

impl QuantumGaussWord {
    pub fn new(tokens: Vec<GaussToken>, n: Option<u32>) -> Result<Self> {
        let w = QuantumGaussWord { tokens, n };
        w.check()?;
        Ok(w)
    }

    /// Parse text such as `"o1+ u1+ * *"`.
    pub fn parse(text: &str, n: Option<u32>) -> Result<Self> {
        QuantumGaussWord::new(scan_tokens(text)?, n)
    }

    /// Pad with blanks to length `m`.
    pub fn padded(mut self, m: usize) -> Result<Self> {
        if m < self.tokens.len() {
            return Err(Error::DimensionMismatch(format!("cannot pad length {} to {m}", self.tokens.len())));
        }
        self.tokens.resize(m, GaussToken::Blank);
        Ok(self)
    }

    pub fn blank(m: usize, n: Option<u32>) -> Self {
        QuantumGaussWord { tokens: vec![GaussToken::Blank; m], n }
    }

    pub fn tokens(&self) -> &[GaussToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_bound(&self) -> Option<u32> {
        self.n
    }

    pub fn is_all_blank(&self) -> bool {
        self.tokens.iter().all(GaussToken::is_blank)
    }

    pub fn used_indices(&self) -> BTreeSet<u32> {
        self.tokens.iter().filter_map(GaussToken::index).collect()
    }

    fn check(&self) -> Result<()> {
        check_tokens(&self.tokens, true)?;
        if let Some(n) = self.n {
            if let Some(i) = self.used_indices().into_iter().find(|&i| i == 0 || i > n) {
                return Err(Error::Parse(format!("index {i} outside 1..={n}")));
            }
        } else if self.used_indices().contains(&0) {
            return Err(Error::Parse("index 0 is not allowed".into()));
        }
        Ok(())
    }

    fn with_tokens(&self, tokens: Vec<GaussToken>) -> Result<Self> {
        QuantumGaussWord::new(tokens, self.n)
    }

    /// Unused indices offered to reverse moves: all of them up to a finite
    /// bound, otherwise the `count` smallest.
    fn fresh_candidates(&self, count: usize) -> Vec<u32> {
        let used = self.used_indices();
        match self.n {
            Some(n) => (1..=n).filter(|i| !used.contains(i)).collect(),
            None => (1..).filter(|i| !used.contains(i)).take(count).collect(),
        }
    }

    fn require_fresh(&self, idx: &[u32]) -> Result<()> {
        let used = self.used_indices();
        for (k, &i) in idx.iter().enumerate() {
            if i == 0 || self.n.is_some_and(|n| i > n) {
                return Err(Error::Precondition(format!("fresh index {i} outside the index range")));
            }
            if used.contains(&i) || idx[..k].contains(&i) {
                return Err(Error::Precondition(format!("index {i} is not new")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for QuantumGaussWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_gauss(&self.tokens))
    }
}

impl Motif for QuantumGaussWord {
    const FAMILY: Family = Family::Gauss;

    fn encode(&self) -> Vec<u8> {
        let mut out = self.n.unwrap_or(0).to_le_bytes().to_vec();
        for t in &self.tokens {
            match *t {
                GaussToken::Blank => out.push(0),
                GaussToken::Visit { over, index, positive } => {
                    out.push(1 + over as u8 * 2 + positive as u8);
                    out.extend(index.to_le_bytes());
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        self.check()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Rule {
    R1,
    R2,
    R3,
    BlankSwap,
    Cyclic,
    IndexPerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

/// Which listed pattern a reverse r1/r2 inserts. For r1, `swapped` puts
/// the under visit first; for r2 it selects the `uj, ui` closing order.
/// `positive` is the sign of crossing `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub swapped: bool,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MoveInstance {
    pub rule: Rule,
    pub positions: Vec<usize>,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fresh_indices: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    /// Index map `i -> permutation[i - 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<u32>>,
}

impl MoveInstance {
    fn simple(rule: Rule, positions: Vec<usize>, direction: Direction) -> Self {
        MoveInstance { rule, positions, direction, fresh_indices: vec![], variant: None, permutation: None }
    }

    pub fn r1_forward(pos: usize) -> Self {
        Self::simple(Rule::R1, vec![pos], Direction::Forward)
    }

    pub fn r1_reverse(pos: usize, fresh: u32, variant: Variant) -> Self {
        MoveInstance { fresh_indices: vec![fresh], variant: Some(variant), ..Self::simple(Rule::R1, vec![pos], Direction::Reverse) }
    }

    pub fn r2_forward(p: usize, q: usize) -> Self {
        Self::simple(Rule::R2, vec![p, q], Direction::Forward)
    }

    pub fn r2_reverse(p: usize, q: usize, fresh: [u32; 2], variant: Variant) -> Self {
        MoveInstance {
            fresh_indices: fresh.to_vec(),
            variant: Some(variant),
            ..Self::simple(Rule::R2, vec![p, q], Direction::Reverse)
        }
    }

    pub fn r3(p: usize, q: usize, r: usize) -> Self {
        Self::simple(Rule::R3, vec![p, q, r], Direction::Forward)
    }

    pub fn blank_swap(pos: usize) -> Self {
        Self::simple(Rule::BlankSwap, vec![pos], Direction::Forward)
    }

    pub fn cyclic(direction: Direction) -> Self {
        Self::simple(Rule::Cyclic, vec![], direction)
    }

    pub fn index_perm(sigma: Vec<u32>) -> Self {
        MoveInstance { permutation: Some(sigma), ..Self::simple(Rule::IndexPerm, vec![], Direction::Forward) }
    }

    /// The move undoing `self` when applied to `before`.
    pub fn inverse(&self, before: &QuantumGaussWord) -> Result<MoveInstance> {
        Ok(match (self.rule, self.direction) {
            (Rule::R1, Direction::Forward) => {
                let pos = self.positions[0];
                let (a, _) = pair(before, pos)?;
                let (over, i, positive) = visit(a)?;
                MoveInstance::r1_reverse(pos, i, Variant { swapped: !over, positive })
            }
            (Rule::R2, Direction::Forward) => {
                let (p, q) = (self.positions[0], self.positions[1]);
                let (a, b) = pair(before, p)?;
                let (c, _) = pair(before, q)?;
                let (_, i, positive) = visit(a)?;
                let (_, j, _) = visit(b)?;
                let swapped = c.index() != Some(i);
                MoveInstance::r2_reverse(p, q, [i, j], Variant { swapped, positive })
            }
            (Rule::R1, Direction::Reverse) => MoveInstance::r1_forward(self.positions[0]),
            (Rule::R2, Direction::Reverse) => MoveInstance::r2_forward(self.positions[0], self.positions[1]),
            (Rule::R3, _) | (Rule::BlankSwap, _) => self.clone(),
            (Rule::Cyclic, d) => MoveInstance::cyclic(d.flip()),
            (Rule::IndexPerm, _) => {
                let sigma = self.permutation.as_ref().ok_or_else(|| Error::Precondition("missing permutation".into()))?;
                let mut inv = vec![0; sigma.len()];
                for (k, &s) in sigma.iter().enumerate() {
                    let slot = inv
                        .get_mut((s as usize).wrapping_sub(1))
                        .ok_or_else(|| Error::NotBijection(format!("{sigma:?}")))?;
                    *slot = k as u32 + 1;
                }
                MoveInstance::index_perm(inv)
            }
        })
    }
}

fn pair(w: &QuantumGaussWord, pos: usize) -> Result<(GaussToken, GaussToken)> {
    if pos + 1 >= w.len() {
        return Err(Error::Precondition(format!("position {pos} has no right neighbor in a word of length {}", w.len())));
    }
    Ok((w.tokens[pos], w.tokens[pos + 1]))
}

fn visit(t: GaussToken) -> Result<(bool, u32, bool)> {
    match t {
        GaussToken::Visit { over, index, positive } => Ok((over, index, positive)),
        GaussToken::Blank => Err(Error::Precondition("expected a crossing visit, found a blank".into())),
    }
}

fn tok(over: bool, index: u32, positive: bool) -> GaussToken {
    GaussToken::Visit { over, index, positive }
}

fn r1_tokens(i: u32, v: Variant) -> [GaussToken; 2] {
    let (o, u) = (tok(true, i, v.positive), tok(false, i, v.positive));
    if v.swapped { [u, o] } else { [o, u] }
}

fn r2_tokens(i: u32, j: u32, v: Variant) -> [GaussToken; 4] {
    let s = v.positive;
    let (ui, uj) = (tok(false, i, s), tok(false, j, !s));
    let close = if v.swapped { [uj, ui] } else { [ui, uj] };
    [tok(true, i, s), tok(true, j, !s), close[0], close[1]]
}

pub fn apply_r1(w: &QuantumGaussWord, pos: usize, direction: Direction, fresh: Option<(u32, Variant)>) -> Result<QuantumGaussWord> {
    let (a, b) = pair(w, pos)?;
    let mut tokens = w.tokens.clone();
    match direction {
        Direction::Forward => {
            let (oa, ia, sa) = visit(a)?;
            let (ob, ib, sb) = visit(b)?;
            if ia != ib || oa == ob || sa != sb {
                return Err(Error::Precondition(format!("`{a} {b}` is not a first-move pair")));
            }
            tokens[pos] = GaussToken::Blank;
            tokens[pos + 1] = GaussToken::Blank;
        }
        Direction::Reverse => {
            let (i, variant) = fresh.ok_or_else(|| Error::Precondition("reverse move needs a fresh index".into()))?;
            if !a.is_blank() || !b.is_blank() {
                return Err(Error::Precondition(format!("positions {pos},{} are not blank", pos + 1)));
            }
            w.require_fresh(&[i])?;
            let [x, y] = r1_tokens(i, variant);
            tokens[pos] = x;
            tokens[pos + 1] = y;
        }
    }
    w.with_tokens(tokens)
}

/// Second move on the pairs starting at `p` and `q` (`q >= p + 2`).
pub fn apply_r2(w: &QuantumGaussWord, p: usize, q: usize, direction: Direction, fresh: Option<([u32; 2], Variant)>) -> Result<QuantumGaussWord> {
    if q < p + 2 {
        return Err(Error::Precondition(format!("pairs at {p} and {q} overlap")));
    }
    let (a, b) = pair(w, p)?;
    let (c, d) = pair(w, q)?;
    let mut tokens = w.tokens.clone();
    match direction {
        Direction::Forward => {
            let (oa, i, s) = visit(a)?;
            let (ob, j, sj) = visit(b)?;
            if !oa || !ob || i == j || sj == s {
                return Err(Error::Precondition(format!("`{a} {b}` does not open a second-move pattern")));
            }
            let straight = [c, d] == [tok(false, i, s), tok(false, j, sj)];
            let swapped = [c, d] == [tok(false, j, sj), tok(false, i, s)];
            if !straight && !swapped {
                return Err(Error::Precondition(format!("`{c} {d}` does not close the second-move pattern")));
            }
            for k in [p, p + 1, q, q + 1] {
                tokens[k] = GaussToken::Blank;
            }
        }
        Direction::Reverse => {
            let ([i, j], variant) = fresh.ok_or_else(|| Error::Precondition("reverse move needs fresh indices".into()))?;
            if [a, b, c, d].iter().any(|t| !t.is_blank()) {
                return Err(Error::Precondition("reverse second move needs four blanks".into()));
            }
            if i == j {
                return Err(Error::Precondition("second move needs distinct indices".into()));
            }
            w.require_fresh(&[i, j])?;
            let t = r2_tokens(i, j, variant);
            tokens[p] = t[0];
            tokens[p + 1] = t[1];
            tokens[q] = t[2];
            tokens[q + 1] = t[3];
        }
    }
    w.with_tokens(tokens)
}

/// A six-token third-move template; variables are the indices 1, 2, 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R3Pattern([GaussToken; 6]);

impl R3Pattern {
    pub fn parse(text: &str) -> Result<R3Pattern> {
        let toks = scan_tokens(text)?;
        let arr: [GaussToken; 6] = toks
            .try_into()
            .map_err(|_| Error::Parse(format!("third-move pattern `{text}` must have six tokens")))?;
        check_tokens(&arr, true)?;
        let vars: BTreeSet<u32> = arr.iter().filter_map(GaussToken::index).collect();
        if vars != BTreeSet::from([1, 2, 3]) {
            return Err(Error::Parse(format!("third-move pattern `{text}` must use indices 1, 2, 3")));
        }
        Ok(R3Pattern(arr))
    }

    fn swapped(&self) -> [GaussToken; 6] {
        let t = &self.0;
        [t[1], t[0], t[3], t[2], t[5], t[4]]
    }

    fn matches(template: &[GaussToken; 6], found: &[GaussToken; 6]) -> bool {
        let mut assign: HashMap<u32, u32> = HashMap::new();
        for (t, f) in template.iter().zip(found) {
            match (*t, *f) {
                (GaussToken::Visit { over, index, positive }, GaussToken::Visit { over: o2, index: i2, positive: p2 }) => {
                    if over != o2 || positive != p2 {
                        return false;
                    }
                    if *assign.entry(index).or_insert(i2) != i2 {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        assign.values().collect::<BTreeSet<_>>().len() == assign.len()
    }
}

/// Move rules with extension points.
#[derive(Debug, Clone)]
pub struct GaussRules {
    pub r3: Vec<R3Pattern>,
}

impl Default for GaussRules {
    fn default() -> Self {
        GaussRules { r3: vec![R3Pattern::parse("u1+ u2+ o1+ u3+ o2+ o3+").expect("listed pattern")] }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RulesJson {
    #[serde(default)]
    r3: Vec<String>,
}

impl GaussRules {
    /// Add third-move variants from `{"r3": ["u1- u2- ...", ...]}`.
    pub fn extend_from_json(&mut self, text: &str) -> Result<()> {
        let raw: RulesJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for p in raw.r3 {
            let pat = R3Pattern::parse(&p)?;
            if !self.r3.contains(&pat) {
                self.r3.push(pat);
            }
        }
        Ok(())
    }
}

/// Third move on the pairs starting at `p < q < r`: each pair is swapped
/// in place when the six tokens match a pattern or its swapped image.
pub fn apply_r3(w: &QuantumGaussWord, p: usize, q: usize, r: usize, rules: &GaussRules) -> Result<QuantumGaussWord> {
    if q < p + 2 || r < q + 2 {
        return Err(Error::Precondition(format!("pairs at {p}, {q}, {r} overlap or are unordered")));
    }
    let (a, b) = pair(w, p)?;
    let (c, d) = pair(w, q)?;
    let (e, f) = pair(w, r)?;
    let found = [a, b, c, d, e, f];
    let ok = rules.r3.iter().any(|pat| R3Pattern::matches(&pat.0, &found) || R3Pattern::matches(&pat.swapped(), &found));
    if !ok {
        return Err(Error::Precondition(format!("`{}` matches no third-move pattern", format_gauss(&found))));
    }
    let mut tokens = w.tokens.clone();
    for k in [p, q, r] {
        tokens.swap(k, k + 1);
    }
    w.with_tokens(tokens)
}

pub fn apply_blank_swap(w: &QuantumGaussWord, pos: usize) -> Result<QuantumGaussWord> {
    let (a, b) = pair(w, pos)?;
    if a.is_blank() == b.is_blank() {
        return Err(Error::Precondition(format!("blank swap needs exactly one blank at {pos},{}", pos + 1)));
    }
    let mut tokens = w.tokens.clone();
    tokens.swap(pos, pos + 1);
    w.with_tokens(tokens)
}

/// Forward moves the last token to the front; reverse undoes that.
pub fn apply_cyclic(w: &QuantumGaussWord, direction: Direction) -> QuantumGaussWord {
    let mut tokens = w.tokens.clone();
    if !tokens.is_empty() {
        match direction {
            Direction::Forward => tokens.rotate_right(1),
            Direction::Reverse => tokens.rotate_left(1),
        }
    }
    QuantumGaussWord { tokens, n: w.n }
}

/// Relabel index `i` as `sigma[i - 1]`. `sigma` must permute `1..=len`
/// and cover every used index.
pub fn permute_indices(w: &QuantumGaussWord, sigma: &[u32]) -> Result<QuantumGaussWord> {
    let len = sigma.len() as u32;
    let image: BTreeSet<u32> = sigma.iter().copied().collect();
    if image.len() != sigma.len() || image.iter().any(|&s| s == 0 || s > len) {
        return Err(Error::NotBijection(format!("{sigma:?} is not a permutation of 1..={len}")));
    }
    if let Some(n) = w.n {
        if len > n {
            return Err(Error::NotBijection(format!("permutation of 1..={len} exceeds the index bound {n}")));
        }
    }
    if let Some(i) = w.used_indices().into_iter().find(|&i| i > len) {
        return Err(Error::NotBijection(format!("index {i} is outside the permutation's domain")));
    }
    let tokens = w
        .tokens
        .iter()
        .map(|t| match t.index() {
            Some(i) => t.with_index(sigma[i as usize - 1]),
            None => *t,
        })
        .collect();
    w.with_tokens(tokens)
}

pub fn apply(w: &QuantumGaussWord, m: &MoveInstance, rules: &GaussRules) -> Result<QuantumGaussWord> {
    let pos = |k: usize| {
        m.positions
            .get(k)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("{:?} needs position {}", m.rule, k + 1)))
    };
    match m.rule {
        Rule::R1 => {
            let fresh = match m.direction {
                Direction::Forward => None,
                Direction::Reverse => Some((
                    *m.fresh_indices.first().ok_or_else(|| Error::Precondition("missing fresh index".into()))?,
                    m.variant.ok_or_else(|| Error::Precondition("missing variant".into()))?,
                )),
            };
            apply_r1(w, pos(0)?, m.direction, fresh)
        }
        Rule::R2 => {
            let fresh = match m.direction {
                Direction::Forward => None,
                Direction::Reverse => {
                    let idx: [u32; 2] = m
                        .fresh_indices
                        .as_slice()
                        .try_into()
                        .map_err(|_| Error::Precondition("second move needs two fresh indices".into()))?;
                    Some((idx, m.variant.ok_or_else(|| Error::Precondition("missing variant".into()))?))
                }
            };
            apply_r2(w, pos(0)?, pos(1)?, m.direction, fresh)
        }
        Rule::R3 => apply_r3(w, pos(0)?, pos(1)?, pos(2)?, rules),
        Rule::BlankSwap => apply_blank_swap(w, pos(0)?),
        Rule::Cyclic => Ok(apply_cyclic(w, m.direction)),
        Rule::IndexPerm => {
            permute_indices(w, m.permutation.as_ref().ok_or_else(|| Error::Precondition("missing permutation".into()))?)
        }
    }
}

/// Every word one move away, deduplicated by result (first instance kept).
/// Reverse moves draw from every unused index when the bound is finite,
/// and from the smallest unused ones otherwise. Index moves are the
/// transpositions touching a used index.
pub fn neighbors(w: &QuantumGaussWord, rules: &GaussRules) -> Vec<(MoveInstance, QuantumGaussWord)> {
    let m = w.len();
    let mut cands: Vec<MoveInstance> = Vec::new();
    let variants = [(false, true), (true, true), (false, false), (true, false)]
        .map(|(swapped, positive)| Variant { swapped, positive });
    let fresh1 = w.fresh_candidates(1);
    let fresh2 = w.fresh_candidates(2);
    for p in 0..m.saturating_sub(1) {
        let (a, b) = (w.tokens[p], w.tokens[p + 1]);
        if a.is_blank() && b.is_blank() {
            for &i in &fresh1 {
                for v in variants {
                    cands.push(MoveInstance::r1_reverse(p, i, v));
                }
            }
        } else if a.is_blank() != b.is_blank() {
            cands.push(MoveInstance::blank_swap(p));
        } else {
            cands.push(MoveInstance::r1_forward(p));
        }
        for q in p + 2..m.saturating_sub(1) {
            let four_blank = [p, p + 1, q, q + 1].iter().all(|&k| w.tokens[k].is_blank());
            if four_blank {
                for &i in &fresh2 {
                    for &j in &fresh2 {
                        if i != j {
                            for v in variants {
                                cands.push(MoveInstance::r2_reverse(p, q, [i, j], v));
                            }
                        }
                    }
                }
            } else {
                cands.push(MoveInstance::r2_forward(p, q));
            }
            for r in q + 2..m.saturating_sub(1) {
                cands.push(MoveInstance::r3(p, q, r));
            }
        }
    }
    cands.push(MoveInstance::cyclic(Direction::Forward));
    cands.push(MoveInstance::cyclic(Direction::Reverse));
    let used = w.used_indices();
    let top = match w.n {
        Some(n) => n,
        None => used.iter().max().copied().unwrap_or(0) + 1,
    };
    for i in 1..=top {
        for j in i + 1..=top {
            if used.contains(&i) || used.contains(&j) {
                let mut sigma: Vec<u32> = (1..=top).collect();
                sigma.swap(i as usize - 1, j as usize - 1);
                cands.push(MoveInstance::index_perm(sigma));
            }
        }
    }
    let mut seen: BTreeSet<QuantumGaussWord> = BTreeSet::new();
    let mut out = Vec::new();
    for c in cands {
        if let Ok(next) = apply(w, &c, rules) {
            if seen.insert(next.clone()) {
                out.push((c, next));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_depth: 6, max_states: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// A checked move sequence from the first word to the second.
    Path(Vec<MoveInstance>),
    /// The state limit stopped the search.
    Unknown,
    /// No path of length at most `max_depth` exists.
    DistinctWithinBound,
}

type Tree = HashMap<QuantumGaussWord, Option<(QuantumGaussWord, MoveInstance)>>;

/// Bidirectional breadth-first search.
pub fn bounded_equivalence(w1: &QuantumGaussWord, w2: &QuantumGaussWord, rules: &GaussRules, limits: SearchLimits) -> Result<Equivalence> {
    if w1.len() != w2.len() || w1.n != w2.n {
        return Err(Error::DimensionMismatch(format!(
            "words live in H[{:?},{}] and H[{:?},{}]",
            w1.n,
            w1.len(),
            w2.n,
            w2.len()
        )));
    }
    if w1 == w2 {
        return Ok(Equivalence::Path(vec![]));
    }
    let mut trees: [Tree; 2] = [HashMap::from([(w1.clone(), None)]), HashMap::from([(w2.clone(), None)])];
    let mut frontiers: [VecDeque<QuantumGaussWord>; 2] = [VecDeque::from([w1.clone()]), VecDeque::from([w2.clone()])];
    let mut depths = [0usize; 2];
    let mut truncated = false;
    while depths[0] + depths[1] < limits.max_depth {
        let side = if frontiers[0].len() <= frontiers[1].len() { 0 } else { 1 };
        if frontiers[side].is_empty() {
            break;
        }
        let mut next = VecDeque::new();
        for cur in std::mem::take(&mut frontiers[side]) {
            for (mv, nb) in neighbors(&cur, rules) {
                if trees[side].contains_key(&nb) {
                    continue;
                }
                if trees[0].len() + trees[1].len() >= limits.max_states {
                    truncated = true;
                    continue;
                }
                trees[side].insert(nb.clone(), Some((cur.clone(), mv)));
                if trees[1 - side].contains_key(&nb) {
                    let path = splice(&trees, &nb)?;
                    verify(w1, w2, &path, rules)?;
                    return Ok(Equivalence::Path(path));
                }
                next.push_back(nb);
            }
        }
        frontiers[side] = next;
        depths[side] += 1;
        if truncated {
            return Ok(Equivalence::Unknown);
        }
    }
    Ok(Equivalence::DistinctWithinBound)
}

fn splice(trees: &[Tree; 2], meet: &QuantumGaussWord) -> Result<Vec<MoveInstance>> {
    let mut head = Vec::new();
    let mut cur = meet.clone();
    while let Some(Some((prev, mv))) = trees[0].get(&cur) {
        head.push(mv.clone());
        cur = prev.clone();
    }
    head.reverse();
    let mut cur = meet.clone();
    while let Some(Some((prev, mv))) = trees[1].get(&cur) {
        // `mv` took `prev` to `cur`; walk it backwards
        head.push(mv.inverse(prev)?);
        cur = prev.clone();
    }
    Ok(head)
}

/// Replay `path` from `from` and require it to end at `to`.
pub fn verify(from: &QuantumGaussWord, to: &QuantumGaussWord, path: &[MoveInstance], rules: &GaussRules) -> Result<()> {
    let mut cur = from.clone();
    for m in path {
        cur = apply(&cur, m, rules)?;
    }
    if &cur != to {
        return Err(Error::Precondition(format!("path ends at `{cur}`, not `{to}`")));
    }
    Ok(())
}
