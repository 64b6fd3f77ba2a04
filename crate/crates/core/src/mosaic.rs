//! Tile-replacement moves on mosaics and the orbit search they generate.
//!
//! A move swaps a rectangular pattern for a replacement block with the same
//! boundary behavior. On load every move is checked behaviorally: for each
//! way of pairing its boundary points, the bracket of the pattern tangle must
//! equal that of the replacement up to the writhe factor `(-A^3)^k`, which
//! makes the normalized bracket of any diagram containing it invariant.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bracket::{f_poly, jones};
use crate::codecs::mosaic::{exit_side, has_point, is_crossing, tile_strands, Side, CROSS_NS_OVER, CROSS_WE_OVER};
use crate::codecs::Mosaic;
use crate::error::{Error, Result};
use crate::laurent::{Laurent, Var};
use crate::quantum::{BasisKet, Family, PermutationUnitary};

pub const DEFAULT_MAX_STATES: usize = 200_000;
pub const DEFAULT_MAX_DEPTH: usize = 64;

/// The move file shipped with the crate.
pub const DEFAULT_MOVES_JSON: &str = include_str!("../data/default.moves.json");

/// A rectangular partial mosaic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    pub tiles: Vec<u8>,
}

/// Side pairs joined by the A- and B-smoothings of a crossing tile.
fn smoothing_pairs(tile: u8, b: bool) -> [(Side, Side); 2] {
    use Side::*;
    // A joins the incoming under end to its counterclockwise neighbor side.
    match (tile, b) {
        (CROSS_NS_OVER, false) => [(W, S), (E, N)],
        (CROSS_NS_OVER, true) => [(W, N), (E, S)],
        (CROSS_WE_OVER, false) => [(N, W), (S, E)],
        (CROSS_WE_OVER, true) => [(N, E), (S, W)],
        _ => unreachable!("not a crossing tile"),
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], x: usize, y: usize) {
    let (rx, ry) = (find(parent, x), find(parent, y));
    if rx != ry {
        parent[rx.max(ry)] = rx.min(ry);
    }
}

/// Strand structure of a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tangle {
    /// Boundary ports `(cell, side)` in sorted order.
    pub ports: Vec<(usize, Side)>,
    /// Port-index pairs joined by a strand, each pair sorted, list sorted.
    pub pairing: Vec<(usize, usize)>,
    pub closed_loops: usize,
    /// Crossing signs on strands that cross themselves, summed.
    pub self_writhe: i64,
    /// Signed crossing counts between distinct strands `(s, t)`, `s < t`.
    /// Strands are numbered by pairing order, closed loops after.
    pub mixed_writhe: BTreeMap<(usize, usize), i64>,
}

impl Block {
    pub fn from_grid(grid: &[Vec<u8>]) -> Result<Block> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 || grid.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("block must be a nonempty rectangle".into()));
        }
        let tiles = grid.concat();
        if let Some(t) = tiles.iter().find(|&&t| t > 10) {
            return Err(Error::Parse(format!("tile id {t} outside 0..=10")));
        }
        Ok(Block { rows, cols, tiles })
    }

    pub fn grid(&self) -> Vec<Vec<u8>> {
        self.tiles.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.tiles[r * self.cols + c]
    }

    fn neighbor(&self, cell: usize, side: Side) -> Option<usize> {
        let (dr, dc) = side.offset();
        let r = (cell / self.cols) as isize + dr;
        let c = (cell % self.cols) as isize + dc;
        (r >= 0 && c >= 0 && r < self.rows as isize && c < self.cols as isize)
            .then(|| r as usize * self.cols + c as usize)
    }

    /// Cells with a connection point that the adjacent cell inside the
    /// block does not match.
    pub fn internal_violations(&self) -> Vec<(usize, usize)> {
        (0..self.tiles.len())
            .filter(|&cell| {
                Side::ALL.iter().any(|&s| match self.neighbor(cell, s) {
                    Some(nb) => has_point(self.tiles[cell], s) != has_point(self.tiles[nb], s.opposite()),
                    None => false,
                })
            })
            .map(|cell| (cell / self.cols, cell % self.cols))
            .collect()
    }

    pub fn boundary_ports(&self) -> Vec<(usize, Side)> {
        let mut out = Vec::new();
        for cell in 0..self.tiles.len() {
            for &s in &Side::ALL {
                if has_point(self.tiles[cell], s) && self.neighbor(cell, s).is_none() {
                    out.push((cell, s));
                }
            }
        }
        out
    }

    /// Trace strands. Requires internal consistency.
    pub fn tangle(&self) -> Tangle {
        let ports = self.boundary_ports();
        let port_index: HashMap<(usize, Side), usize> = ports.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut visited: HashSet<(usize, usize)> = HashSet::new();
        // per crossing cell: (strand, entry side) for each pass
        let mut passes: HashMap<usize, Vec<(usize, Side)>> = HashMap::new();
        let mut pairing = Vec::new();
        let mut strand = 0usize;

        let walk = |start_cell: usize, start_side: Side, strand: usize, visited: &mut HashSet<(usize, usize)>, passes: &mut HashMap<usize, Vec<(usize, Side)>>| -> Option<(usize, Side)> {
            let (mut cell, mut entry) = (start_cell, start_side);
            loop {
                let t = self.tiles[cell];
                let idx = tile_strands(t).iter().position(|&(x, y)| x == entry || y == entry).unwrap();
                visited.insert((cell, idx));
                if is_crossing(t) {
                    passes.entry(cell).or_default().push((strand, entry));
                }
                let exit = exit_side(t, entry).unwrap();
                match self.neighbor(cell, exit) {
                    None => return Some((cell, exit)),
                    Some(nb) => {
                        cell = nb;
                        entry = exit.opposite();
                    }
                }
                if cell == start_cell && entry == start_side {
                    return None;
                }
            }
        };

        let mut used_ports = vec![false; ports.len()];
        for (pi, &(cell, side)) in ports.iter().enumerate() {
            if used_ports[pi] {
                continue;
            }
            let end = walk(cell, side, strand, &mut visited, &mut passes).expect("boundary strand ends");
            let pj = port_index[&end];
            used_ports[pi] = true;
            used_ports[pj] = true;
            pairing.push((pi.min(pj), pi.max(pj)));
            strand += 1;
        }
        let mut closed_loops = 0;
        for cell in 0..self.tiles.len() {
            for (idx, &(s, _)) in tile_strands(self.tiles[cell]).iter().enumerate() {
                if visited.contains(&(cell, idx)) {
                    continue;
                }
                walk(cell, s, strand, &mut visited, &mut passes);
                strand += 1;
                closed_loops += 1;
            }
        }

        let mut self_writhe = 0;
        let mut mixed_writhe: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (&cell, ps) in &passes {
            let tile = self.tiles[cell];
            let is_over = |entry: Side| {
                let ns = matches!(entry, Side::N | Side::S);
                if tile == CROSS_NS_OVER { ns } else { !ns }
            };
            let (over, under) = if is_over(ps[0].1) { (ps[0], ps[1]) } else { (ps[1], ps[0]) };
            // over entering clockwise of the under entry is positive
            let sign = if over.1 == under.1.ccw().ccw().ccw() { 1 } else { -1 };
            if over.0 == under.0 {
                self_writhe += sign;
            } else {
                *mixed_writhe.entry((over.0.min(under.0), over.0.max(under.0))).or_insert(0) += sign;
            }
        }
        pairing.sort();
        Tangle { ports, pairing, closed_loops, self_writhe, mixed_writhe }
    }

    /// Bracket of the tangle, split by the boundary pairing of each state.
    pub fn tangle_bracket(&self) -> BTreeMap<Vec<(usize, usize)>, Laurent> {
        let ports = self.boundary_ports();
        let port_index: HashMap<usize, usize> =
            ports.iter().enumerate().map(|(i, &(cell, s))| (cell * 4 + s as usize, i)).collect();
        let crossings: Vec<usize> = (0..self.tiles.len()).filter(|&c| is_crossing(self.tiles[c])).collect();
        let n = crossings.len();
        let delta = Laurent::delta();
        let mut out: BTreeMap<Vec<(usize, usize)>, Laurent> = BTreeMap::new();
        for s in 0..1u64 << n {
            let mut parent: Vec<usize> = (0..self.tiles.len() * 4).collect();
            for cell in 0..self.tiles.len() {
                let t = self.tiles[cell];
                let pairs: Vec<(Side, Side)> = if is_crossing(t) {
                    let k = crossings.iter().position(|&c| c == cell).unwrap();
                    smoothing_pairs(t, s >> k & 1 == 1).to_vec()
                } else {
                    tile_strands(t).to_vec()
                };
                for (x, y) in pairs {
                    union(&mut parent, cell * 4 + x as usize, cell * 4 + y as usize);
                }
                for &side in &[Side::E, Side::S] {
                    if let Some(nb) = self.neighbor(cell, side) {
                        if has_point(t, side) {
                            union(&mut parent, cell * 4 + side as usize, nb * 4 + side.opposite() as usize);
                        }
                    }
                }
            }
            let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for cell in 0..self.tiles.len() {
                for &side in &Side::ALL {
                    if has_point(self.tiles[cell], side) {
                        let node = cell * 4 + side as usize;
                        let root = find(&mut parent, node);
                        let e = comps.entry(root).or_default();
                        if let Some(&pi) = port_index.get(&node) {
                            e.push(pi);
                        }
                    }
                }
            }
            let mut matching = Vec::new();
            let mut loops = 0u32;
            for ends in comps.values() {
                match ends.as_slice() {
                    [] => loops += 1,
                    [x, y] => matching.push(((*x).min(*y), (*x).max(*y))),
                    _ => unreachable!("strand components have two ends"),
                }
            }
            matching.sort();
            let b = s.count_ones() as i64;
            let term = delta.pow(loops).shift(n as i64 - 2 * b);
            *out.entry(matching).or_insert_with(|| Laurent::zero(Var::A)) += term;
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Image under a symmetry of the square: `flip` mirrors left-right,
    /// then the block is turned a quarter counterclockwise `rot` times.
    pub fn transform(&self, rot: u8, flip: bool) -> Block {
        let mut b = self.clone();
        if flip {
            let tiles = (0..b.rows)
                .flat_map(|r| (0..b.cols).rev().map(move |c| (r, c)))
                .map(|(r, c)| map_tile(b.get(r, c), |s| match s {
                    Side::E => Side::W,
                    Side::W => Side::E,
                    other => other,
                }))
                .collect();
            b = Block { tiles, ..b };
        }
        for _ in 0..rot % 4 {
            let (rows, cols) = (b.cols, b.rows);
            let mut tiles = Vec::with_capacity(rows * cols);
            for i in 0..rows {
                for j in 0..cols {
                    tiles.push(map_tile(b.get(j, b.cols - 1 - i), Side::ccw));
                }
            }
            b = Block { rows, cols, tiles };
        }
        b
    }

    /// Exchange over and under at every crossing.
    pub fn mirror(&self) -> Block {
        let tiles = self
            .tiles
            .iter()
            .map(|&t| match t {
                CROSS_NS_OVER => CROSS_WE_OVER,
                CROSS_WE_OVER => CROSS_NS_OVER,
                other => other,
            })
            .collect();
        Block { tiles, ..self.clone() }
    }
}

/// Tile carrying the image of `tile`'s strands under a side map.
pub fn map_tile(tile: u8, f: impl Fn(Side) -> Side) -> u8 {
    if is_crossing(tile) {
        let over = if tile == CROSS_NS_OVER { Side::N } else { Side::E };
        return if matches!(f(over), Side::N | Side::S) { CROSS_NS_OVER } else { CROSS_WE_OVER };
    }
    let norm = |pairs: Vec<(Side, Side)>| -> BTreeSet<(Side, Side)> {
        pairs.into_iter().map(|(x, y)| (x.min(y), x.max(y))).collect()
    };
    let image = norm(tile_strands(tile).iter().map(|&(x, y)| (f(x), f(y))).collect());
    (0..=8u8)
        .find(|&t| norm(tile_strands(t).to_vec()) == image)
        .expect("tile alphabet is closed under symmetries")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MosaicMove {
    pub name: String,
    pub pattern: Block,
    pub replacement: Block,
}

impl MosaicMove {
    pub fn new(name: impl Into<String>, pattern: Block, replacement: Block) -> Result<MosaicMove> {
        let mv = MosaicMove { name: name.into(), pattern, replacement };
        mv.check()?;
        Ok(mv)
    }

    pub fn size(&self) -> (usize, usize) {
        (self.pattern.rows, self.pattern.cols)
    }

    pub fn inverse(&self) -> MosaicMove {
        MosaicMove {
            name: format!("{}~", self.name),
            pattern: self.replacement.clone(),
            replacement: self.pattern.clone(),
        }
    }

    fn bad(&self, reason: impl Into<String>) -> Error {
        Error::InvalidMove { name: self.name.clone(), reason: reason.into() }
    }

    /// Shape, consistency, boundary signature and invariance checks.
    pub fn check(&self) -> Result<()> {
        let (p, r) = (&self.pattern, &self.replacement);
        if (p.rows, p.cols) != (r.rows, r.cols) {
            return Err(self.bad("pattern and replacement differ in size"));
        }
        if p == r {
            return Err(self.bad("pattern equals replacement"));
        }
        for (label, b) in [("pattern", p), ("replacement", r)] {
            let v = b.internal_violations();
            if !v.is_empty() {
                return Err(self.bad(format!("{label} is not internally consistent at {v:?}")));
            }
        }
        if p.boundary_ports() != r.boundary_ports() {
            return Err(self.bad("boundary signature mismatch: connection points differ"));
        }
        let (tp, tr) = (p.tangle(), r.tangle());
        if tp.pairing != tr.pairing {
            return Err(self.bad("boundary signature mismatch: strands pair the boundary differently"));
        }
        if tp.closed_loops != tr.closed_loops {
            return Err(self.bad(format!(
                "boundary signature mismatch: {} closed loop(s) become {}",
                tp.closed_loops, tr.closed_loops
            )));
        }
        if (tp.closed_loops > 0 || tr.closed_loops > 0)
            && (tp.mixed_writhe.keys().chain(tr.mixed_writhe.keys()).any(|&(_, t)| t >= tp.pairing.len()))
        {
            return Err(self.bad("closed loops that cross other strands are not supported"));
        }
        if tp.mixed_writhe.iter().filter(|(_, v)| **v != 0).collect::<Vec<_>>()
            != tr.mixed_writhe.iter().filter(|(_, v)| **v != 0).collect::<Vec<_>>()
        {
            return Err(self.bad("linking between distinct strands changes"));
        }
        // <P> = (-A^3)^k <R> with k the change in self-writhe
        let k = tp.self_writhe - tr.self_writhe;
        let factor = {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            Laurent::monomial(Var::A, 3 * k, sign)
        };
        let (bp, br) = (p.tangle_bracket(), r.tangle_bracket());
        let keys: BTreeSet<&Vec<(usize, usize)>> = bp.keys().chain(br.keys()).collect();
        for key in keys {
            let lhs = bp.get(key).cloned().unwrap_or_else(|| Laurent::zero(Var::A));
            let rhs = br.get(key).map(|x| x * &factor).unwrap_or_else(|| Laurent::zero(Var::A));
            if lhs != rhs {
                return Err(self.bad("tangle bracket changes beyond the writhe factor; move is not an isotopy"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SizeSpec {
    Square(usize),
    Rect([usize; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveJson {
    name: String,
    k: SizeSpec,
    pattern: Vec<Vec<u8>>,
    replacement: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveFileJson {
    #[serde(rename = "symmetryClosure", default)]
    symmetry_closure: bool,
    moves: Vec<MoveJson>,
}

#[derive(Debug, Clone, Default)]
pub struct MoveSet {
    moves: Vec<MosaicMove>,
    symmetry_closure: bool,
    by_pattern: HashMap<Block, Vec<usize>>,
    sizes: BTreeSet<(usize, usize)>,
}

impl MoveSet {
    pub fn new(moves: Vec<MosaicMove>, symmetry_closure: bool) -> MoveSet {
        let mut by_pattern: HashMap<Block, Vec<usize>> = HashMap::new();
        for (i, m) in moves.iter().enumerate() {
            by_pattern.entry(m.pattern.clone()).or_default().push(i);
        }
        let sizes = moves.iter().map(|m| m.size()).collect();
        MoveSet { moves, symmetry_closure, by_pattern, sizes }
    }

    pub fn empty() -> MoveSet {
        MoveSet::default()
    }

    pub fn moves(&self) -> &[MosaicMove] {
        &self.moves
    }

    pub fn symmetry_closure(&self) -> bool {
        self.symmetry_closure
    }

    pub fn default_set() -> MoveSet {
        load_moves(DEFAULT_MOVES_JSON).expect("shipped move file is valid")
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&MosaicMove> {
        self.moves.iter().find(|m| m.name == name)
    }

    /// Only the moves without crossings on either side.
    pub fn planar_only(&self) -> MoveSet {
        let flat = |b: &Block| !b.tiles.iter().any(|&t| is_crossing(t));
        let moves = self.moves.iter().filter(|m| flat(&m.pattern) && flat(&m.replacement)).cloned().collect();
        MoveSet::new(moves, self.symmetry_closure)
    }
}

/// Parse and validate a move file; add symmetry images when flagged and
/// every move's inverse.
pub fn load_moves(text: &str) -> Result<MoveSet> {
    let raw: MoveFileJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut base = Vec::new();
    for m in raw.moves {
        let (rows, cols) = match m.k {
            SizeSpec::Square(k) => (k, k),
            SizeSpec::Rect([r, c]) => (r, c),
        };
        let shape_ok = |g: &Vec<Vec<u8>>| g.len() == rows && g.iter().all(|r| r.len() == cols);
        if !shape_ok(&m.pattern) || !shape_ok(&m.replacement) {
            return Err(Error::InvalidMove {
                name: m.name,
                reason: format!("pattern and replacement must be {rows}x{cols}"),
            });
        }
        let pattern = Block::from_grid(&m.pattern)?;
        let replacement = Block::from_grid(&m.replacement)?;
        base.push(MosaicMove::new(m.name, pattern, replacement)?);
    }
    let mut seen: HashSet<(Block, Block)> = HashSet::new();
    let mut moves = Vec::new();
    let mut push = |mv: MosaicMove, moves: &mut Vec<MosaicMove>| {
        if seen.insert((mv.pattern.clone(), mv.replacement.clone())) {
            moves.push(mv);
        }
    };
    for mv in &base {
        let images: Vec<(String, Block, Block)> = if raw.symmetry_closure {
            let mut v = Vec::new();
            for mirror in [false, true] {
                for flip in [false, true] {
                    for rot in 0..4u8 {
                        let tag = format!(
                            "{}{}{}",
                            if rot > 0 { format!("@r{}", rot as u32 * 90) } else { String::new() },
                            if flip { "@f" } else { "" },
                            if mirror { "@m" } else { "" }
                        );
                        let f = |b: &Block| {
                            let t = b.transform(rot, flip);
                            if mirror { t.mirror() } else { t }
                        };
                        v.push((format!("{}{}", mv.name, tag), f(&mv.pattern), f(&mv.replacement)));
                    }
                }
            }
            v
        } else {
            vec![(mv.name.clone(), mv.pattern.clone(), mv.replacement.clone())]
        };
        for (name, p, r) in images {
            let m = MosaicMove::new(name, p, r)?;
            let inv = m.inverse();
            push(m, &mut moves);
            push(inv, &mut moves);
        }
    }
    Ok(MoveSet::new(moves, raw.symmetry_closure))
}

fn matches_at(m: &Mosaic, b: &Block, row: usize, col: usize) -> bool {
    row + b.rows <= m.size()
        && col + b.cols <= m.size()
        && (0..b.rows).all(|r| (0..b.cols).all(|c| m.get(row + r, col + c) == b.get(r, c)))
}

/// Every `(move index, (row, col))` whose pattern matches the mosaic,
/// sorted.
pub fn applicable_moves(m: &Mosaic, set: &MoveSet) -> Vec<(usize, (usize, usize))> {
    let n = m.size();
    let mut out = Vec::new();
    for &(kr, kc) in &set.sizes {
        if kr > n || kc > n {
            continue;
        }
        for row in 0..=n - kr {
            for col in 0..=n - kc {
                let mut tiles = Vec::with_capacity(kr * kc);
                for r in 0..kr {
                    for c in 0..kc {
                        tiles.push(m.get(row + r, col + c));
                    }
                }
                if let Some(ids) = set.by_pattern.get(&Block { rows: kr, cols: kc, tiles }) {
                    out.extend(ids.iter().map(|&i| (i, (row, col))));
                }
            }
        }
    }
    out.sort();
    out
}

pub fn apply_move(m: &Mosaic, mv: &MosaicMove, offset: (usize, usize)) -> Result<Mosaic> {
    let (row, col) = offset;
    let (kr, kc) = mv.size();
    if row + kr > m.size() || col + kc > m.size() {
        return Err(Error::Precondition(format!(
            "move {} at ({row},{col}) overlaps the grid boundary",
            mv.name
        )));
    }
    if !matches_at(m, &mv.pattern, row, col) {
        return Err(Error::Precondition(format!(
            "move {} does not match at ({row},{col})",
            mv.name
        )));
    }
    let mut out = m.clone();
    for r in 0..kr {
        for c in 0..kc {
            out.set(row + r, col + c, mv.replacement.get(r, c));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: DEFAULT_MAX_STATES, max_depth: DEFAULT_MAX_DEPTH }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStatus {
    Complete,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    #[serde(rename = "move")]
    pub move_name: String,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    pub size: usize,
    /// Canonical encodings of the members.
    pub states: BTreeSet<Vec<u8>>,
    parents: HashMap<Vec<u8>, (Vec<u8>, Step)>,
    root: Vec<u8>,
}

impl OrbitResult {
    pub fn contains(&self, m: &Mosaic) -> bool {
        self.states.contains(&m.encoding())
    }

    /// Moves leading from the root to `target`, if it was reached.
    pub fn witness(&self, target: &Mosaic) -> Option<Vec<Step>> {
        let mut key = target.encoding();
        if !self.states.contains(&key) {
            return None;
        }
        let mut path = Vec::new();
        while key != self.root {
            let (prev, step) = self.parents.get(&key)?;
            path.push(step.clone());
            key = prev.clone();
        }
        path.reverse();
        Some(path)
    }

    pub fn members(&self, n: usize) -> Vec<Mosaic> {
        self.states.iter().map(|e| Mosaic::new(n, e.clone()).expect("stored mosaics are valid")).collect()
    }
}

fn neighbors(m: &Mosaic, set: &MoveSet) -> Vec<(Mosaic, Step)> {
    applicable_moves(m, set)
        .into_iter()
        .map(|(i, off)| {
            let mv = &set.moves[i];
            let next = apply_move(m, mv, off).expect("applicable");
            (next, Step { move_name: mv.name.clone(), row: off.0, col: off.1 })
        })
        .collect()
}

fn expand(frontier: &[Mosaic], set: &MoveSet) -> Vec<Vec<(Mosaic, Step)>> {
    if frontier.len() < 64 {
        return frontier.iter().map(|m| neighbors(m, set)).collect();
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = frontier.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = frontier
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|m| neighbors(m, set)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Breadth-first closure of `m` under the move set. Frontier expansion may
/// run on several threads; insertion into the visited set is serial.
pub fn orbit_bfs(m: &Mosaic, set: &MoveSet, limits: Limits) -> OrbitResult {
    orbit_search(m, set, limits, None).0
}

fn orbit_search(m: &Mosaic, set: &MoveSet, limits: Limits, target: Option<&[u8]>) -> (OrbitResult, bool) {
    let root = m.encoding();
    let mut states: BTreeSet<Vec<u8>> = BTreeSet::from([root.clone()]);
    let mut parents: HashMap<Vec<u8>, (Vec<u8>, Step)> = HashMap::new();
    let mut frontier = vec![m.clone()];
    let mut depth = 0;
    let mut status = OrbitStatus::Complete;
    let found = |states: &BTreeSet<Vec<u8>>| target.is_some_and(|t| states.contains(t));
    if found(&states) {
        return (OrbitResult { status, size: 1, states, parents, root }, true);
    }
    'outer: while !frontier.is_empty() {
        let layer = expand(&frontier, set);
        if depth == limits.max_depth {
            let unexplored = frontier
                .iter()
                .zip(&layer)
                .any(|(_, nbrs)| nbrs.iter().any(|(n, _)| !states.contains(&n.encoding())));
            if unexplored {
                status = OrbitStatus::Truncated;
            }
            break;
        }
        let mut next = Vec::new();
        for (parent, nbrs) in frontier.iter().zip(layer) {
            for (nb, step) in nbrs {
                let key = nb.encoding();
                if states.contains(&key) {
                    continue;
                }
                if states.len() >= limits.max_states {
                    status = OrbitStatus::Truncated;
                    break 'outer;
                }
                states.insert(key.clone());
                parents.insert(key.clone(), (parent.encoding(), step));
                if target == Some(key.as_slice()) {
                    let size = states.len();
                    return (OrbitResult { status: OrbitStatus::Truncated, size, states, parents, root }, true);
                }
                next.push(nb);
            }
        }
        frontier = next;
        depth += 1;
    }
    let size = states.len();
    (OrbitResult { status, size, states, parents, root }, false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SameOrbit {
    Yes(Vec<Step>),
    No,
    Unknown,
}

pub fn same_orbit(k1: &Mosaic, k2: &Mosaic, set: &MoveSet, limits: Limits) -> Result<SameOrbit> {
    if k1.size() != k2.size() {
        return Err(Error::DimensionMismatch(format!(
            "mosaic sizes {} and {}",
            k1.size(),
            k2.size()
        )));
    }
    let target = k2.encoding();
    let (orbit, found) = orbit_search(k1, set, limits, Some(&target));
    Ok(if found {
        SameOrbit::Yes(orbit.witness(k2).expect("target reached"))
    } else if orbit.status == OrbitStatus::Complete {
        SameOrbit::No
    } else {
        SameOrbit::Unknown
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Invariant {
    /// Jones polynomial evaluated at a positive real `t`.
    JonesAtRealT(f64),
    /// Coefficient of `A^e` in the normalized bracket `f_K`.
    BracketCoefficient(i64),
    ComponentCount,
}

impl Invariant {
    /// `jones-at-real-t[:t]`, `bracket-coefficient[:e]`, `component-count`.
    pub fn parse(spec: &str) -> Result<Invariant> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let bad_arg = || Error::UnknownInvariant(spec.to_string());
        match name {
            "jones-at-real-t" => Ok(Invariant::JonesAtRealT(match arg {
                Some(a) => a.parse().map_err(|_| bad_arg())?,
                None => 2.0,
            })),
            "bracket-coefficient" => Ok(Invariant::BracketCoefficient(match arg {
                Some(a) => a.parse().map_err(|_| bad_arg())?,
                None => 0,
            })),
            "component-count" if arg.is_none() => Ok(Invariant::ComponentCount),
            _ => Err(Error::UnknownInvariant(spec.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InvariantValue {
    Real(f64),
    Integer(i64),
    Big(String),
}

/// Jones polynomial at a positive real `t`, whichever variable it is stored in.
pub fn jones_at_real(v: &Laurent, t: f64) -> Result<f64> {
    let z = match v.var() {
        Var::T => t,
        Var::TQuarter => t.powf(0.25),
        other => {
            return Err(Error::Precondition(format!("expected a Jones polynomial, got variable {}", other.name())))
        }
    };
    Ok(v.eval(num_complex::Complex64::new(z, 0.0))?.re)
}

/// The eigenvalue of the observable built from `inv` on `|K>`.
pub fn invariant_observable(k: &Mosaic, inv: &Invariant) -> Result<InvariantValue> {
    let pd = k.to_pd()?;
    Ok(match inv {
        Invariant::ComponentCount => InvariantValue::Integer(pd.component_count() as i64),
        Invariant::JonesAtRealT(t) => InvariantValue::Real(jones_at_real(&jones(&pd)?, *t)?),
        Invariant::BracketCoefficient(e) => {
            let c: BigInt = f_poly(&pd)?.coeff(*e);
            match i64::try_from(&c) {
                Ok(x) => InvariantValue::Integer(x),
                Err(_) => InvariantValue::Big(c.to_string()),
            }
        }
    })
}

/// The basis permutation swapping mosaics that carry the pattern at
/// `offset` with those carrying the replacement; identity elsewhere on
/// `n x n` mosaic kets.
pub fn move_as_unitary(mv: &MosaicMove, offset: (usize, usize), n: usize) -> Result<PermutationUnitary> {
    let (kr, kc) = mv.size();
    if offset.0 + kr > n || offset.1 + kc > n {
        return Err(Error::Precondition(format!("move {} does not fit an {n}x{n} grid at {offset:?}", mv.name)));
    }
    let mv = Arc::new(mv.clone());
    let swap = move |ket: &BasisKet| -> Option<BasisKet> {
        let m = Mosaic::new(n, ket.payload().to_vec()).ok()?;
        let out = if matches_at(&m, &mv.pattern, offset.0, offset.1) {
            apply_move(&m, &mv, offset).ok()?
        } else if matches_at(&m, &mv.replacement, offset.0, offset.1) {
            apply_move(&m, &mv.inverse(), offset).ok()?
        } else {
            m
        };
        Some(BasisKet::new(Family::Mosaic, out.encoding()))
    };
    let name = format!("move@{}x{}", offset.0, offset.1);
    Ok(PermutationUnitary::new(Family::Mosaic, name, swap.clone(), swap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(g: &[&[u8]]) -> Block {
        Block::from_grid(&g.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn symmetries_preserve_tangle_data() {
        let r3 = block(&[&[5, 9, 1], &[5, 10, 10], &[0, 6, 6]]);
        for rot in 0..4 {
            for flip in [false, true] {
                let t = r3.transform(rot, flip);
                assert!(t.internal_violations().is_empty());
                assert_eq!(t.tangle().closed_loops, 0);
                assert_eq!(t.tiles.iter().filter(|&&x| is_crossing(x)).count(), 3);
            }
        }
        assert_eq!(r3.transform(4, false), r3);
        assert_eq!(r3.transform(1, false).transform(3, false), r3);
    }

    #[test]
    fn quarter_turn_swaps_crossing_type() {
        assert_eq!(map_tile(CROSS_NS_OVER, Side::ccw), CROSS_WE_OVER);
        assert_eq!(map_tile(1, Side::ccw), 2);
        assert_eq!(map_tile(5, Side::ccw), 6);
        assert_eq!(map_tile(7, Side::ccw), 8);
    }

    #[test]
    fn curl_tangle_bracket() {
        let arc = block(&[&[0, 0], &[1, 0]]);
        let curl = block(&[&[2, 1], &[9, 4]]);
        assert_eq!(arc.tangle().pairing, curl.tangle().pairing);
        let (ba, bc) = (arc.tangle_bracket(), curl.tangle_bracket());
        let key = arc.tangle().pairing;
        let w = curl.tangle().self_writhe;
        assert_eq!(w.abs(), 1);
        let factor = Laurent::monomial(Var::A, 3 * w, -1);
        assert_eq!(bc[&key], &ba[&key] * &factor);
    }

    #[test]
    fn default_moves_load() {
        let set = MoveSet::default_set();
        assert!(set.len() > 6);
        for mv in set.moves() {
            assert!(set.moves().iter().any(|o| o.pattern == mv.replacement && o.replacement == mv.pattern));
        }
    }

    #[test]
    fn circle_creation_rejected() {
        let text = r#"{"moves":[{"name":"birth","k":2,"pattern":[[0,0],[0,0]],"replacement":[[2,1],[3,4]]}]}"#;
        match load_moves(text) {
            Err(Error::InvalidMove { name, reason }) => {
                assert_eq!(name, "birth");
                assert!(reason.contains("boundary signature"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_crossing_rejected() {
        // R2 with one crossing flipped is not an isotopy
        let text = r#"{"moves":[{"name":"fakeR2","k":2,"pattern":[[7,8],[3,4]],"replacement":[[10,9],[3,4]]}]}"#;
        assert!(matches!(load_moves(text), Err(Error::InvalidMove { .. })));
    }

    #[test]
    fn perturbed_r3_rejected() {
        let good = r#"{"moves":[{"name":"R3","k":3,"pattern":[[5,9,1],[5,10,10],[0,6,6]],"replacement":[[1,6,0],[10,10,5],[3,9,1]]}]}"#;
        assert!(load_moves(good).is_ok());
        let bad = good.replace("[3,9,1]", "[3,10,1]");
        assert!(matches!(load_moves(&bad), Err(Error::InvalidMove { .. })));
    }

    #[test]
    fn either_curl_is_reidemeister_one() {
        let text = r#"{"moves":[{"name":"R1m","k":2,"pattern":[[0,0],[1,0]],"replacement":[[2,1],[10,4]]}]}"#;
        assert!(load_moves(text).is_ok());
    }
}
