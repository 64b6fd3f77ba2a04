//! Knot mosaics: n x n grids over an eleven-tile alphabet.
//!
//! Tiles, by connection points (edge midpoints):
//!
//! | id | strands |
//! |----|---------|
//! | 0  | none |
//! | 1  | W-S |
//! | 2  | S-E |
//! | 3  | E-N |
//! | 4  | N-W |
//! | 5  | W-E |
//! | 6  | N-S |
//! | 7  | N-E and S-W |
//! | 8  | N-W and S-E |
//! | 9  | crossing, N-S over |
//! | 10 | crossing, W-E over |

use std::collections::HashSet;
use std::fmt;

use crate::codecs::pd::PlanarDiagram;
use crate::error::{Error, Result};
use crate::quantum::{BasisKet, Family, Motif};

pub const TILE_COUNT: u8 = 11;
pub const CROSS_NS_OVER: u8 = 9;
pub const CROSS_WE_OVER: u8 = 10;

/// Sides in counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    E = 0,
    N = 1,
    W = 2,
    S = 3,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::E, Side::N, Side::W, Side::S];

    pub fn from_index(i: usize) -> Side {
        Side::ALL[i % 4]
    }

    pub fn opposite(self) -> Side {
        Side::from_index(self as usize + 2)
    }

    pub fn ccw(self) -> Side {
        Side::from_index(self as usize + 1)
    }

    /// Row/column step towards the neighbor across this side.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Side::E => (0, 1),
            Side::N => (-1, 0),
            Side::W => (0, -1),
            Side::S => (1, 0),
        }
    }
}

pub fn is_crossing(tile: u8) -> bool {
    tile == CROSS_NS_OVER || tile == CROSS_WE_OVER
}

/// Strands drawn on a tile, as side pairs.
pub fn tile_strands(tile: u8) -> &'static [(Side, Side)] {
    use Side::*;
    match tile {
        1 => &[(W, S)],
        2 => &[(S, E)],
        3 => &[(E, N)],
        4 => &[(N, W)],
        5 => &[(W, E)],
        6 => &[(N, S)],
        7 => &[(N, E), (S, W)],
        8 => &[(N, W), (S, E)],
        9 | 10 => &[(N, S), (W, E)],
        _ => &[],
    }
}

pub fn has_point(tile: u8, side: Side) -> bool {
    tile_strands(tile).iter().any(|&(x, y)| x == side || y == side)
}

/// Side reached by entering `tile` at `side`.
pub fn exit_side(tile: u8, side: Side) -> Option<Side> {
    tile_strands(tile).iter().find_map(|&(x, y)| {
        if x == side {
            Some(y)
        } else if y == side {
            Some(x)
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mosaic {
    n: usize,
    tiles: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MosaicReport {
    pub suitably_connected: bool,
    /// Cells `(row, col)` with an unmatched connection point.
    pub violations: Vec<(usize, usize)>,
}

impl Mosaic {
    pub fn new(n: usize, tiles: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("mosaic size must be positive".into()));
        }
        if tiles.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} tiles for a {n}x{n} mosaic, got {}",
                n * n,
                tiles.len()
            )));
        }
        if let Some(t) = tiles.iter().find(|&&t| t >= TILE_COUNT) {
            return Err(Error::Parse(format!("tile id {t} outside 0..=10")));
        }
        Ok(Mosaic { n, tiles })
    }

    pub fn blank(n: usize) -> Self {
        Mosaic { n, tiles: vec![0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("mosaic rows must form a square".into()));
        }
        Mosaic::new(n, rows.concat())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| {
                        tok.parse::<u8>()
                            .map_err(|_| Error::Parse(format!("bad tile id {tok:?}")))
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        Mosaic::from_rows(&rows)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn tiles(&self) -> &[u8] {
        &self.tiles
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.tiles.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.tiles[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, tile: u8) {
        assert!(tile < TILE_COUNT);
        self.tiles[row * self.n + col] = tile;
    }

    /// Row-major tile bytes.
    pub fn encoding(&self) -> Vec<u8> {
        self.tiles.clone()
    }

    fn neighbor(&self, row: usize, col: usize, side: Side) -> Option<(usize, usize)> {
        let (dr, dc) = side.offset();
        let r = row as isize + dr;
        let c = col as isize + dc;
        if r < 0 || c < 0 || r >= self.n as isize || c >= self.n as isize {
            None
        } else {
            Some((r as usize, c as usize))
        }
    }

    pub fn validate(&self) -> MosaicReport {
        let mut violations = Vec::new();
        for row in 0..self.n {
            for col in 0..self.n {
                let tile = self.get(row, col);
                let bad = Side::ALL.iter().any(|&side| {
                    has_point(tile, side)
                        && match self.neighbor(row, col, side) {
                            None => true,
                            Some((r, c)) => !has_point(self.get(r, c), side.opposite()),
                        }
                });
                if bad {
                    violations.push((row, col));
                }
            }
        }
        MosaicReport { suitably_connected: violations.is_empty(), violations }
    }

    pub fn is_suitably_connected(&self) -> bool {
        self.validate().suitably_connected
    }

    pub fn crossing_count(&self) -> usize {
        self.tiles.iter().filter(|&&t| is_crossing(t)).count()
    }

    /// Extract a planar diagram by tracing strands through the tiles.
    pub fn to_pd(&self) -> Result<PlanarDiagram> {
        let report = self.validate();
        if !report.suitably_connected {
            return Err(Error::Parse(format!(
                "mosaic is not suitably connected at cells {:?}",
                report.violations
            )));
        }
        let n = self.n;
        let mut visited: HashSet<(usize, usize)> = HashSet::new(); // (cell, strand index)
        // per crossing cell: arc label at each side
        let mut side_labels: Vec<[u32; 4]> = vec![[0; 4]; n * n];
        // per crossing cell: entry side of the under strand
        let mut under_entry: Vec<Option<Side>> = vec![None; n * n];
        let mut next_label = 1u32;
        let mut free_loops = 0u32;

        for cell in 0..n * n {
            let tile = self.tiles[cell];
            for (si, &(start_side, _)) in tile_strands(tile).iter().enumerate() {
                if visited.contains(&(cell, si)) {
                    continue;
                }
                // trace one closed component
                let mut crossings_met: Vec<(usize, Side, Side)> = Vec::new();
                let (mut cur, mut entry) = (cell, start_side);
                loop {
                    let t = self.tiles[cur];
                    let exit = exit_side(t, entry).expect("connected strand");
                    let idx = tile_strands(t)
                        .iter()
                        .position(|&(x, y)| x == entry || y == entry)
                        .unwrap();
                    visited.insert((cur, idx));
                    if is_crossing(t) {
                        crossings_met.push((cur, entry, exit));
                    }
                    let (r, c) = self
                        .neighbor(cur / n, cur % n, exit)
                        .expect("suitably connected");
                    cur = r * n + c;
                    entry = exit.opposite();
                    if cur == cell && entry == start_side {
                        break;
                    }
                }
                if crossings_met.is_empty() {
                    free_loops += 1;
                    continue;
                }
                let m = crossings_met.len() as u32;
                let base = next_label;
                for (i, &(cc, en, ex)) in crossings_met.iter().enumerate() {
                    let i = i as u32;
                    let incoming = base + (i + m - 1) % m;
                    let outgoing = base + i;
                    side_labels[cc][en as usize] = incoming;
                    side_labels[cc][ex as usize] = outgoing;
                    let ns = matches!(en, Side::N | Side::S);
                    let under = if self.tiles[cc] == CROSS_NS_OVER { !ns } else { ns };
                    if under {
                        under_entry[cc] = Some(en);
                    }
                }
                next_label += m;
            }
        }

        let crossings = (0..n * n)
            .filter(|&c| is_crossing(self.tiles[c]))
            .map(|c| {
                let mut s = under_entry[c].expect("under strand traced");
                let mut tuple = [0u32; 4];
                for slot in tuple.iter_mut() {
                    *slot = side_labels[c][s as usize];
                    s = s.ccw();
                }
                tuple
            })
            .collect();
        PlanarDiagram::new(crossings, free_loops)
    }
}

impl fmt::Display for Mosaic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.tiles.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl Motif for Mosaic {
    const FAMILY: Family = Family::Mosaic;

    fn encode(&self) -> Vec<u8> {
        self.encoding()
    }

    fn validate(&self) -> Result<()> {
        Mosaic::new(self.n, self.tiles.clone()).map(|_| ())
    }

    fn to_ket(&self) -> Result<BasisKet> {
        Motif::validate(self)?;
        Ok(BasisKet::new(Family::Mosaic, self.encoding()))
    }
}
