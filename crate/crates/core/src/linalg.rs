//! Exact integer matrices: rank over the rationals and Smith invariant factors.
//!
//! Both routines first strip unit pivots from the sparse matrix. Removing a
//! row and column through a `+-1` entry keeps the rank offset by one and
//! contributes a unit invariant factor, so only the small residual needs
//! general elimination.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)` triples; duplicates are summed.
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: i64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries.push((row, col, value));
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            out[r][c] += v;
        }
        out
    }

    fn to_work(&self) -> Work {
        let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); self.rows];
        for &(r, c, v) in &self.entries {
            *rows[r].entry(c).or_insert_with(BigInt::zero) += v;
        }
        for row in rows.iter_mut() {
            row.retain(|_, v| !v.is_zero());
        }
        let mut col_rows = vec![BTreeSet::new(); self.cols];
        for (r, row) in rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        Work { rows, col_rows, alive: vec![true; self.rows], units: 0 }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut w = self.to_work();
        w.eliminate_units();
        w.units + echelon_rank(w.residual_rows())
    }

    /// Nonzero Smith invariant factors, ascending (units included).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut w = self.to_work();
        w.eliminate_units();
        let units = w.units;
        let residual = w.residual_dense();
        let mut out = vec![BigInt::one(); units];
        out.extend(smith_diagonal(residual));
        out.sort();
        out
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }
}

struct Work {
    rows: Vec<BTreeMap<usize, BigInt>>,
    col_rows: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    units: usize,
}

impl Work {
    fn unit_in(&self, r: usize) -> Option<usize> {
        self.rows[r]
            .iter()
            .filter(|(_, v)| v.abs().is_one())
            .min_by_key(|(c, _)| self.col_rows[**c].len())
            .map(|(&c, _)| c)
    }

    /// Repeatedly pivot on a unit in the shortest available row.
    fn eliminate_units(&mut self) {
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..self.rows.len())
            .filter(|&r| !self.rows[r].is_empty())
            .map(|r| Reverse((self.rows[r].len(), r)))
            .collect();
        while let Some(Reverse((len, r))) = heap.pop() {
            if !self.alive[r] || self.rows[r].len() != len || len == 0 {
                continue;
            }
            let Some(c) = self.unit_in(r) else { continue };
            let pivot_row = std::mem::take(&mut self.rows[r]);
            let u = pivot_row[&c].clone();
            let others: Vec<usize> = self.col_rows[c].iter().copied().filter(|&x| x != r).collect();
            for r2 in others {
                // row2 -= (row2[c] / u) * pivot_row, with u = +-1
                let f = &self.rows[r2][&c] * &u;
                for (cc, val) in &pivot_row {
                    let entry = self.rows[r2].entry(*cc).or_insert_with(BigInt::zero);
                    let was_zero = entry.is_zero();
                    *entry -= &f * val;
                    if entry.is_zero() {
                        self.rows[r2].remove(cc);
                        self.col_rows[*cc].remove(&r2);
                    } else if was_zero {
                        self.col_rows[*cc].insert(r2);
                    }
                }
                if !self.rows[r2].is_empty() {
                    heap.push(Reverse((self.rows[r2].len(), r2)));
                }
            }
            for cc in pivot_row.keys() {
                self.col_rows[*cc].remove(&r);
            }
            self.alive[r] = false;
            self.units += 1;
        }
    }

    fn residual_rows(self) -> Vec<BTreeMap<usize, BigInt>> {
        self.rows
            .into_iter()
            .zip(self.alive)
            .filter(|(row, alive)| *alive && !row.is_empty())
            .map(|(row, _)| row)
            .collect()
    }

    fn residual_dense(self) -> Vec<Vec<BigInt>> {
        let rows = self.residual_rows();
        let cols: BTreeSet<usize> = rows.iter().flat_map(|r| r.keys().copied()).collect();
        let index: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        rows.into_iter()
            .map(|row| {
                let mut dense = vec![BigInt::zero(); cols.len()];
                for (c, v) in row {
                    dense[index[&c]] = v;
                }
                dense
            })
            .collect()
    }
}

fn content_normalize(row: &mut BTreeMap<usize, BigInt>) {
    let g = row.values().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

/// Incremental fraction-free echelon form over sparse rows.
fn echelon_rank(rows: Vec<BTreeMap<usize, BigInt>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for mut row in rows {
        loop {
            let Some((&lead, lead_val)) = row.iter().next() else { break };
            let Some(prow) = pivots.get(&lead) else { break };
            let pv = prow[&lead].clone();
            let lv = lead_val.clone();
            let g = pv.gcd(&lv);
            let (fa, fb) = (&pv / &g, &lv / &g);
            let mut next: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (c, v) in &row {
                next.insert(*c, v * &fa);
            }
            for (c, v) in prow {
                let e = next.entry(*c).or_insert_with(BigInt::zero);
                *e -= v * &fb;
            }
            next.retain(|_, v| !v.is_zero());
            content_normalize(&mut next);
            row = next;
        }
        if let Some((&lead, _)) = row.iter().next() {
            pivots.insert(lead, row);
        }
    }
    pivots.len()
}

/// Nonzero diagonal of the Smith normal form, by absolute value.
pub fn smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..n {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for i in t..m {
                        let sub = &q * &a[i][t];
                        a[i][j] -= sub;
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest remainder in row/column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[bi][bj].abs() {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[bi][bj].abs() {
                        (bi, bj) = (t, j);
                    }
                }
                a.swap(t, bi);
                for row in a.iter_mut() {
                    row.swap(t, bj);
                }
                continue;
            }
            // divisibility: fold a bad row into row t and retry
            let p = a[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &p).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..n {
                        let add = a[i][j].clone();
                        a[t][j] += add;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}
