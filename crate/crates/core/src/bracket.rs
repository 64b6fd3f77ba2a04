//! Bracket state sum over smoothings and enhanced states.
//!
//! At a crossing `(a, b, c, d)` the A-smoothing joins `a-b` and `c-d`, the
//! B-smoothing joins `a-d` and `b-c`. Smoothing bit `k` (least significant
//! first) set means crossing `k` is B-smoothed.

use num_bigint::BigInt;
use num_traits::One;

use crate::codecs::PlanarDiagram;
use crate::error::{Error, Result};
use crate::laurent::{Laurent, Var};
use crate::quantum::{BasisKet, Family, Motif};

pub const DEFAULT_MAX_CROSSINGS: usize = 20;

/// Hard ceiling: smoothings are indexed by a `u64`.
const ABSOLUTE_MAX_CROSSINGS: usize = 40;

fn check_cap(d: &PlanarDiagram, cap: usize) -> Result<()> {
    let c = d.crossing_count();
    let cap = cap.min(ABSOLUTE_MAX_CROSSINGS);
    if c > cap {
        return Err(Error::CapExceeded { what: "crossings", value: c, cap });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopStructure {
    pub loop_count: usize,
    /// `arc_loop[arc - 1]` is the loop carrying that arc. Loops are numbered
    /// by their smallest arc; free loops come last.
    pub arc_loop: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn loops_of(d: &PlanarDiagram, smoothing: u64) -> LoopStructure {
    let arcs = 2 * d.crossing_count();
    let mut parent: Vec<usize> = (0..arcs).collect();
    for (k, &[a, b, c, dd]) in d.crossings().iter().enumerate() {
        let (a, b, c, dd) = (a as usize - 1, b as usize - 1, c as usize - 1, dd as usize - 1);
        let pairs = if smoothing >> k & 1 == 0 { [(a, b), (c, dd)] } else { [(a, dd), (b, c)] };
        for (x, y) in pairs {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx != ry {
                parent[rx.max(ry)] = rx.min(ry);
            }
        }
    }
    let mut id = vec![usize::MAX; arcs];
    let mut count = 0;
    let mut arc_loop = vec![0; arcs];
    for arc in 0..arcs {
        let r = find(&mut parent, arc);
        if id[r] == usize::MAX {
            id[r] = count;
            count += 1;
        }
        arc_loop[arc] = id[r];
    }
    LoopStructure { loop_count: count + d.free_loops() as usize, arc_loop }
}

/// `table[i][l]` = number of smoothings with `i` B-smoothings and `l` loops,
/// over the smoothing range `lo..hi`.
fn state_table(d: &PlanarDiagram, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let c = d.crossing_count();
    let max_loops = 2 * c + d.free_loops() as usize + 1;
    let mut table = vec![vec![0u64; max_loops + 1]; c + 1];
    for s in lo..hi {
        let loops = loops_of(d, s).loop_count;
        table[s.count_ones() as usize][loops] += 1;
    }
    table
}

fn merge_tables(mut acc: Vec<Vec<u64>>, other: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    for (ra, rb) in acc.iter_mut().zip(other) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
    acc
}

/// Partition the smoothings into `parts` ranges evaluated on separate threads.
fn partitioned_table(d: &PlanarDiagram, parts: usize) -> Vec<Vec<u64>> {
    let total = 1u64 << d.crossing_count();
    let parts = (parts.max(1) as u64).min(total);
    let step = total.div_ceil(parts);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..parts)
            .map(|p| {
                let lo = p * step;
                let hi = ((p + 1) * step).min(total);
                scope.spawn(move || state_table(d, lo, hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .reduce(merge_tables)
            .expect("at least one part")
    })
}

fn workers_for(d: &PlanarDiagram) -> usize {
    if d.crossing_count() < 12 {
        1
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

fn table_to_a(c: usize, table: &[Vec<u64>]) -> Laurent {
    let delta = Laurent::delta();
    let mut out = Laurent::zero(Var::A);
    for (i, row) in table.iter().enumerate() {
        for (l, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let a_exp = c as i64 - 2 * i as i64;
            let term = delta.pow(l as u32).shift(a_exp).scale(&BigInt::from(count));
            out += term;
        }
    }
    out
}

fn table_to_q(table: &[Vec<u64>]) -> Laurent {
    let circle = Laurent::q_circle();
    let mut out = Laurent::zero(Var::Q);
    for (i, row) in table.iter().enumerate() {
        for (l, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            out += circle.pow(l as u32).shift(i as i64).scale(&(sign * count));
        }
    }
    out
}

pub fn bracket_a_with_cap(d: &PlanarDiagram, cap: usize) -> Result<Laurent> {
    check_cap(d, cap)?;
    Ok(table_to_a(d.crossing_count(), &partitioned_table(d, workers_for(d))))
}

/// `<K> = sum_S A^(#A - #B) delta^|S|`.
pub fn bracket_a(d: &PlanarDiagram) -> Result<Laurent> {
    bracket_a_with_cap(d, DEFAULT_MAX_CROSSINGS)
}

/// Same sum with an explicit number of worker partitions.
pub fn bracket_a_partitioned(d: &PlanarDiagram, parts: usize) -> Result<Laurent> {
    check_cap(d, DEFAULT_MAX_CROSSINGS)?;
    Ok(table_to_a(d.crossing_count(), &partitioned_table(d, parts)))
}

/// Serial fold in binary-counter order, one smoothing at a time.
pub fn bracket_a_serial(d: &PlanarDiagram) -> Result<Laurent> {
    check_cap(d, DEFAULT_MAX_CROSSINGS)?;
    let c = d.crossing_count();
    let delta = Laurent::delta();
    let mut out = Laurent::zero(Var::A);
    for s in 0..1u64 << c {
        let b = s.count_ones() as i64;
        let loops = loops_of(d, s).loop_count as u32;
        out += delta.pow(loops).shift(c as i64 - 2 * b);
    }
    Ok(out)
}

pub fn bracket_q_with_cap(d: &PlanarDiagram, cap: usize) -> Result<Laurent> {
    check_cap(d, cap)?;
    Ok(table_to_q(&partitioned_table(d, workers_for(d))))
}

/// `sum_s (-1)^i(s) q^j(s)` over enhanced states.
pub fn bracket_q(d: &PlanarDiagram) -> Result<Laurent> {
    bracket_q_with_cap(d, DEFAULT_MAX_CROSSINGS)
}

/// `A^-c <K>` rewritten with `A^2 -> -q^-1`.
pub fn bracket_q_via_a(d: &PlanarDiagram) -> Result<Laurent> {
    let a = bracket_a(d)?;
    a.shift(-(d.crossing_count() as i64)).convert(Var::Q)
}

/// `f_K(A) = (-A^3)^-wr <K> / delta`.
pub fn f_poly_with_cap(d: &PlanarDiagram, cap: usize) -> Result<Laurent> {
    if d.component_count() == 0 {
        return Err(Error::Precondition(
            "normalized bracket needs a nonempty diagram".into(),
        ));
    }
    let br = bracket_a_with_cap(d, cap)?;
    let quotient = br.div_exact(&Laurent::delta())?;
    let wr = d.writhe();
    let factor = if wr % 2 == 0 { Laurent::one(Var::A) } else { -Laurent::one(Var::A) };
    Ok((quotient * factor).shift(-3 * wr))
}

pub fn f_poly(d: &PlanarDiagram) -> Result<Laurent> {
    f_poly_with_cap(d, DEFAULT_MAX_CROSSINGS)
}

/// `V(t) = f(t^-1/4)`, in `t` when every exponent allows, else in `t^(1/4)`.
pub fn jones_with_cap(d: &PlanarDiagram, cap: usize) -> Result<Laurent> {
    f_poly_with_cap(d, cap)?.to_t_or_quarter()
}

pub fn jones(d: &PlanarDiagram) -> Result<Laurent> {
    jones_with_cap(d, DEFAULT_MAX_CROSSINGS)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnhancedState {
    pub crossings: usize,
    pub smoothing: u64,
    /// `+1` or `-1` per loop, in loop-index order.
    pub labels: Vec<i8>,
}

impl EnhancedState {
    /// Number of B-smoothings.
    pub fn i(&self) -> i64 {
        self.smoothing.count_ones() as i64
    }

    /// `i + (#plus - #minus)`.
    pub fn j(&self) -> i64 {
        self.i() + self.labels.iter().map(|&l| l as i64).sum::<i64>()
    }

    pub fn is_b(&self, k: usize) -> bool {
        self.smoothing >> k & 1 == 1
    }
}

impl Motif for EnhancedState {
    const FAMILY: Family = Family::EnhancedState;

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.labels.len());
        out.extend_from_slice(&(self.crossings as u32).to_le_bytes());
        out.extend_from_slice(&self.smoothing.to_le_bytes());
        out.extend(self.labels.iter().map(|&l| if l > 0 { 1u8 } else { 0u8 }));
        out
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidMotif { family: "enhanced-state", reason };
        if self.crossings < 64 && self.smoothing >> self.crossings != 0 {
            return Err(bad("smoothing has bits beyond the crossing count".into()));
        }
        if self.labels.iter().any(|&l| l != 1 && l != -1) {
            return Err(bad("loop labels must be +1 or -1".into()));
        }
        Ok(())
    }

    fn to_ket(&self) -> Result<BasisKet> {
        Motif::validate(self)?;
        Ok(BasisKet::new(Family::EnhancedState, self.encode()))
    }
}

/// Lazily enumerate enhanced states: smoothings in binary-counter order,
/// then labelings with loop 0 as the fastest-changing label (`+1` first).
pub fn enhanced_states_with_cap(
    d: &PlanarDiagram,
    cap: usize,
) -> Result<impl Iterator<Item = EnhancedState> + '_> {
    check_cap(d, cap)?;
    let c = d.crossing_count();
    Ok((0..1u64 << c).flat_map(move |s| {
        let loops = loops_of(d, s).loop_count;
        (0..1u64 << loops).map(move |mask| EnhancedState {
            crossings: c,
            smoothing: s,
            labels: (0..loops).map(|l| if mask >> l & 1 == 0 { 1 } else { -1 }).collect(),
        })
    }))
}

pub fn enhanced_states(d: &PlanarDiagram) -> Result<impl Iterator<Item = EnhancedState> + '_> {
    enhanced_states_with_cap(d, DEFAULT_MAX_CROSSINGS)
}

/// Direct enhanced-state sum, one monomial per state.
pub fn bracket_q_from_states(d: &PlanarDiagram) -> Result<Laurent> {
    let mut out = Laurent::zero(Var::Q);
    for s in enhanced_states(d)? {
        let sign = if s.i() % 2 == 0 { 1 } else { -1 };
        out.add_term(s.j(), BigInt::from(sign));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(c: Vec<[u32; 4]>, free: u32) -> PlanarDiagram {
        PlanarDiagram::new(c, free).unwrap()
    }

    fn lh_trefoil() -> PlanarDiagram {
        pd(vec![[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], 0)
    }

    fn hopf() -> PlanarDiagram {
        pd(vec![[4, 1, 3, 2], [2, 3, 1, 4]], 0)
    }

    fn a(terms: &[(i64, i64)]) -> Laurent {
        Laurent::from_terms(Var::A, terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    #[test]
    fn loop_counts() {
        assert_eq!(loops_of(&PlanarDiagram::unknot(), 0).loop_count, 1);
        assert_eq!(loops_of(&hopf(), 0).loop_count, 2);
        // trefoil all-A: value from the Python union-find oracle
        assert_eq!(loops_of(&lh_trefoil(), 0).loop_count, 3);
        assert_eq!(loops_of(&lh_trefoil(), 0b111).loop_count, 2);
    }

    #[test]
    fn unknot_and_curls() {
        assert_eq!(bracket_a(&PlanarDiagram::unknot()).unwrap(), Laurent::delta());
        let pos = pd(vec![[1, 1, 2, 2]], 0);
        let neg = pd(vec![[1, 2, 2, 1]], 0);
        assert_eq!(bracket_a(&pos).unwrap(), a(&[(5, 1), (1, 1)]));
        assert_eq!(bracket_a(&neg).unwrap(), a(&[(-1, 1), (-5, 1)]));
        assert_eq!(f_poly(&pos).unwrap(), Laurent::one(Var::A));
        assert_eq!(f_poly(&neg).unwrap(), Laurent::one(Var::A));
    }

    #[test]
    fn hopf_bracket() {
        let expected = Laurent::delta() * a(&[(4, -1), (-4, -1)]);
        assert_eq!(bracket_a(&hopf()).unwrap(), expected);
    }

    #[test]
    fn trefoil_jones() {
        assert_eq!(jones(&lh_trefoil()).unwrap().to_string(), "-t^-4 + t^-3 + t^-1");
        assert_eq!(jones(&lh_trefoil().mirror()).unwrap().to_string(), "t + t^3 - t^4");
    }

    #[test]
    fn q_form_routes_agree() {
        for d in [PlanarDiagram::unknot(), hopf(), lh_trefoil(), pd(vec![[1, 1, 2, 2]], 1)] {
            let q = bracket_q(&d).unwrap();
            assert_eq!(q, bracket_q_via_a(&d).unwrap());
            assert_eq!(q, bracket_q_from_states(&d).unwrap());
        }
        let unlink = pd(vec![], 2);
        assert_eq!(bracket_q(&unlink).unwrap(), Laurent::q_circle().pow(2));
    }

    #[test]
    fn enhanced_state_counts() {
        let u: Vec<_> = enhanced_states(&PlanarDiagram::unknot()).unwrap().collect();
        let grades: Vec<(i64, i64)> = u.iter().map(|s| (s.i(), s.j())).collect();
        assert_eq!(grades, vec![(0, 1), (0, -1)]);
        assert_eq!(enhanced_states(&pd(vec![[1, 1, 2, 2]], 0)).unwrap().count(), 6);
    }

    #[test]
    fn partitions_match_serial() {
        let d = lh_trefoil();
        let serial = bracket_a_serial(&d).unwrap();
        for parts in [1, 2, 3, 8, 100] {
            assert_eq!(bracket_a_partitioned(&d, parts).unwrap(), serial);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let d = lh_trefoil();
        assert!(matches!(
            bracket_a_with_cap(&d, 2),
            Err(Error::CapExceeded { value: 3, cap: 2, .. })
        ));
    }
}
