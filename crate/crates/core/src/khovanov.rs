//! Khovanov chain complex on enhanced states.
//!
//! The differential switches one A-smoothed crossing `k` to B. Loops merge
//! with `m(1,1)=1, m(1,X)=m(X,1)=X, m(X,X)=0` or split with
//! `D(1)=1(x)X+X(x)1, D(X)=X(x)X`, where label `+1` is `1` and `-1` is `X`.
//! The sign is `(-1)^(number of B-smoothings at crossings before k)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bracket::{loops_of, EnhancedState, LoopStructure};
use crate::codecs::PlanarDiagram;
use crate::error::{Error, Result};
use crate::laurent::{Laurent, Var};
use crate::linalg::SparseMatrix;
use crate::quantum::{BasisKet, DiagonalUnitary, Family, Motif, StateVector, UNIT_TOLERANCE};

pub const DEFAULT_MAX_CROSSINGS: usize = 14;
/// Torsion is computed only for boundary matrices within this size.
pub const DEFAULT_TORSION_MAX_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Entry {
    pub src: usize,
    pub dst: usize,
    pub coeff: i64,
}

#[derive(Debug, Clone)]
pub struct ChainComplex {
    crossings: usize,
    n_plus: usize,
    n_minus: usize,
    states: Vec<EnhancedState>,
    grade: Vec<(i64, i64)>,
    index: HashMap<EnhancedState, usize>,
    buckets: BTreeMap<(i64, i64), Vec<usize>>,
    position: Vec<usize>,
    entries: Vec<Entry>,
}

fn mask_labels(mask: u64, loops: usize) -> Vec<i8> {
    (0..loops).map(|l| if mask >> l & 1 == 1 { -1 } else { 1 }).collect()
}

/// Where each loop of `from` lands in `to`, for loops untouched by crossing `k`.
fn carry_loops(from: &LoopStructure, to: &LoopStructure, free: usize) -> Vec<usize> {
    let arc_loops_from = from.loop_count - free;
    let arc_loops_to = to.loop_count - free;
    let mut target = vec![usize::MAX; from.loop_count];
    for (arc, &l) in from.arc_loop.iter().enumerate() {
        if target[l] == usize::MAX {
            target[l] = to.arc_loop[arc];
        }
    }
    for f in 0..free {
        target[arc_loops_from + f] = arc_loops_to + f;
    }
    target
}

pub fn build_complex(d: &PlanarDiagram) -> Result<ChainComplex> {
    build_complex_with_cap(d, DEFAULT_MAX_CROSSINGS)
}

pub fn build_complex_with_cap(d: &PlanarDiagram, cap: usize) -> Result<ChainComplex> {
    let c = d.crossing_count();
    let cap = cap.min(40);
    if c > cap {
        return Err(Error::CapExceeded { what: "crossings", value: c, cap });
    }
    let free = d.free_loops() as usize;
    let structures: Vec<LoopStructure> = (0..1u64 << c).map(|s| loops_of(d, s)).collect();
    let mut base = Vec::with_capacity(structures.len());
    let mut states = Vec::new();
    for (s, ls) in structures.iter().enumerate() {
        base.push(states.len());
        for mask in 0..1u64 << ls.loop_count {
            states.push(EnhancedState {
                crossings: c,
                smoothing: s as u64,
                labels: mask_labels(mask, ls.loop_count),
            });
        }
    }

    let mut entries = Vec::new();
    for (s, ls) in structures.iter().enumerate() {
        let s = s as u64;
        for k in (0..c).filter(|&k| s >> k & 1 == 0) {
            let s2 = s | 1 << k;
            let ls2 = &structures[s2 as usize];
            let sign = if (s & ((1 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
            let [a, b, cc, _] = d.crossings()[k].map(|x| x as usize - 1);
            let (la, lc) = (ls.arc_loop[a], ls.arc_loop[cc]);
            let carry = carry_loops(ls, ls2, free);
            let merging = la != lc;
            if !merging && ls2.arc_loop[a] == ls2.arc_loop[b] {
                return Err(Error::Precondition(format!(
                    "crossing {k} neither merges nor splits loops; diagram is not planar"
                )));
            }
            for mask in 0..1u64 << ls.loop_count {
                let mut rest = 0u64;
                for l in 0..ls.loop_count {
                    if l != la && l != lc && mask >> l & 1 == 1 {
                        rest |= 1 << carry[l];
                    }
                }
                let src = base[s as usize] + mask as usize;
                let mut emit = |m2: u64| {
                    entries.push(Entry { src, dst: base[s2 as usize] + m2 as usize, coeff: sign });
                };
                if merging {
                    let (xa, xc) = (mask >> la & 1 == 1, mask >> lc & 1 == 1);
                    if xa && xc {
                        continue;
                    }
                    let m = ls2.arc_loop[a];
                    emit(if xa || xc { rest | 1 << m } else { rest });
                } else {
                    let (p, r) = (ls2.arc_loop[a], ls2.arc_loop[b]);
                    if mask >> la & 1 == 1 {
                        emit(rest | 1 << p | 1 << r);
                    } else {
                        emit(rest | 1 << r);
                        emit(rest | 1 << p);
                    }
                }
            }
        }
    }

    let (n_plus, n_minus) = d.sign_counts();
    Ok(ChainComplex::assemble(c, n_plus, n_minus, states, entries))
}

impl ChainComplex {
    fn assemble(
        crossings: usize,
        n_plus: usize,
        n_minus: usize,
        states: Vec<EnhancedState>,
        entries: Vec<Entry>,
    ) -> Self {
        let mut buckets: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        let mut position = vec![0; states.len()];
        for (idx, s) in states.iter().enumerate() {
            let bucket = buckets.entry((s.i(), s.j())).or_default();
            position[idx] = bucket.len();
            bucket.push(idx);
        }
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let grade = states.iter().map(|s| (s.i(), s.j())).collect();
        ChainComplex { crossings, n_plus, n_minus, states, grade, index, buckets, position, entries }
    }

    pub fn crossings(&self) -> usize {
        self.crossings
    }

    pub fn sign_counts(&self) -> (usize, usize) {
        (self.n_plus, self.n_minus)
    }

    pub fn states(&self) -> &[EnhancedState] {
        &self.states
    }

    pub fn index_of(&self, s: &EnhancedState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn buckets(&self) -> &BTreeMap<(i64, i64), Vec<usize>> {
        &self.buckets
    }

    pub fn dim(&self, i: i64, j: i64) -> usize {
        self.buckets.get(&(i, j)).map_or(0, |b| b.len())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Same basis with a replaced differential (used to test the checks).
    pub fn with_entries(&self, entries: Vec<Entry>) -> ChainComplex {
        ChainComplex { entries, ..self.clone() }
    }

    /// `d(s)` as a sparse combination of basis indices.
    pub fn boundary_of(&self, src: usize) -> BTreeMap<usize, i64> {
        let mut out = BTreeMap::new();
        for e in self.entries.iter().filter(|e| e.src == src) {
            *out.entry(e.dst).or_insert(0) += e.coeff;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn adjacency(&self) -> Vec<Vec<(usize, i64)>> {
        let mut adj = vec![Vec::new(); self.states.len()];
        for e in &self.entries {
            adj[e.src].push((e.dst, e.coeff));
        }
        adj
    }

    /// Boundary matrix `C^{i,j} -> C^{i+1,j}`.
    pub fn matrix(&self, i: i64, j: i64) -> SparseMatrix {
        self.matrices().remove(&(i, j)).unwrap_or_else(|| SparseMatrix::new(self.dim(i + 1, j), self.dim(i, j)))
    }

    /// All nonempty-target boundary matrices, keyed by source bigrading.
    pub fn matrices(&self) -> BTreeMap<(i64, i64), SparseMatrix> {
        let mut out: BTreeMap<(i64, i64), SparseMatrix> = self
            .buckets
            .keys()
            .filter(|&&(i, j)| self.dim(i + 1, j) > 0)
            .map(|&(i, j)| ((i, j), SparseMatrix::new(self.dim(i + 1, j), self.dim(i, j))))
            .collect();
        for e in &self.entries {
            let ((i, j), t) = (self.grade[e.src], self.grade[e.dst]);
            if t == (i + 1, j) {
                if let Some(m) = out.get_mut(&(i, j)) {
                    m.push(self.position[e.dst], self.position[e.src], e.coeff);
                }
            }
        }
        out
    }

    /// Every entry raises `i` by one and keeps `j`.
    pub fn check_degrees(&self) -> CheckReport {
        let failures = self
            .entries
            .iter()
            .filter(|e| {
                let (s, t) = (self.grade[e.src], self.grade[e.dst]);
                e.coeff != 0 && t != (s.0 + 1, s.1)
            })
            .count();
        CheckReport::exact("degree", self.entries.len(), failures)
    }

    /// `dd = 0` over the integers.
    pub fn check_d_squared(&self) -> CheckReport {
        let adj = self.adjacency();
        let mut failures = 0;
        let mut worst = 0i64;
        for src in 0..self.states.len() {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(mid, c1) in &adj[src] {
                for &(dst, c2) in &adj[mid] {
                    *acc.entry(dst).or_insert(0) += c1 * c2;
                }
            }
            for v in acc.values().filter(|v| **v != 0) {
                failures += 1;
                worst = worst.max(v.abs());
            }
        }
        let mut r = CheckReport::exact("dd=0", self.states.len(), failures);
        r.max_deviation = worst as f64;
        r
    }

    pub fn homology(&self, torsion: bool) -> HomologyTable {
        self.homology_with(torsion, DEFAULT_TORSION_MAX_DIM)
    }

    pub fn homology_with(&self, torsion: bool, torsion_max_dim: usize) -> HomologyTable {
        let keys: Vec<(i64, i64)> = self.buckets.keys().copied().collect();
        // ranks of C^{i,j} -> C^{i+1,j}, computed on worker threads
        let ranks: BTreeMap<(i64, i64), (usize, Option<Vec<BigInt>>)> = {
            let mut mats = self.matrices();
            let work: Vec<((i64, i64), SparseMatrix)> = {
                let mut v: Vec<_> = std::mem::take(&mut mats).into_iter().collect();
                // largest first so workers finish together
                v.sort_by_key(|(_, m)| std::cmp::Reverse(m.entries.len()));
                v
            };
            let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(work.len().max(1));
            let next = std::sync::atomic::AtomicUsize::new(0);
            let results = std::sync::Mutex::new(BTreeMap::new());
            std::thread::scope(|scope| {
                for _ in 0..threads {
                    scope.spawn(|| loop {
                        let at = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some(((i, j), m)) = work.get(at) else { break };
                        let (i, j) = (*i, *j);
                        let tors = (torsion && m.rows <= torsion_max_dim && m.cols <= torsion_max_dim)
                            .then(|| m.torsion());
                        let rank = m.rank();
                        results.lock().unwrap().insert((i, j), (rank, tors));
                    });
                }
            });
            results.into_inner().unwrap()
        };
        let rank = |i: i64, j: i64| ranks.get(&(i, j)).map_or(0, |r| r.0);
        let mut rows = Vec::new();
        for &(i, j) in &keys {
            let betti = self.dim(i, j) - rank(i, j) - rank(i - 1, j);
            let tors = if !torsion {
                None
            } else if self.dim(i - 1, j) == 0 {
                Some(Vec::new())
            } else {
                ranks.get(&(i - 1, j)).and_then(|r| r.1.clone())
            };
            let tors_nonempty = tors.as_ref().is_some_and(|t| !t.is_empty());
            if betti > 0 || tors_nonempty {
                rows.push(HomologyRow {
                    i,
                    j,
                    betti,
                    torsion: tors.map(|t| t.iter().map(|x| x.to_u64().expect("small torsion")).collect()),
                });
            }
        }
        HomologyTable { rows, shifted: false }
    }

    /// `sum_j q^j sum_i (-1)^i dim C^{i,j}`.
    pub fn graded_euler(&self) -> Laurent {
        let mut out = Laurent::zero(Var::Q);
        for (&(i, j), b) in &self.buckets {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            out.add_term(j, BigInt::from(sign * b.len() as i64));
        }
        out
    }

    pub fn unitary(&self, q: Complex64) -> Result<DiagonalUnitary> {
        unitary_u(self.crossings, q)
    }

    /// `|psi> = sum_s |s>`, unnormalized.
    pub fn psi(&self) -> Result<StateVector> {
        StateVector::superpose(
            Family::EnhancedState,
            self.states
                .iter()
                .map(|s| Ok((Complex64::new(1.0, 0.0), s.to_ket()?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `<psi|U|psi>`.
    pub fn amplitude(&self, q: Complex64) -> Result<Complex64> {
        let u = self.unitary(q)?;
        let psi = self.psi()?;
        u.matrix_element(&psi, &psi)
    }

    /// `Tr(U rho)` with `rho = |psi><psi|`, summing the diagonal
    /// `rho_ss * lambda_s` without forming `rho`.
    pub fn density_trace(&self, q: Complex64) -> Result<Complex64> {
        let u = self.unitary(q)?;
        let psi = self.psi()?;
        let mut tr = Complex64::new(0.0, 0.0);
        for (ket, amp) in psi.iter() {
            let rho_ss = amp * amp.conj();
            tr += u.eigenvalue(ket)? * rho_ss;
        }
        Ok(tr)
    }

    /// `U d + d U` on every basis state, numerically at `q`.
    pub fn check_anticommutation(&self, q: Complex64) -> Result<CheckReport> {
        let u = self.unitary(q)?;
        let kets: Vec<BasisKet> = self.states.iter().map(|s| s.to_ket()).collect::<Result<_>>()?;
        let lambda: Vec<Complex64> = kets.iter().map(|k| u.eigenvalue(k)).collect::<Result<_>>()?;
        let adj = self.adjacency();
        let mut worst = 0.0f64;
        let mut failures = 0;
        for (src, out) in adj.iter().enumerate() {
            let mut combined: BTreeMap<usize, i64> = BTreeMap::new();
            for &(dst, coeff) in out {
                *combined.entry(dst).or_insert(0) += coeff;
            }
            for (dst, coeff) in combined {
                let v = (lambda[dst] + lambda[src]) * coeff as f64;
                worst = worst.max(v.norm());
                if v.norm() > 1e-9 {
                    failures += 1;
                }
            }
        }
        let mut r = CheckReport::exact("U d + d U = 0", self.states.len(), failures);
        r.max_deviation = worst;
        Ok(r)
    }

    /// `U d + d U = 0` with `q` kept symbolic: each coefficient of the
    /// result is an exact polynomial in `q`.
    pub fn check_anticommutation_symbolic(&self) -> CheckReport {
        let adj = self.adjacency();
        let mut failures = 0;
        for (src, out) in adj.iter().enumerate() {
            let mut acc: BTreeMap<usize, Laurent> = BTreeMap::new();
            for &(dst, coeff) in out {
                let term = symbolic_eigenvalue(&self.states[dst]).scale(&BigInt::from(coeff))
                    + symbolic_eigenvalue(&self.states[src]).scale(&BigInt::from(coeff));
                *acc.entry(dst).or_insert_with(|| Laurent::zero(Var::Q)) += term;
            }
            failures += acc.values().filter(|p| !p.is_zero()).count();
        }
        CheckReport::exact("U d + d U = 0 (symbolic)", self.states.len(), failures)
    }

    /// `lambda_{s'} = -lambda_s` for every nonzero matrix entry, as exact monomials.
    pub fn check_eigenvalue_propagation(&self) -> CheckReport {
        let mut checked = 0;
        let mut failures = 0;
        for e in self.entries.iter().filter(|e| e.coeff != 0) {
            checked += 1;
            let lhs = symbolic_eigenvalue(&self.states[e.dst]);
            let rhs = -symbolic_eigenvalue(&self.states[e.src]);
            if lhs != rhs {
                failures += 1;
            }
        }
        CheckReport::exact("eigenvalue propagation", checked, failures)
    }

    /// `sum_j q^j chi(H(C^{.,j}))`, from homology ranks. The flag reports
    /// whether `q` collapses two occurring gradings onto one eigenvalue.
    pub fn eigenspace_amplitude(&self, q: Complex64) -> Result<(Complex64, bool)> {
        check_unit(q)?;
        let table = self.homology(false);
        let mut chi: BTreeMap<i64, i64> = BTreeMap::new();
        for r in &table.rows {
            *chi.entry(r.j).or_insert(0) += if r.i % 2 == 0 { 1 } else { -1 } * r.betti as i64;
        }
        let js: Vec<i64> = self.buckets.keys().map(|&(_, j)| j).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let powers: Vec<Complex64> = js.iter().map(|&j| q.powi(j as i32)).collect();
        let collapsed = powers
            .iter()
            .enumerate()
            .any(|(a, p)| powers[a + 1..].iter().any(|r| (p - r).norm() < 1e-9));
        let total = chi
            .iter()
            .map(|(&j, &x)| q.powi(j as i32) * x as f64)
            .sum();
        Ok((total, collapsed))
    }
}

/// `(-1)^i q^j` as a signed monomial in `q`.
pub fn symbolic_eigenvalue(s: &EnhancedState) -> Laurent {
    let sign = if s.i() % 2 == 0 { 1 } else { -1 };
    Laurent::monomial(Var::Q, s.j(), sign)
}

fn check_unit(q: Complex64) -> Result<()> {
    if (q.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnitCircle(q.norm()));
    }
    Ok(())
}

fn decode_state(payload: &[u8]) -> Option<(i64, i64)> {
    if payload.len() < 12 {
        return None;
    }
    let smoothing = u64::from_le_bytes(payload[4..12].try_into().ok()?);
    let i = smoothing.count_ones() as i64;
    let lambda: i64 = payload[12..]
        .iter()
        .map(|&b| match b {
            1 => Some(1),
            0 => Some(-1),
            _ => None,
        })
        .sum::<Option<i64>>()?;
    Some((i, i + lambda))
}

/// `U|s> = (-1)^i(s) q^j(s) |s>` on enhanced-state kets of a `c`-crossing diagram.
pub fn unitary_u(crossings: usize, q: Complex64) -> Result<DiagonalUnitary> {
    check_unit(q)?;
    let c = crossings as u32;
    Ok(DiagonalUnitary::new(Family::EnhancedState, move |ket: &BasisKet| {
        let p = ket.payload();
        if p.len() < 4 || u32::from_le_bytes(p[0..4].try_into().ok()?) != c {
            return None;
        }
        let (i, j) = decode_state(p)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        Some(q.powi(j as i32) * sign)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub checked: usize,
    pub failures: usize,
    #[serde(rename = "maxDeviation")]
    pub max_deviation: f64,
}

impl CheckReport {
    pub fn exact(name: &str, checked: usize, failures: usize) -> Self {
        CheckReport { name: name.into(), pass: failures == 0, checked, failures, max_deviation: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyRow {
    pub i: i64,
    pub j: i64,
    pub betti: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyTable {
    pub rows: Vec<HomologyRow>,
    #[serde(skip)]
    pub shifted: bool,
}

impl HomologyTable {
    pub fn betti(&self, i: i64, j: i64) -> usize {
        self.rows.iter().find(|r| (r.i, r.j) == (i, j)).map_or(0, |r| r.betti)
    }

    /// `sum_j q^j sum_i (-1)^i betti(i,j)`.
    pub fn graded_euler(&self) -> Laurent {
        let mut out = Laurent::zero(Var::Q);
        for r in &self.rows {
            let sign = if r.i % 2 == 0 { 1 } else { -1 };
            out.add_term(r.j, BigInt::from(sign * r.betti as i64));
        }
        out
    }

    /// Conventional normalization `i -> i - n_minus`, `j -> j + n_plus - 2 n_minus`.
    pub fn shifted(&self, n_plus: usize, n_minus: usize) -> HomologyTable {
        let (np, nm) = (n_plus as i64, n_minus as i64);
        let mut rows: Vec<HomologyRow> = self
            .rows
            .iter()
            .map(|r| HomologyRow { i: r.i - nm, j: r.j + np - 2 * nm, ..r.clone() })
            .collect();
        rows.sort_by_key(|r| (r.i, r.j));
        HomologyTable { rows, shifted: true }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("table serializes")
    }
}
