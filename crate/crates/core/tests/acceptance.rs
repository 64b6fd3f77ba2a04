//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use qknot::bracket::{bracket_a, bracket_q, f_poly, jones};
use qknot::codecs::{parse_gauss, pd_to_gauss};
use qknot::gaussmoves::{
    apply, apply_r1, bounded_equivalence, neighbors, Direction, Equivalence, GaussRules, QuantumGaussWord,
    SearchLimits,
};
use qknot::instances::{
    graph_ket, isomorphic_graphs, permute_graph, reverse_word_move, word_ket, word_move_unitary, word_moves,
    DirectedGraph, GroupWord, Presentation,
};
use qknot::khovanov::{build_complex, ChainComplex};
use qknot::mosaic::{applicable_moves, apply_move, orbit_bfs, Limits, MoveSet, OrbitStatus};
use qknot::quantum::StateVector;
use qknot::{GaussToken, Laurent, Mosaic, PlanarDiagram, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(limit: Duration, elapsed: Duration, what: &str) -> Outcome {
    ensure!(elapsed < limit, "{what} took {elapsed:?}, limit {limit:?}");
    Ok(())
}

fn q_poly(terms: &[(i64, i64)]) -> Laurent {
    Laurent::from_terms(Var::Q, terms.iter().copied())
}

fn a_poly(terms: &[(i64, i64)]) -> Laurent {
    Laurent::from_terms(Var::A, terms.iter().copied())
}

fn c1_unknot_bracket() -> Outcome {
    let d = PlanarDiagram::unknot();
    let start = Instant::now();
    let q = bracket_q(&d).map_err(|e| e.to_string())?;
    let elapsed_q = start.elapsed();
    let start = Instant::now();
    let a = bracket_a(&d).map_err(|e| e.to_string())?;
    let elapsed_a = start.elapsed();
    ensure!(q == q_poly(&[(1, 1), (-1, 1)]), "bracket_q = {q}");
    ensure!(a == a_poly(&[(2, -1), (-2, -1)]), "bracket_A = {a}");
    within(Duration::from_millis(1), elapsed_q, "bracket_q")?;
    within(Duration::from_millis(1), elapsed_a, "bracket_A")
}

fn c2_curls() -> Outcome {
    let delta = a_poly(&[(2, -1), (-2, -1)]);
    for (name, e) in [("curl_pos", 3), ("curl_neg", -3)] {
        let d = pd(name);
        let start = Instant::now();
        let got = bracket_a(&d).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let want = &a_poly(&[(e, -1)]) * &delta;
        ensure!(got == want, "{name}: {got} != {want}");
        within(Duration::from_millis(1), elapsed, name)?;
    }
    Ok(())
}

fn c3_change_of_variables() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (name, d) in corpus().into_iter().filter(|(_, d)| d.crossing_count() <= 12) {
        let c = d.crossing_count() as i64;
        let via_a = bracket_a(&d).and_then(|a| a.shift(-c).convert(Var::Q)).map_err(|e| format!("{name}: {e}"))?;
        let direct = bracket_q(&d).map_err(|e| format!("{name}: {e}"))?;
        ensure!(via_a == direct, "{name}: {direct} != {via_a}");
        checked += 1;
    }
    ensure!(checked >= 15, "only {checked} diagrams");
    within(Duration::from_secs(30), start.elapsed(), "corpus")
}

/// Relabel a Gauss code to first-visit order and return the smallest rotation.
fn canonical_code(tokens: &[GaussToken]) -> Vec<GaussToken> {
    (0..tokens.len())
        .map(|r| {
            let mut map: BTreeMap<u32, u32> = BTreeMap::new();
            tokens[r..]
                .iter()
                .chain(&tokens[..r])
                .map(|t| match t.index() {
                    Some(i) => {
                        let next = map.len() as u32 + 1;
                        t.with_index(*map.entry(i).or_insert(next))
                    }
                    None => *t,
                })
                .collect::<Vec<_>>()
        })
        .min_by_key(|v| format!("{v:?}"))
        .unwrap_or_default()
}

fn walk_preserves_f(start: &Mosaic, set: &MoveSet, steps: usize, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let f0 = f_poly(&start.to_pd().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut cur = start.clone();
    let mut applied = 0;
    for _ in 0..steps {
        let options: Vec<Mosaic> = applicable_moves(&cur, set)
            .into_iter()
            .map(|(i, off)| apply_move(&cur, &set.moves()[i], off).unwrap())
            .filter(|m| m.crossing_count() <= 9)
            .collect();
        let Some(next) = options.choose(rng) else { break };
        cur = next.clone();
        applied += 1;
        ensure!(cur.is_suitably_connected(), "move broke connectivity");
        let f = f_poly(&cur.to_pd().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(f == f0, "f changed after {applied} moves: {f} != {f0}");
    }
    Ok(applied)
}

fn c4_jones_normalization() -> Outcome {
    let one = Laurent::one(Var::A);
    ensure!(f_poly(&PlanarDiagram::unknot()).unwrap() == one, "f(unknot) != 1");

    let set = MoveSet::default_set();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut applied = 0;
    while applied < 100 {
        let start = embed(&mosaic("trefoil"), 6, (rng.gen_range(0..3), rng.gen_range(0..3)));
        applied += walk_preserves_f(&start, &set, 100 - applied, &mut rng)?;
    }

    for (name, d) in corpus() {
        let v = jones(&d).map_err(|e| format!("{name}: {e}"))?;
        let vm = jones(&d.mirror()).map_err(|e| format!("{name}: {e}"))?;
        ensure!(vm == v.invert_variable(), "{name}: V_mirror(t) = {vm}, V(1/t) = {}", v.invert_variable());
    }

    let positive = parse_gauss("o1+u2+o3+u1+o2+u3+").unwrap();
    let tref = pd("trefoil_rh");
    let code = pd_to_gauss(&tref, 0).unwrap();
    ensure!(canonical_code(&code) == canonical_code(&positive), "trefoil_rh does not realize the all-positive code");
    let (v, vm) = (jones(&tref).unwrap(), jones(&tref.mirror()).unwrap());
    ensure!(v != vm, "trefoil Jones equals its mirror's: {v}");
    Ok(())
}

fn c5_khovanov_identities() -> Outcome {
    let start = Instant::now();
    for (name, d) in corpus().into_iter().filter(|(_, d)| d.crossing_count() <= 10) {
        let cx = build_complex(&d).map_err(|e| format!("{name}: {e}"))?;
        let dd = cx.check_d_squared();
        ensure!(dd.pass, "{name}: dd != 0 at {} entries", dd.failures);
        let deg = cx.check_degrees();
        ensure!(deg.pass, "{name}: {} entries break (i+1, j)", deg.failures);
        let bq = bracket_q(&d).unwrap();
        ensure!(cx.graded_euler() == bq, "{name}: dimension Euler {} != {bq}", cx.graded_euler());
        let betti = cx.homology(false).graded_euler();
        ensure!(betti == bq, "{name}: betti Euler {betti} != {bq}");
    }
    within(Duration::from_secs(60), start.elapsed(), "corpus")
}

fn c6_amplitudes() -> Outcome {
    for (name, d) in corpus() {
        let cx = build_complex(&d).map_err(|e| format!("{name}: {e}"))?;
        let bq = bracket_q(&d).unwrap();
        let tol = 1e-9 * cx.states().len() as f64;
        for k in 0..12 {
            let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 12.0);
            let want = bq.eval(q).unwrap();
            let amp = cx.amplitude(q).unwrap();
            let tr = cx.density_trace(q).unwrap();
            ensure!((amp - want).norm() <= tol, "{name} k={k}: amplitude {amp} vs {want}");
            ensure!((tr - want).norm() <= tol, "{name} k={k}: trace {tr} vs {want}");
        }
        let anti = cx.check_anticommutation_symbolic();
        ensure!(anti.pass, "{name}: U d + d U != 0 at {} states", anti.failures);
        let prop = cx.check_eigenvalue_propagation();
        ensure!(prop.pass, "{name}: eigenvalue propagation fails at {} entries", prop.failures);
    }
    Ok(())
}

/// Fraction-free Gaussian elimination over the integers.
fn dense_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            for k in c + 1..cols {
                let v = (&a[r][k] * &a[rank][c] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Betti numbers from dense boundary blocks built off the complex's entry list.
fn oracle_betti(cx: &ChainComplex) -> BTreeMap<(i64, i64), usize> {
    let buckets = cx.buckets();
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    for members in buckets.values() {
        for (k, &s) in members.iter().enumerate() {
            pos.insert(s, k);
        }
    }
    let grade = |s: usize| {
        let st = &cx.states()[s];
        (st.i(), st.j())
    };
    let mut blocks: BTreeMap<(i64, i64), Vec<Vec<BigInt>>> = BTreeMap::new();
    for e in cx.entries() {
        let g = grade(e.src);
        let rows = buckets.get(&(g.0 + 1, g.1)).map_or(0, Vec::len);
        let m = blocks.entry(g).or_insert_with(|| vec![vec![BigInt::zero(); buckets[&g].len()]; rows]);
        m[pos[&e.dst]][pos[&e.src]] += e.coeff;
    }
    let ranks: BTreeMap<(i64, i64), usize> = blocks.into_iter().map(|(g, m)| (g, dense_rank(m))).collect();
    buckets
        .iter()
        .map(|(&(i, j), members)| {
            let out = ranks.get(&(i, j)).copied().unwrap_or(0);
            let inc = ranks.get(&(i - 1, j)).copied().unwrap_or(0);
            ((i, j), members.len() - out - inc)
        })
        .filter(|(_, b)| *b > 0)
        .collect()
}

fn c7_homology_oracle() -> Outcome {
    let mut checked = 0;
    for (name, d) in corpus().into_iter().filter(|(_, d)| d.crossing_count() <= 7) {
        let cx = build_complex(&d).map_err(|e| format!("{name}: {e}"))?;
        let got: BTreeMap<(i64, i64), usize> =
            cx.homology(false).rows.iter().filter(|r| r.betti > 0).map(|r| ((r.i, r.j), r.betti)).collect();
        let want = oracle_betti(&cx);
        ensure!(got == want, "{name}: {got:?} != oracle {want:?}");
        checked += 1;
    }
    ensure!(checked >= 10, "only {checked} diagrams");
    for name in ["trefoil", "figure8"] {
        let table = build_complex(&pd(name)).unwrap().homology(true);
        let got: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        let want = golden(name)["homology"].clone();
        ensure!(got == want, "{name}: table {got} != golden {want}");
    }
    Ok(())
}

fn random_word(rng: &mut ChaCha8Rng, m: usize, n: u32) -> QuantumGaussWord {
    let c = rng.gen_range(0..=(m / 2).min(n as usize));
    let mut idx: Vec<u32> = (1..=n).collect();
    idx.shuffle(rng);
    let mut slots: Vec<usize> = (0..m).collect();
    slots.shuffle(rng);
    let mut tokens = vec![GaussToken::Blank; m];
    for (k, &i) in idx[..c].iter().enumerate() {
        let positive = rng.gen_bool(0.5);
        tokens[slots[2 * k]] = GaussToken::over(i, positive);
        tokens[slots[2 * k + 1]] = GaussToken::under(i, positive);
    }
    QuantumGaussWord::new(tokens, Some(n)).unwrap()
}

fn c8_gauss_rewriting() -> Outcome {
    let start = Instant::now();
    let rules = GaussRules::default();
    let curl = QuantumGaussWord::parse("o1+ u1+", Some(1)).unwrap();
    let reduced = apply_r1(&curl, 0, Direction::Forward, None).map_err(|e| e.to_string())?;
    ensure!(reduced.is_all_blank(), "o1+ u1+ -> {reduced}");

    let tref = QuantumGaussWord::parse("o1+u2+o3+u1+o2+u3+", Some(4)).unwrap().padded(8).unwrap();
    let lim = SearchLimits { max_depth: 4, max_states: 5_000_000 };
    let verdict = bounded_equivalence(&tref, &QuantumGaussWord::blank(8, Some(4)), &rules, lim).unwrap();
    ensure!(verdict == Equivalence::DistinctWithinBound, "padded trefoil at depth 4: {verdict:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cur = random_word(&mut rng, 8, 4);
    for step in 0..10_000 {
        let nb = neighbors(&cur, &rules);
        let (mv, next) = nb.choose(&mut rng).ok_or("word without neighbors")?.clone();
        QuantumGaussWord::new(next.tokens().to_vec(), Some(4)).map_err(|e| format!("step {step}: {e}"))?;
        let inv = mv.inverse(&cur).map_err(|e| format!("step {step}: {e}"))?;
        let back = apply(&next, &inv, &rules).map_err(|e| format!("step {step}: {e}"))?;
        ensure!(back == cur, "step {step}: {mv:?} not reversed");
        cur = if rng.gen_ratio(1, 200) { random_word(&mut rng, 8, 4) } else { next };
    }
    within(Duration::from_secs(10), start.elapsed(), "criterion")
}

fn c9_mosaic_pipeline() -> Outcome {
    let m = mosaic("trefoil");
    let report = m.validate();
    ensure!(report.suitably_connected, "violations at {:?}", report.violations);
    let d = m.to_pd().map_err(|e| e.to_string())?;
    ensure!(d.crossing_count() == 3, "{} crossings", d.crossing_count());
    let (vm, vp) = (jones(&d).unwrap(), jones(&pd("trefoil")).unwrap());
    ensure!(vm == vp, "mosaic Jones {vm} != PD Jones {vp}");

    let set = MoveSet::default_set();
    let orbit = orbit_bfs(&mosaic("circle_in_3x3"), &set, Limits::default());
    ensure!(orbit.status == OrbitStatus::Complete, "orbit truncated at {} states", orbit.size);
    for enc in &orbit.states {
        let k = Mosaic::new(3, enc.clone()).unwrap();
        for (i, off) in applicable_moves(&k, &set) {
            let img = apply_move(&k, &set.moves()[i], off).unwrap();
            ensure!(orbit.states.contains(&img.encoding()), "orbit not closed under {}", set.moves()[i].name);
        }
    }
    Ok(())
}

fn c10_borromean() -> Outcome {
    let b = pd("borromean");
    ensure!(b.crossing_count() == 6 && b.component_count() == 3, "not a 3-component 6-crossing diagram");
    let unlink = f_poly(&pd("unlink2")).unwrap();
    ensure!(unlink == Laurent::delta(), "f(unlink2) = {unlink}");
    for k in 0..3 {
        let sub = b.delete_component(k).map_err(|e| e.to_string())?;
        ensure!(sub.component_count() == 2, "deleting {k} leaves {} components", sub.component_count());
        let f = f_poly(&sub).unwrap();
        ensure!(f == unlink, "deleting {k}: f = {f}");
    }
    Ok(())
}

fn all_graphs(n: u32) -> Vec<DirectedGraph> {
    let pairs: Vec<(u32, u32)> = (1..=n).cartesian_product(1..=n).filter(|(a, b)| a != b).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            DirectedGraph::new(n, pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e))
                .unwrap()
        })
        .collect()
}

fn canonical_graph(g: &DirectedGraph) -> Vec<(u32, u32)> {
    let n = g.vertex_count();
    (1..=n)
        .permutations(n as usize)
        .map(|p| {
            let mut e: Vec<(u32, u32)> = g.edges().map(|(a, b)| (p[a as usize - 1], p[b as usize - 1])).collect();
            e.sort();
            e
        })
        .min()
        .unwrap()
}

fn c11_quantization() -> Outcome {
    for n in 1..=4u32 {
        let graphs = all_graphs(n);
        let mut classes: BTreeMap<Vec<(u32, u32)>, DirectedGraph> = BTreeMap::new();
        for g in &graphs {
            classes.entry(canonical_graph(g)).or_insert_with(|| g.clone());
        }
        for g in &graphs {
            if g.degree() > 0 {
                let ket = StateVector::<Complex64>::basis(graph_ket(g).unwrap());
                for sigma in (1..=n).permutations(n as usize) {
                    let (image, u) = permute_graph(g, &sigma).unwrap();
                    let moved = u.apply(&ket).unwrap();
                    ensure!(moved == StateVector::basis(graph_ket(&image).unwrap()), "{g} under {sigma:?}");
                }
            }
            let cg = canonical_graph(g);
            for (c, rep) in &classes {
                let found = isomorphic_graphs(g, rep).unwrap();
                ensure!(found.is_some() == (c == &cg), "{g} vs {rep}: {found:?}");
                if let Some(sigma) = found {
                    ensure!(&g.permuted(&sigma).unwrap() == rep, "{g}: bad witness {sigma:?}");
                }
            }
        }
    }

    let p = Presentation::new(2, vec![vec![1, 2, -1, -2], vec![1, 1, 1]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = BTreeSet::new();
    for _ in 0..500 {
        let len = rng.gen_range(1..=6);
        let w = GroupWord::new(2, (0..len).map(|_| rng.gen_range(-2..=2)).collect()).unwrap();
        for mv in word_moves(&w, &p) {
            seen.insert(format!("{:?}", mv.rule));
            let back = reverse_word_move(&w, &mv, &p).ok_or_else(|| format!("{w}: {mv:?} has no reverse"))?;
            ensure!(back.result == w, "{w}: {mv:?} reverses to {}", back.result);
            let u = word_move_unitary(&w, &mv).unwrap();
            let k = StateVector::<Complex64>::basis(word_ket(&w).unwrap());
            let once = u.apply(&k).unwrap();
            ensure!(once == StateVector::basis(word_ket(&mv.result).unwrap()), "{w}: unitary misroutes {mv:?}");
            ensure!(u.apply(&once).unwrap() == k, "{w}: {mv:?} unitary is not an involution");
        }
    }
    ensure!(seen.len() == 7, "only rules {seen:?} exercised");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("unknot bracket", c1_unknot_bracket),
        ("curl identities", c2_curls),
        ("change of variables", c3_change_of_variables),
        ("Jones normalization", c4_jones_normalization),
        ("Khovanov identities", c5_khovanov_identities),
        ("amplitude identities", c6_amplitudes),
        ("homology oracle", c7_homology_oracle),
        ("Gauss rewrite system", c8_gauss_rewriting),
        ("mosaic pipeline", c9_mosaic_pipeline),
        ("Borromean deletions", c10_borromean),
        ("quantization framework", c11_quantization),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("acceptance {:>2} PASS {name} ({secs:.3} s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {:>2} FAIL {name} ({secs:.3} s): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
