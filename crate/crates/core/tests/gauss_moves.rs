mod common;

use proptest::prelude::*;
use qknot::bracket::jones;
use qknot::codecs::{format_gauss, pd_to_gauss};
use qknot::gaussmoves::{
    apply, apply_blank_swap, apply_cyclic, apply_r1, apply_r2, apply_r3, bounded_equivalence, neighbors,
    permute_indices, verify, Direction, Equivalence, GaussRules, MoveInstance, QuantumGaussWord, Rule, SearchLimits,
    Variant,
};
use qknot::{Error, GaussToken, PlanarDiagram};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(text: &str) -> QuantumGaussWord {
    QuantumGaussWord::parse(text, Some(4)).unwrap()
}

fn rules() -> GaussRules {
    GaussRules::default()
}

const PLUS: Variant = Variant { swapped: false, positive: true };

/// A uniformly placed valid word of length `m` with indices from `1..=n`.
fn random_word(rng: &mut ChaCha8Rng, m: usize, n: u32) -> QuantumGaussWord {
    let c = rng.gen_range(0..=(m / 2).min(n as usize));
    let mut idx: Vec<u32> = (1..=n).collect();
    idx.shuffle(rng);
    let mut tokens = vec![GaussToken::Blank; m];
    let mut slots: Vec<usize> = (0..m).collect();
    slots.shuffle(rng);
    for (k, &i) in idx[..c].iter().enumerate() {
        let positive = rng.gen_bool(0.5);
        tokens[slots[2 * k]] = GaussToken::over(i, positive);
        tokens[slots[2 * k + 1]] = GaussToken::under(i, positive);
    }
    QuantumGaussWord::new(tokens, Some(n)).unwrap()
}

#[test]
fn first_move_examples() {
    assert_eq!(apply_r1(&w("o1+ u1+"), 0, Direction::Forward, None).unwrap().to_string(), "* *");
    for text in ["u1+ o1+", "o1- u1-", "u1- o1-"] {
        assert!(apply_r1(&w(text), 0, Direction::Forward, None).unwrap().is_all_blank());
    }
    assert_eq!(
        apply_r1(&w("* *"), 0, Direction::Reverse, Some((2, PLUS))).unwrap().to_string(),
        "o2+ u2+"
    );
    assert!(apply_r1(&w("o1+ u2+ o2+ u1+"), 0, Direction::Forward, None).is_err());
    // stale index
    assert!(apply_r1(&w("o1+ u1+ * *"), 2, Direction::Reverse, Some((1, PLUS))).is_err());
}

#[test]
fn second_move_examples() {
    assert!(apply_r2(&w("o1+ o2- u1+ u2-"), 0, 2, Direction::Forward, None).unwrap().is_all_blank());
    assert!(apply_r2(&w("o1+ o2- u2- u1+"), 0, 2, Direction::Forward, None).unwrap().is_all_blank());
    assert!(apply_r2(&w("o1- o2+ u1- u2+"), 0, 2, Direction::Forward, None).unwrap().is_all_blank());
    assert!(apply_r2(&w("o1+ o2- o3+ u3+ u1+ u2-"), 0, 4, Direction::Forward, None).unwrap().to_string() == "* * o3+ u3+ * *");
    assert!(apply_r2(&w("o1+ o2+ u1+ u2+"), 0, 2, Direction::Forward, None).is_err());
    let back = apply_r2(&w("* * * *"), 0, 2, Direction::Reverse, Some(([1, 2], Variant { swapped: true, positive: true }))).unwrap();
    assert_eq!(back.to_string(), "o1+ o2- u2- u1+");
    assert!(apply_r2(&w("* * * *"), 0, 2, Direction::Reverse, Some(([1, 1], PLUS))).is_err());
}

#[test]
fn third_move_examples() {
    let a = w("u1+ u2+ o1+ u3+ o2+ o3+");
    let b = apply_r3(&a, 0, 2, 4, &rules()).unwrap();
    assert_eq!(b.to_string(), "u2+ u1+ u3+ o1+ o3+ o2+");
    assert_eq!(apply_r3(&b, 0, 2, 4, &rules()).unwrap(), a);
    assert!(apply_r3(&w("u1+ u2+ o1+ u3+ o3+ o2+"), 0, 2, 4, &rules()).is_err());
    // with intermediate factors
    let spaced = QuantumGaussWord::parse("u1+ u2+ * o1+ u3+ o4- u4- o2+ o3+", Some(4)).unwrap();
    assert_eq!(
        apply_r3(&spaced, 0, 3, 7, &rules()).unwrap().to_string(),
        "u2+ u1+ * u3+ o1+ o4- u4- o3+ o2+"
    );
}

#[test]
fn third_move_extension_file() {
    let word = w("u1- u2- o1- u3- o2- o3-");
    assert!(apply_r3(&word, 0, 2, 4, &rules()).is_err());
    let mut extended = rules();
    extended.extend_from_json(r#"{"r3": ["u1- u2- o1- u3- o2- o3-"]}"#).unwrap();
    assert_eq!(extended.r3.len(), 2);
    assert!(apply_r3(&word, 0, 2, 4, &extended).is_ok());
    assert!(extended.extend_from_json(r#"{"r3": ["u1+ u2+ o1+"]}"#).is_err());
    assert!(extended.extend_from_json(r#"{"r3": ["u1+ u2+ o1+ u4+ o2+ o4+"]}"#).is_err());
}

#[test]
fn blank_and_cyclic_examples() {
    assert_eq!(apply_blank_swap(&w("o1+ * u1+"), 0).unwrap().to_string(), "* o1+ u1+");
    assert!(apply_blank_swap(&w("o1+ u1+"), 0).is_err());
    assert!(apply_blank_swap(&w("* *"), 0).is_err());
    let c = w("o1+ u1+ *");
    assert_eq!(apply_cyclic(&c, Direction::Forward).to_string(), "* o1+ u1+");
    let mut cur = c.clone();
    for _ in 0..c.len() {
        cur = apply_cyclic(&cur, Direction::Forward);
    }
    assert_eq!(cur, c);
}

#[test]
fn index_permutations() {
    let tref = QuantumGaussWord::parse("o1+u2+o3+u1+o2+u3+", Some(3)).unwrap();
    assert_eq!(permute_indices(&tref, &[1, 2, 3]).unwrap(), tref);
    assert_eq!(
        format_gauss(permute_indices(&tref, &[2, 1, 3]).unwrap().tokens()).replace(' ', ""),
        "o2+u1+o3+u2+o1+u3+"
    );
    assert!(matches!(permute_indices(&tref, &[1, 1, 3]), Err(Error::NotBijection(_))));
    assert!(matches!(permute_indices(&tref, &[2, 1]), Err(Error::NotBijection(_))));
}

#[test]
fn neighbors_of_blank_pair() {
    let nb = neighbors(&w("* *"), &rules());
    let words: Vec<String> = nb.iter().map(|(_, x)| x.to_string()).collect();
    for expected in ["o1+ u1+", "u1+ o1+", "o1- u1-", "u1- o1-"] {
        assert!(words.contains(&expected.to_string()), "{expected}");
    }
    let zero = QuantumGaussWord::blank(2, Some(0));
    let nb = neighbors(&zero, &rules());
    assert_eq!(nb.len(), 1);
    assert_eq!(nb[0].0.rule, Rule::Cyclic);
    assert_eq!(nb[0].1, zero);
}

#[test]
fn bounded_search_examples() {
    let lim = SearchLimits { max_depth: 4, max_states: 1_000_000 };
    match bounded_equivalence(&w("o1+ u1+"), &w("* *"), &rules(), lim).unwrap() {
        Equivalence::Path(p) => assert_eq!(p.len(), 1),
        other => panic!("{other:?}"),
    }
    let x = w("o1+ u1+ * o2- u2-");
    assert_eq!(bounded_equivalence(&x, &x, &rules(), lim).unwrap(), Equivalence::Path(vec![]));
    assert!(matches!(
        bounded_equivalence(&w("* *"), &w("* * *"), &rules(), lim),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn trefoil_does_not_unravel_in_four_moves() {
    let tref = QuantumGaussWord::parse("o1+u2+o3+u1+o2+u3+", Some(4)).unwrap().padded(8).unwrap();
    let blank = QuantumGaussWord::blank(8, Some(4));
    let lim = SearchLimits { max_depth: 4, max_states: 5_000_000 };
    assert_eq!(bounded_equivalence(&tref, &blank, &rules(), lim).unwrap(), Equivalence::DistinctWithinBound);
}

#[test]
fn witness_paths_replay() {
    let a = w("o1+ o2- * u1+ u2- * * *");
    let b = w("* * * * * * o3+ u3+");
    let lim = SearchLimits { max_depth: 4, max_states: 2_000_000 };
    match bounded_equivalence(&a, &b, &rules(), lim).unwrap() {
        Equivalence::Path(p) => {
            verify(&a, &b, &p, &rules()).unwrap();
            let json = serde_json::to_string(&p).unwrap();
            let back: Vec<MoveInstance> = serde_json::from_str(&json).unwrap();
            assert_eq!(back, p);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn state_cap_gives_unknown() {
    let a = QuantumGaussWord::parse("o1+u2+o3+u1+o2+u3+", Some(4)).unwrap().padded(8).unwrap();
    let b = QuantumGaussWord::blank(8, Some(4));
    let lim = SearchLimits { max_depth: 6, max_states: 20 };
    assert_eq!(bounded_equivalence(&a, &b, &rules(), lim).unwrap(), Equivalence::Unknown);
}

#[test]
fn ten_thousand_random_moves_are_valid_and_reversible() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let r = rules();
    let mut cur = QuantumGaussWord::blank(8, Some(4));
    let mut done = 0;
    while done < 10_000 {
        let nb = neighbors(&cur, &r);
        let (mv, next) = nb.choose(&mut rng).unwrap().clone();
        QuantumGaussWord::new(next.tokens().to_vec(), Some(4)).unwrap();
        let inv = mv.inverse(&cur).unwrap();
        assert_eq!(apply(&next, &inv, &r).unwrap(), cur, "{mv:?}");
        cur = next;
        done += 1;
        if rng.gen_ratio(1, 200) {
            cur = random_word(&mut rng, 8, 4);
        }
    }
}

#[test]
fn first_move_preserves_jones_on_realized_codes() {
    let unknot = jones(&PlanarDiagram::unknot()).unwrap();
    for name in ["curl_pos", "curl_neg"] {
        let pd = common::pd(name);
        let code = pd_to_gauss(&pd, 0).unwrap();
        let word = QuantumGaussWord::new(code, None).unwrap();
        let reduced = apply_r1(&word, 0, Direction::Forward, None).unwrap();
        assert!(reduced.is_all_blank());
        // both words are realized: the curl diagram and the round unknot
        assert_eq!(jones(&pd).unwrap(), unknot);
    }
}

#[test]
fn unbounded_index_supply() {
    let x = QuantumGaussWord::parse("o1+ u1+ * *", None).unwrap();
    let nb = neighbors(&x, &rules());
    assert!(nb.iter().any(|(m, _)| m.rule == Rule::R1 && m.fresh_indices == vec![2]));
    assert!(!nb.iter().any(|(m, _)| m.fresh_indices.contains(&3)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbor_relation_is_symmetric(seed in any::<u64>(), m in 2usize..=8, n in 1u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_word(&mut rng, m, n);
        let r = rules();
        for (_, y) in neighbors(&x, &r) {
            prop_assert!(neighbors(&y, &r).iter().any(|(_, z)| *z == x), "{} -> {}", x, y);
        }
    }

    #[test]
    fn permutation_composition(seed in any::<u64>(), m in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_word(&mut rng, m, 4);
        let mut s: Vec<u32> = (1..=4).collect();
        let mut t: Vec<u32> = (1..=4).collect();
        s.shuffle(&mut rng);
        t.shuffle(&mut rng);
        // (s . t)(i) = s(t(i))
        let st: Vec<u32> = t.iter().map(|&i| s[i as usize - 1]).collect();
        let once = permute_indices(&x, &st).unwrap();
        let twice = permute_indices(&permute_indices(&x, &t).unwrap(), &s).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn every_neighbor_move_inverts(seed in any::<u64>(), m in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_word(&mut rng, m, 4);
        let r = rules();
        for (mv, y) in neighbors(&x, &r) {
            prop_assert_eq!(apply(&y, &mv.inverse(&x).unwrap(), &r).unwrap(), x.clone());
        }
    }
}
