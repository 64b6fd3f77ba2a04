//! Regenerates `data/default.moves.json`.
//!
//! Every internally consistent 2x2 block is grouped with the blocks that
//! share its boundary signature, crossing count and writhe-normalized
//! tangle bracket; each group becomes a star of moves around its smallest
//! member. Groups are emitted once per symmetry class since the loader
//! closes the set under rotations, reflections and mirroring. The
//! Reidemeister moves are listed by hand.

use std::collections::{BTreeMap, BTreeSet};

use qknot::codecs::mosaic::is_crossing;
use qknot::mosaic::{Block, MosaicMove};
use serde_json::json;

fn images(b: &Block) -> Vec<Block> {
    let mut out = Vec::new();
    for mirror in [false, true] {
        for flip in [false, true] {
            for rot in 0..4 {
                let t = b.transform(rot, flip);
                out.push(if mirror { t.mirror() } else { t });
            }
        }
    }
    out
}

fn main() {
    let mut groups: BTreeMap<String, Vec<Block>> = BTreeMap::new();
    for code in 0..11u32.pow(4) {
        let tiles: Vec<u8> = (0..4).rev().map(|i| (code / 11u32.pow(i) % 11) as u8).collect();
        let b = Block { rows: 2, cols: 2, tiles };
        if !b.internal_violations().is_empty() {
            continue;
        }
        let t = b.tangle();
        let crossings = b.tiles.iter().filter(|&&x| is_crossing(x)).count();
        let key = format!("{:?}{:?}{}{}", t.ports, t.pairing, t.closed_loops, crossings);
        groups.entry(key).or_default().push(b);
    }
    let mut classes: Vec<Vec<Block>> = Vec::new();
    for g in groups.into_values() {
        let mut local: Vec<Vec<Block>> = Vec::new();
        for b in g {
            match local.iter_mut().find(|cl| MosaicMove::new("probe", cl[0].clone(), b.clone()).is_ok()) {
                Some(cl) => cl.push(b),
                None => local.push(vec![b]),
            }
        }
        classes.extend(local.into_iter().filter(|cl| cl.len() > 1));
    }
    let mut seen: BTreeSet<BTreeSet<Block>> = BTreeSet::new();
    let mut moves = Vec::new();
    for mut cl in classes {
        cl.sort();
        let set: BTreeSet<Block> = cl.iter().cloned().collect();
        let orbit: Vec<BTreeSet<Block>> = (0..16)
            .map(|i| cl.iter().map(|b| images(b)[i].clone()).collect())
            .collect();
        if orbit.iter().any(|o| seen.contains(o)) {
            continue;
        }
        seen.insert(set);
        for other in &cl[1..] {
            moves.push(json!({
                "name": format!("P{}", moves.len() + 1),
                "k": [2, 2],
                "pattern": cl[0].grid(),
                "replacement": other.grid(),
            }));
        }
    }
    let hand = [
        ("R1", json!([2, 2]), json!([[0, 0], [1, 0]]), json!([[2, 1], [9, 4]])),
        ("R2", json!([2, 2]), json!([[7, 8], [3, 4]]), json!([[10, 10], [3, 4]])),
        ("R2long", json!([2, 3]), json!([[7, 5, 8], [3, 5, 4]]), json!([[10, 5, 10], [3, 5, 4]])),
        (
            "R3",
            json!([3, 3]),
            json!([[5, 9, 1], [5, 10, 10], [0, 6, 6]]),
            json!([[1, 6, 0], [10, 10, 5], [3, 9, 1]]),
        ),
    ];
    for (name, k, p, r) in hand {
        moves.push(json!({"name": name, "k": k, "pattern": p, "replacement": r}));
    }
    let lines: Vec<String> = moves.iter().map(|m| format!("    {m}")).collect();
    let text = format!("{{\n  \"symmetryClosure\": true,\n  \"moves\": [\n{}\n  ]\n}}\n", lines.join(",\n"));
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/default.moves.json".into());
    std::fs::write(&path, text).expect("write move file");
    eprintln!("{} moves written to {path}", moves.len());
}
