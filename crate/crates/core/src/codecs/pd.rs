//! Planar diagram codes.
//!
//! Each crossing lists four arc labels counterclockwise, starting from the
//! incoming under-strand. Arcs are numbered `1..=2c` consecutively along
//! each component in its direction of travel, so the under-strand always
//! runs from slot `a` to slot `c`. The over-strand runs `b -> d` or
//! `d -> b`; a crossing is positive when it runs `d -> b`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slot positions inside a crossing tuple.
pub const SLOT_A: usize = 0;
pub const SLOT_B: usize = 1;
pub const SLOT_C: usize = 2;
pub const SLOT_D: usize = 3;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PdJson {
    crossings: Vec<[u32; 4]>,
    #[serde(rename = "freeLoops")]
    free_loops: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanarDiagram {
    crossings: Vec<[u32; 4]>,
    free_loops: u32,
    /// Arc ranges `lo..=hi` of the components that meet crossings.
    components: Vec<(u32, u32)>,
    /// For each crossing, whether the over-strand enters at slot `b`.
    over_enters_b: Vec<bool>,
}

impl PlanarDiagram {
    pub fn new(crossings: Vec<[u32; 4]>, free_loops: u32) -> Result<Self> {
        let n_arcs = 2 * crossings.len() as u32;
        let mut count = vec![0u8; n_arcs as usize + 1];
        for cr in &crossings {
            for &lab in cr {
                if lab == 0 || lab > n_arcs {
                    return Err(Error::Parse(format!(
                        "arc label {lab} outside 1..={n_arcs}"
                    )));
                }
                count[lab as usize] += 1;
            }
        }
        if let Some(lab) = (1..=n_arcs).find(|&l| count[l as usize] != 2) {
            return Err(Error::Parse(format!(
                "arc {lab} appears {} times, expected 2",
                count[lab as usize]
            )));
        }

        // Strand continuity a~c, b~d splits arcs into components.
        let mut parent: Vec<u32> = (0..=n_arcs).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for cr in &crossings {
            for (x, y) in [(cr[0], cr[2]), (cr[1], cr[3])] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx as usize] = ry;
            }
        }
        let mut groups: std::collections::BTreeMap<u32, BTreeSet<u32>> = Default::default();
        for lab in 1..=n_arcs {
            let r = find(&mut parent, lab);
            groups.entry(r).or_default().insert(lab);
        }
        let mut components: Vec<(u32, u32)> = Vec::new();
        for set in groups.values() {
            let lo = *set.iter().next().unwrap();
            let hi = *set.iter().next_back().unwrap();
            if (hi - lo + 1) as usize != set.len() {
                return Err(Error::Parse(format!(
                    "component arcs {:?} are not consecutively labeled",
                    set
                )));
            }
            components.push((lo, hi));
        }
        components.sort();

        let mut pd = PlanarDiagram {
            crossings,
            free_loops,
            components,
            over_enters_b: Vec::new(),
        };
        pd.over_enters_b = pd.orient()?;
        Ok(pd)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PdJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.crossings, raw.free_loops)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PdJson {
            crossings: self.crossings.clone(),
            free_loops: self.free_loops,
        })
        .expect("pd serializes")
    }

    pub fn unknot() -> Self {
        Self::new(Vec::new(), 1).expect("valid")
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    /// Arc ranges of the components that pass through crossings.
    pub fn arc_components(&self) -> &[(u32, u32)] {
        &self.components
    }

    /// Total number of link components, free loops included.
    pub fn component_count(&self) -> usize {
        self.components.len() + self.free_loops as usize
    }

    /// Arc following `arc` along its component.
    pub fn next_arc(&self, arc: u32) -> u32 {
        let (lo, hi) = self.component_of(arc);
        if arc == hi {
            lo
        } else {
            arc + 1
        }
    }

    /// Arc range of the component containing `arc`.
    fn component_of(&self, arc: u32) -> (u32, u32) {
        *self
            .components
            .iter()
            .find(|(lo, hi)| (*lo..=*hi).contains(&arc))
            .expect("arc belongs to a component")
    }

    fn orient(&self) -> Result<Vec<bool>> {
        let ends_at_a: BTreeSet<u32> = self.crossings.iter().map(|c| c[SLOT_A]).collect();
        let starts_at_c: BTreeSet<u32> = self.crossings.iter().map(|c| c[SLOT_C]).collect();
        let mut out = Vec::with_capacity(self.crossings.len());
        for (k, cr) in self.crossings.iter().enumerate() {
            let [a, b, c, d] = *cr;
            if self.next_arc(a) != c {
                return Err(Error::Parse(format!(
                    "under-strand {a}->{c} is not consecutive along its component"
                )));
            }
            let fwd = self.next_arc(b) == d;
            let bwd = self.next_arc(d) == b;
            let enters_b = match (fwd, bwd) {
                (true, false) => true,
                (false, true) => false,
                (false, false) => {
                    return Err(Error::Parse(format!(
                        "over-strand {b},{d} is not consecutive along its component"
                    )))
                }
                // Two-arc component: read the direction off the under slots.
                (true, true) => {
                    if ends_at_a.contains(&b) || starts_at_c.contains(&d) {
                        false
                    } else if ends_at_a.contains(&d) || starts_at_c.contains(&b) {
                        true
                    } else {
                        // Over at both of its crossings: the labels fix no
                        // direction, so let the lower arc end at the first
                        // crossing it meets. Either choice is consistent.
                        let (lo, hi) = self.component_of(b);
                        let first = self.crossings.iter().position(|x| x.contains(&lo)).expect("arc is used");
                        let ending = if first == k { lo } else { hi };
                        b == ending
                    }
                }
            };
            out.push(enters_b);
        }
        Ok(out)
    }

    /// Whether the over-strand of crossing `k` enters at slot `b`.
    pub fn over_enters_b(&self, k: usize) -> bool {
        self.over_enters_b[k]
    }

    /// `+1` or `-1`.
    pub fn crossing_sign(&self, k: usize) -> i32 {
        if self.over_enters_b[k] {
            -1
        } else {
            1
        }
    }

    pub fn writhe(&self) -> i64 {
        (0..self.crossings.len())
            .map(|k| self.crossing_sign(k) as i64)
            .sum()
    }

    /// Positive and negative crossing counts.
    pub fn sign_counts(&self) -> (usize, usize) {
        let pos = (0..self.crossings.len())
            .filter(|&k| self.crossing_sign(k) > 0)
            .count();
        (pos, self.crossings.len() - pos)
    }

    /// `(crossing, slot)` where `arc` ends.
    pub fn arc_end(&self, arc: u32) -> (usize, usize) {
        for (k, cr) in self.crossings.iter().enumerate() {
            if cr[SLOT_A] == arc {
                return (k, SLOT_A);
            }
            let slot = if self.over_enters_b[k] { SLOT_B } else { SLOT_D };
            if cr[slot] == arc {
                return (k, slot);
            }
        }
        unreachable!("every arc ends at some crossing")
    }

    /// Exchange over and under at every crossing.
    pub fn mirror(&self) -> PlanarDiagram {
        let crossings = self
            .crossings
            .iter()
            .zip(&self.over_enters_b)
            .map(|(&[a, b, c, d], &enters_b)| if enters_b { [b, c, d, a] } else { [d, a, b, c] })
            .collect();
        PlanarDiagram::new(crossings, self.free_loops).expect("mirror of a valid diagram is valid")
    }

    /// Disjoint union with one more unknotted circle.
    pub fn with_extra_circle(&self) -> PlanarDiagram {
        let mut out = self.clone();
        out.free_loops += 1;
        out
    }

    /// Remove one component. Indices `0..arc_components().len()` name the
    /// components that meet crossings; larger indices name free loops.
    pub fn delete_component(&self, index: usize) -> Result<PlanarDiagram> {
        let nc = self.components.len();
        if index >= self.component_count() {
            return Err(Error::Parse(format!(
                "component {index} out of range (diagram has {})",
                self.component_count()
            )));
        }
        if index >= nc {
            return PlanarDiagram::new(self.crossings.clone(), self.free_loops - 1);
        }
        let (dlo, dhi) = self.components[index];
        let doomed = |arc: u32| (dlo..=dhi).contains(&arc);
        let keep: Vec<bool> = self
            .crossings
            .iter()
            .map(|cr| !cr.iter().any(|&a| doomed(a)))
            .collect();
        // crossing at which each arc ends
        let mut end_crossing = vec![0usize; 2 * self.crossings.len() + 1];
        for arc in 1..=2 * self.crossings.len() as u32 {
            end_crossing[arc as usize] = self.arc_end(arc).0;
        }

        let mut relabel = vec![0u32; 2 * self.crossings.len() + 1];
        let mut next_label = 1u32;
        let mut free = self.free_loops;
        for (ci, &(lo, hi)) in self.components.iter().enumerate() {
            if ci == index {
                continue;
            }
            let arcs: Vec<u32> = (lo..=hi).collect();
            let m = arcs.len();
            // start after a surviving crossing
            let start = (0..m).find(|&i| {
                let prev = arcs[(i + m - 1) % m];
                keep[end_crossing[prev as usize]]
            });
            let Some(start) = start else {
                free += 1;
                continue;
            };
            let mut label = next_label;
            for step in 0..m {
                let arc = arcs[(start + step) % m];
                if step > 0 {
                    let prev = arcs[(start + step + m - 1) % m];
                    if keep[end_crossing[prev as usize]] {
                        label += 1;
                    }
                }
                relabel[arc as usize] = label;
            }
            next_label = label + 1;
        }
        let crossings = self
            .crossings
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(cr, _)| cr.map(|a| relabel[a as usize]))
            .collect();
        PlanarDiagram::new(crossings, free)
    }
}
