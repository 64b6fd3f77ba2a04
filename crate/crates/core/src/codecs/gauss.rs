//! Gauss codes: signed over/under visit sequences, with a blank symbol.

use std::collections::BTreeMap;
use std::fmt;

use super::pd::{PlanarDiagram, SLOT_A};
use crate::error::{Error, Result};

/// Component separator in serialized multi-component codes.
pub const SEPARATOR: &str = "|";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GaussToken {
    Blank,
    Visit { over: bool, index: u32, positive: bool },
}

impl GaussToken {
    pub fn over(index: u32, positive: bool) -> Self {
        GaussToken::Visit { over: true, index, positive }
    }

    pub fn under(index: u32, positive: bool) -> Self {
        GaussToken::Visit { over: false, index, positive }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, GaussToken::Blank)
    }

    pub fn index(&self) -> Option<u32> {
        match self {
            GaussToken::Blank => None,
            GaussToken::Visit { index, .. } => Some(*index),
        }
    }

    pub fn with_index(self, new: u32) -> Self {
        match self {
            GaussToken::Blank => self,
            GaussToken::Visit { over, positive, .. } => GaussToken::Visit { over, index: new, positive },
        }
    }
}

impl fmt::Display for GaussToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaussToken::Blank => f.write_str("*"),
            GaussToken::Visit { over, index, positive } => write!(
                f,
                "{}{}{}",
                if *over { 'o' } else { 'u' },
                index,
                if *positive { '+' } else { '-' }
            ),
        }
    }
}

/// Scan tokens; whitespace between tokens is optional.
pub fn scan_tokens(text: &str) -> Result<Vec<GaussToken>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        match ch {
            b'*' => {
                out.push(GaussToken::Blank);
                i += 1;
            }
            b'o' | b'u' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start || j >= bytes.len() || !matches!(bytes[j], b'+' | b'-') {
                    return Err(Error::Parse(format!("malformed gauss token at byte {i}")));
                }
                let index: u32 = text[start..j]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index at byte {start}")))?;
                if index == 0 {
                    return Err(Error::Parse("gauss index must be positive".into()));
                }
                out.push(GaussToken::Visit { over: ch == b'o', index, positive: bytes[j] == b'+' });
                i = j + 1;
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character {:?} at byte {i}",
                    ch as char
                )))
            }
        }
    }
    Ok(out)
}

/// Check sign consistency, and full o/u pairing when the code has no blanks.
pub fn check_tokens(tokens: &[GaussToken], require_pairs: bool) -> Result<()> {
    let mut seen: BTreeMap<u32, (usize, usize, bool)> = BTreeMap::new();
    for tok in tokens {
        if let GaussToken::Visit { over, index, positive } = *tok {
            let entry = seen.entry(index).or_insert((0, 0, positive));
            if entry.2 != positive {
                return Err(Error::Parse(format!("index {index} has mismatched signs")));
            }
            if over {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    if require_pairs {
        if let Some((i, _)) = seen.iter().find(|(_, (o, u, _))| (*o, *u) != (1, 1)) {
            return Err(Error::Parse(format!(
                "index {i} must appear exactly once as o and once as u"
            )));
        }
    }
    Ok(())
}

pub fn parse_gauss(text: &str) -> Result<Vec<GaussToken>> {
    if text.contains(SEPARATOR) {
        return Err(Error::Parse(
            "multi-component code; use parse_gauss_components".into(),
        ));
    }
    let tokens = scan_tokens(text)?;
    let blank_free = tokens.iter().all(|t| !t.is_blank());
    check_tokens(&tokens, blank_free)?;
    Ok(tokens)
}

/// Parse a `|`-separated multi-component code. Pairing is checked across
/// the whole link, since a crossing may join two components.
pub fn parse_gauss_components(text: &str) -> Result<Vec<Vec<GaussToken>>> {
    let parts: Vec<Vec<GaussToken>> = text
        .split(SEPARATOR)
        .map(scan_tokens)
        .collect::<Result<_>>()?;
    let all: Vec<GaussToken> = parts.iter().flatten().copied().collect();
    let blank_free = all.iter().all(|t| !t.is_blank());
    check_tokens(&all, blank_free)?;
    Ok(parts)
}

pub fn format_gauss(tokens: &[GaussToken]) -> String {
    tokens.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn format_gauss_components(parts: &[Vec<GaussToken>]) -> String {
    parts
        .iter()
        .map(|p| format_gauss(p))
        .collect::<Vec<_>>()
        .join(&format!(" {SEPARATOR} "))
}

/// Visits along one component, starting at its lowest arc, as
/// `(crossing, over?)` pairs.
fn visits(pd: &PlanarDiagram, component: usize) -> Vec<(usize, bool)> {
    let (lo, hi) = pd.arc_components()[component];
    (lo..=hi)
        .map(|arc| {
            let (k, slot) = pd.arc_end(arc);
            (k, slot != SLOT_A)
        })
        .collect()
}

/// Gauss code of every component. Crossing indices are assigned by first
/// visit along the components in order.
pub fn pd_to_gauss_all(pd: &PlanarDiagram) -> Vec<Vec<GaussToken>> {
    let mut index: BTreeMap<usize, u32> = BTreeMap::new();
    let mut parts = Vec::new();
    for ci in 0..pd.arc_components().len() {
        let mut part = Vec::new();
        for (k, over) in visits(pd, ci) {
            let next = index.len() as u32 + 1;
            let idx = *index.entry(k).or_insert(next);
            part.push(GaussToken::Visit { over, index: idx, positive: pd.crossing_sign(k) > 0 });
        }
        parts.push(part);
    }
    for _ in 0..pd.free_loops() {
        parts.push(Vec::new());
    }
    parts
}

/// Gauss code of a single component, indices numbered by first visit.
pub fn pd_to_gauss(pd: &PlanarDiagram, component: usize) -> Result<Vec<GaussToken>> {
    if component >= pd.component_count() {
        return Err(Error::Parse(format!(
            "component {component} out of range (diagram has {})",
            pd.component_count()
        )));
    }
    if component >= pd.arc_components().len() {
        return Ok(Vec::new());
    }
    let mut index: BTreeMap<usize, u32> = BTreeMap::new();
    Ok(visits(pd, component)
        .into_iter()
        .map(|(k, over)| {
            let next = index.len() as u32 + 1;
            let idx = *index.entry(k).or_insert(next);
            GaussToken::Visit { over, index: idx, positive: pd.crossing_sign(k) > 0 }
        })
        .collect())
}
