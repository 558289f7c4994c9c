//! Isomorph-free generation of incidence structures with a given signature.
//!
//! Points are pre-assigned their target valences (as colors) and lines are
//! added one at a time, in blocks of equal size taken in decreasing order.
//! Candidate lines are reduced to one per orbit of the parent's automorphism
//! group, and a child `C + l` is kept only when `l` lies in the orbit of the
//! child's distinguished line: among the lines of the current block with the
//! largest cheap invariant, the one placed last by the canonical labeling.
//! Every isomorphism class is then reached exactly once.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::canon::{label_masks, relabeled_lines, CanonicalForm, Labeling};
use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::structure::IncidenceStructure;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub nodes: u64,
    pub candidates: u64,
    pub canon_calls: u64,
}

struct Enumerator {
    valence: Vec<u32>,
    blocks: Vec<(usize, usize)>,
    point_colors: Vec<u32>,
    connected_only: bool,
    keep_structures: bool,
    found: HashMap<CanonicalForm, Option<IncidenceStructure>>,
    stats: EnumerationStats,
}

struct State {
    lines: Vec<u64>,
    sizes: Vec<u32>,
    deg: Vec<u32>,
    collinear: Vec<u64>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

impl State {
    fn index_lines(&self) -> Vec<Vec<usize>> {
        self.lines.iter().map(|&m| bits(m).collect()).collect()
    }

    fn push(&mut self, mask: u64, size: u32) {
        self.lines.push(mask);
        self.sizes.push(size);
        for p in bits(mask) {
            self.deg[p] += 1;
            self.collinear[p] |= mask & !(1u64 << p);
        }
    }

    /// Undoes the last `push`. Two lines share at most one point, so the
    /// pairs covered by the removed line were covered by no other line.
    fn pop(&mut self) {
        let mask = self.lines.pop().expect("pop after push");
        self.sizes.pop();
        for p in bits(mask) {
            self.deg[p] -= 1;
            self.collinear[p] &= !mask;
        }
    }
}

impl Enumerator {
    fn np(&self) -> usize {
        self.valence.len()
    }

    fn label(&self, st: &State) -> crate::canon::Labeling {
        label_masks(self.np(), &st.lines, &self.point_colors, &st.sizes)
    }

    fn remaining(&self, block: usize, placed: usize) -> Vec<(usize, usize)> {
        let mut r = Vec::new();
        if block < self.blocks.len() {
            let (k, c) = self.blocks[block];
            if c > placed {
                r.push((k, c - placed));
            }
            r.extend(self.blocks[block + 1..].iter().copied());
        }
        r
    }

    /// Necessary conditions for completing `st` with the remaining lines.
    fn feasible(&self, st: &State, remaining: &[(usize, usize)]) -> bool {
        let total: usize = remaining.iter().map(|&(_, c)| c).sum();
        let Some(s_min) = remaining.iter().map(|&(k, _)| k).min() else {
            return true;
        };
        let s_max = remaining.iter().map(|&(k, _)| k).max().unwrap();
        let open: u64 = (0..self.np())
            .filter(|&p| st.deg[p] < self.valence[p])
            .fold(0, |m, p| m | (1 << p));
        if (open.count_ones() as usize) < s_max {
            return false;
        }
        let mut deficits: Vec<usize> = Vec::with_capacity(open.count_ones() as usize);
        let mut free_pairs = 0;
        for p in bits(open) {
            let d = (self.valence[p] - st.deg[p]) as usize;
            if d > total {
                return false;
            }
            let free = (open & !st.collinear[p] & !(1 << p)).count_ones() as usize;
            if s_min >= 2 && d * (s_min - 1) > free {
                return false;
            }
            free_pairs += free;
            deficits.push(d);
        }
        // each remaining line needs its point pairs to be fresh
        let needed: usize = remaining.iter().map(|&(k, c)| c * k * k.saturating_sub(1) / 2).sum();
        if needed > free_pairs / 2 {
            return false;
        }
        // the residual degrees must still be bipartite-graphical
        deficits.sort_unstable_by(|a, b| b.cmp(a));
        let mut head = 0;
        for (t, &d) in deficits.iter().enumerate() {
            head += d;
            let room: usize = remaining.iter().map(|&(k, c)| c * k.min(t + 1)).sum();
            if head > room {
                return false;
            }
        }
        true
    }

    fn candidates(&self, st: &State, k: usize) -> Vec<u64> {
        let open: u64 = (0..self.np())
            .filter(|&p| st.deg[p] < self.valence[p])
            .fold(0, |m, p| m | (1 << p));
        let mut out = Vec::new();
        fn rec(st: &State, avail: u64, chosen: u64, left: usize, out: &mut Vec<u64>) {
            if left == 0 {
                out.push(chosen);
                return;
            }
            if (avail.count_ones() as usize) < left {
                return;
            }
            for p in bits(avail) {
                let higher = if p == 63 { 0 } else { avail & (!0u64 << (p + 1)) };
                rec(st, higher & !st.collinear[p], chosen | (1 << p), left - 1, out);
            }
        }
        rec(st, open, 0, k, &mut out);
        out
    }

    /// Whether `mask` is the smallest set in its orbit under the point action
    /// of the given automorphisms.
    fn orbit_minimal(&self, mask: u64, gens: &[Vec<usize>], seen: &mut Vec<u64>) -> bool {
        if gens.is_empty() {
            return true;
        }
        // generators act on points first, so indices below 64 suffice
        let image = |g: &Vec<usize>, m: u64| bits(m).fold(0u64, |acc, p| acc | (1 << g[p]));
        seen.clear();
        seen.push(mask);
        let mut next = 0;
        while next < seen.len() {
            let m = seen[next];
            next += 1;
            for g in gens {
                let im = image(g, m);
                if im < mask {
                    return false;
                }
                if !seen.contains(&im) {
                    seen.push(im);
                }
            }
        }
        true
    }

    fn connected(&self, st: &State) -> bool {
        let np = self.np();
        if np == 0 {
            return st.lines.len() <= 1;
        }
        if st.lines.iter().any(|&m| m == 0) || st.deg.iter().any(|&d| d == 0) {
            return np + st.lines.len() == 1;
        }
        let mut reach: u64 = 1;
        loop {
            let next = st
                .lines
                .iter()
                .filter(|&&m| m & reach != 0)
                .fold(reach, |acc, &m| acc | m);
            if next == reach {
                break;
            }
            reach = next;
        }
        reach.count_ones() as usize == np
    }

    fn emit(&mut self, st: &State, lab: Option<Labeling>) {
        if self.connected_only && !self.connected(st) {
            return;
        }
        let lab = lab.unwrap_or_else(|| self.label(st));
        let form = lab.form();
        if !self.found.contains_key(&form) {
            let s = self.keep_structures.then(|| {
                IncidenceStructure::numbered(self.np(), &relabeled_lines(&st.index_lines(), &lab))
                    .expect("generated structures satisfy the girth bound")
            });
            self.found.insert(form, s);
        }
    }

    fn extend(&mut self, st: &mut State, lab: Option<Labeling>, block: usize, placed: usize) {
        self.stats.nodes += 1;
        if block == self.blocks.len() {
            self.emit(st, lab);
            return;
        }
        let (k, count) = self.blocks[block];
        if placed == count {
            self.extend(st, lab, block + 1, 0);
            return;
        }
        let parent = lab.unwrap_or_else(|| {
            self.stats.canon_calls += 1;
            self.label(st)
        });
        let mut seen = Vec::new();
        let remaining = self.remaining(block, placed + 1);
        for mask in self.candidates(st, k) {
            self.stats.candidates += 1;
            if !self.orbit_minimal(mask, &parent.automorphisms, &mut seen) {
                continue;
            }
            st.push(mask, k as u32);
            if self.feasible(st, &remaining) {
                if let Some(child_lab) = self.accept(st) {
                    self.extend(st, child_lab, block, placed + 1);
                }
            }
            st.pop();
        }
    }

    fn line_invariant(&self, st: &State, j: usize) -> u64 {
        bits(st.lines[j])
            .map(|p| mix(u64::from(st.deg[p]) << 32 | u64::from(self.point_colors[p])))
            .fold(0u64, u64::wrapping_add)
    }

    /// Canonicity test for the newest line. `None` rejects the child;
    /// otherwise carries the child's labeling when one was needed.
    fn accept(&mut self, child: &State) -> Option<Option<Labeling>> {
        let new = child.lines.len() - 1;
        let k = child.sizes[new];
        let block: Vec<usize> = (0..child.lines.len()).filter(|&j| child.sizes[j] == k).collect();
        if block.len() == 1 {
            return Some(None);
        }
        let inv: Vec<u64> = block.iter().map(|&j| self.line_invariant(child, j)).collect();
        let top = *inv.iter().max().expect("block is non-empty");
        if inv[inv.len() - 1] < top {
            return None;
        }
        let tied: Vec<usize> = block
            .iter()
            .zip(&inv)
            .filter(|&(_, &v)| v == top)
            .map(|(&j, _)| j)
            .collect();
        if tied.len() == 1 {
            return Some(None);
        }
        self.stats.canon_calls += 1;
        let lab = self.label(child);
        let last = *tied
            .iter()
            .max_by_key(|&&j| lab.line_pos[j])
            .expect("tied is non-empty");
        let np = self.np();
        if last == new || same_orbit(&lab.automorphisms, np + new, np + last) {
            Some(Some(lab))
        } else {
            None
        }
    }
}

fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn same_orbit(gens: &[Vec<usize>], a: usize, b: usize) -> bool {
    let mut seen = HashSet::from([a]);
    let mut stack = vec![a];
    while let Some(v) = stack.pop() {
        for g in gens {
            let w = g[v];
            if w == b {
                return true;
            }
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    false
}

/// Cheap necessary conditions: a simple bipartite graph with these degrees
/// exists (Gale-Ryser), and no two points (or lines) are joined twice.
fn admits_structure(sig: &Signature) -> bool {
    let (pc, lc) = (sig.point_counts(), sig.line_counts());
    let pairs = |m: &BTreeMap<usize, usize>| {
        m.iter().map(|(&k, &c)| c * k * k.saturating_sub(1) / 2).sum::<usize>()
    };
    // isolated points and empty lines cannot carry a pair
    let np: usize = pc.range(1..).map(|(_, &c)| c).sum();
    let nl: usize = lc.range(1..).map(|(_, &c)| c).sum();
    if pairs(lc) > np * np.saturating_sub(1) / 2 || pairs(pc) > nl * nl.saturating_sub(1) / 2 {
        return false;
    }
    let mut head = 0;
    let mut t = 0;
    for (&v, &c) in pc.iter().rev() {
        for _ in 0..c {
            head += v;
            t += 1;
            if head > lc.iter().map(|(&l, &m)| m * l.min(t)).sum::<usize>() {
                return false;
            }
        }
    }
    true
}

/// All structures with the given signature, one per isomorphism class,
/// sorted by canonical form. Each is returned in canonical labeling with
/// ids `p0..` and `l0..`.
pub fn enumerate(sig: &Signature, connected_only: bool) -> Result<Vec<IncidenceStructure>> {
    Ok(enumerate_with_stats(sig, connected_only)?.0)
}

fn run(
    sig: &Signature,
    connected_only: bool,
    keep_structures: bool,
) -> Result<(Vec<(CanonicalForm, Option<IncidenceStructure>)>, EnumerationStats)> {
    if sig.incidences() != sig.dual().incidences() {
        return Err(Error::InconsistentSignature {
            points: sig.incidences(),
            lines: sig.dual().incidences(),
        });
    }
    let np = sig.num_points();
    if np > 64 {
        return Err(Error::Precondition(format!(
            "enumeration supports at most 64 points, got {np}"
        )));
    }
    if !admits_structure(sig) {
        return Ok((Vec::new(), EnumerationStats::default()));
    }
    let mut valence: Vec<u32> = Vec::with_capacity(np);
    for (&v, &c) in sig.point_counts().iter().rev() {
        valence.extend(std::iter::repeat(v as u32).take(c));
    }
    let blocks: Vec<(usize, usize)> = sig
        .line_counts()
        .iter()
        .rev()
        .map(|(&k, &c)| (k, c))
        .collect();
    let mut e = Enumerator {
        point_colors: valence.clone(),
        valence,
        blocks,
        connected_only,
        keep_structures,
        found: HashMap::new(),
        stats: EnumerationStats::default(),
    };
    let mut root = State {
        lines: Vec::new(),
        sizes: Vec::new(),
        deg: vec![0; np],
        collinear: vec![0; np],
    };
    let remaining = e.remaining(0, 0);
    if e.feasible(&root, &remaining) {
        e.extend(&mut root, None, 0, 0);
    }
    let mut out: Vec<_> = e.found.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((out, e.stats))
}

pub fn enumerate_with_stats(
    sig: &Signature,
    connected_only: bool,
) -> Result<(Vec<IncidenceStructure>, EnumerationStats)> {
    let (found, stats) = run(sig, connected_only, true)?;
    let structures = found
        .into_iter()
        .map(|(_, s)| s.expect("structures are kept"))
        .collect();
    Ok((structures, stats))
}

/// Canonical forms of all classes with the given signature, sorted. Agrees
/// with `canonical_form` applied to each result of `enumerate`.
pub fn canonical_forms(sig: &Signature, connected_only: bool) -> Result<Vec<CanonicalForm>> {
    Ok(run(sig, connected_only, false)?.0.into_iter().map(|(f, _)| f).collect())
}

pub fn count(sig: &Signature, connected_only: bool) -> Result<usize> {
    Ok(run(sig, connected_only, false)?.0.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_small_configurations() {
        assert_eq!(count(&Signature::regular(7, 3), false).unwrap(), 1);
        assert_eq!(count(&Signature::regular(8, 3), false).unwrap(), 1);
    }

    #[test]
    fn too_few_points() {
        for n in 1..7 {
            assert_eq!(count(&Signature::regular(n, 3), false).unwrap(), 0, "n={n}");
        }
    }

    #[test]
    fn nine_and_ten() {
        assert_eq!(count(&Signature::regular(9, 3), false).unwrap(), 3);
        assert_eq!(count(&Signature::regular(10, 3), false).unwrap(), 10);
    }

    #[test]
    fn output_is_canonical_and_sorted() {
        let out = enumerate(&Signature::regular(9, 3), false).unwrap();
        let forms: Vec<_> = out.iter().map(crate::canon::canonical_form).collect();
        let mut sorted = forms.clone();
        sorted.sort();
        assert_eq!(forms, sorted);
        for s in &out {
            assert!(s.is_k_configuration(3));
        }
    }

    #[test]
    fn necessary_conditions() {
        // (6_3) would need 18 point pairs among 15
        assert!(!admits_structure(&Signature::regular(6, 3)));
        assert!(admits_structure(&Signature::regular(7, 3)));
        // a 3-valent point with only two lines fails Gale-Ryser
        let sig = Signature::new([(3, 1), (0, 1)], [(2, 1), (1, 1)]).unwrap();
        assert!(!admits_structure(&sig));
    }

    #[test]
    fn degenerate_valences() {
        // two points on one line, plus an isolated line
        let sig = Signature::new([(1, 2)], [(2, 1), (0, 1)]).unwrap();
        assert_eq!(count(&sig, false).unwrap(), 1);
        assert_eq!(count(&sig, true).unwrap(), 0);
        // one point on two lines that carry nothing else
        let sig = Signature::new([(2, 1)], [(1, 2)]).unwrap();
        assert_eq!(count(&sig, true).unwrap(), 1);
    }
}
