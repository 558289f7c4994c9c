//! Subconfiguration search: injective embeddings with exact induced
//! incidences.

use serde::Serialize;

use crate::structure::IncidenceStructure;

/// How incidences must correspond under an embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedMode {
    /// Incidence holds in the pattern iff it holds between the images.
    Induced,
    /// Pattern incidences map to host incidences; the image may carry more.
    Weak,
}

/// Pattern element ids paired with their images in the host.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Embedding {
    pub points: Vec<(String, String)>,
    pub lines: Vec<(String, String)>,
}

struct Search<'a> {
    host: &'a IncidenceStructure,
    pat: &'a IncidenceStructure,
    order: Vec<usize>,
    fp: Vec<usize>,
    gl: Vec<usize>,
    used_p: Vec<bool>,
    used_l: Vec<bool>,
    limit: usize,
    mode: EmbedMode,
    out: Vec<(Vec<usize>, Vec<usize>)>,
}

const UNSET: usize = usize::MAX;

impl Search<'_> {
    fn agrees(&self, pattern: bool, host: bool) -> bool {
        match self.mode {
            EmbedMode::Induced => pattern == host,
            EmbedMode::Weak => !pattern || host,
        }
    }

    fn point_ok(&self, p: usize, x: usize) -> bool {
        if self.host.point_valence(x) < self.pat.point_valence(p) {
            return false;
        }
        for &q in &self.order {
            let y = self.fp[q];
            if y == UNSET || q == p {
                continue;
            }
            match (self.pat.common_line(p, q), self.host.common_line(x, y)) {
                (Some(_), None) => return false,
                (Some(l), Some(m)) => {
                    // the image line is pinned; every mapped point must agree
                    for &r in &self.order {
                        let z = self.fp[r];
                        if z == UNSET {
                            continue;
                        }
                        if !self.agrees(self.pat.is_incident(r, l), self.host.is_incident(z, m)) {
                            return false;
                        }
                    }
                    if !self.agrees(self.pat.is_incident(p, l), self.host.is_incident(x, m)) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn assign_points(&mut self, k: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        if k == self.order.len() {
            self.assign_lines(0);
            return;
        }
        let p = self.order[k];
        for x in 0..self.host.num_points() {
            if self.used_p[x] || !self.point_ok(p, x) {
                continue;
            }
            self.fp[p] = x;
            self.used_p[x] = true;
            self.assign_points(k + 1);
            self.used_p[x] = false;
            self.fp[p] = UNSET;
        }
    }

    fn line_ok(&self, l: usize, m: usize) -> bool {
        if self.host.line_valence(m) < self.pat.line_valence(l) {
            return false;
        }
        (0..self.pat.num_points())
            .all(|p| self.agrees(self.pat.is_incident(p, l), self.host.is_incident(self.fp[p], m)))
    }

    fn assign_lines(&mut self, l: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        if l == self.pat.num_lines() {
            self.out.push((self.fp.clone(), self.gl.clone()));
            return;
        }
        let pts = self.pat.points_on(l);
        let candidates: Vec<usize> = if pts.len() >= 2 {
            self.host
                .common_line(self.fp[pts[0]], self.fp[pts[1]])
                .into_iter()
                .collect()
        } else {
            (0..self.host.num_lines()).collect()
        };
        for m in candidates {
            if self.used_l[m] || !self.line_ok(l, m) {
                continue;
            }
            self.gl[l] = m;
            self.used_l[m] = true;
            self.assign_lines(l + 1);
            self.used_l[m] = false;
            self.gl[l] = UNSET;
        }
    }
}

/// Point order in which each point after the first is, when possible,
/// collinear with an earlier one.
fn connected_order(pat: &IncidenceStructure) -> Vec<usize> {
    let n = pat.num_points();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let start = (0..n)
            .filter(|&p| !placed[p])
            .max_by_key(|&p| (pat.point_valence(p), std::cmp::Reverse(p)))
            .unwrap();
        placed[start] = true;
        order.push(start);
        let mut k = order.len() - 1;
        while k < order.len() {
            let p = order[k];
            for &l in pat.lines_through(p) {
                for &q in pat.points_on(l) {
                    if !placed[q] {
                        placed[q] = true;
                        order.push(q);
                    }
                }
            }
            k += 1;
        }
    }
    order
}

/// Embeddings of `pattern` into `host`, at most `limit` of them, in
/// lexicographic order of the point images.
pub fn find_embeddings(
    host: &IncidenceStructure,
    pattern: &IncidenceStructure,
    mode: EmbedMode,
    limit: usize,
) -> Vec<Embedding> {
    if pattern.num_points() > host.num_points() || pattern.num_lines() > host.num_lines() {
        return Vec::new();
    }
    let mut s = Search {
        host,
        pat: pattern,
        order: connected_order(pattern),
        fp: vec![UNSET; pattern.num_points()],
        gl: vec![UNSET; pattern.num_lines()],
        used_p: vec![false; host.num_points()],
        used_l: vec![false; host.num_lines()],
        limit,
        mode,
        out: Vec::new(),
    };
    s.assign_points(0);
    s.out
        .into_iter()
        .map(|(fp, gl)| Embedding {
            points: fp
                .iter()
                .enumerate()
                .map(|(p, &x)| (pattern.point_ids()[p].clone(), host.point_ids()[x].clone()))
                .collect(),
            lines: gl
                .iter()
                .enumerate()
                .map(|(l, &m)| (pattern.line_ids()[l].clone(), host.line_ids()[m].clone()))
                .collect(),
        })
        .collect()
}

/// All embeddings of `pattern` into `host`.
pub fn contains_subconfiguration(
    host: &IncidenceStructure,
    pattern: &IncidenceStructure,
) -> Vec<Embedding> {
    find_embeddings(host, pattern, EmbedMode::Induced, usize::MAX)
}

pub fn embeds(host: &IncidenceStructure, pattern: &IncidenceStructure) -> bool {
    !find_embeddings(host, pattern, EmbedMode::Induced, 1).is_empty()
}

pub fn embeds_weakly(host: &IncidenceStructure, pattern: &IncidenceStructure) -> bool {
    !find_embeddings(host, pattern, EmbedMode::Weak, 1).is_empty()
}
