//! Canonical labeling of incidence structures.
//!
//! The incidence graph is treated as a vertex-colored graph (points and lines
//! in separate color classes) and labeled by individualization-refinement:
//! equitable partition refinement, branching on the first smallest
//! non-singleton cell, and pruning with automorphisms discovered at
//! equivalent leaves.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::structure::IncidenceStructure;

/// Canonical serialization: equal iff the structures are isomorphic by a
/// relabeling that maps points to points and lines to lines.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn from_cert(cert: &[u32]) -> Self {
        Self {
            bytes: cert.iter().flat_map(|w| w.to_be_bytes()).collect(),
        }
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// Result of labeling a colored incidence graph.
#[derive(Clone, Debug)]
pub(crate) struct Labeling {
    /// Canonical position of each point (positions `0..np`).
    pub point_pos: Vec<usize>,
    /// Canonical position of each line (positions `0..nl`).
    pub line_pos: Vec<usize>,
    pub cert: Vec<u32>,
    /// Automorphisms found during the search, as vertex permutations
    /// (points `0..np`, lines `np..np+nl`). They generate the full group.
    pub automorphisms: Vec<Vec<usize>>,
}

impl Labeling {
    pub fn form(&self) -> CanonicalForm {
        CanonicalForm::from_cert(&self.cert)
    }
}

#[derive(Default)]
struct Partition {
    lab: Vec<usize>,
    pos: Vec<usize>,
    start_of: Vec<usize>,
    // end of the cell starting at each start position
    end: Vec<usize>,
    cells: usize,
}

impl Partition {
    fn copy_from(&mut self, other: &Partition) {
        self.lab.clone_from(&other.lab);
        self.pos.clone_from(&other.pos);
        self.start_of.clone_from(&other.start_of);
        self.end.clone_from(&other.end);
        self.cells = other.cells;
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn target_cell(&self) -> Option<usize> {
        let n = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0;
        while s < n {
            let e = self.end[s];
            let size = e - s;
            if size > 1 && best.map_or(true, |(_, b)| size < b) {
                best = Some((s, size));
            }
            s = e;
        }
        best.map(|(s, _)| s)
    }

    /// Moves `v` to the front of its cell and makes it a singleton.
    fn individualize(&mut self, v: usize) -> usize {
        let s = self.start_of[v];
        let e = self.end[s];
        let p = self.pos[v];
        let u = self.lab[s];
        self.lab.swap(s, p);
        self.pos[u] = p;
        self.pos[v] = s;
        self.end[s] = s + 1;
        self.end[s + 1] = e;
        for q in s + 1..e {
            self.start_of[self.lab[q]] = s + 1;
        }
        self.cells += 1;
        s
    }
}

/// Incidence graph in compressed adjacency form: points `0..np`, then lines.
#[derive(Default)]
struct Graph {
    np: usize,
    off: Vec<usize>,
    nbr: Vec<usize>,
    colors: Vec<u32>,
}

#[derive(Default)]
struct Scratch {
    count: Vec<u32>,
    in_queue: Vec<bool>,
    queue: VecDeque<usize>,
    touched: Vec<usize>,
    touched_cells: Vec<usize>,
    edges: Vec<(u32, u32)>,
    cert: Vec<u32>,
    starts: Vec<usize>,
}

impl Graph {
    fn load<L, I>(&mut self, np: usize, lines: L, point_colors: &[u32], line_colors: &[u32])
    where
        L: Iterator<Item = I> + Clone,
        I: Iterator<Item = usize>,
    {
        self.np = np;
        self.colors.clear();
        self.colors.extend_from_slice(point_colors);
        self.colors.extend_from_slice(line_colors);
        let n = self.colors.len();
        self.off.clear();
        self.off.resize(n + 1, 0);
        for (j, pts) in lines.clone().enumerate() {
            for p in pts {
                self.off[p + 1] += 1;
                self.off[np + j + 1] += 1;
            }
        }
        for v in 0..n {
            self.off[v + 1] += self.off[v];
        }
        self.nbr.clear();
        self.nbr.resize(self.off[n], 0);
        // off[v] doubles as the fill cursor, then is shifted back
        for (j, pts) in lines.enumerate() {
            for p in pts {
                self.nbr[self.off[p]] = np + j;
                self.off[p] += 1;
                self.nbr[self.off[np + j]] = p;
                self.off[np + j] += 1;
            }
        }
        for v in (1..=n).rev() {
            self.off[v] = self.off[v - 1];
        }
        self.off[0] = 0;
    }

    fn n(&self) -> usize {
        self.colors.len()
    }

    fn adj(&self, v: usize) -> &[usize] {
        &self.nbr[self.off[v]..self.off[v + 1]]
    }

    fn initial_partition(&self, part: &mut Partition, header: &mut Vec<u32>) {
        let n = self.n();
        let key = |v: usize| (v >= self.np, self.colors[v]);
        part.lab.clear();
        part.lab.extend(0..n);
        // points before lines, then by color
        part.lab.sort_by_key(|&v| (key(v), v));
        part.pos.resize(n, 0);
        part.start_of.resize(n, 0);
        part.end.resize(n, 0);
        header.clear();
        part.cells = 0;
        let mut s = 0;
        while s < n {
            let k = key(part.lab[s]);
            let mut e = s;
            while e < n && key(part.lab[e]) == k {
                e += 1;
            }
            for q in s..e {
                part.pos[part.lab[q]] = q;
                part.start_of[part.lab[q]] = s;
            }
            part.end[s] = e;
            header.extend([k.0 as u32, k.1, (e - s) as u32]);
            part.cells += 1;
            s = e;
        }
    }

    /// Refines `part` to the coarsest equitable partition finer than it,
    /// starting from the splitter cells in `sc.starts`.
    fn refine(&self, part: &mut Partition, sc: &mut Scratch) {
        let Scratch {
            count,
            in_queue,
            queue,
            touched,
            touched_cells,
            starts,
            ..
        } = sc;
        for &s in starts.iter() {
            if !in_queue[s] {
                in_queue[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(ws) = queue.pop_front() {
            in_queue[ws] = false;
            if part.is_discrete() {
                continue;
            }
            let we = part.end[ws];
            touched.clear();
            for q in ws..we {
                for &u in self.adj(part.lab[q]) {
                    if count[u] == 0 {
                        touched.push(u);
                    }
                    count[u] += 1;
                }
            }
            touched_cells.clear();
            touched_cells.extend(touched.iter().map(|&u| part.start_of[u]));
            touched_cells.sort_unstable();
            touched_cells.dedup();
            for &s in touched_cells.iter() {
                let e = part.end[s];
                if e - s == 1 {
                    continue;
                }
                part.lab[s..e].sort_by_key(|&v| count[v]);
                if count[part.lab[s]] == count[part.lab[e - 1]] {
                    continue;
                }
                let mut frag = s;
                for q in s..e {
                    let v = part.lab[q];
                    part.pos[v] = q;
                    if q > s && count[v] != count[part.lab[q - 1]] {
                        part.end[frag] = q;
                        frag = q;
                        part.cells += 1;
                    }
                    part.start_of[v] = frag;
                }
                part.end[frag] = e;
                let mut f = s;
                while f < e {
                    if !in_queue[f] {
                        in_queue[f] = true;
                        queue.push_back(f);
                    }
                    f = part.end[f];
                }
            }
            for &u in touched.iter() {
                count[u] = 0;
            }
        }
    }

    /// Writes the certificate of a discrete partition into `sc.cert`.
    fn leaf_cert(&self, header: &[u32], part: &Partition, sc: &mut Scratch) {
        let np = self.np;
        sc.edges.clear();
        for p in 0..np {
            for &l in self.adj(p) {
                sc.edges.push((part.pos[p] as u32, (part.pos[l] - np) as u32));
            }
        }
        sc.edges.sort_unstable();
        sc.cert.clear();
        sc.cert.push(np as u32);
        sc.cert.push((self.n() - np) as u32);
        sc.cert.push(header.len() as u32);
        sc.cert.extend_from_slice(header);
        for &(a, b) in &sc.edges {
            sc.cert.push(a);
            sc.cert.push(b);
        }
    }
}

#[derive(Default)]
struct Leaf {
    cert: Vec<u32>,
    lab: Vec<usize>,
    path: Vec<usize>,
}

impl Leaf {
    fn store(&mut self, cert: &[u32], lab: &[usize], path: &[usize]) {
        self.cert.clear();
        self.cert.extend_from_slice(cert);
        self.lab.clear();
        self.lab.extend_from_slice(lab);
        self.path.clear();
        self.path.extend_from_slice(path);
    }
}

/// Per-depth buffers of the search.
#[derive(Default)]
struct NodeBuf {
    cell: Vec<usize>,
    explored: Vec<usize>,
    orbits: Vec<usize>,
}

/// Buffers reused across labeling calls on one thread.
#[derive(Default)]
struct Workspace {
    g: Graph,
    header: Vec<u32>,
    sc: Scratch,
    pool: Vec<Partition>,
    nodes: Vec<NodeBuf>,
    first: Leaf,
    best: Leaf,
    path: Vec<usize>,
}

thread_local! {
    static WORKSPACE: RefCell<Workspace> = RefCell::new(Workspace::default());
}

struct Search<'w> {
    g: &'w Graph,
    header: &'w [u32],
    sc: &'w mut Scratch,
    pool: &'w mut Vec<Partition>,
    nodes: &'w mut Vec<NodeBuf>,
    first: &'w mut Leaf,
    best: &'w mut Leaf,
    have_first: bool,
    automorphisms: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    fn orbits_fixing(&self, path: &[usize], out: &mut Vec<usize>) {
        let n = self.g.n();
        out.clear();
        out.extend(0..n);
        for gamma in &self.automorphisms {
            if path.iter().all(|&x| gamma[x] == x) {
                for v in 0..n {
                    let (a, b) = (find(out, v), find(out, gamma[v]));
                    if a != b {
                        out[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        for v in 0..n {
            let r = find(out, v);
            out[v] = r;
        }
    }

    fn record_automorphism(&mut self, from_first: bool, depth: usize) {
        let from = if from_first { &self.first.lab } else { &self.best.lab };
        let part = &self.pool[depth];
        let gamma: Vec<usize> = (0..self.g.n()).map(|v| from[part.pos[v]]).collect();
        if gamma.iter().enumerate().any(|(v, &w)| v != w) && !self.automorphisms.contains(&gamma) {
            self.automorphisms.push(gamma);
        }
    }

    /// Explores the subtree below the partition at `depth`. Returns a depth
    /// to jump back to when an equivalent leaf was found.
    fn search(&mut self, depth: usize, path: &mut Vec<usize>) -> Option<usize> {
        if self.pool[depth].is_discrete() {
            return self.visit_leaf(depth, path);
        }
        if self.pool.len() == depth + 1 {
            self.pool.push(Partition::default());
        }
        if self.nodes.len() == depth {
            self.nodes.push(NodeBuf::default());
        }
        let mut nb = std::mem::take(&mut self.nodes[depth]);
        let part = &self.pool[depth];
        let s = part.target_cell().expect("non-discrete partition has a target");
        nb.cell.clear();
        nb.cell.extend_from_slice(&part.lab[s..part.end[s]]);
        nb.cell.sort_unstable();
        nb.explored.clear();
        let mut known = usize::MAX;
        let mut result = None;
        for i in 0..nb.cell.len() {
            let v = nb.cell[i];
            if known != self.automorphisms.len() {
                self.orbits_fixing(path, &mut nb.orbits);
                known = self.automorphisms.len();
            }
            if nb.explored.iter().any(|&u| nb.orbits[u] == nb.orbits[v]) {
                continue;
            }
            nb.explored.push(v);
            let (lo, hi) = self.pool.split_at_mut(depth + 1);
            let child = &mut hi[0];
            child.copy_from(&lo[depth]);
            let single = child.individualize(v);
            self.sc.starts.clear();
            self.sc.starts.push(single);
            self.g.refine(child, self.sc);
            path.push(v);
            let jump = self.search(depth + 1, path);
            path.pop();
            if let Some(d) = jump {
                if d < depth {
                    result = Some(d);
                    break;
                }
            }
        }
        self.nodes[depth] = nb;
        result
    }

    fn visit_leaf(&mut self, depth: usize, path: &[usize]) -> Option<usize> {
        self.g.leaf_cert(self.header, &self.pool[depth], self.sc);
        if !self.have_first {
            self.first.store(&self.sc.cert, &self.pool[depth].lab, path);
            self.best.store(&self.sc.cert, &self.pool[depth].lab, path);
            self.have_first = true;
            return None;
        }
        if self.sc.cert == self.first.cert {
            let jump = common_prefix(path, &self.first.path);
            self.record_automorphism(true, depth);
            return Some(jump);
        }
        match self.sc.cert.cmp(&self.best.cert) {
            std::cmp::Ordering::Equal => {
                let jump = common_prefix(path, &self.best.path);
                self.record_automorphism(false, depth);
                Some(jump)
            }
            std::cmp::Ordering::Greater => {
                self.best.store(&self.sc.cert, &self.pool[depth].lab, path);
                None
            }
            std::cmp::Ordering::Less => None,
        }
    }
}

fn run_label(ws: &mut Workspace) -> Labeling {
    let Workspace {
        g,
        header,
        sc,
        pool,
        nodes,
        first,
        best,
        path,
    } = ws;
    let n = g.n();
    let np = g.np;
    if pool.is_empty() {
        pool.push(Partition::default());
    }
    g.initial_partition(&mut pool[0], header);
    sc.count.clear();
    sc.count.resize(n, 0);
    sc.in_queue.clear();
    sc.in_queue.resize(n, false);
    sc.starts.clear();
    let mut s = 0;
    while s < n {
        sc.starts.push(s);
        s = pool[0].end[s];
    }
    g.refine(&mut pool[0], sc);
    if n == 0 {
        g.leaf_cert(header, &pool[0], sc);
        return Labeling {
            point_pos: Vec::new(),
            line_pos: Vec::new(),
            cert: sc.cert.clone(),
            automorphisms: Vec::new(),
        };
    }
    let mut search = Search {
        g,
        header,
        sc,
        pool,
        nodes,
        first,
        best,
        have_first: false,
        automorphisms: Vec::new(),
    };
    path.clear();
    search.search(0, path);
    let automorphisms = search.automorphisms;
    let mut pos = vec![0; n];
    for (q, &v) in best.lab.iter().enumerate() {
        pos[v] = q;
    }
    Labeling {
        point_pos: pos[..np].to_vec(),
        line_pos: pos[np..].iter().map(|&q| q - np).collect(),
        cert: best.cert.clone(),
        automorphisms,
    }
}

/// Labels the incidence graph given by `lines` (point indices per line) with
/// per-point and per-line colors.
pub(crate) fn label(
    np: usize,
    lines: &[Vec<usize>],
    point_colors: &[u32],
    line_colors: &[u32],
) -> Labeling {
    WORKSPACE.with(|w| {
        let ws = &mut *w.borrow_mut();
        ws.g.load(np, lines.iter().map(|l| l.iter().copied()), point_colors, line_colors);
        run_label(ws)
    })
}

/// As [`label`], with lines given as point bitmasks.
pub(crate) fn label_masks(
    np: usize,
    lines: &[u64],
    point_colors: &[u32],
    line_colors: &[u32],
) -> Labeling {
    fn bits(mut m: u64) -> impl Iterator<Item = usize> + Clone {
        std::iter::from_fn(move || {
            (m != 0).then(|| {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                b
            })
        })
    }
    WORKSPACE.with(|w| {
        let ws = &mut *w.borrow_mut();
        ws.g.load(np, lines.iter().map(|&m| bits(m)), point_colors, line_colors);
        run_label(ws)
    })
}

/// Labeling with point valences and line sizes as colors. They are
/// intrinsic, so this is still a canonical labeling of the bare structure;
/// starting from them only saves refinement work.
fn label_structure(s: &IncidenceStructure) -> Labeling {
    let pc: Vec<u32> = (0..s.num_points()).map(|p| s.point_valence(p) as u32).collect();
    let lc: Vec<u32> = (0..s.num_lines()).map(|l| s.line_valence(l) as u32).collect();
    label(s.num_points(), s.index_lines(), &pc, &lc)
}

/// Lines renumbered by a labeling, in canonical order.
pub(crate) fn relabeled_lines(lines: &[Vec<usize>], lab: &Labeling) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); lines.len()];
    for (j, pts) in lines.iter().enumerate() {
        let mut v: Vec<usize> = pts.iter().map(|&p| lab.point_pos[p]).collect();
        v.sort_unstable();
        out[lab.line_pos[j]] = v;
    }
    out.sort();
    out
}

pub fn canonical_form(s: &IncidenceStructure) -> CanonicalForm {
    label_structure(s).form()
}

pub fn are_isomorphic(s: &IncidenceStructure, t: &IncidenceStructure) -> bool {
    s.num_points() == t.num_points()
        && s.num_lines() == t.num_lines()
        && s.incidence_count() == t.incidence_count()
        && s.signature() == t.signature()
        && canonical_form(s) == canonical_form(t)
}

/// The structure relabeled into canonical order, with ids `p0..`, `l0..`.
pub fn canonical_structure(s: &IncidenceStructure) -> IncidenceStructure {
    canonical_pair(s).1
}

/// Canonical form and canonical relabeling from a single labeling run.
pub fn canonical_pair(s: &IncidenceStructure) -> (CanonicalForm, IncidenceStructure) {
    let lab = label_structure(s);
    let lines = relabeled_lines(s.index_lines(), &lab);
    let t = IncidenceStructure::numbered(s.num_points(), &lines).expect("relabeling keeps validity");
    (lab.form(), t)
}

/// Order of the automorphism group (point-to-point, line-to-line).
pub fn automorphism_group_order(s: &IncidenceStructure) -> u128 {
    let lab = label_structure(s);
    group_order(s.num_points() + s.num_lines(), &lab.automorphisms)
}

fn group_order(n: usize, gens: &[Vec<usize>]) -> u128 {
    use std::collections::HashSet;
    let id: Vec<usize> = (0..n).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for h in gens {
            let gh: Vec<usize> = (0..n).map(|v| h[g[v]]).collect();
            if seen.insert(gh.clone()) {
                frontier.push(gh);
            }
        }
    }
    seen.len() as u128
}
