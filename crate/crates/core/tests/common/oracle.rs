//! Brute-force reference enumeration, independent of the library's
//! canonical labeling and orderly generation.
//!
//! Points carry fixed valences by position, lines are unlabeled (kept sorted
//! within each size block), and isomorphism classes are formed by expanding
//! orbits under every valence-preserving point permutation. The search runs
//! on whichever of the structure and its dual has the smaller permutation
//! group, and results are transposed back.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};

use quasiconf::{IncidenceStructure, Signature};

/// Up to eight lines of up to eight points, one byte per line.
type Key = u64;

#[derive(Default)]
struct MixHasher(u64);

impl Hasher for MixHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(u64::from(b));
        }
    }

    fn write_u64(&mut self, x: u64) {
        let z = (self.0 ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 = z ^ (z >> 29);
    }
}

type KeySet = HashSet<Key, BuildHasherDefault<MixHasher>>;

struct Labeled {
    valence: Vec<u32>,
    blocks: Vec<(usize, usize)>,
    // pairs of points with equal valence
    swaps: Vec<(usize, usize)>,
    out: Vec<Key>,
}

impl Labeled {
    fn lines_left(&self, block: usize, placed: usize) -> usize {
        self.blocks[block..].iter().map(|&(_, c)| c).sum::<usize>() - placed
    }

    fn run(&mut self, lines: &mut Vec<u64>, deg: &mut Vec<u32>, block: usize, placed: usize) {
        if block == self.blocks.len() {
            if deg.iter().zip(&self.valence).all(|(d, v)| d == v) {
                self.out.push(pack(lines));
            }
            return;
        }
        let (k, c) = self.blocks[block];
        if placed == c {
            if !self.prefix_is_least(lines, block + 1) {
                return;
            }
            self.run(lines, deg, block + 1, 0);
            return;
        }
        let n = self.valence.len();
        let left = self.lines_left(block, placed) as u32;
        if (0..n).any(|p| self.valence[p] - deg[p] > left) {
            return;
        }
        let open: u64 = (0..n)
            .filter(|&p| deg[p] < self.valence[p])
            .fold(0, |m, p| m | 1 << p);
        // lines within a block are nondecreasing as masks
        let lower = if placed > 0 { *lines.last().unwrap() } else { 0 };
        let mut sub = open;
        loop {
            let mask = sub;
            if mask.count_ones() as usize == k
                && mask >= lower
                && !(k >= 2 && lines.iter().any(|&m| (m & mask).count_ones() >= 2))
            {
                for p in 0..n {
                    if mask >> p & 1 == 1 {
                        deg[p] += 1;
                    }
                }
                lines.push(mask);
                self.run(lines, deg, block, placed + 1);
                lines.pop();
                for p in 0..n {
                    if mask >> p & 1 == 1 {
                        deg[p] -= 1;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & open;
        }
    }
}

impl Labeled {
    /// Whether no swap of two equal-valence points makes the completed
    /// blocks lexicographically smaller. Completed blocks are a prefix of
    /// every extension and of its images, so a smaller image prefix rules
    /// out the whole subtree holding the least member of its orbit.
    fn prefix_is_least(&self, lines: &[u64], done_blocks: usize) -> bool {
        let mut buf = Vec::with_capacity(lines.len());
        for &(a, b) in &self.swaps {
            buf.clear();
            buf.extend(lines.iter().map(|&m| {
                let (x, y) = (m >> a & 1, m >> b & 1);
                (m & !(1 << a) & !(1 << b)) | y << a | x << b
            }));
            let mut start = 0;
            for &(_, c) in &self.blocks[..done_blocks] {
                buf[start..start + c].sort_unstable();
                start += c;
            }
            if buf.as_slice() < lines {
                return false;
            }
        }
        true
    }
}

fn pack(lines: &[u64]) -> Key {
    lines.iter().enumerate().fold(0, |k, (i, &m)| k | m << (8 * i))
}

fn unpack(key: Key, nl: usize) -> Vec<u64> {
    (0..nl).map(|i| key >> (8 * i) & 0xff).collect()
}

/// Degree sequences realizable by a simple bipartite graph in which no two
/// vertices on the same side have two common neighbours.
fn plausible(pv: &[usize], lv: &[usize]) -> bool {
    let c2 = |v: &[usize]| v.iter().map(|&k| k * k.saturating_sub(1)).sum::<usize>();
    if c2(lv) > pv.len() * pv.len().saturating_sub(1) || c2(pv) > lv.len() * lv.len().saturating_sub(1) {
        return false;
    }
    let mut a = pv.to_vec();
    a.sort_unstable_by(|x, y| y.cmp(x));
    (1..=a.len()).all(|k| {
        a[..k].iter().sum::<usize>() <= lv.iter().map(|&l| l.min(k)).sum::<usize>()
    })
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// All valence-preserving point permutations, as maps `p -> perm[p]`.
fn class_permutations(valence: &[u32]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (p, &v) in valence.iter().enumerate() {
        if v == 0 {
            continue;
        }
        match classes.iter_mut().find(|c| valence[c[0]] == v) {
            Some(c) => c.push(p),
            None => classes.push(vec![p]),
        }
    }
    let mut result = vec![(0..valence.len()).collect::<Vec<usize>>()];
    for class in classes {
        let perms = permutations(&class);
        let mut next = Vec::new();
        for base in &result {
            for perm in &perms {
                let mut m = base.clone();
                for (i, &p) in class.iter().enumerate() {
                    m[p] = perm[i];
                }
                next.push(m);
            }
        }
        result = next;
    }
    result
}

/// Image of a key under a point permutation, re-sorted within each block
/// of equal-size lines.
fn image(lines: &[u64], block_ends: &[usize], perm: &[usize], buf: &mut Vec<u64>) -> Key {
    buf.clear();
    for &m in lines {
        let mut im = 0u64;
        let mut rest = m;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            im |= 1 << perm[p];
            rest &= rest - 1;
        }
        buf.push(im);
    }
    let mut start = 0;
    for &end in block_ends {
        buf[start..end].sort_unstable();
        start = end;
    }
    pack(buf)
}

fn permutation_count(valence: &[usize]) -> u128 {
    let mut counts = std::collections::BTreeMap::new();
    for &v in valence.iter().filter(|&&v| v > 0) {
        *counts.entry(v).or_insert(0u128) += 1;
    }
    counts.values().map(|&c| (1..=c).product::<u128>()).product()
}

/// One representative per class, as point lists per line, for points with
/// the given valences and lines with the given sizes.
fn classes(pv: &[usize], lv: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut valence: Vec<u32> = pv.iter().map(|&v| v as u32).collect();
    valence.sort_unstable_by(|a, b| b.cmp(a));
    let mut sizes = lv.to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for &k in &sizes {
        match blocks.last_mut() {
            Some((s, c)) if *s == k => *c += 1,
            _ => blocks.push((k, 1)),
        }
    }
    let block_ends: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, &(_, c)| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let n = valence.len();
    let nl = sizes.len();
    let swaps = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| valence[a] == valence[b] && valence[a] > 0)
        .collect();
    let mut lab = Labeled {
        valence: valence.clone(),
        blocks,
        swaps,
        out: Vec::new(),
    };
    lab.run(&mut Vec::new(), &mut vec![0; n], 0, 0);
    let perms = class_permutations(&valence);
    let mut visited = KeySet::default();
    let mut buf = Vec::with_capacity(nl);
    let mut reps = Vec::new();
    for key in lab.out {
        if visited.contains(&key) {
            continue;
        }
        let lines = unpack(key, nl);
        for perm in &perms {
            visited.insert(image(&lines, &block_ends, perm, &mut buf));
        }
        reps.push(
            lines
                .iter()
                .map(|&m| (0..n).filter(|&p| m >> p & 1 == 1).collect())
                .collect(),
        );
    }
    reps
}

fn transpose(nl: usize, dual_lines: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut lines = vec![Vec::new(); nl];
    for (p, ls) in dual_lines.iter().enumerate() {
        for &l in ls {
            lines[l].push(p);
        }
    }
    lines
}

fn connected(n: usize, lines: &[Vec<usize>]) -> bool {
    let total = n + lines.len();
    if total == 0 {
        return true;
    }
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (j, pts) in lines.iter().enumerate() {
        for &p in pts {
            let (a, b) = (find(&mut parent, p), find(&mut parent, n + j));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (0..total).all(|v| find(&mut parent, v) == root)
}

/// One representative per isomorphism class.
/// Representatives, as point lists per line, of the classes with point
/// valences `pv` and line sizes `lv`.
fn representatives(pv: &[usize], lv: &[usize]) -> Vec<Vec<Vec<usize>>> {
    assert!(pv.len() <= 8 && lv.len() <= 8, "oracle is meant for tiny signatures");
    if !plausible(pv, lv) {
        return Vec::new();
    }
    if permutation_count(lv) < permutation_count(pv) {
        classes(lv, pv).iter().map(|d| transpose(lv.len(), d)).collect()
    } else {
        classes(pv, lv)
    }
}

pub fn naive_enumerate(sig: &Signature, connected_only: bool) -> Vec<IncidenceStructure> {
    let expand = |m: &std::collections::BTreeMap<usize, usize>| -> Vec<usize> {
        m.iter().flat_map(|(&k, &c)| std::iter::repeat(k).take(c)).collect()
    };
    let pv = expand(sig.point_counts());
    let lv = expand(sig.line_counts());
    let np = pv.len();
    representatives(&pv, &lv)
        .into_iter()
        .filter(|lines| !connected_only || connected(np, lines))
        .map(|lines| IncidenceStructure::numbered(np, &lines).expect("oracle keeps girth"))
        .collect()
}

/// Calls `f` on every consistent signature with between 1 and `max_elems`
/// points and lines, valences in `min_val..=max_val`, and no valence
/// exceeding the size of the other side.
pub fn for_each_signature(
    max_elems: usize,
    min_val: usize,
    max_val: usize,
    mut f: impl FnMut(&[usize], &[usize]),
) {
    fn multisets(len_max: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut frontier = vec![Vec::<usize>::new()];
        for _ in 0..len_max {
            let mut next = Vec::new();
            for m in &frontier {
                let start = m.last().copied().unwrap_or(lo);
                for v in start..=hi {
                    let mut w = m.clone();
                    w.push(v);
                    next.push(w);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
    let sides = multisets(max_elems, min_val, max_val);
    let mut by_sum: std::collections::BTreeMap<usize, Vec<&Vec<usize>>> = Default::default();
    for m in &sides {
        by_sum.entry(m.iter().sum()).or_default().push(m);
    }
    for group in by_sum.values() {
        for p in group {
            for l in group {
                if p.iter().any(|&v| v > l.len()) || l.iter().any(|&v| v > p.len()) {
                    continue;
                }
                f(p, l);
            }
        }
    }
}

pub fn signature_of(p: &[usize], l: &[usize]) -> Signature {
    Signature::new(runs(p), runs(l)).expect("sums match")
}

/// `(value, multiplicity)` pairs of a sorted slice.
fn runs(v: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(v.len());
    for &x in v {
        match out.last_mut() {
            Some((y, c)) if *y == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Class counts memoized on the signature with isolated points and empty
/// lines removed; those elements never change the number of classes.
#[derive(Default)]
pub struct CountCache {
    counts: std::collections::HashMap<(Vec<usize>, Vec<usize>), usize>,
}

impl CountCache {
    pub fn count(&mut self, p: &[usize], l: &[usize]) -> usize {
        let sorted = |v: &[usize]| {
            let mut v: Vec<usize> = v.iter().copied().filter(|&x| x > 0).collect();
            v.sort_unstable();
            v
        };
        let key = (sorted(p), sorted(l));
        if key.0.is_empty() && key.1.is_empty() {
            return 1;
        }
        if let Some(&c) = self.counts.get(&key) {
            return c;
        }
        let c = representatives(&key.0, &key.1).len();
        self.counts.insert(key, c);
        c
    }
}
