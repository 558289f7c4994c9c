//! Combinatorial point-line incidence structures.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Kind, Result};
use crate::signature::Signature;

/// Points and lines with an incidence relation in which two distinct points
/// share at most one line (equivalently, the bipartite incidence graph has
/// girth at least six).
///
/// Ids are opaque strings; the order of the id lists is preserved and drives
/// every iteration order, so output derived from a structure is
/// deterministic.
#[derive(Clone, Debug)]
pub struct IncidenceStructure {
    point_ids: Vec<String>,
    line_ids: Vec<String>,
    lines: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
    point_index: HashMap<String, usize>,
    line_index: HashMap<String, usize>,
}

impl PartialEq for IncidenceStructure {
    fn eq(&self, other: &Self) -> bool {
        self.point_ids == other.point_ids
            && self.line_ids == other.line_ids
            && self.lines == other.lines
    }
}

impl Eq for IncidenceStructure {}

fn index_ids(ids: &[String], kind: Kind) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::DuplicateId {
                kind,
                id: id.clone(),
            });
        }
    }
    Ok(index)
}

impl IncidenceStructure {
    /// Builds a structure from index-based lines: `lines[j]` lists the
    /// indices of the points on line `j`.
    pub fn from_index_lines(
        point_ids: Vec<String>,
        line_ids: Vec<String>,
        lines: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if lines.len() != line_ids.len() {
            return Err(Error::Validation(format!(
                "{} line ids but {} point lists",
                line_ids.len(),
                lines.len()
            )));
        }
        let point_index = index_ids(&point_ids, Kind::Point)?;
        let line_index = index_ids(&line_ids, Kind::Line)?;
        let mut point_lines = vec![Vec::new(); point_ids.len()];
        let mut sorted_lines = Vec::with_capacity(lines.len());
        for (j, pts) in lines.into_iter().enumerate() {
            let mut pts = pts;
            pts.sort_unstable();
            for w in pts.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateIncidence {
                        point: point_ids[w[0]].clone(),
                        line: line_ids[j].clone(),
                    });
                }
            }
            for &p in &pts {
                if p >= point_ids.len() {
                    return Err(Error::UnknownId {
                        kind: Kind::Point,
                        id: format!("#{p}"),
                    });
                }
                point_lines[p].push(j);
            }
            sorted_lines.push(pts);
        }
        let s = Self {
            point_ids,
            line_ids,
            lines: sorted_lines,
            point_lines,
            point_index,
            line_index,
        };
        s.check_girth()?;
        Ok(s)
    }

    /// Builds a structure from lines given as lists of point ids.
    pub fn from_lines(point_ids: Vec<String>, lines: Vec<(String, Vec<String>)>) -> Result<Self> {
        let point_index = index_ids(&point_ids, Kind::Point)?;
        let mut line_ids = Vec::with_capacity(lines.len());
        let mut index_lines = Vec::with_capacity(lines.len());
        for (id, pts) in lines {
            let idx = pts
                .iter()
                .map(|p| {
                    point_index.get(p).copied().ok_or_else(|| Error::UnknownId {
                        kind: Kind::Point,
                        id: p.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            line_ids.push(id);
            index_lines.push(idx);
        }
        Self::from_index_lines(point_ids, line_ids, index_lines)
    }

    pub fn from_incidences<I>(point_ids: Vec<String>, line_ids: Vec<String>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let point_index = index_ids(&point_ids, Kind::Point)?;
        let line_index = index_ids(&line_ids, Kind::Line)?;
        let mut lines = vec![Vec::new(); line_ids.len()];
        for (p, l) in pairs {
            let pi = *point_index.get(&p).ok_or(Error::UnknownId {
                kind: Kind::Point,
                id: p,
            })?;
            let li = *line_index.get(&l).ok_or(Error::UnknownId {
                kind: Kind::Line,
                id: l,
            })?;
            lines[li].push(pi);
        }
        Self::from_index_lines(point_ids, line_ids, lines)
    }

    /// Points `p0..p{n-1}` and lines `l0..`, given by point indices.
    pub fn numbered(num_points: usize, lines: &[Vec<usize>]) -> Result<Self> {
        Self::from_index_lines(
            (0..num_points).map(|i| format!("p{i}")).collect(),
            (0..lines.len()).map(|j| format!("l{j}")).collect(),
            lines.to_vec(),
        )
    }

    fn check_girth(&self) -> Result<()> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (p, ls) in self.point_lines.iter().enumerate() {
            for (a, &l1) in ls.iter().enumerate() {
                for &l2 in &ls[a + 1..] {
                    if let Some(&q) = seen.get(&(l1, l2)) {
                        return Err(Error::GirthViolation {
                            points: (self.point_ids[q].clone(), self.point_ids[p].clone()),
                            lines: (self.line_ids[l1].clone(), self.line_ids[l2].clone()),
                        });
                    }
                    seen.insert((l1, l2), p);
                }
            }
        }
        Ok(())
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    pub fn line_ids(&self) -> &[String] {
        &self.line_ids
    }

    pub fn num_points(&self) -> usize {
        self.point_ids.len()
    }

    pub fn num_lines(&self) -> usize {
        self.line_ids.len()
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.point_index.get(id).copied()
    }

    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.line_index.get(id).copied()
    }

    pub(crate) fn require_point(&self, id: &str) -> Result<usize> {
        self.point_index(id).ok_or_else(|| Error::UnknownId {
            kind: Kind::Point,
            id: id.to_string(),
        })
    }

    pub(crate) fn require_line(&self, id: &str) -> Result<usize> {
        self.line_index(id).ok_or_else(|| Error::UnknownId {
            kind: Kind::Line,
            id: id.to_string(),
        })
    }

    /// Sorted indices of the points on line `j`.
    pub fn points_on(&self, j: usize) -> &[usize] {
        &self.lines[j]
    }

    /// Sorted indices of the lines through point `i`.
    pub fn lines_through(&self, i: usize) -> &[usize] {
        &self.point_lines[i]
    }

    pub fn index_lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn is_incident(&self, i: usize, j: usize) -> bool {
        self.lines[j].binary_search(&i).is_ok()
    }

    pub fn point_valence(&self, i: usize) -> usize {
        self.point_lines[i].len()
    }

    pub fn line_valence(&self, j: usize) -> usize {
        self.lines[j].len()
    }

    pub fn incidence_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    /// All incident `(point index, line index)` pairs, by point then line.
    pub fn incidences(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.point_lines
            .iter()
            .enumerate()
            .flat_map(|(p, ls)| ls.iter().map(move |&l| (p, l)))
    }

    /// The line shared by two points, if any.
    pub fn common_line(&self, a: usize, b: usize) -> Option<usize> {
        let (la, lb) = (&self.point_lines[a], &self.point_lines[b]);
        la.iter().copied().find(|l| lb.binary_search(l).is_ok())
    }

    pub fn lines_with_ids(&self) -> Vec<(String, Vec<String>)> {
        self.lines
            .iter()
            .enumerate()
            .map(|(j, pts)| {
                (
                    self.line_ids[j].clone(),
                    pts.iter().map(|&p| self.point_ids[p].clone()).collect(),
                )
            })
            .collect()
    }

    pub fn signature(&self) -> Signature {
        Signature::new(
            self.point_lines.iter().map(|ls| (ls.len(), 1)),
            self.lines.iter().map(|ps| (ps.len(), 1)),
        )
        .expect("double counting holds for every structure")
    }

    pub fn is_quasi_configuration(&self) -> bool {
        self.signature().is_quasi_configuration()
    }

    pub fn is_k_configuration(&self, k: usize) -> bool {
        self.signature().is_k_configuration(k)
    }

    pub fn is_34_configuration(&self) -> bool {
        self.signature().is_34_configuration()
    }

    pub fn is_n34_configuration(&self) -> bool {
        self.signature().is_n34_configuration()
    }

    /// Whether the bipartite incidence graph is connected.
    pub fn is_connected(&self) -> bool {
        let (np, nl) = (self.num_points(), self.num_lines());
        if np + nl == 0 {
            return true;
        }
        // vertices: points 0..np, lines np..np+nl
        let mut seen = vec![false; np + nl];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            let nbrs: Vec<usize> = if v < np {
                self.point_lines[v].iter().map(|&l| np + l).collect()
            } else {
                self.lines[v - np].clone()
            };
            for u in nbrs {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == np + nl
    }

    /// Exchanges the roles of points and lines; ids carry over unchanged.
    pub fn dual(&self) -> Self {
        Self {
            point_ids: self.line_ids.clone(),
            line_ids: self.point_ids.clone(),
            lines: self.point_lines.clone(),
            point_lines: self.lines.clone(),
            point_index: self.line_index.clone(),
            line_index: self.point_index.clone(),
        }
    }

    /// Restriction to the given points and lines, in the original order.
    pub fn induced_substructure<P, L>(&self, keep_points: P, keep_lines: L) -> Result<Self>
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        let mut kp = vec![false; self.num_points()];
        for id in keep_points {
            kp[self.require_point(id.as_ref())?] = true;
        }
        let mut kl = vec![false; self.num_lines()];
        for id in keep_lines {
            kl[self.require_line(id.as_ref())?] = true;
        }
        Ok(self.induced_by_mask(&kp, &kl))
    }

    /// Removes the given points and lines.
    pub fn without<P, L>(&self, points: P, lines: L) -> Result<Self>
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        let mut kp = vec![true; self.num_points()];
        for id in points {
            kp[self.require_point(id.as_ref())?] = false;
        }
        let mut kl = vec![true; self.num_lines()];
        for id in lines {
            kl[self.require_line(id.as_ref())?] = false;
        }
        Ok(self.induced_by_mask(&kp, &kl))
    }

    pub(crate) fn induced_by_mask(&self, keep_points: &[bool], keep_lines: &[bool]) -> Self {
        let mut new_index = vec![usize::MAX; self.num_points()];
        let mut point_ids = Vec::new();
        for (i, id) in self.point_ids.iter().enumerate() {
            if keep_points[i] {
                new_index[i] = point_ids.len();
                point_ids.push(id.clone());
            }
        }
        let mut line_ids = Vec::new();
        let mut lines = Vec::new();
        for (j, id) in self.line_ids.iter().enumerate() {
            if keep_lines[j] {
                line_ids.push(id.clone());
                lines.push(
                    self.lines[j]
                        .iter()
                        .filter(|&&p| keep_points[p])
                        .map(|&p| new_index[p])
                        .collect(),
                );
            }
        }
        Self::from_index_lines(point_ids, line_ids, lines)
            .expect("substructures inherit the girth bound")
    }

    /// Applies index permutations: point `i` moves to position `point_perm[i]`,
    /// line `j` to `line_perm[j]`.
    pub fn permuted(&self, point_perm: &[usize], line_perm: &[usize]) -> Self {
        let mut point_ids = vec![String::new(); self.num_points()];
        for (i, id) in self.point_ids.iter().enumerate() {
            point_ids[point_perm[i]] = id.clone();
        }
        let mut line_ids = vec![String::new(); self.num_lines()];
        let mut lines = vec![Vec::new(); self.num_lines()];
        for (j, id) in self.line_ids.iter().enumerate() {
            line_ids[line_perm[j]] = id.clone();
            lines[line_perm[j]] = self.lines[j].iter().map(|&p| point_perm[p]).collect();
        }
        Self::from_index_lines(point_ids, line_ids, lines).expect("relabeling keeps validity")
    }

    /// Renames every id by prepending `prefix`.
    pub fn prefixed(&self, prefix: &str) -> Self {
        Self::from_index_lines(
            self.point_ids.iter().map(|id| format!("{prefix}{id}")).collect(),
            self.line_ids.iter().map(|id| format!("{prefix}{id}")).collect(),
            self.lines.clone(),
        )
        .expect("renaming keeps validity")
    }

    /// Ids of points whose valence differs between `self` and `before`.
    pub fn valence_changes(&self, before: &Self) -> Vec<(Kind, String, usize, usize)> {
        let mut out = Vec::new();
        for (i, id) in self.point_ids.iter().enumerate() {
            if let Some(k) = before.point_index(id) {
                let (old, new) = (before.point_valence(k), self.point_valence(i));
                if old != new {
                    out.push((Kind::Point, id.clone(), old, new));
                }
            }
        }
        for (j, id) in self.line_ids.iter().enumerate() {
            if let Some(k) = before.line_index(id) {
                let (old, new) = (before.line_valence(k), self.line_valence(j));
                if old != new {
                    out.push((Kind::Line, id.clone(), old, new));
                }
            }
        }
        out
    }

    /// Sets of point ids per line; handy for comparisons that ignore order.
    pub fn line_sets(&self) -> HashSet<Vec<String>> {
        self.lines_with_ids()
            .into_iter()
            .map(|(_, mut pts)| {
                pts.sort();
                pts
            })
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn fano() -> IncidenceStructure {
        let lines: Vec<Vec<usize>> = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
        IncidenceStructure::numbered(7, &lines).unwrap()
    }

    #[test]
    fn fano_is_a_3_configuration() {
        let f = fano();
        assert!(f.is_k_configuration(3));
        assert!(f.is_quasi_configuration());
        assert!(f.is_connected());
        assert_eq!(f.incidence_count(), 21);
    }

    #[test]
    fn girth_violation_detected() {
        let r = IncidenceStructure::numbered(3, &[vec![0, 1, 2], vec![0, 1]]);
        assert!(matches!(r, Err(Error::GirthViolation { .. })));
    }

    #[test]
    fn duplicate_incidence_and_ids() {
        let r = IncidenceStructure::numbered(3, &[vec![0, 1, 1]]);
        assert!(matches!(r, Err(Error::DuplicateIncidence { .. })));
        let r = IncidenceStructure::from_lines(
            vec!["a".into(), "a".into()],
            vec![("l".into(), vec!["a".into()])],
        );
        assert!(matches!(r, Err(Error::DuplicateId { .. })));
        let r = IncidenceStructure::from_lines(
            vec!["a".into()],
            vec![("l".into(), vec!["b".into()])],
        );
        assert!(matches!(r, Err(Error::UnknownId { .. })));
    }

    #[test]
    fn degenerate_single_point_single_line() {
        let s = IncidenceStructure::numbered(1, &[vec![]]).unwrap();
        let sig = s.signature();
        assert_eq!(sig.point_counts().get(&0), Some(&1));
        assert_eq!(sig.line_counts().get(&0), Some(&1));
        assert!(!s.is_connected());
        assert!(!s.is_quasi_configuration());
    }

    #[test]
    fn disjoint_fanos_are_disconnected() {
        let mut lines: Vec<Vec<usize>> = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
        lines.extend((0..7).map(|i| vec![7 + i, 7 + (i + 1) % 7, 7 + (i + 3) % 7]));
        let s = IncidenceStructure::numbered(14, &lines).unwrap();
        assert!(!s.is_connected());
        assert!(s.is_k_configuration(3));
    }

    #[test]
    fn fano_minus_a_point() {
        let f = fano();
        let g = f.without(["p0"], Vec::<String>::new()).unwrap();
        let sig = g.signature();
        assert_eq!(sig.point_counts().get(&3), Some(&6));
        assert_eq!(sig.line_counts().get(&2), Some(&3));
        assert_eq!(sig.line_counts().get(&3), Some(&4));
        assert_eq!(g.incidence_count(), 18);
    }

    #[test]
    fn induced_keeps_everything() {
        let f = fano();
        let g = f
            .induced_substructure(f.point_ids().to_vec(), f.line_ids().to_vec())
            .unwrap();
        assert_eq!(f, g);
        assert!(f
            .induced_substructure(["p9"], Vec::<String>::new())
            .is_err());
    }

    #[test]
    fn dual_swaps_signature() {
        let s =IncidenceStructure::numbered(5, &[vec![0, 1, 2], vec![2, 3, 4], vec![0, 4]]).unwrap();
        assert_eq!(s.dual().signature(), s.signature().dual());
        assert_eq!(s.dual().dual(), s);
    }

    #[test]
    fn common_line_lookup() {
        let f = fano();
        assert_eq!(f.common_line(0, 1), Some(0));
        assert_eq!(f.common_line(0, 3), Some(0));
        let s = IncidenceStructure::numbered(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(s.common_line(0, 2), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        // the projective plane of order 3
        fn pg23() -> IncidenceStructure {
            let lines: Vec<Vec<usize>> = (0..13).map(|i| [0, 1, 3, 9].iter().map(|o| (i + o) % 13).collect()).collect();
            IncidenceStructure::numbered(13, &lines).unwrap()
        }

        proptest! {
            #[test]
            fn substructures_keep_girth(kp in prop::collection::vec(any::<bool>(), 13), kl in prop::collection::vec(any::<bool>(), 13)) {
                let s = pg23().induced_by_mask(&kp, &kl);
                for a in 0..s.num_points() {
                    for b in a + 1..s.num_points() {
                        let shared = s.lines_through(a).iter().filter(|j| s.lines_through(b).contains(j)).count();
                        prop_assert!(shared <= 1);
                    }
                }
                let sig = s.signature();
                prop_assert_eq!(sig.incidences(), s.incidence_count());
                prop_assert_eq!(s.dual().dual(), s.clone());
                prop_assert_eq!(s.dual().signature(), sig.dual());
            }

            #[test]
            fn id_round_trip(kp in prop::collection::vec(any::<bool>(), 13), kl in prop::collection::vec(any::<bool>(), 13)) {
                let s = pg23().induced_by_mask(&kp, &kl);
                let t = IncidenceStructure::from_lines(s.point_ids().to_vec(), s.lines_with_ids()).unwrap();
                prop_assert_eq!(t, s);
            }
        }
    }
}
