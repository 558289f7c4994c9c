//! Coordinates for combinatorial elements and the faithfulness check.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Kind, Result};
use crate::kernel::{incident, join, polar_dual_line, polar_dual_point, ProjLine, ProjPoint};
use crate::projmap::ProjMap;
use crate::structure::IncidenceStructure;

/// Coordinates keyed by element id. May be partial while a construction is
/// in progress; [`check_faithful`] demands full coverage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Realization {
    points: BTreeMap<String, ProjPoint>,
    lines: BTreeMap<String, ProjLine>,
}

impl Realization {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_point(&mut self, id: impl Into<String>, p: ProjPoint) {
        self.points.insert(id.into(), p);
    }

    pub fn insert_line(&mut self, id: impl Into<String>, l: ProjLine) {
        self.lines.insert(id.into(), l);
    }

    pub fn point(&self, id: &str) -> Option<&ProjPoint> {
        self.points.get(id)
    }

    pub fn line(&self, id: &str) -> Option<&ProjLine> {
        self.lines.get(id)
    }

    pub fn points(&self) -> &BTreeMap<String, ProjPoint> {
        &self.points
    }

    pub fn lines(&self) -> &BTreeMap<String, ProjLine> {
        &self.lines
    }

    pub fn require_point(&self, id: &str) -> Result<&ProjPoint> {
        self.points.get(id).ok_or_else(|| Error::UnmappedId {
            kind: Kind::Point,
            id: id.to_string(),
        })
    }

    pub fn require_line(&self, id: &str) -> Result<&ProjLine> {
        self.lines.get(id).ok_or_else(|| Error::UnmappedId {
            kind: Kind::Line,
            id: id.to_string(),
        })
    }

    /// Coordinates of the structure's points, in structure order.
    pub fn point_coords(&self, s: &IncidenceStructure) -> Result<Vec<ProjPoint>> {
        s.point_ids()
            .iter()
            .map(|id| self.require_point(id).cloned())
            .collect()
    }

    pub fn line_coords(&self, s: &IncidenceStructure) -> Result<Vec<ProjLine>> {
        s.line_ids()
            .iter()
            .map(|id| self.require_line(id).cloned())
            .collect()
    }

    /// Keeps only the ids present in `s`.
    pub fn restricted_to(&self, s: &IncidenceStructure) -> Self {
        Self {
            points: self
                .points
                .iter()
                .filter(|(id, _)| s.point_index(id).is_some())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            lines: self
                .lines
                .iter()
                .filter(|(id, _)| s.line_index(id).is_some())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Image under a projective map (lines transform contragrediently).
    pub fn transformed(&self, m: &ProjMap) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|(k, p)| (k.clone(), m.apply(p)))
                .collect(),
            lines: self
                .lines
                .iter()
                .map(|(k, l)| (k.clone(), m.apply_line(l)))
                .collect(),
        }
    }

    /// Polarity image: point ids now carry lines and vice versa, matching
    /// [`IncidenceStructure::dual`].
    pub fn polar_dual(&self) -> Self {
        Self {
            points: self
                .lines
                .iter()
                .map(|(k, l)| (k.clone(), polar_dual_line(l)))
                .collect(),
            lines: self
                .points
                .iter()
                .map(|(k, p)| (k.clone(), polar_dual_point(p)))
                .collect(),
        }
    }

    pub fn prefixed(&self, prefix: &str) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|(k, v)| (format!("{prefix}{k}"), v.clone()))
                .collect(),
            lines: self
                .lines
                .iter()
                .map(|(k, v)| (format!("{prefix}{k}"), v.clone()))
                .collect(),
        }
    }

    /// Given point coordinates, fills in each line as the join of its first
    /// two points.
    pub fn from_point_coords(
        s: &IncidenceStructure,
        points: impl IntoIterator<Item = (String, ProjPoint)>,
    ) -> Result<Self> {
        let mut r = Self::new();
        for (id, p) in points {
            r.insert_point(id, p);
        }
        for (j, id) in s.line_ids().iter().enumerate() {
            let pts = s.points_on(j);
            if pts.len() < 2 {
                return Err(Error::Precondition(format!(
                    "line `{id}` has fewer than two points; its coordinates are not determined"
                )));
            }
            let a = r.require_point(&s.point_ids()[pts[0]])?;
            let b = r.require_point(&s.point_ids()[pts[1]])?;
            let l = join(a, b)?;
            r.insert_line(id.clone(), l);
        }
        Ok(r)
    }
}

/// Builds the structure whose incidences are exactly the geometric ones
/// among the given elements.
pub fn structure_from_coordinates(
    points: Vec<(String, ProjPoint)>,
    lines: Vec<(String, ProjLine)>,
) -> Result<(IncidenceStructure, Realization)> {
    let index_lines = lines
        .iter()
        .map(|(_, l)| {
            points
                .iter()
                .enumerate()
                .filter(|(_, (_, p))| incident(p, l))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let s = IncidenceStructure::from_index_lines(
        points.iter().map(|(id, _)| id.clone()).collect(),
        lines.iter().map(|(id, _)| id.clone()).collect(),
        index_lines,
    )?;
    let mut r = Realization::new();
    for (id, p) in points {
        r.insert_point(id, p);
    }
    for (id, l) in lines {
        r.insert_line(id, l);
    }
    Ok((s, r))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaithfulnessReport {
    /// Listed incidences that fail geometrically, as (point id, line id).
    pub missing: Vec<(String, String)>,
    /// Geometric incidences absent from the structure.
    pub extra: Vec<(String, String)>,
    /// Pairs of distinct ids sharing a canonical coordinate.
    pub collisions: Vec<(Kind, String, String)>,
}

impl FaithfulnessReport {
    pub fn is_faithful(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.collisions.is_empty()
    }

    /// The report for the dual pair (structure dual, polar-dual realization).
    pub fn dualized(&self) -> Self {
        let swap = |v: &[(String, String)]| -> Vec<(String, String)> {
            let mut w: Vec<_> = v.iter().map(|(p, l)| (l.clone(), p.clone())).collect();
            w.sort();
            w
        };
        let mut collisions: Vec<_> = self
            .collisions
            .iter()
            .map(|(k, a, b)| {
                let k = match k {
                    Kind::Point => Kind::Line,
                    Kind::Line => Kind::Point,
                };
                (k, a.clone(), b.clone())
            })
            .collect();
        collisions.sort();
        Self {
            missing: swap(&self.missing),
            extra: swap(&self.extra),
            collisions,
        }
    }

    pub fn summary(&self) -> String {
        if self.is_faithful() {
            "faithful".to_string()
        } else {
            format!(
                "not faithful: {} missing, {} extra, {} collisions",
                self.missing.len(),
                self.extra.len(),
                self.collisions.len()
            )
        }
    }
}

fn collisions<T: std::hash::Hash + Eq>(
    kind: Kind,
    ids: &[String],
    coords: &[T],
    out: &mut Vec<(Kind, String, String)>,
) {
    let mut first: HashMap<&T, usize> = HashMap::new();
    for (i, c) in coords.iter().enumerate() {
        match first.get(c) {
            Some(&j) => out.push((kind, ids[j].clone(), ids[i].clone())),
            None => {
                first.insert(c, i);
            }
        }
    }
}

/// Compares every point-line pair's geometric incidence with the structure.
/// Report lists are sorted.
pub fn check_faithful(s: &IncidenceStructure, r: &Realization) -> Result<FaithfulnessReport> {
    let pc = r.point_coords(s)?;
    let lc = r.line_coords(s)?;
    let mut report = FaithfulnessReport::default();
    for (j, l) in lc.iter().enumerate() {
        for (i, p) in pc.iter().enumerate() {
            let geometric = incident(p, l);
            let listed = s.is_incident(i, j);
            if geometric != listed {
                let pair = (s.point_ids()[i].clone(), s.line_ids()[j].clone());
                if listed {
                    report.missing.push(pair);
                } else {
                    report.extra.push(pair);
                }
            }
        }
    }
    collisions(Kind::Point, s.point_ids(), &pc, &mut report.collisions);
    collisions(Kind::Line, s.line_ids(), &lc, &mut report.collisions);
    report.missing.sort();
    report.extra.sort();
    report.collisions.sort();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid13() -> (IncidenceStructure, Realization) {
        let mut coords = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                coords.push((i, j, 1));
            }
        }
        coords.extend([(1, 0, 0), (0, 1, 0), (1, 1, 0), (1, -1, 0)]);
        let points = coords
            .iter()
            .enumerate()
            .map(|(k, &(x, y, z))| (format!("p{k}"), ProjPoint::from_ints(x, y, z).unwrap()))
            .collect();
        let lines = coords
            .iter()
            .enumerate()
            .map(|(k, &(x, y, z))| (format!("l{k}"), ProjLine::from_ints(x, y, z).unwrap()))
            .collect();
        structure_from_coordinates(points, lines).unwrap()
    }

    #[test]
    fn thirteen_is_faithful() {
        let (s, r) = grid13();
        assert_eq!(s.incidence_count(), 48);
        assert!(check_faithful(&s, &r).unwrap().is_faithful());
    }

    #[test]
    fn moved_point_is_reported() {
        let (s, mut r) = grid13();
        r.insert_point("p4", ProjPoint::from_ints(5, 7, 1).unwrap());
        let rep = check_faithful(&s, &r).unwrap();
        assert!(!rep.is_faithful());
        assert!(!rep.missing.is_empty());
        assert!(rep.missing.iter().all(|(p, _)| p == "p4"));
    }

    #[test]
    fn single_incidence() {
        let s = IncidenceStructure::numbered(1, &[vec![0]]).unwrap();
        let mut r = Realization::new();
        r.insert_point("p0", ProjPoint::from_ints(0, 0, 1).unwrap());
        r.insert_line("l0", ProjLine::from_ints(1, 0, 0).unwrap());
        assert!(check_faithful(&s, &r).unwrap().is_faithful());
        let mut partial = Realization::new();
        partial.insert_point("p0", ProjPoint::from_ints(0, 0, 1).unwrap());
        assert!(matches!(
            check_faithful(&s, &partial),
            Err(Error::UnmappedId { kind: Kind::Line, .. })
        ));
    }

    #[test]
    fn collisions_and_dual_report() {
        let (s, mut r) = grid13();
        r.insert_point("p0", ProjPoint::from_ints(1, 1, 1).unwrap());
        let rep = check_faithful(&s, &r).unwrap();
        assert_eq!(rep.collisions, vec![(Kind::Point, "p0".into(), "p8".into())]);
        let dual = check_faithful(&s.dual(), &r.polar_dual()).unwrap();
        assert_eq!(dual, rep.dualized());
    }

    #[test]
    fn transform_preserves_faithfulness() {
        let (s, r) = grid13();
        let m = ProjMap::from_ints([[2, 1, 0], [0, 1, 3], [1, 0, 1]]).unwrap();
        assert!(check_faithful(&s, &r.transformed(&m)).unwrap().is_faithful());
    }

    #[test]
    fn lines_from_points() {
        let (s, r) = grid13();
        let pts = r.points().clone();
        let r2 = Realization::from_point_coords(&s, pts).unwrap();
        assert_eq!(r, r2);
    }
}
