//! Operators that build new incidence structures from old ones: deletion,
//! superposition, splitting, and projective gluing, plus worked recipes.

mod recipes;

pub use recipes::*;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Kind, Result};
use crate::kernel::{ProjLine, ProjPoint};
use crate::projmap::{
    map_four_lines, map_four_to_four, map_one_point_three_lines, map_three_points_one_line, ProjMap,
};
use crate::realization::{check_faithful, FaithfulnessReport, Realization};
use crate::signature::Signature;
use crate::structure::IncidenceStructure;

/// A structure together with coordinates for all of its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realized {
    pub structure: IncidenceStructure,
    pub realization: Realization,
}

impl Realized {
    pub fn new(structure: IncidenceStructure, realization: Realization) -> Self {
        Self {
            structure,
            realization,
        }
    }

    pub fn signature(&self) -> Signature {
        self.structure.signature()
    }

    pub fn faithfulness(&self) -> Result<FaithfulnessReport> {
        check_faithful(&self.structure, &self.realization)
    }

    pub fn dual(&self) -> Self {
        Self {
            structure: self.structure.dual(),
            realization: self.realization.polar_dual(),
        }
    }

    pub fn transformed(&self, m: &ProjMap) -> Self {
        Self {
            structure: self.structure.clone(),
            realization: self.realization.transformed(m),
        }
    }

    pub fn prefixed(&self, prefix: &str) -> Self {
        Self {
            structure: self.structure.prefixed(prefix),
            realization: self.realization.prefixed(prefix),
        }
    }

    /// Coordinates of a referenced element.
    pub fn marked(&self, r: &ElementRef) -> Result<Marked> {
        Ok(match r.kind {
            Kind::Point => {
                self.structure.require_point(&r.id)?;
                Marked::Point(self.realization.require_point(&r.id)?.clone())
            }
            Kind::Line => {
                self.structure.require_line(&r.id)?;
                Marked::Line(self.realization.require_line(&r.id)?.clone())
            }
        })
    }
}

/// A point or line named by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ElementRef {
    pub kind: Kind,
    pub id: String,
}

impl ElementRef {
    pub fn point(id: impl Into<String>) -> Self {
        Self {
            kind: Kind::Point,
            id: id.into(),
        }
    }

    pub fn line(id: impl Into<String>) -> Self {
        Self {
            kind: Kind::Line,
            id: id.into(),
        }
    }
}

/// A marked geometric element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Marked {
    Point(ProjPoint),
    Line(ProjLine),
}

impl Marked {
    pub fn kind(&self) -> Kind {
        match self {
            Marked::Point(_) => Kind::Point,
            Marked::Line(_) => Kind::Line,
        }
    }

    pub fn transformed(&self, m: &ProjMap) -> Self {
        match self {
            Marked::Point(p) => Marked::Point(m.apply(p)),
            Marked::Line(l) => Marked::Line(m.apply_line(l)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValenceChange {
    pub kind: Kind,
    pub id: String,
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug)]
pub struct Deletion {
    pub result: Realized,
    /// Surviving elements whose valence dropped.
    pub changes: Vec<ValenceChange>,
}

impl Deletion {
    /// Surviving elements now on fewer than three incidences.
    pub fn below_three(&self) -> Vec<&ValenceChange> {
        self.changes.iter().filter(|c| c.after < 3).collect()
    }
}

/// Removes points and lines, restricting coordinates accordingly.
pub fn delete<P, L>(x: &Realized, points: P, lines: L) -> Result<Deletion>
where
    P: IntoIterator,
    P::Item: AsRef<str>,
    L: IntoIterator,
    L::Item: AsRef<str>,
{
    let s = x.structure.without(points, lines)?;
    let changes = s
        .valence_changes(&x.structure)
        .into_iter()
        .map(|(kind, id, before, after)| ValenceChange {
            kind,
            id,
            before,
            after,
        })
        .collect();
    let realization = x.realization.restricted_to(&s);
    Ok(Deletion {
        result: Realized::new(s, realization),
        changes,
    })
}

/// How to overlay B onto A: identified pairs `(in A, in B)` and an optional
/// map applied to B first.
#[derive(Clone, Debug, Default)]
pub struct GlueSpec {
    pub identify: Vec<(ElementRef, ElementRef)>,
    pub transform: Option<ProjMap>,
}

#[derive(Clone, Debug)]
pub struct Superposition {
    pub result: Realized,
    pub report: FaithfulnessReport,
    /// Ids of B's elements in the result.
    pub b_ids: BTreeMap<(Kind, String), String>,
}

/// Disjoint union of A and (transformed) B with identified elements merged.
/// B's unidentified ids are prefixed with `b_prefix`.
pub fn superpose(a: &Realized, b: &Realized, spec: &GlueSpec, b_prefix: &str) -> Result<Superposition> {
    let b_real = match &spec.transform {
        Some(m) => b.realization.transformed(m),
        None => b.realization.clone(),
    };
    let mut point_map: HashMap<String, String> = HashMap::new();
    let mut line_map: HashMap<String, String> = HashMap::new();
    let mut seen_a: HashSet<(Kind, String)> = HashSet::new();
    for (ra, rb) in &spec.identify {
        if ra.kind != rb.kind {
            return Err(Error::KindMismatch(format!(
                "{} `{}` with {} `{}`",
                ra.kind, ra.id, rb.kind, rb.id
            )));
        }
        let ca = a.marked(ra)?;
        let cb = Realized::new(b.structure.clone(), b_real.clone()).marked(rb)?;
        if ca != cb {
            return Err(Error::CoordinateMismatch(format!(
                "{} `{}` vs `{}`",
                ra.kind, ra.id, rb.id
            )));
        }
        let fresh = match ra.kind {
            Kind::Point => point_map.insert(rb.id.clone(), ra.id.clone()).is_none(),
            Kind::Line => line_map.insert(rb.id.clone(), ra.id.clone()).is_none(),
        };
        if !fresh || !seen_a.insert((ra.kind, ra.id.clone())) {
            return Err(Error::Validation(format!(
                "{} `{}` or `{}` is identified twice",
                ra.kind, ra.id, rb.id
            )));
        }
    }
    let rename_point = |id: &str| {
        point_map
            .get(id)
            .cloned()
            .unwrap_or_else(|| format!("{b_prefix}{id}"))
    };
    let rename_line = |id: &str| {
        line_map
            .get(id)
            .cloned()
            .unwrap_or_else(|| format!("{b_prefix}{id}"))
    };

    let mut point_ids: Vec<String> = a.structure.point_ids().to_vec();
    let mut realization = a.realization.restricted_to(&a.structure);
    let mut b_ids = BTreeMap::new();
    for id in b.structure.point_ids() {
        let new = rename_point(id);
        if !point_map.contains_key(id) {
            point_ids.push(new.clone());
            realization.insert_point(new.clone(), b_real.require_point(id)?.clone());
        }
        b_ids.insert((Kind::Point, id.clone()), new);
    }
    let mut lines: Vec<(String, Vec<String>)> = a.structure.lines_with_ids();
    let line_pos: HashMap<String, usize> = lines
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.clone(), i))
        .collect();
    for (id, pts) in b.structure.lines_with_ids() {
        let new = rename_line(&id);
        let mapped: Vec<String> = pts.iter().map(|p| rename_point(p)).collect();
        match line_pos.get(&new) {
            Some(&i) if line_map.contains_key(&id) => {
                for p in mapped {
                    if !lines[i].1.contains(&p) {
                        lines[i].1.push(p);
                    }
                }
            }
            _ => {
                realization.insert_line(new.clone(), b_real.require_line(&id)?.clone());
                lines.push((new.clone(), mapped));
            }
        }
        b_ids.insert((Kind::Line, id), new);
    }
    let structure = IncidenceStructure::from_lines(point_ids, lines)?;
    let report = check_faithful(&structure, &realization)?;
    Ok(Superposition {
        result: Realized::new(structure, realization),
        report,
        b_ids,
    })
}

/// Part A of a split; the complement is part B.
#[derive(Clone, Debug, Default)]
pub struct SplitSpec {
    pub part_a_points: Vec<String>,
    pub part_a_lines: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitCheck {
    pub signature_a: Signature,
    pub signature_b: Signature,
    pub both_quasi: bool,
    /// Common `k` if both parts are `(n_k)` configurations.
    pub both_k: Option<usize>,
    /// Incidences between the parts, lost by the split.
    pub cut_incidences: usize,
}

pub fn check_split(s: &IncidenceStructure, spec: &SplitSpec) -> Result<SplitCheck> {
    let mut kp = vec![false; s.num_points()];
    for id in &spec.part_a_points {
        let i = s
            .point_index(id)
            .ok_or_else(|| Error::NotAPartition(format!("unknown point `{id}`")))?;
        if std::mem::replace(&mut kp[i], true) {
            return Err(Error::NotAPartition(format!("point `{id}` listed twice")));
        }
    }
    let mut kl = vec![false; s.num_lines()];
    for id in &spec.part_a_lines {
        let j = s
            .line_index(id)
            .ok_or_else(|| Error::NotAPartition(format!("unknown line `{id}`")))?;
        if std::mem::replace(&mut kl[j], true) {
            return Err(Error::NotAPartition(format!("line `{id}` listed twice")));
        }
    }
    let a = s.induced_by_mask(&kp, &kl);
    let np: Vec<bool> = kp.iter().map(|b| !b).collect();
    let nl: Vec<bool> = kl.iter().map(|b| !b).collect();
    let b = s.induced_by_mask(&np, &nl);
    let (sa, sb) = (a.signature(), b.signature());
    let both_k = sa
        .point_counts()
        .keys()
        .next()
        .copied()
        .filter(|&k| sa.is_k_configuration(k) && sb.is_k_configuration(k));
    Ok(SplitCheck {
        both_quasi: sa.is_quasi_configuration() && sb.is_quasi_configuration(),
        cut_incidences: s.incidence_count() - a.incidence_count() - b.incidence_count(),
        signature_a: sa,
        signature_b: sb,
        both_k,
    })
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The map sending `src[i]` to `dst[i]` for mixed marked sets.
fn map_ordered(src: &[Marked; 4], dst: &[Marked; 4]) -> Result<ProjMap> {
    let pts = |v: &[Marked; 4]| -> Vec<ProjPoint> {
        v.iter()
            .filter_map(|m| match m {
                Marked::Point(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    };
    let lns = |v: &[Marked; 4]| -> Vec<ProjLine> {
        v.iter()
            .filter_map(|m| match m {
                Marked::Line(l) => Some(l.clone()),
                _ => None,
            })
            .collect()
    };
    let (sp, sl, dp, dl) = (pts(src), lns(src), pts(dst), lns(dst));
    match sp.len() {
        4 => map_four_to_four(
            &[sp[0].clone(), sp[1].clone(), sp[2].clone(), sp[3].clone()],
            &[dp[0].clone(), dp[1].clone(), dp[2].clone(), dp[3].clone()],
        ),
        3 => map_three_points_one_line(
            &[sp[0].clone(), sp[1].clone(), sp[2].clone()],
            &sl[0],
            &[dp[0].clone(), dp[1].clone(), dp[2].clone()],
            &dl[0],
        ),
        1 => map_one_point_three_lines(
            &sp[0],
            &[sl[0].clone(), sl[1].clone(), sl[2].clone()],
            &dp[0],
            &[dl[0].clone(), dl[1].clone(), dl[2].clone()],
        ),
        0 => map_four_lines(
            &[sl[0].clone(), sl[1].clone(), sl[2].clone(), sl[3].clone()],
            &[dl[0].clone(), dl[1].clone(), dl[2].clone(), dl[3].clone()],
        ),
        _ => Err(Error::UnsupportedFrame(
            "two points and two lines do not determine a projective map".into(),
        )),
    }
}

/// A candidate glue map with the matching it realizes: `src[i]` goes to
/// `dst[order[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueCandidate {
    pub map: ProjMap,
    pub order: [usize; 4],
}

/// All projective maps sending the marked set `src` onto `dst` as sets,
/// over the kind-compatible orderings in lexicographic order. Each map is
/// verified exactly; maps realizing several orderings appear once.
pub fn find_set_glue_candidates(src: &[Marked; 4], dst: &[Marked; 4]) -> Result<Vec<GlueCandidate>> {
    let count = |v: &[Marked; 4]| v.iter().filter(|m| m.kind() == Kind::Point).count();
    if count(src) != count(dst) {
        return Err(Error::NoCompatibleOrdering(format!(
            "{} marked points versus {}",
            count(src),
            count(dst)
        )));
    }
    let mut out: Vec<GlueCandidate> = Vec::new();
    for order in permutations4() {
        if (0..4).any(|i| src[i].kind() != dst[order[i]].kind()) {
            continue;
        }
        let target = order.map(|i| dst[i].clone());
        let m = map_ordered(src, &target)?;
        if (0..4).any(|i| src[i].transformed(&m) != target[i]) {
            continue;
        }
        if !out.iter().any(|c| c.map == m) {
            out.push(GlueCandidate { map: m, order });
        }
    }
    if out.is_empty() {
        return Err(Error::NoCompatibleOrdering("no ordering yields a map".into()));
    }
    Ok(out)
}

pub fn find_set_glue_map(src: &[Marked; 4], dst: &[Marked; 4]) -> Result<Vec<ProjMap>> {
    Ok(find_set_glue_candidates(src, dst)?
        .into_iter()
        .map(|c| c.map)
        .collect())
}
