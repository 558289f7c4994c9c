//! Worked construction recipes built from the basic operators.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    delete, find_set_glue_candidates, superpose, ElementRef, GlueCandidate, GlueSpec, Marked,
    Realized, Superposition,
};
use crate::error::{Error, Result};
use crate::kernel::{incident, join, meet, ProjLine, ProjPoint, Rational};
use crate::projmap::ProjMap;
use crate::realization::{check_faithful, FaithfulnessReport, Realization};
use crate::structure::IncidenceStructure;

fn fresh_id(base: &str, taken: &HashSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|id| !taken.contains(id))
        .expect("some suffix is free")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingReport {
    /// Paired line ids.
    pub pairs: Vec<(String, String)>,
    pub accepted: bool,
    pub reason: Option<String>,
}

/// A structure with four marked deficient elements, ready for gluing.
#[derive(Clone, Debug)]
pub struct Patched {
    pub result: Realized,
    pub marked: Vec<ElementRef>,
    pub matchings: Vec<MatchingReport>,
}

impl Patched {
    pub fn marked_coords(&self) -> Result<[Marked; 4]> {
        let v = self
            .marked
            .iter()
            .map(|r| self.result.marked(r))
            .collect::<Result<Vec<_>>>()?;
        v.try_into()
            .map_err(|_| Error::Precondition("exactly four marked elements are required".into()))
    }
}

/// Perfect matchings of `0..n` in lexicographic order.
fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = free[0];
        for k in 1..free.len() {
            let rest: Vec<usize> = free[1..].iter().copied().filter(|&x| x != free[k]).collect();
            acc.push((a, free[k]));
            rec(&rest, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

/// Adds one new point on each pair of the given lines, trying every perfect
/// matching and keeping the first that creates no unwanted incidence.
fn patch_lines(x: &Realized, lines: &[String], base: &str) -> Result<(Realized, Vec<String>, Vec<MatchingReport>)> {
    let s = &x.structure;
    let coords: Vec<ProjLine> = lines
        .iter()
        .map(|id| x.realization.require_line(id).cloned())
        .collect::<Result<_>>()?;
    let existing: HashSet<ProjPoint> = x.realization.point_coords(s)?.into_iter().collect();
    let all_lines: Vec<(String, ProjLine)> = s
        .line_ids()
        .iter()
        .map(|id| Ok((id.clone(), x.realization.require_line(id)?.clone())))
        .collect::<Result<_>>()?;
    let mut taken: HashSet<String> = s.point_ids().iter().cloned().collect();
    let new_ids: Vec<String> = (0..lines.len() / 2)
        .map(|k| {
            let id = fresh_id(&format!("{base}{k}"), &taken);
            taken.insert(id.clone());
            id
        })
        .collect();

    let mut reports = Vec::new();
    let mut chosen: Option<Vec<(usize, usize)>> = None;
    for m in perfect_matchings(lines.len()) {
        let pairs = m
            .iter()
            .map(|&(a, b)| (lines[a].clone(), lines[b].clone()))
            .collect();
        let reason = (|| -> Option<String> {
            let mut new_pts = HashSet::new();
            for &(a, b) in &m {
                let p = meet(&coords[a], &coords[b]).ok()?;
                if existing.contains(&p) {
                    return Some(format!("meet of {} and {} is an existing point", lines[a], lines[b]));
                }
                if !new_pts.insert(p.clone()) {
                    return Some(format!("meet of {} and {} repeats a new point", lines[a], lines[b]));
                }
                if let Some((id, _)) = all_lines
                    .iter()
                    .find(|(id, l)| *id != lines[a] && *id != lines[b] && incident(&p, l))
                {
                    return Some(format!("meet of {} and {} lies on {id}", lines[a], lines[b]));
                }
            }
            None
        })();
        let accepted = reason.is_none() && chosen.is_none();
        if reason.is_none() && chosen.is_none() {
            chosen = Some(m.clone());
        }
        reports.push(MatchingReport {
            pairs,
            accepted,
            reason,
        });
    }
    let m = chosen.ok_or_else(|| {
        Error::NoValidMatching(format!("all {} matchings create unwanted incidences", reports.len()))
    })?;
    let mut point_ids = s.point_ids().to_vec();
    let mut line_pts = s.lines_with_ids();
    let mut realization = x.realization.clone();
    for (k, &(a, b)) in m.iter().enumerate() {
        let id = new_ids[k].clone();
        point_ids.push(id.clone());
        realization.insert_point(id.clone(), meet(&coords[a], &coords[b])?);
        for (lid, pts) in line_pts.iter_mut() {
            if *lid == lines[a] || *lid == lines[b] {
                pts.push(id.clone());
            }
        }
    }
    let structure = IncidenceStructure::from_lines(point_ids, line_pts)?;
    let result = Realized::new(structure, realization);
    let report = result.faithfulness()?;
    if !report.is_faithful() {
        return Err(Error::NoValidMatching(report.summary()));
    }
    Ok((result, new_ids, reports))
}

fn require_four_valent(x: &Realized, id: &str) -> Result<usize> {
    let i = x.structure.require_point(id)?;
    if x.structure.point_valence(i) != 4 {
        return Err(Error::Precondition(format!(
            "point `{id}` has valence {}, expected 4",
            x.structure.point_valence(i)
        )));
    }
    Ok(i)
}

/// Deletes two 4-valent points sharing no line and patches the eight
/// resulting 3-valent lines with four new points, which end up 2-valent.
pub fn recipe_delete2_patch4(x: &Realized, p1: &str, p2: &str) -> Result<Patched> {
    let i1 = require_four_valent(x, p1)?;
    let i2 = require_four_valent(x, p2)?;
    if i1 == i2 {
        return Err(Error::Precondition("the two points must differ".into()));
    }
    if let Some(l) = x.structure.common_line(i1, i2) {
        return Err(Error::Precondition(format!(
            "`{p1}` and `{p2}` share line `{}`",
            x.structure.line_ids()[l]
        )));
    }
    let lines: Vec<String> = [i1, i2]
        .iter()
        .flat_map(|&i| x.structure.lines_through(i).iter())
        .map(|&l| x.structure.line_ids()[l].clone())
        .collect();
    let del = delete(x, [p1, p2], Vec::<String>::new())?;
    let (result, new_ids, matchings) = patch_lines(&del.result, &lines, "q")?;
    Ok(Patched {
        result,
        marked: new_ids.into_iter().map(ElementRef::point).collect(),
        matchings,
    })
}

/// Deletes two 4-valent points on a common line and patches the six other
/// 3-valent lines with three new points. The common line stays 2-valent.
pub fn recipe_delete2_sameline_patch3(x: &Realized, p1: &str, p2: &str) -> Result<Patched> {
    let i1 = require_four_valent(x, p1)?;
    let i2 = require_four_valent(x, p2)?;
    let shared = x
        .structure
        .common_line(i1, i2)
        .filter(|_| i1 != i2)
        .ok_or_else(|| Error::NotCollinear(format!("`{p1}` and `{p2}`")))?;
    let lines: Vec<String> = [i1, i2]
        .iter()
        .flat_map(|&i| x.structure.lines_through(i).iter())
        .filter(|&&l| l != shared)
        .map(|&l| x.structure.line_ids()[l].clone())
        .collect();
    let del = delete(x, [p1, p2], Vec::<String>::new())?;
    let (result, new_ids, matchings) = patch_lines(&del.result, &lines, "q")?;
    let mut marked: Vec<ElementRef> = new_ids.into_iter().map(ElementRef::point).collect();
    marked.push(ElementRef::line(x.structure.line_ids()[shared].clone()));
    Ok(Patched {
        result,
        marked,
        matchings,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    pub index: usize,
    pub order: [usize; 4],
    pub outcome: String,
}

#[derive(Clone, Debug)]
pub struct GlueOutcome {
    pub result: Realized,
    pub map: ProjMap,
    pub candidates: Vec<CandidateReport>,
}

/// Maps sending B's marked elements onto A's, as candidates for gluing.
pub fn glue_candidates(a: &Patched, b: &Patched) -> Result<Vec<GlueCandidate>> {
    find_set_glue_candidates(&b.marked_coords()?, &a.marked_coords()?)
}

/// Superposes B (transformed by the candidate map) onto A, identifying the
/// marked elements. Fails on any coincidence beyond the marked elements.
pub fn glue_with(a: &Patched, b: &Patched, c: &GlueCandidate, b_prefix: &str) -> Result<Superposition> {
    let identify = (0..4)
        .map(|i| (a.marked[c.order[i]].clone(), b.marked[i].clone()))
        .collect();
    let spec = GlueSpec {
        identify,
        transform: Some(c.map.clone()),
    };
    let sup = superpose(&a.result, &b.result, &spec, b_prefix)?;
    if !sup.report.collisions.is_empty() {
        let shown: Vec<String> = sup
            .report
            .collisions
            .iter()
            .take(4)
            .map(|(k, x, y)| format!("{k} {x} = {y}"))
            .collect();
        return Err(Error::DegenerateOverlay(format!(
            "{} coincidences ({})",
            sup.report.collisions.len(),
            shown.join(", ")
        )));
    }
    Ok(sup)
}

/// Tries every candidate map in order and returns the first clean
/// 4-configuration.
pub fn glue_deficient_pair(a: &Patched, b: &Patched, b_prefix: &str) -> Result<GlueOutcome> {
    let candidates = glue_candidates(a, b)?;
    let mut reports = Vec::new();
    for (index, c) in candidates.iter().enumerate() {
        let outcome = match glue_with(a, b, c, b_prefix) {
            Err(e) => e.to_string(),
            Ok(sup) if !sup.report.is_faithful() => sup.report.summary(),
            Ok(sup) if !sup.result.structure.is_k_configuration(4) => {
                format!("not a 4-configuration: {}", sup.result.signature())
            }
            Ok(sup) => {
                reports.push(CandidateReport {
                    index,
                    order: c.order,
                    outcome: "ok".into(),
                });
                return Ok(GlueOutcome {
                    result: sup.result,
                    map: c.map.clone(),
                    candidates: reports,
                });
            }
        };
        reports.push(CandidateReport {
            index,
            order: c.order,
            outcome,
        });
    }
    Err(Error::ExhaustedCandidates(
        reports
            .into_iter()
            .map(|r| format!("#{} {:?}: {}", r.index, r.order, r.outcome))
            .collect(),
    ))
}

#[derive(Clone, Debug)]
pub struct TwoCopies {
    pub result: Realized,
    pub report: FaithfulnessReport,
    pub is_four_configuration: bool,
    pub new_lines: Vec<String>,
}

/// Two copies of a structure with exactly four 3-valent points, the second
/// moved by `transform`, joined by two new lines that each pass through two
/// 3-valent points of each copy. B's ids get the prefix `B.`.
pub fn recipe_two_copies_two_lines(x: &Realized, transform: &ProjMap) -> Result<TwoCopies> {
    let s = &x.structure;
    let deficient: Vec<usize> = (0..s.num_points()).filter(|&i| s.point_valence(i) == 3).collect();
    if deficient.len() != 4 {
        return Err(Error::Precondition(format!(
            "need exactly four 3-valent points, found {}",
            deficient.len()
        )));
    }
    let y = x.transformed(transform).prefixed("B.");
    let a_pts: HashSet<ProjPoint> = x.realization.point_coords(s)?.into_iter().collect();
    let a_lns: HashSet<ProjLine> = x.realization.line_coords(s)?.into_iter().collect();
    let shared: Vec<String> = y
        .realization
        .points()
        .iter()
        .filter(|(_, p)| a_pts.contains(p))
        .map(|(id, _)| id.clone())
        .chain(
            y.realization
                .lines()
                .iter()
                .filter(|(_, l)| a_lns.contains(l))
                .map(|(id, _)| id.clone()),
        )
        .collect();
    if !shared.is_empty() {
        return Err(Error::DegenerateOverlay(format!(
            "{} elements of the second copy coincide with the first (e.g. {})",
            shared.len(),
            shared[0]
        )));
    }
    let a_coord = |i: usize| x.realization.require_point(&s.point_ids()[i]).cloned();
    let b_coords: Vec<ProjPoint> = deficient
        .iter()
        .map(|&i| y.realization.require_point(&format!("B.{}", s.point_ids()[i])).cloned())
        .collect::<Result<_>>()?;
    let partitions = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
    let mut found = None;
    for part in partitions {
        let l1 = join(&a_coord(deficient[part[0]])?, &a_coord(deficient[part[1]])?)?;
        let l2 = join(&a_coord(deficient[part[2]])?, &a_coord(deficient[part[3]])?)?;
        let on1: Vec<usize> = (0..4).filter(|&k| incident(&b_coords[k], &l1)).collect();
        let on2: Vec<usize> = (0..4).filter(|&k| incident(&b_coords[k], &l2)).collect();
        if on1.len() == 2 && on2.len() == 2 && on1.iter().all(|k| !on2.contains(k)) {
            found = Some((part, l1, l2, on1, on2));
            break;
        }
    }
    let (part, l1, l2, on1, on2) = found.ok_or_else(|| {
        Error::Precondition(
            "no pairing of the 3-valent points puts two of each copy on a common line".into(),
        )
    })?;
    let mut point_ids = s.point_ids().to_vec();
    point_ids.extend(y.structure.point_ids().iter().cloned());
    let mut lines = s.lines_with_ids();
    lines.extend(y.structure.lines_with_ids());
    let mut taken: HashSet<String> = lines.iter().map(|(id, _)| id.clone()).collect();
    let mut realization = x.realization.clone();
    for (id, p) in y.realization.points() {
        realization.insert_point(id.clone(), p.clone());
    }
    for (id, l) in y.realization.lines() {
        realization.insert_line(id.clone(), l.clone());
    }
    let mut new_lines = Vec::new();
    for (a_pair, b_pair, coords) in [(&part[0..2], &on1, l1), (&part[2..4], &on2, l2)] {
        let id = fresh_id(&format!("n{}", new_lines.len()), &taken);
        taken.insert(id.clone());
        let mut pts: Vec<String> = a_pair.iter().map(|&k| s.point_ids()[deficient[k]].clone()).collect();
        pts.extend(b_pair.iter().map(|&k| format!("B.{}", s.point_ids()[deficient[k]])));
        realization.insert_line(id.clone(), coords);
        lines.push((id.clone(), pts));
        new_lines.push(id);
    }
    let structure = IncidenceStructure::from_lines(point_ids, lines)?;
    let report = check_faithful(&structure, &realization)?;
    let is_four_configuration = report.is_faithful() && structure.is_k_configuration(4);
    Ok(TwoCopies {
        result: Realized::new(structure, realization),
        report,
        is_four_configuration,
        new_lines,
    })
}

/// Parameters chosen by the genericity search for one translation step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationStep {
    pub premap: ProjMap,
    pub direction: [String; 2],
    pub attempts: usize,
    pub randomized: bool,
}

#[derive(Clone, Debug)]
pub struct FourFromThreeFour {
    pub result: Realized,
    pub steps: Vec<TranslationStep>,
    pub seed: u64,
    /// `16a + 16b + 4c` for the input signature.
    pub expected_size: usize,
}

/// `16a + 16b + 4c` for `(a x^3 + b x^4, c y^3 + d y^4)`.
pub fn thirty_four_output_size(sig: &crate::signature::Signature) -> usize {
    let get = |m: &std::collections::BTreeMap<usize, usize>, k| m.get(&k).copied().unwrap_or(0);
    16 * get(sig.point_counts(), 3) + 16 * get(sig.point_counts(), 4) + 4 * get(sig.line_counts(), 3)
}

fn premaps() -> Vec<ProjMap> {
    [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, 1, 0], [1, 3, 7]],
        [[2, 1, 0], [1, 3, 1], [3, 5, 11]],
        [[1, 2, 3], [5, 1, 2], [2, 7, 13]],
    ]
    .into_iter()
    .map(|m| ProjMap::from_ints(m).expect("invertible"))
    .collect()
}

fn direction_grid() -> Vec<(Rational, Rational)> {
    let mut v = Vec::new();
    for h in 1..=5i64 {
        for c in 1..=h {
            for a in -h..=h {
                for b in -h..=h {
                    if a.abs().max(b.abs()).max(c) != h || (a == 0 && b == 0) {
                        continue;
                    }
                    v.push((Rational::new(a.into(), c.into()), Rational::new(b.into(), c.into())));
                }
            }
        }
    }
    v
}

/// Four translated copies plus one line per 3-valent point in the
/// translation direction. `None` when the placement is not faithful.
fn translate_step(y: &Realized, premap: &ProjMap, v: &(Rational, Rational)) -> Result<Option<Realized>> {
    let s = &y.structure;
    let g = y.realization.transformed(premap);
    if g.points().values().any(|p| p.is_at_infinity()) {
        return Ok(None);
    }
    let ideal = ProjPoint::new([v.0.clone(), v.1.clone(), Rational::zero()])?;
    let mut point_ids = Vec::new();
    let mut lines = Vec::new();
    let mut realization = Realization::new();
    for k in 0..4i64 {
        let kk = Rational::from_integer(BigInt::from(k));
        let t = ProjMap::translation(&(&v.0 * &kk), &(&v.1 * &kk));
        let copy = g.transformed(&t);
        for id in s.point_ids() {
            let nid = format!("{id}.{k}");
            realization.insert_point(nid.clone(), copy.require_point(id)?.clone());
            point_ids.push(nid);
        }
        for (id, pts) in s.lines_with_ids() {
            realization.insert_line(format!("{id}.{k}"), copy.require_line(&id)?.clone());
            lines.push((format!("{id}.{k}"), pts.iter().map(|p| format!("{p}.{k}")).collect()));
        }
    }
    for (i, id) in s.point_ids().iter().enumerate() {
        if s.point_valence(i) != 3 {
            continue;
        }
        let l = match join(g.require_point(id)?, &ideal) {
            Ok(l) => l,
            Err(_) => return Ok(None),
        };
        realization.insert_line(format!("{id}.v"), l);
        lines.push((format!("{id}.v"), (0..4).map(|k| format!("{id}.{k}")).collect()));
    }
    let structure = match IncidenceStructure::from_lines(point_ids, lines) {
        Ok(s) => s,
        Err(Error::GirthViolation { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let report = check_faithful(&structure, &realization)?;
    Ok(report
        .is_faithful()
        .then(|| Realized::new(structure, realization)))
}

fn search_step(y: &Realized, rng: &mut ChaCha8Rng, max_random: usize) -> Result<(Realized, TranslationStep)> {
    let mut attempts = 0;
    for premap in premaps() {
        if y.realization.transformed(&premap).points().values().any(|p| p.is_at_infinity()) {
            continue;
        }
        for v in direction_grid() {
            attempts += 1;
            if let Some(r) = translate_step(y, &premap, &v)? {
                return Ok((
                    r,
                    TranslationStep {
                        premap,
                        direction: [v.0.to_string(), v.1.to_string()],
                        attempts,
                        randomized: false,
                    },
                ));
            }
        }
    }
    for _ in 0..max_random {
        attempts += 1;
        let mut m = [[0i64; 3]; 3];
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e = rng.gen_range(-9..=9);
            }
        }
        let Ok(premap) = ProjMap::from_ints(m) else {
            continue;
        };
        let den: i64 = rng.gen_range(1..=13);
        let v = (
            Rational::new(rng.gen_range(-29..=29i64).into(), den.into()),
            Rational::new(rng.gen_range(-29..=29i64).into(), den.into()),
        );
        if v.0.is_zero() && v.1.is_zero() {
            continue;
        }
        if let Some(r) = translate_step(y, &premap, &v)? {
            return Ok((
                r,
                TranslationStep {
                    premap,
                    direction: [v.0.to_string(), v.1.to_string()],
                    attempts,
                    randomized: true,
                },
            ));
        }
    }
    Err(Error::SearchExhausted(format!(
        "no generic translation among {attempts} candidates"
    )))
}

/// Builds a 4-configuration from a faithful 3|4-configuration: translate
/// into four copies joined by lines through the 3-valent point orbits, take
/// the polar dual, and repeat.
pub fn recipe_34_to_4(x: &Realized, seed: u64) -> Result<FourFromThreeFour> {
    let sig = x.signature();
    if !sig.is_34_configuration() {
        return Err(Error::Precondition(format!("{sig} is not a 3|4-configuration")));
    }
    let report = x.faithfulness()?;
    if !report.is_faithful() {
        return Err(Error::Precondition(format!("input realization is {}", report.summary())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (first, s1) = search_step(x, &mut rng, 200)?;
    let (second, s2) = search_step(&first.dual(), &mut rng, 200)?;
    let expected_size = thirty_four_output_size(&sig);
    debug_assert!(second.structure.is_k_configuration(4) || sig.point_counts().is_empty());
    Ok(FourFromThreeFour {
        result: second,
        steps: vec![s1, s2],
        seed,
        expected_size,
    })
}

/// The half-turn about the origin, the default placement of the second copy
/// in [`recipe_two_copies_two_lines`].
pub fn half_turn() -> ProjMap {
    ProjMap::from_ints([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]).expect("invertible")
}
