//! Built-in structures. The (13_{3|4}) is given by coordinates with L = P
//! under polarity; its incidences are computed, not listed. Smaller optimal
//! 3|4 configurations come from deleting elements of it.

use serde::Serialize;

use crate::constructions::Realized;
use crate::error::Result;
use crate::format::StructureFile;
use crate::kernel::{ProjLine, ProjPoint};
use crate::obstruction::max_incidences;
use crate::realization::{check_faithful, structure_from_coordinates, FaithfulnessReport, Realization};
use crate::signature::Signature;
use crate::structure::IncidenceStructure;

/// Where an entry's data come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Exact coordinates; incidences computed from them.
    Coordinates,
    /// Deletion of elements from another entry, coordinates restricted.
    Deletion,
    /// Incidences only.
    Combinatorial,
    /// A geometric structure with the signature of an example that could not
    /// be transcribed.
    StandIn,
    /// Incidences found by search to match a described property, not copied
    /// from a drawing.
    Reconstruction,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub origin: Origin,
    pub note: String,
    pub structure: IncidenceStructure,
    pub realization: Option<Realization>,
    pub expected_signature: Signature,
    pub expected_incidences: usize,
    /// Deleted point and line ids, for deletion-derived entries.
    pub deleted: Option<(Vec<String>, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub signature: Signature,
    pub incidences: usize,
    pub signature_matches: bool,
    pub incidences_match: bool,
    pub faithfulness: Option<FaithfulnessReport>,
}

impl EntryReport {
    pub fn ok(&self) -> bool {
        self.signature_matches
            && self.incidences_match
            && self.faithfulness.as_ref().map_or(true, |f| f.is_faithful())
    }
}

impl CatalogEntry {
    pub fn verify(&self) -> Result<EntryReport> {
        let signature = self.structure.signature();
        let incidences = self.structure.incidence_count();
        let faithfulness = match &self.realization {
            Some(r) => Some(check_faithful(&self.structure, r)?),
            None => None,
        };
        Ok(EntryReport {
            name: self.name.clone(),
            signature_matches: signature == self.expected_signature,
            incidences_match: incidences == self.expected_incidences,
            signature,
            incidences,
            faithfulness,
        })
    }

    pub fn file(&self) -> StructureFile {
        StructureFile::from_structure(&self.name, &self.structure, self.realization.as_ref())
            .expect("catalog realizations cover every element")
    }

    pub fn realized(&self) -> Option<Realized> {
        self.realization
            .as_ref()
            .map(|r| Realized::new(self.structure.clone(), r.clone()))
    }
}

fn entry(
    name: &str,
    origin: Origin,
    note: &str,
    structure: IncidenceStructure,
    realization: Option<Realization>,
    expected_signature: Signature,
    expected_incidences: usize,
) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        origin,
        note: note.into(),
        structure,
        realization,
        expected_signature,
        expected_incidences,
        deleted: None,
    }
}

/// The nine grid points (i, j, 1), i, j in {-1, 0, 1}, and the four points
/// at infinity (1,0,0), (0,1,0), (1,1,0), (1,-1,0); lines are the polars of
/// the same triples.
fn thirteen() -> (IncidenceStructure, Realization) {
    let mut triples: Vec<[i64; 3]> = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            triples.push([i, j, 1]);
        }
    }
    triples.extend([[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, -1, 0]]);
    let points = triples
        .iter()
        .enumerate()
        .map(|(k, t)| (format!("p{}", k + 1), ProjPoint::from_ints(t[0], t[1], t[2]).expect("nonzero")))
        .collect();
    let lines = triples
        .iter()
        .enumerate()
        .map(|(k, t)| (format!("l{}", k + 1), ProjLine::from_ints(t[0], t[1], t[2]).expect("nonzero")))
        .collect();
    structure_from_coordinates(points, lines).expect("the grid satisfies the girth bound")
}

/// Index subsets of `0..n` of size `k` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Valences left after deleting the given points and lines.
fn residual(s: &IncidenceStructure, dp: &[usize], dl: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let pv = (0..s.num_points())
        .filter(|i| !dp.contains(i))
        .map(|i| s.lines_through(i).iter().filter(|l| !dl.contains(l)).count())
        .collect();
    let lv = (0..s.num_lines())
        .filter(|j| !dl.contains(j))
        .map(|j| s.points_on(j).iter().filter(|p| !dp.contains(p)).count())
        .collect();
    (pv, lv)
}

/// The lexicographically first deletion of `k` points and `k` lines that
/// passes `accept`.
fn first_deletion(
    s: &IncidenceStructure,
    k: usize,
    accept: impl Fn(&[usize], &[usize], &[usize], &[usize]) -> bool,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let pc = combinations(s.num_points(), k);
    let lc = combinations(s.num_lines(), k);
    for dp in &pc {
        for dl in &lc {
            let (pv, lv) = residual(s, dp, dl);
            if accept(dp, dl, &pv, &lv) {
                return Some((dp.clone(), dl.clone()));
            }
        }
    }
    None
}

fn all_34(v: &[usize]) -> bool {
    v.iter().all(|&x| x == 3 || x == 4)
}

fn deletion_entry(
    base: &(IncidenceStructure, Realization),
    name: &str,
    note: &str,
    k: usize,
    expected: (Signature, usize),
    accept: impl Fn(&[usize], &[usize], &[usize], &[usize]) -> bool,
) -> CatalogEntry {
    let (s, r) = base;
    let (dp, dl) = first_deletion(s, k, accept).expect("a valid deletion pattern exists");
    let pids: Vec<String> = dp.iter().map(|&i| s.point_ids()[i].clone()).collect();
    let lids: Vec<String> = dl.iter().map(|&j| s.line_ids()[j].clone()).collect();
    let t = s.without(&pids, &lids).expect("deleted ids exist");
    let rr = r.restricted_to(&t);
    let mut e = entry(name, Origin::Deletion, note, t, Some(rr), expected.0, expected.1);
    e.deleted = Some((pids, lids));
    e
}

fn numbered(n: usize, lines: &[&[usize]]) -> IncidenceStructure {
    let lines: Vec<Vec<usize>> = lines.iter().map(|l| l.to_vec()).collect();
    IncidenceStructure::numbered(n, &lines).expect("catalog data satisfy the girth bound")
}

fn with_coords(points: &[(&str, [i64; 3])], lines: &[(&str, [i64; 3])]) -> (IncidenceStructure, Realization) {
    let p = points
        .iter()
        .map(|(id, t)| (id.to_string(), ProjPoint::from_ints(t[0], t[1], t[2]).expect("nonzero")))
        .collect();
    let l = lines
        .iter()
        .map(|(id, t)| (id.to_string(), ProjLine::from_ints(t[0], t[1], t[2]).expect("nonzero")))
        .collect();
    structure_from_coordinates(p, l).expect("catalog data satisfy the girth bound")
}

pub fn pappus() -> (IncidenceStructure, Realization) {
    with_coords(
        &[
            ("a1", [0, 0, 1]),
            ("a2", [1, 0, 1]),
            ("a3", [3, 0, 1]),
            ("b1", [0, 1, 1]),
            ("b2", [2, 1, 1]),
            ("b3", [5, 1, 1]),
            ("c1", [13, 2, 5]),
            ("c2", [15, 3, 8]),
            ("c3", [2, 1, 3]),
        ],
        &[
            ("a", [0, 1, 0]),
            ("b", [0, 1, -1]),
            ("c", [1, -29, 9]),
            ("a1b2", [1, -2, 0]),
            ("a2b1", [1, 1, -1]),
            ("a1b3", [1, -5, 0]),
            ("a3b1", [1, 3, -3]),
            ("a2b3", [1, -4, -1]),
            ("a3b2", [1, 1, -3]),
        ],
    )
}

pub fn desargues() -> (IncidenceStructure, Realization) {
    with_coords(
        &[
            ("o", [0, 0, 1]),
            ("a", [1, 0, 1]),
            ("b", [0, 1, 1]),
            ("c", [2, 3, 1]),
            ("a'", [3, 0, 1]),
            ("b'", [0, 2, 1]),
            ("c'", [6, 9, 1]),
            ("x", [3, -4, -1]),
            ("y", [6, 5, -1]),
            ("z", [1, 3, 0]),
        ],
        &[
            ("oa", [0, 1, 0]),
            ("ob", [1, 0, 0]),
            ("oc", [3, -2, 0]),
            ("ab", [1, 1, -1]),
            ("bc", [1, -1, 1]),
            ("ac", [3, -1, -3]),
            ("a'b'", [2, 3, -6]),
            ("b'c'", [7, -6, 12]),
            ("a'c'", [3, -1, -9]),
            ("axis", [3, -1, 13]),
        ],
    )
}

pub fn build_catalog() -> Vec<CatalogEntry> {
    let base = thirteen();
    let mut out = Vec::new();
    out.push(entry(
        "13_34",
        Origin::Coordinates,
        "optimal (13_{3|4}): nine affine grid points and four points at infinity, lines the polars of the same triples",
        base.0.clone(),
        Some(base.1.clone()),
        Signature::three_four(4, 9),
        48,
    ));
    for (n, name, a) in [(12, "12_34", 6), (11, "11_34", 7)] {
        let target = max_incidences(n as u64) as usize;
        out.push(deletion_entry(
            &base,
            name,
            &format!("optimal ({n}_{{3|4}}), first deletion pattern from 13_34 reaching {target} incidences"),
            13 - n,
            (Signature::three_four(a, n - a), target),
            |_, _, pv, lv| all_34(pv) && all_34(lv) && pv.iter().sum::<usize>() == target,
        ));
    }
    let (s13, _) = &base;
    out.push(deletion_entry(
        &base,
        "10_34a",
        "optimal (10_{3|4}) from 13_34: three 3-valent points and the three 4-valent lines each holding two of them",
        3,
        (Signature::three_four(7, 3), 33),
        |dp, dl, pv, lv| {
            dp.iter().all(|&p| s13.point_valence(p) == 3)
                && dl.iter().all(|&l| {
                    s13.line_valence(l) == 4 && s13.points_on(l).iter().filter(|p| dp.contains(p)).count() == 2
                })
                && all_34(pv)
                && all_34(lv)
                && pv.iter().sum::<usize>() == 33
        },
    ));
    out.push(deletion_entry(
        &base,
        "10_34b",
        "optimal (10_{3|4}) from 13_34: three 3-valent lines and the three 4-valent points each on two of them",
        3,
        (Signature::three_four(7, 3), 33),
        |dp, dl, pv, lv| {
            dl.iter().all(|&l| s13.line_valence(l) == 3)
                && dp.iter().all(|&p| {
                    s13.point_valence(p) == 4
                        && s13.lines_through(p).iter().filter(|l| dl.contains(l)).count() == 2
                })
                && all_34(pv)
                && all_34(lv)
                && pv.iter().sum::<usize>() == 33
        },
    ));
    out.push(entry(
        "9_34",
        Origin::Combinatorial,
        "optimal (9_{3|4}) with 28 incidences, the unique structure with signature 8x^3+x^4 | 8y^3+y^4; \
         its realizations need irrational coordinates",
        numbered(
            9,
            &[
                &[0, 1, 5],
                &[0, 2, 6],
                &[0, 4, 8],
                &[1, 3, 4],
                &[1, 7, 8],
                &[2, 3, 7],
                &[2, 5, 8],
                &[3, 6, 8],
                &[4, 5, 6, 7],
            ],
        ),
        None,
        Signature::three_four(8, 1),
        28,
    ));
    out.push(deletion_entry(
        &base,
        "9_3_del",
        "a (9_3) from 13_34 by the first deletion of four points and four lines; rational input for the 3|4 to 4 pipeline",
        4,
        (Signature::regular(9, 3), 27),
        |_, _, pv, lv| pv.iter().all(|&v| v == 3) && lv.iter().all(|&v| v == 3),
    ));
    out.push({
        let mut e = deletion_entry(
            &base,
            "10_34_sub",
            "stand-in for the non-optimal (10_{3|4}) example with signature 8x^3+2x^4 | 8y^3+2y^4: \
             first deletion from 13_34 with that signature",
            3,
            (Signature::three_four(8, 2), 32),
            |_, _, pv, lv| {
                pv.iter().filter(|&&v| v == 3).count() == 8
                    && pv.iter().filter(|&&v| v == 4).count() == 2
                    && lv.iter().filter(|&&v| v == 3).count() == 8
                    && lv.iter().filter(|&&v| v == 4).count() == 2
            },
        );
        e.origin = Origin::StandIn;
        e
    });
    out.push(entry(
        "12_34_pappus",
        Origin::Reconstruction,
        "optimal (12_{3|4}) containing Pappus as an induced subconfiguration and Desargues as a \
         non-induced one; no optimal (12_{3|4}) contains an induced Desargues",
        numbered(
            12,
            &[
                &[0, 1, 2],
                &[0, 3, 7, 8],
                &[0, 4, 6, 9],
                &[1, 3, 6, 10],
                &[1, 5, 7, 9],
                &[2, 4, 7, 10],
                &[2, 5, 6, 8],
                &[3, 9, 11],
                &[4, 8, 11],
                &[5, 10, 11],
                &[6, 7, 11],
                &[8, 9, 10],
            ],
        ),
        None,
        Signature::three_four(6, 6),
        42,
    ));
    let fano: Vec<Vec<usize>> = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
    out.push(entry(
        "fano",
        Origin::Combinatorial,
        "the Fano plane, the unique (7_3); not realizable over the reals",
        IncidenceStructure::numbered(7, &fano).expect("girth"),
        None,
        Signature::regular(7, 3),
        21,
    ));
    let mk: Vec<Vec<usize>> = (0..8).map(|i| vec![i, (i + 1) % 8, (i + 3) % 8]).collect();
    out.push(entry(
        "8_3",
        Origin::Combinatorial,
        "the Moebius-Kantor configuration, the unique combinatorial (8_3); not realizable over the reals",
        IncidenceStructure::numbered(8, &mk).expect("girth"),
        None,
        Signature::regular(8, 3),
        24,
    ));
    let (ps, pr) = pappus();
    out.push(entry(
        "pappus",
        Origin::Coordinates,
        "Pappus (9_3) with rational coordinates",
        ps,
        Some(pr),
        Signature::regular(9, 3),
        27,
    ));
    let (ds, dr) = desargues();
    out.push(entry(
        "desargues",
        Origin::Coordinates,
        "Desargues (10_3) with rational coordinates",
        ds,
        Some(dr),
        Signature::regular(10, 3),
        30,
    ));
    out
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    build_catalog().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;

    #[test]
    fn every_entry_verifies() {
        for e in build_catalog() {
            let r = e.verify().unwrap();
            assert!(r.ok(), "{}: {:?}", e.name, r);
        }
    }

    #[test]
    fn deletion_counts() {
        let got: Vec<(String, usize)> = build_catalog()
            .iter()
            .filter(|e| e.origin == Origin::Deletion)
            .map(|e| (e.name.clone(), e.structure.incidence_count()))
            .collect();
        let want = [("12_34", 42), ("11_34", 37), ("10_34a", 33), ("10_34b", 33), ("9_3_del", 27)];
        assert_eq!(got.len(), want.len());
        for ((n, c), (wn, wc)) in got.iter().zip(want) {
            assert_eq!((n.as_str(), *c), (wn, wc));
        }
    }

    #[test]
    fn thirteen_is_polar_self_dual() {
        let e = catalog_entry("13_34").unwrap();
        let d = e.realized().unwrap().dual();
        assert!(d.faithfulness().unwrap().is_faithful());
        assert!(are_isomorphic(&e.structure, &e.structure.dual()));
        assert_eq!(e.realization.unwrap().points().values().filter(|p| p.is_at_infinity()).count(), 4);
    }

    #[test]
    fn ten_variants_are_dual_patterns() {
        let a = catalog_entry("10_34a").unwrap();
        let b = catalog_entry("10_34b").unwrap();
        let (ap, al) = a.deleted.unwrap();
        let (bp, bl) = b.deleted.unwrap();
        assert_eq!((ap.len(), al.len(), bp.len(), bl.len()), (3, 3, 3, 3));
        assert_eq!(a.structure.signature(), b.structure.signature().dual());
    }

    #[test]
    fn no_deletion_reaches_nine_with_28() {
        let (s, _) = thirteen();
        let hit = first_deletion(&s, 4, |_, _, pv, lv| {
            all_34(pv) && all_34(lv) && pv.iter().sum::<usize>() == 28
        });
        assert!(hit.is_none());
    }

    #[test]
    fn deleted_nine_is_pappus() {
        let a = catalog_entry("9_3_del").unwrap();
        let b = catalog_entry("pappus").unwrap();
        assert!(are_isomorphic(&a.structure, &b.structure));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
