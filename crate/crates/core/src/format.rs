//! JSON structure files. Lines list their points in order; coordinates are
//! optional and written as strings so rationals stay exact.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Kind, Result};
use crate::kernel::{ProjLine, ProjPoint};
use crate::realization::Realization;
use crate::structure::IncidenceStructure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub name: String,
    pub points: Vec<String>,
    pub lines: Vec<LineRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Coords>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineRecord {
    pub id: String,
    pub points: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coords {
    pub points: Triples,
    pub lines: Triples,
}

/// Id to homogeneous triple, kept in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Triples(pub Vec<(String, [String; 3])>);

impl Serialize for Triples {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (id, t) in &self.0 {
            m.serialize_entry(id, t)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for Triples {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Triples;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from id to three strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<Triples, A::Error> {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                while let Some((k, v)) = a.next_entry::<String, [String; 3]>()? {
                    if !seen.insert(k.clone()) {
                        return Err(serde::de::Error::custom(format!("duplicate key `{k}`")));
                    }
                    out.push((k, v));
                }
                Ok(Triples(out))
            }
        }
        d.deserialize_map(V)
    }
}

impl StructureFile {
    pub fn from_structure(name: &str, s: &IncidenceStructure, r: Option<&Realization>) -> Result<Self> {
        let coords = match r {
            None => None,
            Some(r) => {
                let points = s
                    .point_ids()
                    .iter()
                    .map(|id| Ok((id.clone(), r.require_point(id)?.to_strings())))
                    .collect::<Result<_>>()?;
                let lines = s
                    .line_ids()
                    .iter()
                    .map(|id| Ok((id.clone(), r.require_line(id)?.to_strings())))
                    .collect::<Result<_>>()?;
                Some(Coords {
                    points: Triples(points),
                    lines: Triples(lines),
                })
            }
        };
        Ok(Self {
            name: name.to_string(),
            points: s.point_ids().to_vec(),
            lines: s
                .lines_with_ids()
                .into_iter()
                .map(|(id, points)| LineRecord { id, points })
                .collect(),
            coords,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn structure(&self) -> Result<IncidenceStructure> {
        IncidenceStructure::from_lines(
            self.points.clone(),
            self.lines
                .iter()
                .map(|l| (l.id.clone(), l.points.clone()))
                .collect(),
        )
    }

    /// The coordinates, checked to cover exactly the declared ids.
    pub fn realization(&self, s: &IncidenceStructure) -> Result<Option<Realization>> {
        let Some(c) = &self.coords else {
            return Ok(None);
        };
        let mut r = Realization::new();
        for (kind, triples, ids) in [
            (Kind::Point, &c.points, s.point_ids()),
            (Kind::Line, &c.lines, s.line_ids()),
        ] {
            let declared: HashSet<&String> = ids.iter().collect();
            for (id, t) in &triples.0 {
                if !declared.contains(id) {
                    return Err(Error::Validation(format!("coordinates given for undeclared {kind} `{id}`")));
                }
                match kind {
                    Kind::Point => r.insert_point(id.clone(), ProjPoint::from_strs(t)?),
                    Kind::Line => r.insert_line(id.clone(), ProjLine::from_strs(t)?),
                }
            }
            if triples.0.len() != ids.len() {
                let have: HashSet<&String> = triples.0.iter().map(|(id, _)| id).collect();
                let missing = ids.iter().find(|id| !have.contains(id)).expect("some id lacks coordinates");
                return Err(Error::UnmappedId {
                    kind,
                    id: missing.clone(),
                });
            }
        }
        Ok(Some(r))
    }

    pub fn load_parts(&self) -> Result<(IncidenceStructure, Option<Realization>)> {
        let s = self.structure()?;
        let r = self.realization(&s)?;
        Ok((s, r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "name": "triangle",
  "points": ["a", "b", "c"],
  "lines": [
    {"id": "ab", "points": ["a", "b"]},
    {"id": "bc", "points": ["b", "c"]},
    {"id": "ca", "points": ["c", "a"]}
  ],
  "coords": {
    "points": {"a": ["0", "0", "1"], "b": ["1", "0", "1"], "c": ["0", "1/2", "1"]},
    "lines": {"ab": ["0", "1", "0"], "bc": ["1", "2", "-1"], "ca": ["1", "0", "0"]}
  }
}"#;

    #[test]
    fn round_trip_is_stable() {
        let f = StructureFile::parse(SMALL).unwrap();
        let (s, r) = f.load_parts().unwrap();
        let r = r.unwrap();
        assert!(crate::check_faithful(&s, &r).unwrap().is_faithful());
        let again = StructureFile::from_structure("triangle", &s, Some(&r)).unwrap();
        let text = again.to_json();
        assert_eq!(StructureFile::parse(&text).unwrap().to_json(), text);
        // coordinates are normalized on the way through
        assert_eq!(again.coords.as_ref().unwrap().points.0[2].1, ["0", "1", "2"]);
    }

    #[test]
    fn unknown_fields_are_rejected_with_position() {
        let bad = SMALL.replacen("\"name\"", "\"title\": 1, \"name\"", 1);
        match StructureFile::parse(&bad) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_errors() {
        let dup = SMALL.replace(r#"["b", "c"]"#, r#"["b", "b"]"#);
        let f = StructureFile::parse(&dup).unwrap();
        assert!(matches!(f.structure(), Err(Error::DuplicateIncidence { .. })));
        let missing = SMALL.replace(r#", "c": ["0", "1/2", "1"]"#, "");
        let f = StructureFile::parse(&missing).unwrap();
        let s = f.structure().unwrap();
        assert!(matches!(f.realization(&s), Err(Error::UnmappedId { kind: Kind::Point, .. })));
        let dup_key = SMALL.replace(r#""b": ["1", "0", "1"]"#, r#""a": ["1", "0", "1"]"#);
        assert!(matches!(StructureFile::parse(&dup_key), Err(Error::Parse { .. })));
        let zero = SMALL.replace(r#"["1", "0", "0"]"#, r#"["0", "0", "0"]"#);
        let f = StructureFile::parse(&zero).unwrap();
        assert!(f.load_parts().is_err());
    }
}
