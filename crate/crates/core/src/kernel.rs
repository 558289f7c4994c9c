//! Exact projective-plane primitives.
//!
//! Points and lines are homogeneous triples over the rationals, stored in a
//! canonical integer form: entries are coprime integers and the first nonzero
//! entry is positive. Two triples describe the same projective element iff
//! their canonical forms are equal, so `Eq`/`Hash`/`Ord` are plain structural
//! comparisons.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Formats a rational as `n/d`, or `n` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r = match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|e| bad_number(t, e))?;
            let d = BigInt::from_str(d.trim()).map_err(|e| bad_number(t, e))?;
            if d.is_zero() {
                return Err(Error::Validation(format!("zero denominator in `{t}`")));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(BigInt::from_str(t).map_err(|e| bad_number(t, e))?),
    };
    Ok(r)
}

fn bad_number(t: &str, e: impl fmt::Display) -> Error {
    Error::Validation(format!("`{t}` is not a rational number: {e}"))
}

/// Scales a rational triple to coprime integers with a positive leading entry.
pub fn canonical_triple(v: &[Rational; 3]) -> Result<[BigInt; 3]> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints = [
        (&v[0] * &lcm).to_integer(),
        (&v[1] * &lcm).to_integer(),
        (&v[2] * &lcm).to_integer(),
    ];
    canonical_ints(ints)
}

pub fn canonical_ints(mut v: [BigInt; 3]) -> Result<[BigInt; 3]> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let lead_negative = v.iter().find(|x| !x.is_zero()).unwrap().is_negative();
    for x in v.iter_mut() {
        *x = &*x / &g;
        if lead_negative {
            *x = -&*x;
        }
    }
    Ok(v)
}

fn cross(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub(crate) fn dot(a: &[BigInt; 3], b: &[BigInt; 3]) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

macro_rules! homogeneous_element {
    ($name:ident, $open:literal, $close:literal) => {
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            coords: [BigInt; 3],
        }

        impl $name {
            pub fn new(v: [Rational; 3]) -> Result<Self> {
                Ok(Self {
                    coords: canonical_triple(&v)?,
                })
            }

            pub fn from_bigints(v: [BigInt; 3]) -> Result<Self> {
                Ok(Self {
                    coords: canonical_ints(v)?,
                })
            }

            pub fn from_ints(x: i64, y: i64, z: i64) -> Result<Self> {
                Self::from_bigints([x.into(), y.into(), z.into()])
            }

            /// Canonical coprime integer triple.
            pub fn coords(&self) -> &[BigInt; 3] {
                &self.coords
            }

            pub fn to_strings(&self) -> [String; 3] {
                [
                    self.coords[0].to_string(),
                    self.coords[1].to_string(),
                    self.coords[2].to_string(),
                ]
            }

            pub fn from_strs<S: AsRef<str>>(v: &[S]) -> Result<Self> {
                if v.len() != 3 {
                    return Err(Error::Validation(format!(
                        "homogeneous triple needs 3 entries, got {}",
                        v.len()
                    )));
                }
                Self::new([
                    parse_rational(v[0].as_ref())?,
                    parse_rational(v[1].as_ref())?,
                    parse_rational(v[2].as_ref())?,
                ])
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(
                    f,
                    concat!($open, "{}, {}, {}", $close),
                    self.coords[0], self.coords[1], self.coords[2]
                )
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(self, f)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                self.to_strings().serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let v = Vec::<String>::deserialize(d)?;
                Self::from_strs(&v).map_err(serde::de::Error::custom)
            }
        }
    };
}

homogeneous_element!(ProjPoint, "(", ")");
homogeneous_element!(ProjLine, "[", "]");

impl ProjPoint {
    /// Points with vanishing third coordinate lie on the line at infinity.
    pub fn is_at_infinity(&self) -> bool {
        self.coords[2].is_zero()
    }
}

pub fn incident(p: &ProjPoint, l: &ProjLine) -> bool {
    dot(&p.coords, &l.coords).is_zero()
}

/// The unique line through two distinct points.
pub fn join(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
    match canonical_ints(cross(&p.coords, &q.coords)) {
        Ok(coords) => Ok(ProjLine { coords }),
        Err(Error::ZeroVector) => Err(Error::IdenticalElements),
        Err(e) => Err(e),
    }
}

/// The unique common point of two distinct lines.
pub fn meet(l: &ProjLine, m: &ProjLine) -> Result<ProjPoint> {
    match canonical_ints(cross(&l.coords, &m.coords)) {
        Ok(coords) => Ok(ProjPoint { coords }),
        Err(Error::ZeroVector) => Err(Error::IdenticalElements),
        Err(e) => Err(e),
    }
}

pub fn polar_dual_point(p: &ProjPoint) -> ProjLine {
    ProjLine {
        coords: p.coords.clone(),
    }
}

pub fn polar_dual_line(l: &ProjLine) -> ProjPoint {
    ProjPoint {
        coords: l.coords.clone(),
    }
}

/// Determinant of the 3x3 matrix with the given rows.
pub fn det3(rows: [&[BigInt; 3]; 3]) -> BigInt {
    dot(rows[0], &cross(rows[1], rows[2]))
}

pub fn collinear(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> bool {
    det3([&a.coords, &b.coords, &c.coords]).is_zero()
}

pub fn concurrent(a: &ProjLine, b: &ProjLine, c: &ProjLine) -> bool {
    det3([&a.coords, &b.coords, &c.coords]).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64, z: i64) -> ProjPoint {
        ProjPoint::from_ints(x, y, z).unwrap()
    }

    fn ln(a: i64, b: i64, c: i64) -> ProjLine {
        ProjLine::from_ints(a, b, c).unwrap()
    }

    #[test]
    fn incidence_examples() {
        assert!(incident(&pt(0, 0, 1), &ln(1, 0, 0)));
        assert!(!incident(&pt(1, 1, 1), &ln(1, 1, 1)));
        assert!(incident(&pt(-1, 1, 1), &ln(1, 1, 0)));
    }

    #[test]
    fn join_examples() {
        assert_eq!(join(&pt(1, 0, 0), &pt(0, 1, 0)).unwrap(), ln(0, 0, 1));
        assert_eq!(join(&pt(0, 0, 1), &pt(1, 0, 1)).unwrap(), ln(0, 1, 0));
        // cross product of (1,1,1) and (-1,-1,1) is (2,-2,0)
        assert_eq!(join(&pt(1, 1, 1), &pt(-1, -1, 1)).unwrap(), ln(1, -1, 0));
        assert!(matches!(
            join(&pt(2, 4, 6), &pt(1, 2, 3)),
            Err(Error::IdenticalElements)
        ));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(&ln(1, 0, 0), &ln(0, 1, 0)).unwrap(), pt(0, 0, 1));
        assert_eq!(meet(&ln(0, 0, 1), &ln(1, 0, 0)).unwrap(), pt(0, 1, 0));
        assert_eq!(meet(&ln(1, 1, 0), &ln(1, -1, 0)).unwrap(), pt(0, 0, 1));
        assert!(matches!(
            meet(&ln(1, 1, 0), &ln(-3, -3, 0)),
            Err(Error::IdenticalElements)
        ));
    }

    #[test]
    fn polarity_examples() {
        assert_eq!(polar_dual_point(&pt(1, 0, 0)), ln(1, 0, 0));
        assert_eq!(polar_dual_point(&pt(1, 2, 3)), ln(1, 2, 3));
        let p = ProjPoint::from_strs(&["2/3", "1", "0"]).unwrap();
        assert_eq!(polar_dual_point(&p), ln(2, 3, 0));
        assert_eq!(polar_dual_line(&polar_dual_point(&p)), p);
    }

    #[test]
    fn canonical_form_normalizes_sign_and_scale() {
        assert_eq!(pt(-2, 4, 0).to_strings(), ["1", "-2", "0"]);
        assert_eq!(pt(0, -3, 6).to_strings(), ["0", "1", "-2"]);
        assert!(matches!(ProjPoint::from_ints(0, 0, 0), Err(Error::ZeroVector)));
        let p = ProjPoint::from_strs(&["-1/2", "1/3", "5"]).unwrap();
        assert_eq!(p.to_strings(), ["3", "-2", "-30"]);
    }

    #[test]
    fn rational_strings() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&parse_rational("8/4").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("3/-9").unwrap()), "-1/3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn triple_serde() {
        let p = pt(3, -1, 0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["3","-1","0"]"#);
        let q: ProjPoint = serde_json::from_str(r#"["6","-2","0"]"#).unwrap();
        assert_eq!(p, q);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small() -> impl Strategy<Value = i64> {
            -40i64..=40
        }

        fn point() -> impl Strategy<Value = ProjPoint> {
            (small(), small(), small())
                .prop_filter("nonzero", |&(x, y, z)| (x, y, z) != (0, 0, 0))
                .prop_map(|(x, y, z)| pt(x, y, z))
        }

        proptest! {
            #[test]
            fn join_is_incident_with_both(p in point(), q in point()) {
                prop_assume!(p != q);
                let l = join(&p, &q).unwrap();
                prop_assert!(incident(&p, &l) && incident(&q, &l));
                prop_assert_eq!(join(&q, &p).unwrap(), l);
            }

            #[test]
            fn meet_of_two_joins_recovers_apex(p in point(), q in point(), r in point()) {
                prop_assume!(!collinear(&p, &q, &r));
                let a = join(&p, &q).unwrap();
                let b = join(&p, &r).unwrap();
                prop_assert_eq!(meet(&a, &b).unwrap(), p);
            }

            #[test]
            fn polarity_preserves_incidence(p in point(), q in point()) {
                prop_assume!(p != q);
                let l = join(&p, &q).unwrap();
                prop_assert!(incident(&polar_dual_line(&l), &polar_dual_point(&p)));
                prop_assert_eq!(polar_dual_point(&polar_dual_line(&l)), l);
            }

            #[test]
            fn polar_of_meet_is_join_of_polars(p in point(), q in point()) {
                prop_assume!(p != q);
                let (l, m) = (polar_dual_point(&p), polar_dual_point(&q));
                prop_assert_eq!(polar_dual_point(&meet(&l, &m).unwrap()), join(&p, &q).unwrap());
            }

            #[test]
            fn scaling_does_not_change_the_point(x in small(), y in small(), z in small(), k in 1i64..50) {
                prop_assume!((x, y, z) != (0, 0, 0));
                prop_assert_eq!(pt(k * x, k * y, k * z), pt(x, y, z));
                prop_assert_eq!(pt(-k * x, -k * y, -k * z), pt(x, y, z));
            }
        }
    }
}
