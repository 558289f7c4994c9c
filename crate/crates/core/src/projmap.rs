//! Projective transformations and the classical frame constructions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::{det3, parse_rational, ProjLine, ProjPoint, Rational};

type Mat = [[BigInt; 3]; 3];

/// An invertible 3x3 matrix up to a nonzero scalar.
///
/// Points transform as `M p`, lines contragrediently as `M^{-T} l`, so
/// incidence is preserved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjMap {
    m: Mat,
}

fn zero_mat() -> Mat {
    Default::default()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = zero_mat();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| &a[i][k] * &b[k][j]).sum();
        }
    }
    out
}

fn mat_vec(a: &Mat, v: &[BigInt; 3]) -> [BigInt; 3] {
    [
        (0..3).map(|k| &a[0][k] * &v[k]).sum(),
        (0..3).map(|k| &a[1][k] * &v[k]).sum(),
        (0..3).map(|k| &a[2][k] * &v[k]).sum(),
    ]
}

fn transpose(a: &Mat) -> Mat {
    let mut out = zero_mat();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].clone();
        }
    }
    out
}

/// Cofactor matrix; equals `det(a) * a^{-T}`.
fn cofactor(a: &Mat) -> Mat {
    let mut out = zero_mat();
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            out[i][j] = &a[r0][c0] * &a[r1][c1] - &a[r0][c1] * &a[r1][c0];
        }
    }
    out
}

fn det(a: &Mat) -> BigInt {
    det3([&a[0], &a[1], &a[2]])
}

fn columns(v: [&[BigInt; 3]; 3]) -> Mat {
    let mut out = zero_mat();
    for (j, col) in v.iter().enumerate() {
        for i in 0..3 {
            out[i][j] = col[i].clone();
        }
    }
    out
}

fn diag_right(a: &Mat, d: &[BigInt; 3]) -> Mat {
    let mut out = a.clone();
    for row in out.iter_mut() {
        for j in 0..3 {
            row[j] = &row[j] * &d[j];
        }
    }
    out
}

impl ProjMap {
    pub fn from_bigints(mut m: Mat) -> Result<Self> {
        if det(&m).is_zero() {
            return Err(Error::SingularMap);
        }
        let g = m.iter().flatten().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let negative = m.iter().flatten().find(|x| !x.is_zero()).unwrap().is_negative();
        for x in m.iter_mut().flatten() {
            *x = &*x / &g;
            if negative {
                *x = -&*x;
            }
        }
        Ok(Self { m })
    }

    pub fn new(rows: [[Rational; 3]; 3]) -> Result<Self> {
        let lcm = rows
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let mut m = zero_mat();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (&rows[i][j] * &lcm).to_integer();
            }
        }
        Self::from_bigints(m)
    }

    pub fn from_ints(rows: [[i64; 3]; 3]) -> Result<Self> {
        Self::from_bigints(rows.map(|r| r.map(BigInt::from)))
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap()
    }

    /// Affine translation `(x, y) -> (x + tx, y + ty)` in the chart `z = 1`.
    pub fn translation(tx: &Rational, ty: &Rational) -> Self {
        let one = Rational::one();
        let zero = Rational::zero();
        Self::new([
            [one.clone(), zero.clone(), tx.clone()],
            [zero.clone(), one.clone(), ty.clone()],
            [zero.clone(), zero, one],
        ])
        .expect("translations are invertible")
    }

    /// Canonical integer matrix (row-major).
    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn determinant(&self) -> BigInt {
        det(&self.m)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::from_bigints(mat_vec(&self.m, p.coords())).expect("invertible map")
    }

    pub fn apply_line(&self, l: &ProjLine) -> ProjLine {
        ProjLine::from_bigints(mat_vec(&cofactor(&self.m), l.coords())).expect("invertible map")
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &ProjMap) -> ProjMap {
        Self::from_bigints(mat_mul(&self.m, &inner.m)).expect("product of invertible maps")
    }

    pub fn inverse(&self) -> ProjMap {
        Self::from_bigints(transpose(&cofactor(&self.m))).expect("invertible map")
    }

    /// The matrix acting on line coordinates, i.e. `M^{-T}` up to scale.
    pub fn contragredient(&self) -> ProjMap {
        Self::from_bigints(cofactor(&self.m)).expect("invertible map")
    }

    pub fn to_strings(&self) -> [[String; 3]; 3] {
        self.m.clone().map(|r| r.map(|x| x.to_string()))
    }
}

impl fmt::Debug for ProjMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjMap{:?}", self.to_strings())
    }
}

impl Serialize for ProjMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(serde::de::Error::custom("projective map needs a 3x3 matrix"));
        }
        let mut m: [[Rational; 3]; 3] = Default::default();
        for (i, row) in rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                m[i][j] = parse_rational(s).map_err(serde::de::Error::custom)?;
            }
        }
        ProjMap::new(m).map_err(serde::de::Error::custom)
    }
}

/// The map sending `e1, e2, e3, (1,1,1)` to `a, b, c, d`.
pub fn map_from_frame(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint, d: &ProjPoint) -> Result<ProjMap> {
    let basis = columns([a.coords(), b.coords(), c.coords()]);
    if det(&basis).is_zero() {
        return Err(Error::DegenerateFrame(format!("{a}, {b}, {c} are collinear")));
    }
    // basis * lambda = d, up to the factor det(basis)
    let lambda = mat_vec(&transpose(&cofactor(&basis)), d.coords());
    if let Some(i) = lambda.iter().position(|x| x.is_zero()) {
        let others: Vec<String> = [a, b, c]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.to_string())
            .collect();
        return Err(Error::DegenerateFrame(format!(
            "{d} is collinear with {}",
            others.join(" and ")
        )));
    }
    ProjMap::from_bigints(diag_right(&basis, &lambda))
}

/// The map sending `src[i]` to `dst[i]` for each `i`; order-sensitive.
pub fn map_four_to_four(src: &[ProjPoint; 4], dst: &[ProjPoint; 4]) -> Result<ProjMap> {
    let from = map_from_frame(&src[0], &src[1], &src[2], &src[3])?;
    let to = map_from_frame(&dst[0], &dst[1], &dst[2], &dst[3])?;
    Ok(to.compose(&from.inverse()))
}

/// The map sending three points to three points and a line to a line.
///
/// Exists and is unique when neither triangle is degenerate and neither line
/// passes through a vertex of its triangle.
pub fn map_three_points_one_line(
    src: &[ProjPoint; 3],
    src_line: &ProjLine,
    dst: &[ProjPoint; 3],
    dst_line: &ProjLine,
) -> Result<ProjMap> {
    let p = columns([src[0].coords(), src[1].coords(), src[2].coords()]);
    let q = columns([dst[0].coords(), dst[1].coords(), dst[2].coords()]);
    if det(&p).is_zero() {
        return Err(Error::DegenerateFrame(format!(
            "{}, {}, {} are collinear",
            src[0], src[1], src[2]
        )));
    }
    if det(&q).is_zero() {
        return Err(Error::DegenerateFrame(format!(
            "{}, {}, {} are collinear",
            dst[0], dst[1], dst[2]
        )));
    }
    let u = mat_vec(&transpose(&p), src_line.coords());
    let w = mat_vec(&transpose(&q), dst_line.coords());
    if u.iter().any(|x| x.is_zero()) {
        return Err(Error::DegenerateFrame(format!("{src_line} passes through a marked point")));
    }
    if w.iter().any(|x| x.is_zero()) {
        return Err(Error::DegenerateFrame(format!("{dst_line} passes through a marked point")));
    }
    // D_i = u_i / w_i, cleared of denominators
    let scale = [
        &u[0] * &w[1] * &w[2],
        &u[1] * &w[0] * &w[2],
        &u[2] * &w[0] * &w[1],
    ];
    let adj_p = transpose(&cofactor(&p));
    ProjMap::from_bigints(mat_mul(&diag_right(&q, &scale), &adj_p))
}

/// Dual of [`map_three_points_one_line`]: one point and three lines.
pub fn map_one_point_three_lines(
    src_point: &ProjPoint,
    src_lines: &[ProjLine; 3],
    dst_point: &ProjPoint,
    dst_lines: &[ProjLine; 3],
) -> Result<ProjMap> {
    let as_points = |ls: &[ProjLine; 3]| -> [ProjPoint; 3] {
        [0, 1, 2].map(|i| crate::kernel::polar_dual_line(&ls[i]))
    };
    let line_action = map_three_points_one_line(
        &as_points(src_lines),
        &crate::kernel::polar_dual_point(src_point),
        &as_points(dst_lines),
        &crate::kernel::polar_dual_point(dst_point),
    )?;
    Ok(line_action.contragredient())
}

/// The map sending four lines to four lines, in order.
pub fn map_four_lines(src: &[ProjLine; 4], dst: &[ProjLine; 4]) -> Result<ProjMap> {
    let as_points = |ls: &[ProjLine; 4]| -> [ProjPoint; 4] {
        [0, 1, 2, 3].map(|i| crate::kernel::polar_dual_line(&ls[i]))
    };
    let line_action = map_four_to_four(&as_points(src), &as_points(dst))?;
    Ok(line_action.contragredient())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{incident, join};

    fn pt(x: i64, y: i64, z: i64) -> ProjPoint {
        ProjPoint::from_ints(x, y, z).unwrap()
    }

    fn standard_frame() -> [ProjPoint; 4] {
        [pt(1, 0, 0), pt(0, 1, 0), pt(0, 0, 1), pt(1, 1, 1)]
    }

    #[test]
    fn frame_identity() {
        let [a, b, c, d] = standard_frame();
        assert!(map_from_frame(&a, &b, &c, &d).unwrap().is_identity());
    }

    #[test]
    fn frame_swap() {
        let [a, b, c, d] = standard_frame();
        let m = map_from_frame(&b, &a, &c, &d).unwrap();
        assert_eq!(
            m,
            ProjMap::from_ints([[0, 1, 0], [1, 0, 0], [0, 0, 1]]).unwrap()
        );
    }

    #[test]
    fn frame_generic_images() {
        let targets = [pt(1, 0, 1), pt(0, 1, 1), pt(0, 0, 1), pt(1, 1, 3)];
        let m = map_from_frame(&targets[0], &targets[1], &targets[2], &targets[3]).unwrap();
        for (e, t) in standard_frame().iter().zip(&targets) {
            assert_eq!(&m.apply(e), t);
        }
        // hand-solved: columns (1,0,1),(0,1,1),(0,0,1) scaled by (1,1,1)
        assert_eq!(
            m,
            ProjMap::from_ints([[1, 0, 0], [0, 1, 0], [1, 1, 1]]).unwrap()
        );
    }

    #[test]
    fn degenerate_frames() {
        let r = map_from_frame(&pt(1, 0, 0), &pt(0, 1, 0), &pt(1, 1, 0), &pt(1, 1, 1));
        assert!(matches!(r, Err(Error::DegenerateFrame(_))));
        let r = map_from_frame(&pt(1, 0, 0), &pt(0, 1, 0), &pt(0, 0, 1), &pt(1, 1, 0));
        assert!(matches!(r, Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn four_to_four_examples() {
        let std = standard_frame();
        assert!(map_four_to_four(&std, &std).unwrap().is_identity());
        let dst = [pt(2, 1, 1), pt(-1, 3, 1), pt(0, 5, 2), pt(7, 1, -1)];
        let m = map_four_to_four(&std, &dst).unwrap();
        assert_eq!(m, map_from_frame(&dst[0], &dst[1], &dst[2], &dst[3]).unwrap());
        let src = [pt(1, 2, 3), pt(-2, 1, 1), pt(4, 0, 1), pt(1, 1, -5)];
        let m = map_four_to_four(&src, &dst).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert_eq!(&m.apply(s), d);
        }
    }

    #[test]
    fn scalar_multiple_acts_trivially() {
        let m = ProjMap::from_ints([[2, 0, 0], [0, 2, 0], [0, 0, 2]]).unwrap();
        assert!(m.is_identity());
        let p = pt(3, -7, 2);
        assert_eq!(m.apply(&p), p);
    }

    #[test]
    fn line_action_matches_join() {
        let [e1, e2, ..] = standard_frame();
        let m = map_from_frame(&pt(1, 0, 1), &pt(0, 1, 1), &pt(0, 0, 1), &pt(1, 1, 3)).unwrap();
        let l = join(&e1, &e2).unwrap();
        assert_eq!(m.apply_line(&l), join(&m.apply(&e1), &m.apply(&e2)).unwrap());
        assert!(incident(&m.apply(&e1), &m.apply_line(&l)));
    }

    #[test]
    fn singular_matrix_rejected() {
        let r = ProjMap::from_ints([[1, 2, 3], [2, 4, 6], [0, 0, 1]]);
        assert!(matches!(r, Err(Error::SingularMap)));
    }

    #[test]
    fn three_points_one_line() {
        let src = [pt(1, 0, 0), pt(0, 1, 0), pt(0, 0, 1)];
        let sl = ProjLine::from_ints(1, 1, 1).unwrap();
        let planted = ProjMap::from_ints([[2, 1, 0], [0, 1, -1], [1, 3, 4]]).unwrap();
        let dst = src.clone().map(|p| planted.apply(&p));
        let dl = planted.apply_line(&sl);
        let m = map_three_points_one_line(&src, &sl, &dst, &dl).unwrap();
        assert_eq!(m, planted);
        let bad = ProjLine::from_ints(1, 1, 0).unwrap();
        assert!(map_three_points_one_line(&src, &bad, &dst, &dl).is_err());
    }

    #[test]
    fn one_point_three_lines_and_four_lines() {
        let planted = ProjMap::from_ints([[1, 1, 0], [0, 2, -1], [3, 0, 1]]).unwrap();
        let lines = [
            ProjLine::from_ints(1, 0, 0).unwrap(),
            ProjLine::from_ints(0, 1, 0).unwrap(),
            ProjLine::from_ints(0, 0, 1).unwrap(),
        ];
        let p = pt(1, 2, 3);
        let m = map_one_point_three_lines(
            &p,
            &lines,
            &planted.apply(&p),
            &lines.clone().map(|l| planted.apply_line(&l)),
        )
        .unwrap();
        assert_eq!(m, planted);

        let four = [
            lines[0].clone(),
            lines[1].clone(),
            lines[2].clone(),
            ProjLine::from_ints(1, 1, 1).unwrap(),
        ];
        let m = map_four_lines(&four, &four.clone().map(|l| planted.apply_line(&l))).unwrap();
        assert_eq!(m, planted);
    }

    #[test]
    fn map_serde_round_trip() {
        let m = ProjMap::from_ints([[2, 1, 0], [0, 1, -1], [1, 3, 4]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: ProjMap = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn point() -> impl Strategy<Value = ProjPoint> {
            (-30i64..=30, -30i64..=30, -30i64..=30)
                .prop_filter("nonzero", |&(x, y, z)| (x, y, z) != (0, 0, 0))
                .prop_map(|(x, y, z)| pt(x, y, z))
        }

        fn map() -> impl Strategy<Value = ProjMap> {
            prop::array::uniform3(prop::array::uniform3(-6i64..=6))
                .prop_filter_map("singular", |m| ProjMap::from_ints(m).ok())
        }

        proptest! {
            #[test]
            fn inverse_undoes_apply(m in map(), p in point()) {
                prop_assert_eq!(m.inverse().apply(&m.apply(&p)), p);
                prop_assert!(m.compose(&m.inverse()).is_identity());
            }

            #[test]
            fn maps_preserve_incidence(m in map(), p in point(), q in point()) {
                prop_assume!(p != q);
                let l = join(&p, &q).unwrap();
                let ml = m.apply_line(&l);
                prop_assert!(incident(&m.apply(&p), &ml));
                prop_assert_eq!(join(&m.apply(&p), &m.apply(&q)).unwrap(), ml);
            }

            #[test]
            fn frame_maps_compose_to_identity(src in prop::array::uniform4(point()), dst in prop::array::uniform4(point())) {
                if let (Ok(f), Ok(g)) = (map_four_to_four(&src, &dst), map_four_to_four(&dst, &src)) {
                    prop_assert!(g.compose(&f).is_identity());
                }
            }

            #[test]
            fn frame_map_hits_its_targets(src in prop::array::uniform4(point()), dst in prop::array::uniform4(point())) {
                if let Ok(m) = map_four_to_four(&src, &dst) {
                    for (a, b) in src.iter().zip(&dst) {
                        prop_assert_eq!(&m.apply(a), b);
                    }
                }
            }
        }
    }
}
