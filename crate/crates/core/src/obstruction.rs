//! The Euler-formula counting obstruction for topological incidence
//! structures and its consequences for 3|4-configurations.

use serde::Serialize;

use crate::signature::Signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionVerdict {
    pub lhs_value: i64,
    /// `lhs_value <= 0`. A passing verdict certifies nothing; a failing one
    /// rules out every topological (hence geometric) realization.
    pub satisfiable: bool,
}

/// Evaluates `P''(1) + 2P'(1) - L(1)^2 + L(1) - 6P(1) + 6`.
pub fn euler_obstruction(sig: &Signature) -> ObstructionVerdict {
    let pp = sig.point_second_derivative() as i64;
    let p1 = sig.incidences() as i64;
    let l = sig.num_lines() as i64;
    let p = sig.num_points() as i64;
    let lhs_value = pp + 2 * p1 - l * l + l - 6 * p + 6;
    ObstructionVerdict {
        lhs_value,
        satisfiable: lhs_value <= 0,
    }
}

/// The left side of the inequality for `(a x^3 + b x^4, a y^3 + b y^4)`,
/// in closed form.
pub fn three_four_lhs(a: i64, b: i64) -> i64 {
    -(a + b) * (a + b) + 7 * a + 15 * b + 6
}

/// Smallest `b` such that `(a x^3 + b x^4, a y^3 + b y^4)` passes.
pub fn b_min(a: u64) -> u64 {
    let a = a as i64;
    (0..)
        .find(|&b| three_four_lhs(a, b) <= 0)
        .expect("the quadratic term eventually dominates") as u64
}

/// Upper bound on incidences of a topological `(n_{3|4})` configuration:
/// `min(4n, floor((n^2 + 17n - 6) / 8))`.
pub fn max_incidences(n: u64) -> u64 {
    let n = n as i64;
    let quad = (n * n + 17 * n - 6).div_euclid(8);
    (4 * n).min(quad).max(0) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallNVerdict {
    pub infeasible: bool,
    pub reason: String,
}

/// Whether no topological `(n_{3|4})` configuration exists, for the range
/// where the counting argument settles it.
///
/// For `n <= 7` even `3n` incidences exceed [`max_incidences`]. For `n = 8`
/// the bound admits only the `(8_3)`, whose unique combinatorial structure
/// (the Möbius-Kantor configuration) is known not to be topological; that
/// last fact is taken as given, and the uniqueness count is cross-checked by
/// the enumerator in the test suite.
pub fn infeasible_small_n34(n: u64) -> SmallNVerdict {
    let bound = max_incidences(n);
    if 3 * n > bound {
        SmallNVerdict {
            infeasible: true,
            reason: format!("3n = {} exceeds the incidence bound {bound}", 3 * n),
        }
    } else if n == 8 {
        SmallNVerdict {
            infeasible: true,
            reason: format!(
                "the bound {bound} admits only (8_3); its unique combinatorial \
                 structure (Möbius-Kantor) is not topological"
            ),
        }
    } else {
        SmallNVerdict {
            infeasible: false,
            reason: format!("3n = {} is within the incidence bound {bound}", 3 * n),
        }
    }
}

/// Signatures `(a x^3 + b x^4, a y^3 + b y^4)` with `a + b = n` that pass the
/// inequality, as `(a, b)` pairs.
pub fn passing_three_four_splits(n: u64) -> Vec<(u64, u64)> {
    (0..=n)
        .map(|a| (a, n - a))
        .filter(|&(a, b)| euler_obstruction(&Signature::three_four(a as usize, b as usize)).satisfiable)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_verdicts() {
        let v = euler_obstruction(&Signature::regular(15, 4));
        assert_eq!(v.lhs_value, 6);
        assert!(!v.satisfiable);
        let v = euler_obstruction(&Signature::three_four(7, 2));
        assert_eq!(v.lhs_value, 4);
        assert!(!v.satisfiable);
        let v = euler_obstruction(&Signature::three_four(8, 2));
        assert_eq!(v.lhs_value, -8);
        assert!(v.satisfiable);
    }

    #[test]
    fn closed_form_matches_general_formula() {
        for a in 0..=50 {
            for b in 0..=50 {
                if a + b == 0 {
                    continue;
                }
                let v = euler_obstruction(&Signature::three_four(a, b));
                assert_eq!(v.lhs_value, three_four_lhs(a as i64, b as i64), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn b_min_examples() {
        assert_eq!(b_min(0), 16);
        assert_eq!(b_min(4), 9);
        assert_eq!(b_min(7), 3);
    }

    #[test]
    fn max_incidences_examples() {
        assert_eq!(max_incidences(10), 33);
        assert_eq!(max_incidences(16), 64);
        assert_eq!(max_incidences(100), 400);
    }

    #[test]
    fn small_n() {
        assert!(infeasible_small_n34(7).infeasible);
        assert!(infeasible_small_n34(8).infeasible);
        assert!(!infeasible_small_n34(9).infeasible);
        assert!((1..=7).all(|n| infeasible_small_n34(n).infeasible));
    }

    #[test]
    fn passing_splits_respect_incidence_bound() {
        for n in 1..=30u64 {
            for (a, b) in passing_three_four_splits(n) {
                assert!(3 * a + 4 * b <= max_incidences(n), "n={n} a={a} b={b}");
            }
        }
    }
}
