//! Valence census of an incidence structure.
//!
//! The pair of polynomials `P(x) = Σ p_i x^i` and `L(y) = Σ l_j y^j`, where
//! `p_i` counts points on exactly `i` lines and `l_j` counts lines through
//! exactly `j` points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    point_counts: BTreeMap<usize, usize>,
    line_counts: BTreeMap<usize, usize>,
}

fn weighted(m: &BTreeMap<usize, usize>) -> usize {
    m.iter().map(|(v, c)| v * c).sum()
}

impl Signature {
    /// Builds a signature, dropping zero counts. Fails unless both sides
    /// count the same number of incidences.
    pub fn new<P, L>(point_counts: P, line_counts: L) -> Result<Self>
    where
        P: IntoIterator<Item = (usize, usize)>,
        L: IntoIterator<Item = (usize, usize)>,
    {
        let collect = |it: &mut dyn Iterator<Item = (usize, usize)>| {
            let mut m = BTreeMap::new();
            for (v, c) in it {
                *m.entry(v).or_insert(0) += c;
            }
            m.retain(|_, c| *c > 0);
            m
        };
        let point_counts = collect(&mut point_counts.into_iter());
        let line_counts = collect(&mut line_counts.into_iter());
        let (p, l) = (weighted(&point_counts), weighted(&line_counts));
        if p != l {
            return Err(Error::InconsistentSignature { points: p, lines: l });
        }
        Ok(Self {
            point_counts,
            line_counts,
        })
    }

    /// Signature `(a x^3 + b x^4, a y^3 + b y^4)`.
    pub fn three_four(a: usize, b: usize) -> Self {
        Self::new([(3, a), (4, b)], [(3, a), (4, b)]).expect("symmetric signature")
    }

    /// Signature `(n x^k, n y^k)`.
    pub fn regular(n: usize, k: usize) -> Self {
        Self::new([(k, n)], [(k, n)]).expect("symmetric signature")
    }

    pub fn point_counts(&self) -> &BTreeMap<usize, usize> {
        &self.point_counts
    }

    pub fn line_counts(&self) -> &BTreeMap<usize, usize> {
        &self.line_counts
    }

    /// `P(1)`.
    pub fn num_points(&self) -> usize {
        self.point_counts.values().sum()
    }

    /// `L(1)`.
    pub fn num_lines(&self) -> usize {
        self.line_counts.values().sum()
    }

    /// `P'(1) = L'(1)`.
    pub fn incidences(&self) -> usize {
        weighted(&self.point_counts)
    }

    /// `P''(1) = Σ i (i - 1) p_i`.
    pub fn point_second_derivative(&self) -> usize {
        self.point_counts
            .iter()
            .map(|(v, c)| v * v.saturating_sub(1) * c)
            .sum()
    }

    /// `L''(1) = Σ j (j - 1) l_j`.
    pub fn line_second_derivative(&self) -> usize {
        self.line_counts
            .iter()
            .map(|(v, c)| v * v.saturating_sub(1) * c)
            .sum()
    }

    /// The signature of the dual structure.
    pub fn dual(&self) -> Self {
        Self {
            point_counts: self.line_counts.clone(),
            line_counts: self.point_counts.clone(),
        }
    }

    fn is_empty(&self) -> bool {
        self.point_counts.is_empty() && self.line_counts.is_empty()
    }

    fn all_valences(&self, pred: impl Fn(usize) -> bool) -> bool {
        !self.is_empty()
            && self.point_counts.keys().all(|&v| pred(v))
            && self.line_counts.keys().all(|&v| pred(v))
    }

    /// Every element has valence at least three. False for the empty structure.
    pub fn is_quasi_configuration(&self) -> bool {
        self.all_valences(|v| v >= 3)
    }

    /// Every element has valence exactly `k` (which forces `|P| = |L|`).
    pub fn is_k_configuration(&self, k: usize) -> bool {
        self.all_valences(|v| v == k) && self.num_points() == self.num_lines()
    }

    /// Every element has valence 3 or 4.
    pub fn is_34_configuration(&self) -> bool {
        self.all_valences(|v| v == 3 || v == 4)
    }

    /// A 3|4-configuration with as many points as lines.
    pub fn is_n34_configuration(&self) -> bool {
        self.is_34_configuration() && self.num_points() == self.num_lines()
    }

    fn side_string(m: &BTreeMap<usize, usize>, var: char) -> String {
        if m.is_empty() {
            return "0".to_string();
        }
        m.iter()
            .map(|(v, c)| format!("{c}*{var}^{v}"))
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}",
            Self::side_string(&self.point_counts, 'x'),
            Self::side_string(&self.line_counts, 'y')
        )
    }
}

fn parse_side(s: &str, var: char, whole: &str) -> Result<Vec<(usize, usize)>> {
    let err = || Error::SignatureParse(whole.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err());
    }
    if compact == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(err());
        }
        let (coef, power) = match term.find(var) {
            None => (term, 0usize),
            Some(pos) => {
                let coef = term[..pos].trim_end_matches('*');
                let rest = &term[pos + var.len_utf8()..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(err)?
                        .parse::<usize>()
                        .map_err(|_| err())?
                };
                (coef, power)
            }
        };
        let coef = if coef.is_empty() {
            1
        } else {
            coef.parse::<usize>().map_err(|_| err())?
        };
        terms.push((power, coef));
    }
    Ok(terms)
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses `"a*x^3+b*x^4|c*y^3+d*y^4"`; `*` and unit coefficients are optional.
    fn from_str(s: &str) -> Result<Self> {
        let (p, l) = s
            .split_once('|')
            .ok_or_else(|| Error::SignatureParse(s.to_string()))?;
        Self::new(parse_side(p, 'x', s)?, parse_side(l, 'y', s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: Signature = "8*x^3+2*x^4|8*y^3+2*y^4".parse().unwrap();
        assert_eq!(s, Signature::three_four(8, 2));
        assert_eq!(s.to_string(), "8*x^3+2*x^4|8*y^3+2*y^4");
        let t: Signature = " 15x^4 | 15 y^4 ".parse().unwrap();
        assert_eq!(t, Signature::regular(15, 4));
        let u: Signature = "x^4+3x^2|2y^5".parse().unwrap();
        assert_eq!(u.point_counts()[&2], 3);
        assert_eq!(u.to_string().parse::<Signature>().unwrap(), u);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            "8*x^3|8*y^4".parse::<Signature>(),
            Err(Error::InconsistentSignature { points: 24, lines: 32 })
        ));
        assert!("8*x^3".parse::<Signature>().is_err());
        assert!("8*z^3|8*y^3".parse::<Signature>().is_err());
        assert!("8*x^|8*y^3".parse::<Signature>().is_err());
    }

    #[test]
    fn evaluations() {
        let s = Signature::three_four(4, 9);
        assert_eq!(s.num_points(), 13);
        assert_eq!(s.num_lines(), 13);
        assert_eq!(s.incidences(), 48);
        assert_eq!(s.point_second_derivative(), 4 * 6 + 9 * 12);
    }

    #[test]
    fn predicates() {
        let s = Signature::three_four(8, 2);
        assert!(s.is_quasi_configuration());
        assert!(s.is_34_configuration());
        assert!(s.is_n34_configuration());
        assert!(!s.is_k_configuration(4));
        assert!(Signature::regular(7, 3).is_k_configuration(3));
        let deficient = Signature::new([(2, 1), (3, 6)], [(3, 4), (4, 2)]).unwrap();
        assert!(!deficient.is_quasi_configuration());
        assert!(!deficient.is_34_configuration());
        assert!(!deficient.is_n34_configuration());
        assert!(!deficient.is_k_configuration(3));
        let unbalanced = Signature::new([(4, 3)], [(3, 4)]).unwrap();
        assert!(unbalanced.is_34_configuration());
        assert!(!unbalanced.is_n34_configuration());
    }
}
