//! Exact distances between the atoms of two measures.
//!
//! All coordinates and the domain side are rescaled by the common denominator
//! `Q`, turning them into integers; squared distances are then `u128` and a
//! radius comparison `|x − y| ≤ r` becomes an integer comparison.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{self, to_f64};
use crate::measure::{AtomicMeasure, Domain};
use crate::{invalid, Error, Result};

/// A distance `√s` held through its exact squared value `s`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Distance {
    squared: BigRational,
}

impl Distance {
    pub fn zero() -> Self {
        Distance {
            squared: BigRational::zero(),
        }
    }

    pub fn from_squared(squared: BigRational) -> Result<Self> {
        if squared.is_negative() {
            return Err(invalid("squared distance", "must be nonnegative"));
        }
        Ok(Distance { squared })
    }

    /// The distance `r` for a rational `r ≥ 0`.
    pub fn from_radius(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(invalid("r", "radius must be nonnegative"));
        }
        Ok(Distance { squared: r * r })
    }

    /// Exact distance between two points of `domain`.
    pub fn between(domain: &Domain, a: &[BigRational], b: &[BigRational]) -> Self {
        Distance {
            squared: domain.squared_distance(a, b),
        }
    }

    pub fn squared(&self) -> &BigRational {
        &self.squared
    }

    pub fn is_zero(&self) -> bool {
        self.squared.is_zero()
    }

    pub fn value(&self) -> f64 {
        to_f64(&self.squared).sqrt()
    }

    /// The distance itself when it is rational.
    pub fn exact(&self) -> Option<BigRational> {
        let n = self.squared.numer();
        let d = self.squared.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
    }

    /// The distance divided by `t > 0`.
    pub fn scaled(&self, t: &BigRational) -> Distance {
        Distance {
            squared: &self.squared / (t * t),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        self.squared.cmp(&other.squared)
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(r) => write!(f, "{}", exact::format_rational(&r)),
            None => write!(f, "√{}", exact::format_rational(&self.squared)),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

const COORDINATE_LIMIT: i128 = 1 << 61;

/// Integer coordinates of two atom sets in a shared scale.
#[derive(Clone, Debug)]
pub struct Frame {
    torus: bool,
    side: i128,
    scale: BigInt,
    first: Vec<Vec<i128>>,
    second: Vec<Vec<i128>>,
}

impl Frame {
    pub fn new(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<Self> {
        nu1.domain().ensure_same(nu2.domain())?;
        let domain = nu1.domain();
        let coordinates = nu1
            .atoms()
            .iter()
            .chain(nu2.atoms())
            .flat_map(|a| a.position.iter());
        let scale = exact::common_denominator(coordinates.chain(std::iter::once(domain.side())));
        let to_int = |x: &BigRational| -> Result<i128> {
            let v = (x * BigRational::from_integer(scale.clone())).to_integer();
            v.to_i128()
                .filter(|v| v.abs() < COORDINATE_LIMIT)
                .ok_or_else(|| Error::Overflow(format!("coordinate {x} at scale {scale}")))
        };
        let convert = |nu: &AtomicMeasure| -> Result<Vec<Vec<i128>>> {
            nu.atoms()
                .iter()
                .map(|a| a.position.iter().map(&to_int).collect())
                .collect()
        };
        Ok(Frame {
            torus: domain.is_torus(),
            side: to_int(domain.side())?,
            first: convert(nu1)?,
            second: convert(nu2)?,
            scale,
        })
    }

    pub fn len_first(&self) -> usize {
        self.first.len()
    }

    pub fn len_second(&self) -> usize {
        self.second.len()
    }

    fn gap(&self, a: i128, b: i128) -> u128 {
        let d = (a - b).abs();
        if self.torus {
            let d = d.rem_euclid(self.side);
            d.min(self.side - d) as u128
        } else {
            d as u128
        }
    }

    fn squared_between(&self, p: &[i128], q: &[i128]) -> u128 {
        p.iter()
            .zip(q)
            .map(|(&a, &b)| {
                let g = self.gap(a, b);
                g * g
            })
            .sum()
    }

    /// Scaled squared distance between atom `i` of the first measure and atom
    /// `j` of the second.
    pub fn squared(&self, i: usize, j: usize) -> u128 {
        self.squared_between(&self.first[i], &self.second[j])
    }

    pub fn to_distance(&self, scaled_squared: u128) -> Distance {
        let q = BigRational::from_integer(self.scale.clone());
        Distance {
            squared: BigRational::from_integer(BigInt::from(scaled_squared)) / (&q * &q),
        }
    }

    /// Largest scaled squared value not exceeding `d`; `None` when `d` is
    /// beyond every representable pair distance.
    pub fn threshold(&self, d: &Distance) -> Option<u128> {
        let q = BigRational::from_integer(self.scale.clone());
        (d.squared() * &q * &q).floor().to_integer().to_u128()
    }

    /// All pair values `(i, j, s)` with `s ≤ cap`.
    pub fn pairs_within(&self, cap: u128) -> Vec<(usize, usize, u128)> {
        let mut out = Vec::new();
        for (i, p) in self.first.iter().enumerate() {
            for (j, q) in self.second.iter().enumerate() {
                let s = self.squared_between(p, q);
                if s <= cap {
                    out.push((i, j, s));
                }
            }
        }
        out
    }

    /// Largest over both sides of the distance from an atom to its nearest
    /// atom on the other side.
    pub fn nearest_lower_bound(&self) -> u128 {
        let mut best_first = vec![u128::MAX; self.first.len()];
        let mut best_second = vec![u128::MAX; self.second.len()];
        for (i, p) in self.first.iter().enumerate() {
            for (j, q) in self.second.iter().enumerate() {
                let s = self.squared_between(p, q);
                best_first[i] = best_first[i].min(s);
                best_second[j] = best_second[j].min(s);
            }
        }
        best_first
            .into_iter()
            .chain(best_second)
            .filter(|&s| s != u128::MAX)
            .max()
            .unwrap_or(0)
    }

    /// Largest pair value.
    pub fn max_pair(&self) -> u128 {
        let mut m = 0;
        for p in &self.first {
            for q in &self.second {
                m = m.max(self.squared_between(p, q));
            }
        }
        m
    }

    /// Smallest pair value strictly above `s`, if any.
    pub fn next_above(&self, s: u128) -> Option<u128> {
        let mut best: Option<u128> = None;
        for p in &self.first {
            for q in &self.second {
                let v = self.squared_between(p, q);
                if v > s && best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};

    fn line(points1: &[BigRational], points2: &[BigRational], side: i64) -> Frame {
        let d = Domain::torus(1, integer(side)).unwrap();
        let nu = |p: &[BigRational]| {
            AtomicMeasure::unit_masses(d.clone(), p.iter().map(|x| vec![x.clone()]).collect())
                .unwrap()
        };
        Frame::new(&nu(points1), &nu(points2)).unwrap()
    }

    #[test]
    fn torus_distances_are_exact() {
        let f = line(&[rational(1, 3)], &[rational(11, 3), integer(2)], 4);
        assert_eq!(f.to_distance(f.squared(0, 0)), Distance::from_radius(&rational(2, 3)).unwrap());
        assert_eq!(f.to_distance(f.squared(0, 1)).exact(), Some(rational(5, 3)));
        assert_eq!(f.max_pair(), f.squared(0, 1));
        assert_eq!(f.next_above(f.squared(0, 0)), Some(f.squared(0, 1)));
    }

    #[test]
    fn thresholds_round_down() {
        let f = line(&[integer(0)], &[integer(1)], 4);
        let d = Distance::from_squared(rational(3, 2)).unwrap();
        assert_eq!(f.threshold(&d), Some(1));
        assert_eq!(f.pairs_within(0).len(), 0);
        assert_eq!(f.pairs_within(1).len(), 1);
    }

    #[test]
    fn distance_display_and_order() {
        let a = Distance::from_squared(integer(2)).unwrap();
        let b = Distance::from_radius(&rational(3, 2)).unwrap();
        assert!(a < b);
        assert_eq!(format!("{a}"), "√2");
        assert_eq!(format!("{b}"), "1.5");
        assert_eq!(b.scaled(&integer(3)).exact(), Some(rational(1, 2)));
    }
}
