use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{self, to_f64};
use crate::{invalid, Error, Result};

pub const MAX_DIMENSION: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// `[0, L)^d` with periodic identification.
    Torus,
    /// The closed cube `[0, L]^d`.
    Box,
}

/// A `d`-dimensional torus or box of side `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    dim: usize,
    kind: DomainKind,
    side: BigRational,
}

impl Domain {
    pub fn new(dim: usize, kind: DomainKind, side: BigRational) -> Result<Self> {
        if dim == 0 || dim > MAX_DIMENSION {
            return Err(invalid("dimension", format!("{dim} not in 1..=3")));
        }
        if !side.is_positive() {
            return Err(invalid("side", "must be positive"));
        }
        Ok(Domain { dim, kind, side })
    }

    pub fn torus(dim: usize, side: BigRational) -> Result<Self> {
        Self::new(dim, DomainKind::Torus, side)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn side(&self) -> &BigRational {
        &self.side
    }

    pub fn side_f64(&self) -> f64 {
        to_f64(&self.side)
    }

    pub fn is_torus(&self) -> bool {
        self.kind == DomainKind::Torus
    }

    pub fn volume(&self) -> BigRational {
        exact::pow(&self.side, self.dim)
    }

    /// Same domain with side `L / t`.
    pub fn scaled(&self, t: &BigRational) -> Result<Self> {
        if !t.is_positive() {
            return Err(invalid("t", "scaling factor must be positive"));
        }
        Ok(Domain {
            dim: self.dim,
            kind: self.kind,
            side: &self.side / t,
        })
    }

    /// Canonical representative of a coordinate: wrapped into `[0, L)` on the
    /// torus, checked against `[0, L]` on the box.
    pub fn canonical_coordinate(&self, x: &BigRational) -> Result<BigRational> {
        match self.kind {
            DomainKind::Torus => {
                let q = (x / &self.side).floor();
                Ok(x - q * &self.side)
            }
            DomainKind::Box => {
                if x.is_negative() || x > &self.side {
                    Err(invalid(
                        "position",
                        format!("{} outside [0, {}]", exact::format_rational(x), self.side),
                    ))
                } else {
                    Ok(x.clone())
                }
            }
        }
    }

    /// Per-axis displacement magnitude under the domain metric.
    pub fn axis_gap_f64(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self.kind {
            DomainKind::Torus => {
                let l = self.side_f64();
                let d = d.rem_euclid(l);
                d.min(l - d)
            }
            DomainKind::Box => d,
        }
    }

    pub fn distance_f64(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.axis_gap_f64(x, y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Signed shortest displacement `b − a` on the torus (componentwise in
    /// `(−L/2, L/2]`), plain difference on the box.
    pub fn displacement_f64(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let l = self.side_f64();
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = y - x;
                match self.kind {
                    DomainKind::Torus => {
                        let w = d.rem_euclid(l);
                        if w > l / 2.0 {
                            w - l
                        } else {
                            w
                        }
                    }
                    DomainKind::Box => d,
                }
            })
            .collect()
    }

    /// Exact squared distance, for small instances and oracles.
    pub fn squared_distance(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let mut d = (x - y).abs();
                if self.kind == DomainKind::Torus {
                    let q = (&d / &self.side).floor();
                    d -= q * &self.side;
                    let alt = &self.side - &d;
                    if alt < d {
                        d = alt;
                    }
                }
                &d * &d
            })
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    pub(crate) fn ensure_same(&self, other: &Domain) -> Result<()> {
        if self != other {
            return Err(Error::DomainMismatch(format!(
                "{:?}/{}d/side {} vs {:?}/{}d/side {}",
                self.kind, self.dim, self.side, other.kind, other.dim, other.side
            )));
        }
        Ok(())
    }
}
