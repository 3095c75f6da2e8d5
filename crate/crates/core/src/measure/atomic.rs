use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{multi_indices, Domain};
use crate::exact::{self, to_f64};
use crate::{invalid, Error, Result};

/// A point mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub position: Vec<BigRational>,
    pub mass: BigRational,
}

impl Atom {
    pub fn new(position: Vec<BigRational>, mass: BigRational) -> Self {
        Atom { position, mass }
    }

    pub fn unit(position: Vec<BigRational>) -> Self {
        Atom::new(position, exact::integer(1))
    }

    pub fn position_f64(&self) -> Vec<f64> {
        self.position.iter().map(to_f64).collect()
    }
}

/// Finite sum of weighted Dirac masses on a [`Domain`].
///
/// Positions are stored in canonical form (wrapped into `[0, L)` on a torus),
/// masses are strictly positive rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicMeasure {
    domain: Domain,
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(domain: Domain, atoms: Vec<Atom>) -> Result<Self> {
        let mut canonical = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if atom.position.len() != domain.dim() {
                return Err(invalid(
                    "position",
                    format!("expected {} coordinates, got {}", domain.dim(), atom.position.len()),
                ));
            }
            if !atom.mass.is_positive() {
                return Err(invalid("mass", "atom masses must be positive"));
            }
            let position = atom
                .position
                .iter()
                .map(|x| domain.canonical_coordinate(x))
                .collect::<Result<Vec<_>>>()?;
            canonical.push(Atom::new(position, atom.mass));
        }
        Ok(AtomicMeasure {
            domain,
            atoms: canonical,
        })
    }

    /// Unit masses at the given points.
    pub fn unit_masses(domain: Domain, points: Vec<Vec<BigRational>>) -> Result<Self> {
        Self::new(domain, points.into_iter().map(Atom::unit).collect())
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms
            .iter()
            .fold(BigRational::zero(), |acc, a| acc + &a.mass)
    }

    pub fn positions_f64(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(Atom::position_f64).collect()
    }

    pub fn has_unit_masses(&self) -> bool {
        self.atoms.iter().all(|a| a.mass == exact::integer(1))
    }

    /// Mass of the atoms with the given indices.
    pub fn mass_of(&self, indices: &[usize]) -> BigRational {
        indices
            .iter()
            .fold(BigRational::zero(), |acc, &i| acc + &self.atoms[i].mass)
    }

    /// Multiplies every mass by `factor`.
    pub fn with_mass_factor(&self, factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(invalid("factor", "must be positive"));
        }
        Ok(AtomicMeasure {
            domain: self.domain.clone(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.position.clone(), &a.mass * factor))
                .collect(),
        })
    }

    /// Scaling action `ν_t(B) = ν(tB)`: atom `x` moves to `x / t`, masses are
    /// unchanged, and the domain side becomes `L / t`.
    pub fn scaled(&self, t: &BigRational) -> Result<Self> {
        let domain = self.domain.scaled(t)?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.position.iter().map(|x| x / t).collect(), a.mass.clone()))
            .collect();
        AtomicMeasure::new(domain, atoms)
    }

    /// Scaling that keeps the density against Lebesgue measure: positions as in
    /// [`scaled`](Self::scaled), masses multiplied by `t^{-d}`.
    pub fn scaled_density(&self, t: &BigRational) -> Result<Self> {
        let factor = exact::pow(&t.recip(), self.dim());
        self.scaled(t)?.with_mass_factor(&factor)
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::Empty)
        } else {
            Ok(())
        }
    }
}

/// `scale_measure(ν, t)`; see [`AtomicMeasure::scaled`].
pub fn scale_measure(nu: &AtomicMeasure, t: &BigRational) -> Result<AtomicMeasure> {
    nu.scaled(t)
}

/// Number of pitch-`h` cells per axis, requiring `L / h` to be a positive integer.
pub fn cells_per_axis(domain: &Domain, pitch: &BigRational) -> Result<usize> {
    if !pitch.is_positive() {
        return Err(invalid("pitch", "must be positive"));
    }
    let ratio = domain.side() / pitch;
    if !ratio.is_integer() {
        return Err(invalid(
            "pitch",
            format!(
                "side {} is not an integer multiple of pitch {}",
                exact::format_rational(domain.side()),
                exact::format_rational(pitch)
            ),
        ));
    }
    ratio
        .to_integer()
        .to_usize()
        .ok_or_else(|| invalid("pitch", "too many cells"))
}

/// Lebesgue measure atomized at the centers of the pitch-`h` cells, each with
/// mass `h^d`.
pub fn lebesgue_atoms(domain: &Domain, pitch: &BigRational) -> Result<AtomicMeasure> {
    let n = cells_per_axis(domain, pitch)?;
    let d = domain.dim();
    let cell_mass = exact::pow(pitch, d);
    let half = exact::rational(1, 2);
    let centers: Vec<BigRational> = (0..n)
        .map(|i| (BigRational::from_integer(BigInt::from(i)) + &half) * pitch)
        .collect();
    let atoms = multi_indices(&vec![n; d])
        .map(|index| {
            Atom::new(
                index.iter().map(|&i| centers[i].clone()).collect(),
                cell_mass.clone(),
            )
        })
        .collect();
    AtomicMeasure::new(domain.clone(), atoms)
}
