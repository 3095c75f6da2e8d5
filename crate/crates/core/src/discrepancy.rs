//! The discrepancy distance `Di` and its certificates.
//!
//! `Di(ν1, ν2)` is the least `r` with `ν1(B) ≤ ν2(B_{+r})` and
//! `ν2(B) ≤ ν1(B_{+r})` for every set `B`, where `B_{+r}` is the closed
//! `r`-neighbourhood. For atomic measures it is enough to test sets `C` of
//! atoms: shrinking `B` to the atoms it contains leaves the left side fixed
//! and can only shrink the right side. The optimum is zero or an exact pair
//! distance.
//!
//! Two independent deciders are provided: exhaustive subset enumeration (up
//! to [`ENUMERATION_LIMIT`] atoms per side) and minimum-cut extraction from
//! the transport flow.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::frame::{Distance, Frame};
use crate::measure::{lebesgue_atoms, AtomicMeasure};
use crate::transport::{
    bottleneck_distance, ensure_balanced, integer_masses, probe_pairs, threshold_search,
    Certificate, Relation, Side,
};
use crate::{exact, Error, Result};

pub const ENUMERATION_LIMIT: usize = 12;

/// A set `C` of atoms on one side whose mass exceeds the other measure's mass
/// on the neighbourhood of `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolatingSet {
    pub side: Side,
    pub atoms: Vec<usize>,
    /// Neighbourhood radius; `None` for an explicit relation.
    pub radius: Option<Distance>,
    /// `ν_i(C)`.
    pub mass: BigRational,
    /// `ν_j(C_{+r})`.
    pub neighbourhood_mass: BigRational,
}

/// Both masses of the neighbourhood condition for one set.
#[derive(Clone, Debug, PartialEq)]
pub struct DiCheck {
    pub holds: bool,
    pub mass: BigRational,
    pub neighbourhood_mass: BigRational,
    pub neighbourhood: Vec<usize>,
}

fn check_with(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    side: Side,
    atoms: &[usize],
    related: impl Fn(usize, usize) -> bool,
) -> DiCheck {
    let (own, other) = match side {
        Side::First => (nu1, nu2),
        Side::Second => (nu2, nu1),
    };
    let neighbourhood: Vec<usize> = (0..other.len())
        .filter(|&k| {
            atoms.iter().any(|&c| match side {
                Side::First => related(c, k),
                Side::Second => related(k, c),
            })
        })
        .collect();
    let mass = own.mass_of(atoms);
    let neighbourhood_mass = other.mass_of(&neighbourhood);
    DiCheck {
        holds: mass <= neighbourhood_mass,
        mass,
        neighbourhood_mass,
        neighbourhood,
    }
}

/// Evaluates `ν_i(C) ≤ ν_j(C_{+r})` for a set `C` of atoms of side `i`.
pub fn check_di_condition(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    r: &Distance,
    side: Side,
    atoms: &[usize],
) -> Result<DiCheck> {
    let frame = Frame::new(nu1, nu2)?;
    let cap = frame.threshold(r).unwrap_or(u128::MAX);
    check_atoms(nu1, nu2, side, atoms)?;
    Ok(check_with(nu1, nu2, side, atoms, |i, j| frame.squared(i, j) <= cap))
}

/// As [`check_di_condition`] with `C_{+F}` taken under a relation.
pub fn check_relation_condition(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    relation: &Relation,
    side: Side,
    atoms: &[usize],
) -> Result<DiCheck> {
    check_atoms(nu1, nu2, side, atoms)?;
    match relation {
        Relation::Radius(r) => check_di_condition(nu1, nu2, r, side, atoms),
        Relation::Explicit(m) => Ok(check_with(nu1, nu2, side, atoms, |i, j| m[i][j])),
    }
}

fn check_atoms(nu1: &AtomicMeasure, nu2: &AtomicMeasure, side: Side, atoms: &[usize]) -> Result<()> {
    let n = match side {
        Side::First => nu1.len(),
        Side::Second => nu2.len(),
    };
    if let Some(&bad) = atoms.iter().find(|&&a| a >= n) {
        return Err(crate::invalid("C", format!("atom index {bad} out of range ({n} atoms)")));
    }
    Ok(())
}

impl ViolatingSet {
    /// Re-evaluates the set against the instance; a genuine certificate
    /// reports `holds == false`.
    pub fn replay(&self, nu1: &AtomicMeasure, nu2: &AtomicMeasure, relation: &Relation) -> Result<DiCheck> {
        check_relation_condition(nu1, nu2, relation, self.side, &self.atoms)
    }
}

/// How the neighbourhood condition was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiMethod {
    Enumeration,
    Cut,
}

#[derive(Clone, Debug)]
pub struct Discrepancy {
    pub value: Distance,
    /// A violating set at the largest candidate radius below `value`;
    /// `None` when `value` is zero.
    pub certificate_below: Option<ViolatingSet>,
    pub method: DiMethod,
    pub candidates_probed: usize,
}

/// Subset-enumeration decider over bitmask neighbourhoods.
struct Enumerator {
    m1: Vec<i128>,
    m2: Vec<i128>,
    sums2: Vec<i128>,
    sums1: Vec<i128>,
}

impl Enumerator {
    fn new(m1: &[i64], m2: &[i64]) -> Self {
        let widen = |m: &[i64]| m.iter().map(|&w| w as i128).collect::<Vec<_>>();
        let subset_sums = |m: &[i128]| {
            let mut s = vec![0i128; 1 << m.len()];
            for mask in 1usize..s.len() {
                let low = mask.trailing_zeros() as usize;
                s[mask] = s[mask & (mask - 1)] + m[low];
            }
            s
        };
        let (m1, m2) = (widen(m1), widen(m2));
        Enumerator {
            sums1: subset_sums(&m1),
            sums2: subset_sums(&m2),
            m1,
            m2,
        }
    }

    /// First set violating the condition on one side, given each atom's
    /// neighbourhood as a bitmask over the other side.
    fn violation_on(own: &[i128], other_sums: &[i128], adjacency: &[u32]) -> Option<u32> {
        let n = own.len();
        let mut nb = vec![0u32; 1 << n];
        let mut mass = vec![0i128; 1 << n];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            nb[mask] = nb[rest] | adjacency[low];
            mass[mask] = mass[rest] + own[low];
            if mass[mask] > other_sums[nb[mask] as usize] {
                return Some(mask as u32);
            }
        }
        None
    }

    fn violation(&self, related: impl Fn(usize, usize) -> bool) -> Option<(Side, u32)> {
        let (n1, n2) = (self.m1.len(), self.m2.len());
        let adj1: Vec<u32> = (0..n1)
            .map(|i| (0..n2).filter(|&j| related(i, j)).fold(0, |m, j| m | (1 << j)))
            .collect();
        let adj2: Vec<u32> = (0..n2)
            .map(|j| (0..n1).filter(|&i| related(i, j)).fold(0, |m, i| m | (1 << i)))
            .collect();
        Self::violation_on(&self.m1, &self.sums2, &adj1)
            .map(|c| (Side::First, c))
            .or_else(|| Self::violation_on(&self.m2, &self.sums1, &adj2).map(|c| (Side::Second, c)))
    }
}

fn mask_atoms(mask: u32) -> Vec<usize> {
    (0..32).filter(|&k| mask & (1 << k) != 0).collect()
}

fn violating_from_mask(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    side: Side,
    mask: u32,
    radius: Option<Distance>,
    related: impl Fn(usize, usize) -> bool,
) -> ViolatingSet {
    let atoms = mask_atoms(mask);
    let check = check_with(nu1, nu2, side, &atoms, related);
    ViolatingSet {
        side,
        atoms,
        radius,
        mass: check.mass,
        neighbourhood_mass: check.neighbourhood_mass,
    }
}

fn within_enumeration_limit(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> bool {
    nu1.len() <= ENUMERATION_LIMIT && nu2.len() <= ENUMERATION_LIMIT
}

fn by_enumeration(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<Discrepancy> {
    let frame = Frame::new(nu1, nu2)?;
    let masses = integer_masses(nu1, nu2)?;
    let e = Enumerator::new(&masses.first, &masses.second);
    let mut candidates: Vec<u128> = std::iter::once(0)
        .chain(frame.pairs_within(u128::MAX).into_iter().map(|p| p.2))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let decide = |cap: u128| e.violation(|i, j| frame.squared(i, j) <= cap);
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let mut probed = 0;
    let mut below: Option<(u128, Side, u32)> = None;
    let mut probes: Vec<(u128, bool)> = Vec::new();
    while lo < hi {
        let mid = (lo + hi) / 2;
        probed += 1;
        match decide(candidates[mid]) {
            None => {
                probes.push((candidates[mid], true));
                hi = mid
            }
            Some((side, mask)) => {
                probes.push((candidates[mid], false));
                if below.is_none_or(|b| candidates[mid] > b.0) {
                    below = Some((candidates[mid], side, mask));
                }
                lo = mid + 1;
            }
        }
    }
    assert_monotone(&probes);
    let value = candidates[lo];
    if lo > 0 && below.is_none_or(|b| b.0 != candidates[lo - 1]) {
        probed += 1;
        let (side, mask) = decide(candidates[lo - 1]).expect("predecessor of the minimum is infeasible");
        below = Some((candidates[lo - 1], side, mask));
    }
    let certificate_below = below.map(|(cap, side, mask)| {
        violating_from_mask(nu1, nu2, side, mask, Some(frame.to_distance(cap)), |i, j| {
            frame.squared(i, j) <= cap
        })
    });
    Ok(Discrepancy {
        value: frame.to_distance(value),
        certificate_below,
        method: DiMethod::Enumeration,
        candidates_probed: probed,
    })
}

fn assert_monotone(probes: &[(u128, bool)]) {
    let worst_bad = probes.iter().filter(|p| !p.1).map(|p| p.0).max();
    let best_good = probes.iter().filter(|p| p.1).map(|p| p.0).min();
    if let (Some(a), Some(b)) = (worst_bad, best_good) {
        assert!(a < b, "neighbourhood condition is not monotone in the radius");
    }
}

fn by_cut(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<Discrepancy> {
    let frame = Frame::new(nu1, nu2)?;
    let masses = integer_masses(nu1, nu2)?;
    let probe = |cap: u128| {
        let pairs: Vec<(usize, usize)> = frame
            .pairs_within(cap)
            .into_iter()
            .map(|(i, j, _)| (i, j))
            .collect();
        probe_pairs(nu1, nu2, &masses, &pairs, Some(frame.to_distance(cap)))
    };
    let search = threshold_search(&frame, probe);
    let mut probed = search.probes.len();
    let certificate_below = if search.value == 0 {
        None
    } else {
        let previous = frame
            .pairs_within(search.value - 1)
            .into_iter()
            .map(|p| p.2)
            .max()
            .unwrap_or(0);
        probed += 1;
        match probe(previous) {
            Certificate::Violating(v) => Some(v),
            Certificate::Coupling(_) => panic!("feasible below the minimal radius"),
        }
    };
    Ok(Discrepancy {
        value: frame.to_distance(search.value),
        certificate_below,
        method: DiMethod::Cut,
        candidates_probed: probed,
    })
}

/// `Di(ν1, ν2)` with a certificate that no smaller candidate radius works.
///
/// Uses subset enumeration when both sides have at most
/// [`ENUMERATION_LIMIT`] atoms and cut certificates otherwise.
pub fn discrepancy_distance(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<Discrepancy> {
    let method = if within_enumeration_limit(nu1, nu2) {
        DiMethod::Enumeration
    } else {
        DiMethod::Cut
    };
    discrepancy_distance_with(nu1, nu2, method)
}

/// [`discrepancy_distance`] with the decider chosen by the caller.
pub fn discrepancy_distance_with(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    method: DiMethod,
) -> Result<Discrepancy> {
    ensure_balanced(nu1, nu2)?;
    match method {
        DiMethod::Enumeration => {
            let size = nu1.len().max(nu2.len());
            if size > ENUMERATION_LIMIT {
                return Err(Error::TooLarge {
                    size,
                    limit: ENUMERATION_LIMIT,
                });
            }
            by_enumeration(nu1, nu2)
        }
        DiMethod::Cut => by_cut(nu1, nu2),
    }
}

#[derive(Clone, Debug)]
pub struct DualityReport {
    pub tra: Distance,
    pub di: Distance,
    /// `|Tra − Di|` in floating point; zero whenever `agree`.
    pub gap: f64,
    /// Exact equality of the two distances.
    pub agree: bool,
    pub method: DiMethod,
}

/// Computes `Tra` by max-flow and `Di` by enumeration (or cuts on large
/// instances) and compares them exactly.
pub fn duality_check(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<DualityReport> {
    let tra = bottleneck_distance(nu1, nu2)?.value;
    let di = discrepancy_distance(nu1, nu2)?;
    Ok(DualityReport {
        gap: (tra.value() - di.value.value()).abs(),
        agree: tra == di.value,
        tra,
        di: di.value,
        method: di.method,
    })
}

#[derive(Clone, Debug)]
pub struct RelationDualityReport {
    /// A coupling supported in `F` exists.
    pub transport_feasible: bool,
    /// `ν_i(C) ≤ ν_j(C_{+F})` for every `C` on both sides.
    pub di_holds: bool,
    pub certificate: Option<ViolatingSet>,
    pub agree: bool,
    pub method: DiMethod,
}

/// Feasibility of transport inside `F` against the neighbourhood condition
/// under `F`, decided independently.
pub fn duality_check_relation(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    relation: &Relation,
) -> Result<RelationDualityReport> {
    let transport = crate::transport::feasible_coupling(nu1, nu2, relation)?;
    let frame = Frame::new(nu1, nu2)?;
    let related: Box<dyn Fn(usize, usize) -> bool> = match relation {
        Relation::Radius(r) => {
            let cap = frame.threshold(r).unwrap_or(u128::MAX);
            Box::new(move |i, j| frame.squared(i, j) <= cap)
        }
        Relation::Explicit(m) => Box::new(move |i, j| m[i][j]),
    };
    let radius = match relation {
        Relation::Radius(r) => Some(r.clone()),
        Relation::Explicit(_) => None,
    };
    let (method, certificate) = if within_enumeration_limit(nu1, nu2) {
        let masses = integer_masses(nu1, nu2)?;
        let e = Enumerator::new(&masses.first, &masses.second);
        let found = e
            .violation(&related)
            .map(|(side, mask)| violating_from_mask(nu1, nu2, side, mask, radius, &related));
        (DiMethod::Enumeration, found)
    } else {
        let found = match &transport {
            Certificate::Violating(v) => Some(v.clone()),
            Certificate::Coupling(_) => None,
        };
        (DiMethod::Cut, found)
    };
    let transport_feasible = transport.is_feasible();
    let di_holds = certificate.is_none();
    Ok(RelationDualityReport {
        transport_feasible,
        di_holds,
        certificate,
        agree: transport_feasible == di_holds,
        method,
    })
}

/// `D(ν) = Di(ν, m)` against Lebesgue measure atomized at cell centres.
#[derive(Clone, Debug)]
pub struct DvlReport {
    /// `Di` between `ν` and the atomized Lebesgue measure.
    pub value: Distance,
    /// `h√d / 2`: the continuum value lies within this of `value`.
    pub slack: f64,
    pub lower: f64,
    pub upper: f64,
    /// The cell masses were rescaled to `ν`'s total (within `1e-6` of the
    /// domain volume but not equal to it).
    pub rescaled: bool,
    pub cells: usize,
    pub method: DiMethod,
}

const BALANCE_TOLERANCE: f64 = 1e-6;

/// Discrepancy of `ν` against Lebesgue measure on the pitch-`h` grid.
pub fn discrepancy_vs_lebesgue(nu: &AtomicMeasure, pitch: &BigRational) -> Result<DvlReport> {
    nu.ensure_nonempty()?;
    let domain = nu.domain();
    let mass = nu.total_mass();
    let volume = domain.volume();
    let (mass_f, volume_f) = (exact::to_f64(&mass), exact::to_f64(&volume));
    if ((&mass - &volume) / &volume).to_f64().unwrap_or(f64::INFINITY).abs() > BALANCE_TOLERANCE {
        return Err(Error::MassImbalance {
            mass: mass_f,
            volume: volume_f,
        });
    }
    let mut lebesgue = lebesgue_atoms(domain, pitch)?;
    let rescaled = mass != volume;
    if rescaled {
        lebesgue = lebesgue.with_mass_factor(&(&mass / &volume))?;
    }
    let di = discrepancy_distance(nu, &lebesgue)?;
    let slack = exact::to_f64(pitch) * (domain.dim() as f64).sqrt() / 2.0;
    let v = di.value.value();
    Ok(DvlReport {
        lower: (v - slack).max(0.0),
        upper: v + slack,
        slack,
        rescaled,
        cells: lebesgue.len(),
        method: di.method,
        value: di.value,
    })
}

impl Discrepancy {
    pub fn is_zero(&self) -> bool {
        self.value.squared().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};
    use crate::measure::{Domain, DomainKind};

    fn line(points: &[BigRational]) -> AtomicMeasure {
        AtomicMeasure::unit_masses(
            Domain::new(1, DomainKind::Box, integer(4)).unwrap(),
            points.iter().map(|x| vec![x.clone()]).collect(),
        )
        .unwrap()
    }

    fn pair() -> (AtomicMeasure, AtomicMeasure) {
        (line(&[integer(0), integer(1)]), line(&[rational(1, 2), rational(3, 2)]))
    }

    #[test]
    fn identical_measures() {
        let (a, _) = pair();
        let d = discrepancy_distance(&a, &a).unwrap();
        assert!(d.is_zero());
        assert!(d.certificate_below.is_none());
    }

    #[test]
    fn half_with_certificate_below() {
        let (a, b) = pair();
        for method in [DiMethod::Enumeration, DiMethod::Cut] {
            let d = discrepancy_distance_with(&a, &b, method).unwrap();
            assert_eq!(d.value.exact(), Some(rational(1, 2)), "{method:?}");
            let c = d.certificate_below.unwrap();
            assert!(c.radius.as_ref().unwrap() < &d.value);
            let replay = c.replay(&a, &b, &Relation::Radius(c.radius.clone().unwrap())).unwrap();
            assert!(!replay.holds);
        }
    }

    #[test]
    fn point_masses() {
        let x = line(&[rational(1, 3)]);
        let y = line(&[integer(3)]);
        assert_eq!(discrepancy_distance(&x, &y).unwrap().value.exact(), Some(rational(8, 3)));
        let r = duality_check(&x, &y).unwrap();
        assert!(r.agree);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn empty_set_and_large_radius() {
        let (a, b) = pair();
        let r = Distance::from_radius(&integer(0)).unwrap();
        assert!(check_di_condition(&a, &b, &r, Side::First, &[]).unwrap().holds);
        let big = Distance::from_radius(&integer(4)).unwrap();
        for c in [vec![0], vec![1], vec![0, 1]] {
            assert!(check_di_condition(&a, &b, &big, Side::First, &c).unwrap().holds);
            assert!(check_di_condition(&a, &b, &big, Side::Second, &c).unwrap().holds);
        }
        assert!(check_di_condition(&a, &b, &big, Side::First, &[5]).is_err());
    }

    #[test]
    fn complete_relation_is_feasible() {
        let (a, b) = pair();
        let r = duality_check_relation(&a, &b, &Relation::complete(2, 2)).unwrap();
        assert!(r.transport_feasible && r.di_holds && r.agree);
        let tight = Relation::radius(&rational(2, 5)).unwrap();
        let r = duality_check_relation(&a, &b, &tight).unwrap();
        assert!(!r.transport_feasible && !r.di_holds && r.agree);
    }

    #[test]
    fn grid_atomization_has_zero_discrepancy() {
        let d = Domain::torus(2, integer(2)).unwrap();
        let h = rational(1, 2);
        let m = lebesgue_atoms(&d, &h).unwrap();
        let r = discrepancy_vs_lebesgue(&m, &h).unwrap();
        assert!(r.value.is_zero());
        assert!(!r.rescaled);
    }

    #[test]
    fn imbalance_rejected() {
        let d = Domain::torus(1, integer(2)).unwrap();
        let nu = AtomicMeasure::unit_masses(d, vec![vec![integer(0)]]).unwrap();
        assert!(matches!(
            discrepancy_vs_lebesgue(&nu, &rational(1, 2)),
            Err(Error::MassImbalance { .. })
        ));
    }

    #[test]
    fn integers_against_lebesgue() {
        let d = Domain::torus(1, integer(8)).unwrap();
        let nu = AtomicMeasure::unit_masses(d, (0..8).map(|i| vec![integer(i)]).collect()).unwrap();
        let h = rational(1, 8);
        let r = discrepancy_vs_lebesgue(&nu, &h).unwrap();
        let v = r.value.value();
        assert!((0.5 - 1.0 / 16.0..=0.5 + 1.0 / 16.0).contains(&v), "{v}");
    }

    #[test]
    fn zero_distance_has_no_certificate() {
        let (a, _) = pair();
        assert!(discrepancy_distance_with(&a, &a, DiMethod::Cut)
            .unwrap()
            .certificate_below
            .is_none());
        assert_eq!(
            discrepancy_distance(&a, &a).unwrap().value,
            Distance::from_squared(BigRational::zero()).unwrap()
        );
    }
}
