//! L∞ transportation: couplings, feasibility under a relation, and the
//! bottleneck distance `Tra`.
//!
//! A coupling inside a relation `F` exists exactly when a max-flow on the
//! bipartite graph of `F` saturates every supply. When it does not, the
//! supplies still reachable in the residual graph form a set `C` with
//! `ν1(C) > ν2(C_{+F})`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::discrepancy::ViolatingSet;
use crate::flow::bipartite_flow;
use crate::frame::{Distance, Frame};
use crate::measure::{AtomicMeasure, Domain};
use crate::{exact, invalid, Error, Result};

/// Which of the two measures a set of atoms belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

/// Admissible pairs `(source atom, target atom)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Relation {
    /// `|x − y| ≤ r` under the domain metric.
    Radius(Distance),
    /// `allowed[i][j]` for source atom `i`, target atom `j`.
    Explicit(Vec<Vec<bool>>),
}

impl Relation {
    pub fn radius(r: &BigRational) -> Result<Relation> {
        Ok(Relation::Radius(Distance::from_radius(r)?))
    }

    /// Every pair admitted.
    pub fn complete(n1: usize, n2: usize) -> Relation {
        Relation::Explicit(vec![vec![true; n2]; n1])
    }

    /// An explicit relation, checked for shape and for symmetry: whenever
    /// source atom `i` sits where target atom `j'` sits and target atom `j`
    /// sits where source atom `i'` sits, `(i, j)` and `(i', j')` must agree.
    pub fn explicit(
        allowed: Vec<Vec<bool>>,
        source: &AtomicMeasure,
        target: &AtomicMeasure,
    ) -> Result<Relation> {
        if allowed.len() != source.len() || allowed.iter().any(|row| row.len() != target.len()) {
            return Err(invalid(
                "relation",
                format!("expected a {} × {} matrix", source.len(), target.len()),
            ));
        }
        let twins = |from: &AtomicMeasure, to: &AtomicMeasure| -> Vec<Vec<usize>> {
            from.atoms()
                .iter()
                .map(|a| {
                    to.atoms()
                        .iter()
                        .enumerate()
                        .filter(|(_, b)| b.position == a.position)
                        .map(|(k, _)| k)
                        .collect()
                })
                .collect()
        };
        let source_in_target = twins(source, target);
        let target_in_source = twins(target, source);
        for (i, row) in allowed.iter().enumerate() {
            for (j, &ok) in row.iter().enumerate() {
                for &i2 in &target_in_source[j] {
                    for &j2 in &source_in_target[i] {
                        if allowed[i2][j2] != ok {
                            return Err(invalid(
                                "relation",
                                format!("not symmetric at ({i}, {j}) vs ({i2}, {j2})"),
                            ));
                        }
                    }
                }
            }
        }
        Ok(Relation::Explicit(allowed))
    }

    pub(crate) fn pairs(&self, frame: &Frame) -> Vec<(usize, usize)> {
        match self {
            Relation::Radius(r) => frame
                .pairs_within(frame.threshold(r).unwrap_or(u128::MAX))
                .into_iter()
                .map(|(i, j, _)| (i, j))
                .collect(),
            Relation::Explicit(m) => m
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, &ok)| ok)
                        .map(move |(j, _)| (i, j))
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingEntry {
    pub source: usize,
    pub target: usize,
    pub weight: BigRational,
}

/// A transport plan `γ` between two atomic measures.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub source: AtomicMeasure,
    pub target: AtomicMeasure,
    pub entries: Vec<CouplingEntry>,
}

impl Coupling {
    /// Each atom sent to the atom with the same index.
    pub fn identity(nu: &AtomicMeasure) -> Coupling {
        Coupling {
            source: nu.clone(),
            target: nu.clone(),
            entries: nu
                .atoms()
                .iter()
                .enumerate()
                .map(|(i, a)| CouplingEntry {
                    source: i,
                    target: i,
                    weight: a.mass.clone(),
                })
                .collect(),
        }
    }

    pub fn domain(&self) -> &Domain {
        self.source.domain()
    }

    /// Exact distance covered by an entry.
    pub fn entry_distance(&self, e: &CouplingEntry) -> Distance {
        Distance::between(
            self.source.domain(),
            &self.source.atoms()[e.source].position,
            &self.target.atoms()[e.target].position,
        )
    }

    /// Sum of two plans between the same measures' positions.
    pub fn merged(&self, other: &Coupling) -> Result<Coupling> {
        if self.source.domain() != other.source.domain() {
            return Err(Error::DomainMismatch("couplings on different domains".into()));
        }
        let mut source_atoms = self.source.atoms().to_vec();
        let mut target_atoms = self.target.atoms().to_vec();
        let (s0, t0) = (source_atoms.len(), target_atoms.len());
        source_atoms.extend_from_slice(other.source.atoms());
        target_atoms.extend_from_slice(other.target.atoms());
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|e| CouplingEntry {
            source: e.source + s0,
            target: e.target + t0,
            weight: e.weight.clone(),
        }));
        Ok(Coupling {
            source: AtomicMeasure::new(self.domain().clone(), source_atoms)?,
            target: AtomicMeasure::new(self.domain().clone(), target_atoms)?,
            entries,
        })
    }
}

/// Outcome of a feasibility probe: exactly one of a coupling inside the
/// relation or a set violating the neighbourhood condition.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Coupling(Coupling),
    Violating(ViolatingSet),
}

impl Certificate {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Certificate::Coupling(_))
    }
}

pub(crate) fn ensure_balanced(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<()> {
    nu1.domain().ensure_same(nu2.domain())?;
    nu1.ensure_nonempty()?;
    nu2.ensure_nonempty()?;
    let (m1, m2) = (nu1.total_mass(), nu2.total_mass());
    if m1 != m2 {
        return Err(Error::MassMismatch {
            left: exact::format_rational(&m1),
            right: exact::format_rational(&m2),
        });
    }
    Ok(())
}

/// Masses as integers at a shared scale.
pub(crate) struct IntegerMasses {
    pub scale: BigInt,
    pub first: Vec<i64>,
    pub second: Vec<i64>,
}

pub(crate) fn integer_masses(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<IntegerMasses> {
    let scale =
        exact::common_denominator(nu1.atoms().iter().chain(nu2.atoms()).map(|a| &a.mass));
    let convert = |nu: &AtomicMeasure| -> Result<Vec<i64>> {
        nu.atoms()
            .iter()
            .map(|a| {
                (&a.mass * BigRational::from_integer(scale.clone()))
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::Overflow(format!("mass {} at scale {scale}", a.mass)))
            })
            .collect()
    };
    let first = convert(nu1)?;
    let second = convert(nu2)?;
    first
        .iter()
        .try_fold(0i64, |acc, &w| acc.checked_add(w))
        .ok_or_else(|| Error::Overflow("total scaled mass".into()))?;
    Ok(IntegerMasses {
        scale,
        first,
        second,
    })
}

/// Runs one flow probe on the given pairs.
pub(crate) fn probe_pairs(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    masses: &IntegerMasses,
    pairs: &[(usize, usize)],
    radius: Option<Distance>,
) -> Certificate {
    let flow = bipartite_flow(&masses.first, &masses.second, pairs);
    let scale = BigRational::from_integer(masses.scale.clone());
    if flow.is_complete() {
        Certificate::Coupling(Coupling {
            source: nu1.clone(),
            target: nu2.clone(),
            entries: flow
                .routed
                .iter()
                .map(|&(i, j, w)| CouplingEntry {
                    source: i,
                    target: j,
                    weight: BigRational::from_integer(BigInt::from(w)) / &scale,
                })
                .collect(),
        })
    } else {
        let mut in_cut = vec![false; nu1.len()];
        for &i in &flow.cut {
            in_cut[i] = true;
        }
        let mut reached = vec![false; nu2.len()];
        for &(i, j) in pairs {
            if in_cut[i] {
                reached[j] = true;
            }
        }
        let neighbours: Vec<usize> = (0..nu2.len()).filter(|&j| reached[j]).collect();
        Certificate::Violating(ViolatingSet {
            side: Side::First,
            atoms: flow.cut.clone(),
            radius,
            mass: nu1.mass_of(&flow.cut),
            neighbourhood_mass: nu2.mass_of(&neighbours),
        })
    }
}

/// A coupling of `ν1` and `ν2` supported in `F`, or a violating set.
pub fn feasible_coupling(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    relation: &Relation,
) -> Result<Certificate> {
    ensure_balanced(nu1, nu2)?;
    if let Relation::Explicit(m) = relation {
        if m.len() != nu1.len() || m.iter().any(|row| row.len() != nu2.len()) {
            return Err(invalid("relation", "matrix shape does not match the measures"));
        }
    }
    let frame = Frame::new(nu1, nu2)?;
    let masses = integer_masses(nu1, nu2)?;
    let radius = match relation {
        Relation::Radius(r) => Some(r.clone()),
        Relation::Explicit(_) => None,
    };
    Ok(probe_pairs(nu1, nu2, &masses, &relation.pairs(&frame), radius))
}

/// Result of the threshold search.
#[derive(Clone, Debug)]
pub struct Bottleneck {
    pub value: Distance,
    pub witness: Coupling,
    /// Number of flow probes run.
    pub candidates_probed: usize,
}

/// Probe record kept by the threshold search.
pub(crate) struct Search {
    pub value: u128,
    pub certificate: Certificate,
    pub probes: Vec<(u128, bool)>,
}

/// Smallest pair value of `frame` at which `probe` finds a coupling.
///
/// The search starts from the nearest-neighbour lower bound, doubles the
/// radius until a probe succeeds, then bisects the pair values in the last
/// bracket. Probe outcomes are asserted to be monotone.
pub(crate) fn threshold_search(
    frame: &Frame,
    mut probe: impl FnMut(u128) -> Certificate,
) -> Search {
    let mut probes = Vec::new();
    let max = frame.max_pair();
    let mut low: Option<u128> = None;
    let mut cap = frame.nearest_lower_bound();
    let mut best;
    loop {
        let c = probe(cap);
        probes.push((cap, c.is_feasible()));
        if c.is_feasible() {
            best = (cap, c);
            break;
        }
        assert!(cap < max, "infeasible at the largest pair distance");
        low = Some(cap);
        let grown = if cap == 0 {
            frame.next_above(0).unwrap_or(max)
        } else {
            cap.saturating_mul(4)
        };
        cap = grown.min(max);
    }
    if low.is_none() {
        // The lower bound itself is feasible.
        return Search {
            value: best.0,
            certificate: best.1,
            probes,
        };
    }
    let mut candidates: Vec<u128> = frame
        .pairs_within(cap)
        .into_iter()
        .map(|(_, _, s)| s)
        .filter(|&s| low.is_none_or(|l| s > l))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    // The bracket holds at least one value: the graph at `cap` differs from
    // the infeasible graph at `low`.
    let (mut lo, mut hi) = (0usize, candidates.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let c = probe(candidates[mid]);
        probes.push((candidates[mid], c.is_feasible()));
        if c.is_feasible() {
            if candidates[mid] <= best.0 {
                best = (candidates[mid], c);
            }
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let worst_infeasible = probes.iter().filter(|p| !p.1).map(|p| p.0).max();
    let best_feasible = probes.iter().filter(|p| p.1).map(|p| p.0).min();
    if let (Some(a), Some(b)) = (worst_infeasible, best_feasible) {
        assert!(a < b, "feasibility is not monotone in the radius");
    }
    Search {
        value: best.0,
        certificate: best.1,
        probes,
    }
}

/// `Tra(ν1, ν2)`: the least `r` admitting a coupling with every pair within
/// distance `r`, together with a coupling attaining it.
pub fn bottleneck_distance(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<Bottleneck> {
    ensure_balanced(nu1, nu2)?;
    let frame = Frame::new(nu1, nu2)?;
    let masses = integer_masses(nu1, nu2)?;
    let search = threshold_search(&frame, |cap| {
        let pairs: Vec<(usize, usize)> = frame
            .pairs_within(cap)
            .into_iter()
            .map(|(i, j, _)| (i, j))
            .collect();
        probe_pairs(nu1, nu2, &masses, &pairs, Some(frame.to_distance(cap)))
    });
    let witness = match search.certificate {
        Certificate::Coupling(c) => c,
        Certificate::Violating(_) => unreachable!("search ends on a feasible probe"),
    };
    Ok(Bottleneck {
        value: frame.to_distance(search.value),
        witness,
        candidates_probed: search.probes.len(),
    })
}

/// Largest number of atoms per side accepted by [`brute_force_bottleneck`].
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// `min over bijections σ of max_i |x_i − y_σ(i)|` by enumerating all
/// permutations. Unit masses, equal counts, at most nine atoms per side.
pub fn brute_force_bottleneck(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Result<Distance> {
    nu1.domain().ensure_same(nu2.domain())?;
    if nu1.len() != nu2.len() {
        return Err(Error::CountMismatch(nu1.len(), nu2.len()));
    }
    if nu1.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            size: nu1.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    nu1.ensure_nonempty()?;
    if !nu1.has_unit_masses() || !nu2.has_unit_masses() {
        return Err(invalid("mass", "permutation search needs unit masses"));
    }
    let n = nu1.len();
    let d: Vec<Vec<BigRational>> = nu1
        .atoms()
        .iter()
        .map(|a| {
            nu2.atoms()
                .iter()
                .map(|b| nu1.domain().squared_distance(&a.position, &b.position))
                .collect()
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| &d[i][j]).max().cloned();
    let mut best = cost(&perm).unwrap_or_else(BigRational::zero);
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if let Some(v) = cost(&perm) {
                if v < best {
                    best = v;
                }
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Distance::from_squared(best)
}

/// A bottleneck-optimal bijection between the lattice points of a torus
/// window and a unit-mass point set.
#[derive(Clone, Debug)]
pub struct Marriage {
    /// `(lattice point, atom index)` for every lattice point.
    pub map: Vec<(Vec<i64>, usize)>,
    pub sup_displacement: Distance,
}

/// Matches `Z^d ∩ [0, L)^d` to the atoms of `X` minimizing the largest
/// displacement.
pub fn marriage_bijection(x: &AtomicMeasure) -> Result<Marriage> {
    let domain = x.domain();
    if !domain.is_torus() || !domain.side().is_integer() {
        return Err(invalid("window", "needs a torus with integer side"));
    }
    if !x.has_unit_masses() {
        return Err(invalid("mass", "marriage needs unit masses"));
    }
    let n = domain
        .side()
        .to_integer()
        .to_usize()
        .ok_or_else(|| invalid("side", "too large"))?;
    let points: Vec<Vec<i64>> = crate::measure::multi_indices(&vec![n; domain.dim()])
        .map(|p| p.into_iter().map(|c| c as i64).collect())
        .collect();
    if points.len() != x.len() {
        return Err(Error::CountMismatch(points.len(), x.len()));
    }
    let lattice = AtomicMeasure::unit_masses(
        domain.clone(),
        points
            .iter()
            .map(|p| p.iter().map(|&c| exact::integer(c)).collect())
            .collect(),
    )?;
    let b = bottleneck_distance(&lattice, x)?;
    let mut map: Vec<(Vec<i64>, usize)> = b
        .witness
        .entries
        .iter()
        .map(|e| {
            debug_assert!(e.weight.is_one());
            (points[e.source].clone(), e.target)
        })
        .collect();
    map.sort();
    Ok(Marriage {
        map,
        sup_displacement: b.value,
    })
}

/// Marginal errors and support radius of a coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingReport {
    /// `Σ_i |γ(x_i, ·) − ν1(x_i)|`, plus any weight on out-of-range indices.
    pub marginal_error_1: BigRational,
    pub marginal_error_2: BigRational,
    /// Largest distance covered by an entry.
    pub support_radius: Distance,
    /// Entries whose weight is not strictly positive.
    pub nonpositive_entries: usize,
}

impl CouplingReport {
    pub fn is_exact(&self) -> bool {
        self.marginal_error_1.is_zero() && self.marginal_error_2.is_zero() && self.nonpositive_entries == 0
    }
}

/// Checks the marginals of `γ` against its source and target measures.
pub fn verify_coupling(gamma: &Coupling) -> CouplingReport {
    let mut rows = vec![BigRational::zero(); gamma.source.len()];
    let mut cols = vec![BigRational::zero(); gamma.target.len()];
    let mut stray_1 = BigRational::zero();
    let mut stray_2 = BigRational::zero();
    let mut support = Distance::zero();
    let mut nonpositive = 0;
    for e in &gamma.entries {
        if !e.weight.is_positive() {
            nonpositive += 1;
        }
        match rows.get_mut(e.source) {
            Some(r) => *r += &e.weight,
            None => stray_1 += e.weight.abs(),
        }
        match cols.get_mut(e.target) {
            Some(c) => *c += &e.weight,
            None => stray_2 += e.weight.abs(),
        }
        if e.source < gamma.source.len() && e.target < gamma.target.len() {
            support = support.max(gamma.entry_distance(e));
        }
    }
    let error = |sums: &[BigRational], nu: &AtomicMeasure, stray: BigRational| {
        sums.iter()
            .zip(nu.atoms())
            .fold(stray, |acc, (s, a)| acc + (s - &a.mass).abs())
    };
    CouplingReport {
        marginal_error_1: error(&rows, &gamma.source, stray_1),
        marginal_error_2: error(&cols, &gamma.target, stray_2),
        support_radius: support,
        nonpositive_entries: nonpositive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};

    fn line(points: &[BigRational], side: i64) -> AtomicMeasure {
        AtomicMeasure::unit_masses(
            Domain::new(1, crate::DomainKind::Box, integer(side)).unwrap(),
            points.iter().map(|x| vec![x.clone()]).collect(),
        )
        .unwrap()
    }

    fn pair() -> (AtomicMeasure, AtomicMeasure) {
        (
            line(&[integer(0), integer(1)], 4),
            line(&[rational(1, 2), rational(3, 2)], 4),
        )
    }

    #[test]
    fn identity_at_radius_zero() {
        let (a, _) = pair();
        match feasible_coupling(&a, &a, &Relation::radius(&integer(0)).unwrap()).unwrap() {
            Certificate::Coupling(c) => {
                assert!(verify_coupling(&c).is_exact());
                assert!(c.entries.iter().all(|e| e.source == e.target));
            }
            other => panic!("expected coupling, got {other:?}"),
        }
    }

    #[test]
    fn violating_set_below_half() {
        let (a, b) = pair();
        match feasible_coupling(&a, &b, &Relation::radius(&rational(2, 5)).unwrap()).unwrap() {
            Certificate::Violating(v) => {
                assert_eq!(v.side, Side::First);
                assert!(v.mass > v.neighbourhood_mass);
            }
            other => panic!("expected violation, got {other:?}"),
        }
        // Viewed from the second measure, C = {1.5} has an empty neighbourhood.
        match feasible_coupling(&b, &a, &Relation::radius(&rational(2, 5)).unwrap()).unwrap() {
            Certificate::Violating(v) => assert!(!v.atoms.is_empty()),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn coupling_at_half() {
        let (a, b) = pair();
        match feasible_coupling(&a, &b, &Relation::radius(&rational(1, 2)).unwrap()).unwrap() {
            Certificate::Coupling(c) => {
                let mut pairs: Vec<_> = c.entries.iter().map(|e| (e.source, e.target)).collect();
                pairs.sort();
                assert_eq!(pairs, vec![(0, 0), (1, 1)]);
            }
            other => panic!("expected coupling, got {other:?}"),
        }
    }

    #[test]
    fn bottleneck_examples() {
        let (a, b) = pair();
        let t = bottleneck_distance(&a, &b).unwrap();
        assert_eq!(t.value.exact(), Some(rational(1, 2)));
        let report = verify_coupling(&t.witness);
        assert!(report.is_exact());
        assert_eq!(report.support_radius, t.value);
        assert_eq!(brute_force_bottleneck(&a, &b).unwrap(), t.value);
        assert!(brute_force_bottleneck(&a, &a).unwrap().is_zero());

        let x = line(&[rational(1, 3)], 4);
        let y = line(&[rational(5, 2)], 4);
        assert_eq!(bottleneck_distance(&x, &y).unwrap().value.exact(), Some(rational(13, 6)));
        assert_eq!(brute_force_bottleneck(&x, &y).unwrap().exact(), Some(rational(13, 6)));
    }

    #[test]
    fn unequal_masses_rejected() {
        let (a, _) = pair();
        let b = line(&[integer(0)], 4);
        assert!(matches!(bottleneck_distance(&a, &b), Err(Error::MassMismatch { .. })));
    }

    #[test]
    fn brute_force_rejects_ten_atoms() {
        let a = line(&(0..10).map(integer).collect::<Vec<_>>(), 10);
        assert!(matches!(brute_force_bottleneck(&a, &a), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn corrupted_weight_is_flagged() {
        let (a, b) = pair();
        let mut w = bottleneck_distance(&a, &b).unwrap().witness;
        w.entries[0].weight = rational(1, 2);
        let r = verify_coupling(&w);
        assert_eq!(r.marginal_error_1, rational(1, 2));
        assert!(!r.is_exact());
    }

    #[test]
    fn single_entry_report() {
        let x = line(&[integer(1)], 4);
        let y = line(&[integer(3)], 4);
        let c = Coupling {
            source: x,
            target: y,
            entries: vec![CouplingEntry {
                source: 0,
                target: 0,
                weight: integer(1),
            }],
        };
        let r = verify_coupling(&c);
        assert!(r.is_exact());
        assert_eq!(r.support_radius.exact(), Some(integer(2)));
    }

    #[test]
    fn marriage_of_shifted_lattice() {
        let d = Domain::torus(1, integer(6)).unwrap();
        let shifted = AtomicMeasure::unit_masses(
            d.clone(),
            (0..6).map(|i| vec![integer(i) + rational(3, 10)]).collect(),
        )
        .unwrap();
        let m = marriage_bijection(&shifted).unwrap();
        assert_eq!(m.sup_displacement.exact(), Some(rational(3, 10)));
        assert_eq!(m.map.len(), 6);
        let lattice =
            AtomicMeasure::unit_masses(d, (0..6).map(|i| vec![integer(i)]).collect()).unwrap();
        assert!(marriage_bijection(&lattice).unwrap().sup_displacement.is_zero());
    }

    #[test]
    fn explicit_relation_symmetry() {
        let (a, _) = pair();
        assert!(Relation::explicit(vec![vec![true, false], vec![false, true]], &a, &a).is_ok());
        assert!(Relation::explicit(vec![vec![true, true], vec![false, true]], &a, &a).is_err());
        assert!(Relation::explicit(vec![vec![true]], &a, &a).is_err());
    }
}
