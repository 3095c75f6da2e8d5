//! Unions of lattice cubes and the estimate that turns a boundary bound
//! `|ν(U) − m(U)| ≤ ρ · area(∂U)` into `D(ν) ≤ C(d) ρ`.
//!
//! For a bounded set `V`, `A` is the union of the edge-`M` lattice cubes
//! meeting `V` and `B` the union of their thrice-enlarged concentric cubes.
//! With `M = ⌊2ρd⌋ + 1` the boundary areas of `A` and `B` are controlled by
//! the volume of `B ∖ A`, which yields `ν(V) ≤ m(B)` and `m(V) ≤ ν(B)`, and `B`
//! lies within `C(d) ρ` of `V`.
//!
//! All geometry is integer arithmetic; measures are evaluated exactly.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{self, integer};
use crate::measure::{multi_indices, AtomicMeasure};
use crate::{invalid, Result};

/// A finite union of cubes `Π [a_i M, (a_i + 1) M]` with integer anchors `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeUnion {
    dim: usize,
    edge: u64,
    cubes: BTreeSet<Vec<i64>>,
}

impl CubeUnion {
    pub fn new(dim: usize, edge: u64, anchors: impl IntoIterator<Item = Vec<i64>>) -> Result<Self> {
        if dim == 0 || dim > crate::measure::MAX_DIMENSION {
            return Err(invalid("dimension", format!("{dim} not in 1..=3")));
        }
        if edge == 0 {
            return Err(invalid("M", "cube edge must be positive"));
        }
        let cubes: BTreeSet<Vec<i64>> = anchors.into_iter().collect();
        if cubes.iter().any(|a| a.len() != dim) {
            return Err(invalid("anchors", format!("anchors must have {dim} coordinates")));
        }
        Ok(CubeUnion { dim, edge, cubes })
    }

    pub fn empty(dim: usize, edge: u64) -> Result<Self> {
        Self::new(dim, edge, [])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edge(&self) -> u64 {
        self.edge
    }

    pub fn anchors(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.cubes.iter()
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn contains_cube(&self, anchor: &[i64]) -> bool {
        self.cubes.contains(anchor)
    }

    pub fn is_subset(&self, other: &CubeUnion) -> bool {
        self.edge == other.edge && self.cubes.is_subset(&other.cubes)
    }

    fn face(&self) -> u128 {
        (self.edge as u128).pow(self.dim as u32 - 1)
    }

    /// `m_d(U)`.
    pub fn volume(&self) -> u128 {
        self.cubes.len() as u128 * self.face() * self.edge as u128
    }

    /// Number of cube faces not shared with another member cube.
    pub fn exposed_faces(&self) -> u64 {
        let mut count = 0;
        let mut neighbour = vec![0i64; self.dim];
        for a in &self.cubes {
            for axis in 0..self.dim {
                for step in [-1, 1] {
                    neighbour.copy_from_slice(a);
                    neighbour[axis] += step;
                    if !self.cubes.contains(&neighbour) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// `m_{d−1}(∂U)`.
    pub fn boundary_area(&self) -> u128 {
        self.exposed_faces() as u128 * self.face()
    }

    /// Cubes of `self` not in `other`.
    pub fn difference(&self, other: &CubeUnion) -> CubeUnion {
        CubeUnion {
            dim: self.dim,
            edge: self.edge,
            cubes: self.cubes.difference(&other.cubes).cloned().collect(),
        }
    }

    pub fn union(&self, other: &CubeUnion) -> CubeUnion {
        CubeUnion {
            dim: self.dim,
            edge: self.edge,
            cubes: self.cubes.union(&other.cubes).cloned().collect(),
        }
    }

    /// Shifted by `shift` cubes along each axis.
    pub fn translated(&self, shift: &[i64]) -> CubeUnion {
        CubeUnion {
            dim: self.dim,
            edge: self.edge,
            cubes: self
                .cubes
                .iter()
                .map(|a| a.iter().zip(shift).map(|(x, s)| x + s).collect())
                .collect(),
        }
    }

    /// Whether the closed union contains `p`.
    pub fn contains_point(&self, p: &[BigRational]) -> bool {
        let m = integer(self.edge as i64);
        let choices: Vec<Vec<i64>> = p.iter().map(|x| touching_anchors(x, &m)).collect();
        let spans: Vec<usize> = choices.iter().map(Vec::len).collect();
        let found = multi_indices(&spans).any(|idx| {
            let a: Vec<i64> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            self.cubes.contains(&a)
        });
        found
    }

    /// `(lo, hi)` corners of the bounding box.
    fn bounds(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let first = self.cubes.iter().next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for a in &self.cubes {
            for k in 0..self.dim {
                lo[k] = lo[k].min(a[k]);
                hi[k] = hi[k].max(a[k]);
            }
        }
        let m = self.edge as i64;
        Some((
            lo.iter().map(|a| a * m).collect(),
            hi.iter().map(|a| (a + 1) * m).collect(),
        ))
    }
}

/// Anchors `a` with `a M ≤ x ≤ (a + 1) M`.
fn touching_anchors(x: &BigRational, m: &BigRational) -> Vec<i64> {
    let q = x / m;
    let f = q.floor().to_integer().to_i64().unwrap_or(i64::MAX);
    if q.is_integer() {
        vec![f - 1, f]
    } else {
        vec![f]
    }
}

/// A closed integer box `Π [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IntBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(invalid("box", "need lo ≤ hi on every axis"));
        }
        Ok(IntBox { lo, hi })
    }

    pub fn volume(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) as u128)
            .product()
    }

    fn contains(&self, p: &[BigRational]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (&l, &h))| *x >= integer(l) && *x <= integer(h))
    }

    /// Nearest point of the box to `p`.
    fn clamp(&self, p: &[BigRational]) -> Vec<BigRational> {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (&l, &h))| x.clone().max(integer(l)).min(integer(h)))
            .collect()
    }
}

/// A bounded set `V`: finitely many points and closed integer boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSet {
    pub dim: usize,
    pub points: Vec<Vec<BigRational>>,
    pub boxes: Vec<IntBox>,
}

impl TestSet {
    pub fn empty(dim: usize) -> Self {
        TestSet {
            dim,
            points: Vec::new(),
            boxes: Vec::new(),
        }
    }

    pub fn points(dim: usize, points: Vec<Vec<BigRational>>) -> Self {
        TestSet {
            dim,
            points,
            boxes: Vec::new(),
        }
    }

    pub fn boxes(dim: usize, boxes: Vec<IntBox>) -> Self {
        TestSet {
            dim,
            points: Vec::new(),
            boxes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.boxes.is_empty()
    }

    pub fn union(&self, other: &TestSet) -> TestSet {
        TestSet {
            dim: self.dim,
            points: self.points.iter().chain(&other.points).cloned().collect(),
            boxes: self.boxes.iter().chain(&other.boxes).cloned().collect(),
        }
    }

    /// `m_d(V)` when the boxes are disjoint up to boundaries.
    pub fn volume(&self) -> u128 {
        self.boxes.iter().map(IntBox::volume).sum()
    }

    fn contains(&self, p: &[BigRational]) -> bool {
        self.points.iter().any(|q| q.as_slice() == p) || self.boxes.iter().any(|b| b.contains(p))
    }

    /// A point of `V` inside the closed cube with the given anchor.
    fn witness_in(&self, anchor: &[i64], m: i64) -> Option<Vec<BigRational>> {
        let lo: Vec<BigRational> = anchor.iter().map(|&a| integer(a * m)).collect();
        let hi: Vec<BigRational> = anchor.iter().map(|&a| integer((a + 1) * m)).collect();
        let inside = |p: &[BigRational]| p.iter().zip(lo.iter().zip(&hi)).all(|(x, (l, h))| x >= l && x <= h);
        if let Some(p) = self.points.iter().find(|p| inside(p)) {
            return Some(p.clone());
        }
        let center: Vec<BigRational> = lo.iter().zip(&hi).map(|(l, h)| (l + h) / integer(2)).collect();
        self.boxes.iter().map(|b| b.clamp(&center)).find(|p| inside(p))
    }
}

/// `A` = edge-`M` cubes meeting `V`; `B` = the `3^d` cubes around each of them.
pub fn build_ab(v: &TestSet, m: u64) -> Result<(CubeUnion, CubeUnion)> {
    if m == 0 {
        return Err(invalid("M", "must be at least 1"));
    }
    let d = v.dim;
    let edge = integer(m as i64);
    let mut a = BTreeSet::new();
    for p in &v.points {
        if p.len() != d {
            return Err(invalid("V", format!("points must have {d} coordinates")));
        }
        let choices: Vec<Vec<i64>> = p.iter().map(|x| touching_anchors(x, &edge)).collect();
        let spans: Vec<usize> = choices.iter().map(Vec::len).collect();
        for idx in multi_indices(&spans) {
            a.insert(idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect::<Vec<i64>>());
        }
    }
    let mi = m as i64;
    for b in &v.boxes {
        if b.lo.len() != d {
            return Err(invalid("V", format!("boxes must have {d} coordinates")));
        }
        // a M ≤ hi and lo ≤ (a + 1) M.
        let first: Vec<i64> = b.lo.iter().map(|&l| l.div_euclid(mi) - i64::from(l.rem_euclid(mi) == 0)).collect();
        let last: Vec<i64> = b.hi.iter().map(|&h| h.div_euclid(mi)).collect();
        let spans: Vec<usize> = first.iter().zip(&last).map(|(f, l)| (l - f + 1) as usize).collect();
        for idx in multi_indices(&spans) {
            a.insert(idx.iter().zip(&first).map(|(&i, f)| i as i64 + f).collect::<Vec<i64>>());
        }
    }
    let mut b = BTreeSet::new();
    for anchor in &a {
        for k in multi_indices(&vec![3; d]) {
            b.insert(anchor.iter().zip(&k).map(|(x, &s)| x + s as i64 - 1).collect::<Vec<i64>>());
        }
    }
    Ok((CubeUnion::new(d, m, a)?, CubeUnion::new(d, m, b)?))
}

/// Both boundary inequalities for the `A`, `B` built from `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimReport {
    /// `m_{d−1}(∂A)`.
    pub lhs_a: u128,
    /// `m_{d−1}(∂B)`.
    pub lhs_b: u128,
    /// `(2d / M) · m_d(B ∖ A)`.
    pub rhs: BigRational,
    pub pass: bool,
}

/// Checks `area(∂A) ≤ (2d/M) m(B∖A)` and `area(∂B) ≤ (2d/M) m(B∖A)`,
/// comparing `M · area` with `2d · m(B∖A)` in integers.
pub fn claim_check(v: &TestSet, m: u64) -> Result<ClaimReport> {
    let (a, b) = build_ab(v, m)?;
    let annulus = b.difference(&a).volume();
    let scaled_rhs = 2 * v.dim as u128 * annulus;
    let (lhs_a, lhs_b) = (a.boundary_area(), b.boundary_area());
    Ok(ClaimReport {
        pass: m as u128 * lhs_a <= scaled_rhs && m as u128 * lhs_b <= scaled_rhs,
        lhs_a,
        lhs_b,
        rhs: BigRational::new(BigInt::from(scaled_rhs), BigInt::from(m)),
    })
}

/// Mass of the closed union under the periodic extension of `ν` (plain `ν`
/// on a box domain).
pub fn measure_of_union(nu: &AtomicMeasure, u: &CubeUnion) -> BigRational {
    measure_where(nu, u.bounds(), |p| u.contains_point(p))
}

fn measure_of_set(nu: &AtomicMeasure, v: &TestSet) -> BigRational {
    let bounds = test_set_bounds(v);
    measure_where(nu, bounds, |p| v.contains(p))
}

fn test_set_bounds(v: &TestSet) -> Option<(Vec<i64>, Vec<i64>)> {
    let mut lo = vec![i64::MAX; v.dim];
    let mut hi = vec![i64::MIN; v.dim];
    let mut any = false;
    for b in &v.boxes {
        any = true;
        for k in 0..v.dim {
            lo[k] = lo[k].min(b.lo[k]);
            hi[k] = hi[k].max(b.hi[k]);
        }
    }
    for p in &v.points {
        any = true;
        for k in 0..v.dim {
            lo[k] = lo[k].min(p[k].floor().to_integer().to_i64().unwrap_or(i64::MIN));
            hi[k] = hi[k].max(p[k].ceil().to_integer().to_i64().unwrap_or(i64::MAX));
        }
    }
    any.then_some((lo, hi))
}

fn measure_where(
    nu: &AtomicMeasure,
    bounds: Option<(Vec<i64>, Vec<i64>)>,
    inside: impl Fn(&[BigRational]) -> bool,
) -> BigRational {
    let Some((lo, hi)) = bounds else {
        return BigRational::zero();
    };
    let domain = nu.domain();
    let mut total = BigRational::zero();
    if !domain.is_torus() {
        for atom in nu.atoms() {
            if inside(&atom.position) {
                total += &atom.mass;
            }
        }
        return total;
    }
    let side = domain.side();
    // Image shifts `k L` that can land inside the bounding box.
    let ranges: Vec<(i64, i64)> = (0..nu.dim())
        .map(|k| {
            let first = (integer(lo[k]) / side).floor().to_integer().to_i64().unwrap_or(0) - 1;
            let last = (integer(hi[k]) / side).ceil().to_integer().to_i64().unwrap_or(0) + 1;
            (first, last)
        })
        .collect();
    let spans: Vec<usize> = ranges.iter().map(|(f, l)| (l - f + 1) as usize).collect();
    let shifts: Vec<Vec<BigRational>> = multi_indices(&spans)
        .map(|idx| {
            idx.iter()
                .zip(&ranges)
                .map(|(&i, (f, _))| integer(i as i64 + f) * side)
                .collect()
        })
        .collect();
    let lo_q: Vec<BigRational> = lo.iter().map(|&l| integer(l)).collect();
    let hi_q: Vec<BigRational> = hi.iter().map(|&h| integer(h)).collect();
    for atom in nu.atoms() {
        for shift in &shifts {
            let p: Vec<BigRational> = atom.position.iter().zip(shift).map(|(x, s)| x + s).collect();
            let in_box = p.iter().zip(lo_q.iter().zip(&hi_q)).all(|(x, (l, h))| x >= l && x <= h);
            if in_box && inside(&p) {
                total += &atom.mass;
            }
        }
    }
    total
}

/// Sampled boundary ratio over a family of unit-cube unions.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoEstimate {
    /// `max_U |ν(U) − m(U)| / area(∂U)` over the family.
    pub raw: BigRational,
    /// `max(1, raw)`.
    pub rho_hat: f64,
    /// Family index attaining `raw`.
    pub worst: usize,
}

/// A lower estimate of the best `ρ` in `|ν(U) − m(U)| ≤ ρ area(∂U)`, taken
/// over the sampled unions and clamped to at least one.
pub fn rho_upper_bound(nu: &AtomicMeasure, family: &[CubeUnion]) -> Result<RhoEstimate> {
    let mut raw = BigRational::zero();
    let mut worst = 0;
    for (k, u) in family.iter().enumerate() {
        if u.edge() != 1 {
            return Err(invalid("family", "unions must consist of unit cubes"));
        }
        if u.dim() != nu.dim() {
            return Err(invalid("family", "dimension differs from the measure"));
        }
        let boundary = u.boundary_area();
        if boundary == 0 {
            return Err(invalid("family", format!("union {k} has empty boundary")));
        }
        let gap = (measure_of_union(nu, u) - BigRational::from_integer(BigInt::from(u.volume()))).abs();
        let ratio = gap / BigRational::from_integer(BigInt::from(boundary));
        if ratio > raw {
            raw = ratio;
            worst = k;
        }
    }
    let rho_hat = exact::to_f64(&raw).max(1.0);
    Ok(RhoEstimate { raw, rho_hat, worst })
}

/// Proven `ρ` for perturbed lattices `Z^d + ξ_z`, `‖ξ_z‖∞ ≤ δ < 1/2`.
///
/// Only lattice points on `∂U` can be miscounted, each by less than one, and
/// every such point is a vertex of an exposed unit face, which has `2^{d−1}`
/// vertices; hence `|ν(U) − m(U)| ≤ 2^{d−1} area(∂U)`.
pub fn rho_analytic_perturbed_lattice(dim: usize, delta: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta) {
        return Err(invalid("delta", "must lie in [0, 1/2)"));
    }
    Ok((1u64 << (dim - 1)).max(1) as f64)
}

/// `C(d) = 9 d^{3/2}`: every point of `B` lies within `2M√d ≤ 6ρ d^{3/2}` of
/// `V` once `M ≤ 3ρd`.
pub fn containment_constant(dim: usize) -> f64 {
    9.0 * (dim as f64).powf(1.5)
}

/// `M = ⌊2ρd⌋ + 1`.
pub fn cube_edge(rho: &BigRational, dim: usize) -> Result<u64> {
    if *rho < BigRational::one() {
        return Err(invalid("rho", "must be at least 1"));
    }
    (rho * integer(2 * dim as i64))
        .floor()
        .to_integer()
        .to_u64()
        .map(|m| m + 1)
        .ok_or_else(|| invalid("rho", "too large"))
}

/// Inequalities replayed on one test set `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainReplay {
    pub nu_v: BigRational,
    pub nu_a: BigRational,
    pub nu_b: BigRational,
    pub m_v: u128,
    pub m_a: u128,
    pub m_b: u128,
    pub boundary_a: u128,
    pub boundary_b: u128,
    pub annulus: u128,
    /// Every point of `B` within `C(d) ρ` of `V`.
    pub contained: bool,
    /// `ν(V) ≤ ν(A) ≤ m(A) + ρ∂A ≤ m(A) + (2dρ/M) m(B∖A) ≤ m(B)`.
    pub upper_chain: bool,
    /// `ν(B) ≥ m(B) − ρ∂B ≥ m(B) − (2dρ/M) m(B∖A) ≥ m(A) ≥ m(V)`.
    pub lower_chain: bool,
}

impl ChainReplay {
    pub fn holds(&self) -> bool {
        self.contained && self.upper_chain && self.lower_chain
    }
}

/// The bound `D(ν) ≤ C(d) ρ` with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub dim: usize,
    pub rho: BigRational,
    pub m: u64,
    pub constant: f64,
    pub bound: f64,
    pub replays: Vec<ChainReplay>,
}

impl PipelineReport {
    pub fn all_hold(&self) -> bool {
        self.replays.iter().all(ChainReplay::holds)
    }
}

/// `C(d) ρ`, with the inequality chain replayed on each test set.
pub fn laczkovich_pipeline(nu: &AtomicMeasure, rho: &BigRational, sets: &[TestSet]) -> Result<PipelineReport> {
    let d = nu.dim();
    let m = cube_edge(rho, d)?;
    let constant = containment_constant(d);
    let replays = sets
        .iter()
        .map(|v| replay_chain(nu, rho, m, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(PipelineReport {
        dim: d,
        rho: rho.clone(),
        m,
        constant,
        bound: constant * exact::to_f64(rho),
        replays,
    })
}

fn replay_chain(nu: &AtomicMeasure, rho: &BigRational, m: u64, v: &TestSet) -> Result<ChainReplay> {
    let d = nu.dim();
    if v.dim != d {
        return Err(invalid("V", "dimension differs from the measure"));
    }
    let (a, b) = build_ab(v, m)?;
    let q = |x: u128| BigRational::from_integer(BigInt::from(x));
    let (m_a, m_b, m_v) = (a.volume(), b.volume(), v.volume());
    let annulus = b.difference(&a).volume();
    let (boundary_a, boundary_b) = (a.boundary_area(), b.boundary_area());
    let nu_v = measure_of_set(nu, v);
    let nu_a = measure_of_union(nu, &a);
    let nu_b = measure_of_union(nu, &b);
    let factor = rho * integer(2 * d as i64) / integer(m as i64);

    let upper_chain = nu_v <= nu_a
        && nu_a <= q(m_a) + rho * q(boundary_a)
        && rho * q(boundary_a) <= &factor * q(annulus)
        && q(m_a) + &factor * q(annulus) <= q(m_b);
    let lower_chain = nu_b >= q(m_b) - rho * q(boundary_b)
        && rho * q(boundary_b) <= &factor * q(annulus)
        && q(m_b) - &factor * q(annulus) >= q(m_a)
        && m_a >= m_v;

    // (C(d) ρ)^2 = 81 ρ² d³.
    let reach2 = integer(81) * rho * rho * integer((d * d * d) as i64);
    let mi = m as i64;
    let contained = a.anchors().all(|anchor| {
        let Some(w) = v.witness_in(anchor, mi) else {
            return false;
        };
        multi_indices(&vec![2; d]).all(|corner| {
            let dist2 = (0..d).fold(BigRational::zero(), |acc, k| {
                let c = integer((anchor[k] - 1 + 3 * corner[k] as i64) * mi);
                let g = &c - &w[k];
                acc + &g * &g
            });
            dist2 <= reach2
        })
    });

    Ok(ChainReplay {
        nu_v,
        nu_a,
        nu_b,
        m_v,
        m_a,
        m_b,
        boundary_a,
        boundary_b,
        annulus,
        contained,
        upper_chain,
        lower_chain,
    })
}

/// Union of `k ≤ 20` random boxes of unit-`edge` cubes with anchors in
/// `[0, extent)^d` and sides up to 4 cubes.
pub fn random_cube_union(dim: usize, edge: u64, extent: i64, rng: &mut impl Rng) -> Result<CubeUnion> {
    let boxes = rng.random_range(1..=20usize);
    let mut anchors = BTreeSet::new();
    for _ in 0..boxes {
        let lo: Vec<i64> = (0..dim).map(|_| rng.random_range(0..extent.max(1))).collect();
        let size: Vec<usize> = (0..dim).map(|_| rng.random_range(1..=4usize)).collect();
        for k in multi_indices(&size) {
            anchors.insert(lo.iter().zip(&k).map(|(l, &s)| l + s as i64).collect::<Vec<i64>>());
        }
    }
    CubeUnion::new(dim, edge, anchors)
}

/// Seeded family of unit-cube unions inside `[0, extent + 4)^d`.
pub fn random_family(dim: usize, extent: i64, count: usize, seed: u64) -> Result<Vec<CubeUnion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_cube_union(dim, 1, extent, &mut rng)).collect()
}

/// Random `V`: up to 20 integer boxes with corners in `[−2M, 4M]` and side
/// up to `2M`, plus up to 4 rational points.
pub fn random_test_set(dim: usize, m: u64, rng: &mut impl Rng) -> TestSet {
    let mi = m as i64;
    let boxes = (0..rng.random_range(0..=20usize))
        .map(|_| {
            let lo: Vec<i64> = (0..dim).map(|_| rng.random_range(-2 * mi..=4 * mi)).collect();
            let hi: Vec<i64> = lo.iter().map(|&l| l + rng.random_range(0..=2 * mi)).collect();
            IntBox { lo, hi }
        })
        .collect();
    let points = (0..rng.random_range(0..=4usize))
        .map(|_| {
            (0..dim)
                .map(|_| exact::rational(rng.random_range(-8 * mi..=24 * mi), 4))
                .collect()
        })
        .collect();
    TestSet { dim, points, boxes }
}
