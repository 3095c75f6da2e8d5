//! Independent oracles and instance builders shared by the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use spreadlab_core::exact::{integer, rational};
use spreadlab_core::measure::Atom;
use spreadlab_core::{AtomicMeasure, Domain, DomainKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Squared distance computed coordinate by coordinate, wrapping on a torus.
pub fn squared(domain: &Domain, a: &[BigRational], b: &[BigRational]) -> BigRational {
    let side = domain.side();
    let mut total = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        let mut g = (x - y).abs();
        if domain.kind() == DomainKind::Torus {
            while &g >= side {
                g -= side;
            }
            let other = side - &g;
            if other < g {
                g = other;
            }
        }
        total += &g * &g;
    }
    total
}

fn squared_matrix(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> Vec<Vec<BigRational>> {
    nu1.atoms()
        .iter()
        .map(|a| nu2.atoms().iter().map(|b| squared(nu1.domain(), &a.position, &b.position)).collect())
        .collect()
}

/// Squared bottleneck value by enumerating every bijection (unit masses).
pub fn permutation_oracle(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> BigRational {
    let m = squared_matrix(nu1, nu2);
    let n = m.len();
    assert_eq!(n, nu2.len());
    let mut values: Vec<BigRational> = m.iter().flatten().cloned().collect();
    values.sort();
    values.dedup();
    let rank: Vec<Vec<usize>> = m
        .iter()
        .map(|row| row.iter().map(|v| values.binary_search(v).unwrap()).collect())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    permute(&rank, &mut perm, 0, 0, &mut best);
    values[best].clone()
}

fn permute(rank: &[Vec<usize>], perm: &mut [usize], k: usize, worst: usize, best: &mut usize) {
    if k == perm.len() {
        *best = (*best).min(worst);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(rank, perm, k + 1, worst.max(rank[k][perm[k]]), best);
        perm.swap(k, i);
    }
}

/// Squared discrepancy distance by checking every subset of both sides at
/// every candidate radius.
pub fn subset_oracle(nu1: &AtomicMeasure, nu2: &AtomicMeasure) -> BigRational {
    let m = squared_matrix(nu1, nu2);
    let mut candidates: Vec<BigRational> = m.iter().flatten().cloned().collect();
    candidates.push(BigRational::zero());
    candidates.sort();
    candidates.dedup();
    let w1: Vec<BigRational> = nu1.atoms().iter().map(|a| a.mass.clone()).collect();
    let w2: Vec<BigRational> = nu2.atoms().iter().map(|a| a.mass.clone()).collect();
    for r2 in candidates {
        let near = |i: usize, j: usize| m[i][j] <= r2;
        let one_side = |wa: &[BigRational], wb: &[BigRational], adj: &dyn Fn(usize, usize) -> bool| {
            (1u32..(1 << wa.len())).all(|set| {
                let mass: BigRational = (0..wa.len()).filter(|i| set >> i & 1 == 1).map(|i| wa[i].clone()).sum();
                let reach: BigRational = (0..wb.len())
                    .filter(|&j| (0..wa.len()).any(|i| set >> i & 1 == 1 && adj(i, j)))
                    .map(|j| wb[j].clone())
                    .sum();
                mass <= reach
            })
        };
        if one_side(&w1, &w2, &|i, j| near(i, j)) && one_side(&w2, &w1, &|j, i| near(i, j)) {
            return r2;
        }
    }
    unreachable!("the largest pair distance always satisfies both conditions")
}

/// `n` unit atoms at coordinates `k / 8` in `[0, side)`.
pub fn random_unit_measure(domain: &Domain, n: usize, rng: &mut impl Rng) -> AtomicMeasure {
    let steps = (domain.side() * integer(8)).to_integer();
    let steps: i64 = steps.try_into().unwrap();
    let points = (0..n)
        .map(|_| (0..domain.dim()).map(|_| rational(rng.random_range(0..steps), 8)).collect())
        .collect();
    AtomicMeasure::unit_masses(domain.clone(), points).unwrap()
}

/// Atoms with random masses `k / 4`, rescaled so the total equals `total`.
pub fn random_weighted_measure(domain: &Domain, n: usize, total: &BigRational, rng: &mut impl Rng) -> AtomicMeasure {
    let raw: Vec<BigRational> = (0..n).map(|_| rational(rng.random_range(1..=8), 4)).collect();
    let sum: BigRational = raw.iter().cloned().sum();
    let steps: i64 = (domain.side() * integer(8)).to_integer().try_into().unwrap();
    let atoms = raw
        .into_iter()
        .map(|w| {
            let x = (0..domain.dim()).map(|_| rational(rng.random_range(0..steps), 8)).collect();
            Atom::new(x, w * total / &sum)
        })
        .collect();
    AtomicMeasure::new(domain.clone(), atoms).unwrap()
}

pub fn torus(dim: usize, side: i64) -> Domain {
    Domain::torus(dim, integer(side)).unwrap()
}

pub fn domain(dim: usize, kind: DomainKind, side: i64) -> Domain {
    Domain::new(dim, kind, integer(side)).unwrap()
}

pub fn assert_positive(x: &BigRational) {
    assert!(x.is_positive());
}
