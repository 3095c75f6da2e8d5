//! Seeded instance generators.
//!
//! Every generator is a pure function of its parameters and seed. Random
//! coordinates are quantized to multiples of `1 / COORDINATE_QUANTUM` so the
//! output is exactly rational and serializes as short decimals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{multi_indices, Atom, AtomicMeasure, Domain, DomainKind};
use crate::exact::{self, to_f64};
use crate::{invalid, Result};

pub const COORDINATE_QUANTUM: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    /// `Z^d ∩ [0, L)^d` on the torus, each point displaced by an independent
    /// uniform vector with sup-norm at most `delta`; unit masses.
    PerturbedLattice {
        dim: usize,
        side: BigRational,
        delta: BigRational,
    },
    /// Poisson process of the given intensity. With `normalize`, every atom
    /// gets mass `volume / count` so the total matches Lebesgue measure.
    PoissonProcess {
        dim: usize,
        kind: DomainKind,
        side: BigRational,
        intensity: f64,
        normalize: bool,
    },
    /// Poisson parents, each with a Poisson number of offspring uniform in a
    /// ball of radius `radius` around it.
    Cluster {
        dim: usize,
        kind: DomainKind,
        side: BigRational,
        parent_intensity: f64,
        mean_offspring: f64,
        radius: f64,
        normalize: bool,
    },
    /// Uniform probability on the pitch-`h` lattice points `center + h·k`
    /// inside the closed ball of radius `radius`; a discretized normalized
    /// ball volume.
    BallUniform {
        dim: usize,
        kind: DomainKind,
        side: BigRational,
        center: Vec<BigRational>,
        radius: BigRational,
        pitch: BigRational,
    },
}

/// Builds the instance described by `spec`; identical `(spec, seed)` pairs
/// give identical measures.
pub fn generate_instance(spec: &InstanceSpec, seed: u64) -> Result<AtomicMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        InstanceSpec::PerturbedLattice { dim, side, delta } => {
            perturbed_lattice(*dim, side, delta, &mut rng)
        }
        InstanceSpec::PoissonProcess {
            dim,
            kind,
            side,
            intensity,
            normalize,
        } => {
            let domain = Domain::new(*dim, *kind, side.clone())?;
            if !(intensity.is_finite() && *intensity > 0.0) {
                return Err(invalid("intensity", "must be positive and finite"));
            }
            let count = poisson_count(intensity * to_f64(&domain.volume()), &mut rng)?;
            let points = (0..count)
                .map(|_| uniform_point(&domain, &mut rng))
                .collect::<Vec<_>>();
            finish(domain, points, *normalize)
        }
        InstanceSpec::Cluster {
            dim,
            kind,
            side,
            parent_intensity,
            mean_offspring,
            radius,
            normalize,
        } => {
            let domain = Domain::new(*dim, *kind, side.clone())?;
            if !(parent_intensity.is_finite() && *parent_intensity > 0.0) {
                return Err(invalid("parent_intensity", "must be positive and finite"));
            }
            if !(mean_offspring.is_finite() && *mean_offspring > 0.0) {
                return Err(invalid("mean_offspring", "must be positive and finite"));
            }
            if !(radius.is_finite() && *radius >= 0.0) {
                return Err(invalid("radius", "must be nonnegative and finite"));
            }
            let parents = poisson_count(parent_intensity * to_f64(&domain.volume()), &mut rng)?;
            let mut points = Vec::new();
            for _ in 0..parents {
                let parent = uniform_point(&domain, &mut rng);
                let children = poisson_count(*mean_offspring, &mut rng)?;
                for _ in 0..children {
                    let offset = uniform_in_ball(*dim, *radius, &mut rng);
                    let point: Vec<BigRational> = parent
                        .iter()
                        .zip(&offset)
                        .map(|(p, o)| p + quantize(*o))
                        .collect();
                    if domain.kind() == DomainKind::Box
                        && point.iter().any(|x| x.is_negative() || x > domain.side())
                    {
                        continue;
                    }
                    points.push(point);
                }
            }
            finish(domain, points, *normalize)
        }
        InstanceSpec::BallUniform {
            dim,
            kind,
            side,
            center,
            radius,
            pitch,
        } => ball_uniform(&Domain::new(*dim, *kind, side.clone())?, center, radius, pitch),
    }
}

fn perturbed_lattice(
    dim: usize,
    side: &BigRational,
    delta: &BigRational,
    rng: &mut ChaCha8Rng,
) -> Result<AtomicMeasure> {
    let domain = Domain::torus(dim, side.clone())?;
    if !side.is_integer() {
        return Err(invalid("side", "perturbed lattice window needs an integer side"));
    }
    if delta.is_negative() || delta >= &exact::rational(1, 2) {
        return Err(invalid("delta", "perturbation amplitude must lie in [0, 1/2)"));
    }
    let n = side
        .to_integer()
        .to_usize()
        .ok_or_else(|| invalid("side", "too large"))?;
    let max_step = (delta * BigRational::from_integer(BigInt::from(COORDINATE_QUANTUM)))
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(0);
    let points = multi_indices(&vec![n; dim])
        .map(|index| {
            index
                .iter()
                .map(|&z| {
                    let step = if max_step > 0 {
                        rng.random_range(-max_step..=max_step)
                    } else {
                        0
                    };
                    exact::integer(z as i64) + exact::rational(step, COORDINATE_QUANTUM)
                })
                .collect()
        })
        .collect();
    AtomicMeasure::unit_masses(domain, points)
}

fn ball_uniform(
    domain: &Domain,
    center: &[BigRational],
    radius: &BigRational,
    pitch: &BigRational,
) -> Result<AtomicMeasure> {
    let dim = domain.dim();
    if center.len() != dim {
        return Err(invalid("center", format!("expected {dim} coordinates")));
    }
    if !radius.is_positive() {
        return Err(invalid("radius", "must be positive"));
    }
    if !pitch.is_positive() {
        return Err(invalid("pitch", "must be positive"));
    }
    let steps = (radius / pitch)
        .floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| invalid("pitch", "too fine"))?;
    let bound = radius * radius;
    let width = (2 * steps + 1) as usize;
    let offsets: Vec<Vec<i64>> = multi_indices(&vec![width; dim])
        .map(|k| k.into_iter().map(|c| c as i64 - steps).collect::<Vec<i64>>())
        .filter(|k| {
            let norm = k
                .iter()
                .map(|&c| {
                    let x = exact::integer(c) * pitch;
                    &x * &x
                })
                .fold(BigRational::zero(), |a, b| a + b);
            norm <= bound
        })
        .collect();
    let mass = exact::rational(1, offsets.len() as i64);
    let atoms = offsets
        .into_iter()
        .map(|k| {
            Atom::new(
                center
                    .iter()
                    .zip(&k)
                    .map(|(c, &s)| c + exact::integer(s) * pitch)
                    .collect(),
                mass.clone(),
            )
        })
        .collect();
    AtomicMeasure::new(domain.clone(), atoms)
}

fn finish(domain: Domain, points: Vec<Vec<BigRational>>, normalize: bool) -> Result<AtomicMeasure> {
    if points.is_empty() {
        return Err(invalid("seed", "the sampled configuration is empty"));
    }
    let mass = if normalize {
        domain.volume() / exact::integer(points.len() as i64)
    } else {
        exact::integer(1)
    };
    let atoms = points
        .into_iter()
        .map(|p| Atom::new(p, mass.clone()))
        .collect();
    AtomicMeasure::new(domain, atoms)
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> Result<usize> {
    let dist = Poisson::new(mean).map_err(|e| invalid("intensity", e.to_string()))?;
    Ok(dist.sample(rng) as usize)
}

fn quantize(x: f64) -> BigRational {
    exact::rational((x * COORDINATE_QUANTUM as f64).round() as i64, COORDINATE_QUANTUM)
}

fn uniform_point(domain: &Domain, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    (0..domain.dim())
        .map(|_| {
            let k = rng.random_range(0..COORDINATE_QUANTUM);
            domain.side() * exact::rational(k, COORDINATE_QUANTUM)
        })
        .collect()
}

fn uniform_in_ball(dim: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};

    fn lattice(delta: BigRational) -> InstanceSpec {
        InstanceSpec::PerturbedLattice {
            dim: 2,
            side: integer(4),
            delta,
        }
    }

    #[test]
    fn unperturbed_lattice_is_exact() {
        let nu = generate_instance(&lattice(integer(0)), 1).unwrap();
        assert_eq!(nu.len(), 16);
        assert!(nu.has_unit_masses());
        assert_eq!(nu.atoms()[5].position, vec![integer(1), integer(1)]);
    }

    #[test]
    fn same_seed_same_output() {
        let spec = lattice(rational(3, 10));
        assert_eq!(
            generate_instance(&spec, 7).unwrap(),
            generate_instance(&spec, 7).unwrap()
        );
        assert_ne!(
            generate_instance(&spec, 7).unwrap(),
            generate_instance(&spec, 8).unwrap()
        );
    }

    #[test]
    fn perturbation_respects_delta() {
        let delta = rational(1, 5);
        let nu = generate_instance(&lattice(delta.clone()), 3).unwrap();
        let torus = nu.domain().clone();
        for (k, atom) in nu.atoms().iter().enumerate() {
            let z = [integer((k / 4) as i64), integer((k % 4) as i64)];
            for (x, zc) in atom.position.iter().zip(&z) {
                let gap = torus.squared_distance(std::slice::from_ref(x), std::slice::from_ref(zc));
                assert!(gap <= &delta * &delta);
            }
        }
    }

    #[test]
    fn invalid_delta_names_the_field() {
        let err = generate_instance(&lattice(rational(1, 2)), 0).unwrap_err();
        assert!(err.to_string().contains("delta"), "{err}");
    }

    #[test]
    fn ball_uniform_is_a_probability_inside_the_ball() {
        let spec = InstanceSpec::BallUniform {
            dim: 2,
            kind: DomainKind::Torus,
            side: integer(8),
            center: vec![integer(4), integer(4)],
            radius: integer(1),
            pitch: rational(1, 18),
        };
        let eta = generate_instance(&spec, 0).unwrap();
        assert!(eta.len() > 900 && eta.len() < 1100, "{}", eta.len());
        assert_eq!(eta.total_mass(), integer(1));
        let center = [integer(4), integer(4)];
        for atom in eta.atoms() {
            assert!(eta.domain().squared_distance(&atom.position, &center) <= integer(1));
        }
    }

    #[test]
    fn normalized_poisson_matches_volume() {
        let spec = InstanceSpec::PoissonProcess {
            dim: 2,
            kind: DomainKind::Box,
            side: integer(5),
            intensity: 1.0,
            normalize: true,
        };
        let nu = generate_instance(&spec, 11).unwrap();
        assert_eq!(nu.total_mass(), integer(25));
    }

    #[test]
    fn cluster_is_deterministic() {
        let spec = InstanceSpec::Cluster {
            dim: 2,
            kind: DomainKind::Torus,
            side: integer(6),
            parent_intensity: 0.2,
            mean_offspring: 5.0,
            radius: 0.5,
            normalize: false,
        };
        assert_eq!(
            generate_instance(&spec, 2).unwrap(),
            generate_instance(&spec, 2).unwrap()
        );
    }
}
