use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AtomicMeasure, Grid, GridMeasure, ScalarField};
use crate::{invalid, Result};

pub const BATTERY_SEED: u64 = 20;
const BATTERY_SIZE: usize = 20;
const BATTERY_MODES: usize = 3;
const BATTERY_MAX_FREQUENCY: i64 = 4;

/// One term `a cos(2π k·x / L + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

/// A real trigonometric polynomial on the torus of side `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    dim: usize,
    side: f64,
    modes: Vec<Mode>,
}

/// Fourier multiplier of the unit-radius ball average at `s = |ξ| r`.
pub fn ball_average_multiplier(d: usize, s: f64) -> f64 {
    if s.abs() < 1e-8 {
        return 1.0;
    }
    match d {
        1 => s.sin() / s,
        2 => {
            // 2 J1(s) / s = Σ (−1)^m (s/2)^{2m} / (m! (m+1)!)
            let q = (s / 2.0) * (s / 2.0);
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..200 {
                term *= -q / (m as f64 * (m + 1) as f64);
                sum += term;
                if term.abs() < 1e-18 * sum.abs().max(1e-300) && m > 2 * s as usize {
                    break;
                }
            }
            sum
        }
        _ => 3.0 * (s.sin() - s * s.cos()) / (s * s * s),
    }
}

impl TestFunction {
    pub fn new(dim: usize, side: f64, modes: Vec<Mode>) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(invalid("side", "must be positive"));
        }
        if modes.iter().any(|m| m.k.len() != dim) {
            return Err(invalid("k", format!("frequency vectors must have {dim} entries")));
        }
        Ok(TestFunction { dim, side, modes })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    fn wavevector(&self, mode: &Mode) -> Vec<f64> {
        let c = std::f64::consts::TAU / self.side;
        mode.k.iter().map(|&k| c * k as f64).collect()
    }

    fn argument(&self, mode: &Mode, x: &[f64]) -> f64 {
        self.wavevector(mode)
            .iter()
            .zip(x)
            .map(|(k, x)| k * x)
            .sum::<f64>()
            + mode.phase
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|m| m.amplitude * self.argument(m, x).cos())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for m in &self.modes {
            let s = -m.amplitude * self.argument(m, x).sin();
            for (gi, ki) in g.iter_mut().zip(self.wavevector(m)) {
                *gi += s * ki;
            }
        }
        g
    }

    /// Upper bound on `‖∇φ‖∞` from the coefficients.
    pub fn gradient_bound(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                m.amplitude.abs() * self.wavevector(m).iter().map(|k| k * k).sum::<f64>().sqrt()
            })
            .sum()
    }

    /// Upper bound on `‖φ‖∞`.
    pub fn sup_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude.abs()).sum()
    }

    /// `(φ * χ_r)(x)`, the average of `φ` over the continuum ball `B(x; r)`.
    pub fn ball_average(&self, x: &[f64], r: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let k = self.wavevector(m).iter().map(|k| k * k).sum::<f64>().sqrt();
                m.amplitude * ball_average_multiplier(self.dim, k * r) * self.argument(m, x).cos()
            })
            .sum()
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(grid.clone(), |x| self.value(x))
    }

    /// `∫ φ dν` as a sum over atoms.
    pub fn pair_atoms(&self, nu: &AtomicMeasure) -> f64 {
        nu.atoms()
            .iter()
            .map(|a| crate::exact::to_f64(&a.mass) * self.value(&a.position_f64()))
            .sum()
    }

    /// `∫ φ dμ` with each cell's mass placed at its center.
    pub fn pair_grid(&self, mu: &GridMeasure) -> f64 {
        let grid = mu.grid();
        mu.masses()
            .iter()
            .enumerate()
            .map(|(i, &w)| w * self.value(&grid.center(&grid.unflat(i))))
            .sum()
    }
}

/// The fixed battery of 20 seeded trigonometric test functions with
/// frequencies `|k|∞ ≤ 4`.
pub fn default_battery(dim: usize, side: f64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    (0..BATTERY_SIZE)
        .map(|_| {
            let modes = (0..BATTERY_MODES)
                .map(|_| {
                    let k = loop {
                        let k: Vec<i64> = (0..dim)
                            .map(|_| rng.random_range(-BATTERY_MAX_FREQUENCY..=BATTERY_MAX_FREQUENCY))
                            .collect();
                        if k.iter().any(|&c| c != 0) {
                            break k;
                        }
                    };
                    Mode {
                        k,
                        amplitude: rng.random_range(-1.0..1.0),
                        phase: rng.random_range(0.0..std::f64::consts::TAU),
                    }
                })
                .collect();
            TestFunction { dim, side, modes }
        })
        .collect()
}
