use super::{AtomicMeasure, Grid, GridField, GridMeasure, ScalarField};
use crate::spectral::cyclic_convolve;
use crate::{invalid, Result};

/// Volume of the unit ball in dimension `d`.
pub fn ball_volume(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => PI.powf(d as f64 / 2.0) / gamma_half_plus_one(d),
    }
}

fn gamma_half_plus_one(d: usize) -> f64 {
    // Γ(d/2 + 1) by the recursion Γ(x + 1) = x Γ(x).
    let mut x = d as f64 / 2.0;
    let mut acc = 1.0;
    while x > 0.5 {
        acc *= x;
        x -= 1.0;
    }
    if (x - 0.5).abs() < 1e-12 {
        acc * 0.5 * std::f64::consts::PI.sqrt()
    } else {
        acc
    }
}

/// The normalized ball indicator `χ_r` or one of its convolution powers.
///
/// On a grid, a cell belongs to the ball when its center does (with a
/// `1e-12` relative allowance for ties); the kernel is renormalized to sum to
/// exactly one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    radius: f64,
    power: u32,
}

const TIE_ALLOWANCE: f64 = 1e-12;

impl Mollifier {
    pub fn new(radius: f64, power: u32) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("r", "mollifier radius must be positive"));
        }
        if !(1..=3).contains(&power) {
            return Err(invalid("power", "supported convolution powers are 1, 2, 3"));
        }
        Ok(Mollifier { radius, power })
    }

    /// `χ_r`.
    pub fn ball(radius: f64) -> Result<Self> {
        Self::new(radius, 1)
    }

    /// `χ̃_r = χ_r * χ_r * χ_r`.
    pub fn triple(radius: f64) -> Result<Self> {
        Self::new(radius, 3)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Radius of the support of the kernel.
    pub fn support_radius(&self) -> f64 {
        self.radius * self.power as f64
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if self.radius >= grid.side() / 2.0 {
            return Err(invalid(
                "r",
                format!("radius {} must be below L/2 = {}", self.radius, grid.side() / 2.0),
            ));
        }
        Ok(())
    }

    /// Offsets `k` (in cells) with `|k h| ≤ r`.
    pub fn ball_offsets(&self, grid: &Grid) -> Result<Vec<Vec<i64>>> {
        self.check(grid)?;
        let d = grid.dim();
        let r2 = self.radius * self.radius * (1.0 + TIE_ALLOWANCE);
        let reach: Vec<i64> = (0..d)
            .map(|a| (self.radius / grid.pitch(a)).floor() as i64 + 1)
            .collect();
        let spans: Vec<usize> = reach.iter().map(|&k| (2 * k + 1) as usize).collect();
        Ok(super::multi_indices(&spans)
            .map(|idx| {
                idx.iter()
                    .zip(&reach)
                    .map(|(&i, &k)| i as i64 - k)
                    .collect::<Vec<i64>>()
            })
            .filter(|k| {
                k.iter()
                    .enumerate()
                    .map(|(a, &ka)| (ka as f64 * grid.pitch(a)).powi(2))
                    .sum::<f64>()
                    <= r2
            })
            .collect())
    }

    fn single_kernel(&self, grid: &Grid) -> Result<Vec<f64>> {
        let offsets = self.ball_offsets(grid)?;
        let w = 1.0 / offsets.len() as f64;
        let mut kernel = vec![0.0; grid.len()];
        for k in &offsets {
            kernel[grid.flat_wrapped(k)] += w;
        }
        Ok(kernel)
    }

    /// Kernel weights indexed by wrapped cell offset; they sum to one.
    pub fn kernel(&self, grid: &Grid) -> Result<Vec<f64>> {
        let base = self.single_kernel(grid)?;
        let mut kernel = base.clone();
        for _ in 1..self.power {
            kernel = cyclic_convolve(grid, &kernel, &base);
        }
        Ok(kernel)
    }

    fn convolve(&self, grid: &Grid, values: &[f64]) -> Result<Vec<f64>> {
        let kernel = self.kernel(grid)?;
        Ok(cyclic_convolve(grid, values, &kernel))
    }

    /// `ν * χ` for a grid measure.
    pub fn apply_measure(&self, nu: &GridMeasure) -> Result<GridMeasure> {
        GridMeasure::new(nu.grid().clone(), self.convolve(nu.grid(), nu.masses())?)
    }

    /// Ball average `u * χ` of point values.
    pub fn apply_scalar(&self, u: &ScalarField) -> Result<ScalarField> {
        ScalarField::new(u.grid().clone(), self.convolve(u.grid(), u.values())?)
    }

    /// Componentwise `v * χ`.
    pub fn apply_field(&self, v: &GridField) -> Result<GridField> {
        let kernel = self.kernel(v.grid())?;
        let components = v
            .components()
            .iter()
            .map(|c| cyclic_convolve(v.grid(), c, &kernel))
            .collect();
        GridField::new(v.grid().clone(), components)
    }

    /// `ν * χ` for an atomic measure: each atom is spread uniformly over the
    /// cells whose centers lie within `r` of it (its own cell if none do),
    /// then further powers are applied on the grid.
    pub fn apply_atoms(&self, nu: &AtomicMeasure, grid: &Grid) -> Result<GridMeasure> {
        nu.domain().ensure_same(grid.domain())?;
        self.check(grid)?;
        let d = grid.dim();
        let r2 = self.radius * self.radius * (1.0 + TIE_ALLOWANCE);
        let mut mass = vec![0.0; grid.len()];
        let mut cells = Vec::new();
        for atom in nu.atoms() {
            let p = atom.position_f64();
            let w = crate::exact::to_f64(&atom.mass);
            let lo: Vec<i64> = (0..d)
                .map(|a| ((p[a] - self.radius) / grid.pitch(a) - 0.5).floor() as i64)
                .collect();
            let hi: Vec<i64> = (0..d)
                .map(|a| ((p[a] + self.radius) / grid.pitch(a) - 0.5).ceil() as i64)
                .collect();
            let spans: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
            cells.clear();
            for idx in super::multi_indices(&spans) {
                let k: Vec<i64> = idx.iter().zip(&lo).map(|(&i, &l)| i as i64 + l).collect();
                let dist2: f64 = k
                    .iter()
                    .enumerate()
                    .map(|(a, &ka)| ((ka as f64 + 0.5) * grid.pitch(a) - p[a]).powi(2))
                    .sum();
                if dist2 <= r2 {
                    cells.push(grid.flat_wrapped(&k));
                }
            }
            if cells.is_empty() {
                cells.push(grid.flat(&grid.cell_of(&p)));
            }
            let share = w / cells.len() as f64;
            for &c in &cells {
                mass[c] += share;
            }
        }
        if self.power > 1 {
            let rest = Mollifier::new(self.radius, self.power - 1)?;
            mass = rest.convolve(grid, &mass)?;
        }
        GridMeasure::new(grid.clone(), mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};
    use crate::measure::{Atom, Domain};

    fn grid(d: usize, n: usize) -> Grid {
        Grid::cubic(Domain::torus(d, integer(8)).unwrap(), n).unwrap()
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(ball_volume(1), 2.0);
        assert!((ball_volume(3) - 4.18879020478639).abs() < 1e-12);
    }

    #[test]
    fn point_mass_spreads_uniformly() {
        let g = grid(2, 64);
        let nu = AtomicMeasure::new(
            g.domain().clone(),
            vec![Atom::new(vec![rational(1, 16), rational(1, 16)], integer(1))],
        )
        .unwrap();
        let out = Mollifier::ball(1.0).unwrap().apply_atoms(&nu, &g).unwrap();
        let support: Vec<f64> = out.masses().iter().copied().filter(|&m| m > 0.0).collect();
        assert!((out.total_mass() - 1.0).abs() < 1e-14);
        assert!(support.iter().all(|&m| (m - support[0]).abs() < 1e-15));
        let cells = support.len() as f64 * g.cell_volume();
        assert!((cells - std::f64::consts::PI).abs() < 0.1);
    }

    #[test]
    fn rejects_large_radius() {
        assert!(Mollifier::ball(4.0).unwrap().kernel(&grid(1, 16)).is_err());
        assert!(Mollifier::ball(0.0).is_err());
        assert!(Mollifier::new(1.0, 4).is_err());
    }

    #[test]
    fn powers_associate() {
        let g = grid(2, 32);
        let nu = GridMeasure::new(
            g.clone(),
            (0..g.len()).map(|i| ((i * 7919) % 13) as f64).collect(),
        )
        .unwrap();
        let once = Mollifier::ball(1.0).unwrap();
        let twice = once.apply_measure(&once.apply_measure(&nu).unwrap()).unwrap();
        let power = Mollifier::new(1.0, 2).unwrap().apply_measure(&nu).unwrap();
        for (a, b) in twice.masses().iter().zip(power.masses()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
