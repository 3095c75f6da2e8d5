use num_rational::BigRational;

use super::{AtomicMeasure, Domain};
use crate::{invalid, Result};

/// Row-major odometer over `0..shape[0] × … × 0..shape[d-1]`, last axis fastest.
pub fn multi_indices(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = if shape.is_empty() { 0 } else { shape.iter().product() };
    let mut index = vec![0usize; shape.len()];
    let mut first = true;
    (0..total).map(move |_| {
        if first {
            first = false;
        } else {
            for axis in (0..shape.len()).rev() {
                index[axis] += 1;
                if index[axis] < shape[axis] {
                    break;
                }
                index[axis] = 0;
            }
        }
        index.clone()
    })
}

/// A regular periodic lattice of cells on a torus.
///
/// Cell `i` along an axis covers `[i h, (i+1) h)` with `h = L / n`; samples sit
/// at cell centers `(i + 1/2) h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    domain: Domain,
    shape: Vec<usize>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(domain: Domain, shape: Vec<usize>) -> Result<Self> {
        if !domain.is_torus() {
            return Err(invalid("domain", "grids live on the torus"));
        }
        if shape.len() != domain.dim() {
            return Err(invalid(
                "shape",
                format!("expected {} axes, got {}", domain.dim(), shape.len()),
            ));
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(invalid("shape", "need at least 2 cells per axis"));
        }
        let mut strides = vec![1usize; shape.len()];
        for axis in (0..shape.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * shape[axis + 1];
        }
        Ok(Grid {
            domain,
            shape,
            strides,
        })
    }

    /// Same number of cells `n` on every axis.
    pub fn cubic(domain: Domain, n: usize) -> Result<Self> {
        let d = domain.dim();
        Self::new(domain, vec![n; d])
    }

    /// Cubic grid of pitch `h`; `L / h` must be an integer.
    pub fn with_pitch(domain: Domain, pitch: &BigRational) -> Result<Self> {
        let n = super::cells_per_axis(&domain, pitch)?;
        Self::cubic(domain, n)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn side(&self) -> f64 {
        self.domain.side_f64()
    }

    pub fn pitch(&self, axis: usize) -> f64 {
        self.side() / self.shape[axis] as f64
    }

    pub fn max_pitch(&self) -> f64 {
        (0..self.dim()).map(|a| self.pitch(a)).fold(0.0, f64::max)
    }

    pub fn min_pitch(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.pitch(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.pitch(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.dim() as i32)
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Flat index of the cell at signed, periodically wrapped multi-index.
    pub fn flat_wrapped(&self, index: &[i64]) -> usize {
        index
            .iter()
            .zip(&self.shape)
            .zip(&self.strides)
            .map(|((&i, &n), &s)| (i.rem_euclid(n as i64) as usize) * s)
            .sum()
    }

    pub fn unflat(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }

    pub fn center(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(axis, &i)| (i as f64 + 0.5) * self.pitch(axis))
            .collect()
    }

    pub fn centers(&self) -> Vec<Vec<f64>> {
        multi_indices(&self.shape).map(|i| self.center(&i)).collect()
    }

    /// Cell containing the point (periodically wrapped).
    pub fn cell_of(&self, point: &[f64]) -> Vec<usize> {
        point
            .iter()
            .enumerate()
            .map(|(axis, &x)| {
                let n = self.shape[axis] as i64;
                ((x / self.pitch(axis)).floor() as i64).rem_euclid(n) as usize
            })
            .collect()
    }

    /// Same cell counts on the domain of side `L / t`.
    pub fn scaled(&self, t: &BigRational) -> Result<Grid> {
        Grid::new(self.domain.scaled(t)?, self.shape.clone())
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        self.domain.ensure_same(&other.domain)?;
        if self.shape != other.shape {
            return Err(invalid("shape", format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }
}

/// Mass per cell; may be signed (for `ν − m` and divergences).
#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure {
    grid: Grid,
    mass: Vec<f64>,
}

impl GridMeasure {
    pub fn new(grid: Grid, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.len() {
            return Err(invalid("values", format!("expected {} cells", grid.len())));
        }
        if mass.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite cell mass"));
        }
        Ok(GridMeasure { grid, mass })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        GridMeasure {
            grid,
            mass: vec![0.0; n],
        }
    }

    /// Lebesgue measure: every cell carries its volume.
    pub fn lebesgue(grid: Grid) -> Self {
        let v = grid.cell_volume();
        let n = grid.len();
        GridMeasure {
            grid,
            mass: vec![v; n],
        }
    }

    /// Each atom's mass dropped into the cell that contains it.
    pub fn deposit(nu: &AtomicMeasure, grid: &Grid) -> Result<Self> {
        nu.domain().ensure_same(grid.domain())?;
        let mut out = GridMeasure::zeros(grid.clone());
        for atom in nu.atoms() {
            let cell = grid.flat(&grid.cell_of(&atom.position_f64()));
            out.mass[cell] += crate::exact::to_f64(&atom.mass);
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass divided by cell volume.
    pub fn density(&self) -> ScalarField {
        let v = self.grid.cell_volume();
        ScalarField {
            grid: self.grid.clone(),
            values: self.mass.iter().map(|m| m / v).collect(),
        }
    }

    pub fn from_density(density: &ScalarField) -> Self {
        let v = density.grid.cell_volume();
        GridMeasure {
            grid: density.grid.clone(),
            mass: density.values.iter().map(|d| d * v).collect(),
        }
    }

    pub fn sub(&self, other: &GridMeasure) -> Result<GridMeasure> {
        self.grid.ensure_same(&other.grid)?;
        Ok(GridMeasure {
            grid: self.grid.clone(),
            mass: self.mass.iter().zip(&other.mass).map(|(a, b)| a - b).collect(),
        })
    }

    /// `ν − m`, with `m` the Lebesgue measure of the cells.
    pub fn minus_lebesgue(&self) -> GridMeasure {
        let v = self.grid.cell_volume();
        GridMeasure {
            grid: self.grid.clone(),
            mass: self.mass.iter().map(|m| m - v).collect(),
        }
    }
}

/// Point values at cell centers (potentials, densities, test-function samples).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("values", format!("expected {} cells", grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite value"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        ScalarField {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = grid.centers().iter().map(|c| f(c)).collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Potential scaling `u_t(x) = t^{-2} u(t x)`, the action compatible with
    /// `v_t(x) = t^{-1} v(t x)` for `v = ∇u`.
    pub fn scaled_potential(&self, t: &BigRational) -> Result<ScalarField> {
        let tf = crate::exact::to_f64(t);
        Ok(ScalarField {
            grid: self.grid.scaled(t)?,
            values: self.values.iter().map(|v| v / (tf * tf)).collect(),
        })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        ScalarField { grid, values }
    }
}

/// A `d`-component vector field sampled at cell centers.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl GridField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(invalid(
                "components",
                format!("expected {} components", grid.dim()),
            ));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(invalid("components", format!("expected {} cells", grid.len())));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(invalid("components", "non-finite value"));
            }
        }
        Ok(GridField { grid, components })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        let d = grid.dim();
        GridField {
            grid,
            components: vec![vec![0.0; n]; d],
        }
    }

    pub fn constant(grid: Grid, value: &[f64]) -> Result<Self> {
        if value.len() != grid.dim() {
            return Err(invalid("value", "wrong number of components"));
        }
        let n = grid.len();
        Ok(GridField {
            components: value.iter().map(|&c| vec![c; n]).collect(),
            grid,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let d = grid.dim();
        let mut components = vec![Vec::with_capacity(grid.len()); d];
        for c in grid.centers() {
            for (axis, v) in f(&c).into_iter().enumerate().take(d) {
                components[axis].push(v);
            }
        }
        GridField { grid, components }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.components
    }

    pub fn value(&self, flat: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[flat]).collect()
    }

    /// Pointwise Euclidean norm `|v|`.
    pub fn magnitude(&self) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| c[i] * c[i])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        ScalarField::from_parts(self.grid.clone(), values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.magnitude().sup_norm()
    }

    /// `∫ |v| dm` by the midpoint rule.
    pub fn l1_norm(&self) -> f64 {
        self.magnitude().values().iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn add_scaled(&mut self, other: &GridField, weight: f64) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += weight * y;
            }
        }
        Ok(())
    }

    /// Scaling action `v_t(x) = t^{-1} v(t x)`.
    ///
    /// The scaled field lives on the domain of side `L / t` with the same cell
    /// counts, so cell `i` of the new grid samples `t x` at cell `i` of the old
    /// one and no resampling is needed for any `t > 0`.
    pub fn scaled(&self, t: &BigRational) -> Result<GridField> {
        let tf = crate::exact::to_f64(t);
        Ok(GridField {
            grid: self.grid.scaled(t)?,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| v / tf).collect())
                .collect(),
        })
    }
}

/// `scale_field(v, t)`; see [`GridField::scaled`].
pub fn scale_field(v: &GridField, t: &BigRational) -> Result<GridField> {
    v.scaled(t)
}
