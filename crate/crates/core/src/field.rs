//! Connecting vector fields on the periodic grid.
//!
//! A field `v` connects `ν` to Lebesgue measure `m` when `div v = ν − m` in
//! the weak sense: `∫⟨v, ∇φ⟩ dm = −∫ φ d(ν − m)` for every test function.
//! Fields come from a spectral Poisson solve (`v = ∇h`, `Δh = ν − m`) or from
//! a coupling, as a sum of dipole fields carrying mass from `x` to `y`.

use rustfft::num_complex::Complex64;

use crate::measure::{ball_volume, Grid, GridField, GridMeasure, Mollifier, ScalarField, TestFunction};
use crate::spectral::{apply_multiplier, forward, inverse_real, is_nyquist};
use crate::transport::Coupling;
use crate::{invalid, Error, Result};

/// Discretization of first derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiffMode {
    /// Fourier differentiation, Nyquist modes dropped.
    #[default]
    Spectral,
    /// `(f(x + h) − f(x − h)) / 2h`.
    Centered,
}

fn derivative(grid: &Grid, values: &[f64], axis: usize, mode: DiffMode) -> Vec<f64> {
    match mode {
        DiffMode::Spectral => {
            let n = grid.shape()[axis];
            apply_multiplier(grid, values, |m, k| {
                if is_nyquist(m[axis], n) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k[axis])
                }
            })
        }
        DiffMode::Centered => {
            let h = grid.pitch(axis);
            (0..grid.len())
                .map(|flat| {
                    let idx: Vec<i64> = grid.unflat(flat).iter().map(|&i| i as i64).collect();
                    let mut fwd = idx.clone();
                    let mut back = idx;
                    fwd[axis] += 1;
                    back[axis] -= 1;
                    (values[grid.flat_wrapped(&fwd)] - values[grid.flat_wrapped(&back)]) / (2.0 * h)
                })
                .collect()
        }
    }
}

/// `div v` as a signed grid measure (cell density times cell volume).
pub fn divergence(v: &GridField, mode: DiffMode) -> GridMeasure {
    let grid = v.grid();
    let mut density = vec![0.0; grid.len()];
    for (axis, c) in v.components().iter().enumerate() {
        for (acc, d) in density.iter_mut().zip(derivative(grid, c, axis, mode)) {
            *acc += d;
        }
    }
    let vol = grid.cell_volume();
    GridMeasure::new(grid.clone(), density.into_iter().map(|d| d * vol).collect())
        .expect("finite divergence of a finite field")
}

/// `∇u`.
pub fn gradient(u: &ScalarField, mode: DiffMode) -> GridField {
    let grid = u.grid();
    let components = (0..grid.dim())
        .map(|axis| derivative(grid, u.values(), axis, mode))
        .collect();
    GridField::new(grid.clone(), components).expect("finite gradient of a finite field")
}

/// Zero-mean solution of `Δh = f` for a source density `f`; the mean of `f`
/// is discarded.
pub fn poisson_solve(source: &ScalarField) -> ScalarField {
    let grid = source.grid();
    let values = apply_multiplier(grid, source.values(), |m, k| {
        if m.iter().all(|&c| c == 0) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / k.iter().map(|x| x * x).sum::<f64>(), 0.0)
        }
    });
    ScalarField::new(grid.clone(), values).expect("finite Poisson solution")
}

/// Potential and field connecting a grid measure to Lebesgue measure.
#[derive(Clone, Debug)]
pub struct Connection {
    /// `h` with `Δh = ν − m`, zero mean.
    pub potential: ScalarField,
    /// `v = ∇h`.
    pub field: GridField,
}

const CONNECT_TOLERANCE: f64 = 1e-9;

/// Spectral solve of `Δh = ν − m`, `v = ∇h`.
pub fn poisson_connect(nu: &GridMeasure) -> Result<Connection> {
    let grid = nu.grid();
    let (mass, volume) = (nu.total_mass(), grid.volume());
    if ((mass - volume) / volume).abs() > CONNECT_TOLERANCE {
        return Err(Error::MassImbalance { mass, volume });
    }
    let density = nu.density();
    let mean = density.values().iter().sum::<f64>() / grid.len() as f64;
    let source = ScalarField::new(
        grid.clone(),
        density.values().iter().map(|d| d - mean).collect(),
    )?;
    let potential = poisson_solve(&source);
    let field = gradient(&potential, DiffMode::Spectral);
    Ok(Connection { potential, field })
}

/// Weak-divergence residuals of `v` against a target signed measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// `|∫⟨v, ∇φ⟩ dm + ∫ φ dμ|` for each test function, by midpoint quadrature;
/// zero when `div v = μ` weakly.
pub fn divergence_residuals(v: &GridField, mu: &GridMeasure, battery: &[TestFunction]) -> Result<DivergenceReport> {
    v.grid().ensure_same(mu.grid())?;
    let grid = v.grid();
    let vol = grid.cell_volume();
    let centers = grid.centers();
    let residuals: Vec<f64> = battery
        .iter()
        .map(|phi| {
            let mut flux = 0.0;
            let mut source = 0.0;
            for (i, c) in centers.iter().enumerate() {
                let g = phi.gradient(c);
                flux += v.components().iter().zip(&g).map(|(comp, gi)| comp[i] * gi).sum::<f64>();
                source += phi.value(c) * mu.masses()[i];
            }
            (flux * vol + source).abs()
        })
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(DivergenceReport {
        residuals,
        max_residual,
    })
}

/// Residuals of `div v = ν − m` for a grid measure `ν`.
pub fn connection_residuals(v: &GridField, nu: &GridMeasure, battery: &[TestFunction]) -> Result<DivergenceReport> {
    divergence_residuals(v, &nu.minus_lebesgue(), battery)
}

/// Value of an `inf_r` functional over the sampled radii.
#[derive(Clone, Debug, PartialEq)]
pub struct RaValue {
    pub value: f64,
    pub argmin_r: f64,
    /// `(r, r + ‖·‖∞)` at every sampled radius.
    pub profile: Vec<(f64, f64)>,
}

/// Radii at which `Ra` and `R̃a` are sampled: `0` (the limit `‖v‖∞`) and
/// `2^k h` below `L/2`.
pub fn sampled_radii(grid: &Grid) -> Vec<f64> {
    let h = grid.max_pitch();
    let half = grid.side() / 2.0;
    let mut radii = vec![0.0];
    let mut r = h;
    while r < half {
        radii.push(r);
        r *= 2.0;
    }
    radii
}

fn sup_of_averages(grid: &Grid, components: &[Vec<f64>], radii: &[f64]) -> Result<RaValue> {
    let spectra: Vec<Vec<Complex64>> = components.iter().map(|c| forward(grid, c)).collect();
    let mut profile = Vec::with_capacity(radii.len());
    for &r in radii {
        let averaged: Vec<Vec<f64>> = if r == 0.0 {
            components.to_vec()
        } else {
            let kernel = forward(grid, &Mollifier::ball(r)?.kernel(grid)?);
            spectra
                .iter()
                .map(|s| inverse_real(grid, s.iter().zip(&kernel).map(|(a, b)| a * b).collect()))
                .collect()
        };
        let sup = (0..grid.len())
            .map(|i| averaged.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        profile.push((r, r + sup));
    }
    let (argmin_r, value) = profile
        .iter()
        .copied()
        .fold((0.0, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best });
    Ok(RaValue {
        value,
        argmin_r,
        profile,
    })
}

/// `Ra(v) = inf_r { r + ‖v * χ_r‖∞ }` over [`sampled_radii`].
pub fn ra(v: &GridField) -> Result<RaValue> {
    sup_of_averages(v.grid(), v.components(), &sampled_radii(v.grid()))
}

/// `R̃a(v) = inf_r { r + ‖ |v| * χ_r ‖∞ }` over [`sampled_radii`].
pub fn ra_tilde(v: &GridField) -> Result<RaValue> {
    let magnitude = v.magnitude();
    sup_of_averages(v.grid(), &[magnitude.values().to_vec()], &sampled_radii(v.grid()))
}

/// Length of `[a, b] ∩ [lo, hi]`.
fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    (b.min(hi) - a.max(lo)).max(0.0)
}

const RADIUS_ALLOWANCE: f64 = 1e-12;

/// A field with divergence `δ_x * χ_ε − δ_y * χ_ε`, `ε = r/4`: the unit
/// current along the segment `[x, y]` averaged over balls of radius `ε`.
///
/// At a point `ξ` its value is `τ · |[x, y] ∩ B(ξ; ε)| / m(B(ξ; ε))` with `τ`
/// the unit tangent from `x` to `y`. Its `L¹` norm is `|x − y|` and it
/// vanishes outside `B((x + y)/2; |x − y|/2 + ε)`.
pub fn dipole_field(grid: &Grid, x: &[f64], y: &[f64], r: f64) -> Result<GridField> {
    let mut out = GridField::zeros(grid.clone());
    add_dipole(&mut out, x, y, r, 1.0)?;
    Ok(out)
}

fn add_dipole(out: &mut GridField, x: &[f64], y: &[f64], r: f64, weight: f64) -> Result<()> {
    let grid = out.grid().clone();
    let d = grid.dim();
    if x.len() != d || y.len() != d {
        return Err(invalid("x", format!("points must have {d} coordinates")));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid("r", "must be positive"));
    }
    if r >= grid.side() / 2.0 {
        return Err(invalid("r", "must be below L/2"));
    }
    if grid.max_pitch() > r / 8.0 * (1.0 + RADIUS_ALLOWANCE) {
        return Err(invalid(
            "pitch",
            format!("grid pitch {} exceeds r/8 = {}", grid.max_pitch(), r / 8.0),
        ));
    }
    let domain = grid.domain();
    let offset = domain.displacement_f64(x, y);
    let length = offset.iter().map(|c| c * c).sum::<f64>().sqrt();
    if length > r * (1.0 + RADIUS_ALLOWANCE) {
        return Err(Error::RadiusViolation {
            distance: length,
            radius: r,
        });
    }
    if length == 0.0 || weight == 0.0 {
        return Ok(());
    }
    let eps = r / 4.0;
    let tangent: Vec<f64> = offset.iter().map(|c| c / length).collect();
    let mid: Vec<f64> = x.iter().zip(&offset).map(|(a, o)| a + o / 2.0).collect();
    let reach = length / 2.0 + eps;
    let scale = weight / (ball_volume(d) * eps.powi(d as i32));
    let lo: Vec<i64> = (0..d)
        .map(|a| ((mid[a] - reach) / grid.pitch(a) - 0.5).floor() as i64)
        .collect();
    let hi: Vec<i64> = (0..d)
        .map(|a| ((mid[a] + reach) / grid.pitch(a) - 0.5).ceil() as i64)
        .collect();
    let spans: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
    let components = out.components_mut();
    for idx in crate::measure::multi_indices(&spans) {
        let k: Vec<i64> = idx.iter().zip(&lo).map(|(&i, &l)| i as i64 + l).collect();
        // Position relative to the segment start.
        let rel: Vec<f64> = (0..d)
            .map(|a| (k[a] as f64 + 0.5) * grid.pitch(a) - mid[a] + length / 2.0 * tangent[a])
            .collect();
        let along: f64 = rel.iter().zip(&tangent).map(|(p, t)| p * t).sum();
        let perp2 = (rel.iter().map(|p| p * p).sum::<f64>() - along * along).max(0.0);
        if perp2 >= eps * eps {
            continue;
        }
        let half_chord = (eps * eps - perp2).sqrt();
        let inside = overlap(along - half_chord, along + half_chord, 0.0, length);
        if inside <= 0.0 {
            continue;
        }
        let flat = grid.flat_wrapped(&k);
        for a in 0..d {
            components[a][flat] += scale * inside * tangent[a];
        }
    }
    Ok(())
}

/// `v = Σ_γ w · v_{x,y}` over the entries of a coupling, every dipole built
/// at radius `r`.
pub fn assemble_transport_field(gamma: &Coupling, r: f64, grid: &Grid) -> Result<GridField> {
    gamma.domain().ensure_same(grid.domain())?;
    let mut out = GridField::zeros(grid.clone());
    let sources = gamma.source.positions_f64();
    let targets = gamma.target.positions_f64();
    for e in &gamma.entries {
        let distance = gamma.entry_distance(e).value();
        if distance > r * (1.0 + RADIUS_ALLOWANCE) {
            return Err(Error::RadiusViolation { distance, radius: r });
        }
        let w = crate::exact::to_f64(&e.weight);
        add_dipole(&mut out, &sources[e.source], &targets[e.target], r, w)?;
    }
    Ok(out)
}

/// Ceiling for `R̃a(v) / Tra` when `v` is assembled from an optimal coupling
/// at `r = Tra`: `2 + 2.5^d`.
///
/// `|v| * χ_r` is at most `(9/4)^d r` for such fields, so `R̃a(v) ≤ (1 + 2.25^d) r`.
pub fn assembled_ratio_constant(d: usize) -> f64 {
    2.0 + 2.5f64.powi(d as i32)
}

/// Ceiling for `Tra / Ra(v)` over connecting fields: `2 + 18 d^{3/2}`.
pub fn connection_ratio_constant(d: usize) -> f64 {
    2.0 + 18.0 * (d as f64).powf(1.5)
}
