//! Shared vocabulary: domains, atomic and grid measures, fields, generators,
//! mollification and test functions.

mod atomic;
mod domain;
mod generate;
mod grid;
mod mollify;
mod testfn;

pub use atomic::{cells_per_axis, lebesgue_atoms, scale_measure, Atom, AtomicMeasure};
pub use domain::{Domain, DomainKind, MAX_DIMENSION};
pub use generate::{generate_instance, InstanceSpec, COORDINATE_QUANTUM};
pub use grid::{multi_indices, scale_field, Grid, GridField, GridMeasure, ScalarField};
pub use mollify::{ball_volume, Mollifier};
pub use testfn::{ball_average_multiplier, default_battery, Mode, TestFunction, BATTERY_SEED};
