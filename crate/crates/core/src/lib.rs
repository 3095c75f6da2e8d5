//! # spreadlab-core
//!
//! Computable notions of "uniform spreading" for finite measures on a torus
//! or a box:
//!
//! - the L∞ (bottleneck) transportation distance `Tra`, with witness couplings
//!   produced by max-flow on threshold graphs ([`transport`]);
//! - the neighbourhood-domination distance `Di`, with violating-set
//!   certificates taken from minimum cuts or subset enumeration
//!   ([`discrepancy`]);
//! - connecting vector fields (`div v = ν − m`), the `Ra` / `R̃a` functionals,
//!   dipole fields and their assembly along a coupling ([`field`]);
//! - the cube-union machinery behind the Laczkovich lemma ([`laczkovich`]);
//! - discrepancy bounds from potentials `Δu = ν − m` ([`potential`]).
//!
//! Atomic measures carry exact rational coordinates and masses. Distances are
//! compared through exact squared values, so `Tra = Di` on a finite instance is
//! an equality of rationals, not a floating-point coincidence. Grid-based
//! objects (mollified measures, fields, potentials) are `f64`.

#![forbid(unsafe_code)]

pub mod discrepancy;
pub mod exact;
pub mod field;
pub mod flow;
pub mod frame;
pub mod io;
pub mod laczkovich;
pub mod measure;
pub mod potential;
pub mod spectral;
pub mod transport;

pub use discrepancy::{
    check_di_condition, check_relation_condition, discrepancy_distance,
    discrepancy_distance_with, discrepancy_vs_lebesgue, duality_check,
    duality_check_relation, DiCheck, DiMethod, Discrepancy, DualityReport, DvlReport,
    RelationDualityReport, ViolatingSet,
};
pub use field::{
    assemble_transport_field, connection_residuals, dipole_field, divergence_residuals,
    poisson_connect, ra, ra_tilde, Connection, DiffMode, RaValue,
};
pub use frame::Distance;
pub use laczkovich::{build_ab, claim_check, laczkovich_pipeline, rho_upper_bound, CubeUnion, TestSet};
pub use measure::{
    AtomicMeasure, Domain, DomainKind, Grid, GridField, GridMeasure, InstanceSpec, Mollifier,
    ScalarField, TestFunction,
};
pub use potential::{corollary1_bound, corollary2_bound, laplacian};
pub use transport::{
    bottleneck_distance, brute_force_bottleneck, feasible_coupling, marriage_bijection,
    verify_coupling, Bottleneck, Certificate, Coupling, CouplingEntry, CouplingReport, Relation,
    Side,
};

use thiserror::Error;

/// Errors raised by spreadlab operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: String, right: String },

    #[error("measure is not mass-balanced against the domain volume: mass {mass}, volume {volume}")]
    MassImbalance { mass: f64, volume: f64 },

    #[error("empty measure")]
    Empty,

    #[error("domains differ: {0}")]
    DomainMismatch(String),

    #[error("atom count mismatch: {0} vs {1}")]
    CountMismatch(usize, usize),

    #[error("instance too large for exhaustive search: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("exact arithmetic overflow: {0}")]
    Overflow(String),

    #[error("radius violation: pair distance {distance} exceeds r = {radius}")]
    RadiusViolation { distance: f64, radius: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
