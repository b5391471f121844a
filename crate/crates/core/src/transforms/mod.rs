//! Mappings between the initial, imaged and double-imaged classes, equivalence
//! group actions, additional equivalence transformations, and push-forwards of
//! operators and solutions.

mod additional;
pub mod antideriv;
mod equiv;
mod evolve;
mod gauge;
mod imaged;
mod push;
pub mod spline;

use thiserror::Error;

use crate::expr::{ExprError, SampleBox};
use crate::model::Interval;
use crate::tables::TableError;

pub use additional::{apply_additional, Additional, AdditionalMap};
pub use equiv::{apply_equiv, EquivGroup};
pub use evolve::{
    matches_target, pullback_solution, pushforward_solution, residual, transform_evolution, Mapped,
};
pub use gauge::{gauge_fg, GaugeResult, NumericGauge};
pub use imaged::{double_map, imaged_map, imaged_preimage, to_double_imaged, to_imaged};
pub use push::{push_operator, pushforward_operator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid equation: {0}")]
    Invalid(String),
    #[error("structural mismatch: {0}")]
    Mismatch(String),
    #[error("{what}: residual {residual:e} exceeds {tol:e}")]
    Residual {
        what: String,
        residual: f64,
        tol: f64,
    },
    #[error("no closed-form inverse of {0}")]
    NoInverse(String),
    #[error("map is not monotone on the domain")]
    NonMonotone,
}

pub type Result<T> = std::result::Result<T, TransformError>;

/// Tolerance for the defining-ODE residuals of ψ and χ.
pub const ODE_TOL: f64 = 1e-8;
/// Tolerance for matching transformed arbitrary elements with a template.
pub const MATCH_TOL: f64 = 1e-9;
const CHECK_POINTS: usize = 48;

/// (t, x, u) box over an x-interval used for all sampled checks here. The
/// t-range is short because the Gaussian-row maps carry factors like e^{8pt}
/// whose cancellation would otherwise swamp the comparison in roundoff.
pub fn check_box(domain: Interval) -> SampleBox {
    SampleBox::new(&[
        ("t", 0.1, 0.6),
        ("x", domain.lo, domain.hi),
        ("u", 0.5, 2.0),
    ])
}
