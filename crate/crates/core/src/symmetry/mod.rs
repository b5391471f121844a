//! Second prolongation, Lie and conditional invariance checks on sampled jet
//! points, commutators and closure of operator bases, and the known reduction
//! operators of the cubic heat equation with their preimages.

mod algebra;
mod conditional;
mod lie;
mod prolong;
mod reduction;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprError, Point, SampleBox};
use crate::model::Interval;

pub use algebra::{commutator, verify_algebra_closure, StructureConstant, StructureTable};
pub use conditional::{conditional_condition, conditional_residual, verify_nonclassical};
pub use lie::{lie_condition, lie_residual, verify_lie};
pub use prolong::{prolong2, total_t, total_x, ProlongedField};
pub use reduction::{cubic_reduction_operators, preimaged_cubic_case, PreimagedCubicCase};

/// Jet coordinate names.
pub const T: &str = "t";
pub const X: &str = "x";
pub const U: &str = "u";
pub const UT: &str = "u_t";
pub const UX: &str = "u_x";
pub const UXX: &str = "u_xx";
pub const UTX: &str = "u_tx";
pub const UTT: &str = "u_tt";
pub const UXXX: &str = "u_xxx";
pub const UTXX: &str = "u_txx";

pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("no sample point could be evaluated")]
    NoValidPoints,
    #[error("singular operator: {0}")]
    Singular(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("empty basis")]
    EmptyBasis,
    #[error("[Q{i}, Q{j}] is not in the span of the basis (residual {residual:e})")]
    NotClosed { i: usize, j: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, SymmetryError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetPoint {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_xx: f64,
    pub u_xxx: f64,
}

impl JetPoint {
    pub fn to_point(&self) -> Point {
        Point::from_pairs(&[
            (T, self.t),
            (X, self.x),
            (U, self.u),
            (UX, self.u_x),
            (UXX, self.u_xx),
            (UXXX, self.u_xxx),
        ])
    }

    fn from_point(p: &Point) -> JetPoint {
        let g = |k| p.get(k).unwrap_or(0.0);
        JetPoint {
            t: g(T),
            x: g(X),
            u: g(U),
            u_x: g(UX),
            u_xx: g(UXX),
            u_xxx: g(UXXX),
        }
    }
}

/// Box of jet coordinates sampled by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetBox {
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub u: (f64, f64),
    pub derivs: (f64, f64),
}

impl JetBox {
    /// [0.5, 2] in every coordinate except x, which follows the domain.
    pub fn on(domain: Interval) -> JetBox {
        JetBox {
            t: (0.5, 2.0),
            x: (domain.lo, domain.hi),
            u: (0.5, 2.0),
            derivs: (0.5, 2.0),
        }
    }

    pub fn with_t(mut self, lo: f64, hi: f64) -> JetBox {
        self.t = (lo, hi);
        self
    }

    pub fn with_u(mut self, lo: f64, hi: f64) -> JetBox {
        self.u = (lo, hi);
        self
    }

    fn sample(&self, order: usize) -> SampleBox {
        let mut b = SampleBox::new(&[
            (T, self.t.0, self.t.1),
            (X, self.x.0, self.x.1),
            (U, self.u.0, self.u.1),
        ]);
        for name in [UX, UXX, UXXX].iter().take(order) {
            b = b.with(name, self.derivs.0, self.derivs.1);
        }
        b
    }
}

/// Outcome of a sampled invariance check. Residuals are relative to the
/// largest monomial of the condition at each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pass: bool,
    pub max_residual: f64,
    pub worst_point: Option<JetPoint>,
    pub evaluated: usize,
    pub tol: f64,
}

/// Evaluates a condition on sampled points, in parallel, and keeps the worst
/// relative residual. Points where the condition cannot be evaluated are
/// skipped.
fn sweep(cond: &crate::expr::Expr, sample: &SampleBox, n: usize, tol: f64) -> Result<Report> {
    use rayon::prelude::*;
    let pts: Vec<Point> = sample.points(n).collect();
    let vals: Vec<Option<(f64, JetPoint)>> = pts
        .par_iter()
        .map(|p| {
            let s = cond.eval_scaled(p).ok()?;
            s.value
                .is_finite()
                .then(|| (s.relative(), JetPoint::from_point(p)))
        })
        .collect();
    let mut rep = Report {
        pass: false,
        max_residual: 0.0,
        worst_point: None,
        evaluated: 0,
        tol,
    };
    for (r, jp) in vals.into_iter().flatten() {
        rep.evaluated += 1;
        if rep.worst_point.is_none() || r > rep.max_residual {
            rep.max_residual = rep.max_residual.max(r);
            rep.worst_point = Some(jp);
        }
    }
    if rep.evaluated == 0 {
        return Err(SymmetryError::NoValidPoints);
    }
    rep.pass = rep.max_residual <= tol;
    Ok(rep)
}
