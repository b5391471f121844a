//! Reduction operators with τ = 1 of v_t = v_xx + δv³ + εv, and their
//! preimages for f u_t = (f u_x)_x + δf²u³ with f = ζ².

use crate::expr::Expr;
use crate::model::{ImagedEquation, Interval, RDEquation, VectorField};

use super::{Result, SymmetryError};

fn x() -> Expr {
    Expr::sym("x")
}

fn u() -> Expr {
    Expr::sym("u")
}

/// All branches for the given (δ, ε): the pair linear in v∂x when δ < 0,
/// and the x-dependent operator(s) selected by the sign of ε, with
/// μ = √(|ε|/2). The equation is returned alongside.
pub fn cubic_reduction_operators(
    delta: f64,
    eps: f64,
    domain: Interval,
) -> Result<(ImagedEquation, Vec<(String, VectorField)>)> {
    if delta == 0.0 {
        return Err(SymmetryError::Parameter("δ must be nonzero".into()));
    }
    let eq = ImagedEquation::new(Expr::num(eps), Expr::num(delta), 3.0, domain);
    let mut ops = Vec::new();
    if delta < 0.0 {
        let s = 1.5 * (-2.0 * delta).sqrt();
        for (sign, name) in [(1.0, "+"), (-1.0, "-")] {
            ops.push((
                format!("v-shift {name}"),
                VectorField::new(
                    Expr::one(),
                    sign * s * u(),
                    1.5 * (delta * u().powf(3.0) + eps * u()),
                ),
            ));
        }
    }
    let mu = (eps.abs() / 2.0).sqrt();
    let mx = mu * x();
    if eps == 0.0 {
        ops.push((
            "rational".into(),
            VectorField::new(
                Expr::one(),
                -3.0 * x().powf(-1.0),
                -3.0 * x().powf(-2.0) * u(),
            ),
        ));
    } else if eps < 0.0 {
        ops.push((
            "tan".into(),
            VectorField::new(
                Expr::one(),
                3.0 * mu * mx.tan(),
                -3.0 * mu * mu * mx.cos().powf(-2.0) * u(),
            ),
        ));
    } else {
        ops.push((
            "tanh".into(),
            VectorField::new(
                Expr::one(),
                -3.0 * mu * mx.tanh(),
                3.0 * mu * mu * mx.cosh().powf(-2.0) * u(),
            ),
        ));
        ops.push((
            "coth".into(),
            VectorField::new(
                Expr::one(),
                -3.0 * mu * mx.tanh().powf(-1.0),
                -3.0 * mu * mu * mx.sinh().powf(-2.0) * u(),
            ),
        ));
    }
    Ok((eq, ops))
}

/// One row of the preimaged list: ζ, the equation and its operators.
#[derive(Debug, Clone)]
pub struct PreimagedCubicCase {
    pub row: u8,
    pub zeta: Expr,
    pub equation: RDEquation,
    pub operators: Vec<(String, VectorField)>,
}

/// Row 1: ζ = c1x + c2 (ε = 0). Row 2: ζ = c1 sin(√ε x) + c2 cos(√ε x),
/// ε > 0. Row 3: ζ = c1 sinh(√|ε| x) + c2 cosh(√|ε| x), ε < 0.
pub fn preimaged_cubic_case(
    row: u8,
    c1: f64,
    c2: f64,
    delta: f64,
    eps: f64,
    domain: Interval,
) -> Result<PreimagedCubicCase> {
    if c1 == 0.0 && c2 == 0.0 {
        return Err(SymmetryError::Parameter("c1² + c2² must be nonzero".into()));
    }
    let w = eps.abs().sqrt();
    let (zeta, eps) = match row {
        1 => (c1 * x() + c2, 0.0),
        2 if eps > 0.0 => (c1 * (w * x()).sin() + c2 * (w * x()).cos(), eps),
        3 if eps < 0.0 => (c1 * (w * x()).sinh() + c2 * (w * x()).cosh(), eps),
        2 | 3 => {
            return Err(SymmetryError::Parameter(format!(
                "row {row} needs ε {} 0",
                if row == 2 { ">" } else { "<" }
            )))
        }
        _ => return Err(SymmetryError::Parameter(format!("no row {row}"))),
    };
    let zeta = zeta.simplify();
    if domain.sign_of(&zeta).is_none() {
        return Err(SymmetryError::Parameter("ζ vanishes on the domain".into()));
    }
    let zx = zeta.diff("x")?.simplify();
    let f = zeta.powf(2.0);
    let equation = RDEquation::gauged(f.clone(), delta * f.powf(2.0), 3.0, domain);
    let mut ops = Vec::new();
    if delta < 0.0 {
        let s = (-2.0 * delta).sqrt();
        for (sign, name) in [(1.0, "+"), (-1.0, "-")] {
            let eta =
                1.5 * (delta * zeta.powf(2.0) * u().powf(2.0) - sign * s * &zx * u() + eps) * u();
            ops.push((
                format!("v-shift {name}"),
                VectorField::new(Expr::one(), sign * 1.5 * s * &zeta * u(), eta),
            ));
        }
    }
    let mu = (eps.abs() / 2.0).sqrt();
    let mx = mu * x();
    let ratio = &zx / &zeta;
    match row {
        1 => ops.push((
            "rational".into(),
            VectorField::new(
                Expr::one(),
                -3.0 * x().powf(-1.0),
                -3.0 * c2 * (x().powf(2.0) * &zeta).powf(-1.0) * u(),
            ),
        )),
        2 => {
            ops.push((
                "tanh".into(),
                VectorField::new(
                    Expr::one(),
                    -3.0 * mu * mx.tanh(),
                    3.0 * mu * (&ratio * mx.tanh() + mu * mx.cosh().powf(-2.0)) * u(),
                ),
            ));
            ops.push((
                "coth".into(),
                VectorField::new(
                    Expr::one(),
                    -3.0 * mu * mx.tanh().powf(-1.0),
                    3.0 * mu * (&ratio * mx.tanh().powf(-1.0) - mu * mx.sinh().powf(-2.0)) * u(),
                ),
            ));
        }
        _ => ops.push((
            "tan".into(),
            VectorField::new(
                Expr::one(),
                3.0 * mu * mx.tan(),
                -3.0 * mu * (&ratio * mx.tan() + mu * mx.cos().powf(-2.0)) * u(),
            ),
        )),
    }
    Ok(PreimagedCubicCase {
        row,
        zeta,
        equation,
        operators: ops,
    })
}
