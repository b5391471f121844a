use crate::expr::Expr;
use crate::model::{AsEvolution, VectorField};

use super::prolong::{prolong2, total_x};
use super::{sweep, JetBox, JetPoint, Report, Result, T, U, UT, UTX, UX, UXX, X};

/// E(t, x, u, u_x, u_xx) of u_t = E in jet coordinates.
/// Also returns A, B and R of E = A u_xx + B u_x + R.
pub(super) fn rhs(eq: &impl AsEvolution) -> Result<(Expr, Expr, Expr, Expr)> {
    let ev = eq.evolution()?;
    let e = &ev.a * Expr::sym(UXX) + &ev.b * Expr::sym(UX) + &ev.r;
    Ok((e, ev.a, ev.b, ev.r))
}

/// Q_(2)(u_t − E) with u_t = E and u_tx = D_xE substituted; a function of
/// (t, x, u, u_x, u_xx, u_xxx).
pub fn lie_condition(eq: &impl AsEvolution, q: &VectorField) -> Result<Expr> {
    let (e, a, b, _) = rhs(eq)?;
    let p = prolong2(q)?;
    let act = &q.tau * e.diff(T)? + &q.xi * e.diff(X)? + &q.eta * e.diff(U)?;
    let cond = &p.eta_t - act - &p.eta_x * b - &p.eta_xx * a;
    let dxe = total_x(&e)?;
    Ok(cond.substitute_all(&[(UT, e), (UTX, dxe)]))
}

/// The Lie condition at one jet point (absolute value, not scaled).
pub fn lie_residual(eq: &impl AsEvolution, q: &VectorField, jp: &JetPoint) -> Result<f64> {
    Ok(lie_condition(eq, q)?.eval(&jp.to_point())?)
}

/// Samples n points of the jet box and passes when the largest relative
/// residual is at most tol.
pub fn verify_lie(
    eq: &impl AsEvolution,
    q: &VectorField,
    jets: &JetBox,
    n: usize,
    tol: f64,
) -> Result<Report> {
    let cond = lie_condition(eq, q)?;
    sweep(&cond, &jets.sample(3), n, tol)
}
