use crate::expr::Expr;
use crate::model::{AsEvolution, VectorField};

use super::lie::rhs;
use super::prolong::{prolong2, total_t, total_x};
use super::{
    sweep, JetBox, JetPoint, Report, Result, SymmetryError, T, U, UT, UTT, UTX, UX, UXX, X,
};

/// Q_(2)(u_t − E) on the manifold of the equation and the characteristic
/// u_t = η − ξu_x, for Q divided by τ. Substitution order: characteristic,
/// then u_xx from the equation, then u_tx and u_tt from the x- and
/// t-derivatives of the characteristic. The result depends on (t, x, u, u_x).
pub fn conditional_condition(eq: &impl AsEvolution, q: &VectorField) -> Result<Expr> {
    if q.tau.is_zero() {
        return Err(SymmetryError::Singular(
            "τ = 0 is outside the conditional check".into(),
        ));
    }
    let q = if q.tau.is_one() {
        q.clone()
    } else {
        VectorField::new(Expr::one(), &q.xi / &q.tau, &q.eta / &q.tau)
    };
    let (e, a, b, r) = rhs(eq)?;
    let p = prolong2(&q)?;
    let act = e.diff(T)? + &q.xi * e.diff(X)? + &q.eta * e.diff(U)?;
    let cond = &p.eta_t - act - &p.eta_x * &b - &p.eta_xx * &a;

    let ux = Expr::sym(UX);
    let charac = &q.eta - &q.xi * &ux;
    let uxx = (&charac - &b * &ux - r) / &a;
    let on_eq = |f: &Expr| f.substitute(UT, &charac).substitute(UXX, &uxx);
    let utx = on_eq(&total_x(&charac)?);
    let utt = on_eq(&total_t(&charac)?.substitute(UTX, &utx));
    Ok(on_eq(&cond.substitute_all(&[(UTX, utx), (UTT, utt)])))
}

/// The conditional criterion at (t, x, u, u_x); higher jet entries of jp
/// are ignored.
pub fn conditional_residual(eq: &impl AsEvolution, q: &VectorField, jp: &JetPoint) -> Result<f64> {
    let v = conditional_condition(eq, q)?.eval(&jp.to_point())?;
    if !v.is_finite() {
        return Err(SymmetryError::Singular(format!(
            "non-finite residual at {jp:?}"
        )));
    }
    Ok(v)
}

pub fn verify_nonclassical(
    eq: &impl AsEvolution,
    q: &VectorField,
    jets: &JetBox,
    n: usize,
    tol: f64,
) -> Result<Report> {
    let cond = conditional_condition(eq, q)?;
    sweep(&cond, &jets.sample(1), n, tol)
}
