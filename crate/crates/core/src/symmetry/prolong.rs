use serde::{Deserialize, Serialize};

use crate::expr::{Expr, Result};
use crate::model::VectorField;

use super::{T, U, UT, UTT, UTX, UTXX, UX, UXX, UXXX, X};

/// Q together with the coefficients of ∂u_t, ∂u_x and ∂u_xx in its second
/// prolongation, as expressions in the jet coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProlongedField {
    pub base: VectorField,
    pub eta_t: Expr,
    pub eta_x: Expr,
    pub eta_xx: Expr,
}

fn chain(f: &Expr, var: &str, pairs: &[(&str, &str)]) -> Result<Expr> {
    let mut out = f.diff(var)?;
    for (v, next) in pairs {
        if f.depends_on(v) {
            out = out + Expr::sym(next) * f.diff(v)?;
        }
    }
    Ok(out)
}

/// D_x on functions of (t, x, u, u_t, u_x, u_xx, u_tx).
pub fn total_x(f: &Expr) -> Result<Expr> {
    chain(
        f,
        X,
        &[(U, UX), (UX, UXX), (UXX, UXXX), (UT, UTX), (UTX, UTXX)],
    )
}

/// D_t on functions of (t, x, u, u_t, u_x, u_xx, u_tx).
pub fn total_t(f: &Expr) -> Result<Expr> {
    chain(f, T, &[(U, UT), (UX, UTX), (UXX, UTXX), (UT, UTT)])
}

/// η^t = D_tη − u_t D_tτ − u_x D_tξ, η^x likewise with D_x, and
/// η^xx = D_xη^x − u_tx D_xτ − u_xx D_xξ.
pub fn prolong2(q: &VectorField) -> Result<ProlongedField> {
    let (ut, ux, uxx, utx) = (Expr::sym(UT), Expr::sym(UX), Expr::sym(UXX), Expr::sym(UTX));
    let dx_tau = total_x(&q.tau)?;
    let dx_xi = total_x(&q.xi)?;
    let eta_t = total_t(&q.eta)? - &ut * total_t(&q.tau)? - &ux * total_t(&q.xi)?;
    let eta_x = total_x(&q.eta)? - &ut * &dx_tau - &ux * &dx_xi;
    let eta_xx = total_x(&eta_x)? - utx * dx_tau - uxx * dx_xi;
    Ok(ProlongedField {
        base: q.clone(),
        eta_t: eta_t.simplify(),
        eta_x: eta_x.simplify(),
        eta_xx: eta_xx.simplify(),
    })
}
