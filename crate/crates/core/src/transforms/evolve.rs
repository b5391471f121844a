// Generic change of variables t̃ = T(t), x̃ = X(t,x), ũ = W u + Z for an
// evolution equation u_t = A u_xx + B u_x + R(t,x,u).

use crate::expr::{num_equal_report, Assumptions, Expr};
use crate::model::{Evolution, PointTransformation};

use super::{check_box, Result, TransformError, CHECK_POINTS};

/// Coefficients of the transformed equation, written in the OLD variables
/// (t, x) with `u` standing for the new dependent variable ũ.
#[derive(Debug, Clone, PartialEq)]
pub struct Mapped {
    pub a: Expr,
    pub b: Expr,
    pub r: Expr,
}

impl Mapped {
    /// Rewrites the coefficients in the new variables using the stored inverse.
    pub fn in_new_variables(
        &self,
        map: &PointTransformation,
        domain: crate::model::Interval,
    ) -> Result<Evolution> {
        let inv = map
            .inverse
            .as_ref()
            .ok_or_else(|| TransformError::NoInverse(format!("X = {}", map.x)))?;
        let subs = [("t", inv.t.clone()), ("x", inv.x.clone())];
        let go = |e: &Expr| e.substitute_all(&subs).simplify();
        Ok(Evolution {
            a: go(&self.a),
            b: go(&self.b),
            r: go(&self.r),
            domain,
        })
    }
}

pub fn transform_evolution(ev: &Evolution, map: &PointTransformation) -> Result<Mapped> {
    let asm = Assumptions::on(check_box(ev.domain));
    let d = |e: &Expr, v: &str| e.diff_with(v, &asm);
    let u = Expr::sym("u");
    // u = P ũ + S
    let p = (1.0 / &map.factor).simplify_with(&asm);
    let s = (-(&map.shift) / &map.factor).simplify_with(&asm);
    let tp = d(&map.t, "t")?;
    if map.t.depends_on("x") || map.t.depends_on("u") {
        return Err(TransformError::Precondition(
            "T must depend on t only".into(),
        ));
    }
    let (xx, xt) = (d(&map.x, "x")?, d(&map.x, "t")?);
    let xxx = d(&xx, "x")?;
    let (px, pt) = (d(&p, "x")?, d(&p, "t")?);
    let pxx = d(&px, "x")?;
    let (sx, st) = (d(&s, "x")?, d(&s, "t")?);
    let sxx = d(&sx, "x")?;
    let denom = &p * &tp;
    let a = (&ev.a * xx.powf(2.0) / &tp).simplify_with(&asm);
    let b = ((&ev.a * (2.0 * &px * &xx + &p * &xxx) + &ev.b * &p * &xx - &p * &xt) / &denom)
        .simplify_with(&asm);
    let inner = &p * &u + &s;
    let r = (&ev.a * (&pxx * &u + &sxx) + &ev.b * (&px * &u + &sx) - &pt * &u - &st
        + ev.r.substitute("u", &inner))
        / &denom;
    Ok(Mapped {
        a,
        b,
        r: r.simplify_with(&asm),
    })
}

/// Largest relative deviation between the mapped coefficients and a target
/// evolution composed with (T, X), sampled on the old-variable box.
pub fn matches_target(
    mapped: &Mapped,
    target: &Evolution,
    map: &PointTransformation,
    domain: crate::model::Interval,
) -> Result<f64> {
    let b = check_box(domain);
    let subs = [("t", map.t.clone()), ("x", map.x.clone())];
    let mut worst = 0.0f64;
    for (got, want) in [
        (&mapped.a, &target.a),
        (&mapped.b, &target.b),
        (&mapped.r, &target.r),
    ] {
        let dev = num_equal_report(got, &want.substitute_all(&subs), &b, CHECK_POINTS)?;
        worst = worst.max(dev.max);
    }
    Ok(worst)
}

/// u_t − (A u_xx + B u_x + R(t, x, u)) for a candidate solution u(t, x).
pub fn residual(ev: &Evolution, sol: &Expr) -> Result<Expr> {
    let asm = Assumptions::on(check_box(ev.domain));
    let ux = sol.diff_with("x", &asm)?;
    let uxx = ux.diff_with("x", &asm)?;
    let ut = sol.diff_with("t", &asm)?;
    Ok(ut - (&ev.a * uxx + &ev.b * ux + ev.r.substitute("u", sol)))
}

/// ũ(t̃, x̃) = W u + Z expressed in the new variables.
pub fn pushforward_solution(sol: &Expr, map: &PointTransformation) -> Result<Expr> {
    let inv = map
        .inverse
        .as_ref()
        .ok_or_else(|| TransformError::NoInverse(format!("X = {}", map.x)))?;
    let image = &map.factor * sol + &map.shift;
    Ok(image
        .substitute_all(&[("t", inv.t.clone()), ("x", inv.x.clone())])
        .simplify())
}

/// u(t, x) = (ũ(T, X) − Z)/W for a solution ũ of the target equation.
pub fn pullback_solution(sol: &Expr, map: &PointTransformation) -> Result<Expr> {
    let composed = sol.substitute_all(&[("t", map.t.clone()), ("x", map.x.clone())]);
    Ok(((composed - &map.shift) / &map.factor).simplify())
}
