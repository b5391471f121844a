use crate::expr::{num_equal_report, Assumptions, Expr};
use crate::model::{Interval, PointTransformation, VectorField};

use super::{check_box, Result, TransformError, CHECK_POINTS};

/// Image of Q under a fiber-affine point map, written in the new variables.
/// Needs the stored inverse of the independent-variable part.
pub fn push_operator(
    q: &VectorField,
    map: &PointTransformation,
    domain: Interval,
) -> Result<VectorField> {
    let inv = map
        .inverse
        .as_ref()
        .ok_or_else(|| TransformError::NoInverse(format!("X = {}", map.x)))?;
    let asm = Assumptions::on(check_box(domain));
    let d = |e: &Expr, v: &str| e.diff_with(v, &asm);
    let u = Expr::sym("u");
    let qt = &q.tau * d(&map.t, "t")?;
    let qx = &q.tau * d(&map.x, "t")? + &q.xi * d(&map.x, "x")?;
    let w = &map.factor;
    let z = &map.shift;
    let qu = &q.tau * (d(w, "t")? * &u + d(z, "t")?)
        + &q.xi * (d(w, "x")? * &u + d(z, "x")?)
        + &q.eta * w;
    let tx = [("t", inv.t.clone()), ("x", inv.x.clone())];
    let old_u = ((&u - z) / w).substitute_all(&tx);
    let subs = [("t", inv.t.clone()), ("x", inv.x.clone()), ("u", old_u)];
    let go = |e: Expr| e.substitute_all(&subs).simplify();
    Ok(VectorField::new(go(qt), go(qx), go(qu)))
}

/// Q̃ = τ∂t + ξ∂x + (η|_{v=√|f|u}/√|f| − ξ f_x/(2f) u)∂u: an operator of the
/// imaged equation carried back to the gauged equation with this f.
pub fn pushforward_operator(q: &VectorField, f: &Expr, domain: Interval) -> Result<VectorField> {
    let s = domain.sign_of(f).ok_or_else(|| {
        TransformError::Precondition("f vanishes or changes sign on the domain".into())
    })?;
    let b = check_box(domain);
    // η must be affine in v: η(2v) − 2η(v) + η(0) ≡ 0.
    let u = Expr::sym("u");
    let second =
        q.eta.substitute("u", &(2.0 * &u)) - 2.0 * &q.eta + q.eta.substitute("u", &Expr::zero());
    if num_equal_report(&second, &Expr::zero(), &b, CHECK_POINTS)?.max > 1e-10 {
        return Err(TransformError::Precondition(
            "η is not affine in the dependent variable".into(),
        ));
    }
    let asm = Assumptions::on(b);
    let root = (s.value() * f).sqrt().simplify_with(&asm);
    let fx = f.diff_with("x", &asm)?;
    let eta = q.eta.substitute("u", &(&root * &u)) / &root - &q.xi * fx / (2.0 * f) * &u;
    Ok(VectorField::new(
        q.tau.clone(),
        q.xi.clone(),
        eta.simplify_with(&asm),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{num_equal, parse};

    #[test]
    fn dt_is_unchanged() {
        let q = pushforward_operator(
            &VectorField::dt(),
            &parse("exp(x)").unwrap(),
            Interval::new(0.5, 2.0),
        )
        .unwrap();
        assert_eq!(q, VectorField::dt());
    }

    #[test]
    fn cos_row_operator() {
        // α = 0.3: ∂x + αv∂v becomes ∂x + (α + tan x)u∂u for f = cos²x.
        let q = VectorField::new(Expr::zero(), Expr::one(), 0.3 * Expr::sym("u"));
        let d = Interval::new(-1.0, 1.0);
        let out = pushforward_operator(&q, &parse("cos(x)^2").unwrap(), d).unwrap();
        let want = parse("(0.3 + tan(x))*u").unwrap();
        assert!(num_equal(&out.eta, &want, &check_box(d), 32, 1e-12).unwrap());
    }

    #[test]
    fn nonaffine_eta_is_rejected() {
        let q = VectorField::new(Expr::zero(), Expr::one(), parse("u^2").unwrap());
        assert!(pushforward_operator(&q, &parse("1").unwrap(), Interval::new(0.5, 2.0)).is_err());
    }

    #[test]
    fn scaling_push() {
        // t̃ = 4t, x̃ = 2x, ũ = 3u maps ∂x to 2∂x̃ and u∂u to ũ∂ũ.
        let mut map = PointTransformation::identity();
        map.t = parse("4*t").unwrap();
        map.x = parse("2*x").unwrap();
        map.factor = Expr::num(3.0);
        map.inverse = Some(crate::model::InverseMap {
            t: parse("t/4").unwrap(),
            x: parse("x/2").unwrap(),
        });
        let q = VectorField::new(Expr::zero(), Expr::one(), Expr::sym("u"));
        let out = push_operator(&q, &map, Interval::new(0.5, 2.0)).unwrap();
        assert_eq!(out.xi.as_num(), Some(2.0));
        assert_eq!(out.eta, Expr::sym("u"));
    }
}
