use super::build::{add, div, mul, neg, pow, sub};
use super::{Assumptions, Expr, ExprError, Func, Node, Result, Sign};

pub(super) fn diff(e: &Expr, var: &str, asm: &Assumptions) -> Result<Expr> {
    if !e.depends_on(var) {
        return Ok(Expr::zero());
    }
    Ok(match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => Expr::num(if &**s == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(diff(a, var, asm)?),
        Node::Add(a, b) => add(diff(a, var, asm)?, diff(b, var, asm)?),
        Node::Sub(a, b) => sub(diff(a, var, asm)?, diff(b, var, asm)?),
        Node::Mul(a, b) => add(
            mul(diff(a, var, asm)?, b.clone()),
            mul(a.clone(), diff(b, var, asm)?),
        ),
        Node::Div(a, b) => {
            let da = diff(a, var, asm)?;
            let db = diff(b, var, asm)?;
            sub(
                div(da, b.clone()),
                div(mul(a.clone(), db), pow(b.clone(), Expr::num(2.0))),
            )
        }
        Node::Pow(a, b) => {
            let da = diff(a, var, asm)?;
            if !b.depends_on(var) {
                let lowered = match b.as_num() {
                    Some(n) => Expr::num(n - 1.0),
                    None => sub(b.clone(), Expr::one()),
                };
                mul(mul(b.clone(), pow(a.clone(), lowered)), da)
            } else {
                let db = diff(b, var, asm)?;
                let inner = add(mul(db, a.ln()), div(mul(b.clone(), da), a.clone()));
                mul(e.clone(), inner)
            }
        }
        Node::Call(f, args) => call(*f, args, var, asm)?,
    })
}

fn constant_arg(f: Func, args: &[Expr], idx: usize, var: &str) -> Result<()> {
    if args[idx].depends_on(var) {
        return Err(ExprError::NotDifferentiable(format!(
            "{} with respect to a parameter argument",
            f.name()
        )));
    }
    Ok(())
}

fn call(f: Func, args: &[Expr], var: &str, asm: &Assumptions) -> Result<Expr> {
    let a = &args[0];
    let chain =
        |outer: Expr, inner: &Expr| -> Result<Expr> { Ok(mul(outer, diff(inner, var, asm)?)) };
    match f {
        Func::Exp => chain(a.exp(), a),
        Func::Ln => chain(div(Expr::one(), a.clone()), a),
        Func::Sqrt => chain(div(Expr::num(0.5), a.sqrt()), a),
        Func::Abs => match asm.sign_of(a) {
            Some(s) => chain(Expr::num(s.value()), a),
            None => Err(ExprError::UnknownSign(a.to_string())),
        },
        Func::Sign => match asm.sign_of(a) {
            Some(Sign::Positive | Sign::Negative) => Ok(Expr::zero()),
            None => Err(ExprError::UnknownSign(a.to_string())),
        },
        Func::Sin => chain(a.cos(), a),
        Func::Cos => chain(neg(a.sin()), a),
        Func::Tan => chain(pow(a.cos(), Expr::num(-2.0)), a),
        Func::Sinh => chain(a.cosh(), a),
        Func::Cosh => chain(a.sinh(), a),
        Func::Tanh => chain(sub(Expr::one(), pow(a.tanh(), Expr::num(2.0))), a),
        Func::Erf => {
            let c = 2.0 / std::f64::consts::PI.sqrt();
            chain(
                mul(Expr::num(c), neg(pow(a.clone(), Expr::num(2.0))).exp()),
                a,
            )
        }
        Func::WhitM => {
            constant_arg(f, args, 0, var)?;
            constant_arg(f, args, 1, var)?;
            let (kappa, mu, z) = (&args[0], &args[1], &args[2]);
            // M' = (1/2 − κ/z) M_{κ,μ} + (1/2 + μ + κ)/z · M_{κ+1,μ}
            let m0 = Expr::call(Func::WhitM, vec![kappa.clone(), mu.clone(), z.clone()]);
            let m1 = Expr::call(
                Func::WhitM,
                vec![add(kappa.clone(), Expr::one()), mu.clone(), z.clone()],
            );
            let c0 = sub(Expr::num(0.5), div(kappa.clone(), z.clone()));
            let c1 = div(
                add(add(Expr::num(0.5), mu.clone()), kappa.clone()),
                z.clone(),
            );
            chain(add(mul(c0, m0), mul(c1, m1)), z)
        }
        Func::Sn | Func::Cn | Func::Dn | Func::Ds | Func::Sd => {
            constant_arg(f, args, 1, var)?;
            let k = &args[1];
            let j = |g: Func| Expr::call(g, vec![a.clone(), k.clone()]);
            let outer = match f {
                Func::Sn => mul(j(Func::Cn), j(Func::Dn)),
                Func::Cn => neg(mul(j(Func::Sn), j(Func::Dn))),
                Func::Dn => neg(mul(
                    mul(pow(k.clone(), Expr::num(2.0)), j(Func::Sn)),
                    j(Func::Cn),
                )),
                Func::Ds => neg(div(j(Func::Cn), pow(j(Func::Sn), Expr::num(2.0)))),
                _ => div(j(Func::Cn), pow(j(Func::Dn), Expr::num(2.0))),
            };
            chain(outer, a)
        }
    }
}
