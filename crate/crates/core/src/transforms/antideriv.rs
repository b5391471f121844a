// Small antiderivative table and symbolic inversion of monotone maps.
// Both work on simplified expressions and give up (None) rather than guess.

use crate::expr::{num_equal, Expr, Func, Node, SampleBox};

/// Recognizes a·x + b with constant a ≠ 0, b.
fn linear(e: &Expr, var: &str) -> Option<(f64, f64)> {
    if e.symbols().iter().any(|s| s != var) {
        return None;
    }
    let at = |v: f64| e.eval(&crate::expr::Point::from_pairs(&[(var, v)])).ok();
    let b = at(0.0)?;
    let a = at(1.0)? - b;
    if a == 0.0 || !a.is_finite() {
        return None;
    }
    let lin = Expr::num(a) * Expr::sym(var) + b;
    let probe = SampleBox::new(&[(var, -1.7, 2.3)]);
    num_equal(e, &lin, &probe, 12, 1e-13)
        .ok()?
        .then_some((a, b))
}

fn constant(e: &Expr, var: &str) -> Option<f64> {
    if e.depends_on(var) {
        return None;
    }
    e.as_num()
        .or_else(|| e.eval(&crate::expr::Point::new()).ok())
}

/// ∫ e d(var) without constant, or None when no rule applies.
/// `positive` tells whether linear arguments of logarithms are positive on
/// the domain of interest.
pub fn antiderivative(e: &Expr, var: &str, positive: &dyn Fn(&Expr) -> bool) -> Option<Expr> {
    let x = Expr::sym(var);
    if let Some(c) = constant(e, var) {
        return Some(c * x);
    }
    match e.node() {
        Node::Add(a, b) => {
            Some(antiderivative(a, var, positive)? + antiderivative(b, var, positive)?)
        }
        Node::Sub(a, b) => {
            Some(antiderivative(a, var, positive)? - antiderivative(b, var, positive)?)
        }
        Node::Neg(a) => Some(-antiderivative(a, var, positive)?),
        Node::Mul(a, b) => {
            if let Some(c) = constant(a, var) {
                return Some(c * antiderivative(b, var, positive)?);
            }
            let c = constant(b, var)?;
            Some(c * antiderivative(a, var, positive)?)
        }
        Node::Div(a, b) => {
            if let Some(c) = constant(b, var) {
                return Some(antiderivative(a, var, positive)? / c);
            }
            let c = constant(a, var)?;
            match b.node() {
                Node::Pow(base, ex) => {
                    let n = constant(ex, var)?;
                    antiderivative(&(c * base.powf(-n)), var, positive)
                }
                Node::Call(Func::Exp, args) => {
                    antiderivative(&(c * (-&args[0]).exp()), var, positive)
                }
                _ => {
                    let (k, _) = linear(b, var)?;
                    Some(c * log_of(b, positive) / k)
                }
            }
        }
        Node::Sym(_) => Some(x.powf(2.0) / 2.0),
        Node::Pow(base, ex) => {
            let n = constant(ex, var)?;
            if let Some((k, _)) = linear(base, var) {
                return Some(if n == -1.0 {
                    log_of(base, positive) / k
                } else {
                    base.powf(n + 1.0) / (k * (n + 1.0))
                });
            }
            let Node::Call(f, args) = base.node() else {
                return None;
            };
            let (k, _) = linear(&args[0], var)?;
            let l2 = 2.0 * &args[0];
            match (f, n) {
                (Func::Cosh, 2.0) => Some(x / 2.0 + l2.sinh() / (4.0 * k)),
                (Func::Sinh, 2.0) => Some(-x / 2.0 + l2.sinh() / (4.0 * k)),
                (Func::Cos, 2.0) => Some(x / 2.0 + l2.sin() / (4.0 * k)),
                (Func::Sin, 2.0) => Some(x / 2.0 - l2.sin() / (4.0 * k)),
                (Func::Cosh, -2.0) => Some(args[0].tanh() / k),
                (Func::Cos, -2.0) => Some(args[0].tan() / k),
                _ => None,
            }
        }
        Node::Call(f, args) if args.len() == 1 => {
            let (k, _) = linear(&args[0], var)?;
            let l = &args[0];
            match f {
                Func::Exp => Some(l.exp() / k),
                Func::Sinh => Some(l.cosh() / k),
                Func::Cosh => Some(l.sinh() / k),
                Func::Sin => Some(-l.cos() / k),
                Func::Cos => Some(l.sin() / k),
                _ => None,
            }
        }
        _ => None,
    }
}

fn log_of(l: &Expr, positive: &dyn Fn(&Expr) -> bool) -> Expr {
    if positive(l) {
        l.ln()
    } else {
        (-l).ln()
    }
}

/// Solves `e(var) = target` for var by peeling invertible layers.
pub fn invert(e: &Expr, var: &str, target: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Sym(s) if &**s == var => Some(target.clone()),
        Node::Add(a, b) => {
            if let Some(c) = constant(a, var) {
                invert(b, var, &(target - c))
            } else {
                invert(a, var, &(target - constant(b, var)?))
            }
        }
        Node::Sub(a, b) => {
            if let Some(c) = constant(a, var) {
                invert(b, var, &(c - target))
            } else {
                invert(a, var, &(target + constant(b, var)?))
            }
        }
        Node::Neg(a) => invert(a, var, &-target),
        Node::Mul(a, b) => {
            if let Some(c) = constant(a, var) {
                invert(b, var, &(target / c))
            } else {
                invert(a, var, &(target / constant(b, var)?))
            }
        }
        Node::Div(a, b) => {
            if let Some(c) = constant(b, var) {
                invert(a, var, &(target * c))
            } else {
                invert(b, var, &(constant(a, var)? / target))
            }
        }
        Node::Pow(a, b) => {
            let n = constant(b, var)?;
            invert(a, var, &target.powf(1.0 / n))
        }
        Node::Call(f, args) if args.len() == 1 => {
            let y = target;
            let inner = match f {
                Func::Exp => y.ln(),
                Func::Ln => y.exp(),
                Func::Sqrt => y.powf(2.0),
                // asinh y = ln(y + √(y² + 1)), atanh y = ln((1 + y)/(1 − y))/2
                Func::Sinh => (y + (y.powf(2.0) + 1.0).sqrt()).ln(),
                Func::Tanh => ((1.0 + y) / (1.0 - y)).ln() / 2.0,
                _ => return None,
            };
            invert(&args[0], var, &inner)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn check(src: &str, lo: f64, hi: f64) {
        let e = parse(src).unwrap().simplify();
        let anti =
            antiderivative(&e, "x", &|_| true).unwrap_or_else(|| panic!("no rule for {src}"));
        let back = anti.diff("x").unwrap();
        let b = SampleBox::new(&[("x", lo, hi)]);
        assert!(
            num_equal(&back, &e, &b, 32, 1e-11).unwrap(),
            "{src}: {anti}"
        );
    }

    #[test]
    fn table_rules_differentiate_back() {
        for (src, lo, hi) in [
            ("3", 0.5, 2.0),
            ("x^3 - 2*x", 0.5, 2.0),
            ("1/(2*x + 1)", 0.5, 2.0),
            ("(3*x - 1)^(-2)", 0.5, 2.0),
            ("exp(2*x)", -1.0, 1.0),
            ("cosh(x)^2", -1.0, 1.0),
            ("sinh(3*x)^2", -1.0, 1.0),
            ("cos(x/2)^2 + sin(x)^2", -1.0, 1.0),
            ("cosh(x)^(-2)", -1.0, 1.0),
            ("cos(x)^(-2)", -1.0, 1.0),
            ("sinh(x) + cosh(2*x) + sin(x) + cos(x)", -1.0, 1.0),
        ] {
            check(src, lo, hi);
        }
    }

    #[test]
    fn inverses() {
        for (src, lo, hi) in [
            ("exp(x) - 1", -1.0, 1.0),
            ("2*x + 3", -1.0, 1.0),
            ("sinh(2*x)", -1.0, 1.0),
            ("x^3/3", 0.5, 2.0),
        ] {
            let e = parse(src).unwrap();
            let inv = invert(&e, "x", &Expr::sym("y")).unwrap();
            let comp = inv.substitute("y", &e);
            let b = SampleBox::new(&[("x", lo, hi)]);
            assert!(
                num_equal(&comp, &Expr::sym("x"), &b, 16, 1e-12).unwrap(),
                "{src}"
            );
        }
        assert!(invert(&parse("x + sin(x)").unwrap(), "x", &Expr::sym("y")).is_none());
    }
}
