// Smart constructors: fold numeric literals and the obvious zero/one cases only.

use super::{Expr, Node};

pub(crate) fn neg(a: Expr) -> Expr {
    match a.node() {
        Node::Num(v) => Expr::num(-v),
        Node::Neg(inner) => inner.clone(),
        _ => Expr::new(Node::Neg(a)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => Expr::num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        (_, Some(y)) if y < 0.0 => Expr::new(Node::Sub(a, Expr::num(-y))),
        _ => match b.node() {
            Node::Neg(inner) => Expr::new(Node::Sub(a, inner.clone())),
            _ => Expr::new(Node::Add(a, b)),
        },
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => Expr::num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => match b.node() {
            Node::Neg(inner) => Expr::new(Node::Add(a, inner.clone())),
            _ => Expr::new(Node::Sub(a, b)),
        },
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => Expr::num(x * y),
        (Some(x), _) if x == 0.0 => Expr::zero(),
        (_, Some(y)) if y == 0.0 => Expr::zero(),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        (None, Some(_)) => Expr::new(Node::Mul(b, a)),
        _ => Expr::new(Node::Mul(a, b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) if y != 0.0 => Expr::num(x / y),
        (Some(x), _) if x == 0.0 => Expr::zero(),
        (_, Some(y)) if y == 1.0 => a,
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Expr::new(Node::Div(a, b)),
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (a.as_num(), b.as_num()) {
        (_, Some(y)) if y == 0.0 => Expr::one(),
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == 1.0 => Expr::one(),
        (Some(x), Some(y)) => {
            let v = x.powf(y);
            if v.is_finite() {
                Expr::num(v)
            } else {
                Expr::new(Node::Pow(a, b))
            }
        }
        _ => Expr::new(Node::Pow(a, b)),
    }
}
