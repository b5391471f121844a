use std::sync::Arc;

use super::{Expr, ExprError, Func, Node, Result};
use crate::special;

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Point {
    vars: Vec<(Arc<str>, f64)>,
}

impl Point {
    pub fn new() -> Point {
        Point::default()
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Point {
        let mut p = Point::new();
        for (n, v) in pairs {
            p.set(n, *v);
        }
        p
    }

    pub fn set(&mut self, name: &str, v: f64) {
        if let Some(slot) = self.vars.iter_mut().find(|(n, _)| &**n == name) {
            slot.1 = v;
        } else {
            self.vars.push((Arc::from(name), v));
        }
    }

    pub fn with(mut self, name: &str, v: f64) -> Point {
        self.set(name, v);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.vars
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.vars.iter().map(|(n, v)| (&**n, *v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// ds(z,k) is a domain error when |sn(z,k)| falls below this.
    pub ds_guard: f64,
    /// When set, every Jacobi call with |sn| below the threshold is a domain error.
    pub jacobi_guard: Option<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            ds_guard: special::DS_POLE_GUARD,
            jacobi_guard: None,
        }
    }
}

fn domain(msg: impl Into<String>) -> ExprError {
    ExprError::Domain(msg.into())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{what} is not finite")))
    }
}

pub(crate) fn real_pow(a: f64, b: f64) -> Result<f64> {
    if b == b.round() && b.abs() < 2f64.powi(31) {
        if a == 0.0 && b < 0.0 {
            return Err(domain("zero raised to a negative power"));
        }
        return finite(a.powi(b as i32), "power");
    }
    if a > 0.0 {
        finite(a.powf(b), "power")
    } else if a == 0.0 && b > 0.0 {
        Ok(0.0)
    } else {
        Err(domain(format!(
            "noninteger power {b} of nonpositive base {a}"
        )))
    }
}

pub(crate) fn apply(func: Func, args: &[f64], opts: &EvalOptions) -> Result<f64> {
    let a = args[0];
    let v = match func {
        Func::Exp => a.exp(),
        Func::Ln => {
            if a <= 0.0 {
                return Err(domain(format!("ln of nonpositive {a}")));
            }
            a.ln()
        }
        Func::Sqrt => {
            if a < 0.0 {
                return Err(domain(format!("sqrt of negative {a}")));
            }
            a.sqrt()
        }
        Func::Abs => a.abs(),
        Func::Sign => {
            if a > 0.0 {
                1.0
            } else if a < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
        Func::Sin => a.sin(),
        Func::Cos => a.cos(),
        Func::Tan => a.tan(),
        Func::Sinh => a.sinh(),
        Func::Cosh => a.cosh(),
        Func::Tanh => a.tanh(),
        Func::Erf => special::erf(a),
        Func::WhitM => {
            special::whittaker_m(args[0], args[1], args[2]).map_err(|e| domain(e.to_string()))?
        }
        Func::Sn | Func::Cn | Func::Dn | Func::Ds | Func::Sd => {
            let j = special::jacobi(args[0], args[1]).map_err(|e| domain(e.to_string()))?;
            if let Some(g) = opts.jacobi_guard {
                if j.sn.abs() < g {
                    return Err(domain("near a zero of sn"));
                }
            }
            match func {
                Func::Sn => j.sn,
                Func::Cn => j.cn,
                Func::Dn => j.dn,
                Func::Ds => {
                    if j.sn.abs() < opts.ds_guard {
                        return Err(domain("pole of ds"));
                    }
                    j.dn / j.sn
                }
                _ => j.sn / j.dn,
            }
        }
    };
    finite(v, func.name())
}

pub(super) fn eval(e: &Expr, p: &Point, opts: &EvalOptions) -> Result<f64> {
    match e.node() {
        Node::Num(v) => Ok(*v),
        Node::Sym(s) => p.get(s).ok_or_else(|| ExprError::Unbound(s.to_string())),
        Node::Neg(a) => Ok(-eval(a, p, opts)?),
        Node::Add(a, b) => finite(eval(a, p, opts)? + eval(b, p, opts)?, "sum"),
        Node::Sub(a, b) => finite(eval(a, p, opts)? - eval(b, p, opts)?, "difference"),
        Node::Mul(a, b) => finite(eval(a, p, opts)? * eval(b, p, opts)?, "product"),
        Node::Div(a, b) => {
            let num = eval(a, p, opts)?;
            let den = eval(b, p, opts)?;
            if den == 0.0 {
                return Err(domain("division by zero"));
            }
            finite(num / den, "quotient")
        }
        Node::Pow(a, b) => real_pow(eval(a, p, opts)?, eval(b, p, opts)?),
        Node::Call(f, args) => {
            let mut vals = [0.0; 3];
            for (slot, a) in vals.iter_mut().zip(args) {
                *slot = eval(a, p, opts)?;
            }
            apply(*f, &vals[..args.len()], opts)
        }
    }
}

/// A value paired with the magnitude of the largest monomial that produced it.
/// Sums keep the largest operand scale, products multiply scales, function
/// calls are atomic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub scale: f64,
}

impl Scaled {
    fn atom(v: f64) -> Scaled {
        Scaled {
            value: v,
            scale: v.abs(),
        }
    }

    /// |value| / scale, with the scale floored at 1e-300.
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.scale.max(1e-300)
    }
}

pub(super) fn eval_scaled(e: &Expr, p: &Point) -> Result<Scaled> {
    let opts = EvalOptions::default();
    Ok(match e.node() {
        Node::Num(_) | Node::Sym(_) | Node::Call(..) => Scaled::atom(eval(e, p, &opts)?),
        Node::Neg(a) => {
            let s = eval_scaled(a, p)?;
            Scaled {
                value: -s.value,
                scale: s.scale,
            }
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            let x = eval_scaled(a, p)?;
            let y = eval_scaled(b, p)?;
            let v = if matches!(e.node(), Node::Add(..)) {
                x.value + y.value
            } else {
                x.value - y.value
            };
            Scaled {
                value: v,
                scale: x.scale.max(y.scale),
            }
        }
        Node::Mul(a, b) => {
            let x = eval_scaled(a, p)?;
            let y = eval_scaled(b, p)?;
            Scaled {
                value: x.value * y.value,
                scale: x.scale * y.scale,
            }
        }
        Node::Div(a, b) => {
            let x = eval_scaled(a, p)?;
            let den = eval(b, p, &opts)?;
            if den == 0.0 {
                return Err(domain("division by zero"));
            }
            Scaled {
                value: x.value / den,
                scale: x.scale / den.abs(),
            }
        }
        Node::Pow(a, b) => {
            let x = eval_scaled(a, p)?;
            let ex = eval(b, p, &opts)?;
            let v = real_pow(x.value, ex)?;
            if ex > 0.0 {
                Scaled {
                    value: v,
                    scale: x.scale.powf(ex).max(v.abs()),
                }
            } else {
                Scaled::atom(v)
            }
        }
    })
}
