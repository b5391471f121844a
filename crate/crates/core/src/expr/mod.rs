//! Immutable expression trees over real-valued functions of named variables.

mod assume;
mod build;
mod diff;
mod eval;
mod parse;
mod print;
mod sample;
mod simplify;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use assume::{Assumptions, Sign};
pub use eval::{EvalOptions, Point, Scaled};
pub use parse::parse;
pub use sample::{
    default_seed, halton, num_equal, num_equal_report, set_default_seed, Deviation, Range,
    SampleBox,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sign of `{0}` is not known; declare it before differentiating")]
    UnknownSign(String),
    #[error("cannot differentiate: {0}")]
    NotDifferentiable(String),
    #[error("no sample point could be evaluated")]
    NoValidPoints,
}

pub type Result<T> = std::result::Result<T, ExprError>;

/// Function heads. The list is closed: it is exactly the reserved names of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sign,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Erf,
    /// whitM(κ, μ, z)
    WhitM,
    /// Jacobi functions take (z, k).
    Sn,
    Cn,
    Dn,
    Ds,
    Sd,
}

impl Func {
    pub const ALL: [Func; 18] = [
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
        Func::Sign,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Erf,
        Func::WhitM,
        Func::Sn,
        Func::Cn,
        Func::Dn,
        Func::Ds,
        Func::Sd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Erf => "erf",
            Func::WhitM => "whitM",
            Func::Sn => "sn",
            Func::Cn => "cn",
            Func::Dn => "dn",
            Func::Ds => "ds",
            Func::Sd => "sd",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::WhitM => 3,
            Func::Sn | Func::Cn | Func::Dn | Func::Ds | Func::Sd => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    /// Variables and parameters share one node kind; which names are which is
    /// decided by the caller at evaluation time.
    Sym(Arc<str>),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn new(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(v: f64) -> Expr {
        // No negative zero, so that printing and structural equality agree.
        Expr::new(Node::Num(if v == 0.0 { 0.0 } else { v }))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::new(Node::Sym(Arc::from(name)))
    }

    pub fn zero() -> Expr {
        Expr::num(0.0)
    }

    pub fn one() -> Expr {
        Expr::num(1.0)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self.node() {
            Node::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_num() == Some(1.0)
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        debug_assert_eq!(args.len(), f.arity());
        Expr::new(Node::Call(f, args))
    }

    pub fn call1(f: Func, a: Expr) -> Expr {
        Expr::call(f, vec![a])
    }

    pub fn pow(&self, e: impl Into<Expr>) -> Expr {
        build::pow(self.clone(), e.into())
    }

    pub fn powf(&self, e: f64) -> Expr {
        build::pow(self.clone(), Expr::num(e))
    }

    pub fn exp(&self) -> Expr {
        Expr::call1(Func::Exp, self.clone())
    }
    pub fn ln(&self) -> Expr {
        Expr::call1(Func::Ln, self.clone())
    }
    pub fn sqrt(&self) -> Expr {
        Expr::call1(Func::Sqrt, self.clone())
    }
    pub fn abs(&self) -> Expr {
        Expr::call1(Func::Abs, self.clone())
    }
    pub fn sign(&self) -> Expr {
        Expr::call1(Func::Sign, self.clone())
    }
    pub fn sin(&self) -> Expr {
        Expr::call1(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Expr {
        Expr::call1(Func::Cos, self.clone())
    }
    pub fn tan(&self) -> Expr {
        Expr::call1(Func::Tan, self.clone())
    }
    pub fn sinh(&self) -> Expr {
        Expr::call1(Func::Sinh, self.clone())
    }
    pub fn cosh(&self) -> Expr {
        Expr::call1(Func::Cosh, self.clone())
    }
    pub fn tanh(&self) -> Expr {
        Expr::call1(Func::Tanh, self.clone())
    }

    /// Free symbols, sorted.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.to_string());
            }
            Node::Neg(a) => a.collect_symbols(out),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Node::Call(_, args) => args.iter().for_each(|a| a.collect_symbols(out)),
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(s) => &**s == var,
            Node::Neg(a) => a.depends_on(var),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.depends_on(var) || b.depends_on(var),
            Node::Call(_, args) => args.iter().any(|a| a.depends_on(var)),
        }
    }

    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => 1,
            Node::Neg(a) => 1 + a.size(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => 1 + a.size() + b.size(),
            Node::Call(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
        }
    }

    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        self.substitute_all(&[(var, replacement.clone())])
    }

    /// Simultaneous substitution: replacements are not themselves rewritten.
    pub fn substitute_all(&self, subs: &[(&str, Expr)]) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(s) => subs
                .iter()
                .find(|(name, _)| *name == &**s)
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| self.clone()),
            Node::Neg(a) => Expr::new(Node::Neg(a.substitute_all(subs))),
            Node::Add(a, b) => Expr::new(Node::Add(a.substitute_all(subs), b.substitute_all(subs))),
            Node::Sub(a, b) => Expr::new(Node::Sub(a.substitute_all(subs), b.substitute_all(subs))),
            Node::Mul(a, b) => Expr::new(Node::Mul(a.substitute_all(subs), b.substitute_all(subs))),
            Node::Div(a, b) => Expr::new(Node::Div(a.substitute_all(subs), b.substitute_all(subs))),
            Node::Pow(a, b) => Expr::new(Node::Pow(a.substitute_all(subs), b.substitute_all(subs))),
            Node::Call(f, args) => Expr::new(Node::Call(
                *f,
                args.iter().map(|a| a.substitute_all(subs)).collect(),
            )),
        }
    }

    /// Binds numeric values for the named symbols.
    pub fn bind(&self, values: &[(&str, f64)]) -> Expr {
        let subs: Vec<(&str, Expr)> = values.iter().map(|(n, v)| (*n, Expr::num(*v))).collect();
        self.substitute_all(&subs)
    }

    pub fn diff(&self, var: &str) -> Result<Expr> {
        diff::diff(self, var, &Assumptions::default())
    }

    pub fn diff_with(&self, var: &str, assumptions: &Assumptions) -> Result<Expr> {
        diff::diff(self, var, assumptions)
    }

    pub fn simplify(&self) -> Expr {
        simplify::simplify(self, &Assumptions::default())
    }

    pub fn simplify_with(&self, assumptions: &Assumptions) -> Expr {
        simplify::simplify(self, assumptions)
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        eval::eval(self, p, &EvalOptions::default())
    }

    pub fn eval_with(&self, p: &Point, opts: &EvalOptions) -> Result<f64> {
        eval::eval(self, p, opts)
    }

    /// Value together with the magnitude of its largest monomial.
    pub fn eval_scaled(&self, p: &Point) -> Result<Scaled> {
        eval::eval_scaled(self, p)
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Expr {
        Expr::num(v)
    }
}

impl From<&str> for Expr {
    fn from(name: &str) -> Expr {
        Expr::sym(name)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Expr, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $build:path) => {
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self, rhs)
            }
        }
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(self.clone(), rhs.clone())
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(self, rhs.clone())
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self.clone(), rhs)
            }
        }
        impl std::ops::$tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $build(self, Expr::num(rhs))
            }
        }
        impl std::ops::$tr<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $build(self.clone(), Expr::num(rhs))
            }
        }
        impl std::ops::$tr<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(Expr::num(self), rhs)
            }
        }
        impl std::ops::$tr<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(Expr::num(self), rhs.clone())
            }
        }
    };
}

// Operator overloads fold trivial zeros and ones; use `Node` directly for raw trees.
binop!(Add, add, build::add);
binop!(Sub, sub, build::sub);
binop!(Mul, mul, build::mul);
binop!(Div, div, build::div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        build::neg(self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        build::neg(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitute_is_simultaneous() {
        let e = parse("x + 2*y").unwrap();
        let swapped = e.substitute_all(&[("x", Expr::sym("y")), ("y", Expr::sym("x"))]);
        assert_eq!(swapped, parse("y + 2*x").unwrap());
    }

    #[test]
    fn substitute_example() {
        let e = parse("x^2").unwrap();
        let r = e.substitute("x", &parse("t+1").unwrap());
        assert_eq!(r.to_string(), "(t + 1)^2");
    }

    #[test]
    fn serde_round_trip() {
        let e = parse("whitM(-1/4, 1/4, p*x^2)").unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: Expr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn symbols_sorted() {
        let e = parse("b*x + a*sin(t)").unwrap();
        let v: Vec<_> = e.symbols().into_iter().collect();
        assert_eq!(v, ["a", "b", "t", "x"]);
    }
}
