// Printer whose output parses back to the identical tree.

use std::fmt::{self, Write};

use super::{Expr, Node};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn leading_minus(e: &Expr) -> bool {
    match e.node() {
        Node::Num(v) => v.is_sign_negative(),
        Node::Neg(_) => true,
        _ => false,
    }
}

fn child(e: &Expr, min: u8, right: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(e) < min || (right && leading_minus(e)) {
        f.write_char('(')?;
        write_expr(e, f)?;
        f.write_char(')')
    } else {
        write_expr(e, f)
    }
}

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Num(v) => write!(f, "{v}"),
        Node::Sym(s) => f.write_str(s),
        Node::Neg(a) => {
            f.write_char('-')?;
            match a.node() {
                Node::Sym(_) | Node::Call(..) => write_expr(a, f),
                _ => {
                    f.write_char('(')?;
                    write_expr(a, f)?;
                    f.write_char(')')
                }
            }
        }
        Node::Add(a, b) => {
            child(a, SUM, false, f)?;
            f.write_str(" + ")?;
            child(b, PRODUCT, true, f)
        }
        Node::Sub(a, b) => {
            child(a, SUM, false, f)?;
            f.write_str(" - ")?;
            child(b, PRODUCT, true, f)
        }
        Node::Mul(a, b) => {
            child(a, PRODUCT, false, f)?;
            f.write_char('*')?;
            child(b, POWER, true, f)
        }
        Node::Div(a, b) => {
            child(a, PRODUCT, false, f)?;
            f.write_char('/')?;
            child(b, POWER, true, f)
        }
        Node::Pow(a, b) => {
            child(a, ATOM, true, f)?;
            f.write_char('^')?;
            child(b, POWER, true, f)
        }
        Node::Call(func, args) => {
            f.write_str(func.name())?;
            f.write_char('(')?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(a, f)?;
            }
            f.write_char(')')
        }
    }
}
