// Recursive-descent parser for
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := atom ("^" factor)?
//   atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")" | "-" atom
// A "-" directly followed by a numeric literal yields a negative literal.

use super::{Expr, ExprError, Func, Node, Result};

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::new(Node::Add(lhs, rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::new(Node::Sub(lhs, rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = Expr::new(Node::Mul(lhs, rhs));
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = Expr::new(Node::Div(lhs, rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.factor()?;
            Ok(Expr::new(Node::Pow(base, exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                    let v = self.number()?;
                    return Ok(Expr::num(-v));
                }
                let inner = self.atom()?;
                Ok(Expr::new(Node::Neg(inner)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < s.len() && s[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            return Err(self.error("malformed number"));
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        let text = std::str::from_utf8(&s[start..p]).expect("ascii");
        text.parse::<f64>().map_err(|_| ExprError::Syntax {
            offset: start,
            msg: format!("malformed number `{text}`"),
        })
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            self.pos += 1;
            let mut args = vec![self.expr()?];
            while self.eat(b',') {
                args.push(self.expr()?);
            }
            if !self.eat(b')') {
                return Err(self.error("expected `)` or `,`"));
            }
            if args.len() != func.arity() {
                return Err(ExprError::Arity {
                    name: name.to_string(),
                    expected: func.arity(),
                    got: args.len(),
                });
            }
            return Ok(Expr::call(func, args));
        }
        if Func::from_name(name).is_some() {
            return Err(ExprError::Syntax {
                offset: start,
                msg: format!("function `{name}` used without arguments"),
            });
        }
        Ok(Expr::sym(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Expr {
        Expr::sym(s)
    }

    #[test]
    fn sum_of_power_and_exp() {
        let e = parse("x^2 + exp(x)").unwrap();
        let want = Expr::new(Node::Add(
            Expr::new(Node::Pow(sym("x"), Expr::num(2.0))),
            Expr::call1(Func::Exp, sym("x")),
        ));
        assert_eq!(e, want);
    }

    #[test]
    fn power_of_call() {
        let e = parse("cosh(x)^2").unwrap();
        assert_eq!(
            e,
            Expr::new(Node::Pow(Expr::call1(Func::Cosh, sym("x")), Expr::num(2.0)))
        );
    }

    #[test]
    fn whittaker_has_three_children() {
        let e = parse("whitM(-1/4,1/4,p*x^2)").unwrap();
        match e.node() {
            Node::Call(Func::WhitM, args) => {
                assert_eq!(args.len(), 3);
                assert_eq!(
                    args[0],
                    Expr::new(Node::Div(Expr::num(-1.0), Expr::num(4.0)))
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("a^b^c").unwrap();
        let want = Expr::new(Node::Pow(
            sym("a"),
            Expr::new(Node::Pow(sym("b"), sym("c"))),
        ));
        assert_eq!(e, want);
    }

    #[test]
    fn unary_minus_binds_to_atom() {
        // "-" atom sits below "^" in the grammar.
        let e = parse("-x^2").unwrap();
        let want = Expr::new(Node::Pow(Expr::new(Node::Neg(sym("x"))), Expr::num(2.0)));
        assert_eq!(e, want);
    }

    #[test]
    fn left_associative_minus() {
        let e = parse("a-b-c").unwrap();
        let want = Expr::new(Node::Sub(
            Expr::new(Node::Sub(sym("a"), sym("b"))),
            sym("c"),
        ));
        assert_eq!(e, want);
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::num(1.5e-3));
        assert_eq!(parse(".25").unwrap(), Expr::num(0.25));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("x + * y") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse("foo(x)") {
            Err(ExprError::UnknownFunction { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("sn(x)"), Err(ExprError::Arity { .. })));
        assert!(matches!(parse("(x"), Err(ExprError::Syntax { .. })));
        assert!(matches!(
            parse("x y"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(parse("exp + 1"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse(""), Err(ExprError::Syntax { .. })));
    }
}
