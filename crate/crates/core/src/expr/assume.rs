use serde::{Deserialize, Serialize};

use super::{parse, Expr, ExprError, Func, Node, Result, SampleBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn of(v: f64) -> Option<Sign> {
        if v > 0.0 {
            Some(Sign::Positive)
        } else if v < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

/// Sign knowledge used by `diff` and `simplify`: explicit facts plus an
/// optional box on which signs may be read off by sampling.
#[derive(Debug, Clone, Default)]
pub struct Assumptions {
    facts: Vec<(Expr, Sign)>,
    domain: Option<SampleBox>,
}

const SIGN_SAMPLES: usize = 64;

impl Assumptions {
    pub fn new() -> Assumptions {
        Assumptions::default()
    }

    pub fn on(domain: SampleBox) -> Assumptions {
        Assumptions {
            facts: Vec::new(),
            domain: Some(domain),
        }
    }

    pub fn assume(mut self, e: Expr, s: Sign) -> Assumptions {
        self.facts.push((e, s));
        self
    }

    /// Parses facts such as "x>0" or "cosh(x)<0".
    pub fn assume_str(self, fact: &str) -> Result<Assumptions> {
        let (lhs, sign) = if let Some((l, r)) = fact.split_once('>') {
            if r.trim() != "0" {
                return Err(ExprError::Syntax {
                    offset: fact.len(),
                    msg: "expected `> 0`".into(),
                });
            }
            (l, Sign::Positive)
        } else if let Some((l, r)) = fact.split_once('<') {
            if r.trim() != "0" {
                return Err(ExprError::Syntax {
                    offset: fact.len(),
                    msg: "expected `< 0`".into(),
                });
            }
            (l, Sign::Negative)
        } else {
            return Err(ExprError::Syntax {
                offset: 0,
                msg: "expected `expr > 0` or `expr < 0`".into(),
            });
        };
        Ok(self.assume(parse(lhs)?, sign))
    }

    pub fn domain(&self) -> Option<&SampleBox> {
        self.domain.as_ref()
    }

    pub fn sign_of(&self, e: &Expr) -> Option<Sign> {
        if let Some(s) = self.fact(e) {
            return Some(s);
        }
        if let Some(s) = self.structural(e) {
            return Some(s);
        }
        self.sampled(e)
    }

    fn fact(&self, e: &Expr) -> Option<Sign> {
        for (f, s) in &self.facts {
            if f == e {
                return Some(*s);
            }
            if let Node::Neg(inner) = e.node() {
                if inner == f {
                    return Some(s.flip());
                }
            }
        }
        None
    }

    fn structural(&self, e: &Expr) -> Option<Sign> {
        match e.node() {
            Node::Num(v) => Sign::of(*v),
            Node::Sym(_) => None,
            Node::Neg(a) => self.sign_of(a).map(Sign::flip),
            Node::Mul(a, b) | Node::Div(a, b) => Some(self.sign_of(a)?.times(self.sign_of(b)?)),
            Node::Add(a, b) => {
                let (x, y) = (self.sign_of(a)?, self.sign_of(b)?);
                (x == y).then_some(x)
            }
            Node::Sub(a, b) => {
                let (x, y) = (self.sign_of(a)?, self.sign_of(b)?.flip());
                (x == y).then_some(x)
            }
            Node::Pow(a, b) => match b.as_num() {
                Some(n) if n == n.round() && (n as i64) % 2 == 0 => {
                    // Even powers are positive wherever the base is nonzero.
                    Some(Sign::Positive)
                }
                Some(n) if n == n.round() => self.sign_of(a),
                _ => (self.sign_of(a)? == Sign::Positive).then_some(Sign::Positive),
            },
            Node::Call(f, args) => match f {
                Func::Exp | Func::Cosh | Func::Sqrt | Func::Abs => Some(Sign::Positive),
                Func::Sinh | Func::Tanh | Func::Erf | Func::Sign => self.sign_of(&args[0]),
                _ => None,
            },
        }
    }

    fn sampled(&self, e: &Expr) -> Option<Sign> {
        let domain = self.domain.as_ref()?;
        if e.symbols().is_empty() || !domain.covers(e) {
            return None;
        }
        let mut seen = None;
        for p in domain.points(SIGN_SAMPLES) {
            let s = Sign::of(e.eval(&p).ok()?)?;
            match seen {
                None => seen = Some(s),
                Some(prev) if prev != s => return None,
                _ => {}
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_signs() {
        let a = Assumptions::new();
        let s = |src: &str| a.sign_of(&parse(src).unwrap());
        assert_eq!(s("exp(x)*cosh(y)"), Some(Sign::Positive));
        assert_eq!(s("-x^2"), Some(Sign::Positive)); // parses as (-x)^2
        assert_eq!(s("-(x^2)"), Some(Sign::Negative));
        assert_eq!(s("x"), None);
    }

    #[test]
    fn facts_and_sampling() {
        let a = Assumptions::new().assume_str("x>0").unwrap();
        assert_eq!(a.sign_of(&parse("-x").unwrap()), Some(Sign::Negative));
        let b = Assumptions::on(SampleBox::new(&[("x", 0.1, 1.0)]));
        assert_eq!(b.sign_of(&parse("cos(x)").unwrap()), Some(Sign::Positive));
        assert_eq!(b.sign_of(&parse("x - 0.5").unwrap()), None);
    }
}
