// Rule-based simplifier: bottom-up rewriting iterated to a fixed point.
// Sums become coefficient-collected term lists, products become a numeric
// coefficient times (base, numeric exponent) factors with exp() arguments merged.

use super::build;
use super::eval::{apply, EvalOptions};
use super::{Assumptions, Expr, Func, Node, Sign};

const MAX_PASSES: usize = 32;

pub(super) fn simplify(e: &Expr, asm: &Assumptions) -> Expr {
    let mut cur = e.clone();
    for _ in 0..MAX_PASSES {
        let next = pass(&cur, asm);
        if next == cur {
            return next;
        }
        cur = next;
    }
    cur
}

fn pass(e: &Expr, asm: &Assumptions) -> Expr {
    let rebuilt = match e.node() {
        Node::Num(_) | Node::Sym(_) => return e.clone(),
        Node::Neg(a) => Expr::new(Node::Neg(pass(a, asm))),
        Node::Add(a, b) => Expr::new(Node::Add(pass(a, asm), pass(b, asm))),
        Node::Sub(a, b) => Expr::new(Node::Sub(pass(a, asm), pass(b, asm))),
        Node::Mul(a, b) => Expr::new(Node::Mul(pass(a, asm), pass(b, asm))),
        Node::Div(a, b) => Expr::new(Node::Div(pass(a, asm), pass(b, asm))),
        Node::Pow(a, b) => Expr::new(Node::Pow(pass(a, asm), pass(b, asm))),
        Node::Call(f, args) => {
            Expr::new(Node::Call(*f, args.iter().map(|a| pass(a, asm)).collect()))
        }
    };
    rewrite(&rebuilt, asm)
}

fn rewrite(e: &Expr, asm: &Assumptions) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(..) | Node::Sub(..) => sum_normal(e, asm),
        Node::Neg(a) if matches!(a.node(), Node::Add(..) | Node::Sub(..)) => sum_normal(e, asm),
        Node::Neg(_) | Node::Mul(..) | Node::Div(..) => Product::of(e, asm).build(),
        Node::Pow(_, b) if b.as_num().is_some() => Product::of(e, asm).build(),
        Node::Pow(a, b) => {
            if a.is_one() {
                return Expr::one();
            }
            if let Node::Call(Func::Exp, inner) = a.node() {
                return build::mul(inner[0].clone(), b.clone()).exp();
            }
            e.clone()
        }
        Node::Call(f, args) => call_rules(*f, args, e, asm),
    }
}

fn is_integer(k: f64) -> bool {
    k == k.round() && k.abs() < 1e15
}

fn is_even(k: f64) -> bool {
    is_integer(k) && (k / 2.0) == (k / 2.0).round()
}

/// Numeric coefficient times ordered (base, exponent) factors; exp() arguments
/// are kept apart and merged into a single exponential when rebuilt.
struct Product<'a> {
    coef: f64,
    factors: Vec<(Expr, f64)>,
    exps: Vec<Expr>,
    exp_slot: Option<usize>,
    asm: &'a Assumptions,
}

impl<'a> Product<'a> {
    fn of(e: &Expr, asm: &'a Assumptions) -> Product<'a> {
        let mut p = Product {
            coef: 1.0,
            factors: Vec::new(),
            exps: Vec::new(),
            exp_slot: None,
            asm,
        };
        p.collect(e, 1.0);
        p.merge();
        p
    }

    fn push(&mut self, base: Expr, k: f64) {
        if let Some(slot) = self.factors.iter_mut().find(|(b, _)| *b == base) {
            slot.1 = snap(slot.1 + k, slot.1.abs().max(k.abs()));
        } else {
            self.factors.push((base, k));
        }
    }

    fn collect(&mut self, e: &Expr, k: f64) {
        match e.node() {
            Node::Num(v) => {
                let c = v.powf(k);
                if c.is_finite() && (*v > 0.0 || is_integer(k)) {
                    self.coef *= c;
                } else {
                    self.push(e.clone(), k);
                }
            }
            Node::Neg(a) if is_integer(k) => {
                if !is_even(k) {
                    self.coef = -self.coef;
                }
                self.collect(a, k);
            }
            Node::Mul(a, b) if is_integer(k) => {
                self.collect(a, k);
                self.collect(b, k);
            }
            Node::Div(a, b) if is_integer(k) => {
                self.collect(a, k);
                self.collect(b, -k);
            }
            Node::Pow(a, b) if b.as_num().is_some() => {
                let n = b.as_num().unwrap_or(1.0);
                // (a^n)^k = a^(nk) whenever k is an integer, or when a > 0.
                if is_integer(k) || self.asm.sign_of(a) == Some(Sign::Positive) {
                    self.collect_power(a, n * k);
                } else {
                    self.push(e.clone(), k);
                }
            }
            Node::Call(Func::Exp, args) => {
                if self.exp_slot.is_none() {
                    self.exp_slot = Some(self.factors.len());
                }
                self.exps.push(build::mul(Expr::num(k), args[0].clone()));
            }
            Node::Call(Func::Sqrt, args) if is_even(k) => self.collect(&args[0], k / 2.0),
            Node::Call(Func::Abs, args) if is_even(k) => self.collect(&args[0], k),
            _ => self.push(e.clone(), k),
        }
    }

    // a^m where m may be fractional; only sign-safe decompositions are applied.
    fn collect_power(&mut self, a: &Expr, m: f64) {
        if is_integer(m) {
            self.collect(a, m);
            return;
        }
        match a.node() {
            Node::Num(v) if *v > 0.0 => self.coef *= v.powf(m),
            Node::Call(Func::Exp, _) => self.collect(a, m),
            Node::Pow(b, n)
                if n.as_num().is_some() && self.asm.sign_of(b) == Some(Sign::Positive) =>
            {
                self.collect_power(b, m * n.as_num().unwrap_or(1.0))
            }
            _ => self.push(a.clone(), m),
        }
    }

    fn merge(&mut self) {
        if !self.exps.is_empty() {
            let sum = self
                .exps
                .iter()
                .cloned()
                .reduce(build::add)
                .unwrap_or_else(Expr::zero);
            let arg = sum_normal(&sum, self.asm);
            match arg.as_num() {
                Some(v) if v.exp().is_finite() => self.coef *= v.exp(),
                _ => {
                    let at = self.exp_slot.unwrap_or(0).min(self.factors.len());
                    self.factors.insert(at, (arg.exp(), 1.0));
                }
            }
            self.exps.clear();
        }
        self.factors.retain(|(_, k)| *k != 0.0);
    }

    fn build_with(&self, coef: f64) -> Expr {
        if coef == 0.0 {
            return Expr::zero();
        }
        let power = |b: &Expr, k: f64| {
            if k == 1.0 {
                b.clone()
            } else {
                Expr::new(Node::Pow(b.clone(), Expr::num(k)))
            }
        };
        let chain =
            |it: &mut dyn Iterator<Item = Expr>| it.reduce(|a, b| Expr::new(Node::Mul(a, b)));
        let num = chain(
            &mut self
                .factors
                .iter()
                .filter(|(_, k)| *k > 0.0)
                .map(|(b, k)| power(b, *k)),
        );
        let den = chain(
            &mut self
                .factors
                .iter()
                .filter(|(_, k)| *k < 0.0)
                .map(|(b, k)| power(b, -*k)),
        );
        match (num, den) {
            (None, None) => Expr::num(coef),
            (None, Some(d)) => Expr::new(Node::Div(Expr::num(coef), d)),
            (Some(n), den) => {
                let body = match den {
                    Some(d) => Expr::new(Node::Div(n, d)),
                    None => n,
                };
                if coef == 1.0 {
                    body
                } else if coef == -1.0 {
                    Expr::new(Node::Neg(body))
                } else {
                    Expr::new(Node::Mul(Expr::num(coef), body))
                }
            }
        }
    }

    fn build(&self) -> Expr {
        self.build_with(self.coef)
    }
}

/// Rounds a float sum to zero when it is pure cancellation error relative to
/// the largest contribution, so that e.g. 2q/(1−m) − (q + 3q/(1−m)) is 0.
fn snap(v: f64, scale: f64) -> f64 {
    if v.abs() <= 8.0 * f64::EPSILON * scale {
        0.0
    } else {
        v
    }
}

/// Like terms of a sum, with the largest contribution to each coefficient.
#[derive(Default)]
struct Terms {
    constant: (f64, f64),
    terms: Vec<(Expr, f64)>,
    scales: Vec<f64>,
}

impl Terms {
    fn finish(&mut self) {
        self.constant.0 = snap(self.constant.0, self.constant.1);
        for ((_, c), s) in self.terms.iter_mut().zip(&self.scales) {
            *c = snap(*c, *s);
        }
    }
}

fn collect_terms(e: &Expr, s: f64, asm: &Assumptions, acc: &mut Terms) {
    match e.node() {
        Node::Add(a, b) => {
            collect_terms(a, s, asm, acc);
            collect_terms(b, s, asm, acc);
        }
        Node::Sub(a, b) => {
            collect_terms(a, s, asm, acc);
            collect_terms(b, -s, asm, acc);
        }
        Node::Neg(a) => collect_terms(a, -s, asm, acc),
        Node::Num(v) => {
            acc.constant.0 += s * v;
            acc.constant.1 = acc.constant.1.max(v.abs());
        }
        _ => {
            let p = Product::of(e, asm);
            if p.factors.is_empty() {
                acc.constant.0 += s * p.coef;
                acc.constant.1 = acc.constant.1.max(p.coef.abs());
                return;
            }
            let key = p.build_with(1.0);
            let c = s * p.coef;
            if let Some(i) = acc.terms.iter().position(|(k, _)| *k == key) {
                acc.terms[i].1 += c;
                acc.scales[i] = acc.scales[i].max(c.abs());
            } else {
                acc.terms.push((key, c));
                acc.scales.push(c.abs());
            }
        }
    }
}

fn square_of(e: &Expr, f: Func) -> Option<&Expr> {
    if let Node::Pow(b, k) = e.node() {
        if k.as_num() == Some(2.0) {
            if let Node::Call(g, args) = b.node() {
                if *g == f {
                    return Some(&args[0]);
                }
            }
        }
    }
    None
}

// sin²u + cos²u = 1 and cosh²u − sinh²u = 1, applied to the overlapping coefficient.
fn pythagorean(terms: &mut [(Expr, f64)], constant: &mut f64) {
    for (first, second, same_sign) in [
        (Func::Sin, Func::Cos, true),
        (Func::Cosh, Func::Sinh, false),
    ] {
        for i in 0..terms.len() {
            let Some(u) = square_of(&terms[i].0, first).cloned() else {
                continue;
            };
            for j in 0..terms.len() {
                if square_of(&terms[j].0, second) != Some(&u) {
                    continue;
                }
                let (c, d) = (terms[i].1, terms[j].1);
                let d_eff = if same_sign { d } else { -d };
                if c == 0.0 || d_eff == 0.0 || c.signum() != d_eff.signum() {
                    continue;
                }
                let k = c.signum() * c.abs().min(d_eff.abs());
                *constant += k;
                terms[i].1 -= k;
                terms[j].1 -= if same_sign { k } else { -k };
            }
        }
    }
}

fn sum_normal(e: &Expr, asm: &Assumptions) -> Expr {
    let mut acc = Terms::default();
    collect_terms(e, 1.0, asm, &mut acc);
    acc.finish();
    let (mut constant, mut terms) = (acc.constant.0, acc.terms);
    pythagorean(&mut terms, &mut constant);
    let mut out: Option<Expr> = None;
    for (key, c) in terms.into_iter().filter(|(_, c)| *c != 0.0) {
        let p = Product::of(&key, asm);
        out = Some(match out {
            None => p.build_with(p.coef * c),
            Some(acc) if c > 0.0 => Expr::new(Node::Add(acc, p.build_with(p.coef * c))),
            Some(acc) => Expr::new(Node::Sub(acc, p.build_with(-p.coef * c))),
        });
    }
    match out {
        None => Expr::num(constant),
        Some(acc) if constant > 0.0 => Expr::new(Node::Add(acc, Expr::num(constant))),
        Some(acc) if constant < 0.0 => Expr::new(Node::Sub(acc, Expr::num(-constant))),
        Some(acc) => acc,
    }
}

fn call_rules(f: Func, args: &[Expr], e: &Expr, asm: &Assumptions) -> Expr {
    let nums: Vec<f64> = args.iter().filter_map(Expr::as_num).collect();
    if nums.len() == args.len() {
        if let Ok(v) = apply(f, &nums, &EvalOptions::default()) {
            return Expr::num(v);
        }
    }
    let a = &args[0];
    let inner_call = |g: Func| match a.node() {
        Node::Call(h, inner) if *h == g => Some(inner[0].clone()),
        _ => None,
    };
    let negated = match a.node() {
        Node::Neg(inner) => Some(inner.clone()),
        _ => None,
    };
    match f {
        Func::Exp => match inner_call(Func::Ln) {
            Some(x) if asm.sign_of(&x) == Some(Sign::Positive) => x,
            _ => e.clone(),
        },
        Func::Ln => inner_call(Func::Exp).unwrap_or_else(|| e.clone()),
        Func::Sqrt => {
            if let Some(x) = inner_call(Func::Exp) {
                return build::mul(Expr::num(0.5), x).exp();
            }
            if let Node::Pow(b, k) = a.node() {
                if k.as_num() == Some(2.0) {
                    return b.abs();
                }
            }
            e.clone()
        }
        Func::Abs => {
            if let Some(x) = negated {
                return x.abs();
            }
            if let Some(x) = inner_call(Func::Abs) {
                return x.abs();
            }
            match asm.sign_of(a) {
                Some(Sign::Positive) => a.clone(),
                Some(Sign::Negative) => build::neg(a.clone()),
                None => e.clone(),
            }
        }
        Func::Sign => match asm.sign_of(a) {
            Some(s) => Expr::num(s.value()),
            None => e.clone(),
        },
        Func::Cos | Func::Cosh => match negated {
            Some(x) => Expr::call1(f, x),
            None => e.clone(),
        },
        Func::Sin | Func::Sinh | Func::Tan | Func::Tanh | Func::Erf => match negated {
            Some(x) => build::neg(Expr::call1(f, x)),
            None => e.clone(),
        },
        _ => e.clone(),
    }
}
