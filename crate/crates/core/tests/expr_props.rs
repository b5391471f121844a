use proptest::prelude::*;
use rdsym_core::expr::{num_equal, num_equal_report, parse, Expr, Func, Node, Point, SampleBox};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i32..=4).prop_map(|v| Expr::num(v as f64 / 2.0)),
        Just(Expr::sym("x")),
        Just(Expr::sym("y")),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::new(Node::Neg(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Add(a, b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Sub(a, b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Mul(a, b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Div(a, b))),
            (inner.clone(), 0u32..4)
                .prop_map(|(a, n)| Expr::new(Node::Pow(a, Expr::num(n as f64)))),
            inner.clone().prop_map(|a| Expr::call1(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call1(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::call1(Func::Tanh, a)),
            inner
                .clone()
                .prop_map(|a| Expr::call1(Func::Cosh, Expr::call1(Func::Sin, a))),
            inner
                .clone()
                .prop_map(|a| Expr::call1(Func::Exp, Expr::call1(Func::Cos, a))),
        ]
    })
}

fn xy_box() -> SampleBox {
    SampleBox::new(&[("x", -2.0, 2.0), ("y", 0.3, 1.7)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(e in tree()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, e, "{}", printed);
    }

    #[test]
    fn simplify_preserves_values(e in tree()) {
        let s = e.simplify();
        if let Ok(dev) = num_equal_report(&e, &s, &xy_box(), 50) {
            prop_assert!(dev.max <= 1e-12, "{} -> {} deviates by {}", e, s, dev.max);
        }
    }

    #[test]
    fn simplify_is_idempotent(e in tree()) {
        let once = e.simplify();
        prop_assert_eq!(once.simplify(), once);
    }

    #[test]
    fn derivative_matches_central_difference(e in tree()) {
        let de = e.diff("x").unwrap();
        let h = 1e-5;
        for p in xy_box().points(32) {
            let x = p.get("x").unwrap();
            let (Ok(d), Ok(fp), Ok(fm)) = (de.eval(&p), e.eval(&p.clone().with("x", x + h)), e.eval(&p.clone().with("x", x - h))) else { continue };
            let fd = (fp - fm) / (2.0 * h);
            // Skip points where the function varies too wildly for a 1e-5 step to resolve.
            let curvature = (fp - 2.0 * e.eval(&p).unwrap_or(f64::NAN) + fm).abs() / (h * h);
            if !(curvature < 1e3) { continue; }
            prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()), "{} at {:?}: {} vs {}", e, p, d, fd);
        }
    }

    #[test]
    fn substitution_commutes_with_renaming(e in tree()) {
        // Renaming x→a then substituting a:=t+1 equals substituting x:=t+1 directly.
        let r = parse("t + 1").unwrap();
        let via_rename = e.substitute("x", &Expr::sym("a")).substitute("a", &r);
        prop_assert_eq!(via_rename, e.substitute("x", &r));
    }

    #[test]
    fn substitute_then_eval_is_composition(e in tree(), t in -1.0f64..1.0, y in 0.3f64..1.7) {
        let r = parse("t^2 - 0.5").unwrap();
        let composed = e.substitute("x", &r);
        let inner = t * t - 0.5;
        let p = Point::from_pairs(&[("t", t), ("y", y)]);
        let q = Point::from_pairs(&[("x", inner), ("y", y)]);
        match (composed.eval(&p), e.eval(&q)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs())),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}

fn fd_check(src: &str, lo: f64, hi: f64) {
    let e = parse(src).unwrap();
    let de = e.diff("x").unwrap();
    let b = SampleBox::new(&[("x", lo, hi)]);
    let h = 1e-5;
    let mut checked = 0;
    for p in b.points(32) {
        let x = p.get("x").unwrap();
        let Ok(d) = de.eval(&p) else { continue };
        let fd = (e.eval(&p.clone().with("x", x + h)).unwrap()
            - e.eval(&p.clone().with("x", x - h)).unwrap())
            / (2.0 * h);
        assert!(
            (d - fd).abs() <= 1e-6 * (1.0 + d.abs()),
            "{src} at x={x}: {d} vs {fd}"
        );
        checked += 1;
    }
    assert!(checked >= 28, "{src}");
}

#[test]
fn every_node_kind_matches_finite_differences() {
    for (src, lo, hi) in [
        ("3*x - x/2 + x^3", -2.0, 2.0),
        ("x^x", 0.5, 2.0),
        ("2^x", -1.0, 1.0),
        ("exp(-x^2)", -2.0, 2.0),
        ("ln(x)", 0.2, 3.0),
        ("sqrt(x)", 0.2, 3.0),
        ("sin(x) + cos(2*x) + tan(x/2)", -1.0, 1.0),
        ("sinh(x) + cosh(x) + tanh(x)", -2.0, 2.0),
        ("erf(x)", -3.0, 3.0),
        ("whitM(-0.3, 0.4, x)", 0.2, 6.0),
        ("whitM(0.25, 0.25, x^2)", 0.5, 2.0),
        ("sn(x, 0.6)", -3.0, 3.0),
        ("cn(x, 0.6)", -3.0, 3.0),
        ("dn(x, 0.6)", -3.0, 3.0),
        ("ds(x, 0.6)", 0.3, 2.5),
        ("sd(x, 0.6)", -3.0, 3.0),
    ] {
        fd_check(src, lo, hi);
    }
}

#[test]
fn abs_and_sign_differentiate_under_declared_sign() {
    use rdsym_core::expr::Assumptions;
    let asm = Assumptions::new().assume_str("x - 3 < 0").unwrap();
    let e = parse("abs(x - 3)*sign(x - 3)").unwrap();
    let d = e.diff_with("x", &asm).unwrap();
    let b = SampleBox::new(&[("x", 0.0, 2.0)]);
    assert!(num_equal(&d, &Expr::one(), &b, 16, 1e-12).unwrap());
}
