use super::*;
use crate::expr::parse;
use crate::model::EquivParams;
use crate::tables::params;
use crate::transforms::{apply_equiv, EquivGroup};

fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

fn imaged(f: &str, h: &str, m: f64, d: (f64, f64)) -> ImagedEquation {
    ImagedEquation::new(e(f), e(h), m, Interval::new(d.0, d.1))
}

fn close(a: Option<f64>, b: f64) -> bool {
    a.is_some_and(|a| (a - b).abs() <= 1e-7 * b.abs().max(1.0))
}

#[test]
fn exponential_row_two() {
    let r = classify_imaged(&imaged("-0.25", "exp(x)", 3.0, (0.5, 3.0))).unwrap();
    assert_eq!(r.case.to_string(), "T1/2");
    assert!(close(r.param("q"), 1.0));
    assert_eq!(r.basis.len(), 3);
}

#[test]
fn power_row_three() {
    let r = classify_imaged(&imaged("x^(-2)", "x^3", 2.0, (0.5, 2.0))).unwrap();
    assert_eq!(r.case.to_string(), "T1/3");
    assert!(close(r.param("k"), 3.0));
    assert!(close(r.param("a2"), 1.0));
    assert_eq!(r.basis.len(), 2);
    // 2t∂t + x∂x + ((k+2)/(1−m))v∂v with k = 3, m = 2
    let b = Interval::new(0.5, 2.0)
        .sample_box()
        .with("t", 0.1, 1.0)
        .with("u", 0.5, 2.0);
    assert!(num_equal(&r.basis[1].eta, &e("-5*u"), &b, 16, 1e-12).unwrap());
}

#[test]
fn nothing_matches() {
    let r = classify_imaged(&imaged("0", "1 + x^2", 3.0, (0.5, 2.0))).unwrap();
    assert!(r.case.is_kernel());
    assert_eq!(r.basis, vec![VectorField::dt()]);
}

#[test]
fn double_examples() {
    let d = DoubleImagedEquation::new(e("exp(x)"), e("exp(-x)/4"), Interval::new(0.5, 3.0));
    let r = classify_double_imaged(&d).unwrap();
    assert_eq!(r.case.to_string(), "T2/2");
    assert_eq!(r.basis.len(), 3);

    let d = DoubleImagedEquation::new(e("x"), e("-7*x^(-5)"), Interval::new(0.5, 2.0));
    let r = classify_double_imaged(&d).unwrap();
    assert_eq!(r.case.to_string(), "T2/3");
    assert!(close(r.param("k"), 1.0));
    assert!(close(r.param("b2"), -7.0));

    let d = DoubleImagedEquation::new(e("1 + x^2"), e("x"), Interval::new(0.5, 2.0));
    assert!(classify_double_imaged(&d).unwrap().case.is_kernel());
}

#[test]
fn delta_is_reported_not_forced() {
    let r = classify_imaged(&imaged("-0.25", "-3*exp(x)", 3.0, (0.5, 3.0))).unwrap();
    assert!(close(r.param("delta"), -3.0));
    assert!(r.notes.iter().any(|n| n.contains("normalizes to -1")));
}

#[test]
fn shifted_gaussian_rows() {
    // Row 6 with p = 0.5, m = 3, x0 = −0.2.
    let p = params(&[("delta", 2.0), ("p", 0.5), ("x0", -0.2)]);
    let (f, h) = tables::imaged_template("6", 3.0, &p).unwrap();
    let r = classify_imaged(&ImagedEquation::new(f, h, 3.0, Interval::new(0.5, 2.0))).unwrap();
    assert_eq!(r.case.to_string(), "T1/6");
    assert!(close(r.param("x0"), -0.2));
    assert!(close(r.param("p"), 0.5));
    assert_eq!(r.basis.len(), 3);
}

#[test]
fn power_left_of_pole_is_mirrored() {
    let r = classify_imaged(&imaged("2*(-x)^(-2)", "(-x)^1.5", 3.0, (-2.0, -0.5))).unwrap();
    assert_eq!(r.case.to_string(), "T1/3");
    assert!(close(r.param("k"), 1.5));
    // Dilation about the pole in the original x: ξ = x.
    let b = Interval::new(-2.0, -0.5)
        .sample_box()
        .with("t", 0.1, 1.0)
        .with("u", 0.5, 2.0);
    assert!(num_equal(&r.basis[1].xi, &e("x"), &b, 16, 1e-12).unwrap());
}

#[test]
fn m2_power_pair_upgrades_to_row_two() {
    // F = −12/x², H = 1 has G = 0 in the double image.
    let r = classify_imaged(&imaged("-12*x^(-2)", "1", 2.0, (0.5, 2.0))).unwrap();
    assert_eq!(r.case.to_string(), "T1/2");
    assert_eq!(r.basis.len(), 3);
}

#[test]
fn m2_row_five_boundary_is_row_six() {
    let p = params(&[("delta", 1.0), ("p", 0.3), ("a3", 5.0)]);
    let (f, h) = tables::imaged_template("5", 2.0, &p).unwrap();
    let r = classify_imaged(&ImagedEquation::new(f, h, 2.0, Interval::new(0.5, 2.0))).unwrap();
    assert_eq!(r.case.to_string(), "T1/6");
}

#[test]
fn initial_examples() {
    let d = Interval::new(0.5, 3.0);
    let r = classify_initial(&RDEquation::gauged(e("1"), e("exp(x)"), 3.0, d)).unwrap();
    assert_eq!(r.case.to_string(), "T3/1.1");
    assert_eq!(r.basis.len(), 2);

    let r = classify_initial(&RDEquation::gauged(e("exp(x)"), e("exp(x)"), 3.0, d)).unwrap();
    assert_eq!(r.case.to_string(), "T3/2.2");
    assert_eq!(r.basis.len(), 3);
    // 2t∂t + (x − t)∂x + (2/(1−m))u∂u
    let b = d.sample_box().with("t", 0.1, 1.0).with("u", 0.5, 2.0);
    assert!(num_equal(&r.basis[2].xi, &e("x - t"), &b, 16, 1e-12).unwrap());
    assert!(num_equal(&r.basis[2].eta, &e("-u"), &b, 16, 1e-12).unwrap());
}

#[test]
fn excluded_power_pair_is_two_one() {
    let d = Interval::new(0.5, 3.0);
    let r = classify_initial(&RDEquation::gauged(e("x^2"), e("x^4"), 3.0, d)).unwrap();
    assert_eq!(r.case.to_string(), "T3/2.1");
    assert!(r.notes.iter().any(|n| n.contains("exclusion")));
    for (l, g) in [(8.0, 12.0), (-6.0, -9.0), (2.0, 3.0)] {
        let eq = RDEquation::gauged(
            e(&format!("x^{l}")).simplify(),
            e(&format!("x^{g}")).simplify(),
            2.0,
            d,
        );
        assert_eq!(classify_initial(&eq).unwrap().case.to_string(), "T3/2.1");
    }
}

#[test]
fn generic_power_pair_is_three_one() {
    let d = Interval::new(0.5, 3.0);
    let r = classify_initial(&RDEquation::gauged(e("x^3"), e("x^2"), 3.0, d)).unwrap();
    assert_eq!(r.case.to_string(), "T3/3.1");
    assert!(close(r.param("lambda"), 3.0));
    assert!(close(r.param("gamma"), 2.0));
}

#[test]
fn unequal_f_g_is_rejected_directly_and_gauged_by_dispatch() {
    let eq = RDEquation::new(
        e("exp(x)"),
        e("exp(-x)"),
        e("exp(x)"),
        3.0,
        Interval::new(0.5, 2.0),
    );
    assert!(classify_initial(&eq).is_err());
    let r = classify(&Equation::Initial(eq)).unwrap();
    assert_eq!(r.case.table, Table::T3);
}

#[test]
fn invariance_under_imaged_group() {
    let p = params(&[("delta", 1.0), ("k", 1.5), ("a2", 0.7)]);
    let (f, h) = tables::imaged_template("3", 3.0, &p).unwrap();
    let eq = Equation::Imaged(ImagedEquation::new(f, h, 3.0, Interval::new(0.5, 2.0)));
    for (d1, d3, d4) in [(2.0, 0.3, 1.5), (-1.0, 0.0, 0.7), (0.5, -3.0, 2.0)] {
        let g = EquivParams::scalars([1.0, d1, 0.0, d3, d4, 0.0]);
        let (img, _) = apply_equiv(&eq, &g, EquivGroup::Imaged).unwrap();
        assert_eq!(
            classify(&img).unwrap().case.to_string(),
            "T1/3",
            "δ1 = {d1}"
        );
    }
}

fn form(k: f64, kappa: f64, p: f64, q: f64, nu: f64, s2: f64, s1: f64, s0: f64) -> AdmissibleForm {
    AdmissibleForm {
        k,
        kappa,
        delta: 1.0,
        nu,
        p,
        q,
        s2,
        s1,
        s0,
    }
}

#[test]
fn admissible_examples() {
    let c = |f: AdmissibleForm| classify_admissible(&f, 3.0).unwrap();
    assert_eq!(
        c(form(0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0)),
        AdmissibleClass::E1
    );
    assert_eq!(
        c(form(0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, -1.0)),
        AdmissibleClass::E4
    );
    assert_eq!(
        c(form(0.0, 0.0, 0.0, 2.0, 0.0, 5.0, 0.0, 0.0)),
        AdmissibleClass::Trivial
    );
    // p = 1, k = 1, m = 3: K0 = s0 + (q² + 12)/4 − 1 vanishes for q = 2ν = 1, s0 = −9/4.
    assert_eq!(
        c(form(1.0, 0.0, 1.0, 1.0, 0.5, -1.0, -1.0, -2.25)),
        AdmissibleClass::E3
    );
    assert_eq!(
        c(form(1.0, 0.0, 1.0, 1.0, 0.4, -1.0, -1.0, -2.25)),
        AdmissibleClass::Trivial
    );
    assert_eq!(
        c(form(0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0)),
        AdmissibleClass::E2
    );
    assert!(classify_admissible(&form(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0), 2.0).is_err());
    assert_eq!(AdmissibleClass::E3.case_id().to_string(), "adm/E3");
}
