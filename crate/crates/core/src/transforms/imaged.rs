use std::collections::BTreeMap;

use crate::expr::{Assumptions, Expr, Sign};
use crate::model::{
    DoubleImagedEquation, ImagedEquation, Interval, PointTransformation, RDEquation, Validate,
};
use crate::tables::{self, Params};

use super::{Result, TransformError, CHECK_POINTS, ODE_TOL};

fn invalid(v: Vec<crate::model::Violation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(TransformError::Invalid(
            v.iter().map(|v| v.0.clone()).collect::<Vec<_>>().join("; "),
        ))
    }
}

fn x_assumptions(domain: Interval) -> Assumptions {
    Assumptions::on(domain.sample_box())
}

fn require_gauged(eq: &RDEquation) -> Result<Sign> {
    invalid(eq.validate())?;
    if eq.f != eq.g
        && !crate::expr::num_equal(&eq.f, &eq.g, &eq.domain.sample_box(), CHECK_POINTS, 1e-12)?
    {
        return Err(TransformError::Precondition(
            "f and g differ; apply the f = g gauge first".into(),
        ));
    }
    eq.sign_f()
        .ok_or_else(|| TransformError::Precondition("f is not sign-constant on the domain".into()))
}

/// √|f| as an expression that is positive on the domain.
fn root_of(f: &Expr, s: Sign, asm: &Assumptions) -> Expr {
    (s.value() * f).sqrt().simplify_with(asm)
}

/// F = −(√|f|)_xx/√|f|, H = h·sign f/(√|f|)^{m+1}.
#[allow(non_snake_case)]
pub fn to_imaged(eq: &RDEquation) -> Result<ImagedEquation> {
    let s = require_gauged(eq)?;
    let asm = x_assumptions(eq.domain);
    let root = root_of(&eq.f, s, &asm);
    let rxx = root.diff_with("x", &asm)?.diff_with("x", &asm)?;
    let F = (-rxx / &root).simplify_with(&asm);
    let H = (s.value() * &eq.h / root.powf(eq.m + 1.0)).simplify_with(&asm);
    Ok(ImagedEquation::new(F, H, eq.m, eq.domain))
}

/// The map u ↦ v = √|f| u from a gauged equation to its image.
pub fn imaged_map(eq: &RDEquation) -> Result<PointTransformation> {
    let s = require_gauged(eq)?;
    let img = to_imaged(eq)?;
    let root = root_of(&eq.f, s, &x_assumptions(eq.domain));
    let mut map = PointTransformation::identity();
    map.factor = root;
    map.law = BTreeMap::from([("F".to_string(), img.F), ("H".to_string(), img.H)]);
    Ok(map)
}

/// G = −(F/(2H))_xx − F²/(4H) for m = 2.
#[allow(non_snake_case)]
pub fn to_double_imaged(eq: &ImagedEquation) -> Result<DoubleImagedEquation> {
    invalid(eq.validate())?;
    if eq.m != 2.0 {
        return Err(TransformError::Precondition(format!(
            "the double-imaged class needs m = 2, got m = {}",
            eq.m
        )));
    }
    let asm = x_assumptions(eq.domain);
    let ratio = (&eq.F / (2.0 * &eq.H)).simplify_with(&asm);
    let rxx = ratio.diff_with("x", &asm)?.diff_with("x", &asm)?;
    let G = (-rxx - eq.F.powf(2.0) / (4.0 * &eq.H)).simplify_with(&asm);
    Ok(DoubleImagedEquation::new(eq.H.clone(), G, eq.domain))
}

/// The map v ↦ w = v + F/(2H).
pub fn double_map(eq: &ImagedEquation) -> Result<PointTransformation> {
    let img = to_double_imaged(eq)?;
    let mut map = PointTransformation::identity();
    map.shift = (&eq.F / (2.0 * &eq.H)).simplify_with(&x_assumptions(eq.domain));
    map.law = BTreeMap::from([("H".to_string(), img.H), ("G".to_string(), img.G)]);
    Ok(map)
}

/// A gauged equation whose image is the given imaged-list row, together
/// with its initial-list subcase. The returned f is checked against
/// (√|f|)_xx + F√|f| = 0 on the domain.
pub fn imaged_preimage(
    row: &str,
    m: f64,
    params: &Params,
    domain: Interval,
) -> Result<(RDEquation, String)> {
    let pre = tables::initial_preimage(row, m, params, domain)?;
    #[allow(non_snake_case)]
    let (F, _) = tables::imaged_template(row, m, params)?;
    let asm = x_assumptions(domain);
    let rxx = pre.root.diff_with("x", &asm)?.diff_with("x", &asm)?;
    let b = domain.sample_box();
    let mut worst = 0.0f64;
    let mut seen = 0;
    for p in b.points(CHECK_POINTS) {
        let (Ok(a), Ok(c), Ok(r)) = (rxx.eval(&p), F.eval(&p), pre.root.eval(&p)) else {
            continue;
        };
        seen += 1;
        worst = worst.max((a + c * r).abs() / a.abs().max((c * r).abs()).max(1e-300).max(r.abs()));
    }
    if seen == 0 {
        return Err(TransformError::Precondition(
            "preimage cannot be evaluated on the domain".into(),
        ));
    }
    if worst > ODE_TOL {
        return Err(TransformError::Residual {
            what: "preimage ODE".into(),
            residual: worst,
            tol: ODE_TOL,
        });
    }
    let mut eq = RDEquation::gauged(pre.f, pre.h, m, domain);
    eq.f_sign = Some(Sign::Positive);
    eq.g_sign = Some(Sign::Positive);
    Ok((eq, pre.row))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{num_equal, parse};

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn cosh_example() {
        let eq = RDEquation::gauged(
            e("cosh(x)^2"),
            e("cosh(x)^4"),
            3.0,
            Interval::new(-1.0, 1.0),
        );
        let img = to_imaged(&eq).unwrap();
        assert_eq!(img.F.to_string(), "-1");
        assert_eq!(img.H.to_string(), "1");
    }

    #[test]
    fn exponential_example() {
        let eq = RDEquation::gauged(e("exp(x)"), e("exp(x)"), 3.0, Interval::new(0.5, 2.0));
        let img = to_imaged(&eq).unwrap();
        assert_eq!(img.F.as_num(), Some(-0.25));
        let b = eq.domain.sample_box();
        assert!(num_equal(&img.H, &e("exp(-x)"), &b, 32, 1e-12).unwrap());
    }

    #[test]
    fn trivial_and_sign_errors() {
        let eq = RDEquation::gauged(e("1"), e("1"), 3.0, Interval::new(0.5, 2.0));
        let img = to_imaged(&eq).unwrap();
        assert_eq!(
            (img.F.to_string(), img.H.to_string()),
            ("0".into(), "1".into())
        );
        let bad = RDEquation::gauged(e("x"), e("1"), 3.0, Interval::new(-1.0, 1.0));
        assert!(to_imaged(&bad).is_err());
    }

    #[test]
    fn double_image_of_power_row() {
        let img = ImagedEquation::new(e("2*x^(-2)"), e("1"), 2.0, Interval::new(0.5, 2.0));
        let d = to_double_imaged(&img).unwrap();
        assert!(num_equal(&d.G, &e("-7*x^(-4)"), &img.domain.sample_box(), 32, 1e-12).unwrap());
        let zero = to_double_imaged(&ImagedEquation::new(e("0"), e("1"), 2.0, img.domain)).unwrap();
        assert_eq!(zero.G.to_string(), "0");
        assert!(to_double_imaged(&ImagedEquation::new(e("0"), e("1"), 3.0, img.domain)).is_err());
    }

    #[test]
    fn negative_f_is_handled() {
        let eq = RDEquation::gauged(e("-exp(2*x)"), e("exp(x)"), 3.0, Interval::new(0.5, 2.0));
        let img = to_imaged(&eq).unwrap();
        let b = eq.domain.sample_box();
        assert!(num_equal(&img.F, &e("-1"), &b, 16, 1e-12).unwrap());
        assert!(num_equal(&img.H, &e("-exp(-3*x)"), &b, 16, 1e-12).unwrap());
    }

    #[test]
    fn whittaker_preimage_residual() {
        let p = tables::params(&[("delta", 1.0), ("p", 0.5), ("a3", 1.0)]);
        let (eq, row) = imaged_preimage("5", 3.0, &p, Interval::new(0.5, 3.0)).unwrap();
        assert_eq!(row, "5");
        let img = to_imaged(&eq).unwrap();
        let (f_t, h_t) = tables::imaged_template("5", 3.0, &p).unwrap();
        let b = eq.domain.sample_box();
        assert!(num_equal(&img.F, &f_t, &b, 32, 1e-9).unwrap());
        assert!(num_equal(&img.H, &h_t, &b, 32, 1e-9).unwrap());
    }
}
