use std::collections::BTreeMap;

use crate::expr::{num_equal, Assumptions, Expr, Point};
use crate::model::{Interval, InverseMap, PointTransformation, RDEquation, Validate};

use super::antideriv::{antiderivative, invert};
use super::spline::{simpson, MonotoneSpline};
use super::{Result, TransformError, CHECK_POINTS};

const SPLINE_KNOTS: usize = 257;

/// Outcome of the f = g gauge. The symbolic form is returned whenever the
/// antiderivative and its inverse are both in closed form.
#[derive(Debug, Clone)]
pub enum GaugeResult {
    Symbolic {
        equation: RDEquation,
        map: PointTransformation,
    },
    Numeric(NumericGauge),
}

/// Quadrature-based gauge: x' is integrated numerically and inverted with a
/// monotone spline, so the new coefficients are only available pointwise.
#[derive(Debug, Clone)]
pub struct NumericGauge {
    pub time_sign: f64,
    pub x0: f64,
    /// sign(g)|fg|^{1/2} and √|g/f|·h as functions of the old x.
    pub f_law: Expr,
    pub h_law: Expr,
    pub m: f64,
    pub domain: Interval,
    integrand: Expr,
    inverse: MonotoneSpline,
}

impl NumericGauge {
    pub fn x_new(&self, x: f64) -> Option<f64> {
        let i = |y: f64| {
            self.integrand
                .eval(&Point::from_pairs(&[("x", y)]))
                .unwrap_or(f64::NAN)
        };
        let v = simpson(&i, self.x0, x, 1e-13) + self.x0;
        v.is_finite().then_some(v)
    }

    pub fn x_old(&self, xp: f64) -> Option<f64> {
        self.inverse.eval(xp)
    }

    pub fn f_new(&self, xp: f64) -> Option<f64> {
        self.f_law
            .eval(&Point::from_pairs(&[("x", self.x_old(xp)?)]))
            .ok()
    }

    pub fn h_new(&self, xp: f64) -> Option<f64> {
        self.h_law
            .eval(&Point::from_pairs(&[("x", self.x_old(xp)?)]))
            .ok()
    }
}

impl GaugeResult {
    /// sign(fg), the factor multiplying t.
    pub fn time_sign(&self) -> f64 {
        match self {
            GaugeResult::Symbolic { map, .. } => {
                map.t.diff("t").ok().and_then(|e| e.as_num()).unwrap_or(1.0)
            }
            GaugeResult::Numeric(n) => n.time_sign,
        }
    }
}

/// t' = sign(fg)t, x' = ∫_{x0}^x √|f/g| dy + x0, u' = u.
pub fn gauge_fg(eq: &RDEquation, x0: f64) -> Result<GaugeResult> {
    let v = eq.validate();
    if !v.is_empty() {
        return Err(TransformError::Invalid(
            v.iter().map(|v| v.0.clone()).collect::<Vec<_>>().join("; "),
        ));
    }
    let sf = eq
        .sign_f()
        .ok_or_else(|| TransformError::Precondition("f changes sign".into()))?;
    let sg = eq
        .sign_g()
        .ok_or_else(|| TransformError::Precondition("g changes sign".into()))?;
    let dom = eq.domain;
    let b = dom.sample_box();
    if eq.f == eq.g || num_equal(&eq.f, &eq.g, &b, CHECK_POINTS, 1e-12)? {
        return Ok(GaugeResult::Symbolic {
            equation: eq.clone(),
            map: PointTransformation::identity(),
        });
    }
    let asm = Assumptions::on(b);
    let s = sf.times(sg).value();
    let integrand = (s * &eq.f / &eq.g).sqrt().simplify_with(&asm);
    let f_law = (sg.value() * (s * &eq.f * &eq.g).sqrt()).simplify_with(&asm);
    let h_law = ((s * &eq.g / &eq.f).sqrt() * &eq.h).simplify_with(&asm);
    let law = BTreeMap::from([
        ("f".to_string(), f_law.clone()),
        ("g".to_string(), f_law.clone()),
        ("h".to_string(), h_law.clone()),
    ]);
    let t_new = (s * Expr::sym("t")).simplify();

    let positive = |e: &Expr| asm.sign_of(e) == Some(crate::expr::Sign::Positive);
    if let Some(anti) = antiderivative(&integrand, "x", &positive) {
        let c = anti.eval(&Point::from_pairs(&[("x", x0)]))?;
        let x_new = (anti - c + x0).simplify();
        let (lo, hi) = (
            x_new.eval(&Point::from_pairs(&[("x", dom.lo)]))?,
            x_new.eval(&Point::from_pairs(&[("x", dom.hi)]))?,
        );
        if !(hi > lo) {
            return Err(TransformError::NonMonotone);
        }
        if let Some(x_inv) = invert(&x_new, "x", &Expr::sym("x")) {
            let x_inv = x_inv.simplify();
            let new_dom = Interval::new(lo, hi);
            let nasm = Assumptions::on(new_dom.sample_box());
            let back = |e: &Expr| e.substitute("x", &x_inv).simplify_with(&nasm);
            let mut equation =
                RDEquation::new(back(&f_law), back(&f_law), back(&h_law), eq.m, new_dom);
            equation.f_sign = Some(sg);
            equation.g_sign = Some(sg);
            let map = PointTransformation {
                t: t_new.clone(),
                x: x_new,
                factor: Expr::one(),
                shift: Expr::zero(),
                inverse: Some(InverseMap { t: t_new, x: x_inv }),
                law,
            };
            return Ok(GaugeResult::Symbolic { equation, map });
        }
    }

    // Quadrature on a uniform grid, then a monotone spline for the inverse.
    let i = |y: f64| {
        integrand
            .eval(&Point::from_pairs(&[("x", y)]))
            .unwrap_or(f64::NAN)
    };
    let xs: Vec<f64> = (0..SPLINE_KNOTS)
        .map(|k| dom.lo + (dom.hi - dom.lo) * k as f64 / (SPLINE_KNOTS - 1) as f64)
        .collect();
    let mut xp = Vec::with_capacity(SPLINE_KNOTS);
    let mut acc = simpson(&i, x0, dom.lo, 1e-13) + x0;
    xp.push(acc);
    for w in xs.windows(2) {
        acc += simpson(&i, w[0], w[1], 1e-14);
        xp.push(acc);
    }
    if xp.iter().any(|v| !v.is_finite()) {
        return Err(TransformError::Precondition(
            "√|f/g| is not integrable on the domain".into(),
        ));
    }
    let inverse = MonotoneSpline::new(xp.clone(), xs).ok_or(TransformError::NonMonotone)?;
    Ok(GaugeResult::Numeric(NumericGauge {
        time_sign: s,
        x0,
        f_law,
        h_law,
        m: eq.m,
        domain: Interval::new(xp[0], xp[SPLINE_KNOTS - 1]),
        integrand,
        inverse,
    }))
}
