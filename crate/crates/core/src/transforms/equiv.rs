use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::{Assumptions, Expr, Sign};
use crate::model::{
    AsEvolution, DoubleImagedEquation, Equation, EquivParams, ImagedEquation, Interval, InverseMap,
    PointTransformation, RDEquation, Validate,
};

use super::antideriv::{antiderivative, invert};
use super::evolve::{matches_target, transform_evolution};
use super::{Result, TransformError, CHECK_POINTS, MATCH_TOL, ODE_TOL};

/// Which equivalence group to act with. The quadratic variants add the shift
/// of the dependent variable that exists only for m = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivGroup {
    /// t̃ = δ1t + δ2, x̃ = φ(x), ũ = δ3u.
    Usual,
    /// As `Usual` but ũ = ψ(x)u with (gψ_x/ψ²)_x = 0.
    Generalized,
    GeneralizedQuadratic,
    /// f = g subclass: t̃ = δ1²t + δ2, x̃ = δ1x + δ3, ũ = ψ(x)u.
    Gauged,
    GaugedQuadratic,
    /// t̃ = δ1²t + δ2, x̃ = δ1x + δ3, ṽ = δ4v.
    Imaged,
    /// ṽ = δ4v + χ(x) with χ'' = Hχ²/δ4 − Fχ.
    ImagedQuadratic,
    /// w̃ = δ4w.
    Double,
}

impl std::str::FromStr for EquivGroup {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<EquivGroup, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown group `{s}`"))
    }
}

struct Frame {
    t: Expr,
    x: Expr,
    t_inv: Expr,
    x_inv: Expr,
    domain: Interval,
}

fn num(v: f64) -> Expr {
    Expr::num(v)
}

fn nonzero(name: &str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(TransformError::Invalid(format!(
            "{name} must be finite and nonzero"
        )));
    }
    Ok(())
}

fn eval_at(e: &Expr, x: f64) -> Result<f64> {
    Ok(e.eval(&crate::expr::Point::from_pairs(&[("x", x)]))?)
}

/// t̃ = a t + b with x̃ = φ(x) and its symbolic inverse.
fn frame(a: f64, b: f64, phi: &Expr, domain: Interval) -> Result<Frame> {
    nonzero("the time scale", a)?;
    let t = Expr::sym("t");
    let phi = phi.simplify();
    let x_inv = if phi == Expr::sym("x") {
        Expr::sym("x")
    } else {
        invert(&phi, "x", &Expr::sym("x"))
            .ok_or_else(|| TransformError::NoInverse(format!("φ = {phi}")))?
            .simplify()
    };
    let (lo, hi) = (eval_at(&phi, domain.lo)?, eval_at(&phi, domain.hi)?);
    Ok(Frame {
        t: (a * &t + b).simplify(),
        x: phi,
        t_inv: ((t - b) / a).simplify(),
        x_inv,
        domain: Interval::new(lo.min(hi), lo.max(hi)),
    })
}

fn affine_frame(d1: f64, d2: f64, d3: f64, domain: Interval) -> Result<Frame> {
    nonzero("δ1", d1)?;
    frame(d1 * d1, d2, &(d1 * Expr::sym("x") + d3), domain)
}

/// max |lhs − rhs|/max(1, |lhs|, |rhs|) over the domain samples.
fn ode_check(what: &str, lhs: &Expr, rhs: &Expr, domain: Interval) -> Result<()> {
    let mut worst = 0.0f64;
    let mut seen = 0;
    for p in domain.points(CHECK_POINTS) {
        let (Ok(l), Ok(r)) = (lhs.eval(&p), rhs.eval(&p)) else {
            continue;
        };
        if !(l.is_finite() && r.is_finite()) {
            continue;
        }
        seen += 1;
        worst = worst.max((l - r).abs() / 1f64.max(l.abs()).max(r.abs()));
    }
    if seen == 0 {
        return Err(TransformError::Precondition(format!(
            "{what} cannot be evaluated on the domain"
        )));
    }
    if worst > ODE_TOL {
        return Err(TransformError::Residual {
            what: what.into(),
            residual: worst,
            tol: ODE_TOL,
        });
    }
    Ok(())
}

/// ψ from the parameters, or (δ4 + δ5∫dx/g)^{-1}.
fn psi_of(params: &EquivParams, g: &Expr, asm: &Assumptions) -> Result<Expr> {
    if let Some(psi) = &params.psi {
        return Ok(psi.clone());
    }
    let [_, _, _, _, d4, d5] = params.delta;
    if d5 == 0.0 {
        nonzero("δ4", d4)?;
        return Ok(num(1.0 / d4));
    }
    let positive = |e: &Expr| asm.sign_of(e) == Some(Sign::Positive);
    let integral =
        antiderivative(&(1.0 / g).simplify_with(asm), "x", &positive).ok_or_else(|| {
            TransformError::Precondition("∫dx/g has no closed form; pass ψ explicitly".into())
        })?;
    Ok((1.0 / (d4 + d5 * integral)).simplify_with(asm))
}

/// K = (gψ_x/ψ²)_x.
fn psi_kernel(g: &Expr, psi: &Expr, asm: &Assumptions) -> Result<Expr> {
    Ok((g * psi.diff_with("x", asm)? / psi.powf(2.0))
        .diff_with("x", asm)?
        .simplify_with(asm))
}

/// Checks the defining equation of ψ and returns χ (zero outside m = 2).
fn psi_and_chi(
    g: &Expr,
    h: &Expr,
    psi: &Expr,
    quadratic: bool,
    domain: Interval,
    asm: &Assumptions,
) -> Result<Expr> {
    if domain.sign_of(psi).is_none() {
        return Err(TransformError::Precondition(
            "ψ vanishes on the domain".into(),
        ));
    }
    let k = psi_kernel(g, psi, asm)?;
    if !quadratic {
        ode_check("ψ equation", &k, &Expr::zero(), domain)?;
        return Ok(Expr::zero());
    }
    let inner = (psi.powf(2.0) / (2.0 * h) * &k).diff_with("x", asm)?;
    let lhs = (g / psi.powf(2.0) * inner).diff_with("x", asm)?;
    let rhs = psi / (4.0 * h) * k.powf(2.0);
    ode_check("ψ equation", &lhs, &rhs, domain)?;
    Ok((-(psi.powf(2.0)) / (2.0 * h) * k).simplify_with(asm))
}

/// Applies an element of the chosen group. The result is re-derived by the
/// generic change of variables and must agree with the group law.
pub fn apply_equiv(
    eq: &Equation,
    params: &EquivParams,
    group: EquivGroup,
) -> Result<(Equation, PointTransformation)> {
    let v = eq.validate();
    if !v.is_empty() {
        return Err(TransformError::Invalid(
            v.iter().map(|v| v.0.clone()).collect::<Vec<_>>().join("; "),
        ));
    }
    let [d0, d1, d2, d3, d4, _] = params.delta;
    nonzero("δ0", d0)?;
    let domain = eq.domain();
    let asm = Assumptions::on(domain.sample_box());
    let x = Expr::sym("x");
    let quadratic = matches!(
        group,
        EquivGroup::GeneralizedQuadratic
            | EquivGroup::GaugedQuadratic
            | EquivGroup::ImagedQuadratic
    );
    if quadratic && eq.m() != 2.0 {
        return Err(TransformError::Precondition(format!(
            "this group needs m = 2, got m = {}",
            eq.m()
        )));
    }

    let (fr, factor, shift, law): (Frame, Expr, Expr, BTreeMap<String, Expr>) = match (group, eq) {
        (
            EquivGroup::Usual | EquivGroup::Generalized | EquivGroup::GeneralizedQuadratic,
            Equation::Initial(e),
        ) => {
            let phi = params.phi.clone().unwrap_or_else(|| x.clone());
            let phi_x = phi.diff_with("x", &asm)?;
            if domain.sign_of(&phi_x).is_none() {
                return Err(TransformError::NonMonotone);
            }
            let fr = frame(d1, d2, &phi, domain)?;
            let (psi, chi) = if group == EquivGroup::Usual {
                nonzero("δ3", d3)?;
                (num(d3), Expr::zero())
            } else {
                let psi = psi_of(params, &e.g, &asm)?;
                let chi = psi_and_chi(&e.g, &e.h, &psi, quadratic, domain, &asm)?;
                (psi, chi)
            };
            // The usual group scales f and g by 1/δ3 and h by 1/δ3^m; with a
            // function ψ the equation is also divided through by ψ.
            let (lin, nonlin) = if group == EquivGroup::Usual {
                (psi.clone(), psi.powf(e.m))
            } else {
                (psi.powf(2.0), psi.powf(e.m + 1.0))
            };
            let law = BTreeMap::from([
                ("f".to_string(), d0 * d1 * &e.f / (&phi_x * &lin)),
                ("g".to_string(), d0 * &phi_x * &e.g / &lin),
                ("h".to_string(), d0 * &e.h / (&phi_x * nonlin)),
            ]);
            (fr, psi, chi, law)
        }
        (EquivGroup::Gauged | EquivGroup::GaugedQuadratic, Equation::Initial(e)) => {
            if e.f != e.g
                && !crate::expr::num_equal(&e.f, &e.g, &domain.sample_box(), CHECK_POINTS, 1e-12)?
            {
                return Err(TransformError::Precondition(
                    "this group acts on the f = g subclass".into(),
                ));
            }
            let fr = affine_frame(d1, d2, d3, domain)?;
            let psi = psi_of(params, &e.f, &asm)?;
            let chi = psi_and_chi(&e.f, &e.h, &psi, quadratic, domain, &asm)?;
            let f_new = d0 * d1 * &e.f / psi.powf(2.0);
            let law = BTreeMap::from([
                ("f".to_string(), f_new.clone()),
                ("g".to_string(), f_new),
                ("h".to_string(), d0 * &e.h / (d1 * psi.powf(e.m + 1.0))),
            ]);
            (fr, psi, chi, law)
        }
        (EquivGroup::Imaged | EquivGroup::ImagedQuadratic, Equation::Imaged(e)) => {
            nonzero("δ4", d4)?;
            let fr = affine_frame(d1, d2, d3, domain)?;
            let chi = if quadratic {
                params.chi.clone().unwrap_or_else(Expr::zero)
            } else {
                Expr::zero()
            };
            if !chi.is_zero() {
                let lhs = chi.diff_with("x", &asm)?.diff_with("x", &asm)?;
                let rhs = &e.H * chi.powf(2.0) / d4 - &e.F * &chi;
                ode_check("χ equation", &lhs, &rhs, domain)?;
            }
            let s = d1 * d1;
            let law = BTreeMap::from([
                ("F".to_string(), &e.F / s - 2.0 * &e.H * &chi / (s * d4)),
                ("H".to_string(), &e.H / (s * d4.powf(e.m - 1.0))),
            ]);
            (fr, num(d4), chi, law)
        }
        (EquivGroup::Double, Equation::Double(e)) => {
            nonzero("δ4", d4)?;
            let fr = affine_frame(d1, d2, d3, domain)?;
            let s = d1 * d1;
            let law = BTreeMap::from([
                ("G".to_string(), d4 * &e.G / s),
                ("H".to_string(), &e.H / (s * d4)),
            ]);
            (fr, num(d4), Expr::zero(), law)
        }
        (g, e) => {
            return Err(TransformError::Precondition(format!(
                "group {g:?} does not act on the {:?} class",
                e.class()
            )));
        }
    };

    let law: BTreeMap<String, Expr> = law
        .into_iter()
        .map(|(k, v)| (k, v.simplify_with(&asm)))
        .collect();
    let map = PointTransformation {
        t: fr.t.clone(),
        x: fr.x.clone(),
        factor: factor.simplify_with(&asm),
        shift: shift.simplify_with(&asm),
        inverse: Some(InverseMap {
            t: fr.t_inv.clone(),
            x: fr.x_inv.clone(),
        }),
        law,
    };
    let nasm = Assumptions::on(fr.domain.sample_box());
    let back = |k: &str| map.law[k].substitute("x", &fr.x_inv).simplify_with(&nasm);
    let image = match eq {
        Equation::Initial(e) => Equation::Initial(RDEquation::new(
            back("f"),
            back("g"),
            back("h"),
            e.m,
            fr.domain,
        )),
        Equation::Imaged(e) => {
            Equation::Imaged(ImagedEquation::new(back("F"), back("H"), e.m, fr.domain))
        }
        Equation::Double(_) => {
            Equation::Double(DoubleImagedEquation::new(back("H"), back("G"), fr.domain))
        }
    };

    let mapped = transform_evolution(&eq.evolution()?, &map)?;
    let dev = matches_target(&mapped, &image.evolution()?, &map, domain)?;
    if dev > MATCH_TOL {
        return Err(TransformError::Residual {
            what: "transformed equation".into(),
            residual: dev,
            tol: MATCH_TOL,
        });
    }
    Ok((image, map))
}
