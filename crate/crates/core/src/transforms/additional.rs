use serde::{Deserialize, Serialize};

use crate::expr::{num_equal_report, Expr, Func, Point};
use crate::model::{
    AsEvolution, CaseId, DoubleImagedEquation, EqClass, Equation, Evolution, ImagedEquation,
    Interval, InverseMap, PointTransformation, RDEquation, Table,
};
use crate::tables::{self, alpha, beta, param, shifted_x, Params};

use super::evolve::{matches_target, transform_evolution, Mapped};
use super::{Result, TransformError, CHECK_POINTS, MATCH_TOL};

/// Additional equivalence transformations between rows of the same list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdditionalMap {
    /// Imaged row 1 to row 1 with q̃ = 0, ã1 = a1 + α².
    #[serde(rename = "imaged-1-1")]
    Imaged1To1,
    #[serde(rename = "imaged-2-2")]
    Imaged2To2,
    /// Imaged row 1 to row 1 with q̃ = √(q² + a1(m−1)²), ã1 = 0.
    #[serde(rename = "imaged-1-1-exp")]
    Imaged1To1Exp,
    #[serde(rename = "imaged-4-3")]
    Imaged4To3,
    /// Also accepts row 5, whose image has a 1/t̃ potential.
    #[serde(rename = "imaged-6-2")]
    Imaged6To2,
    #[serde(rename = "double-1-1")]
    Double1To1,
    #[serde(rename = "double-2-2")]
    Double2To2,
    #[serde(rename = "double-4-3")]
    Double4To3,
    /// Also accepts row 5, whose image has a 1/t̃² source term.
    #[serde(rename = "double-6-2")]
    Double6To2,
    #[serde(rename = "initial-1.2-1.1")]
    Initial12To11,
    #[serde(rename = "initial-1.3-1.1")]
    Initial13To11,
    #[serde(rename = "initial-1.3-1.3")]
    Initial13To13,
    #[serde(rename = "initial-2.2-2.1")]
    Initial22To21,
    #[serde(rename = "initial-4-3.1")]
    Initial4To31,
    #[serde(rename = "initial-4-3.2")]
    Initial4To32,
    #[serde(rename = "initial-6-2.1")]
    Initial6To21,
}

impl AdditionalMap {
    pub const ALL: [AdditionalMap; 16] = [
        AdditionalMap::Imaged1To1,
        AdditionalMap::Imaged2To2,
        AdditionalMap::Imaged1To1Exp,
        AdditionalMap::Imaged4To3,
        AdditionalMap::Imaged6To2,
        AdditionalMap::Double1To1,
        AdditionalMap::Double2To2,
        AdditionalMap::Double4To3,
        AdditionalMap::Double6To2,
        AdditionalMap::Initial12To11,
        AdditionalMap::Initial13To11,
        AdditionalMap::Initial13To13,
        AdditionalMap::Initial22To21,
        AdditionalMap::Initial4To31,
        AdditionalMap::Initial4To32,
        AdditionalMap::Initial6To21,
    ];

    pub fn class(self) -> EqClass {
        use AdditionalMap::*;
        match self {
            Imaged1To1 | Imaged2To2 | Imaged1To1Exp | Imaged4To3 | Imaged6To2 => EqClass::Imaged,
            Double1To1 | Double2To2 | Double4To3 | Double6To2 => EqClass::Double,
            _ => EqClass::Initial,
        }
    }

    /// Source rows accepted by the map.
    pub fn source_rows(self) -> &'static [&'static str] {
        use AdditionalMap::*;
        match self {
            Imaged1To1 | Imaged1To1Exp | Double1To1 => &["1"],
            Imaged2To2 | Double2To2 => &["2"],
            Imaged4To3 | Double4To3 | Initial4To31 | Initial4To32 => &["4"],
            Imaged6To2 | Double6To2 => &["6", "5"],
            Initial12To11 => &["1.2"],
            Initial13To11 | Initial13To13 => &["1.3"],
            Initial22To21 => &["2.2"],
            Initial6To21 => &["6"],
        }
    }

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }
}

impl std::str::FromStr for AdditionalMap {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<AdditionalMap, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown additional map `{s}`"))
    }
}

/// A verified additional equivalence transformation.
#[derive(Debug, Clone)]
pub struct Additional {
    pub map: PointTransformation,
    /// Transformed coefficients in the old variables.
    pub mapped: Mapped,
    /// Target row and its parameters; `None` when the image leaves the
    /// class because a coefficient depends on t̃.
    pub target_case: Option<(CaseId, Params)>,
    pub target: Option<Equation>,
    pub target_evolution: Evolution,
    pub deviation: f64,
}

enum Target {
    Row(&'static str, Params),
    /// Extra R term in the new variables added to a row.
    RowPlus(&'static str, Params, Expr),
}

struct Plan {
    map: PointTransformation,
    target: Target,
}

fn t() -> Expr {
    Expr::sym("t")
}

fn x() -> Expr {
    Expr::sym("x")
}

fn with(p: &Params, pairs: &[(&str, f64)]) -> Params {
    let mut out = Params::new();
    if let Some(d) = p.get("delta") {
        out.insert("delta".into(), *d);
    }
    out.extend(pairs.iter().map(|(k, v)| (k.to_string(), *v)));
    out
}

fn transformation(
    tt: Expr,
    xx: Expr,
    factor: Expr,
    shift: Expr,
    inverse: Option<(Expr, Expr)>,
) -> PointTransformation {
    PointTransformation {
        t: tt.simplify(),
        x: xx.simplify(),
        factor: factor.simplify(),
        shift: shift.simplify(),
        inverse: inverse.map(|(t, x)| InverseMap { t, x }),
        law: Default::default(),
    }
}

/// t̃ = T, x̃ = c(x + vt) with its inverse.
fn galilean(c: f64, v: f64) -> (Expr, Expr, (Expr, Expr)) {
    let tt = c * c * t();
    let xx = c * (x() + v * t());
    let inv = (t() / (c * c), x() / c - v * t() / (c * c));
    (tt, xx, inv)
}

/// t̃ = −e^{−2ct}/(2c), x̃ = e^{−ct}y with its inverse.
fn gaussian_frame(c: f64, x0: f64) -> (Expr, Expr, (Expr, Expr)) {
    let tt = -(-2.0 * c * t()).exp() / (2.0 * c);
    let xx = (-c * t()).exp() * shifted_x(x0);
    let s = -2.0 * c * t();
    let inv = (-s.ln() / (2.0 * c), x() * s.powf(-0.5) + x0);
    (tt, xx, inv)
}

fn whittaker(kappa: f64, mu: f64, z: Expr) -> Expr {
    Expr::call(Func::WhitM, vec![Expr::num(kappa), Expr::num(mu), z])
}

fn opt(p: &Params, k: &str) -> f64 {
    p.get(k).copied().unwrap_or(0.0)
}

fn plan(which: AdditionalMap, row: &'static str, m: f64, p: &Params) -> Result<Plan> {
    use AdditionalMap::*;
    let x0 = opt(p, "x0");
    let y = shifted_x(x0);
    let one = Expr::one;
    let zero = Expr::zero;
    Ok(match which {
        Imaged1To1 | Imaged2To2 => {
            let q = param(p, "q")?;
            let a = alpha(q, m);
            let (tt, xx, inv) = galilean(1.0, 2.0 * a);
            let target = if which == Imaged1To1 {
                Target::Row("1", with(p, &[("q", 0.0), ("a1", param(p, "a1")? + a * a)]))
            } else {
                Target::Row("2", with(p, &[("q", 0.0)]))
            };
            Plan {
                map: transformation(tt, xx, (-a * x()).exp(), zero(), Some(inv)),
                target,
            }
        }
        Imaged1To1Exp => {
            let (q, a1) = (param(p, "q")?, param(p, "a1")?);
            let disc = q * q + a1 * (m - 1.0).powi(2);
            if disc < 0.0 {
                return Err(TransformError::Precondition(
                    "needs q² + a1(m−1)² ≥ 0".into(),
                ));
            }
            let qt = disc.sqrt();
            let sigma = (q - qt) / (1.0 - m);
            let (tt, xx, inv) = galilean(1.0, 2.0 * sigma);
            let w = (-sigma * x() - (a1 + sigma * sigma) * t()).exp();
            Plan {
                map: transformation(tt, xx, w, zero(), Some(inv)),
                target: Target::Row("1", with(p, &[("q", qt), ("a1", 0.0)])),
            }
        }
        Imaged4To3 | Imaged6To2 => {
            let b = beta(param(p, "p")?, m);
            let k = if which == Imaged4To3 {
                param(p, "k")?
            } else {
                0.0
            };
            let (tt, xx, inv) = gaussian_frame(2.0 * b, x0);
            let w = (b / 2.0 * y.powf(2.0) + 2.0 * b * (k + 2.0) / (m - 1.0) * t()).exp();
            let target = match row {
                "4" => Target::Row("3", with(p, &[("k", k), ("a2", param(p, "a2")?)])),
                "6" => Target::Row("2", with(p, &[("q", 0.0)])),
                _ => {
                    let c = (5.0 - m) / (m - 1.0) + param(p, "a3")?;
                    Target::RowPlus(
                        "2",
                        with(p, &[("q", 0.0)]),
                        -c / (4.0 * t()) * Expr::sym("u"),
                    )
                }
            };
            Plan {
                map: transformation(tt, xx, w, zero(), Some(inv)),
                target,
            }
        }
        Double1To1 | Double2To2 => {
            let (q, delta) = (param(p, "q")?, param(p, "delta")?);
            let (tt, xx, inv) = galilean(1.0, -2.0 * q);
            let target = if which == Double1To1 {
                Target::Row(
                    "1",
                    with(
                        p,
                        &[
                            ("q", 0.0),
                            ("b1", param(p, "b1")? - q.powi(4) / (4.0 * delta)),
                        ],
                    ),
                )
            } else {
                Target::Row("2", with(p, &[("q", 0.0)]))
            };
            let map = transformation(
                tt,
                xx,
                (q * x()).exp(),
                Expr::num(q * q / (2.0 * delta)),
                Some(inv),
            );
            Plan { map, target }
        }
        Double4To3 | Double6To2 => {
            let (pp, delta) = (param(p, "p")?, param(p, "delta")?);
            let k = if which == Double4To3 {
                param(p, "k")?
            } else {
                0.0
            };
            let (tt, xx, inv) = gaussian_frame(4.0 * pp, x0);
            let e = (4.0 * pp * (k + 2.0) * t()).exp();
            let y2 = y.powf(2.0);
            let w = &e * (pp * &y2).exp();
            let z = e * pp * (2.0 * pp * &y2 + 2.0 * k + 3.0) / (delta * y.powf(k));
            let target = match row {
                "4" => Target::Row("3", with(p, &[("k", k), ("b2", param(p, "b2")?)])),
                "6" => Target::Row("2", with(p, &[("q", 0.0)])),
                _ => {
                    let c = (param(p, "b3")? + 11.0) / (64.0 * delta);
                    Target::RowPlus("2", with(p, &[("q", 0.0)]), c * t().powf(-2.0))
                }
            };
            Plan {
                map: transformation(tt, xx, w, z, Some(inv)),
                target,
            }
        }
        Initial12To11 => {
            let q = param(p, "q")?;
            let qt = (q * q + (m - 1.0).powi(2)).sqrt();
            let sigma = (q - qt) / (1.0 - m);
            let (tt, xx, inv) = galilean(qt, 2.0 * sigma);
            let w = qt.powf(2.0 / (1.0 - m))
                * (-sigma * x() - (1.0 + sigma * sigma) * t()).exp()
                * x().cos();
            Plan {
                map: transformation(tt, xx, w, zero(), Some(inv)),
                target: Target::Row("1.1", with(p, &[])),
            }
        }
        Initial13To11 | Initial13To13 => {
            let q = param(p, "r")? - (m + 1.0) / 2.0;
            let a = alpha(q, m);
            let map = if which == Initial13To11 {
                if 4.0 * a * a <= 1.0 {
                    return Err(TransformError::Precondition("needs 4α² > 1".into()));
                }
                let qt = (q * q - 0.25 * (m - 1.0).powi(2)).sqrt();
                let sigma = (q - qt) / (1.0 - m);
                let (tt, xx, inv) = galilean(qt, 2.0 * sigma);
                let w = qt.powf(2.0 / (1.0 - m))
                    * ((0.5 - sigma) * x() + (0.25 - sigma * sigma) * t()).exp();
                transformation(tt, xx, w, zero(), Some(inv))
            } else {
                if 4.0 * a * a >= 1.0 {
                    return Err(TransformError::Precondition("needs 4α² < 1".into()));
                }
                let nu = (1.0 - 4.0 * a * a).sqrt();
                let (tt, xx, inv) = galilean(nu, 2.0 * a);
                let w =
                    nu.powf(2.0 / (1.0 - m)) * ((0.5 - a - nu / 2.0) * x() - a * nu * t()).exp();
                transformation(tt, xx, w, zero(), Some(inv))
            };
            let target = if which == Initial13To11 {
                Target::Row("1.1", with(p, &[]))
            } else {
                Target::Row("1.3", with(p, &[("r", (m + 1.0) / 2.0)]))
            };
            Plan { map, target }
        }
        Initial22To21 => {
            let (tt, xx, inv) = galilean(1.0, 1.0);
            Plan {
                map: transformation(tt, xx, one(), zero(), Some(inv)),
                target: Target::Row("2.1", with(p, &[])),
            }
        }
        Initial4To31 => {
            let (s, a2) = (param(p, "s")?, param(p, "a2")?);
            if a2 > 0.25 {
                return Err(TransformError::Precondition("needs a2 ≤ 1/4".into()));
            }
            let b = beta(param(p, "p")?, m);
            let (k1, mu1) = ((s + 3.0) / (2.0 * (1.0 - m)), (1.0 - 4.0 * a2).sqrt() / 4.0);
            let (tt, xx, inv) = gaussian_frame(2.0 * b, x0);
            let f1 = whittaker(k1, mu1, b * y.powf(2.0));
            let w = (b / 2.0 * y.powf(2.0) + 2.0 * b * (1.0 + 2.0 * mu1 - 2.0 * k1) * t()).exp()
                * f1
                / y.powf(1.0 + 2.0 * mu1);
            let target = Target::Row(
                "3.1",
                with(
                    p,
                    &[
                        ("lambda", 1.0 + 4.0 * mu1),
                        ("gamma", s + (m + 1.0) * (1.0 + 2.0 * mu1)),
                    ],
                ),
            );
            Plan {
                map: transformation(tt, xx, w, zero(), Some(inv)),
                target,
            }
        }
        Initial4To32 => {
            return Err(TransformError::Precondition(
                "row 4 with a2 > 1/4 needs a Whittaker function of complex order; not supported"
                    .into(),
            ))
        }
        Initial6To21 => {
            let b = beta(param(p, "p")?, m);
            let (tt, xx, inv) = gaussian_frame(2.0 * b, x0);
            let f3 = whittaker((5.0 - m) / (4.0 * (1.0 - m)), 0.25, b * y.powf(2.0));
            let w = (b / 2.0 * y.powf(2.0) + 4.0 * b / (m - 1.0) * t()).exp() * f3 / y.abs().sqrt();
            Plan {
                map: transformation(tt, xx, w, zero(), Some(inv)),
                target: Target::Row("2.1", with(p, &[])),
            }
        }
    })
}

fn template(class: EqClass, row: &str, m: f64, p: &Params, domain: Interval) -> Result<Equation> {
    Ok(match class {
        EqClass::Imaged => {
            let (f, h) = tables::imaged_template(row, m, p)?;
            Equation::Imaged(ImagedEquation::new(f, h, m, domain))
        }
        EqClass::Double => {
            let (h, g) = tables::double_template(row, p)?;
            Equation::Double(DoubleImagedEquation::new(h, g, domain))
        }
        EqClass::Initial => {
            let (f, h) = tables::initial_template(row, m, p)?;
            Equation::Initial(RDEquation::gauged(f, h, m, domain))
        }
    })
}

fn elements(eq: &Equation) -> Vec<(&'static str, &Expr)> {
    match eq {
        Equation::Initial(e) => vec![("f", &e.f), ("g", &e.g), ("h", &e.h)],
        Equation::Imaged(e) => vec![("F", &e.F), ("H", &e.H)],
        Equation::Double(e) => vec![("H", &e.H), ("G", &e.G)],
    }
}

/// Largest relative deviation between the arbitrary elements of two members
/// of the same class.
fn element_deviation(a: &Equation, b: &Equation) -> Result<f64> {
    let bx = a.domain().sample_box();
    let mut worst = 0.0f64;
    for ((_, x), (_, y)) in elements(a).into_iter().zip(elements(b)) {
        worst = worst.max(num_equal_report(x, y, &bx, CHECK_POINTS)?.max);
    }
    Ok(worst)
}

/// Range of X over the (t, x) check box.
fn image_domain(map: &PointTransformation, domain: Interval) -> Result<Interval> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for tv in [0.1, 0.6] {
        for xv in [domain.lo, domain.hi] {
            let v = map.x.eval(&Point::from_pairs(&[("t", tv), ("x", xv)]))?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(Interval::new(lo, hi))
}

/// Applies an additional equivalence transformation to an equation of the
/// source row with the given parameters. The source must coincide with the
/// row template and the image with the target template, both to 1e-9.
pub fn apply_additional(
    eq: &Equation,
    which: AdditionalMap,
    params: &Params,
) -> Result<Additional> {
    if eq.class() != which.class() {
        return Err(TransformError::Precondition(format!(
            "{} acts on the {:?} class",
            which.name(),
            which.class()
        )));
    }
    let m = eq.m();
    let domain = eq.domain();
    let mut best = None;
    for row in which.source_rows() {
        let Ok(src) = template(which.class(), row, m, params, domain) else {
            continue;
        };
        let dev = element_deviation(eq, &src)?;
        if dev <= MATCH_TOL {
            best = Some(*row);
            break;
        }
    }
    let row = best.ok_or_else(|| {
        TransformError::Mismatch(format!(
            "equation is not row {} with these parameters",
            which.source_rows().join("/")
        ))
    })?;
    let Plan { map, target } = plan(which, row, m, params)?;
    let new_domain = image_domain(&map, domain)?;
    let table = match which.class() {
        EqClass::Imaged => Table::T1,
        EqClass::Double => Table::T2,
        EqClass::Initial => Table::T3,
    };
    let (target_case, target, target_evolution) = match target {
        Target::Row(r, tp) => {
            let eq = template(which.class(), r, m, &tp, new_domain)?;
            let ev = eq.evolution()?;
            (Some((CaseId::new(table, r), tp)), Some(eq), ev)
        }
        Target::RowPlus(r, tp, extra) => {
            let mut ev = template(which.class(), r, m, &tp, new_domain)?.evolution()?;
            ev.r = (ev.r + extra).simplify();
            (None, None, ev)
        }
    };
    let mapped = transform_evolution(&eq.evolution()?, &map)?;
    let deviation = matches_target(&mapped, &target_evolution, &map, domain)?;
    if deviation > MATCH_TOL {
        return Err(TransformError::Residual {
            what: format!("{} image", which.name()),
            residual: deviation,
            tol: MATCH_TOL,
        });
    }
    Ok(Additional {
        map,
        mapped,
        target_case,
        target,
        target_evolution,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::params;

    fn imaged(row: &str, m: f64, p: &Params, d: Interval) -> Equation {
        template(EqClass::Imaged, row, m, p, d).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for w in AdditionalMap::ALL {
            assert_eq!(w.name().parse::<AdditionalMap>().unwrap(), w);
        }
    }

    #[test]
    fn zero_alpha_is_identity() {
        let p = params(&[("delta", 1.0), ("q", 0.0), ("a1", 0.7)]);
        let d = Interval::new(0.5, 2.0);
        let out =
            apply_additional(&imaged("1", 3.0, &p, d), AdditionalMap::Imaged1To1, &p).unwrap();
        assert_eq!(out.map.x.simplify(), x());
        assert!(out.map.factor.is_one());
        assert_eq!(out.target_case.unwrap().1["a1"], 0.7);
    }

    #[test]
    fn imaged_translations() {
        let d = Interval::new(-1.0, 1.5);
        for m in [2.0, 3.0, 0.5] {
            let p = params(&[("delta", -1.0), ("q", 1.3), ("a1", -0.4)]);
            apply_additional(&imaged("1", m, &p, d), AdditionalMap::Imaged1To1, &p).unwrap();
            apply_additional(&imaged("1", m, &p, d), AdditionalMap::Imaged1To1Exp, &p).unwrap();
            apply_additional(&imaged("2", m, &p, d), AdditionalMap::Imaged2To2, &p).unwrap();
        }
    }

    #[test]
    fn imaged_gaussian_rows() {
        let d = Interval::new(0.5, 2.0);
        let p = params(&[
            ("delta", 1.0),
            ("p", 0.4),
            ("k", 1.5),
            ("a2", 0.3),
            ("a3", 2.0),
        ]);
        let out =
            apply_additional(&imaged("4", 3.0, &p, d), AdditionalMap::Imaged4To3, &p).unwrap();
        assert_eq!(out.target_case.unwrap().0.row, "3");
        let out =
            apply_additional(&imaged("6", 3.0, &p, d), AdditionalMap::Imaged6To2, &p).unwrap();
        assert!(out.target.is_some());
        // Row 5 lands on v_t = v_xx + δv^m − ((5−m)/(m−1) + a3)v/(4t̃).
        let out =
            apply_additional(&imaged("5", 3.0, &p, d), AdditionalMap::Imaged6To2, &p).unwrap();
        assert!(out.target.is_none());
        let at = Point::from_pairs(&[("t", -0.5), ("x", 1.0), ("u", 1.0)]);
        let r = out.target_evolution.r.eval(&at).unwrap();
        assert!((r - (1.0 + (1.0 + 2.0) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn shifted_gaussian_row() {
        let d = Interval::new(1.5, 3.0);
        let p = params(&[
            ("delta", 1.0),
            ("p", -0.3),
            ("k", 2.0),
            ("a2", -1.0),
            ("x0", 1.0),
        ]);
        apply_additional(&imaged("4", 2.0, &p, d), AdditionalMap::Imaged4To3, &p).unwrap();
    }

    #[test]
    fn double_maps() {
        let d = Interval::new(0.5, 2.0);
        let dbl = |row: &str, p: &Params| template(EqClass::Double, row, 2.0, p, d).unwrap();
        let p = params(&[
            ("delta", 1.0),
            ("q", 0.8),
            ("b1", 0.3),
            ("p", 0.5),
            ("k", 1.0),
            ("b2", 2.0),
            ("b3", 1.0),
        ]);
        let out = apply_additional(&dbl("1", &p), AdditionalMap::Double1To1, &p).unwrap();
        assert!((out.target_case.unwrap().1["b1"] - (0.3 - 0.8f64.powi(4) / 4.0)).abs() < 1e-15);
        apply_additional(&dbl("2", &p), AdditionalMap::Double2To2, &p).unwrap();
        apply_additional(&dbl("4", &p), AdditionalMap::Double4To3, &p).unwrap();
        apply_additional(&dbl("6", &p), AdditionalMap::Double6To2, &p).unwrap();
        let out = apply_additional(&dbl("5", &p), AdditionalMap::Double6To2, &p).unwrap();
        assert!(out.target.is_none());
    }

    #[test]
    fn initial_maps() {
        let init = |row: &str, m: f64, p: &Params, d: Interval| {
            template(EqClass::Initial, row, m, p, d).unwrap()
        };
        let d = Interval::new(-1.0, 1.2);
        let p = params(&[("delta", 1.0), ("q", 0.6)]);
        apply_additional(&init("1.2", 3.0, &p, d), AdditionalMap::Initial12To11, &p).unwrap();
        // q = r − 2 with m = 3: 4α² = q², so r = 4 needs 1.3 → 1.1 and r = 2.5 needs 1.3 → 1.3.
        let p = params(&[("delta", -1.0), ("r", 4.0)]);
        apply_additional(&init("1.3", 3.0, &p, d), AdditionalMap::Initial13To11, &p).unwrap();
        assert!(
            apply_additional(&init("1.3", 3.0, &p, d), AdditionalMap::Initial13To13, &p).is_err()
        );
        let p = params(&[("delta", -1.0), ("r", 2.5)]);
        apply_additional(&init("1.3", 3.0, &p, d), AdditionalMap::Initial13To13, &p).unwrap();
        let p = params(&[("delta", 1.0)]);
        apply_additional(&init("2.2", 2.0, &p, d), AdditionalMap::Initial22To21, &p).unwrap();
        let d = Interval::new(0.5, 2.0);
        let p = params(&[("delta", 1.0), ("p", 0.5), ("s", 1.0), ("a2", 0.1)]);
        let out =
            apply_additional(&init("4", 3.0, &p, d), AdditionalMap::Initial4To31, &p).unwrap();
        assert_eq!(out.target_case.unwrap().0.row, "3.1");
        apply_additional(&init("6", 3.0, &p, d), AdditionalMap::Initial6To21, &p).unwrap();
        assert!(matches!(
            apply_additional(&init("4", 3.0, &p, d), AdditionalMap::Initial4To32, &p),
            Err(TransformError::Precondition(_))
        ));
    }

    #[test]
    fn wrong_source_is_a_mismatch() {
        let d = Interval::new(0.5, 2.0);
        let p = params(&[("delta", 1.0), ("q", 0.6), ("a1", 0.2)]);
        let eq = imaged("1", 3.0, &p, d);
        let other = params(&[("delta", 1.0), ("q", 0.7), ("a1", 0.2)]);
        assert!(matches!(
            apply_additional(&eq, AdditionalMap::Imaged1To1, &other),
            Err(TransformError::Mismatch(_))
        ));
        assert!(apply_additional(&eq, AdditionalMap::Double1To1, &p).is_err());
    }
}
