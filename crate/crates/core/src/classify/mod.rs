//! Group classification of concrete equations by matching the rows of the
//! imaged (`T1`), double-imaged (`T2`) and initial (`T3`) lists, and the
//! subclass predicate for equations admitting transformations outside the
//! equivalence group.

mod fit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{num_equal, Expr, ExprError};
use crate::model::{
    AdmissibleForm, CaseId, ClassificationResult, DoubleImagedEquation, Equation, ImagedEquation,
    Interval, PointTransformation, RDEquation, Table, Validate, VectorField,
};
use crate::tables::{self, Params, TableError, ZERO_TOL};
use crate::transforms::{
    self, gauge_fg, push_operator, pushforward_operator, GaugeResult, TransformError,
};

pub use fit::CONFIRM_TOL;
use fit::{List, Target};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid equation: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("m = {0} is outside the admissible-transformation classification (m ≠ 0, 1, 2)")]
    ExcludedExponent(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Table(#[from] TableError),
}

pub type Result<T> = std::result::Result<T, ClassifyError>;

fn check(v: Vec<crate::model::Violation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(ClassifyError::Invalid(
            v.iter().map(|v| v.0.clone()).collect::<Vec<_>>().join("; "),
        ))
    }
}

fn kernel(table: Table) -> ClassificationResult {
    ClassificationResult {
        case: CaseId::new(table, "0"),
        params: Params::new(),
        basis: vec![VectorField::dt()],
        notes: Vec::new(),
    }
}

fn reflect(e: &Expr) -> Expr {
    e.substitute("x", &-Expr::sym("x")).simplify()
}

/// An operator written in x' = −x, expressed back in x.
fn unreflect(q: &VectorField) -> VectorField {
    VectorField::new(reflect(&q.tau), -reflect(&q.xi), reflect(&q.eta)).simplify()
}

fn mirrored(d: Interval) -> Interval {
    Interval::new(-d.hi, -d.lo)
}

fn delta_note(p: &Params, m: f64) -> Option<String> {
    let d = *p.get("delta")?;
    ((d.abs() - 1.0).abs() > ZERO_TOL).then(|| {
        format!(
            "δ = {d} normalizes to {} by scaling the dependent variable with |δ|^(1/(m−1)) = {}",
            d.signum(),
            d.abs().powf(1.0 / (m - 1.0))
        )
    })
}

/// Row matching in one list, without reflection.
fn match_list(
    list: List,
    m: f64,
    h: &Expr,
    other: &Expr,
    domain: Interval,
) -> Result<Option<(&'static str, Params, Vec<String>)>> {
    let Some(target) = Target::new(list, m, h, other, domain)? else {
        return Ok(None);
    };
    let mut found = target.matches();
    if found.is_empty() {
        return Ok(None);
    }
    let (row, params) = found.remove(0);
    let mut notes: Vec<String> = found
        .iter()
        .map(|(r, _)| format!("row {r} also confirms; the more specific row {row} is reported"))
        .collect();
    notes.extend(delta_note(&params, m));
    Ok(Some((row, params, notes)))
}

/// Tries the equation as given, then mirrored in x. Power and Gaussian rows
/// are written for y = x − x0 > 0, so a domain left of x0 needs the mirror.
fn match_either(
    list: List,
    m: f64,
    h: &Expr,
    other: &Expr,
    domain: Interval,
) -> Result<Option<(&'static str, Params, Vec<String>, bool)>> {
    if let Some((r, p, n)) = match_list(list, m, h, other, domain)? {
        return Ok(Some((r, p, n, false)));
    }
    let (hr, or) = (reflect(h), reflect(other));
    Ok(
        match_list(list, m, &hr, &or, mirrored(domain))?.map(|(r, p, mut n)| {
            n.push("matched after x ↦ −x; parameters refer to the mirrored variable".into());
            (r, p, n, true)
        }),
    )
}

fn finish(
    table: Table,
    row: &str,
    params: Params,
    basis: Vec<VectorField>,
    notes: Vec<String>,
    mirrored: bool,
) -> ClassificationResult {
    let basis = if mirrored {
        basis.iter().map(unreflect).collect()
    } else {
        basis
    };
    ClassificationResult {
        case: CaseId::new(table, row),
        params,
        basis,
        notes,
    }
}

/// w_t = w_xx + H w² + G against the double-imaged list.
pub fn classify_double_imaged(eq: &DoubleImagedEquation) -> Result<ClassificationResult> {
    check(eq.validate())?;
    let Some((row, params, notes, mir)) = match_either(List::Double, 2.0, &eq.H, &eq.G, eq.domain)?
    else {
        return Ok(kernel(Table::T2));
    };
    let basis = tables::double_basis(row, &params)?;
    Ok(finish(Table::T2, row, params, basis, notes, mir))
}

/// v_t = v_xx + H v^m + F v against the imaged list. For m = 2 the double
/// image is classified as well, and its row wins when it carries more
/// operators: the extended group then links the input to a more symmetric
/// row than its own template suggests.
pub fn classify_imaged(eq: &ImagedEquation) -> Result<ClassificationResult> {
    check(eq.validate())?;
    let mut res = match match_either(List::Imaged, eq.m, &eq.H, &eq.F, eq.domain)? {
        Some((row, params, notes, mir)) => {
            let basis = tables::imaged_basis(row, eq.m, &params)?;
            finish(Table::T1, row, params, basis, notes, mir)
        }
        None => kernel(Table::T1),
    };
    if eq.m == 2.0 {
        let double = transforms::to_double_imaged(eq)?;
        let d = classify_double_imaged(&double)?;
        if d.case.row != res.case.row {
            if d.basis.len() > res.basis.len() {
                let back = from_double(eq)?;
                let basis = d
                    .basis
                    .iter()
                    .map(|q| push_operator(q, &back, eq.domain))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let mut notes = d.notes;
                notes.push(format!(
                    "m = 2: the double image w = v + F/(2H) lies in row {} of the double-imaged list; \
                     parameters are those of that row and the basis is pulled back to v",
                    d.case.row
                ));
                res = ClassificationResult {
                    case: CaseId::new(Table::T1, d.case.row),
                    params: d.params,
                    basis,
                    notes,
                };
            } else {
                res.notes.push(format!(
                    "m = 2: the double image matches row {} of the double-imaged list",
                    d.case.row
                ));
            }
        }
    }
    Ok(res)
}

/// v = w − F/(2H), the way back from the double image.
fn from_double(eq: &ImagedEquation) -> Result<PointTransformation> {
    let mut map = transforms::double_map(eq)?;
    map.shift = (-&map.shift).simplify();
    map.inverse = Some(crate::model::InverseMap {
        t: Expr::sym("t"),
        x: Expr::sym("x"),
    });
    map.law.clear();
    Ok(map)
}

/// Exponent λ and pole x0 when e = c·(x − x0)^λ on the domain.
fn power_of(e: &Expr, domain: Interval) -> Option<(f64, f64)> {
    let one = Expr::one();
    let t = Target::new(List::Imaged, 3.0, e, &one, domain).ok()??;
    let p = t.fit_power()?;
    Some((p.get("k").copied()?, p.get("x0").copied().unwrap_or(0.0)))
}

/// Initial-class parameters derived from the imaged row: the subcase
/// exponents and Whittaker indices of the normalized (f, h).
fn initial_params(sub: &str, m: f64, p: &Params, f: &Expr, domain: Interval) -> Params {
    let mut out = p.clone();
    let g = |k: &str| p.get(k).copied().unwrap_or(0.0);
    let mut put = |k: &str, v: f64| {
        if v.is_finite() {
            out.insert(k.into(), v);
        }
    };
    match sub {
        "1.1" | "1.2" | "2.2" => put("alpha", tables::alpha(g("q"), m)),
        "1.3" => put("r", g("q") / (2.0 * (-g("a1")).sqrt()) + (m + 1.0) / 2.0),
        "3.1" => {
            let s = (1.0 - 4.0 * g("a2")).max(0.0).sqrt();
            let roots = [1.0 - s, 1.0 + s];
            let lambda = match power_of(f, domain) {
                Some((l, _)) if (l - roots[1]).abs() < (l - roots[0]).abs() => roots[1],
                _ => roots[0],
            };
            put("lambda", lambda);
            put("gamma", g("k") + (m + 1.0) * lambda / 2.0);
        }
        "3.2" => {
            put("rho", (4.0 * g("a2") - 1.0).sqrt() / 2.0);
            put("l", g("k") + (m + 1.0) / 2.0);
        }
        "4" => {
            let s = g("k") - (m + 1.0) / 2.0;
            put("s", s);
            put("beta", tables::beta(g("p"), m));
            put("kappa1", (s + 3.0) / (2.0 * (1.0 - m)));
            if g("a2") <= 0.25 {
                put("mu1", (1.0 - 4.0 * g("a2")).sqrt() / 4.0);
            }
        }
        "5" => {
            put("beta", tables::beta(g("p"), m));
            put("kappa2", g("a3") / 4.0);
            put("mu2", 0.25);
        }
        "6" => {
            put("beta", tables::beta(g("p"), m));
            put("kappa3", (5.0 - m) / (4.0 * (1.0 - m)));
            put("mu3", 0.25);
        }
        _ => {}
    }
    out
}

/// Subcase of the initial list for a row that came from the double list,
/// whose parameters lack a1 or a2. The relations of the m = 2 chain supply
/// them with the + root.
fn lift_double_params(row: &str, p: &mut Params) {
    let g = |k: &str| p.get(k).copied().unwrap_or(0.0);
    match row {
        "1" if !p.contains_key("a1") => {
            let q2 = g("q") * g("q");
            let a1 = -q2 + (q2 * q2 - 4.0 * g("delta") * g("b1")).max(0.0).sqrt();
            p.insert("a1".into(), a1);
        }
        "3" | "4" if !p.contains_key("a2") => {
            let c = (g("k") + 2.0) * (g("k") + 3.0);
            let a2 = -c + (c * c - 4.0 * g("b2")).max(0.0).sqrt();
            p.insert("a2".into(), a2);
        }
        "5" if !p.contains_key("a3") => {
            p.insert("a3".into(), 1.0 + (5.0 - g("b3")).max(0.0).sqrt());
        }
        _ => {}
    }
}

/// f u_t = (f u_x)_x + h u^m against the initial list, through the imaged
/// class. The basis is carried back by u = v/√|f|.
pub fn classify_initial(eq: &RDEquation) -> Result<ClassificationResult> {
    check(eq.validate())?;
    let b = eq.domain.sample_box();
    if eq.f != eq.g && !num_equal(&eq.f, &eq.g, &b, fit::FIT_POINTS, 1e-12)? {
        return Err(ClassifyError::Precondition(
            "f and g differ; apply the f = g gauge first".into(),
        ));
    }
    let img = transforms::to_imaged(eq)?;
    let r1 = classify_imaged(&img)?;
    let mut p = r1.params.clone();
    lift_double_params(&r1.case.row, &mut p);
    let sub = tables::initial_row(&r1.case.row, &p)?;
    let basis = r1
        .basis
        .iter()
        .map(|q| pushforward_operator(q, &eq.f, eq.domain))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut notes = r1.notes.clone();
    notes.push(format!("imaged row {}", r1.case.row));
    if sub == "2.1" {
        if let (Some((l, x0)), Some((gm, _))) =
            (power_of(&eq.f, eq.domain), power_of(&eq.h, eq.domain))
        {
            if l.abs() > ZERO_TOL {
                notes.push(format!(
                    "power pair (λ, γ) = ({l}, {gm}) about x0 = {x0} is on the 3.1 exclusion list: \
                     it is equivalent to (λ, γ) = (0, 0), e.g. via λ ↦ 2 − λ, γ ↦ γ + (m + 1)(1 − λ)"
                ));
            }
        }
    }
    if sub == "3.1" {
        notes.push("(λ, γ) and (2 − λ, γ + (m + 1)(1 − λ)) describe equivalent equations".into());
    }
    let params = initial_params(&sub, eq.m, &p, &eq.f, eq.domain);
    Ok(ClassificationResult {
        case: CaseId::new(Table::T3, sub),
        params,
        basis,
        notes,
    })
}

/// Dispatch on the class. An initial-class equation with f ≠ g is gauged
/// first when the gauge has a closed form; its basis is then written in the
/// gauged variables.
pub fn classify(eq: &Equation) -> Result<ClassificationResult> {
    match eq {
        Equation::Imaged(e) => classify_imaged(e),
        Equation::Double(e) => classify_double_imaged(e),
        Equation::Initial(e) => {
            let b = e.domain.sample_box();
            if e.f == e.g || num_equal(&e.f, &e.g, &b, fit::FIT_POINTS, 1e-12)? {
                return classify_initial(e);
            }
            match gauge_fg(e, e.domain.lo)? {
                GaugeResult::Symbolic { equation, map } => {
                    let mut r = classify_initial(&equation)?;
                    r.notes.push(format!(
                        "classified after the f = g gauge x' = {}; the basis is in the gauged variables",
                        map.x
                    ));
                    Ok(r)
                }
                GaugeResult::Numeric(_) => Err(ClassifyError::Precondition(
                    "the f = g gauge has no closed form here; classify the gauged coefficients"
                        .into(),
                )),
            }
        }
    }
}

/// Subclasses of equations with nontrivial admissible transformations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdmissibleClass {
    #[serde(rename = "trivial")]
    Trivial,
    E1,
    E2,
    E3,
    E4,
}

impl AdmissibleClass {
    pub fn name(self) -> &'static str {
        match self {
            AdmissibleClass::Trivial => "trivial",
            AdmissibleClass::E1 => "E1",
            AdmissibleClass::E2 => "E2",
            AdmissibleClass::E3 => "E3",
            AdmissibleClass::E4 => "E4",
        }
    }

    pub fn case_id(self) -> CaseId {
        CaseId::new(Table::Adm, self.name())
    }
}

fn zero(v: f64) -> bool {
    v.abs() <= ZERO_TOL
}

/// K2 = K1 = 0 is necessary; then either k = κ = 0 (E1, E2, E4 by K0 and p)
/// or K0 = 0 with q = 2pν (E3).
pub fn classify_admissible(form: &AdmissibleForm, m: f64) -> Result<AdmissibleClass> {
    if m == 0.0 || m == 1.0 || m == 2.0 {
        return Err(ClassifyError::ExcludedExponent(m));
    }
    if !zero(form.k2(m)) || !zero(form.k1(m)) {
        return Ok(AdmissibleClass::Trivial);
    }
    let flat = zero(form.k) && zero(form.kappa);
    Ok(match (zero(form.k0(m)), flat) {
        (false, true) if zero(form.p) => AdmissibleClass::E1,
        (false, true) => AdmissibleClass::E2,
        (true, true) => AdmissibleClass::E4,
        (true, false) if zero(form.q - 2.0 * form.p * form.nu) => AdmissibleClass::E3,
        _ => AdmissibleClass::Trivial,
    })
}

#[cfg(test)]
mod tests;
