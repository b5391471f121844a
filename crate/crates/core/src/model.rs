//! Domain types: one member of each equation class, operators, point
//! transformations, equivalence parameters and classification results.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{Assumptions, Expr, Point, SampleBox, Sign};

pub const DOMAIN_SAMPLES: usize = 64;

/// Open x-interval on which an equation is considered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn sample_box(&self) -> SampleBox {
        SampleBox::new(&[("x", self.lo, self.hi)])
    }

    /// Sign of `e` if it is constant and nonzero on the 64 sample points.
    pub fn sign_of(&self, e: &Expr) -> Option<Sign> {
        let mut seen = None;
        for p in self.sample_box().points(DOMAIN_SAMPLES) {
            let s = Sign::of(e.eval(&p).ok()?)?;
            match seen {
                None => seen = Some(s),
                Some(prev) if prev != s => return None,
                _ => {}
            }
        }
        seen
    }

    pub fn points(&self, n: usize) -> Vec<Point> {
        self.sample_box().points(n).collect()
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::new(0.5, 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqClass {
    Initial,
    Imaged,
    Double,
}

/// f(x)u_t = (g(x)u_x)_x + h(x)u^m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RDEquation {
    pub f: Expr,
    pub g: Expr,
    pub h: Expr,
    pub m: f64,
    pub domain: Interval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_sign: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_sign: Option<Sign>,
}

impl RDEquation {
    pub fn new(f: Expr, g: Expr, h: Expr, m: f64, domain: Interval) -> RDEquation {
        RDEquation {
            f,
            g,
            h,
            m,
            domain,
            f_sign: None,
            g_sign: None,
        }
    }

    /// The gauged form g = f.
    pub fn gauged(f: Expr, h: Expr, m: f64, domain: Interval) -> RDEquation {
        RDEquation::new(f.clone(), f, h, m, domain)
    }

    pub fn sign_f(&self) -> Option<Sign> {
        self.f_sign.or_else(|| self.domain.sign_of(&self.f))
    }

    pub fn sign_g(&self) -> Option<Sign> {
        self.g_sign.or_else(|| self.domain.sign_of(&self.g))
    }
}

/// v_t = v_xx + H(x)v^m + F(x)v.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ImagedEquation {
    #[serde(rename = "F")]
    pub F: Expr,
    #[serde(rename = "H")]
    pub H: Expr,
    pub m: f64,
    pub domain: Interval,
}

#[allow(non_snake_case)]
impl ImagedEquation {
    pub fn new(F: Expr, H: Expr, m: f64, domain: Interval) -> ImagedEquation {
        ImagedEquation { F, H, m, domain }
    }
}

/// w_t = w_xx + H(x)w² + G(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct DoubleImagedEquation {
    #[serde(rename = "H")]
    pub H: Expr,
    #[serde(rename = "G")]
    pub G: Expr,
    pub domain: Interval,
}

#[allow(non_snake_case)]
impl DoubleImagedEquation {
    pub fn new(H: Expr, G: Expr, domain: Interval) -> DoubleImagedEquation {
        DoubleImagedEquation { H, G, domain }
    }
}

/// One member of any of the three classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum Equation {
    Initial(RDEquation),
    Imaged(ImagedEquation),
    Double(DoubleImagedEquation),
}

impl Equation {
    pub fn class(&self) -> EqClass {
        match self {
            Equation::Initial(_) => EqClass::Initial,
            Equation::Imaged(_) => EqClass::Imaged,
            Equation::Double(_) => EqClass::Double,
        }
    }

    pub fn domain(&self) -> Interval {
        match self {
            Equation::Initial(e) => e.domain,
            Equation::Imaged(e) => e.domain,
            Equation::Double(e) => e.domain,
        }
    }

    /// The exponent of the nonlinearity (2 for the double-imaged class).
    pub fn m(&self) -> f64 {
        match self {
            Equation::Initial(e) => e.m,
            Equation::Imaged(e) => e.m,
            Equation::Double(_) => 2.0,
        }
    }
}

impl AsEvolution for Equation {
    fn evolution(&self) -> crate::expr::Result<Evolution> {
        match self {
            Equation::Initial(e) => e.evolution(),
            Equation::Imaged(e) => e.evolution(),
            Equation::Double(e) => e.evolution(),
        }
    }
}

impl Validate for Equation {
    fn validate(&self) -> Vec<Violation> {
        match self {
            Equation::Initial(e) => e.validate(),
            Equation::Imaged(e) => e.validate(),
            Equation::Double(e) => e.validate(),
        }
    }
}

/// u_t = A u_xx + B u_x + R(t,x,u): the common evolution form of all three
/// classes and of their images under point maps. The dependent variable is
/// always called `u`; coefficients of class members do not depend on t.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub a: Expr,
    pub b: Expr,
    pub r: Expr,
    pub domain: Interval,
}

pub trait AsEvolution {
    fn evolution(&self) -> crate::expr::Result<Evolution>;
}

impl AsEvolution for Evolution {
    fn evolution(&self) -> crate::expr::Result<Evolution> {
        Ok(self.clone())
    }
}

impl AsEvolution for RDEquation {
    fn evolution(&self) -> crate::expr::Result<Evolution> {
        let u = Expr::sym("u");
        let asm = Assumptions::on(self.domain.sample_box());
        let gx = self.g.diff_with("x", &asm)?;
        Ok(Evolution {
            a: (&self.g / &self.f).simplify_with(&asm),
            b: (gx / &self.f).simplify_with(&asm),
            r: (&self.h * u.powf(self.m) / &self.f).simplify_with(&asm),
            domain: self.domain,
        })
    }
}

impl AsEvolution for ImagedEquation {
    fn evolution(&self) -> crate::expr::Result<Evolution> {
        let u = Expr::sym("u");
        Ok(Evolution {
            a: Expr::one(),
            b: Expr::zero(),
            r: &self.H * u.powf(self.m) + &self.F * &u,
            domain: self.domain,
        })
    }
}

impl AsEvolution for DoubleImagedEquation {
    fn evolution(&self) -> crate::expr::Result<Evolution> {
        let u = Expr::sym("u");
        Ok(Evolution {
            a: Expr::one(),
            b: Expr::zero(),
            r: &self.H * u.powf(2.0) + &self.G,
            domain: self.domain,
        })
    }
}

/// τ∂t + ξ∂x + η∂u with coefficients in (t, x, u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub tau: Expr,
    pub xi: Expr,
    pub eta: Expr,
}

impl VectorField {
    pub fn new(tau: Expr, xi: Expr, eta: Expr) -> VectorField {
        VectorField { tau, xi, eta }
    }

    pub fn parse(tau: &str, xi: &str, eta: &str) -> crate::expr::Result<VectorField> {
        Ok(VectorField::new(
            crate::expr::parse(tau)?,
            crate::expr::parse(xi)?,
            crate::expr::parse(eta)?,
        ))
    }

    pub fn dt() -> VectorField {
        VectorField::new(Expr::one(), Expr::zero(), Expr::zero())
    }

    pub fn dx() -> VectorField {
        VectorField::new(Expr::zero(), Expr::one(), Expr::zero())
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField::new(c * &self.tau, c * &self.xi, c * &self.eta)
    }

    pub fn plus(&self, other: &VectorField) -> VectorField {
        VectorField::new(
            &self.tau + &other.tau,
            &self.xi + &other.xi,
            &self.eta + &other.eta,
        )
    }

    pub fn simplify(&self) -> VectorField {
        VectorField::new(self.tau.simplify(), self.xi.simplify(), self.eta.simplify())
    }

    /// Binds numeric values of parameters in all three coefficients.
    pub fn bind(&self, values: &[(&str, f64)]) -> VectorField {
        VectorField::new(
            self.tau.bind(values),
            self.xi.bind(values),
            self.eta.bind(values),
        )
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})∂t + ({})∂x + ({})∂u", self.tau, self.xi, self.eta)
    }
}

/// Inverse of the independent-variable part of a point map, in the new variables
/// (which reuse the names `t` and `x`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseMap {
    pub t: Expr,
    pub x: Expr,
}

/// t̃ = T(t), x̃ = X(t,x), ũ = factor(t,x)·u + shift(t,x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTransformation {
    #[serde(rename = "T")]
    pub t: Expr,
    #[serde(rename = "X")]
    pub x: Expr,
    pub factor: Expr,
    pub shift: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<InverseMap>,
    /// Transformed arbitrary elements, keyed by name ("f", "h", "F", "H", "G").
    #[serde(default)]
    pub law: BTreeMap<String, Expr>,
}

impl PointTransformation {
    pub fn identity() -> PointTransformation {
        PointTransformation {
            t: Expr::sym("t"),
            x: Expr::sym("x"),
            factor: Expr::one(),
            shift: Expr::zero(),
            inverse: Some(InverseMap {
                t: Expr::sym("t"),
                x: Expr::sym("x"),
            }),
            law: BTreeMap::new(),
        }
    }

    /// Ṽ = factor·u + shift as one expression in (t, x, u).
    pub fn v(&self) -> Expr {
        (&self.factor * Expr::sym("u") + &self.shift).simplify()
    }

    /// Jacobian determinant of (T, X, V) with respect to (t, x, u); triangular by construction.
    pub fn jacobian(&self) -> crate::expr::Result<Expr> {
        Ok((self.t.diff("t")? * self.x.diff("x")? * &self.factor).simplify())
    }
}

/// Parameters of an equivalence-group element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivParams {
    /// δ0..δ5; unused entries are ignored by the group they are applied with.
    pub delta: [f64; 6],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<Expr>,
}

impl EquivParams {
    pub fn scalars(delta: [f64; 6]) -> EquivParams {
        EquivParams {
            delta,
            phi: None,
            psi: None,
            chi: None,
        }
    }

    pub fn identity() -> EquivParams {
        EquivParams::scalars([1.0, 1.0, 0.0, 0.0, 1.0, 0.0])
    }

    /// t̃ = δ1t + δ2, ũ = δ3u with the remaining entries at their neutral values.
    pub fn usual(d0: f64, d1: f64, d2: f64, d3: f64) -> EquivParams {
        EquivParams::scalars([d0, d1, d2, d3, 1.0, 0.0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Table {
    /// Imaged class.
    T1,
    /// Double-imaged class.
    T2,
    /// Initial class with g = f.
    T3,
    /// Admissible-transformation subclasses.
    Adm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CaseId {
    pub table: Table,
    pub row: String,
}

impl CaseId {
    pub fn new(table: Table, row: impl Into<String>) -> CaseId {
        CaseId {
            table,
            row: row.into(),
        }
    }

    pub fn is_kernel(&self) -> bool {
        self.row == "0"
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.table {
            Table::T1 => "T1",
            Table::T2 => "T2",
            Table::T3 => "T3",
            Table::Adm => "adm",
        };
        write!(f, "{t}/{}", self.row)
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;
    fn from_str(s: &str) -> Result<CaseId, String> {
        let (t, row) = s
            .split_once('/')
            .ok_or_else(|| format!("malformed case id `{s}`"))?;
        let table = match t {
            "T1" => Table::T1,
            "T2" => Table::T2,
            "T3" => Table::T3,
            "adm" => Table::Adm,
            _ => return Err(format!("unknown table `{t}`")),
        };
        Ok(CaseId::new(table, row))
    }
}

impl Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CaseId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<CaseId, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub case: CaseId,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
    pub basis: Vec<VectorField>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ClassificationResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

/// Parameters of the family admitting transformations outside the equivalence group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleForm {
    pub k: f64,
    pub kappa: f64,
    pub delta: f64,
    pub nu: f64,
    pub p: f64,
    pub q: f64,
    pub s2: f64,
    pub s1: f64,
    pub s0: f64,
}

impl AdmissibleForm {
    pub fn k2(&self, m: f64) -> f64 {
        self.s2 + 4.0 * self.p * self.p / ((m - 1.0) * (m - 1.0))
    }

    pub fn k1(&self, m: f64) -> f64 {
        self.s1 + 4.0 * self.p * self.q / ((m - 1.0) * (m - 1.0))
    }

    pub fn k0(&self, m: f64) -> f64 {
        self.s0 + (self.q * self.q + 4.0 * self.p * (self.k + 2.0)) / ((m - 1.0) * (m - 1.0))
            - 2.0 * self.p / (m - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub trait Validate {
    /// Every sample-checkable invariant; an empty list means valid.
    fn validate(&self) -> Vec<Violation>;

    fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

fn check_m(m: f64, out: &mut Vec<Violation>) {
    if m == 0.0 || m == 1.0 {
        out.push(Violation("m∈{0,1}".into()));
    }
    if !m.is_finite() {
        out.push(Violation("m is not finite".into()));
    }
}

fn check_domain(d: &Interval, out: &mut Vec<Violation>) {
    if !(d.lo < d.hi) || !d.lo.is_finite() || !d.hi.is_finite() {
        out.push(Violation(format!(
            "empty or unbounded domain ({}, {})",
            d.lo, d.hi
        )));
    }
}

fn check_nonvanishing(name: &str, e: &Expr, d: &Interval, out: &mut Vec<Violation>) {
    let extra: Vec<String> = e.symbols().into_iter().filter(|s| s != "x").collect();
    if !extra.is_empty() {
        out.push(Violation(format!(
            "{name} depends on unbound symbols {}",
            extra.join(", ")
        )));
        return;
    }
    if d.sign_of(e).is_none() {
        out.push(Violation(format!("{name} vanishes")));
    }
}

impl Validate for RDEquation {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_m(self.m, &mut out);
        check_domain(&self.domain, &mut out);
        if !out.iter().any(|v| v.0.contains("domain")) {
            check_nonvanishing("f", &self.f, &self.domain, &mut out);
            check_nonvanishing("g", &self.g, &self.domain, &mut out);
            check_nonvanishing("h", &self.h, &self.domain, &mut out);
            for (name, declared, e) in [("f", self.f_sign, &self.f), ("g", self.g_sign, &self.g)] {
                if let (Some(want), Some(got)) = (declared, self.domain.sign_of(e)) {
                    if want != got {
                        out.push(Violation(format!(
                            "declared sign of {name} disagrees with its values"
                        )));
                    }
                }
            }
        }
        out
    }
}

impl Validate for ImagedEquation {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_m(self.m, &mut out);
        check_domain(&self.domain, &mut out);
        if out.is_empty() {
            check_nonvanishing("H", &self.H, &self.domain, &mut out);
            let b = self.domain.sample_box();
            if self.F.symbols().iter().any(|s| s != "x")
                || b.points(DOMAIN_SAMPLES).any(|p| self.F.eval(&p).is_err())
            {
                out.push(Violation("F is not defined on the domain".into()));
            }
        }
        out
    }
}

impl Validate for DoubleImagedEquation {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_domain(&self.domain, &mut out);
        if out.is_empty() {
            check_nonvanishing("H", &self.H, &self.domain, &mut out);
            let b = self.domain.sample_box();
            if self.G.symbols().iter().any(|s| s != "x")
                || b.points(DOMAIN_SAMPLES).any(|p| self.G.eval(&p).is_err())
            {
                out.push(Violation("G is not defined on the domain".into()));
            }
        }
        out
    }
}

impl Validate for VectorField {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, e) in [("tau", &self.tau), ("xi", &self.xi), ("eta", &self.eta)] {
            let extra: Vec<String> = e
                .symbols()
                .into_iter()
                .filter(|s| !["t", "x", "u"].contains(&s.as_str()))
                .collect();
            if !extra.is_empty() {
                out.push(Violation(format!(
                    "{name} depends on unbound symbols {}",
                    extra.join(", ")
                )));
            }
        }
        if self.tau.is_zero() && self.xi.is_zero() {
            out.push(Violation("(tau, xi) = (0, 0)".into()));
        }
        out
    }
}

impl Validate for PointTransformation {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let b = SampleBox::new(&[("t", 0.5, 2.0), ("x", 0.5, 2.0), ("u", 0.5, 2.0)]);
        match self.jacobian() {
            Ok(j) => {
                let bad = b
                    .points(DOMAIN_SAMPLES)
                    .filter(|p| matches!(j.eval(p), Ok(v) if v == 0.0))
                    .count();
                if bad > 0 {
                    out.push(Violation("Jacobian vanishes".into()));
                }
            }
            Err(e) => out.push(Violation(format!("Jacobian unavailable: {e}"))),
        }
        out
    }
}

impl Validate for AdmissibleForm {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.delta == 0.0 {
            out.push(Violation("delta = 0".into()));
        }
        let vals = [
            self.k, self.kappa, self.delta, self.nu, self.p, self.q, self.s2, self.s1, self.s0,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            out.push(Violation("non-finite parameter".into()));
        }
        out
    }
}
