//! Catalog of exact solutions, generation of new ones through point maps,
//! and residual verification on a (t, x) grid.

mod generate;
mod verify;

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr, ExprError, Point};
use crate::model::EqClass;
use crate::transforms::{AdditionalMap, TransformError};

pub use generate::{generate, ChainLink};
pub use verify::{instantiate, verify_entry, verify_on_grid, GridReport, GridSpec, Instance};

/// Relative residual accepted by the catalog checks.
pub const CATALOG_TOL: f64 = 1e-7;
/// Bindings drawn per entry by [`verify_entry`].
pub const DEFAULT_BINDINGS: usize = 3;

const SHIPPED: &str = include_str!("../../data/catalog.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("constants violate the entry constraints: {0}")]
    Constraint(String),
    #[error("{skipped} of {total} grid points skipped")]
    TooManySkipped { skipped: usize, total: usize },
    #[error("generation failed: {0}")]
    Generate(String),
}

pub type Result<T> = std::result::Result<T, SolutionError>;

/// A free constant: a default and optionally a sampling range or a finite
/// set of admissible values. Without either the constant is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub default: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<f64>>,
}

impl Constant {
    pub fn fixed(v: f64) -> Constant {
        Constant {
            default: v,
            range: None,
            choices: None,
        }
    }

    fn draw(&self, rng: &mut StdRng) -> f64 {
        if let Some(c) = &self.choices {
            if !c.is_empty() {
                return c[rng.gen_range(0..c.len())];
            }
        }
        match self.range {
            Some([lo, hi]) if hi > lo => rng.gen_range(lo..hi),
            _ => self.default,
        }
    }

    /// Whether the constant may take the value `v`.
    pub fn admits(&self, v: f64) -> bool {
        let close = |a: f64| (a - v).abs() <= 1e-12 * v.abs().max(1.0);
        if let Some(c) = &self.choices {
            return c.iter().any(|&a| close(a));
        }
        match self.range {
            Some([lo, hi]) => v >= lo && v <= hi,
            None => close(self.default),
        }
    }
}

/// Target equation in grammar strings; `m` may involve constants.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum EquationSpec {
    /// f u_t = (g u_x)_x + h u^m; g defaults to f.
    Initial {
        f: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<String>,
        h: String,
        m: String,
    },
    /// v_t = v_xx + H v^m + F v.
    Imaged { F: String, H: String, m: String },
    /// w_t = w_xx + H w² + G.
    Double { H: String, G: String },
}

impl EquationSpec {
    pub fn class(&self) -> EqClass {
        match self {
            EquationSpec::Initial { .. } => EqClass::Initial,
            EquationSpec::Imaged { .. } => EqClass::Imaged,
            EquationSpec::Double { .. } => EqClass::Double,
        }
    }

    fn sources(&self) -> Vec<&str> {
        match self {
            EquationSpec::Initial { f, g, h, m } => {
                let mut v = vec![f.as_str(), h.as_str(), m.as_str()];
                v.extend(g.as_deref());
                v
            }
            EquationSpec::Imaged { F, H, m } => vec![F, H, m],
            EquationSpec::Double { H, G } => vec![H, G],
        }
    }
}

/// One transformation step taking a solution of the parent entry's equation
/// to a solution of this entry's equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Step {
    /// The entry's equation is the source of an additional equivalence
    /// transformation whose target is the parent's equation; the parent's
    /// solution is pulled back. Parameter values are expressions in the
    /// constants.
    Pullback {
        map: AdditionalMap,
        params: BTreeMap<String, String>,
    },
    /// u = v/√|f| from the imaged class to a gauged initial equation.
    Preimage,
    /// v = w − F/(2H) from the double-imaged class to an imaged equation
    /// with m = 2.
    DoublePreimage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub from: String,
    pub step: Step,
    /// Parent constants as expressions in this entry's constants, for steps
    /// that shift parameters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bind: BTreeMap<String, String>,
    #[serde(skip)]
    pub parent: Option<Box<SolutionEntry>>,
}

/// Rectangle in (t, x) on which an entry is verified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub t: [f64; 2],
    pub x: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub id: String,
    pub title: String,
    pub equation: EquationSpec,
    /// Closed form in (t, x) and the constants. Absent for generated entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated: Option<Generated>,
    #[serde(default)]
    pub constants: BTreeMap<String, Constant>,
    /// Named subexpressions, substituted into every formula of the entry
    /// unless the binding fixes the name itself.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derived: Vec<(String, String)>,
    /// Expressions in the constants that must be positive.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    /// Expressions in the constants that must vanish.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub identities: Vec<String>,
    #[serde(rename = "box")]
    pub grid: GridBox,
    /// Where the solution comes from, in words.
    pub source: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

pub type Binding = BTreeMap<String, f64>;

const IDENTITY_TOL: f64 = 1e-10;

impl SolutionEntry {
    pub fn class(&self) -> EqClass {
        self.equation.class()
    }

    pub fn defaults(&self) -> Binding {
        self.constants
            .iter()
            .map(|(k, c)| (k.clone(), c.default))
            .collect()
    }

    /// Draws an admissible binding, retrying until the constraints hold.
    pub fn draw(&self, rng: &mut StdRng) -> Result<Binding> {
        let mut last = String::new();
        for _ in 0..200 {
            let b: Binding = self
                .constants
                .iter()
                .map(|(k, c)| (k.clone(), c.draw(rng)))
                .collect();
            match self.check(&b) {
                Ok(()) => return Ok(b),
                Err(SolutionError::Constraint(e)) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(SolutionError::Constraint(format!(
            "no admissible binding for {} ({last})",
            self.id
        )))
    }

    /// `n` bindings from a generator seeded with `seed` and the entry id.
    pub fn bindings(&self, n: usize, seed: u64) -> Result<Vec<Binding>> {
        let salt = self.id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
        });
        let mut rng = StdRng::seed_from_u64(seed ^ salt);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    /// Parses `src`, substitutes derived names not fixed by the binding and
    /// binds the constants.
    pub fn resolve(&self, src: &str, b: &Binding) -> Result<Expr> {
        let subs: Vec<(&str, Expr)> = self
            .derived
            .iter()
            .filter(|(k, _)| !b.contains_key(k))
            .map(|(k, v)| Ok((k.as_str(), parse(v)?)))
            .collect::<Result<_>>()?;
        let mut e = parse(src)?;
        for _ in 0..=subs.len() {
            let next = e.substitute_all(&subs);
            if next == e {
                break;
            }
            e = next;
        }
        let pairs: Vec<(&str, f64)> = b.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Ok(e.bind(&pairs).simplify())
    }

    fn value(&self, src: &str, b: &Binding) -> Result<f64> {
        Ok(self.resolve(src, b)?.eval(&Point::new())?)
    }

    /// Constraints (> 0) and identities (= 0) under the binding. Constants the
    /// binding leaves out take their defaults.
    pub fn check(&self, b: &Binding) -> Result<()> {
        let b = self.complete(b);
        for (k, c) in &self.constants {
            if c.range.is_none() && c.choices.is_none() && !c.admits(b[k]) {
                return Err(SolutionError::Constraint(format!(
                    "{k} is fixed at {}",
                    c.default
                )));
            }
        }
        for c in &self.constraints {
            let v = self.value(c, &b)?;
            if v.is_nan() || v <= 0.0 {
                return Err(SolutionError::Constraint(format!(
                    "{c} = {v} is not positive"
                )));
            }
        }
        for c in &self.identities {
            let v = self.value(c, &b)?;
            if v.is_nan() || v.abs() > IDENTITY_TOL {
                return Err(SolutionError::Constraint(format!("{c} = {v} is not zero")));
            }
        }
        Ok(())
    }

    pub(crate) fn complete(&self, b: &Binding) -> Binding {
        let mut out = self.defaults();
        out.extend(b.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }

    /// `key=value` filters: `class=imaged`, a tag, or a constant that may
    /// take the value (`m=3`).
    pub fn matches(&self, filter: &str) -> bool {
        let filter = filter.trim();
        if filter.is_empty() {
            return true;
        }
        if self.tags.iter().any(|t| t == filter) || self.id.contains(filter) {
            return true;
        }
        let Some((k, v)) = filter.split_once('=') else {
            return false;
        };
        let (k, v) = (k.trim(), v.trim());
        if k == "class" {
            return format!("{:?}", self.class()).eq_ignore_ascii_case(v);
        }
        let Ok(x) = v.parse::<f64>() else {
            return false;
        };
        match self.constants.get(k) {
            Some(c) => c.admits(x),
            None => k == "m" && self.m_fixed() == Some(x),
        }
    }

    fn m_fixed(&self) -> Option<f64> {
        let m = match &self.equation {
            EquationSpec::Initial { m, .. } | EquationSpec::Imaged { m, .. } => m.as_str(),
            EquationSpec::Double { .. } => "2",
        };
        self.value(m, &self.defaults()).ok()
    }
}

/// The shipped catalog with generated entries linked to their parents.
pub fn catalog() -> Vec<SolutionEntry> {
    load(SHIPPED).expect("shipped catalog is valid")
}

/// Parses a catalog document and links generated entries to their parents,
/// which must appear earlier. Parent constants and derived names are
/// inherited unless the entry overrides them.
pub fn load(json: &str) -> Result<Vec<SolutionEntry>> {
    let raw: Vec<SolutionEntry> =
        serde_json::from_str(json).map_err(|e| SolutionError::Catalog(e.to_string()))?;
    let mut out: Vec<SolutionEntry> = Vec::with_capacity(raw.len());
    for mut e in raw {
        if out.iter().any(|o| o.id == e.id) {
            return Err(SolutionError::Catalog(format!("duplicate id {}", e.id)));
        }
        match (&e.solution, &mut e.generated) {
            (Some(_), None) => {}
            (None, Some(g)) => {
                let parent = out
                    .iter()
                    .find(|o| o.id == g.from)
                    .ok_or_else(|| {
                        SolutionError::Catalog(format!("{}: unknown parent {}", e.id, g.from))
                    })?
                    .clone();
                for (k, c) in &parent.constants {
                    e.constants.entry(k.clone()).or_insert_with(|| c.clone());
                }
                for (k, v) in &parent.derived {
                    if !e.derived.iter().any(|(n, _)| n == k) {
                        e.derived.push((k.clone(), v.clone()));
                    }
                }
                for c in &parent.constraints {
                    if !e.constraints.contains(c) {
                        e.constraints.push(c.clone());
                    }
                }
                for c in &parent.identities {
                    if !e.identities.contains(c) {
                        e.identities.push(c.clone());
                    }
                }
                g.parent = Some(Box::new(parent));
            }
            _ => {
                return Err(SolutionError::Catalog(format!(
                    "{}: exactly one of solution and generated is required",
                    e.id
                )))
            }
        }
        let bound = e
            .generated
            .iter()
            .flat_map(|g| g.bind.values().map(String::as_str));
        for src in e
            .equation
            .sources()
            .into_iter()
            .chain(e.solution.as_deref())
            .chain(bound)
        {
            parse(src).map_err(|err| SolutionError::Catalog(format!("{}: {err}", e.id)))?;
        }
        out.push(e);
    }
    Ok(out)
}

/// Shipped entries matching every filter.
pub fn filter(filters: &[String]) -> Vec<SolutionEntry> {
    catalog()
        .into_iter()
        .filter(|e| filters.iter().all(|f| e.matches(f)))
        .collect()
}

#[cfg(test)]
mod tests;
