//! Row templates and operator bases of the three group-classification lists.
//!
//! Rows are numbered 0..6 in both the imaged (`T1`) and double-imaged (`T2`)
//! lists; the initial-class rows (`T3`) are "1.1", "1.2", …, "6". Templates
//! with a power or Gaussian factor are written in y = x − x0, since the
//! translation x ↦ x + x0 belongs to every equivalence group in play.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Expr, Func};
use crate::model::{Interval, VectorField};

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("no row `{0}` in this list")]
    UnknownRow(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("preimage unavailable: {0}")]
    Preimage(String),
}

pub type Result<T> = std::result::Result<T, TableError>;

/// Parameter lookup with a readable error.
pub fn param(p: &Params, name: &str) -> Result<f64> {
    p.get(name)
        .copied()
        .ok_or_else(|| TableError::MissingParam(name.to_string()))
}

fn opt(p: &Params, name: &str) -> f64 {
    p.get(name).copied().unwrap_or(0.0)
}

pub fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn n(v: f64) -> Expr {
    Expr::num(v)
}

fn t() -> Expr {
    Expr::sym("t")
}

fn u() -> Expr {
    Expr::sym("u")
}

/// x − x0, or plain x when the shift is zero.
pub fn shifted_x(x0: f64) -> Expr {
    if x0 == 0.0 {
        Expr::sym("x")
    } else {
        Expr::sym("x") - x0
    }
}

pub fn alpha(q: f64, m: f64) -> f64 {
    q / (1.0 - m)
}

pub fn beta(p: f64, m: f64) -> f64 {
    2.0 * p / (m - 1.0)
}

/// Imaged list: (F, H) of a row.
#[allow(non_snake_case)]
pub fn imaged_template(row: &str, m: f64, p: &Params) -> Result<(Expr, Expr)> {
    let delta = param(p, "delta")?;
    let x = Expr::sym("x");
    let y = shifted_x(opt(p, "x0"));
    Ok(match row {
        "1" => {
            let q = param(p, "q")?;
            (n(param(p, "a1")?), delta * (q * &x).exp())
        }
        "2" => {
            let q = param(p, "q")?;
            let a = alpha(q, m);
            (n(-a * a), delta * (q * &x).exp())
        }
        "3" => {
            let k = param(p, "k")?;
            (param(p, "a2")? * y.powf(-2.0), delta * y.powf(k))
        }
        "4" => {
            let (k, pp, a2) = (param(p, "k")?, param(p, "p")?, param(p, "a2")?);
            let b = beta(pp, m);
            let F =
                -(b * b) * y.powf(2.0) + b * (2.0 * k + 5.0 - m) / (1.0 - m) + a2 * y.powf(-2.0);
            (F, delta * y.powf(k) * (pp * y.powf(2.0)).exp())
        }
        "5" | "6" => {
            let pp = param(p, "p")?;
            let b = beta(pp, m);
            let a3 = if row == "5" {
                param(p, "a3")?
            } else {
                (5.0 - m) / (1.0 - m)
            };
            (
                -(b * b) * y.powf(2.0) + b * a3,
                delta * (pp * y.powf(2.0)).exp(),
            )
        }
        _ => return Err(TableError::UnknownRow(row.to_string())),
    })
}

/// Operator basis of an imaged-list row; `u` stands for v.
pub fn imaged_basis(row: &str, m: f64, p: &Params) -> Result<Vec<VectorField>> {
    let y = shifted_x(opt(p, "x0"));
    let mut basis = vec![VectorField::dt()];
    match row {
        "0" => {}
        "1" | "2" => {
            let a = alpha(param(p, "q")?, m);
            basis.push(VectorField::new(Expr::zero(), Expr::one(), a * u()));
            if row == "2" {
                let s = &y - 2.0 * a * t();
                basis.push(VectorField::new(
                    2.0 * t(),
                    s.clone(),
                    (a * s + 2.0 / (1.0 - m)) * u(),
                ));
            }
        }
        "3" => {
            let k = param(p, "k")?;
            basis.push(VectorField::new(2.0 * t(), y, (k + 2.0) / (1.0 - m) * u()));
        }
        "4" => {
            let k = param(p, "k")?;
            let b = beta(param(p, "p")?, m);
            basis.push(gaussian_dilation(b, &y, (k + 2.0) / (1.0 - m)));
        }
        "5" | "6" => {
            let b = beta(param(p, "p")?, m);
            let e2 = (2.0 * b * t()).exp();
            basis.push(VectorField::new(
                Expr::zero(),
                e2.clone(),
                -(b * &e2 * &y * u()),
            ));
            if row == "6" {
                basis.push(gaussian_dilation(b, &y, 2.0 / (1.0 - m)));
            }
        }
        _ => return Err(TableError::UnknownRow(row.to_string())),
    }
    Ok(basis)
}

/// e^{4βt}[∂t + 2βy∂x − 2β(βy² − c)v∂v]
fn gaussian_dilation(b: f64, y: &Expr, c: f64) -> VectorField {
    let e4 = (4.0 * b * t()).exp();
    VectorField::new(
        e4.clone(),
        2.0 * b * &e4 * y,
        -2.0 * b * &e4 * (b * y.powf(2.0) - c) * u(),
    )
}

/// P(y) of the double-imaged row 4.
pub fn row4_polynomial(k: f64, p: f64, b2: f64, y: &Expr) -> Expr {
    let y2 = y.powf(2.0);
    p * p * (2.0 * p * &y2 + 1.0) * (2.0 * p * &y2 - 11.0) * y.powf(4.0)
        + 8.0 * k * p.powi(3) * y.powf(6.0)
        + 2.0 * k * (3.0 * k - 5.0) * p * p * y.powf(4.0)
        + k * (k + 1.0) * (2.0 * k + 3.0) * p * y2
        + b2
}

/// Double-imaged list: (H, G) of a row.
#[allow(non_snake_case)]
pub fn double_template(row: &str, p: &Params) -> Result<(Expr, Expr)> {
    let delta = param(p, "delta")?;
    let x = Expr::sym("x");
    let y = shifted_x(opt(p, "x0"));
    Ok(match row {
        "1" | "2" => {
            let q = param(p, "q")?;
            let b1 = if row == "1" {
                param(p, "b1")?
            } else {
                q.powi(4) / (4.0 * delta)
            };
            (delta * (q * &x).exp(), b1 * (-q * &x).exp())
        }
        "3" => {
            let k = param(p, "k")?;
            (
                delta * y.powf(k),
                param(p, "b2")? / delta * y.powf(-k - 4.0),
            )
        }
        "4" => {
            let (k, pp, b2) = (param(p, "k")?, param(p, "p")?, param(p, "b2")?);
            let G = (1.0 / delta)
                * y.powf(-k - 4.0)
                * (-pp * y.powf(2.0)).exp()
                * row4_polynomial(k, pp, b2, &y);
            (delta * y.powf(k) * (pp * y.powf(2.0)).exp(), G)
        }
        "5" | "6" => {
            let pp = param(p, "p")?;
            let b3 = if row == "5" { param(p, "b3")? } else { -11.0 };
            let y2 = y.powf(2.0);
            let G = pp * pp / delta
                * (4.0 * pp * pp * y.powf(4.0) - 20.0 * pp * &y2 + b3)
                * (-pp * &y2).exp();
            (delta * (pp * &y2).exp(), G)
        }
        _ => return Err(TableError::UnknownRow(row.to_string())),
    })
}

/// Operator basis of a double-imaged-list row; `u` stands for w.
pub fn double_basis(row: &str, p: &Params) -> Result<Vec<VectorField>> {
    let y = shifted_x(opt(p, "x0"));
    let x = Expr::sym("x");
    let mut basis = vec![VectorField::dt()];
    match row {
        "0" => {}
        "1" | "2" => {
            let q = param(p, "q")?;
            basis.push(VectorField::new(Expr::zero(), Expr::one(), -q * u()));
            if row == "2" {
                let delta = param(p, "delta")?;
                let eta =
                    -((q * &x + 2.0 * q * q * t() + 2.0) * u() + q * q / delta * (-q * &x).exp());
                basis.push(VectorField::new(2.0 * t(), &x + 2.0 * q * t(), eta));
            }
        }
        "3" => {
            let k = param(p, "k")?;
            basis.push(VectorField::new(2.0 * t(), y, -(k + 2.0) * u()));
        }
        "4" => {
            let (k, pp, delta) = (param(p, "k")?, param(p, "p")?, param(p, "delta")?);
            let e8 = (8.0 * pp * t()).exp();
            let y2 = y.powf(2.0);
            let inner = (2.0 * pp * &y2 + k + 2.0) * u()
                + 2.0
                    * (pp / delta)
                    * (4.0 * pp * &y2 + 2.0 * k + 3.0)
                    * y.powf(-k)
                    * (-pp * &y2).exp();
            basis.push(VectorField::new(
                e8.clone(),
                4.0 * pp * &e8 * &y,
                -4.0 * pp * &e8 * inner,
            ));
        }
        "5" | "6" => {
            let (pp, delta) = (param(p, "p")?, param(p, "delta")?);
            let y2 = y.powf(2.0);
            let gauss = (-pp * &y2).exp();
            let e4 = (4.0 * pp * t()).exp();
            let eta = -2.0 * pp * &e4 * &y * (u() + 2.0 * (pp / delta) * &gauss);
            basis.push(VectorField::new(Expr::zero(), e4, eta));
            if row == "6" {
                let e8 = (8.0 * pp * t()).exp();
                let inner = (pp * &y2 + 1.0) * u() + (pp / delta) * (4.0 * pp * &y2 + 3.0) * gauss;
                basis.push(VectorField::new(
                    e8.clone(),
                    4.0 * pp * &e8 * &y,
                    -8.0 * pp * &e8 * inner,
                ));
            }
        }
        _ => return Err(TableError::UnknownRow(row.to_string())),
    }
    Ok(basis)
}

/// Initial-class subcase of an imaged-list row.
pub fn initial_row(row: &str, p: &Params) -> Result<String> {
    Ok(match row {
        "0" | "4" | "5" | "6" => row.to_string(),
        "1" => {
            let a1 = param(p, "a1")?;
            if a1.abs() <= ZERO_TOL {
                "1.1"
            } else if a1 > 0.0 {
                "1.2"
            } else {
                "1.3"
            }
            .to_string()
        }
        "2" => if param(p, "q")?.abs() <= ZERO_TOL {
            "2.1"
        } else {
            "2.2"
        }
        .to_string(),
        "3" => if param(p, "a2")? <= 0.25 + ZERO_TOL {
            "3.1"
        } else {
            "3.2"
        }
        .to_string(),
        _ => return Err(TableError::UnknownRow(row.to_string())),
    })
}

/// Initial list: the normalized (f, h) of a row, with f = g. Rows 4–6 use
/// the Whittaker M branch for f1, f2, f3.
pub fn initial_template(row: &str, m: f64, p: &Params) -> Result<(Expr, Expr)> {
    let delta = param(p, "delta")?;
    let x = Expr::sym("x");
    let y = shifted_x(opt(p, "x0"));
    let whit_row = |kappa: f64, mu: f64, power: f64| -> Result<(Expr, Expr)> {
        let pp = param(p, "p")?;
        let w = whittaker(kappa, mu, beta(pp, m) * y.powf(2.0));
        let h = delta * y.powf(power) * (pp * y.powf(2.0)).exp() * w.abs().powf(m + 1.0);
        Ok((y.powf(-1.0) * w.powf(2.0), h))
    };
    Ok(match row {
        "0" => (Expr::one(), n(delta)),
        "1.1" => (Expr::one(), delta * x.exp()),
        "1.2" => {
            let c = x.cos();
            (
                c.powf(2.0),
                delta * (param(p, "q")? * &x).exp() * c.abs().powf(m + 1.0),
            )
        }
        "1.3" => (x.exp(), delta * (param(p, "r")? * &x).exp()),
        "2.1" => (Expr::one(), n(delta)),
        "2.2" => (x.exp(), delta * x.exp()),
        "3.1" => (
            y.powf(param(p, "lambda")?),
            delta * y.powf(param(p, "gamma")?),
        ),
        "3.2" => {
            let c = (param(p, "rho")? * y.ln()).cos();
            (
                &y * c.powf(2.0),
                delta * y.powf(param(p, "l")?) * c.abs().powf(m + 1.0),
            )
        }
        "4" => {
            let s = param(p, "s")?;
            let a2 = param(p, "a2")?;
            if a2 > 0.25 {
                return Err(TableError::Constraint(
                    "row 4 with a2 > 1/4 has no real Whittaker M branch".into(),
                ));
            }
            whit_row(
                (s + 3.0) / (2.0 * (1.0 - m)),
                (1.0 - 4.0 * a2).sqrt() / 4.0,
                s,
            )?
        }
        "5" => whit_row(param(p, "a3")? / 4.0, 0.25, -(m + 1.0) / 2.0)?,
        "6" => whit_row((5.0 - m) / (4.0 * (1.0 - m)), 0.25, -(m + 1.0) / 2.0)?,
        _ => return Err(TableError::UnknownRow(row.to_string())),
    })
}

/// Parameters below this magnitude count as zero when choosing subcases.
pub const ZERO_TOL: f64 = 1e-9;

/// A preimage (f, h) in the initial class together with √|f|, which is
/// positive on the requested domain.
#[derive(Debug, Clone)]
pub struct Preimage {
    pub row: String,
    pub f: Expr,
    pub h: Expr,
    pub root: Expr,
}

fn whittaker(kappa: f64, mu: f64, z: Expr) -> Expr {
    Expr::call(Func::WhitM, vec![n(kappa), n(mu), z])
}

/// Largest Kummer argument the Whittaker preimages may reach on the domain.
const WHITTAKER_ARG_LIMIT: f64 = 30.0;

/// Picks one (f, h) of the initial class whose image is the given imaged-list
/// row. Power and Gaussian rows need the domain to the right of x0, and the
/// Whittaker rows need β > 0 so that the Whittaker argument βy² is positive.
pub fn initial_preimage(row: &str, m: f64, p: &Params, domain: Interval) -> Result<Preimage> {
    let x0 = opt(p, "x0");
    let x = Expr::sym("x");
    let y = shifted_x(x0);
    let sub = initial_row(row, p)?;
    let (f, root) = match sub.as_str() {
        "1.1" | "2.1" => (Expr::one(), Expr::one()),
        "1.2" => {
            let w = param(p, "a1")?.sqrt();
            // Keep the zeros of cos(w(x − c)) off the domain.
            let mut c = 0.0;
            let bad = |c: f64| {
                let (lo, hi) = (w * (domain.lo - c), w * (domain.hi - c));
                let k = ((lo + std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).floor() + 1.0;
                k * std::f64::consts::PI - std::f64::consts::FRAC_PI_2 < hi
            };
            if bad(c) {
                c = 0.5 * (domain.lo + domain.hi);
                if bad(c) {
                    return Err(TableError::Preimage(format!(
                        "domain longer than π/√a1 = {}",
                        std::f64::consts::PI / w
                    )));
                }
            }
            let arg = if c == 0.0 { w * &x } else { w * (&x - c) };
            let cos = arg.cos();
            (cos.powf(2.0), cos.abs())
        }
        "1.3" => {
            let w = (-param(p, "a1")?).sqrt();
            ((2.0 * w * &x).exp(), (w * &x).exp())
        }
        "2.2" => {
            let a = alpha(param(p, "q")?, m);
            ((2.0 * a * &x).exp(), (a * &x).exp())
        }
        "3.1" | "3.2" | "4" | "5" | "6" if domain.lo < x0 => {
            return Err(TableError::Preimage(format!(
                "domain must lie to the right of x0 = {x0}"
            )));
        }
        "3.1" => {
            let nu = 0.5 * (1.0 - (1.0 - 4.0 * param(p, "a2")?).max(0.0).sqrt());
            (y.powf(2.0 * nu), y.powf(nu))
        }
        "3.2" => {
            let rho = 0.5 * (4.0 * param(p, "a2")? - 1.0).sqrt();
            let cos = (rho * y.ln()).cos();
            (&y * cos.powf(2.0), y.powf(0.5) * cos.abs())
        }
        "4" | "5" | "6" => {
            let b = beta(param(p, "p")?, m);
            if b <= 0.0 {
                return Err(TableError::Preimage(
                    "the Whittaker preimage needs β > 0".into(),
                ));
            }
            if b * (domain.hi - x0).powi(2) > WHITTAKER_ARG_LIMIT {
                return Err(TableError::Preimage(format!(
                    "βy² exceeds {WHITTAKER_ARG_LIMIT} on the domain"
                )));
            }
            let (kappa, mu) = match sub.as_str() {
                "4" => {
                    let a2 = param(p, "a2")?;
                    if a2 > 0.25 {
                        return Err(TableError::Preimage(
                            "row 4 with a2 > 1/4 has no real Whittaker M preimage".into(),
                        ));
                    }
                    let k = param(p, "k")?;
                    (
                        (2.0 * k + 5.0 - m) / (4.0 * (1.0 - m)),
                        (1.0 - 4.0 * a2).sqrt() / 4.0,
                    )
                }
                "5" => (param(p, "a3")? / 4.0, 0.25),
                _ => ((5.0 - m) / (4.0 * (1.0 - m)), 0.25),
            };
            let w = whittaker(kappa, mu, b * y.powf(2.0));
            if domain.sign_of(&w).is_none() {
                return Err(TableError::Preimage(
                    "the Whittaker factor vanishes on the domain".into(),
                ));
            }
            (y.powf(-1.0) * w.powf(2.0), y.powf(-0.5) * w.abs())
        }
        _ => return Err(TableError::UnknownRow(row.to_string())),
    };
    let (_, big_h) = imaged_template(row, m, p)?;
    let h = (big_h * root.powf(m + 1.0)).simplify();
    Ok(Preimage {
        row: sub,
        f,
        h,
        root,
    })
}
