//! Template fitting for the imaged and double-imaged lists.
//!
//! H fixes the shape (exponential, power, power-Gaussian, Gaussian) through
//! the logarithmic derivative L' = H'/H, whose form is linear in a known
//! function of x for every row. The remaining linear parameter sits in F or
//! G and is found by one-dimensional least squares. Every candidate is then
//! confirmed against the input on the sample box.

use nalgebra::{DMatrix, DVector};

use crate::expr::{num_equal_report, Expr, Point, SampleBox};
use crate::model::Interval;
use crate::tables::{self, Params, ZERO_TOL};

use super::Result;

pub(crate) const FIT_POINTS: usize = 32;
/// Relative residual above which a least-squares fit is abandoned early.
const FIT_TOL: f64 = 1e-7;
/// Final template agreement.
pub const CONFIRM_TOL: f64 = 1e-9;
/// |L'| below this counts as a constant H.
const FLAT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum List {
    Imaged,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Exp,
    Power,
    PowerGauss,
    Gauss,
}

pub(crate) const ROWS: [&str; 6] = ["6", "5", "4", "3", "2", "1"];

fn shape(row: &str) -> Shape {
    match row {
        "1" | "2" => Shape::Exp,
        "3" => Shape::Power,
        "4" => Shape::PowerGauss,
        _ => Shape::Gauss,
    }
}

/// The free parameter that enters F (or G) linearly, if any.
fn linear_param(list: List, row: &str) -> Option<&'static str> {
    match (list, row) {
        (List::Imaged, "1") => Some("a1"),
        (List::Imaged, "3" | "4") => Some("a2"),
        (List::Imaged, "5") => Some("a3"),
        (List::Double, "1") => Some("b1"),
        (List::Double, "3" | "4") => Some("b2"),
        (List::Double, "5") => Some("b3"),
        _ => None,
    }
}

/// (H, F) or (H, G) of a row.
fn template(list: List, m: f64, row: &str, p: &Params) -> Option<(Expr, Expr)> {
    match list {
        List::Imaged => tables::imaged_template(row, m, p).ok().map(|(f, h)| (h, f)),
        List::Double => tables::double_template(row, p).ok(),
    }
}

fn nonzero(v: f64, scale: f64) -> bool {
    v.abs() > ZERO_TOL * scale.abs().max(1.0)
}

/// Footnote inequalities of each row. Rows excluded here are covered by a
/// more specific row tried earlier.
fn admissible(list: List, m: f64, row: &str, p: &Params) -> bool {
    let g = |k: &str| p.get(k).copied().unwrap_or(0.0);
    match (list, row) {
        (List::Imaged, "1") => {
            let a = tables::alpha(g("q"), m);
            nonzero(g("a1") + a * a, a * a) && nonzero(g("q").hypot(g("a1")), 1.0)
        }
        (List::Imaged, "3") => nonzero(g("k").hypot(g("a2")), 1.0),
        (List::Imaged, "5") => {
            let six = (5.0 - m) / (1.0 - m);
            nonzero(g("p"), 1.0)
                && nonzero(g("a3") - six, six)
                && (m != 2.0 || nonzero(g("a3") - 5.0, 5.0))
        }
        (List::Double, "1") => {
            let b = g("q").powi(4) / (4.0 * g("delta"));
            nonzero(g("b1") - b, b)
        }
        (List::Double, "3") => nonzero(g("k").hypot(g("b2")), 1.0),
        (List::Double, "5") => nonzero(g("p"), 1.0) && nonzero(g("b3") + 11.0, 11.0),
        (_, "4" | "6") => nonzero(g("p"), 1.0),
        _ => true,
    }
}

pub(crate) struct Grid {
    xs: Vec<f64>,
    pub sample: SampleBox,
}

impl Grid {
    pub fn new(domain: Interval) -> Grid {
        let sample = domain.sample_box();
        let xs = sample
            .points(FIT_POINTS)
            .map(|p| p.get("x").unwrap_or(f64::NAN))
            .collect();
        Grid { xs, sample }
    }

    pub fn values(&self, e: &Expr) -> Option<Vec<f64>> {
        self.xs
            .iter()
            .map(|&x| {
                e.eval(&Point::from_pairs(&[("x", x)]))
                    .ok()
                    .filter(|v| v.is_finite())
            })
            .collect()
    }
}

/// Least squares Σ c_j col_j ≈ rhs, rejected when the residual is not small
/// relative to the data.
fn lstsq(cols: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(rhs.len(), cols.len(), |i, j| cols[j][i]);
    let b = DVector::from_column_slice(rhs);
    let sol = a.clone().svd(true, true).solve(&b, 1e-300).ok()?;
    let res = (&a * &sol - &b).amax();
    let scale = rhs.iter().fold(1f64, |s, v| s.max(v.abs()));
    (res <= FIT_TOL * scale && sol.iter().all(|v| v.is_finite()))
        .then(|| sol.iter().copied().collect())
}

/// y ≈ a + b·x
fn line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    lstsq(&[vec![1.0; xs.len()], xs.to_vec()], ys).map(|s| (s[0], s[1]))
}

/// Best c in target ≈ base + c·dir.
fn scalar(base: &[f64], dir: &[f64], target: &[f64]) -> Option<f64> {
    let num: f64 = dir
        .iter()
        .zip(base.iter().zip(target))
        .map(|(d, (b, t))| d * (t - b))
        .sum();
    let den: f64 = dir.iter().map(|d| d * d).sum();
    (den > 0.0).then(|| num / den).filter(|c| c.is_finite())
}

fn snap(v: f64) -> f64 {
    if v.abs() < ZERO_TOL {
        0.0
    } else {
        v
    }
}

/// Sampled data of one equation to be matched against a list.
pub(crate) struct Target<'a> {
    pub list: List,
    pub m: f64,
    pub h: &'a Expr,
    pub other: &'a Expr,
    grid: Grid,
    hv: Vec<f64>,
    ov: Vec<f64>,
    lp: Vec<f64>,
    lp_expr: Expr,
}

impl<'a> Target<'a> {
    /// None when H or the other coefficient cannot be sampled.
    pub fn new(
        list: List,
        m: f64,
        h: &'a Expr,
        other: &'a Expr,
        domain: Interval,
    ) -> Result<Option<Target<'a>>> {
        let grid = Grid::new(domain);
        let lp_expr = (h.diff("x")? / h).simplify();
        let (Some(hv), Some(ov), Some(lp)) =
            (grid.values(h), grid.values(other), grid.values(&lp_expr))
        else {
            return Ok(None);
        };
        Ok(Some(Target {
            list,
            m,
            h,
            other,
            grid,
            hv,
            ov,
            lp,
            lp_expr,
        }))
    }

    fn flat(&self) -> bool {
        self.lp.iter().all(|v| v.abs() <= FLAT)
    }

    /// x0 of the power row with constant H, read off the other coefficient:
    /// F ∝ y^{-2} in the imaged list and G ∝ y^{-4} in the double list.
    fn x0_from_other(&self) -> Option<f64> {
        let e = match self.list {
            List::Imaged => -0.5,
            List::Double => -0.25,
        };
        if self.ov.contains(&0.0) {
            return None;
        }
        let r: Vec<f64> = self.ov.iter().map(|v| v.abs().powf(e)).collect();
        let (a, b) = line(&self.grid.xs, &r)?;
        nonzero(b, 0.0).then(|| -a / b)
    }

    fn gauss(&self) -> Option<(f64, f64)> {
        let (a, b) = line(&self.grid.xs, &self.lp)?;
        nonzero(b, 0.0).then(|| (b / 2.0, -a / b))
    }

    fn shape_params(&self, s: Shape) -> Option<Params> {
        let mut p = Params::new();
        match s {
            Shape::Exp => {
                let q = self.lp.iter().sum::<f64>() / self.lp.len() as f64;
                let scale = q.abs().max(1.0);
                if self.lp.iter().any(|v| (v - q).abs() > FIT_TOL * scale) {
                    return None;
                }
                p.insert("q".into(), snap(q));
            }
            Shape::Gauss => {
                let (pp, x0) = self.gauss()?;
                p.insert("p".into(), pp);
                p.insert("x0".into(), x0);
            }
            Shape::Power => {
                let (k, x0) = if self.flat() {
                    (0.0, self.x0_from_other()?)
                } else {
                    if self.lp.iter().any(|v| v.abs() <= FLAT) {
                        return None;
                    }
                    let inv: Vec<f64> = self.lp.iter().map(|v| 1.0 / v).collect();
                    let (a, b) = line(&self.grid.xs, &inv)?;
                    if !nonzero(b, 0.0) {
                        return None;
                    }
                    (1.0 / b, -a / b)
                };
                p.insert("k".into(), snap(k));
                p.insert("x0".into(), x0);
            }
            Shape::PowerGauss => {
                // L''' = 2k/y³ isolates the pole of the power factor.
                let l3 = self.lp_expr.diff("x").ok()?.diff("x").ok()?.simplify();
                let l3 = self.grid.values(&l3)?;
                let scale = self.lp.iter().fold(1f64, |s, v| s.max(v.abs()));
                let (k, pp, x0) = if l3.iter().all(|v| v.abs() <= FLAT * scale) {
                    let (pp, x0) = self.gauss()?;
                    (0.0, pp, x0)
                } else {
                    if l3.contains(&0.0) {
                        return None;
                    }
                    let c: Vec<f64> = l3.iter().map(|v| (1.0 / v).cbrt()).collect();
                    let (a, b) = line(&self.grid.xs, &c)?;
                    if !nonzero(b, 0.0) {
                        return None;
                    }
                    let x0 = -a / b;
                    let ys: Vec<f64> = self.grid.xs.iter().map(|x| x - x0).collect();
                    let cols = [
                        ys.iter().map(|y| 1.0 / y).collect(),
                        ys.iter().map(|y| 2.0 * y).collect(),
                    ];
                    let s = lstsq(&cols, &self.lp)?;
                    (s[0], s[1], x0)
                };
                p.insert("k".into(), snap(k));
                p.insert("p".into(), pp);
                p.insert("x0".into(), x0);
            }
        }
        if let Some(x0) = p.get("x0").copied() {
            if snap(x0) == 0.0 {
                p.remove("x0");
            }
        }
        Some(p)
    }

    /// Exponent and pole of H read as a pure power, unconfirmed.
    pub fn fit_power(&self) -> Option<Params> {
        self.shape_params(Shape::Power)
    }

    /// Fitted and confirmed parameters of a row, or None.
    pub fn fit_row(&self, row: &str) -> Option<Params> {
        let mut p = self.shape_params(shape(row))?;
        let lin = linear_param(self.list, row);
        p.insert("delta".into(), 1.0);
        if let Some(name) = lin {
            p.insert(name.into(), 0.0);
        }
        let (h1, _) = template(self.list, self.m, row, &p)?;
        let s = self.grid.values(&h1)?;
        let delta = scalar(&vec![0.0; s.len()], &s, &self.hv)?;
        if delta == 0.0 {
            return None;
        }
        p.insert("delta".into(), delta);
        if let Some(name) = lin {
            let (_, o0) = template(self.list, self.m, row, &p)?;
            p.insert(name.into(), 1.0);
            let (_, o1) = template(self.list, self.m, row, &p)?;
            let base = self.grid.values(&o0)?;
            let dir: Vec<f64> = self
                .grid
                .values(&o1)?
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect();
            p.insert(name.into(), snap(scalar(&base, &dir, &self.ov)?));
        }
        if !self.confirm(row, &p) || !admissible(self.list, self.m, row, &p) {
            return None;
        }
        Some(p)
    }

    fn confirm(&self, row: &str, p: &Params) -> bool {
        let Some((h, o)) = template(self.list, self.m, row, p) else {
            return false;
        };
        let close = |a: &Expr, b: &Expr| {
            num_equal_report(a, b, &self.grid.sample, FIT_POINTS)
                .map(|d| d.max <= CONFIRM_TOL && d.evaluated == FIT_POINTS)
                .unwrap_or(false)
        };
        close(&h, self.h) && close(&o, self.other)
    }

    /// All confirmed rows, most specific first.
    pub fn matches(&self) -> Vec<(&'static str, Params)> {
        ROWS.iter()
            .filter_map(|r| self.fit_row(r).map(|p| (*r, p)))
            .collect()
    }
}
