use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::expr::{num_equal_report, Assumptions, EvalOptions, Expr, Point, SampleBox};
use crate::model::{
    AsEvolution, DoubleImagedEquation, Equation, Evolution, ImagedEquation, Interval, RDEquation,
};
use crate::transforms::{
    apply_additional, double_map, imaged_map, pullback_solution, to_double_imaged, to_imaged,
};

use super::{
    Binding, EquationSpec, GridBox, Result, SolutionEntry, SolutionError, Step, CATALOG_TOL,
    DEFAULT_BINDINGS,
};

/// Points with |sn| below this in any Jacobi call are treated as poles.
pub const POLE_GUARD: f64 = 1e-6;
/// Largest fraction of skipped grid points.
pub const MAX_SKIPPED: f64 = 0.2;
/// Tolerance for the parent/target equation match of generated entries.
const LINK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nt: usize,
    pub nx: usize,
    pub tol: f64,
    /// Overrides the entry's box.
    pub grid: Option<GridBox>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nt: 20,
            nx: 20,
            tol: CATALOG_TOL,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub pass: bool,
    pub nt: usize,
    pub nx: usize,
    #[serde(rename = "box")]
    pub grid: GridBox,
    pub max_abs: f64,
    /// |residual| over the largest of |u_t|, |A u_xx|, |B u_x|, |R|.
    pub max_rel: f64,
    pub worst: Option<(f64, f64)>,
    pub evaluated: usize,
    pub skipped: usize,
    /// Points where the solution or its derivatives could not be evaluated
    /// for a reason other than a Jacobi pole.
    pub failed: usize,
    pub tol: f64,
}

/// An entry with its constants bound.
#[derive(Debug, Clone)]
pub struct Instance {
    pub equation: Equation,
    pub evolution: Evolution,
    pub solution: Expr,
}

fn equation(entry: &SolutionEntry, b: &Binding) -> Result<Equation> {
    let r = |s: &str| entry.resolve(s, b);
    let num = |s: &str| -> Result<f64> { Ok(r(s)?.eval(&Point::new())?) };
    let domain = Interval::new(entry.grid.x[0], entry.grid.x[1]);
    Ok(match &entry.equation {
        EquationSpec::Initial { f, g, h, m } => {
            let f = r(f)?;
            let g = match g {
                Some(g) => r(g)?,
                None => f.clone(),
            };
            Equation::Initial(RDEquation::new(f, g, r(h)?, num(m)?, domain))
        }
        EquationSpec::Imaged { F, H, m } => {
            Equation::Imaged(ImagedEquation::new(r(F)?, r(H)?, num(m)?, domain))
        }
        EquationSpec::Double { H, G } => {
            Equation::Double(DoubleImagedEquation::new(r(H)?, r(G)?, domain))
        }
    })
}

fn link_box(g: &GridBox) -> SampleBox {
    SampleBox::new(&[
        ("t", g.t[0], g.t[1]),
        ("x", g.x[0], g.x[1]),
        ("u", 0.5, 2.0),
    ])
}

/// Checks that two evolution equations coincide on the parent's box.
fn same_equation(got: &Evolution, want: &Evolution, g: &GridBox, what: &str) -> Result<()> {
    let b = link_box(g);
    for (x, y) in [(&got.a, &want.a), (&got.b, &want.b), (&got.r, &want.r)] {
        let d = num_equal_report(x, y, &b, 32)?;
        if d.max > LINK_TOL {
            return Err(SolutionError::Generate(format!(
                "{what}: image equation differs from the parent's by {:e}",
                d.max
            )));
        }
    }
    Ok(())
}

/// Binds the constants and builds the equation and the solution. Generated
/// entries instantiate their parent and carry its solution across the step.
pub fn instantiate(entry: &SolutionEntry, binding: &Binding) -> Result<Instance> {
    let b = entry.complete(binding);
    let eq = equation(entry, &b)?;
    let evolution = eq.evolution()?;
    let solution = match (&entry.solution, &entry.generated) {
        (Some(s), _) => entry.resolve(s, &b)?,
        (None, Some(g)) => {
            let parent = g.parent.as_ref().ok_or_else(|| {
                SolutionError::Catalog(format!("{}: parent {} not linked", entry.id, g.from))
            })?;
            let mut pb = parent.complete(&b);
            for (k, v) in &g.bind {
                pb.insert(k.clone(), entry.resolve(v, &b)?.eval(&Point::new())?);
            }
            let p = instantiate(parent, &pb)?;
            let (image, map) = match &g.step {
                Step::Pullback { map, params } => {
                    let params = params
                        .iter()
                        .map(|(k, v)| Ok((k.clone(), entry.resolve(v, &b)?.eval(&Point::new())?)))
                        .collect::<Result<_>>()?;
                    let add = apply_additional(&eq, *map, &params)?;
                    (add.target_evolution.clone(), add.map)
                }
                Step::Preimage => {
                    let Equation::Initial(rd) = &eq else {
                        return Err(SolutionError::Generate(
                            "the preimage step needs an initial-class equation".into(),
                        ));
                    };
                    (
                        Equation::Imaged(to_imaged(rd)?).evolution()?,
                        imaged_map(rd)?,
                    )
                }
                Step::DoublePreimage => {
                    let Equation::Imaged(img) = &eq else {
                        return Err(SolutionError::Generate(
                            "the double preimage step needs an imaged equation".into(),
                        ));
                    };
                    (
                        Equation::Double(to_double_imaged(img)?).evolution()?,
                        double_map(img)?,
                    )
                }
            };
            same_equation(&image, &p.evolution, &parent.grid, &entry.id)?;
            pullback_solution(&p.solution, &map)?
        }
        (None, None) => {
            return Err(SolutionError::Catalog(format!("{}: no solution", entry.id)));
        }
    };
    Ok(Instance {
        equation: eq,
        evolution,
        solution,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |i| lo + step * i as f64)
}

enum Outcome {
    Pole,
    Failed,
    Value { abs: f64, rel: f64 },
}

/// Residual of the bound solution on an nt × nx grid, from symbolic
/// derivatives evaluated pointwise.
pub fn verify_on_grid(
    entry: &SolutionEntry,
    binding: &Binding,
    grid_spec: &GridSpec,
) -> Result<GridReport> {
    entry.check(binding)?;
    let inst = instantiate(entry, binding)?;
    let g = grid_spec.grid.unwrap_or(entry.grid);
    let asm = Assumptions::on(SampleBox::new(&[
        ("t", g.t[0], g.t[1]),
        ("x", g.x[0], g.x[1]),
    ]));
    let u = &inst.solution;
    let ev = &inst.evolution;
    let ux = u.diff_with("x", &asm)?;
    let uxx = ux.diff_with("x", &asm)?;
    let ut = u.diff_with("t", &asm)?;
    let terms = [
        ut,
        (&ev.a * uxx).simplify(),
        (&ev.b * ux).simplify(),
        ev.r.substitute("u", u).simplify(),
    ];
    let guarded = EvalOptions {
        jacobi_guard: Some(POLE_GUARD),
        ..EvalOptions::default()
    };
    let pts: Vec<(f64, f64)> = linspace(g.t[0], g.t[1], grid_spec.nt)
        .flat_map(|t| linspace(g.x[0], g.x[1], grid_spec.nx).map(move |x| (t, x)))
        .collect();
    let outcomes: Vec<Outcome> = pts
        .par_iter()
        .map(|&(t, x)| {
            let p = Point::from_pairs(&[("t", t), ("x", x)]);
            match u.eval(&p) {
                Err(_) => return Outcome::Failed,
                Ok(v) if !v.is_finite() => return Outcome::Failed,
                Ok(_) => {}
            }
            if u.eval_with(&p, &guarded).is_err() {
                return Outcome::Pole;
            }
            let mut vals = [0.0; 4];
            for (v, e) in vals.iter_mut().zip(&terms) {
                match e.eval(&p) {
                    Ok(y) if y.is_finite() => *v = y,
                    _ => return Outcome::Failed,
                }
            }
            let res = vals[0] - vals[1] - vals[2] - vals[3];
            let scale = vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let rel = if scale > 0.0 {
                res.abs() / scale
            } else {
                res.abs()
            };
            Outcome::Value {
                abs: res.abs(),
                rel,
            }
        })
        .collect();
    let mut rep = GridReport {
        pass: false,
        nt: grid_spec.nt,
        nx: grid_spec.nx,
        grid: g,
        max_abs: 0.0,
        max_rel: 0.0,
        worst: None,
        evaluated: 0,
        skipped: 0,
        failed: 0,
        tol: grid_spec.tol,
    };
    for (o, &pt) in outcomes.iter().zip(&pts) {
        match *o {
            Outcome::Pole => rep.skipped += 1,
            Outcome::Failed => rep.failed += 1,
            Outcome::Value { abs, rel } => {
                rep.evaluated += 1;
                rep.max_abs = rep.max_abs.max(abs);
                if rep.worst.is_none() || rel > rep.max_rel {
                    rep.max_rel = rel;
                    rep.worst = Some(pt);
                }
            }
        }
    }
    let total = pts.len();
    if total == 0 || rep.skipped as f64 >= MAX_SKIPPED * total as f64 {
        return Err(SolutionError::TooManySkipped {
            skipped: rep.skipped,
            total,
        });
    }
    rep.pass = rep.failed == 0 && rep.evaluated > 0 && rep.max_rel <= grid_spec.tol;
    Ok(rep)
}

/// Verifies an entry for `n` bindings drawn with `seed`.
pub fn verify_entry(
    entry: &SolutionEntry,
    n: usize,
    seed: u64,
    grid_spec: &GridSpec,
) -> Result<Vec<(Binding, GridReport)>> {
    let n = if n == 0 { DEFAULT_BINDINGS } else { n };
    entry
        .bindings(n, seed)?
        .into_iter()
        .map(|b| {
            let r = verify_on_grid(entry, &b, grid_spec)?;
            Ok((b, r))
        })
        .collect()
}
