use serde_json::{json, Value};

use rdsym_core::classify;
use rdsym_core::expr::{parse, Expr, SampleBox};
use rdsym_core::model::{
    DoubleImagedEquation, Equation, ImagedEquation, Interval, RDEquation, Validate, VectorField,
};
use rdsym_core::solutions::{
    self, verify_entry, verify_on_grid, EquationSpec, GridBox, GridSpec, SolutionEntry,
    SolutionError,
};
use rdsym_core::symmetry::{
    verify_algebra_closure, verify_lie, verify_nonclassical, JetBox, SymmetryError, DEFAULT_TOL,
};
use rdsym_core::tables::Params;
use rdsym_core::transforms::{
    apply_additional, double_map, gauge_fg, imaged_map, to_double_imaged, to_imaged, AdditionalMap,
    GaugeResult,
};

use crate::{Class, CliError, EqArgs, MapArgs, MapTarget, Outcome, VerifyArgs, What};

type Result<T> = std::result::Result<T, CliError>;

macro_rules! to_json {
    ($v:expr) => {
        serde_json::to_value($v).map_err(invalid)
    };
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn print(v: &Value) {
    use std::io::Write;
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{v:#}");
}

fn range(s: &str) -> Option<(String, f64, f64)> {
    let (name, r) = s.trim().split_once(':')?;
    let (lo, hi) = r.split_once("..")?;
    let (lo, hi) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?);
    Some((name.trim().to_string(), lo, hi))
}

fn domain(s: &str) -> Result<Interval> {
    match range(s) {
        Some((n, lo, hi)) if n == "x" && lo < hi => Ok(Interval::new(lo, hi)),
        _ => Err(CliError::Usage(format!(
            "--domain expects \"x:lo..hi\", got `{s}`"
        ))),
    }
}

fn grid_box(s: &str, d: Interval) -> Result<GridBox> {
    let mut g = GridBox {
        t: [0.5, 2.0],
        x: [d.lo, d.hi],
    };
    for part in s.split(',') {
        match range(part) {
            Some((n, lo, hi)) if n == "t" && lo < hi => g.t = [lo, hi],
            Some((n, lo, hi)) if n == "x" && lo < hi => g.x = [lo, hi],
            _ => {
                return Err(CliError::Usage(format!(
                    "--box expects \"t:lo..hi,x:lo..hi\", got `{s}`"
                )))
            }
        }
    }
    Ok(g)
}

fn expr(s: &str) -> Result<Expr> {
    parse(s).map_err(|e| CliError::Validation(format!("`{s}`: {e}")))
}

fn need<'a>(v: &'a Option<String>, flag: &str, class: Class) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for the {class:?} class")))
}

fn need_m(a: &EqArgs) -> Result<f64> {
    a.m.ok_or_else(|| CliError::Usage("--m is required".into()))
}

/// The equation in grammar strings, as a catalog entry stores it.
fn equation_spec(a: &EqArgs) -> Result<EquationSpec> {
    Ok(match a.class {
        Class::Initial => EquationSpec::Initial {
            f: need(&a.f, "f", a.class)?.into(),
            g: a.g.clone(),
            h: need(&a.h, "h", a.class)?.into(),
            m: need_m(a)?.to_string(),
        },
        Class::Imaged => EquationSpec::Imaged {
            F: a.big_f.clone().unwrap_or_else(|| "0".into()),
            H: need(&a.big_h, "H", a.class)?.into(),
            m: need_m(a)?.to_string(),
        },
        Class::Double => EquationSpec::Double {
            H: need(&a.big_h, "H", a.class)?.into(),
            G: a.big_g.clone().unwrap_or_else(|| "0".into()),
        },
    })
}

fn equation(a: &EqArgs) -> Result<Equation> {
    let d = domain(&a.domain)?;
    let eq = match equation_spec(a)? {
        EquationSpec::Initial { f, g, h, .. } => {
            let f = expr(&f)?;
            let g = match g {
                Some(g) => expr(&g)?,
                None => f.clone(),
            };
            Equation::Initial(RDEquation::new(f, g, expr(&h)?, need_m(a)?, d))
        }
        EquationSpec::Imaged { F, H, .. } => {
            Equation::Imaged(ImagedEquation::new(expr(&F)?, expr(&H)?, need_m(a)?, d))
        }
        EquationSpec::Double { H, G } => {
            Equation::Double(DoubleImagedEquation::new(expr(&H)?, expr(&G)?, d))
        }
    };
    let v = eq.validate();
    if !v.is_empty() {
        let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Validation(format!(
            "invalid equation: {}",
            msg.join("; ")
        )));
    }
    Ok(eq)
}

pub fn classify(a: &EqArgs) -> Result<Outcome> {
    let r = classify::classify(&equation(a)?).map_err(invalid)?;
    print(&serde_json::to_value(&r).map_err(invalid)?);
    Ok(Outcome::Pass)
}

fn with_map(eq: Value, map: Value) -> Value {
    let mut out = eq;
    if let Value::Object(o) = &mut out {
        o.insert("transformation".into(), map);
    }
    out
}

fn params(list: &[String]) -> Result<Params> {
    list.iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--param expects name=value, got `{s}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--param {k}: `{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

pub fn map(a: &MapArgs) -> Result<Outcome> {
    let mut eq_args = a.eq.clone();
    if a.to == Some(MapTarget::Double) && eq_args.class == Class::Initial {
        eq_args.class = Class::Imaged;
    }
    if a.to == Some(MapTarget::Double) && eq_args.m.is_none() {
        eq_args.m = Some(2.0);
    }
    if let Some(name) = &a.additional {
        let which: AdditionalMap = name.parse().map_err(CliError::Usage)?;
        eq_args.class = match which.class() {
            rdsym_core::model::EqClass::Initial => Class::Initial,
            rdsym_core::model::EqClass::Imaged => Class::Imaged,
            rdsym_core::model::EqClass::Double => Class::Double,
        };
        if eq_args.class == Class::Double {
            eq_args.m.get_or_insert(2.0);
        }
        let eq = equation(&eq_args)?;
        let add = apply_additional(&eq, which, &params(&a.params)?).map_err(invalid)?;
        let out = json!({
            "map": which.name(),
            "target_case": add.target_case.as_ref().map(|(c, _)| c.to_string()),
            "target_params": add.target_case.as_ref().map(|(_, p)| p.clone()),
            "target": to_json!(&add.target)?,
            "deviation": add.deviation,
            "transformation": to_json!(&add.map)?,
        });
        print(&out);
        return Ok(Outcome::Pass);
    }
    let to =
        a.to.ok_or_else(|| CliError::Usage("one of --to and --additional is required".into()))?;
    let eq = equation(&eq_args)?;
    let out = match (to, &eq) {
        (MapTarget::Imaged, Equation::Initial(rd)) => {
            let img = to_imaged(rd).map_err(invalid)?;
            with_map(
                to_json!(&img)?,
                to_json!(&imaged_map(rd).map_err(invalid)?)?,
            )
        }
        (MapTarget::Double, Equation::Imaged(img)) => {
            let dbl = to_double_imaged(img).map_err(invalid)?;
            with_map(
                to_json!(&dbl)?,
                to_json!(&double_map(img).map_err(invalid)?)?,
            )
        }
        (MapTarget::Gauged, Equation::Initial(rd)) => {
            match gauge_fg(rd, a.x0.unwrap_or(rd.domain.lo)).map_err(invalid)? {
                GaugeResult::Symbolic { equation, map } => {
                    with_map(to_json!(&equation)?, to_json!(&map)?)
                }
                GaugeResult::Numeric(g) => {
                    let n = 9;
                    let samples: Vec<Value> = (0..n)
                        .filter_map(|i| {
                            let x = g.domain.lo
                                + (g.domain.hi - g.domain.lo) * (i as f64 + 0.5) / n as f64;
                            let xp = g.x_new(x)?;
                            Some(json!({"x": x, "x_new": xp, "f": g.f_new(xp), "h": g.h_new(xp)}))
                        })
                        .collect();
                    json!({
                        "numeric": true,
                        "x0": g.x0,
                        "time_sign": g.time_sign,
                        "f_law": g.f_law.to_string(),
                        "h_law": g.h_law.to_string(),
                        "m": g.m,
                        "samples": samples,
                    })
                }
            }
        }
        (t, e) => {
            return Err(CliError::Usage(format!(
                "--to {t:?} does not apply to the {:?} class",
                e.class()
            )))
        }
    };
    print(&out);
    Ok(Outcome::Pass)
}

fn operator(
    tau: &Option<String>,
    xi: &Option<String>,
    eta: &Option<String>,
) -> Result<VectorField> {
    let get = |v: &Option<String>, d: &str| expr(v.as_deref().unwrap_or(d));
    if tau.is_none() && xi.is_none() && eta.is_none() {
        return Err(CliError::Usage(
            "give the operator with --tau, --xi and --eta".into(),
        ));
    }
    Ok(VectorField::new(
        get(tau, "0")?,
        get(xi, "0")?,
        get(eta, "0")?,
    ))
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn solution_error(e: SolutionError) -> CliError {
    invalid(e)
}

pub fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    match a.what {
        What::Solution => verify_solution(a, seed),
        What::Lie | What::Nonclassical => {
            let eq = equation(&a.eq)?;
            let q = operator(&a.tau, &a.xi, &a.eta)?;
            let jets = JetBox::on(eq.domain());
            let tol = a.tol.unwrap_or(DEFAULT_TOL);
            let r = if a.what == What::Lie {
                verify_lie(&eq, &q, &jets, a.samples, tol)
            } else {
                verify_nonclassical(&eq, &q, &jets, a.samples, tol)
            }
            .map_err(invalid)?;
            let mut out = to_json!(&r)?;
            if let Value::Object(o) = &mut out {
                o.insert("operator".into(), to_json!(&q)?);
            }
            print(&out);
            Ok(verdict(r.pass))
        }
        What::Algebra => {
            if a.ops.is_empty() {
                return Err(CliError::Usage(
                    "give the basis with repeated --op \"τ;ξ;η\"".into(),
                ));
            }
            let basis = a
                .ops
                .iter()
                .map(|s| {
                    let parts: Vec<&str> = s.split(';').collect();
                    if parts.len() != 3 {
                        return Err(CliError::Usage(format!(
                            "--op expects \"τ;ξ;η\", got `{s}`"
                        )));
                    }
                    Ok(VectorField::new(
                        expr(parts[0])?,
                        expr(parts[1])?,
                        expr(parts[2])?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let d = domain(&a.eq.domain)?;
            let sample = SampleBox::new(&[("t", 0.5, 2.0), ("x", d.lo, d.hi), ("u", 0.5, 2.0)]);
            let tol = a.tol.unwrap_or(1e-10);
            match verify_algebra_closure(&basis, &sample, a.samples, tol) {
                Ok(table) => {
                    let pass = table.entries.iter().all(|e| e.residual <= tol);
                    print(&json!({"pass": pass, "tol": tol, "table": to_json!(&table)?}));
                    Ok(verdict(pass))
                }
                Err(SymmetryError::NotClosed { i, j, residual }) => {
                    print(&json!({
                        "pass": false,
                        "tol": tol,
                        "not_closed": {"i": i, "j": j, "residual": residual},
                    }));
                    Ok(Outcome::Fail)
                }
                Err(e) => Err(invalid(e)),
            }
        }
    }
}

fn verify_solution(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let mut grid = GridSpec {
        nt: a.grid,
        nx: a.grid,
        ..GridSpec::default()
    };
    if let Some(t) = a.tol {
        grid.tol = t;
    }
    let entry = match (&a.entry, &a.solution) {
        (Some(id), None) => {
            let e = solutions::catalog()
                .into_iter()
                .find(|e| &e.id == id)
                .ok_or_else(|| CliError::Validation(format!("no catalog entry `{id}`")))?;
            if let Some(b) = &a.grid_box {
                grid.grid = Some(grid_box(b, Interval::new(e.grid.x[0], e.grid.x[1]))?);
            }
            e
        }
        (None, Some(sol)) => {
            let d = domain(&a.eq.domain)?;
            // Validates the coefficients before the grid run.
            equation(&a.eq)?;
            expr(sol)?;
            let grid = match &a.grid_box {
                Some(b) => grid_box(b, d)?,
                None => GridBox {
                    t: [0.5, 2.0],
                    x: [d.lo, d.hi],
                },
            };
            SolutionEntry {
                id: "command-line".into(),
                title: "command-line solution".into(),
                equation: equation_spec(&a.eq)?,
                solution: Some(sol.clone()),
                generated: None,
                constants: Default::default(),
                derived: Vec::new(),
                constraints: Vec::new(),
                identities: Vec::new(),
                grid,
                source: "command line".into(),
                tags: Vec::new(),
            }
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --entry and --solution".into(),
            ))
        }
    };
    let runs = if a.bindings == 0 || entry.constants.is_empty() {
        vec![(
            entry.defaults(),
            verify_on_grid(&entry, &entry.defaults(), &grid).map_err(solution_error)?,
        )]
    } else {
        verify_entry(&entry, a.bindings, seed, &grid).map_err(solution_error)?
    };
    let pass = runs.iter().all(|(_, r)| r.pass);
    let reports: Vec<Value> = runs
        .iter()
        .map(|(b, r)| Ok(json!({"binding": b, "report": to_json!(r)?})))
        .collect::<Result<_>>()?;
    print(&json!({"id": entry.id, "pass": pass, "runs": reports}));
    Ok(verdict(pass))
}

pub fn catalog_list(filters: &[String]) -> Result<Outcome> {
    print(&to_json!(&solutions::filter(filters))?);
    Ok(Outcome::Pass)
}

pub fn catalog_verify_all(filters: &[String], bindings: usize, seed: u64) -> Result<Outcome> {
    let entries = solutions::filter(filters);
    let grid = GridSpec::default();
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    let results: Vec<Value> = entries
        .iter()
        .map(|e| match verify_entry(e, bindings, seed, &grid) {
            Ok(runs) => {
                let max_rel = runs.iter().map(|(_, r)| r.max_rel).fold(0.0, f64::max);
                let pass = runs.iter().all(|(_, r)| r.pass);
                worst = worst.max(max_rel);
                if !pass {
                    failed.push(e.id.clone());
                }
                json!({"id": e.id, "pass": pass, "max_rel": max_rel, "bindings": runs.len()})
            }
            Err(err) => {
                failed.push(e.id.clone());
                json!({"id": e.id, "pass": false, "error": err.to_string()})
            }
        })
        .collect();
    print(&json!({
        "total": entries.len(),
        "passed": entries.len() - failed.len(),
        "failed": failed,
        "worst_max_rel": worst,
        "tol": grid.tol,
        "entries": results,
    }));
    Ok(verdict(failed.is_empty()))
}
