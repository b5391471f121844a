use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::expr::{Expr, Point, SampleBox};
use crate::model::VectorField;

use super::{Result, SymmetryError, T, U, X};

fn apply(q: &VectorField, f: &Expr) -> Result<Expr> {
    Ok(&q.tau * f.diff(T)? + &q.xi * f.diff(X)? + &q.eta * f.diff(U)?)
}

/// [Q1, Q2] = Q1(Q2) − Q2(Q1), componentwise.
pub fn commutator(q1: &VectorField, q2: &VectorField) -> Result<VectorField> {
    let c = |a: &Expr, b: &Expr| -> Result<Expr> { Ok((apply(q1, a)? - apply(q2, b)?).simplify()) };
    Ok(VectorField::new(
        c(&q2.tau, &q1.tau)?,
        c(&q2.xi, &q1.xi)?,
        c(&q2.eta, &q1.eta)?,
    ))
}

/// [Q_i, Q_j] = Σ_k c_k Q_k for i < j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureTable {
    pub dimension: usize,
    pub entries: Vec<StructureConstant>,
}

impl StructureTable {
    /// c(i, j; k), antisymmetric in (i, j).
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b, s) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        self.entries
            .iter()
            .find(|e| e.i == a && e.j == b)
            .map_or(0.0, |e| s * e.coefficients[k])
    }
}

fn components(q: &VectorField, pts: &[Point]) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(3 * pts.len());
    for p in pts {
        for c in [&q.tau, &q.xi, &q.eta] {
            let v = c.eval(p).ok()?;
            if !v.is_finite() {
                return None;
            }
            out.push(v);
        }
    }
    Some(out)
}

/// Expresses every commutator in the basis by least squares over sampled
/// coefficient values. The residual is relative to the largest sampled
/// commutator component (floored at 1).
pub fn verify_algebra_closure(
    basis: &[VectorField],
    sample: &SampleBox,
    n: usize,
    tol: f64,
) -> Result<StructureTable> {
    if basis.is_empty() {
        return Err(SymmetryError::EmptyBasis);
    }
    let pts: Vec<Point> = sample.points(n).collect();
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|q| components(q, &pts).ok_or(SymmetryError::NoValidPoints))
        .collect::<Result<_>>()?;
    let rows = 3 * pts.len();
    let a = DMatrix::from_fn(rows, basis.len(), |r, k| cols[k][r]);
    let svd = a.clone().svd(true, true);
    let mut entries = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let c = commutator(&basis[i], &basis[j])?;
            let rhs = components(&c, &pts).ok_or(SymmetryError::NoValidPoints)?;
            let b = DVector::from_vec(rhs);
            let sol = svd
                .solve(&b, 1e-12)
                .map_err(|e| SymmetryError::Singular(e.to_string()))?;
            let scale = b.amax().max(1.0);
            let residual = (&a * &sol - &b).amax() / scale;
            if residual > tol {
                return Err(SymmetryError::NotClosed { i, j, residual });
            }
            entries.push(StructureConstant {
                i,
                j,
                coefficients: sol.iter().copied().collect(),
                residual,
            });
        }
    }
    Ok(StructureTable {
        dimension: basis.len(),
        entries,
    })
}
