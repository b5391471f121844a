//! Symbolic-numeric toolkit for the reaction–diffusion class
//! f(x)u_t = (g(x)u_x)_x + h(x)u^m: gauges and mappings between classes,
//! group classification by template matching, Lie and nonclassical symmetry
//! verification, and a verified catalog of exact solutions.

pub mod classify;
pub mod expr;
pub mod model;
pub mod solutions;
pub mod special;
pub mod symmetry;
pub mod tables;
pub mod transforms;

pub use expr::{parse, Expr, ExprError, Func, Point};
