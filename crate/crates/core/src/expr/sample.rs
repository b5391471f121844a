use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{Expr, ExprError, Point, Result};

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

static DEFAULT_SEED: AtomicU64 = AtomicU64::new(0);

/// Sets the Halton index offset used by boxes built with [`SampleBox::new`].
pub fn set_default_seed(seed: u64) {
    DEFAULT_SEED.store(seed, Ordering::Relaxed);
}

pub fn default_seed() -> u64 {
    DEFAULT_SEED.load(Ordering::Relaxed)
}

/// Radical inverse of `index` in the `dim`-th prime base.
pub fn halton(index: u64, dim: usize) -> f64 {
    let base = PRIMES[dim % PRIMES.len()];
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

/// Axis-aligned box of named coordinates sampled by a Halton sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub ranges: Vec<Range>,
    #[serde(default)]
    pub seed: u64,
}

impl SampleBox {
    pub fn new(ranges: &[(&str, f64, f64)]) -> SampleBox {
        SampleBox {
            ranges: ranges
                .iter()
                .map(|(n, lo, hi)| Range {
                    name: n.to_string(),
                    lo: *lo,
                    hi: *hi,
                })
                .collect(),
            seed: default_seed(),
        }
    }

    pub fn with(mut self, name: &str, lo: f64, hi: f64) -> SampleBox {
        self.ranges.retain(|r| r.name != name);
        self.ranges.push(Range {
            name: name.to_string(),
            lo,
            hi,
        });
        self
    }

    pub fn with_seed(mut self, seed: u64) -> SampleBox {
        self.seed = seed;
        self
    }

    pub fn covers(&self, e: &Expr) -> bool {
        e.symbols()
            .iter()
            .all(|s| self.ranges.iter().any(|r| &r.name == s))
    }

    pub fn point(&self, i: usize) -> Point {
        let idx = i as u64 + 1 + self.seed;
        let mut p = Point::new();
        for (d, r) in self.ranges.iter().enumerate() {
            p.set(&r.name, r.lo + (r.hi - r.lo) * halton(idx, d));
        }
        p
    }

    pub fn points(&self, n: usize) -> impl Iterator<Item = Point> + '_ {
        (0..n).map(move |i| self.point(i))
    }
}

/// Result of comparing two expressions on sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub max: f64,
    pub worst: Option<Point>,
    pub evaluated: usize,
}

/// Relative deviation |a−b|/max(1,|a|,|b|), skipping points where either side
/// fails to evaluate.
pub fn num_equal_report(a: &Expr, b: &Expr, domain: &SampleBox, n: usize) -> Result<Deviation> {
    let mut dev = Deviation {
        max: 0.0,
        worst: None,
        evaluated: 0,
    };
    for p in domain.points(n) {
        let (Ok(x), Ok(y)) = (a.eval(&p), b.eval(&p)) else {
            continue;
        };
        dev.evaluated += 1;
        let d = (x - y).abs() / 1f64.max(x.abs()).max(y.abs());
        if d > dev.max || dev.worst.is_none() {
            dev.max = dev.max.max(d);
            dev.worst = Some(p);
        }
    }
    if dev.evaluated == 0 {
        return Err(ExprError::NoValidPoints);
    }
    Ok(dev)
}

pub fn num_equal(a: &Expr, b: &Expr, domain: &SampleBox, n: usize, tol: f64) -> Result<bool> {
    Ok(num_equal_report(a, b, domain, n)?.max <= tol)
}
