//! Parameter samplers shared by the integration tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

use rdsym_core::model::Interval;
use rdsym_core::tables::{self, Params};

pub const DOMAIN: Interval = Interval { lo: 0.5, hi: 2.0 };

pub fn signed(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Parameters of an imaged row away from its footnote boundaries.
pub fn imaged_params(rng: &mut StdRng, row: &str, m: f64) -> Params {
    let mut p = Params::new();
    p.insert("delta".into(), signed(rng, 0.3, 3.0));
    match row {
        "1" | "2" => {
            p.insert("q".into(), signed(rng, 0.2, 2.0));
            if row == "1" {
                let a = tables::alpha(p["q"], m);
                let mut a1 = signed(rng, 0.1, 2.0);
                while (a1 + a * a).abs() < 0.05 {
                    a1 = signed(rng, 0.1, 2.0);
                }
                p.insert("a1".into(), a1);
            }
        }
        _ => {
            p.insert("x0".into(), rng.gen_range(-0.5..0.3));
            if row == "3" || row == "4" {
                p.insert("k".into(), signed(rng, 0.2, 3.0));
                p.insert("a2".into(), signed(rng, 0.1, 2.0));
            }
            if row != "3" {
                p.insert("p".into(), signed(rng, 0.1, 1.0));
            }
            if row == "5" {
                let six = (5.0 - m) / (1.0 - m);
                let mut a3 = signed(rng, 0.1, 4.0);
                while (a3 - six).abs() < 0.1 || (a3 - 5.0).abs() < 0.1 {
                    a3 = signed(rng, 0.1, 4.0);
                }
                p.insert("a3".into(), a3);
            }
        }
    }
    p
}

pub fn double_params(rng: &mut StdRng, row: &str) -> Params {
    let mut p = Params::new();
    p.insert("delta".into(), signed(rng, 0.3, 3.0));
    match row {
        "1" | "2" => {
            p.insert("q".into(), signed(rng, 0.2, 2.0));
            if row == "1" {
                let b = p["q"].powi(4) / (4.0 * p["delta"]);
                p.insert("b1".into(), b + signed(rng, 0.1, 2.0));
            }
        }
        _ => {
            p.insert("x0".into(), rng.gen_range(-0.5..0.3));
            if row == "3" || row == "4" {
                p.insert("k".into(), signed(rng, 0.2, 3.0));
                p.insert("b2".into(), signed(rng, 0.1, 5.0));
            }
            if row != "3" {
                p.insert("p".into(), signed(rng, 0.1, 1.0));
            }
            if row == "5" {
                p.insert("b3".into(), -11.0 + signed(rng, 0.5, 10.0));
            }
        }
    }
    p
}

/// Imaged-row parameters that also admit a real preimage in the initial
/// class on `DOMAIN`: a1 > 0 small enough for the cosine row, a2 ≤ 1/4 in
/// row 4 and 0 < β = 2p/(m − 1) with βy² < 1 in the Whittaker rows.
pub fn preimage_params(rng: &mut StdRng, row: &str, m: f64) -> Params {
    let mut p = imaged_params(rng, row, m);
    if row == "1" && p["a1"] > 0.0 {
        p.insert("a1".into(), rng.gen_range(0.05..0.8));
    }
    if row == "4" {
        p.insert("a2".into(), rng.gen_range(-2.0..0.24));
    }
    if p.contains_key("p") {
        // Keep βy² below 1 on the domain, short of the first Kummer zero.
        let y = DOMAIN.hi - p.get("x0").copied().unwrap_or(0.0);
        let beta = rng.gen_range(0.2..1.0) / (y * y);
        p.insert("p".into(), beta * (m - 1.0) / 2.0);
    }
    p
}
