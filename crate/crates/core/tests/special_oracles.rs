use num::{BigInt, BigRational, ToPrimitive};
use proptest::prelude::*;
use rdsym_core::special::{ds, elliptic_k, erf, jacobi, kummer_m, sd, whittaker_m};

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact partial sum of the Kummer series for rational parameters.
fn kummer_exact(a: &BigRational, b: &BigRational, z: &BigRational, terms: usize) -> f64 {
    let mut term = rat(1, 1);
    let mut sum = rat(1, 1);
    for n in 0..terms {
        let nn = rat(n as i64, 1);
        term = term * (a + &nn) / (b + &nn) * z / (&nn + rat(1, 1));
        sum += &term;
    }
    sum.to_f64().unwrap()
}

#[test]
fn complete_integral_matches_quadrature() {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let quad = simpson(
        &|th: f64| 1.0 / (1.0 - k * k * th.sin().powi(2)).sqrt(),
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-14,
        40,
    );
    let kk = elliptic_k(k).unwrap();
    assert!((kk - quad).abs() < 1e-12, "{kk} vs {quad}");
    assert!((kk - 1.854075).abs() < 1e-6);
}

#[test]
fn quarter_period_values() {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let kk = elliptic_k(k).unwrap();
    let j = jacobi(kk, k).unwrap();
    assert!((j.sn - 1.0).abs() < 1e-10);
    assert!(j.cn.abs() < 1e-10);
    assert!((j.dn - (1.0 - k * k).sqrt()).abs() < 1e-10);
    // ds(K) = dn(K)/sn(K) = k'
    assert!((ds(kk, k).unwrap() - (1.0 - k * k).sqrt()).abs() < 1e-10);
}

#[test]
fn erf_matches_quadrature() {
    let c = 2.0 / std::f64::consts::PI.sqrt();
    for x in [0.3, 1.0, 2.0, 2.7, 4.0] {
        let quad = c * simpson(&|t: f64| (-t * t).exp(), 0.0, x, 1e-15, 40);
        assert!((erf(x) - quad).abs() < 1e-12, "x={x}: {} vs {quad}", erf(x));
    }
}

#[test]
fn kummer_half_three_halves_at_one() {
    // M(1/2, 3/2, 1) = Σ 1/((2n+1) n!)
    let mut sum = rat(0, 1);
    let mut fact = BigInt::from(1);
    for n in 0..40i64 {
        if n > 0 {
            fact *= n;
        }
        sum += BigRational::new(BigInt::from(1), BigInt::from(2 * n + 1) * &fact);
    }
    let oracle = sum.to_f64().unwrap();
    let v = kummer_m(0.5, 1.5, 1.0).unwrap();
    assert!((v / oracle - 1.0).abs() < 1e-11, "{v} vs {oracle}");
    assert!((kummer_exact(&rat(1, 2), &rat(3, 2), &rat(1, 1), 60) / oracle - 1.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn whittaker_matches_exact_series(kn in -12i64..12, mn in 0i64..10, zn in 1i64..80) {
        let (kappa, mu, z) = (kn as f64 / 8.0, mn as f64 / 8.0, zn as f64 / 8.0);
        let a = rat(mn, 8) - rat(kn, 8) + rat(1, 2);
        let b = rat(1, 1) + rat(2 * mn, 8);
        let series = kummer_exact(&a, &b, &rat(zn, 8), 160);
        let oracle = (-z / 2.0).exp() * z.powf(mu + 0.5) * series;
        let v = whittaker_m(kappa, mu, z).unwrap();
        prop_assert!((v - oracle).abs() <= 1e-11 * oracle.abs().max(1e-300), "{} vs {}", v, oracle);
    }

    #[test]
    fn jacobi_parity(z in -6.0f64..6.0, k in 0.05f64..0.95) {
        let p = jacobi(z, k).unwrap();
        let m = jacobi(-z, k).unwrap();
        prop_assert!((p.sn + m.sn).abs() < 1e-13);
        prop_assert!((p.cn - m.cn).abs() < 1e-13);
        prop_assert!((p.dn - m.dn).abs() < 1e-13);
    }

    #[test]
    fn erf_is_odd(x in -6.0f64..6.0) {
        prop_assert_eq!(erf(-x), -erf(x));
    }

    #[test]
    fn ds_and_sd_are_reciprocal(z in 0.05f64..3.6, k in 0.05f64..0.95) {
        let prod = ds(z, k).unwrap() * sd(z, k).unwrap();
        prop_assert!((prod - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pythagorean_identities() {
    for k in [0.3, std::f64::consts::FRAC_1_SQRT_2, 0.9] {
        for i in 0..=400 {
            let z = -4.0 + 8.0 * i as f64 / 400.0;
            let j = jacobi(z, k).unwrap();
            assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-10);
            assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn jacobi_derivatives_match_central_differences() {
    let h = 1e-5;
    for k in [0.3, 0.7, 0.9] {
        for i in 0..40 {
            let z = -3.0 + 6.0 * i as f64 / 40.0 + 0.013;
            let (p, m, c) = (
                jacobi(z + h, k).unwrap(),
                jacobi(z - h, k).unwrap(),
                jacobi(z, k).unwrap(),
            );
            assert!(((p.sn - m.sn) / (2.0 * h) - c.cn * c.dn).abs() < 1e-6);
            assert!(((p.cn - m.cn) / (2.0 * h) + c.sn * c.dn).abs() < 1e-6);
            assert!(((p.dn - m.dn) / (2.0 * h) + k * k * c.sn * c.cn).abs() < 1e-6);
        }
    }
}

#[test]
fn ds_behaves_like_reciprocal_near_zero() {
    for k in [0.3, 0.7] {
        let z = 1e-4;
        assert!((z * ds(z, k).unwrap() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn whittaker_closed_form_identity() {
    for kappa in [-1.0, -0.5, 0.3] {
        for i in 0..50 {
            let z = 0.1 + 9.9 * i as f64 / 49.0;
            let v = whittaker_m(kappa, -kappa - 0.5, z).unwrap();
            let want = (z / 2.0).exp() * z.powf(-kappa);
            assert!((v / want - 1.0).abs() < 1e-9, "kappa={kappa} z={z}");
        }
    }
}

#[test]
fn whittaker_error_function_form() {
    for i in 0..50 {
        let z = 0.1 + 9.9 * i as f64 / 49.0;
        let v = whittaker_m(-0.25, 0.25, z).unwrap();
        let want =
            std::f64::consts::PI.sqrt() / 2.0 * z.powf(0.25) * (z / 2.0).exp() * erf(z.sqrt());
        assert!((v / want - 1.0).abs() < 1e-9, "z={z}");
    }
}
