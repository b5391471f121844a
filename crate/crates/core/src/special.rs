//! Numeric kernels: Kummer and Whittaker M functions, Jacobi elliptic functions, erf.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("Kummer parameter b={0} is a nonpositive integer")]
    ParameterPole(f64),
    #[error("argument {0} outside the implemented range |z| <= 30")]
    OutOfRange(f64),
    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),
    #[error("Whittaker M requires z > 0, got {0}")]
    NonPositiveArgument(f64),
    #[error("elliptic modulus k={0} outside (0,1)")]
    Modulus(f64),
    #[error("pole of ds: |sn| < {0}")]
    Pole(f64),
}

pub const KUMMER_MAX_TERMS: usize = 500;
pub const KUMMER_MAX_ARG: f64 = 30.0;
pub const DS_POLE_GUARD: f64 = 1e-9;
const AGM_TOL: f64 = 1e-15;

fn kummer_series(a: f64, b: f64, z: f64) -> Result<f64, SpecialError> {
    // Kahan-compensated partial sums of Σ (a)_n z^n / ((b)_n n!).
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut small = 0;
    for n in 0..KUMMER_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        if term == 0.0 {
            return Ok(sum);
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() <= 1e-17 * sum.abs() && nf > z.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(SpecialError::NonConvergence(KUMMER_MAX_TERMS))
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// Confluent hypergeometric M(a, b, z) = ₁F₁(a; b; z).
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64, SpecialError> {
    if is_nonpositive_integer(b) {
        return Err(SpecialError::ParameterPole(b));
    }
    if !(z.abs() <= KUMMER_MAX_ARG) {
        return Err(SpecialError::OutOfRange(z));
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        // Kummer's transformation keeps the series free of cancellation.
        return Ok(z.exp() * kummer_series(b - a, b, -z)?);
    }
    kummer_series(a, b, z)
}

/// M_{κ,μ}(z) = e^{−z/2} z^{μ+1/2} M(μ−κ+1/2, 1+2μ, z), real branch z > 0.
pub fn whittaker_m(kappa: f64, mu: f64, z: f64) -> Result<f64, SpecialError> {
    if !(z > 0.0) {
        return Err(SpecialError::NonPositiveArgument(z));
    }
    let m = kummer_m(mu - kappa + 0.5, 1.0 + 2.0 * mu, z)?;
    Ok((-z / 2.0).exp() * z.powf(mu + 0.5) * m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn check_modulus(k: f64) -> Result<(), SpecialError> {
    if k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(SpecialError::Modulus(k))
    }
}

/// sn, cn, dn by the descending Landen (AGM) scheme.
pub fn jacobi(z: f64, k: f64) -> Result<Jacobi, SpecialError> {
    check_modulus(k)?;
    let mut a = vec![1.0f64];
    let mut c = vec![k];
    let mut b = (1.0 - k * k).sqrt();
    while c.last().copied().unwrap_or(0.0).abs() >= AGM_TOL && a.len() < 64 {
        let an = *a.last().unwrap_or(&1.0);
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * z;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] * phi.sin() / a[i]).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - k * k * sn * sn).sqrt();
    Ok(Jacobi { sn, cn, dn })
}

pub fn ds(z: f64, k: f64) -> Result<f64, SpecialError> {
    let j = jacobi(z, k)?;
    if j.sn.abs() < DS_POLE_GUARD {
        return Err(SpecialError::Pole(DS_POLE_GUARD));
    }
    Ok(j.dn / j.sn)
}

pub fn sd(z: f64, k: f64) -> Result<f64, SpecialError> {
    let j = jacobi(z, k)?;
    Ok(j.sn / j.dn)
}

/// Complete elliptic integral of the first kind, K(k) = π / (2 AGM(1, √(1−k²))).
pub fn elliptic_k(k: f64) -> Result<f64, SpecialError> {
    check_modulus(k)?;
    let (mut a, mut b) = (1.0f64, (1.0 - k * k).sqrt());
    while (a - b).abs() > AGM_TOL * a {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (2.0 * a))
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let v = if ax < 2.5 {
        // e^{−x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!, all terms positive.
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut n = 0.0;
        while term > 1e-17 * sum {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        2.0 / std::f64::consts::PI.sqrt() * (-x2).exp() * sum
    } else if ax < 27.0 {
        // erfc by its continued fraction, evaluated backwards.
        let mut t = ax;
        for n in (1..=120).rev() {
            t = ax + (n as f64 / 2.0) / t;
        }
        1.0 - (-ax * ax).exp() / (std::f64::consts::PI.sqrt() * t)
    } else {
        1.0
    };
    v.copysign(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kummer_basics() {
        assert_eq!(kummer_m(0.3, 1.7, 0.0).unwrap(), 1.0);
        for z in [-20.0, -3.0, 0.5, 4.0, 25.0] {
            let v = kummer_m(1.0, 1.0, z).unwrap();
            assert!((v / f64::exp(z) - 1.0).abs() < 1e-11, "{z}");
        }
        assert_eq!(
            kummer_m(1.0, -2.0, 1.0),
            Err(SpecialError::ParameterPole(-2.0))
        );
        assert_eq!(
            kummer_m(1.0, 1.0, 31.0),
            Err(SpecialError::OutOfRange(31.0))
        );
    }

    #[test]
    fn kummer_polynomial_case() {
        // M(−2, b, z) = 1 − 2z/b + z²/(b(b+1))
        let (b, z) = (1.5, -4.0);
        let want = 1.0 - 2.0 * z / b + z * z / (b * (b + 1.0));
        assert!((kummer_m(-2.0, b, z).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn whittaker_requires_positive_argument() {
        assert!(whittaker_m(0.1, 0.2, 0.0).is_err());
        let v = whittaker_m(-0.5, 0.0, 1.0).unwrap();
        assert!((v - 1.6487212707001282).abs() < 1e-12);
    }

    #[test]
    fn jacobi_origin_and_range() {
        let j = jacobi(0.0, 0.6).unwrap();
        assert_eq!((j.sn, j.cn, j.dn), (0.0, 1.0, 1.0));
        assert!(jacobi(1.0, 1.0).is_err());
        assert!(jacobi(1.0, 0.0).is_err());
        assert_eq!(sd(0.0, 0.5).unwrap(), 0.0);
        assert!(ds(0.0, 0.5).is_err());
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(0.5) - 0.5204998778130465).abs() < 1e-15);
        assert!((erf(3.0) - 0.9999779095030014).abs() < 1e-15);
        assert_eq!(erf(-1.3), -erf(1.3));
        assert_eq!(erf(40.0), 1.0);
    }
}
