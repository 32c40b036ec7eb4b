//! Gauss hypergeometric function `2F1(a, b; c; z)` for real `z` in `[0, 1)`.
//!
//! Small arguments use the power series directly. For `z > 0.8` the function
//! is re-expanded around `z = 1` with the connection formulas in powers of
//! `1 - z`, including the logarithmic case where `c - a - b` is an integer.

use statrs::function::gamma::{digamma, gamma, ln_gamma};

use crate::error::{Error, Result};

/// Above this argument the series around `z = 1` is used.
pub const TRANSFORM_THRESHOLD: f64 = 0.8;
pub const MAX_TERMS: usize = 100_000;
const REL_STOP: f64 = 1e-17;
/// `c - a - b` closer than this to an integer counts as integer.
const INTEGER_TOL: f64 = 1e-9;
/// Non-integer `c - a - b` closer than this to an integer is ill-conditioned
/// in the gamma-function connection formula.
const NEAR_INTEGER_GAP: f64 = 0.05;

/// Parameters of one `2F1` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeomParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        HypergeomParams { a, b, c, z }
    }

    pub fn eval(&self) -> Result<f64> {
        gauss_2f1(self.a, self.b, self.c, self.z)
    }
}

/// `2F1(a, b; c; z)` for `a, b, c > 0` and `0 <= z < 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let supported = [a, b, c, z].iter().all(|v| v.is_finite())
        && a > 0.0
        && b > 0.0
        && c > 0.0
        && (0.0..1.0).contains(&z);
    if !supported {
        return Err(Error::UnsupportedParameters { a, b, c, z });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z <= TRANSFORM_THRESHOLD {
        return power_series(a, b, c, z);
    }

    let s = c - a - b;
    let nearest = s.round();
    if (s - nearest).abs() < INTEGER_TOL {
        let m = nearest as i64;
        if m >= 0 {
            return integer_gap(a, b, m as u32, z);
        }
        // Euler: F(a,b;c;z) = (1-z)^s F(c-a, c-b; c; z), gap becomes -s > 0
        let (a2, b2) = (c - a, c - b);
        let scale = (1.0 - z).powi(m as i32);
        if a2 <= 0.0 || b2 <= 0.0 {
            return Ok(scale * power_series(a2, b2, c, z)?);
        }
        return Ok(scale * integer_gap(a2, b2, (-m) as u32, z)?);
    }
    if (s - nearest).abs() > NEAR_INTEGER_GAP {
        return non_integer_gap(a, b, c, z);
    }
    power_series(a, b, c, z)
}

/// Direct power series with term-ratio recurrence. Terminates early when a
/// numerator parameter is a non-positive integer.
fn power_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < REL_STOP * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::PrecisionFailure { terms: MAX_TERMS })
}

fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).map(|k| x + k as f64).product()
}

fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn small_integer(x: f64) -> Option<u32> {
    ((1.0..=64.0).contains(&x) && x == x.floor()).then_some(x as u32)
}

/// Prefactors of the logarithmic connection formula,
/// `Gamma(m) Gamma(a+b+m) / (Gamma(a+m) Gamma(b+m))` and
/// `Gamma(a+b+m) / (Gamma(a) Gamma(b))`, exact products when a or b is a
/// small integer.
fn integer_gap_prefactors(a: f64, b: f64, m: u32) -> (f64, f64) {
    let mf = m as f64;
    let integer = small_integer(a)
        .map(|k| (k, b))
        .or_else(|| small_integer(b).map(|k| (k, a)));
    if let Some((k, other)) = integer {
        let fact_k1 = pochhammer(1.0, k - 1);
        let first = if m == 0 {
            0.0
        } else {
            pochhammer(other + mf, k) / pochhammer(mf, k)
        };
        let second = pochhammer(other, k + m) / fact_k1;
        return (first, second);
    }
    let lg_abm = ln_gamma(a + b + mf);
    let first = if m == 0 {
        0.0
    } else {
        (ln_gamma(mf) + lg_abm - ln_gamma(a + mf) - ln_gamma(b + mf)).exp()
    };
    let second = (lg_abm - ln_gamma(a) - ln_gamma(b)).exp();
    (first, second)
}

/// `F(a, b; a+b+m; z)` for integer `m >= 0` as a series in `w = 1 - z`.
fn integer_gap(a: f64, b: f64, m: u32, z: f64) -> Result<f64> {
    let w = 1.0 - z;
    let ln_w = w.ln();
    let mf = m as f64;
    let (first_pref, second_pref) = integer_gap_prefactors(a, b, m);

    // finite part: sum_{n<m} (a)_n (b)_n / (n! (1-m)_n) w^n
    let mut finite = 0.0;
    let mut t = 1.0;
    for n in 0..m {
        let nf = n as f64;
        if n > 0 {
            t *= (a + nf - 1.0) * (b + nf - 1.0) / (nf * (nf - mf)) * w;
        }
        finite += t;
    }

    // logarithmic part: sum_n (a+m)_n (b+m)_n / (n! (n+m)!) w^n
    //   * [ln w - psi(n+1) - psi(n+m+1) + psi(a+n+m) + psi(b+n+m)]
    let mut coef = 1.0 / pochhammer(1.0, m);
    let mut psi_n1 = digamma(1.0);
    let mut psi_nm1 = digamma(mf + 1.0);
    let mut psi_anm = digamma(a + mf);
    let mut psi_bnm = digamma(b + mf);
    let mut log_sum = 0.0;
    let mut converged = false;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        if n > 0 {
            coef *= (a + mf + nf - 1.0) * (b + mf + nf - 1.0) / (nf * (nf + mf)) * w;
            psi_n1 += 1.0 / nf;
            psi_nm1 += 1.0 / (nf + mf);
            psi_anm += 1.0 / (a + mf + nf - 1.0);
            psi_bnm += 1.0 / (b + mf + nf - 1.0);
        }
        let term = coef * (ln_w - psi_n1 - psi_nm1 + psi_anm + psi_bnm);
        log_sum += term;
        if coef == 0.0 || (n > 2 && term.abs() < REL_STOP * log_sum.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::PrecisionFailure { terms: MAX_TERMS });
    }
    // (z - 1)^m = (-1)^m w^m
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(first_pref * finite - sign * w.powi(m as i32) * second_pref * log_sum)
}

/// Connection formula for non-integer `s = c - a - b`.
fn non_integer_gap(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let s = c - a - b;
    let w = 1.0 - z;
    let gc = gamma(c);
    let p1 = gc * gamma(s) * rgamma(c - a) * rgamma(c - b);
    let p2 = gc * gamma(-s) * rgamma(a) * rgamma(b);
    let f1 = if p1 == 0.0 {
        0.0
    } else {
        power_series(a, b, 1.0 - s, w)?
    };
    let f2 = if p2 == 0.0 {
        0.0
    } else {
        power_series(c - a, c - b, 1.0 + s, w)?
    };
    Ok(p1 * f1 + p2 * w.powf(s) * f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_term() {
        for &(a, b, c) in &[(1.0, 2.0, 4.0), (0.5, 7.3, 1.2), (3.0, 3.0, 3.0)] {
            assert_eq!(gauss_2f1(a, b, c, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn logarithm_identity() {
        // 2F1(1,1;2;z) = -ln(1-z)/z
        assert_relative_eq!(
            gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap(),
            1.386294361119891,
            max_relative = 1e-14
        );
        for &z in &[0.1_f64, 0.5, 0.79, 0.81, 0.9, 0.99, 0.999999] {
            let expected = -(-z).ln_1p() / z;
            assert_relative_eq!(
                gauss_2f1(1.0, 1.0, 2.0, z).unwrap(),
                expected,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn elementary_closed_forms() {
        // 2F1(a,b;b;z) = (1-z)^-a
        for &z in &[0.3, 0.85, 0.97] {
            assert_relative_eq!(
                gauss_2f1(1.7, 2.5, 2.5, z).unwrap(),
                (1.0 - z).powf(-1.7),
                max_relative = 1e-12
            );
        }
        // 2F1(1/2,1/2;3/2;z^2) = asin(z)/z
        for &x in &[0.2, 0.93, 0.995] {
            assert_relative_eq!(
                gauss_2f1(0.5, 0.5, 1.5, x * x).unwrap(),
                x.asin() / x,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn rejects_unsupported() {
        assert!(matches!(
            gauss_2f1(1.0, 2.0, 3.0, 1.0),
            Err(Error::UnsupportedParameters { .. })
        ));
        assert!(matches!(
            gauss_2f1(1.0, 2.0, 3.0, -0.1),
            Err(Error::UnsupportedParameters { .. })
        ));
        assert!(matches!(
            gauss_2f1(-1.0, 2.0, 3.0, 0.5),
            Err(Error::UnsupportedParameters { .. })
        ));
        assert!(matches!(
            gauss_2f1(1.0, 2.0, f64::NAN, 0.5),
            Err(Error::UnsupportedParameters { .. })
        ));
    }

    #[test]
    fn branches_agree_at_threshold() {
        for &(a, b, c) in &[
            (1.0, 2.0, 4.0),
            (1.0, 3.5, 6.0),
            (1.0, 1.3, 2.9),
            (2.0, 2.0, 4.0),
        ] {
            let below = power_series(a, b, c, TRANSFORM_THRESHOLD + 1e-3).unwrap();
            let above = gauss_2f1(a, b, c, TRANSFORM_THRESHOLD + 1e-3).unwrap();
            assert_relative_eq!(below, above, max_relative = 1e-13);
        }
    }
}
