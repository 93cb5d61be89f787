//! Paired McNemar test: exact binomial for small disagreement counts, corrected chi-square above.

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Disagreement count from which the chi-square approximation is used.
pub const EXACT_BELOW: u64 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McNemarMethod {
    ChiSquareCc,
    ExactBinomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// Decisions correct under A only.
    pub b: u64,
    /// Decisions correct under B only.
    pub c: u64,
    pub statistic: f64,
    pub p_value: f64,
    pub method: McNemarMethod,
}

pub fn mcnemar(correct_a: &[bool], correct_b: &[bool]) -> Result<McNemarResult, EvalError> {
    if correct_a.len() != correct_b.len() {
        return Err(EvalError::LengthMismatch {
            a: correct_a.len(),
            b: correct_b.len(),
        });
    }
    let (mut b, mut c) = (0, 0);
    for (&x, &y) in correct_a.iter().zip(correct_b) {
        match (x, y) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok(mcnemar_counts(b, c))
}

pub fn mcnemar_counts(b: u64, c: u64) -> McNemarResult {
    let n = b + c;
    if n < EXACT_BELOW {
        McNemarResult {
            b,
            c,
            statistic: b.min(c) as f64,
            p_value: exact_binomial_p(b, c),
            method: McNemarMethod::ExactBinomial,
        }
    } else {
        // |b-c| >= 1 cannot be guaranteed, so the correction is clamped at zero
        let diff = (b.abs_diff(c) as f64 - 1.0).max(0.0);
        let statistic = diff * diff / n as f64;
        McNemarResult {
            b,
            c,
            statistic,
            p_value: chi_square_sf_1df(statistic),
            method: McNemarMethod::ChiSquareCc,
        }
    }
}

/// Two-sided sign test: 2 * P(X <= min(b, c)) for X ~ Bin(b + c, 1/2), capped at 1.
pub fn exact_binomial_p(b: u64, c: u64) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let k = b.min(c);
    let mut term = 0.5f64.powi(n as i32);
    let mut tail = term;
    for i in 0..k {
        term *= (n - i) as f64 / (i + 1) as f64;
        tail += term;
    }
    (2.0 * tail).min(1.0)
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub fn chi_square_sf_1df(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(0.5, x / 2.0)
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// modified Lentz evaluation of the continued fraction
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    let tiny = f64::MIN_POSITIVE / EPS;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let mut s = LANCZOS[0];
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        s += coef / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors() {
        let v = [true, false, true];
        let r = mcnemar(&v, &v).unwrap();
        assert_eq!((r.b, r.c, r.p_value), (0, 0, 1.0));
    }

    #[test]
    fn small_exact() {
        let r = mcnemar_counts(1, 14);
        assert_eq!(r.method, McNemarMethod::ExactBinomial);
        let expected = 2.0 * (1.0 + 15.0) / 32768.0;
        assert!((r.p_value - expected).abs() < 1e-15);
        assert!((r.p_value - 0.000977).abs() < 1e-6);
    }

    #[test]
    fn large_chi_square() {
        let r = mcnemar_counts(40, 10);
        assert_eq!(r.method, McNemarMethod::ChiSquareCc);
        assert!((r.statistic - 16.82).abs() < 1e-12);
        assert!(r.p_value < 0.001);
    }

    #[test]
    fn gamma_known_values() {
        // Q(0.5, x) = erfc(sqrt(x)); erfc(1) = 0.157299207050285
        assert!((gamma_q(0.5, 1.0) - 0.157_299_207_050_285_13).abs() < 1e-14);
        assert!((chi_square_sf_1df(3.841_458_820_694_124) - 0.05).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(mcnemar(&[true], &[]), Err(EvalError::LengthMismatch { a: 1, b: 0 })));
    }
}
