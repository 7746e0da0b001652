//! Factorials, Laguerre polynomials and Bessel functions.

use std::sync::OnceLock;

use num_complex::Complex64;

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut exact = 1.0f64;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE {
            if k <= 30 {
                exact *= k as f64;
                t.push(exact.ln());
            } else {
                let prev = t[k - 1];
                t.push(prev + (k as f64).ln());
            }
        }
        t
    })
}

/// `ln(n!)`, exact products up to `n = 30` and running log-sums beyond.
pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_fact_table();
    if n < table.len() {
        return table[n];
    }
    let mut acc = table[table.len() - 1];
    for k in table.len()..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// Generalized Laguerre polynomials `L_0^(alpha)(x) .. L_kmax^(alpha)(x)` by the
/// three-term recurrence.
pub fn laguerre_sequence(k_max: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    if k_max == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..k_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

pub fn laguerre(k: usize, alpha: f64, x: f64) -> f64 {
    laguerre_sequence(k, alpha, x)[k]
}

const SERIES_EPS: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 10_000;

/// Bessel function of the first kind `J_l(z)` for integer order and complex
/// argument, from the ascending series.
///
/// Accurate to roughly `1e-16 * exp(|Re z| + |Im z|) / |J_l(z)|` relative, which is
/// ample for `|z| <= 40`.
pub fn bessel_j(l: i64, z: Complex64) -> Complex64 {
    let n = l.unsigned_abs() as usize;
    let half = z * 0.5;
    let q = -(half * half);
    let mut term = if n == 0 { Complex64::new(1.0, 0.0) } else { half.powu(n as u32) * (-ln_factorial(n)).exp() };
    let mut sum = term;
    for k in 0..SERIES_MAX_TERMS {
        term *= q / (((k + 1) * (k + 1 + n)) as f64);
        sum += term;
        if (k as f64) > z.norm() && term.norm() <= SERIES_EPS * sum.norm() {
            break;
        }
    }
    if l < 0 && n % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// Modified Bessel function `I_nu(x)` for integer order and real argument.
pub fn bessel_i(nu: u32, x: f64) -> f64 {
    let n = nu as usize;
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if n == 0 { 1.0 } else { (n as f64 * half.abs().ln() - ln_factorial(n)).exp() * half.signum().powi(nu as i32) };
    if x == 0.0 && n > 0 {
        return 0.0;
    }
    let mut sum = term;
    for k in 0..SERIES_MAX_TERMS {
        term *= q / (((k + 1) * (k + 1 + n)) as f64);
        sum += term;
        if (k as f64) > x.abs() && term.abs() <= SERIES_EPS * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert_relative_eq!(ln_factorial(10), 3628800f64.ln(), epsilon = 1e-14);
        let direct: f64 = (1..=200).map(|k| (k as f64).ln()).sum();
        assert_relative_eq!(ln_factorial(200), direct, max_relative = 1e-13);
        let big: f64 = (1..=5000).map(|k| (k as f64).ln()).sum();
        assert_relative_eq!(ln_factorial(5000), big, max_relative = 1e-12);
    }

    #[test]
    fn laguerre_closed_forms() {
        let x = 1.7;
        let a = 2.0;
        let l = laguerre_sequence(3, a, x);
        assert_relative_eq!(l[1], 1.0 + a - x, epsilon = 1e-14);
        assert_relative_eq!(l[2], 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0)), epsilon = 1e-13);
        let l3 = (-x.powi(3) + 3.0 * (a + 3.0) * x * x - 3.0 * (a + 2.0) * (a + 3.0) * x + (a + 1.0) * (a + 2.0) * (a + 3.0)) / 6.0;
        assert_relative_eq!(l[3], l3, epsilon = 1e-12);
    }

    #[test]
    fn bessel_values() {
        // I_0(2) = sum 1/(m!)^2
        let series: f64 = (0..40).map(|m| (-2.0 * ln_factorial(m)).exp()).sum();
        assert_relative_eq!(bessel_i(0, 2.0), series, epsilon = 1e-15);
        assert_relative_eq!(bessel_i(0, 2.0), 2.2795853023360673, epsilon = 1e-14);
        assert_relative_eq!(bessel_i(1, 1.0), 0.5651591039924851, epsilon = 1e-15);
        assert_relative_eq!(bessel_j(0, Complex64::new(1.0, 0.0)).re, 0.7651976865579666, epsilon = 1e-15);
        assert_relative_eq!(bessel_j(1, Complex64::new(2.5, 0.0)).re, 0.4970941024642741, epsilon = 1e-15);
        // J_n(ix) = i^n I_n(x)
        let j = bessel_j(3, Complex64::new(0.0, 1.3));
        assert_relative_eq!(j.im, -bessel_i(3, 1.3), epsilon = 1e-15);
        assert!(j.re.abs() < 1e-16);
        assert_relative_eq!(bessel_j(-3, Complex64::new(0.7, 0.2)).re, -bessel_j(3, Complex64::new(0.7, 0.2)).re);
    }

    proptest! {
        #[test]
        fn bessel_recurrence(re in -8.0f64..8.0, im in -8.0f64..8.0, l in -10i64..10) {
            let z = Complex64::new(re, im);
            prop_assume!(z.norm() > 0.1);
            let lhs = bessel_j(l - 1, z) + bessel_j(l + 1, z);
            let rhs = bessel_j(l, z) * (2.0 * l as f64) / z;
            let scale = 1.0 + bessel_j(l, z).norm() + bessel_j(l - 1, z).norm();
            prop_assert!((lhs - rhs).norm() <= 1e-11 * scale * (z.re.abs() + z.im.abs()).exp());
        }

        #[test]
        fn laguerre_derivative_identity(k in 1usize..30, a in 0u32..10, x in 0.0f64..20.0) {
            // L_k^(a)(x) = L_k^(a+1)(x) - L_{k-1}^(a+1)(x)
            let lo = laguerre_sequence(k, a as f64, x);
            let hi = laguerre_sequence(k, a as f64 + 1.0, x);
            let scale = 1.0 + lo[k].abs() + hi[k].abs();
            prop_assert!((lo[k] - (hi[k] - hi[k - 1])).abs() <= 1e-10 * scale);
        }
    }
}
