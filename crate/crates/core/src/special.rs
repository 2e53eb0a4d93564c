//! Small special-function toolkit: Bernoulli-number series, the sine
//! integral, and polynomial extrapolation to zero.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Even-index Bernoulli numbers B₀, B₂, …, B₂₄.
pub const BERNOULLI_EVEN: [f64; 13] = [
    1.0,
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Number of terms kept in the `u·coth u` and `csch²u` expansions.
pub const SERIES_TERMS: usize = BERNOULLI_EVEN.len();

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Coefficients gₙ of `u·coth(u) = Σ gₙ u²ⁿ`.
pub fn ucoth_coefficients() -> [f64; SERIES_TERMS] {
    let mut g = [0.0; SERIES_TERMS];
    for (n, gn) in g.iter_mut().enumerate() {
        *gn = 4f64.powi(n as i32) * BERNOULLI_EVEN[n] / factorial(2 * n);
    }
    g
}

/// Coefficients γₘ of `csch²(u) = Σ γₘ u²ᵐ⁻²`.
pub fn csch2_coefficients() -> [f64; SERIES_TERMS] {
    let g = ucoth_coefficients();
    let mut c = [0.0; SERIES_TERMS];
    for (m, cm) in c.iter_mut().enumerate() {
        *cm = -((2 * m) as f64 - 1.0) * g[m];
    }
    c
}

/// Second derivative of `b(y) = y/(eʸ − 1)`.
pub fn bose_b_second_derivative(y: f64) -> f64 {
    if y.abs() < 1.0 {
        let y2 = y * y;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for (k, bk) in BERNOULLI_EVEN.iter().enumerate().skip(1) {
            acc += bk * pow / factorial(2 * k - 2);
            pow *= y2;
        }
        acc
    } else {
        let q = (-y).exp();
        let one_minus = -(-y).exp_m1();
        q * ((y - 2.0) + (2.0 + y) * q) / (one_minus * one_minus * one_minus)
    }
}

/// Sine integral Si(x) = ∫₀ˣ sin t / t dt.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x <= 4.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0usize;
        loop {
            let k = (2 * n + 1) as f64;
            term *= -x2 / ((k + 1.0) * (k + 2.0));
            let contrib = term / (k + 2.0);
            sum += contrib;
            if contrib.abs() <= 1e-17 * sum.abs() {
                break;
            }
            n += 1;
        }
        sum
    } else {
        PI / 2.0 + exp_integral_e1_imag(x).im
    }
}

/// E₁(ix) for x > 0 by a modified Lentz continued fraction.
fn exp_integral_e1_imag(x: f64) -> Complex64 {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..10_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (a * d + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * Complex64::new(x.cos(), -x.sin())
}

/// Neville evaluation at zero of the interpolating polynomial through
/// `(x[i], y[i])`. Returns the full sequence of diagonal extrapolants, the
/// last being the highest-order estimate.
pub fn neville_to_zero(x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len());
    let mut p = y.to_vec();
    let mut diag = Vec::with_capacity(y.len());
    if let Some(&first) = y.first() {
        diag.push(first);
    }
    for m in 1..x.len() {
        for i in (m..x.len()).rev() {
            let j = i - m;
            p[i] = (x[i] * p[i - 1] - x[j] * p[i]) / (x[i] - x[j]);
        }
        diag.push(p[m]);
    }
    diag
}
