//! Polylogarithm of order 1/2 on the closed unit disk (minus the branch point).
//!
//! Near `w = 1` the expansion in `μ = ln w` is used,
//! `Li_{1/2}(e^μ) = Γ(1/2) (-μ)^{-1/2} + Σ_k ζ(1/2 - k) μ^k / k!`,
//! which converges for `|μ| < 2π`. Elsewhere `|w|` is small and the defining
//! power series converges quickly.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Switch point between the `μ` expansion and the direct power series.
const EXPANSION_RADIUS: f64 = 4.0;
const EXPANSION_TERMS: usize = 140;

/// Riemann zeta for real `s > 0`, `s != 1`, via Euler-Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    // B_2 .. B_20
    const BERNOULLI: [f64; 10] = [
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
    ];
    const N: f64 = 20.0;
    let head: f64 = (1..20).map(|n| (n as f64).powf(-s)).sum();
    let mut sum = head + N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = N.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        sum += b / factorial * rising * power;
        let k = 2.0 * (j as f64 + 1.0);
        rising *= (s + k - 1.0) * (s + k);
        factorial *= (k + 1.0) * (k + 2.0);
        power /= N * N;
    }
    sum
}

/// `ζ(1/2 - k) / k!` for `k = 0 .. EXPANSION_TERMS`, from the functional equation.
fn expansion_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let two_pi = 2.0 * PI;
        let mut gamma_ratio = PI.sqrt(); // Γ(1/2 + k) / k!
        let mut scale = 2.0 / two_pi.sqrt(); // 2 (2π)^{-1/2-k}
        (0..EXPANSION_TERMS)
            .map(|k| {
                if k > 0 {
                    gamma_ratio *= (k as f64 - 0.5) / k as f64;
                    scale /= two_pi;
                }
                let cos = match k % 4 {
                    0 | 3 => FRAC_1_SQRT_2,
                    _ => -FRAC_1_SQRT_2,
                };
                scale * cos * gamma_ratio * zeta(0.5 + k as f64)
            })
            .collect()
    })
}

/// `Li_{1/2}(w)` for `|w| <= 1`, `w != 1`.
pub fn li_half(w: Complex64) -> Complex64 {
    li_half_exp(w.ln())
}

/// `Li_{1/2}(e^μ)` for `Re μ <= 0`, `μ != 0`.
pub fn li_half_exp(mu: Complex64) -> Complex64 {
    if mu.norm() < EXPANSION_RADIUS {
        let coeffs = expansion_coefficients();
        let mut acc = PI.sqrt() / (-mu).sqrt();
        let mut power = Complex64::new(1.0, 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            let term = power * *c;
            acc += term;
            if k > 8 && term.norm() < 1e-18 * acc.norm().max(1.0) {
                break;
            }
            power *= mu;
        }
        acc
    } else {
        let w = mu.exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut power = w;
        let mut n = 1.0f64;
        while power.norm() > 1e-19 * acc.norm().max(1e-300) {
            acc += power / n.sqrt();
            power *= w;
            n += 1.0;
            if n > 2000.0 {
                break;
            }
        }
        acc
    }
}
