//! Mode sums taken inside the τ integral.
//!
//! `Σ_{m≥1} w^m/√m = Li_{1/2}(w)` and `Σ_{m≥1} (w_i w̄_j)^m/m = -ln(1 - w_i w̄_j)` with
//! `w(τ) = exp(2πi·h(τ)/L)`, evaluated on a line `Im τ = ψ > 0` where `|w| < 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::contour::{complex_expm1, lightcone, ModeLine, MAX_INITIAL_PANELS};
use super::{DetectorParams, ResponseAmplitudes, Route, Sign, MAX_DOUBLINGS};
use crate::error::{Error, Result};
use crate::polylog::li_half_exp;
use crate::quadrature::{agrees, composite_nodes, integrate_refined};

/// Doublings allowed for the double sum behind `P`.
const PAIR_DOUBLINGS: usize = 4;
/// Pairs with `|g_i g_j|` below this fraction of the largest are skipped.
const PAIR_CUTOFF: f64 = 1e-30;

struct Kernel {
    a: f64,
    sigma: f64,
    omega_s: f64,
    /// `2π/L`
    k1: f64,
    psi: f64,
}

impl Kernel {
    fn new(params: &DetectorParams, sign: Sign) -> Self {
        let a = if params.a < params.a_eps { 0.0 } else { params.a };
        let sigma = params.sigma;
        let omega = params.omega;
        let cap = if a > 0.0 { FRAC_PI_2 / a } else { f64::INFINITY };
        let psi = match sign {
            Sign::Plus => (sigma * sigma * omega).max(0.5 * sigma).min(cap),
            Sign::Minus => (0.5 * sigma).min(1.0 / omega).min(cap),
        };
        Self { a, sigma, omega_s: sign.value() * omega, k1: 2.0 * PI / params.l, psi }
    }

    fn line(&self) -> ModeLine {
        ModeLine { a: self.a, sigma: self.sigma, omega_s: self.omega_s, k: self.k1, d: 1.0 }
    }

    /// `(F(τ), ln w(τ))` at `t + iψ`, with `F = χ e^{isΩτ}`.
    fn parts(&self, t: f64) -> (Complex64, Complex64) {
        let tau = Complex64::new(t, self.psi);
        let f = (-tau * tau / (2.0 * self.sigma * self.sigma) + Complex64::i() * self.omega_s * tau).exp();
        let h = lightcone(self.a, 1.0, tau);
        (f, Complex64::i() * self.k1 * h)
    }

    fn bounds(&self, depth: f64) -> (f64, f64, usize) {
        let line = self.line();
        let (lo, hi) = line.window(self.psi, depth);
        let scale = self.sigma.min(self.psi);
        let fine = ((hi - lo) / scale).ceil() as usize;
        let panels = line.initial_panels(self.psi, lo, hi).max(fine).min(MAX_INITIAL_PANELS);
        (lo, hi, panels)
    }
}

/// `Σ_{m≥1} I±,m` through the `Li_{1/2}` kernel, with its condition number.
fn half_sum(params: &DetectorParams, sign: Sign) -> Result<(Complex64, f64)> {
    let kernel = Kernel::new(params, sign);
    let (lo, hi, panels) = kernel.bounds(0.5 * params.tau_window * params.tau_window);
    let refined = integrate_refined(lo, hi, panels, params.quad_tol, MAX_DOUBLINGS, |t| {
        let (f, mu) = kernel.parts(t);
        f * li_half_exp(mu)
    })
    .ok_or_else(|| Error::QuadratureNonConvergence {
        context: format!("resummed {sign:?} amplitude at a = {}", params.a),
        doublings: MAX_DOUBLINGS,
    })?;
    let condition = refined.abs_integral / refined.value.re.abs();
    Ok((refined.value / (4.0 * PI).sqrt(), condition))
}

/// `-ln(1 - x)` accurate for small `|x|`.
fn neg_log1m(x: Complex64) -> Complex64 {
    let re = -0.5 * (-2.0 * x.re + x.norm_sqr()).ln_1p();
    let im = -(-x.im).atan2(1.0 - x.re);
    Complex64::new(re, im)
}

/// `-ln(1 - e^ν)` for `Re ν < 0`.
fn log_kernel(nu: Complex64) -> Complex64 {
    if nu.re < -1e-3 {
        neg_log1m(nu.exp())
    } else {
        -(-complex_expm1(nu)).ln()
    }
}

/// `(Σ_ij g_i ḡ_j K_ij, Σ_ij |g_i g_j K_ij|)` on `panels` panels.
fn pair_sum(kernel: &Kernel, lo: f64, hi: f64, panels: usize) -> (f64, f64) {
    let (x, wt) = composite_nodes(lo, hi, panels);
    let mut g = Vec::with_capacity(x.len());
    let mut mu = Vec::with_capacity(x.len());
    for (&t, &weight) in x.iter().zip(&wt) {
        let (f, m) = kernel.parts(t);
        g.push(f * weight);
        mu.push(m);
    }
    let gmax = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = PAIR_CUTOFF * gmax * gmax;
    let live: Vec<usize> = (0..g.len()).filter(|&i| g[i].norm() * gmax > floor).collect();
    let mut total = 0.0;
    let mut abs_total = 0.0;
    for (pos, &i) in live.iter().enumerate() {
        let gi = g[i];
        let diag = gi.norm_sqr() * log_kernel(Complex64::new(2.0 * mu[i].re, 0.0)).re;
        total += diag;
        abs_total += diag.abs();
        let gin = gi.norm();
        let mut off = Complex64::new(0.0, 0.0);
        for &j in &live[pos + 1..] {
            if gin * g[j].norm() <= floor {
                continue;
            }
            let term = gi * g[j].conj() * log_kernel(mu[i] + mu[j].conj());
            abs_total += 2.0 * term.norm();
            off += term;
        }
        total += 2.0 * off.re;
    }
    (total, abs_total)
}

/// `Σ_{m≥1} |I₊,m|²` through the logarithmic kernel, with its condition number.
fn probability_sum(params: &DetectorParams) -> Result<(f64, f64)> {
    let kernel = Kernel::new(params, Sign::Plus);
    let (lo, hi, mut panels) = kernel.bounds(0.5 * params.tau_window * params.tau_window);
    let (mut coarse, _) = pair_sum(&kernel, lo, hi, panels);
    for _ in 0..PAIR_DOUBLINGS {
        panels *= 2;
        let (fine, abs_total) = pair_sum(&kernel, lo, hi, panels);
        if agrees(fine.into(), coarse.into(), abs_total, params.quad_tol) {
            return Ok((fine / (4.0 * PI), abs_total / fine.abs()));
        }
        coarse = fine;
    }
    Err(Error::QuadratureNonConvergence {
        context: format!("resummed transition probability at a = {}", params.a),
        doublings: PAIR_DOUBLINGS,
    })
}

/// Response amplitudes from the resummed kernels, independent of `mode_cap`.
pub fn response_resummed(params: &DetectorParams) -> Result<ResponseAmplitudes> {
    params.validate()?;
    resummed_conditioned(params).map(|(r, _)| r)
}

/// Resummed amplitudes and the largest condition number of the three integrals.
pub(super) fn resummed_conditioned(params: &DetectorParams) -> Result<(ResponseAmplitudes, f64)> {
    let (s0, c0) = half_sum(params, Sign::Plus)?;
    let (s1, c1) = half_sum(params, Sign::Minus)?;
    let (q, cp) = probability_sum(params)?;
    let amplitudes = ResponseAmplitudes {
        eta0: params.lambda * Complex64::new(2.0 * s0.re, 0.0),
        eta1: params.lambda * Complex64::new(2.0 * s1.re, 0.0),
        p: (params.lambda * params.lambda) * (2.0 * q),
        modes_used: 0,
        modes: Vec::new(),
        route: Route::Resummed,
    };
    Ok((amplitudes, c0.max(c1).max(cp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{mode_integral_analytic, ModeSum};

    fn analytic_sums(p: &DetectorParams) -> (f64, f64, f64) {
        let (mut s0, mut s1, mut q) = (0.0, 0.0, 0.0);
        for m in 1..200_000i64 {
            let ip = mode_integral_analytic(p, m, Sign::Plus);
            s0 += ip;
            s1 += mode_integral_analytic(p, m, Sign::Minus);
            q += ip * ip;
        }
        (2.0 * s0, 2.0 * s1, 2.0 * q)
    }

    #[test]
    fn resummed_matches_mode_sum_at_rest() {
        for (omega, sigma) in [(1.0, 0.4), (0.5, 5.0), (2.0, 5.0)] {
            let p = DetectorParams { omega, sigma, lambda: 1.0, mode_sum: ModeSum::Resummed, ..Default::default() };
            let r = response_resummed(&p).unwrap();
            let (e0, e1, pp) = analytic_sums(&p);
            assert!((r.eta0.re - e0).abs() <= 1e-8 * e0.abs(), "{omega} {sigma}: {} vs {e0}", r.eta0.re);
            assert!((r.eta1.re - e1).abs() <= 1e-8 * e1.abs(), "{omega} {sigma}: {} vs {e1}", r.eta1.re);
            assert!((r.p - pp).abs() <= 1e-8 * pp, "{omega} {sigma}: {} vs {pp}", r.p);
        }
    }

    #[test]
    fn log_kernel_small_argument() {
        let x = Complex64::new(1e-12, 3e-13);
        assert!((neg_log1m(x) - x).norm() < 1e-24);
        let y = Complex64::new(0.3, -0.4);
        assert!((neg_log1m(y) + (Complex64::new(1.0, 0.0) - y).ln()).norm() < 1e-15);
    }
}
