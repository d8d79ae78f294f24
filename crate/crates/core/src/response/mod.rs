//! First-order response of a uniformly accelerated detector coupled to a cavity field.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate_refined;

pub mod contour;
mod resummed;

pub use resummed::response_resummed;

use resummed::resummed_conditioned;

use contour::ModeLine;

/// Consecutive small mode pairs required before the explicit sum stops.
pub const TAIL_PAIRS: usize = 5;
/// Maximum panel doublings of a single mode integral.
pub const MAX_DOUBLINGS: usize = 10;
/// Pair index at which the automatic strategy probes the far tail.
pub const PROBE_AFTER: usize = 32;
/// Roundoff amplification factor applied to the resummed condition number.
const ROUNDOFF_MARGIN: f64 = 640.0;

/// How the sum over cavity modes is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeSum {
    /// Resummed kernels when well conditioned, otherwise explicit summation, and
    /// the resummed result again if the explicit tail does not close within `mode_cap`.
    #[default]
    Auto,
    /// Explicit pairwise summation only.
    Explicit,
    /// Closed-form mode sums under a single contour integral.
    Resummed,
}

/// Route actually taken by [`response_amplitudes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Explicit,
    Resummed,
}

/// Sign of the gap term in the mode integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub a: f64,
    pub omega: f64,
    pub sigma: f64,
    pub l: f64,
    pub lambda: f64,
    pub tau_window: f64,
    pub mode_cap: usize,
    pub mode_tol: f64,
    pub quad_tol: f64,
    pub a_eps: f64,
    pub mode_sum: ModeSum,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            a: 0.0,
            omega: 1.0,
            sigma: 0.4,
            l: 200.0,
            lambda: 0.1,
            tau_window: 10.0,
            mode_cap: 5000,
            mode_tol: 1e-10,
            quad_tol: 1e-9,
            a_eps: 1e-8,
            mode_sum: ModeSum::Auto,
        }
    }
}

impl DetectorParams {
    pub fn with_a(self, a: f64) -> Self {
        Self { a, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("Omega", self.omega),
            ("sigma", self.sigma),
            ("L", self.l),
            ("lambda", self.lambda),
            ("quad_tol", self.quad_tol),
            ("mode_tol", self.mode_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(Error::InvalidParams(format!("a must be finite and >= 0, got {}", self.a)));
        }
        if !(self.tau_window.is_finite() && self.tau_window >= 4.0) {
            return Err(Error::InvalidParams(format!("tau_window must be >= 4, got {}", self.tau_window)));
        }
        if self.mode_cap < 1 {
            return Err(Error::InvalidParams("mode_cap must be >= 1".into()));
        }
        if !(self.a_eps.is_finite() && self.a_eps >= 0.0) {
            return Err(Error::InvalidParams(format!("a_eps must be finite and >= 0, got {}", self.a_eps)));
        }
        Ok(())
    }

    fn wavenumber(&self, m: i64) -> f64 {
        2.0 * PI * m.unsigned_abs() as f64 / self.l
    }
}

/// `sinh(y)/y`.
fn sinhc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 + y * y / 6.0
    } else {
        y.sinh() / y
    }
}

/// Coordinates `(t, x)` of the accelerated worldline at proper time `tau`.
///
/// Uses `t = τ·sinhc(aτ)` and `x = (aτ²/2)·sinhc(aτ/2)²`, which reduce to the inertial
/// limit `(τ, aτ²/2)` without cancellation.
pub fn trajectory(a: f64, tau: f64) -> (f64, f64) {
    let y = a * tau;
    let s = sinhc(0.5 * y);
    (tau * sinhc(y), 0.5 * a * tau * tau * s * s)
}

/// Gaussian switching weight.
pub fn switching(tau: f64, sigma: f64) -> f64 {
    (-tau * tau / (2.0 * sigma * sigma)).exp()
}

/// Upper bound on `|I±,m|`.
pub fn mode_bound(sigma: f64, m: i64) -> f64 {
    sigma * (2.0 * PI).sqrt() / (4.0 * PI * m.unsigned_abs() as f64).sqrt()
}

/// Inertial mode integral `σ√(2π)·exp(-σ²(±Ω + k)²/2)/√(4π|m|)`.
pub fn mode_integral_analytic(params: &DetectorParams, m: i64, sign: Sign) -> f64 {
    let q = sign.value() * params.omega + params.wavenumber(m);
    mode_bound(params.sigma, m) * (-0.5 * params.sigma * params.sigma * q * q).exp()
}

/// Mode integral `I±,m`, analytic below `a_eps`.
pub fn mode_integral(params: &DetectorParams, m: i64, sign: Sign) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidParams("mode index m = 0 is excluded".into()));
    }
    if params.a < params.a_eps {
        Ok(Complex64::new(mode_integral_analytic(params, m, sign), 0.0))
    } else {
        mode_integral_quadrature(params, m, sign)
    }
}

/// Mode integral `I±,m` by contour quadrature, at any `a`.
pub fn mode_integral_quadrature(params: &DetectorParams, m: i64, sign: Sign) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidParams("mode index m = 0 is excluded".into()));
    }
    let line = ModeLine {
        a: params.a,
        sigma: params.sigma,
        omega_s: sign.value() * params.omega,
        k: params.wavenumber(m),
        d: m.signum() as f64,
    };
    let (psi, lo, hi, panels) = line.contour(0.5 * params.tau_window * params.tau_window);
    let refined = integrate_refined(lo, hi, panels, params.quad_tol, MAX_DOUBLINGS, |t| {
        line.integrand(psi, t)
    })
    .ok_or_else(|| Error::QuadratureNonConvergence {
        context: format!("I(m = {m}, {sign:?}) at a = {}", params.a),
        doublings: MAX_DOUBLINGS,
    })?;
    Ok(refined.value / (4.0 * PI * m.unsigned_abs() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitude {
    pub m: i64,
    pub i_plus: Complex64,
    pub i_minus: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseAmplitudes {
    pub eta0: Complex64,
    pub eta1: Complex64,
    pub p: f64,
    pub modes_used: usize,
    /// Individual mode values; empty on the resummed route.
    pub modes: Vec<ModeAmplitude>,
    pub route: Route,
}

/// `λ²·Σ|I₊,m|²` over the given modes, in order.
pub fn transition_probability(lambda: f64, modes: &[ModeAmplitude]) -> f64 {
    let s: f64 = modes.iter().map(|m| m.i_plus.norm_sqr()).sum();
    (lambda * lambda) * s
}

/// Coupling-free sums `(Σ I₊, Σ I₋)` over the given modes, in order.
fn amplitude_sums(modes: &[ModeAmplitude]) -> (Complex64, Complex64) {
    modes.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(s0, s1), m| {
        (s0 + m.i_plus, s1 + m.i_minus)
    })
}

/// Detector amplitudes `η₀`, `η₁` and the excitation probability `P`.
pub fn response_amplitudes(params: &DetectorParams) -> Result<ResponseAmplitudes> {
    params.validate()?;
    match params.mode_sum {
        ModeSum::Explicit => explicit_sum(params, false),
        ModeSum::Resummed => response_resummed(params),
        ModeSum::Auto => {
            let resummed = resummed_conditioned(params);
            if let Ok((r, condition)) = &resummed {
                if condition * ROUNDOFF_MARGIN * f64::EPSILON <= params.quad_tol {
                    return Ok(r.clone());
                }
            }
            match (explicit_sum(params, true), resummed) {
                (Err(Error::ModeSumNonConvergence { .. }), Ok((r, _))) => Ok(r),
                (explicit, _) => explicit,
            }
        }
    }
}

fn explicit_sum(params: &DetectorParams, probe: bool) -> Result<ResponseAmplitudes> {
    let cap = params.mode_cap;
    let tol = params.mode_tol;
    // pairs below the gap wavenumber never count towards the stopping run
    let first_eligible = (params.omega * params.l / (2.0 * PI)).ceil().max(1.0) as usize;
    let mut modes = Vec::with_capacity(64);
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut q = 0.0f64;
    let mut run = 0usize;
    for j in 1..=cap {
        let m = j as i64;
        let ip = mode_integral(params, m, Sign::Plus)?;
        let im = mode_integral(params, m, Sign::Minus)?;
        // I(-m) = conj(I(m))
        let pair0 = ip + ip.conj();
        let pair1 = im + im.conj();
        let pairp = 2.0 * ip.norm_sqr();
        s0 += pair0;
        s1 += pair1;
        q += pairp;
        modes.push(ModeAmplitude { m, i_plus: ip, i_minus: im });
        modes.push(ModeAmplitude { m: -m, i_plus: ip.conj(), i_minus: im.conj() });
        let small = 2.0 * ip.norm() <= tol * s0.norm()
            && 2.0 * im.norm() <= tol * s1.norm()
            && pairp <= tol * q;
        run = if small && j >= first_eligible { run + 1 } else { 0 };
        if run >= TAIL_PAIRS {
            return Ok(finish(params, modes, Route::Explicit));
        }
        if probe && j == PROBE_AFTER && cap > PROBE_AFTER && heavy_tail(params, cap, s0, s1, q)? {
            break;
        }
    }
    Err(Error::ModeSumNonConvergence { mode_cap: cap, a: params.a })
}

/// True when the pair at `|m| = cap` alone still exceeds the tail tolerance.
fn heavy_tail(params: &DetectorParams, cap: usize, s0: Complex64, s1: Complex64, q: f64) -> Result<bool> {
    let m = cap as i64;
    let ip = mode_integral(params, m, Sign::Plus)?;
    let im = mode_integral(params, m, Sign::Minus)?;
    let tol = params.mode_tol;
    Ok(2.0 * ip.norm() > tol * s0.norm()
        || 2.0 * im.norm() > tol * s1.norm()
        || 2.0 * ip.norm_sqr() > tol * q)
}

fn finish(params: &DetectorParams, modes: Vec<ModeAmplitude>, route: Route) -> ResponseAmplitudes {
    let (s0, s1) = amplitude_sums(&modes);
    ResponseAmplitudes {
        eta0: params.lambda * s0,
        eta1: params.lambda * s1,
        p: transition_probability(params.lambda, &modes),
        modes_used: modes.len(),
        modes,
        route,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * y.abs().max(1e-300)
    }

    #[test]
    fn trajectory_examples() {
        assert_eq!(trajectory(1.0, 0.0), (0.0, 0.0));
        assert_eq!(trajectory(0.0, 2.5), (2.5, 0.0));
        let (t, x) = trajectory(1.0, 1.0);
        assert!(close(t, 1f64.sinh(), 1e-15));
        assert!(close(x, 1f64.cosh() - 1.0, 1e-15));
    }

    #[test]
    fn trajectory_tiny_acceleration() {
        let a = 1e-10;
        let (t, x) = trajectory(a, 3.0);
        assert!(close(t, 3.0, 1e-15));
        assert!(close(x, 0.5 * a * 9.0, 1e-12));
    }

    #[test]
    fn switching_examples() {
        assert_eq!(switching(0.0, 0.4), 1.0);
        assert!(close(switching(5.0, 5.0), (-0.5f64).exp(), 1e-15));
        assert!(close(switching(1.6, 0.4), (-8.0f64).exp(), 1e-15));
    }

    #[test]
    fn analytic_mode_values() {
        let p = DetectorParams::default();
        let minus = mode_integral(&p, 1, Sign::Minus).unwrap();
        let plus = mode_integral(&p, 1, Sign::Plus).unwrap();
        assert!((minus.re - 0.26239).abs() < 5e-6 && minus.im == 0.0);
        assert!((plus.re - 0.25977).abs() < 5e-6 && plus.im == 0.0);
        assert_eq!(mode_integral(&p, 5, Sign::Plus).unwrap(), mode_integral(&p, -5, Sign::Plus).unwrap());
    }

    #[test]
    fn zero_mode_rejected() {
        let p = DetectorParams::default();
        assert!(matches!(mode_integral(&p, 0, Sign::Plus), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn quadrature_matches_analytic_at_rest() {
        for (omega, sigma) in [(1.0, 0.4), (2.0, 5.0), (0.5, 5.0)] {
            let p = DetectorParams { omega, sigma, a_eps: 0.0, ..Default::default() };
            for m in [1i64, -3, 40, -200] {
                for sign in [Sign::Plus, Sign::Minus] {
                    let q = mode_integral_quadrature(&p, m, sign).unwrap();
                    let e = mode_integral_analytic(&p, m, sign);
                    assert!((q.re - e).abs() <= 1e-9 * e && q.im.abs() <= 1e-9 * e, "m={m} {sign:?}: {q} vs {e}");
                }
            }
        }
    }

    #[test]
    fn reflected_mode_is_conjugate() {
        let p = DetectorParams { a: 0.4, ..Default::default() };
        for sign in [Sign::Plus, Sign::Minus] {
            let a = mode_integral(&p, 7, sign).unwrap();
            let b = mode_integral(&p, -7, sign).unwrap();
            assert!((a.conj() - b).norm() <= 1e-9 * a.norm());
        }
    }

    #[test]
    fn validate_rejects_bad_fields() {
        let base = DetectorParams::default();
        assert!(base.validate().is_ok());
        for bad in [
            DetectorParams { omega: 0.0, ..base },
            DetectorParams { sigma: -1.0, ..base },
            DetectorParams { a: -0.1, ..base },
            DetectorParams { tau_window: 3.0, ..base },
            DetectorParams { mode_cap: 0, ..base },
            DetectorParams { quad_tol: 0.0, ..base },
            DetectorParams { lambda: f64::NAN, ..base },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidParams(_))));
        }
    }
}
