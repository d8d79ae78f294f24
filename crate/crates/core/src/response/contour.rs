//! Integration contours for the mode integrals.
//!
//! The mode integrand `exp(-τ²/2σ² + i sΩ τ + i k h(τ))` is entire in `τ` and is
//! integrated along a horizontal line `Im τ = ψ`, with `0 <= aψ <= π/2` when `a > 0`.
//! The height minimises the peak modulus along the line.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

/// Panels per oscillation period of the integrand phase.
pub const PANELS_PER_PERIOD: f64 = 8.0;
/// Upper bound on the starting panel count of a single contour integral.
pub const MAX_INITIAL_PANELS: usize = 1 << 17;
/// Panel count above which a higher line is preferred over the lowest peak.
pub const PANEL_BUDGET: usize = 1024;

/// `e^z - 1` without cancellation for small `|z|`.
pub fn complex_expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// Light-cone combination `t(τ) - d·x(τ)` of the hyperbolic trajectory, continued to complex τ.
///
/// `d = +1` is used for right-moving modes (`m > 0`), `d = -1` for left-moving ones.
pub fn lightcone(a: f64, d: f64, tau: Complex64) -> Complex64 {
    if a == 0.0 {
        tau
    } else {
        -complex_expm1(-d * a * tau) * d / a
    }
}

/// `sin(aψ)/a`, continuous at `a = 0`.
fn sin_over_a(a: f64, psi: f64) -> f64 {
    if a == 0.0 {
        psi
    } else {
        (a * psi).sin() / a
    }
}

/// Principal branch of the Lambert W function for `x >= 0`.
fn lambert_w(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut w = if x < 1.0 { x / (1.0 + x) } else { x.ln() - x.ln().ln().max(0.0) * 0.5 };
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

/// Geometry of one mode integrand on a horizontal line `Im τ = ψ`.
#[derive(Debug, Clone, Copy)]
pub struct ModeLine {
    pub a: f64,
    pub sigma: f64,
    /// Signed gap `sΩ`.
    pub omega_s: f64,
    pub k: f64,
    /// Mode direction, `+1` or `-1`.
    pub d: f64,
}

impl ModeLine {
    /// `log|f(t + iψ)|`.
    pub fn log_modulus(&self, psi: f64, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let base = (psi * psi - t * t) / (2.0 * s2) - self.omega_s * psi;
        let b = self.k * sin_over_a(self.a, psi);
        if b == 0.0 {
            base
        } else {
            base - b * (-self.d * self.a * t).exp()
        }
    }

    /// Location and value of the modulus peak along the line.
    fn peak(&self, psi: f64) -> (f64, f64) {
        let s2 = self.sigma * self.sigma;
        let b = self.k * sin_over_a(self.a, psi);
        if self.a == 0.0 || b <= 0.0 {
            return (0.0, self.log_modulus(psi, 0.0));
        }
        let t_star = lambert_w(s2 * self.a * self.a * b) / self.a;
        let t = self.d * t_star;
        (t, self.log_modulus(psi, t))
    }

    /// Height minimising the peak modulus.
    pub fn best_height(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        let unconstrained = s2 * (self.omega_s + self.k);
        if self.a == 0.0 {
            return unconstrained;
        }
        let hi = (FRAC_PI_2 / self.a).min(2.0 * (s2 * (self.omega_s.abs() + self.k)).max(self.sigma));
        let objective = |psi: f64| self.peak(psi).1;
        const SCAN: usize = 32;
        let mut best = (0usize, objective(0.0));
        for i in 1..=SCAN {
            let v = objective(hi * i as f64 / SCAN as f64);
            if v < best.1 {
                best = (i, v);
            }
        }
        let step = hi / SCAN as f64;
        let mut lo = (best.0 as f64 - 1.0).max(0.0) * step;
        let mut up = ((best.0 + 1).min(SCAN)) as f64 * step;
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = up - ratio * (up - lo);
        let mut x2 = lo + ratio * (up - lo);
        let mut f1 = objective(x1);
        let mut f2 = objective(x2);
        for _ in 0..40 {
            if f1 < f2 {
                up = x2;
                x2 = x1;
                f2 = f1;
                x1 = up - ratio * (up - lo);
                f1 = objective(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (up - lo);
                f2 = objective(x2);
            }
        }
        let psi = 0.5 * (lo + up);
        if objective(psi) <= best.1 {
            psi
        } else {
            best.0 as f64 * step
        }
    }

    /// Line height and window: the lowest peak, raised if needed to stay within [`PANEL_BUDGET`].
    pub fn contour(&self, depth: f64) -> (f64, f64, f64, usize) {
        let cost = |psi: f64| {
            let (lo, hi) = self.window(psi, depth);
            (lo, hi, self.initial_panels(psi, lo, hi))
        };
        let psi = self.best_height();
        let (lo, hi, panels) = cost(psi);
        if self.a == 0.0 || panels <= PANEL_BUDGET {
            return (psi, lo, hi, panels);
        }
        let top = FRAC_PI_2 / self.a;
        let (tlo, thi, tpanels) = cost(top);
        if tpanels > PANEL_BUDGET {
            return if tpanels < panels { (top, tlo, thi, tpanels) } else { (psi, lo, hi, panels) };
        }
        let (mut below, mut above) = (psi, top);
        for _ in 0..50 {
            let mid = 0.5 * (below + above);
            if cost(mid).2 <= PANEL_BUDGET {
                above = mid;
            } else {
                below = mid;
            }
        }
        let (lo, hi, panels) = cost(above);
        (above, lo, hi, panels)
    }

    /// Interval where the modulus is within `depth` e-folds of its peak.
    pub fn window(&self, psi: f64, depth: f64) -> (f64, f64) {
        let (tp, top) = self.peak(psi);
        let level = top - depth;
        let find = |dir: f64| {
            let mut inner = tp;
            let mut step = self.sigma;
            let mut outer = tp + dir * step;
            let mut guard = 0;
            while self.log_modulus(psi, outer) > level && guard < 200 {
                inner = outer;
                step *= 2.0;
                outer = tp + dir * step;
                guard += 1;
            }
            for _ in 0..100 {
                let mid = 0.5 * (inner + outer);
                if self.log_modulus(psi, mid) > level {
                    inner = mid;
                } else {
                    outer = mid;
                }
                if (outer - inner).abs() < 1e-9 * self.sigma {
                    break;
                }
            }
            outer
        };
        (find(-1.0), find(1.0))
    }

    /// Total variation of the integrand phase over `[lo, hi]`.
    pub fn phase_variation(&self, psi: f64, lo: f64, hi: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let c0 = self.omega_s - psi / s2;
        if self.a == 0.0 {
            return (c0 + self.k).abs() * (hi - lo);
        }
        let da = self.d * self.a;
        let c1 = self.k * (self.a * psi).cos();
        let antiderivative = |t: f64| c0 * t - c1 * (-da * t).exp() / da;
        let ratio = -c0 / c1;
        if ratio > 0.0 && ratio.is_finite() {
            let t0 = -ratio.ln() / da;
            if t0 > lo && t0 < hi {
                return (antiderivative(t0) - antiderivative(lo)).abs()
                    + (antiderivative(hi) - antiderivative(t0)).abs();
            }
        }
        (antiderivative(hi) - antiderivative(lo)).abs()
    }

    /// Integrand value at `t + iψ`.
    pub fn integrand(&self, psi: f64, t: f64) -> Complex64 {
        let tau = Complex64::new(t, psi);
        let s2 = self.sigma * self.sigma;
        let exponent = -tau * tau / (2.0 * s2)
            + Complex64::i() * self.omega_s * tau
            + Complex64::i() * self.k * lightcone(self.a, self.d, tau);
        exponent.exp()
    }

    /// Starting panel count for `[lo, hi]`.
    pub fn initial_panels(&self, psi: f64, lo: f64, hi: f64) -> usize {
        let width = hi - lo;
        let mut oscillation = (PANELS_PER_PERIOD * self.phase_variation(psi, lo, hi) / (2.0 * PI)).ceil();
        if !oscillation.is_finite() {
            oscillation = MAX_INITIAL_PANELS as f64;
        }
        let amplitude = (2.0 * width / self.sigma).ceil() + (2.0 * width * self.a).ceil();
        (oscillation.max(amplitude).max(4.0) as usize).min(MAX_INITIAL_PANELS)
    }
}
