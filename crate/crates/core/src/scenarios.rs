//! Evolved GHZ-like detector states and their entanglement.
//!
//! Detectors start in `α|g…g⟩ + β|e…e⟩`. The last `n` of the `N` detectors
//! accelerate; qubit 0 is the most significant bit of the basis index.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gme::XState;
use crate::response::ResponseAmplitudes;

/// ESB detection threshold.
pub const BIRTH_THRESHOLD: f64 = 1e-6;
/// Entanglement values at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Largest `n` for which binomial weights are formed.
pub const MAX_BINOMIAL_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub n_total: usize,
    pub n_accel: usize,
    pub alpha: f64,
}

impl Scenario {
    pub fn new(n_total: usize, n_accel: usize, alpha: f64) -> Result<Self> {
        let s = Self { n_total, n_accel, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total < 3 {
            return Err(Error::InvalidParams(format!("N must be >= 3, got {}", self.n_total)));
        }
        if self.n_accel < 1 || self.n_accel >= self.n_total {
            return Err(Error::InvalidParams(format!(
                "n must satisfy 1 <= n < N, got n = {}, N = {}",
                self.n_accel, self.n_total
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParams(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        beta(self.alpha)
    }

    /// `α ∈ {0, 1}`: the initial state is a product state.
    pub fn is_degenerate(&self) -> bool {
        self.alpha == 0.0 || self.alpha == 1.0
    }
}

fn beta(alpha: f64) -> f64 {
    (1.0 - alpha * alpha).max(0.0).sqrt()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Three detectors, the third accelerating.
pub fn evolved_state_one(alpha: f64, resp: &ResponseAmplitudes) -> XState {
    let beta = beta(alpha);
    let (e0, e1) = (resp.eta0, resp.eta1);
    let n0 = 1.0 + e0.norm_sqr();
    let n1 = 1.0 + e1.norm_sqr();
    let root = (n0 * n1).sqrt();
    // pairs: |ggg⟩/|eee⟩, |gge⟩/|eeg⟩, |geg⟩/|ege⟩, |gee⟩/|egg⟩
    let a_diag = vec![alpha * alpha / n0, alpha * alpha * e0.norm_sqr() / n0, 0.0, 0.0];
    let b_diag = vec![beta * beta / n1, beta * beta * e1.norm_sqr() / n1, 0.0, 0.0];
    let z_anti = vec![c(alpha * beta / root), -alpha * beta * e0 * e1.conj() / root, c(0.0), c(0.0)];
    XState { n_qubits: 3, a_diag, b_diag, z_anti }
}

/// Three detectors, the second and third accelerating.
pub fn evolved_state_two(alpha: f64, resp: &ResponseAmplitudes) -> XState {
    let beta = beta(alpha);
    let (e0, e1) = (resp.eta0, resp.eta1);
    let (m0, m1) = (e0.norm_sqr(), e1.norm_sqr());
    let n0 = 1.0 + m0;
    let n1 = 1.0 + m1;
    let (d0, d1, dz) = (n0 * n0, n1 * n1, n0 * n1);
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let cross = e0 * e1.conj();
    let a_diag = vec![a2 / d0, a2 * m0 / d0, a2 * m0 / d0, a2 * m0 * m0 / d0];
    let b_diag = vec![b2 / d1, b2 * m1 / d1, b2 * m1 / d1, b2 * m1 * m1 / d1];
    let ab = alpha * beta;
    let z_anti = vec![c(ab / dz), -ab * cross / dz, -ab * cross / dz, ab * cross * cross / dz];
    XState { n_qubits: 3, a_diag, b_diag, z_anti }
}

/// `N` detectors with the last `n` accelerating.
pub fn evolved_state_n(scenario: &Scenario, resp: &ResponseAmplitudes) -> Result<XState> {
    scenario.validate()?;
    if scenario.n_total > 24 {
        return Err(Error::InvalidParams(format!("dense X states are limited to N <= 24, got {}", scenario.n_total)));
    }
    let (alpha, beta) = (scenario.alpha, scenario.beta());
    let n = scenario.n_accel;
    let (m0, m1) = (resp.eta0.norm_sqr(), resp.eta1.norm_sqr());
    let d0 = (1.0 + m0).powi(n as i32);
    let d1 = (1.0 + m1).powi(n as i32);
    let dz = ((1.0 + m0) * (1.0 + m1)).powi(n as i32).sqrt();
    let cross = -resp.eta0 * resp.eta1.conj();
    let pairs = 1usize << (scenario.n_total - 1);
    let mut a_diag = vec![0.0; pairs];
    let mut b_diag = vec![0.0; pairs];
    let mut z_anti = vec![c(0.0); pairs];
    for mask in 0usize..(1 << n) {
        let s = mask.count_ones() as i32;
        a_diag[mask] = alpha * alpha * m0.powi(s) / d0;
        b_diag[mask] = beta * beta * m1.powi(s) / d1;
        z_anti[mask] = alpha * beta * cross.powi(s) / dz;
    }
    Ok(XState { n_qubits: scenario.n_total, a_diag, b_diag, z_anti })
}

/// `C(n, b)` by multiplicative recurrence.
pub fn binomial(n: usize, b: usize) -> f64 {
    if b > n {
        return 0.0;
    }
    let b = b.min(n - b);
    (0..b).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Closed-form entanglement for `n` accelerated detectors from the amplitude magnitudes.
pub fn entanglement_from_magnitudes(n: usize, alpha: f64, eta0_abs: f64, eta1_abs: f64) -> Result<f64> {
    if n > MAX_BINOMIAL_N {
        return Err(Error::BinomialRange(n));
    }
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let u = eta0_abs * eta1_abs;
    let mut partial = 0.0;
    let mut power = 1.0;
    for b in 1..n {
        power *= u;
        partial += binomial(n, b) * power;
    }
    let top = power * u;
    let first = 1.0 - partial - top;
    let second = top - 1.0 - partial;
    let product = (1.0 + eta0_abs * eta0_abs) * (1.0 + eta1_abs * eta1_abs);
    let mut denom = product.powi((n / 2) as i32);
    if n % 2 == 1 {
        denom *= product.sqrt();
    }
    let scale = 2.0 * alpha * beta(alpha) / denom;
    Ok((scale * first).max(scale * second).max(0.0))
}

/// Closed-form entanglement of the scenario; independent of `N`.
pub fn entanglement_closed(scenario: &Scenario, resp: &ResponseAmplitudes) -> Result<f64> {
    if scenario.n_accel > MAX_BINOMIAL_N {
        return Err(Error::BinomialRange(scenario.n_accel));
    }
    scenario.validate()?;
    entanglement_from_magnitudes(scenario.n_accel, scenario.alpha, resp.eta0.norm(), resp.eta1.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Up,
    Down,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start_a: f64,
    pub end_a: f64,
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhenomenaReport {
    pub esb: bool,
    pub birth_a: Option<f64>,
    /// Last grid point of the initial zero stretch when it spans more than one point.
    pub delay_until: Option<f64>,
    pub peaks: Vec<(f64, f64)>,
    pub segments: Vec<Segment>,
}

pub fn detect_phenomena(curve: &[(f64, f64)]) -> Result<PhenomenaReport> {
    detect_phenomena_with(curve, BIRTH_THRESHOLD)
}

pub fn detect_phenomena_with(curve: &[(f64, f64)], threshold: f64) -> Result<PhenomenaReport> {
    if curve.len() < 3 {
        return Err(Error::CurveTooShort(curve.len()));
    }
    if curve.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::InvalidParams("curve must be strictly increasing in a".into()));
    }
    let birth = curve.iter().position(|&(_, e)| e > threshold);
    let esb = curve[0].1 <= ZERO_TOL && birth.is_some();
    let birth_a = if esb { birth.map(|i| curve[i].0) } else { None };
    let delay_until = match (esb, birth) {
        (true, Some(i)) if i >= 2 && curve[..i].iter().all(|&(_, e)| e <= ZERO_TOL) => Some(curve[i - 1].0),
        _ => None,
    };
    let peaks = curve
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
        .map(|w| w[1])
        .collect();
    let mut segments: Vec<Segment> = Vec::new();
    for w in curve.windows(2) {
        let d = w[1].1 - w[0].1;
        let trend = if d > ZERO_TOL {
            Trend::Up
        } else if d < -ZERO_TOL {
            Trend::Down
        } else {
            Trend::Flat
        };
        match segments.last_mut() {
            Some(last) if last.trend == trend => last.end_a = w[1].0,
            _ => segments.push(Segment { start_a: w[0].0, end_a: w[1].0, trend }),
        }
    }
    Ok(PhenomenaReport { esb, birth_a, delay_until, peaks, segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gme::gme_xstate;
    use crate::response::Route;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn resp(e0: f64, e1: f64) -> ResponseAmplitudes {
        ResponseAmplitudes {
            eta0: c(e0),
            eta1: c(e1),
            p: 0.0,
            modes_used: 0,
            modes: Vec::new(),
            route: Route::Resummed,
        }
    }

    #[test]
    fn state_one_examples() {
        let s = evolved_state_one(FRAC_1_SQRT_2, &resp(0.0, 0.0));
        assert!((s.a_diag[0] - 0.5).abs() < 1e-15 && (s.z_anti[0].re - 0.5).abs() < 1e-15);
        let r = 0.1f64.sqrt();
        let s = evolved_state_one(FRAC_1_SQRT_2, &resp(r, r));
        assert!((s.a_diag[0] - 1.0 / 2.2).abs() < 1e-15);
        assert!((s.a_diag[1] - 0.05 / 1.1).abs() < 1e-15);
        assert!((s.b_diag[1] - 0.05 / 1.1).abs() < 1e-15);
        s.validate().unwrap();
    }

    #[test]
    fn state_two_examples() {
        let r = 0.1f64.sqrt();
        let s = evolved_state_two(FRAC_1_SQRT_2, &resp(r, r));
        assert!((s.a_diag[0] - 0.5 / 1.21).abs() < 1e-15);
        assert!((s.a_diag[1] - 0.05 / 1.21).abs() < 1e-15);
        assert!((s.a_diag[2] - 0.05 / 1.21).abs() < 1e-15);
        assert!((s.a_diag[3] - 0.005 / 1.21).abs() < 1e-15);
        s.validate().unwrap();
    }

    #[test]
    fn general_state_matches_special_cases() {
        let r = resp(0.3, 0.7);
        let one = evolved_state_n(&Scenario::new(3, 1, 0.6).unwrap(), &r).unwrap();
        let two = evolved_state_n(&Scenario::new(3, 2, 0.6).unwrap(), &r).unwrap();
        for (x, y) in [(one, evolved_state_one(0.6, &r)), (two, evolved_state_two(0.6, &r))] {
            for i in 0..4 {
                assert!((x.a_diag[i] - y.a_diag[i]).abs() < 1e-15);
                assert!((x.b_diag[i] - y.b_diag[i]).abs() < 1e-15);
                assert!((x.z_anti[i] - y.z_anti[i]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let r = 0.1f64.sqrt();
        let e = |n_total, n, e0, e1| {
            entanglement_closed(&Scenario::new(n_total, n, FRAC_1_SQRT_2).unwrap(), &resp(e0, e1)).unwrap()
        };
        assert!((e(3, 1, 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(e(3, 1, 2.0, 0.5).abs() < 1e-15);
        assert!((e(3, 1, r, r) - 0.9 / 1.1).abs() < 1e-14);
        assert!((e(4, 2, r, r) - 0.79 / 1.21).abs() < 1e-14);
        assert!((e(5, 3, r, r) - 0.669 / 1.331).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_matrix_path_for_larger_registers() {
        for n_total in 3..=6 {
            for n in 1..n_total {
                let sc = Scenario::new(n_total, n, 0.8).unwrap();
                let r = resp(0.21, 0.34);
                let x = evolved_state_n(&sc, &r).unwrap();
                let closed = entanglement_closed(&sc, &r).unwrap();
                assert!((gme_xstate(&x).unwrap() - closed).abs() < 1e-12, "N={n_total} n={n}");
            }
        }
    }

    #[test]
    fn binomial_range() {
        assert_eq!(binomial(5, 2), 10.0);
        assert!((binomial(64, 32) / 1832624140942590534.0 - 1.0).abs() < 1e-14);
        assert_eq!(entanglement_from_magnitudes(65, 0.5, 0.1, 0.1), Err(Error::BinomialRange(65)));
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(2, 1, 0.5).is_err());
        assert!(Scenario::new(3, 3, 0.5).is_err());
        assert!(Scenario::new(3, 0, 0.5).is_err());
        assert!(Scenario::new(3, 1, 1.5).is_err());
        assert!(Scenario::new(3, 1, 1.0).unwrap().is_degenerate());
    }

    #[test]
    fn phenomena_examples() {
        let flat: Vec<(f64, f64)> = (0..5).map(|i| (i as f64 * 0.1, 0.0)).collect();
        let r = detect_phenomena(&flat).unwrap();
        assert!(!r.esb && r.peaks.is_empty());
        let grid = [0.0, 0.1, 0.2, 0.3, 0.4];
        let vals = [0.0, 0.0, 0.0, 0.1, 0.2];
        let curve: Vec<(f64, f64)> = grid.iter().copied().zip(vals).collect();
        let r = detect_phenomena(&curve).unwrap();
        assert!(r.esb);
        assert_eq!(r.birth_a, Some(0.3));
        assert_eq!(r.delay_until, Some(0.2));
        let hump = [(0.0, 0.1), (0.1, 0.3), (0.2, 0.2)];
        assert_eq!(detect_phenomena(&hump).unwrap().peaks, vec![(0.1, 0.3)]);
        assert_eq!(detect_phenomena(&hump[..2]), Err(Error::CurveTooShort(2)));
    }
}
