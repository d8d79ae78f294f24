//! Composite Gauss-Legendre quadrature for smooth complex integrands.
//!
//! Integrals are evaluated on uniform panels of a fixed-order rule. The
//! refinement driver doubles the panel count until two successive results
//! agree, with the agreement floor tied to the accumulated magnitude of the
//! integrand.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Points per panel.
pub const PANEL_ORDER: usize = 8;

/// Roundoff allowance, in units of machine epsilon times the integral of |f|.
const ROUNDOFF_FACTOR: f64 = 64.0;

fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let order = NonZeroUsize::new(PANEL_ORDER).expect("nonzero order");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(order)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x, w))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        pairs
    })
}

/// Nodes and weights of the composite rule over `[lo, hi]` split into `panels` panels.
pub fn composite_nodes(lo: f64, hi: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = reference_rule();
    let panels = panels.max(1);
    let width = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * rule.len());
    let mut weights = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let left = lo + width * p as f64;
        let mid = left + 0.5 * width;
        for &(x, w) in rule {
            nodes.push(mid + 0.5 * width * x);
            weights.push(0.5 * width * w);
        }
    }
    (nodes, weights)
}

/// Single evaluation of the composite rule. Returns the integral and the integral of |f|.
pub fn composite<F>(lo: f64, hi: f64, panels: usize, mut f: F) -> (Complex64, f64)
where
    F: FnMut(f64) -> Complex64,
{
    let rule = reference_rule();
    let panels = panels.max(1);
    let width = (hi - lo) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for p in 0..panels {
        let mid = lo + width * (p as f64 + 0.5);
        let half = 0.5 * width;
        let mut panel = Complex64::new(0.0, 0.0);
        for &(x, w) in rule {
            let v = f(mid + half * x);
            panel += v * w;
            abs_sum += v.norm() * w * half;
        }
        sum += panel * half;
    }
    (sum, abs_sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: Complex64,
    pub abs_integral: f64,
    pub panels: usize,
}

/// True when `fine` and `coarse` agree to `rel_tol`, or to the roundoff floor set by `abs_integral`.
pub fn agrees(fine: Complex64, coarse: Complex64, abs_integral: f64, rel_tol: f64) -> bool {
    let diff = (fine - coarse).norm();
    diff <= rel_tol * fine.norm() || diff <= ROUNDOFF_FACTOR * f64::EPSILON * abs_integral
}

/// Doubling refinement starting at `initial_panels`. `None` if the cap is exhausted.
pub fn integrate_refined<F>(
    lo: f64,
    hi: f64,
    initial_panels: usize,
    rel_tol: f64,
    max_doublings: usize,
    mut f: F,
) -> Option<Refined>
where
    F: FnMut(f64) -> Complex64,
{
    let mut panels = initial_panels.max(1);
    let (mut coarse, _) = composite(lo, hi, panels, &mut f);
    for _ in 0..max_doublings {
        panels *= 2;
        let (fine, abs_integral) = composite(lo, hi, panels, &mut f);
        if agrees(fine, coarse, abs_integral, rel_tol) {
            return Some(Refined { value: fine, abs_integral, panels });
        }
        coarse = fine;
    }
    None
}
