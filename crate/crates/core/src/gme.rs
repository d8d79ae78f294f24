//! X states and genuine multipartite entanglement.
//!
//! An N-qubit X state has nonzero entries only on the diagonal and anti-diagonal of
//! its density matrix in the computational basis, with qubit 0 as the most
//! significant bit. For `i < 2^{N-1}`:
//!
//! * `a_diag[i] = ρ[i, i]`
//! * `b_diag[i] = ρ[ī, ī]` with `ī = 2^N - 1 - i`
//! * `z_anti[i] = ρ[i, ī]`

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for state validity checks.
pub const STATE_TOL: f64 = 1e-12;
/// Largest register accepted by [`gme_pure`].
pub const MAX_PURE_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct XState {
    pub n_qubits: usize,
    pub a_diag: Vec<f64>,
    pub b_diag: Vec<f64>,
    pub z_anti: Vec<Complex64>,
}

impl XState {
    /// Validated constructor.
    pub fn new(n_qubits: usize, a_diag: Vec<f64>, b_diag: Vec<f64>, z_anti: Vec<Complex64>) -> Result<Self> {
        let s = Self { n_qubits, a_diag, b_diag, z_anti };
        s.validate()?;
        Ok(s)
    }

    /// Number of anti-diagonal pairs, `2^{N-1}`.
    pub fn pairs(&self) -> usize {
        1 << (self.n_qubits - 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 || self.n_qubits > 30 {
            return Err(Error::InvalidState(format!("N = {} outside 2..=30", self.n_qubits)));
        }
        let n = self.pairs();
        if self.a_diag.len() != n || self.b_diag.len() != n || self.z_anti.len() != n {
            return Err(Error::InvalidState(format!(
                "expected {n} entries per block, got {}/{}/{}",
                self.a_diag.len(),
                self.b_diag.len(),
                self.z_anti.len()
            )));
        }
        let mut trace = 0.0;
        for i in 0..n {
            let (a, b, z) = (self.a_diag[i], self.b_diag[i], self.z_anti[i]);
            if !(a.is_finite() && b.is_finite() && z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidState(format!("non-finite entry at pair {i}")));
            }
            if a < -STATE_TOL || b < -STATE_TOL {
                return Err(Error::InvalidState(format!("negative diagonal at pair {i}: a = {a}, b = {b}")));
            }
            if z.norm() > (a.max(0.0) * b.max(0.0)).sqrt() + STATE_TOL {
                return Err(Error::InvalidState(format!("|z| exceeds sqrt(ab) at pair {i}")));
            }
            trace += a + b;
        }
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        Ok(())
    }

    /// Full `2^N × 2^N` density matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut rho = DMatrix::zeros(dim, dim);
        for i in 0..self.pairs() {
            let j = dim - 1 - i;
            rho[(i, i)] = Complex64::new(self.a_diag[i], 0.0);
            rho[(j, j)] = Complex64::new(self.b_diag[i], 0.0);
            rho[(i, j)] = self.z_anti[i];
            rho[(j, i)] = self.z_anti[i].conj();
        }
        rho
    }

    /// Parses `N; a_1 .. a_n; b_1 .. b_n; Re(z_1) Im(z_1) .. Re(z_n) Im(z_n)`.
    pub fn parse_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(';').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::InvalidState(format!("expected 4 ';'-separated fields, got {}", fields.len())));
        }
        let n_qubits: usize = fields[0]
            .parse()
            .map_err(|_| Error::InvalidState(format!("bad qubit count '{}'", fields[0])))?;
        let numbers = |s: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidState(format!("bad number '{t}'"))))
                .collect()
        };
        let a_diag = numbers(fields[1])?;
        let b_diag = numbers(fields[2])?;
        let z_flat = numbers(fields[3])?;
        if z_flat.len() % 2 != 0 {
            return Err(Error::InvalidState("anti-diagonal needs Re/Im pairs".into()));
        }
        let z_anti = z_flat.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Self::new(n_qubits, a_diag, b_diag, z_anti)
    }

    pub fn to_line(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let z: Vec<f64> = self.z_anti.iter().flat_map(|z| [z.re, z.im]).collect();
        format!("{}; {}; {}; {}", self.n_qubits, join(&self.a_diag), join(&self.b_diag), join(&z))
    }
}

impl FromStr for XState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_line(s)
    }
}

impl fmt::Display for XState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 || amplitudes.len() != 1 << n_qubits {
            return Err(Error::InvalidState(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("norm {norm} != 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Normalises `amplitudes` before construction.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite amplitude vector".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::new(n_qubits, amplitudes)
    }
}

/// Closed-form GME of an X state, `2·max(0, max_i(|z_i| - ν_i))` with `ν_i = Σ_{j≠i} √(a_j b_j)`.
pub fn gme_xstate(state: &XState) -> Result<f64> {
    state.validate()?;
    let roots: Vec<f64> = state
        .a_diag
        .iter()
        .zip(&state.b_diag)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .collect();
    let total: f64 = roots.iter().sum();
    let best = state
        .z_anti
        .iter()
        .zip(&roots)
        .map(|(z, r)| z.norm() - (total - r))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(2.0 * best.max(0.0))
}

/// Reduced density matrix of the qubits in `keep`, in the given order.
pub fn partial_trace(state: &PureState, keep: &[usize]) -> Result<DMatrix<Complex64>> {
    let n = state.n_qubits;
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::BadSubset(format!("keep must be a nonempty proper subset, got {} of {n}", keep.len())));
    }
    let mut seen = 0u64;
    for &q in keep {
        if q >= n {
            return Err(Error::BadSubset(format!("qubit {q} out of range for N = {n}")));
        }
        if seen & (1 << q) != 0 {
            return Err(Error::BadSubset(format!("qubit {q} listed twice")));
        }
        seen |= 1 << q;
    }
    let rest: Vec<usize> = (0..n).filter(|q| seen & (1 << q) == 0).collect();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let gather = |x: usize, qs: &[usize]| qs.iter().fold(0usize, |acc, &q| (acc << 1) | bit(x, q));
    let mut m = DMatrix::<Complex64>::zeros(1 << keep.len(), 1 << rest.len());
    for (x, amp) in state.amplitudes.iter().enumerate() {
        m[(gather(x, keep), gather(x, &rest))] = *amp;
    }
    Ok(&m * m.adjoint())
}

/// GME of a pure state by exhaustive minimisation over bipartitions.
pub fn gme_pure(state: &PureState) -> Result<f64> {
    let n = state.n_qubits;
    if n > MAX_PURE_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_PURE_QUBITS });
    }
    if n < 2 {
        return Err(Error::InvalidState("at least two qubits are required".into()));
    }
    let mut best = f64::INFINITY;
    for mask in 1usize..(1 << n) - 1 {
        let size = mask.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|q| mask & (1 << q) != 0).collect();
        let rho = partial_trace(state, &keep)?;
        let purity: f64 = rho.iter().map(|c| c.norm_sqr()).sum();
        best = best.min((2.0 * (1.0 - purity)).max(0.0).sqrt());
    }
    Ok(best)
}

/// Relabels ground and excited levels on every qubit.
pub fn basis_swap(state: &XState) -> XState {
    XState {
        n_qubits: state.n_qubits,
        a_diag: state.b_diag.clone(),
        b_diag: state.a_diag.clone(),
        z_anti: state.z_anti.iter().map(|z| z.conj()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn x3(a: [f64; 4], b: [f64; 4], z: [f64; 4]) -> XState {
        XState::new(3, a.to_vec(), b.to_vec(), z.iter().map(|&v| c(v)).collect()).unwrap()
    }

    #[test]
    fn xstate_examples() {
        let ghz = x3([0.5, 0.0, 0.0, 0.0], [0.5, 0.0, 0.0, 0.0], [0.5, 0.0, 0.0, 0.0]);
        assert_eq!(gme_xstate(&ghz).unwrap(), 1.0);
        let product = x3([1.0, 0.0, 0.0, 0.0], [0.0; 4], [0.0; 4]);
        assert_eq!(gme_xstate(&product).unwrap(), 0.0);
        let mixed = x3([0.4, 0.1, 0.0, 0.0], [0.4, 0.1, 0.0, 0.0], [0.35, 0.05, 0.0, 0.0]);
        assert!((gme_xstate(&mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!((gme_xstate(&basis_swap(&mixed)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_states() {
        let bad_trace = XState { n_qubits: 2, a_diag: vec![0.5, 0.0], b_diag: vec![0.4, 0.0], z_anti: vec![c(0.0); 2] };
        assert!(matches!(gme_xstate(&bad_trace), Err(Error::InvalidState(_))));
        let bad_z = XState { n_qubits: 2, a_diag: vec![0.5, 0.0], b_diag: vec![0.5, 0.0], z_anti: vec![c(0.6), c(0.0)] };
        assert!(matches!(bad_z.validate(), Err(Error::InvalidState(_))));
        let bad_len = XState { n_qubits: 3, a_diag: vec![1.0], b_diag: vec![0.0], z_anti: vec![c(0.0)] };
        assert!(bad_len.validate().is_err());
    }

    #[test]
    fn line_round_trip() {
        let s = x3([0.4, 0.1, 0.0, 0.0], [0.4, 0.1, 0.0, 0.0], [0.35, -0.05, 0.0, 0.0]);
        let line = s.to_line();
        assert_eq!(line.parse::<XState>().unwrap(), s);
        assert!(XState::parse_line("3; 1 0 0 0; 0 0 0 0").is_err());
        assert!(XState::parse_line("3; 1 0 0 0; 0 0 0 0; 0 0 0 0 0 0 0").is_err());
    }

    #[test]
    fn dense_matrix_layout() {
        let s = x3([0.4, 0.1, 0.0, 0.0], [0.3, 0.2, 0.0, 0.0], [0.2, 0.1, 0.0, 0.0]);
        let rho = s.to_dense();
        assert_eq!(rho[(1, 1)].re, 0.1);
        assert_eq!(rho[(6, 6)].re, 0.2);
        assert_eq!(rho[(1, 6)].re, 0.1);
        assert_eq!(rho[(7, 0)].re, 0.2);
    }

    fn ghz3() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![c(0.0); 8];
        v[0] = c(h);
        v[7] = c(h);
        PureState::new(3, v).unwrap()
    }

    fn w3() -> PureState {
        let mut v = vec![c(0.0); 8];
        for i in [1, 2, 4] {
            v[i] = c(1.0);
        }
        PureState::normalized(3, v).unwrap()
    }

    #[test]
    fn pure_examples() {
        assert!((gme_pure(&ghz3()).unwrap() - 1.0).abs() < 1e-14);
        assert!((gme_pure(&w3()).unwrap() - 8f64.sqrt() / 3.0).abs() < 1e-14);
        let mut v = vec![c(0.0); 8];
        v[0] = c(1.0);
        v[3] = c(1.0);
        assert!(gme_pure(&PureState::normalized(3, v).unwrap()).unwrap().abs() < 1e-7);
    }

    #[test]
    fn partial_trace_examples() {
        let rho = partial_trace(&ghz3(), &[0]).unwrap();
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-15 && rho[(0, 1)].norm() < 1e-15);
        let mut v = vec![c(0.0); 8];
        v[0] = c(1.0);
        let rho = partial_trace(&PureState::new(3, v).unwrap(), &[1, 2]).unwrap();
        assert_eq!(rho[(0, 0)].re, 1.0);
        assert_eq!(rho.iter().map(|x| x.norm()).sum::<f64>(), 1.0);
        let rho = partial_trace(&w3(), &[0, 1]).unwrap();
        let eig = rho.map(|x| x.re).symmetric_eigenvalues();
        let mut e: Vec<f64> = eig.iter().copied().filter(|x| x.abs() > 1e-12).collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] - 1.0 / 3.0).abs() < 1e-14 && (e[1] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_subsets() {
        assert!(matches!(partial_trace(&ghz3(), &[]), Err(Error::BadSubset(_))));
        assert!(matches!(partial_trace(&ghz3(), &[0, 1, 2]), Err(Error::BadSubset(_))));
        assert!(matches!(partial_trace(&ghz3(), &[3]), Err(Error::BadSubset(_))));
        assert!(matches!(partial_trace(&ghz3(), &[1, 1]), Err(Error::BadSubset(_))));
    }

    #[test]
    fn too_many_qubits() {
        let mut v = vec![c(0.0); 1 << 15];
        v[0] = c(1.0);
        let s = PureState::new(15, v).unwrap();
        assert_eq!(gme_pure(&s), Err(Error::TooManyQubits { n: 15, max: 14 }));
    }
}
