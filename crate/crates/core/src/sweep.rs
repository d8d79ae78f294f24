//! Acceleration sweeps and regime classification.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::response::{response_amplitudes, DetectorParams, ResponseAmplitudes};
use crate::scenarios::{entanglement_closed, Scenario};

/// Slopes with magnitude below this are reported as zero.
pub const SLOPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Detector parameters; `a` is overridden by the grid.
    pub base: DetectorParams,
    pub a_grid: Vec<f64>,
    pub scenario: Scenario,
    /// Difference step as a fraction of the gap to each neighbouring grid point.
    /// `1` differences grid values directly; smaller values add evaluations.
    pub fd_step: f64,
    pub workers: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.scenario.validate()?;
        validate_grid(&self.a_grid)?;
        if !(self.fd_step > 0.0 && self.fd_step <= 1.0) {
            return Err(Error::InvalidSweep(format!("fd_step must lie in (0, 1], got {}", self.fd_step)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidSweep("workers must be >= 1".into()));
        }
        Ok(())
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSweep("empty acceleration grid".into()));
    }
    if grid.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::InvalidSweep("accelerations must be finite and >= 0".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidSweep("acceleration grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `n + 1` evenly spaced points on `[lo, hi]`, with both ends exact.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![lo];
    }
    (0..=steps)
        .map(|i| if i == steps { hi } else { lo + (hi - lo) * i as f64 / steps as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResponseTrend {
    Unruh,
    AntiUnruh,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntanglementTrend {
    Up,
    Down,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Regime {
    pub response: ResponseTrend,
    pub entanglement: EntanglementTrend,
}

impl Regime {
    pub fn from_signs(dp_sign: i8, de_sign: i8) -> Self {
        let response = match dp_sign {
            1 => ResponseTrend::Unruh,
            -1 => ResponseTrend::AntiUnruh,
            _ => ResponseTrend::Flat,
        };
        let entanglement = match de_sign {
            1 => EntanglementTrend::Up,
            -1 => EntanglementTrend::Down,
            _ => EntanglementTrend::Flat,
        };
        Self { response, entanglement }
    }

    /// Neither component flat.
    pub fn is_definite(&self) -> bool {
        self.response != ResponseTrend::Flat && self.entanglement != EntanglementTrend::Flat
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.response {
            ResponseTrend::Unruh => "Unruh",
            ResponseTrend::AntiUnruh => "antiUnruh",
            ResponseTrend::Flat => "flat",
        };
        let e = match self.entanglement {
            EntanglementTrend::Up => "E_up",
            EntanglementTrend::Down => "E_down",
            EntanglementTrend::Flat => "E_flat",
        };
        write!(f, "{r}_{e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub a: f64,
    pub p: f64,
    pub e: f64,
    pub eta0_abs: f64,
    pub eta1_abs: f64,
    pub dp_sign: i8,
    pub de_sign: i8,
    pub regime: Regime,
}

/// Responses on the grid plus the neighbouring evaluation points used for slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResponses {
    pub a_grid: Vec<f64>,
    pub at: Vec<ResponseAmplitudes>,
    /// `(a_lo, a_hi)` per grid point; equal to the grid point on the missing side.
    pub stencil: Vec<(f64, f64)>,
    /// Extra responses at `a_lo`/`a_hi` when they are off-grid.
    pub lo: Vec<Option<ResponseAmplitudes>>,
    pub hi: Vec<Option<ResponseAmplitudes>>,
}

fn stencil(grid: &[f64], fd_step: f64) -> Vec<(f64, f64)> {
    let last = grid.len() - 1;
    (0..grid.len())
        .map(|i| {
            let lo = if i > 0 { grid[i] - fd_step * (grid[i] - grid[i - 1]) } else { grid[i] };
            let hi = if i < last { grid[i] + fd_step * (grid[i + 1] - grid[i]) } else { grid[i] };
            (lo, hi)
        })
        .collect()
}

fn evaluate_all(base: &DetectorParams, points: &[f64], workers: usize) -> Result<Vec<ResponseAmplitudes>> {
    let eval = |&a: &f64| {
        response_amplitudes(&base.with_a(a)).map_err(|e| Error::SweepPoint { a, source: Box::new(e) })
    };
    let results: Vec<Result<ResponseAmplitudes>> = if workers <= 1 {
        points.iter().map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;
        pool.install(|| points.par_iter().map(eval).collect())
    };
    results.into_iter().collect()
}

/// Evaluates the detector response at every grid point and, for `fd_step < 1`,
/// at the off-grid difference points.
pub fn compute_responses(spec: &SweepSpec) -> Result<GridResponses> {
    spec.validate()?;
    let grid = &spec.a_grid;
    let stencil = stencil(grid, spec.fd_step);
    let extra = spec.fd_step < 1.0;
    let mut points = grid.clone();
    if extra {
        for (i, &(lo, hi)) in stencil.iter().enumerate() {
            if lo != grid[i] {
                points.push(lo);
            }
            if hi != grid[i] {
                points.push(hi);
            }
        }
    }
    let values = evaluate_all(&spec.base, &points, spec.workers)?;
    let mut rest = values.into_iter();
    let at: Vec<ResponseAmplitudes> = rest.by_ref().take(grid.len()).collect();
    let mut lo = vec![None; grid.len()];
    let mut hi = vec![None; grid.len()];
    if extra {
        for (i, &(l, h)) in stencil.iter().enumerate() {
            if l != grid[i] {
                lo[i] = rest.next();
            }
            if h != grid[i] {
                hi[i] = rest.next();
            }
        }
    }
    Ok(GridResponses { a_grid: grid.clone(), at, stencil, lo, hi })
}

fn slope_sign(lo: f64, hi: f64, a_lo: f64, a_hi: f64) -> i8 {
    if a_hi <= a_lo {
        return 0;
    }
    let slope = (hi - lo) / (a_hi - a_lo);
    if slope.abs() < SLOPE_TOL {
        0
    } else if slope > 0.0 {
        1
    } else {
        -1
    }
}

/// Builds records for one scenario from precomputed responses.
pub fn assemble_records(responses: &GridResponses, scenario: &Scenario) -> Result<Vec<SweepRecord>> {
    let n = responses.a_grid.len();
    let e_at: Vec<f64> = responses.at.iter().map(|r| entanglement_closed(scenario, r)).collect::<Result<_>>()?;
    let value = |extra: &Option<ResponseAmplitudes>, j: usize| -> Result<(f64, f64)> {
        match extra {
            Some(r) => Ok((r.p, entanglement_closed(scenario, r)?)),
            None => Ok((responses.at[j].p, e_at[j])),
        }
    };
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let (a_lo, a_hi) = responses.stencil[i];
        let (p_lo, e_lo) = if a_lo < responses.a_grid[i] { value(&responses.lo[i], i - 1)? } else { value(&None, i)? };
        let (p_hi, e_hi) = if a_hi > responses.a_grid[i] { value(&responses.hi[i], i + 1)? } else { value(&None, i)? };
        let dp_sign = slope_sign(p_lo, p_hi, a_lo, a_hi);
        let de_sign = slope_sign(e_lo, e_hi, a_lo, a_hi);
        let r = &responses.at[i];
        records.push(SweepRecord {
            a: responses.a_grid[i],
            p: r.p,
            e: e_at[i],
            eta0_abs: r.eta0.norm(),
            eta1_abs: r.eta1.norm(),
            dp_sign,
            de_sign,
            regime: Regime::from_signs(dp_sign, de_sign),
        });
    }
    Ok(records)
}

/// Full sweep: responses, entanglement and slope classification, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    let responses = compute_responses(spec)?;
    assemble_records(&responses, &spec.scenario)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSpan {
    pub regime: Regime,
    /// Maximal runs of consecutive records sharing the regime, as `(first a, last a)`.
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegimeSummary {
    /// Definite regimes in a fixed order.
    pub spans: Vec<RegimeSpan>,
}

impl RegimeSummary {
    pub fn contains(&self, response: ResponseTrend, entanglement: EntanglementTrend) -> bool {
        self.spans.iter().any(|s| s.regime == Regime { response, entanglement })
    }

    pub fn count(&self) -> usize {
        self.spans.len()
    }

    /// Union with another summary; intervals are concatenated.
    pub fn merge(&mut self, other: &RegimeSummary) {
        for span in &other.spans {
            match self.spans.iter_mut().find(|s| s.regime == span.regime) {
                Some(s) => s.intervals.extend_from_slice(&span.intervals),
                None => self.spans.push(span.clone()),
            }
        }
        self.spans.sort_by_key(|s| s.regime);
    }
}

/// Definite (Unruh/antiUnruh × E_up/E_down) regimes present in `records`.
pub fn classify_regimes(records: &[SweepRecord]) -> RegimeSummary {
    let mut summary = RegimeSummary::default();
    let mut i = 0;
    while i < records.len() {
        let regime = records[i].regime;
        let mut j = i;
        while j + 1 < records.len() && records[j + 1].regime == regime {
            j += 1;
        }
        if regime.is_definite() {
            let interval = (records[i].a, records[j].a);
            match summary.spans.iter_mut().find(|s| s.regime == regime) {
                Some(s) => s.intervals.push(interval),
                None => summary.spans.push(RegimeSpan { regime, intervals: vec![interval] }),
            }
        }
        i = j + 1;
    }
    summary.spans.sort_by_key(|s| s.regime);
    summary
}
