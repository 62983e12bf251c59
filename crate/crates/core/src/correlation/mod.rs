//! Aperiodic correlation of sequences and of complementary sets.
//!
//! Sequences built from phases draw their samples from a single [`RootTable`]
//! so that equal phases give bit-identical complex values. Set-level
//! correlations between two [`PhaseMatrix`] values never materialize complex
//! rows at all: the phase differences are tallied into a histogram over Z_N
//! and the histogram is evaluated against the root table once per shift.

mod fft;
mod verify;

pub use fft::xcorr_all_shifts_fft;
pub use verify::{
    delta_max_scan, delta_max_scan_with, verify_ccc, verify_ccc_with, verify_interset,
    verify_interset_with, CccReport, CccViolation, CorrelationReport, IntersetReport, MagnitudeBin,
    ScanOptions,
};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::codebook::PhaseMatrix;
use crate::error::{QcssError, Result};

/// Relative factor for all default tolerances.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

/// Absolute tolerance for zero tests on set-level sums, whose peak is N².
pub fn default_zero_tol(n: u32) -> f64 {
    DEFAULT_REL_TOL * (n as f64) * (n as f64)
}

/// Absolute tolerance for the {0, N} magnitude dichotomy and δ_max checks.
pub fn default_magnitude_tol(n: u32) -> f64 {
    DEFAULT_REL_TOL * n as f64
}

/// The N distinct N-th roots of unity, `roots[r] = exp(2πi·r/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(n: u32) -> Self {
        let roots = (0..n)
            .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / n as f64))
            .collect();
        Self { roots }
    }

    pub fn n(&self) -> u32 {
        self.roots.len() as u32
    }

    #[inline]
    pub fn root(&self, phase: u32) -> Complex64 {
        self.roots[phase as usize]
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// `Σ_r counts[r]·ω^r`.
    #[inline]
    fn evaluate(&self, counts: &[u32]) -> Complex64 {
        counts
            .iter()
            .zip(&self.roots)
            .filter(|(&c, _)| c != 0)
            .fold(Complex64::new(0.0, 0.0), |acc, (&c, &w)| acc + w * c as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    values: Vec<Complex64>,
}

impl ComplexSequence {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    /// Maps each phase `p` to `ω_N^p` using `roots`.
    pub fn from_phases(phases: &[u32], roots: &RootTable) -> Self {
        Self {
            values: phases.iter().map(|&p| roots.root(p % roots.n())).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Correlation values for every shift `τ ∈ [-(N-1), N-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    len: usize,
    values: Vec<Complex64>,
}

impl CorrelationProfile {
    pub(crate) fn from_values(len: usize, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), (2 * len).saturating_sub(1));
        Self { len, values }
    }

    /// Sequence length N the profile was computed for.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn max_shift(&self) -> i64 {
        self.len as i64 - 1
    }

    pub fn at(&self, tau: i64) -> Complex64 {
        self.values[(tau + self.max_shift()) as usize]
    }

    /// Values ordered by ascending shift.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let lo = -self.max_shift();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (lo + i as i64, v))
    }

    /// Largest absolute deviation from another profile of the same length.
    pub fn max_abs_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.len, other.len, "profiles of different lengths");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_shift(len: usize, tau: i64) -> Result<()> {
    let max = len as i64 - 1;
    if tau.abs() > max {
        return Err(QcssError::ShiftOutOfRange { shift: tau, max });
    }
    Ok(())
}

/// Aperiodic correlation `Σ_t u_t·conj(v_{t+τ})` at a single shift.
///
/// Negative shifts slide `u` instead: `Σ_t u_{t-τ}·conj(v_t)`.
pub fn aperiodic_xcorr(u: &ComplexSequence, v: &ComplexSequence, tau: i64) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(QcssError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    check_shift(u.len(), tau)?;
    let shift = tau.unsigned_abs() as usize;
    let (a, b) = if tau >= 0 {
        (&u.values[..], &v.values[shift..])
    } else {
        (&u.values[shift..], &v.values[..])
    };
    Ok(a.iter().zip(b).map(|(x, y)| x * y.conj()).sum())
}

/// Naive profile: [`aperiodic_xcorr`] at every shift.
pub fn xcorr_all_shifts(u: &ComplexSequence, v: &ComplexSequence) -> Result<CorrelationProfile> {
    if u.len() != v.len() {
        return Err(QcssError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let max = u.len() as i64 - 1;
    let values = (-max..=max)
        .map(|tau| aperiodic_xcorr(u, v, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationProfile::from_values(u.len(), values))
}

fn check_pair(a: &PhaseMatrix, b: &PhaseMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(QcssError::LengthMismatch {
            left: a.n() as usize,
            right: b.n() as usize,
        });
    }
    Ok(())
}

/// Tallies `(a[s][t] - b[s][t+τ]) mod N` over every row and overlapping
/// column into `counts`, which must be zeroed and of length N.
#[inline]
pub(crate) fn tally_shift(a: &PhaseMatrix, b: &PhaseMatrix, tau: i64, counts: &mut [u32]) {
    let n = a.n();
    let shift = tau.unsigned_abs() as usize;
    for (ra, rb) in a.rows().zip(b.rows()) {
        let (xs, ys) = if tau >= 0 {
            (&ra[..ra.len() - shift], &rb[shift..])
        } else {
            (&ra[shift..], &rb[..rb.len() - shift])
        };
        for (&x, &y) in xs.iter().zip(ys) {
            let mut d = x + n - y;
            if d >= n {
                d -= n;
            }
            counts[d as usize] += 1;
        }
    }
}

/// Flock-summed correlation of two sets at one shift, evaluated against a
/// shared root table. `counts` is scratch space of length N.
#[inline]
pub(crate) fn set_xcorr_in(
    roots: &RootTable,
    a: &PhaseMatrix,
    b: &PhaseMatrix,
    tau: i64,
    counts: &mut [u32],
) -> Complex64 {
    counts.fill(0);
    tally_shift(a, b, tau, counts);
    roots.evaluate(counts)
}

/// Flock-summed aperiodic correlation `Σ_s R(A_s, B_s; τ)`.
pub fn set_xcorr(a: &PhaseMatrix, b: &PhaseMatrix, tau: i64) -> Result<Complex64> {
    check_pair(a, b)?;
    check_shift(a.n() as usize, tau)?;
    let roots = RootTable::new(a.n());
    let mut counts = vec![0u32; a.n() as usize];
    Ok(set_xcorr_in(&roots, a, b, tau, &mut counts))
}

/// [`set_xcorr`] at every shift.
pub fn set_xcorr_profile(a: &PhaseMatrix, b: &PhaseMatrix) -> Result<CorrelationProfile> {
    check_pair(a, b)?;
    let n = a.n() as usize;
    let roots = RootTable::new(a.n());
    let mut counts = vec![0u32; n];
    let max = n as i64 - 1;
    let values = (-max..=max)
        .map(|tau| set_xcorr_in(&roots, a, b, tau, &mut counts))
        .collect();
    Ok(CorrelationProfile::from_values(n, values))
}
