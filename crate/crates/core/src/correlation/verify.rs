//! Exhaustive checks over families of phase matrices.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{default_magnitude_tol, set_xcorr_in, RootTable};
use crate::codebook::{FamilyKind, PhaseMatrix, SequenceFamily};
use crate::error::{QcssError, Result};
use crate::par::Execution;

/// The worst deviation seen while checking a complete complementary code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CccViolation {
    /// Family index of the members involved.
    pub k: u32,
    pub m1: u32,
    pub m2: u32,
    pub tau: i64,
    pub value: Complex64,
    /// `N²` on the in-phase diagonal, zero elsewhere.
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CccReport {
    pub ok: bool,
    pub checked: u64,
    /// Largest `|value - expected|` over the whole scan, reported even when it
    /// is within tolerance.
    pub worst_violation: Option<CccViolation>,
    /// Smallest in-phase peak `Re R(m, m; 0)` seen across members.
    pub min_peak: f64,
}

/// Checks every member pair `(m1, m2)` and shift `0 ≤ τ < N`: summed
/// correlations vanish except the in-phase auto terms, which equal N².
pub fn verify_ccc(family: &SequenceFamily, tol: f64) -> CccReport {
    verify_ccc_with(family, tol, Execution::default())
}

pub fn verify_ccc_with(family: &SequenceFamily, tol: f64, exec: Execution) -> CccReport {
    let n = family.n();
    let members = family.members();
    let roots = RootTable::new(n);
    let peak = (n as f64) * (n as f64);

    let per_row = |a: &PhaseMatrix| -> (Option<CccViolation>, f64) {
        let mut counts = vec![0u32; n as usize];
        let mut worst: Option<CccViolation> = None;
        let mut min_peak = f64::INFINITY;
        for b in members {
            for tau in 0..n as i64 {
                let value = set_xcorr_in(&roots, a, b, tau, &mut counts);
                let in_phase = std::ptr::eq(a, b) && tau == 0;
                let expected = if in_phase { peak } else { 0.0 };
                if in_phase {
                    min_peak = min_peak.min(value.re);
                }
                let deviation = (value - expected).norm();
                if worst.is_none_or(|w| deviation > w.deviation) {
                    worst = Some(CccViolation {
                        k: a.k(),
                        m1: a.m(),
                        m2: b.m(),
                        tau,
                        value,
                        expected,
                        deviation,
                    });
                }
            }
        }
        (worst, min_peak)
    };

    let rows = exec.map_slice(members, per_row);
    let mut worst: Option<CccViolation> = None;
    let mut min_peak = f64::INFINITY;
    for (w, p) in rows {
        min_peak = min_peak.min(p);
        if let Some(w) = w {
            if worst.is_none_or(|cur| w.deviation > cur.deviation) {
                worst = Some(w);
            }
        }
    }
    CccReport {
        ok: worst.is_none_or(|w| w.deviation <= tol),
        checked: (members.len() as u64).pow(2) * n as u64,
        worst_violation: worst,
        min_peak,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersetReport {
    /// `max_magnitude ≤ N + tol`.
    pub ok: bool,
    pub max_magnitude: f64,
    /// `(m1, m2, τ)` of the first pair reaching `max_magnitude`.
    pub argmax: (u32, u32, i64),
    /// Every magnitude lies within `tol` of 0 or of N.
    pub dichotomy_ok: bool,
    /// Largest distance of any magnitude from the nearer of {0, N}.
    pub worst_dichotomy_deviation: f64,
    /// How many correlations had magnitude near N (as opposed to near 0).
    pub full_hits: u64,
    pub checked: u64,
}

/// Cross-family scan: every `(m1, m2)` with `m1` from `f1`, `m2` from `f2`,
/// and every shift `0 ≤ τ < N`.
pub fn verify_interset(
    f1: &SequenceFamily,
    f2: &SequenceFamily,
    tol: f64,
) -> Result<IntersetReport> {
    verify_interset_with(f1, f2, tol, Execution::default())
}

pub fn verify_interset_with(
    f1: &SequenceFamily,
    f2: &SequenceFamily,
    tol: f64,
    exec: Execution,
) -> Result<IntersetReport> {
    let (k1, k2) = match (f1.kind(), f2.kind()) {
        (FamilyKind::SingleCcc { k: k1 }, FamilyKind::SingleCcc { k: k2 }) => (k1, k2),
        _ => {
            return Err(QcssError::FamilyMismatch(
                "both families must be single complete complementary codes".into(),
            ))
        }
    };
    if k1 == k2 {
        return Err(QcssError::FamilyMismatch(format!(
            "both families have k={k1}"
        )));
    }
    if f1.n() != f2.n() {
        return Err(QcssError::FamilyMismatch(format!(
            "moduli differ ({} vs {})",
            f1.n(),
            f2.n()
        )));
    }
    let n = f1.n();
    let nf = n as f64;
    let roots = RootTable::new(n);

    struct Partial {
        max: f64,
        argmax: (u32, u32, i64),
        worst_dev: f64,
        full_hits: u64,
    }

    let per_row = |a: &PhaseMatrix| -> Partial {
        let mut counts = vec![0u32; n as usize];
        let mut p = Partial {
            max: f64::NEG_INFINITY,
            argmax: (a.m(), 0, 0),
            worst_dev: 0.0,
            full_hits: 0,
        };
        for b in f2.members() {
            for tau in 0..n as i64 {
                let mag = set_xcorr_in(&roots, a, b, tau, &mut counts).norm();
                if mag > p.max {
                    p.max = mag;
                    p.argmax = (a.m(), b.m(), tau);
                }
                let dev = mag.min((mag - nf).abs());
                p.worst_dev = p.worst_dev.max(dev);
                if (mag - nf).abs() < mag {
                    p.full_hits += 1;
                }
            }
        }
        p
    };

    let parts = exec.map_slice(f1.members(), per_row);
    let mut max = f64::NEG_INFINITY;
    let mut argmax = (0, 0, 0);
    let mut worst_dev = 0.0f64;
    let mut full_hits = 0;
    for p in parts {
        if p.max > max {
            max = p.max;
            argmax = p.argmax;
        }
        worst_dev = worst_dev.max(p.worst_dev);
        full_hits += p.full_hits;
    }
    Ok(IntersetReport {
        ok: max <= nf + tol,
        max_magnitude: max,
        argmax,
        dichotomy_ok: worst_dev <= tol,
        worst_dichotomy_deviation: worst_dev,
        full_hits,
        checked: (f1.len() * f2.len()) as u64 * n as u64,
    })
}

/// Magnitudes clustered to the nearest multiple of the scan tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeBin {
    pub magnitude: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub delta_max: f64,
    /// `(u1, u2, τ)` of the first correlation (ascending `u1`, `u2`, `τ`)
    /// reaching `delta_max`. `None` only for an empty domain.
    pub argmax: Option<(usize, usize, i64)>,
    pub histogram: Option<Vec<MagnitudeBin>>,
    pub checked: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Histogram bucket width.
    pub tol: f64,
    pub histogram: bool,
    pub execution: Execution,
}

impl ScanOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            histogram: true,
            execution: Execution::default(),
        }
    }

    pub fn for_modulus(n: u32) -> Self {
        Self::new(default_magnitude_tol(n))
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn histogram(mut self, on: bool) -> Self {
        self.histogram = on;
        self
    }
}

/// Maximum summed-correlation magnitude over every ordered pair `(u1, u2)`
/// and every shift `0 ≤ τ < N`, skipping only the in-phase autocorrelation
/// `u1 = u2, τ = 0`. Negative shifts are the conjugates of swapped pairs and
/// are not scanned.
pub fn delta_max_scan(members: &[PhaseMatrix], tol: f64) -> CorrelationReport {
    delta_max_scan_with(members, ScanOptions::new(tol))
}

pub fn delta_max_scan_with(members: &[PhaseMatrix], opts: ScanOptions) -> CorrelationReport {
    let Some(first) = members.first() else {
        return CorrelationReport {
            delta_max: 0.0,
            argmax: None,
            histogram: opts.histogram.then(Vec::new),
            checked: 0,
        };
    };
    let n = first.n();
    assert!(
        members.iter().all(|c| c.n() == n),
        "all members must share the modulus"
    );
    let roots = RootTable::new(n);
    let bucket = |mag: f64| -> i64 {
        if opts.tol > 0.0 {
            (mag / opts.tol).round() as i64
        } else {
            mag.to_bits() as i64
        }
    };

    struct Partial {
        max: f64,
        argmax: Option<(usize, usize, i64)>,
        bins: BTreeMap<i64, u64>,
    }

    let indices: Vec<usize> = (0..members.len()).collect();
    let per_row = |&u1: &usize| -> Partial {
        let a = &members[u1];
        let mut counts = vec![0u32; n as usize];
        let mut p = Partial {
            max: f64::NEG_INFINITY,
            argmax: None,
            bins: BTreeMap::new(),
        };
        for (u2, b) in members.iter().enumerate() {
            let start = if u1 == u2 { 1 } else { 0 };
            for tau in start..n as i64 {
                let mag = set_xcorr_in(&roots, a, b, tau, &mut counts).norm();
                if mag > p.max {
                    p.max = mag;
                    p.argmax = Some((u1, u2, tau));
                }
                if opts.histogram {
                    *p.bins.entry(bucket(mag)).or_insert(0) += 1;
                }
            }
        }
        p
    };

    let parts = opts.execution.map_slice(&indices, per_row);
    let mut delta_max = f64::NEG_INFINITY;
    let mut argmax = None;
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for p in parts {
        if p.argmax.is_some() && p.max > delta_max {
            delta_max = p.max;
            argmax = p.argmax;
        }
        for (b, c) in p.bins {
            *bins.entry(b).or_insert(0) += c;
        }
    }
    let k = members.len() as u64;
    let checked = k * k * n as u64 - k;
    let histogram = opts.histogram.then(|| {
        bins.into_iter()
            .map(|(b, count)| MagnitudeBin {
                magnitude: if opts.tol > 0.0 {
                    b as f64 * opts.tol
                } else {
                    f64::from_bits(b as u64)
                },
                count,
            })
            .collect()
    });
    CorrelationReport {
        delta_max: if argmax.is_some() { delta_max } else { 0.0 },
        argmax,
        histogram,
        checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Codebook;
    use crate::correlation::default_zero_tol;

    #[test]
    fn ccc_fifteen_passes() {
        let b = Codebook::new(15).unwrap();
        let report = verify_ccc(&b.build_ccc(1).unwrap(), default_zero_tol(15));
        assert!(report.ok, "{report:?}");
        assert!((report.min_peak - 225.0).abs() < 1e-9);
        assert_eq!(report.checked, 15 * 15 * 15);
    }

    #[test]
    fn ccc_detects_single_corruption() {
        let b = Codebook::new(35).unwrap();
        let mut fam = b.build_ccc(1).unwrap();
        let c = &mut fam.members_mut()[4];
        let old = c.get(10, 20);
        c.set(10, 20, old + 1);
        let report = verify_ccc(&fam, default_zero_tol(35));
        assert!(!report.ok);
        assert!(report.worst_violation.unwrap().deviation > default_zero_tol(35));
    }

    #[test]
    fn interset_fifteen() {
        let b = Codebook::new(15).unwrap();
        let r = verify_interset(
            &b.build_ccc(1).unwrap(),
            &b.build_ccc(2).unwrap(),
            default_magnitude_tol(15),
        )
        .unwrap();
        assert!(r.ok && r.dichotomy_ok, "{r:?}");
        assert!((r.max_magnitude - 15.0).abs() < 1e-9);
    }

    #[test]
    fn interset_rejects_same_family() {
        let b = Codebook::new(15).unwrap();
        let f = b.build_ccc(1).unwrap();
        assert!(matches!(
            verify_interset(&f, &f, 1e-6),
            Err(QcssError::FamilyMismatch(_))
        ));
        let g = Codebook::new(21).unwrap().build_ccc(2).unwrap();
        assert!(matches!(
            verify_interset(&f, &g, 1e-6),
            Err(QcssError::FamilyMismatch(_))
        ));
        let q = b.build_qcss().unwrap();
        assert!(verify_interset(&f, &q, 1e-6).is_err());
    }

    #[test]
    fn single_member_scan_sees_only_sidelobes() {
        let b = Codebook::new(15).unwrap();
        let c = b.build_set(2, 6).unwrap();
        let r = delta_max_scan(std::slice::from_ref(&c), 1e-6);
        assert!(r.delta_max < 1e-9);
        assert_eq!(r.checked, 14);
    }

    #[test]
    fn empty_scan() {
        let r = delta_max_scan(&[], 1e-6);
        assert_eq!(r.delta_max, 0.0);
        assert!(r.argmax.is_none());
    }

    #[test]
    fn qcss_fifteen_delta_max_and_histogram() {
        let b = Codebook::new(15).unwrap();
        let q = b.build_qcss().unwrap();
        let r = delta_max_scan(q.members(), default_magnitude_tol(15));
        assert!((r.delta_max - 15.0).abs() < 1e-6 * 15.0);
        let hist = r.histogram.unwrap();
        assert_eq!(hist.len(), 2, "{hist:?}");
        assert_eq!(hist.iter().map(|b| b.count).sum::<u64>(), r.checked);
        let (u1, u2, _) = r.argmax.unwrap();
        assert_ne!(q.members()[u1].k(), q.members()[u2].k());
    }

    #[test]
    fn scan_is_schedule_independent() {
        let q = Codebook::new(9).unwrap().build_qcss().unwrap();
        let seq = delta_max_scan_with(
            q.members(),
            ScanOptions::new(1e-6).execution(Execution::Sequential),
        );
        let par = delta_max_scan_with(
            q.members(),
            ScanOptions::new(1e-6).execution(Execution::Parallel),
        );
        assert_eq!(seq, par);
    }
}
