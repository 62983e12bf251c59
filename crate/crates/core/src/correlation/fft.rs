use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{ComplexSequence, CorrelationProfile};
use crate::error::{QcssError, Result};

/// All-shift aperiodic correlation through zero-padded FFTs.
///
/// Both inputs are padded to the smallest power of two `L ≥ 2N`, so the
/// circular correlation `IFFT(U·conj(V))` has no wrap-around overlap. Its
/// bin `(L-τ) mod L` then holds `R(τ)` for `τ ≥ 0`, and bin `|τ|` holds
/// `R(τ)` for negative shifts.
pub fn xcorr_all_shifts_fft(
    u: &ComplexSequence,
    v: &ComplexSequence,
) -> Result<CorrelationProfile> {
    if u.len() != v.len() {
        return Err(QcssError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let n = u.len();
    if n == 0 {
        return Ok(CorrelationProfile::from_values(0, Vec::new()));
    }
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);

    let pad = |s: &ComplexSequence| {
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        buf[..n].copy_from_slice(s.values());
        buf
    };
    let mut us = pad(u);
    let mut vs = pad(v);
    forward.process(&mut us);
    forward.process(&mut vs);
    for (x, y) in us.iter_mut().zip(&vs) {
        *x *= y.conj();
    }
    inverse.process(&mut us);

    let scale = 1.0 / len as f64;
    let max = n as i64 - 1;
    let values = (-max..=max)
        .map(|tau| {
            let bin = if tau >= 0 {
                (len - tau as usize) % len
            } else {
                tau.unsigned_abs() as usize
            };
            us[bin] * scale
        })
        .collect();
    Ok(CorrelationProfile::from_values(n, values))
}
