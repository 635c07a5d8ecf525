//! Antenna selection with maximal-ratio combining.
//!
//! Under `P_t/σ² = 1` the branch SNR is the channel power on that element,
//! MRC over a subset yields the sum of the subset's branch SNRs, and the best
//! subset of size `M` is simply the `M` strongest branches.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{synthesize_received_signal, ChannelVector};
use crate::error::{Error, Result};

/// Smallest noise-draw count accepted by [`empirical_combiner_snr`].
pub const MIN_ORACLE_TRIALS: usize = 1_000;

/// Linear per-branch SNRs.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrVector(Vec<f64>);

impl SnrVector {
    pub fn new(snrs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = snrs.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::domain(
                "branch SNR",
                format!("entries must be finite and non-negative, got {bad}"),
            ));
        }
        Ok(Self(snrs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Branch indices ordered strongest first; equal SNRs keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.0.len()).collect();
        order.sort_by(|&a, &b| self.0[b].total_cmp(&self.0[a]).then(a.cmp(&b)));
        order
    }

    /// `γ_(M)` for every `M = 1..N`, i.e. running sums of the sorted SNRs.
    pub fn top_sums(&self) -> Vec<f64> {
        let mut sorted = self.0.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        sorted
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }

    /// Achievable rate `log2(1 + γ_(M))` for every `M = 1..N`.
    pub fn rates(&self) -> Vec<f64> {
        self.top_sums().into_iter().map(|s| (1.0 + s).log2()).collect()
    }
}

/// Outcome of selecting `M` branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// 0-based branch indices in ascending order.
    pub selected: Vec<usize>,
    pub combined_snr: f64,
    /// bps/Hz.
    pub rate: f64,
}

impl SelectionResult {
    /// Selected antennas numbered from 1.
    pub fn antenna_ids(&self) -> Vec<usize> {
        self.selected.iter().map(|k| k + 1).collect()
    }
}

/// `γ_i = |h_i|²`.
pub fn branch_snrs(h: &ChannelVector) -> SnrVector {
    SnrVector(h.coefficients.iter().map(|c| c.norm_sqr()).collect())
}

/// Picks the `m` strongest branches (lowest index wins ties) and reports the
/// MRC output SNR and rate.
pub fn select_top_m(snrs: &SnrVector, m: usize) -> Result<SelectionResult> {
    if m == 0 || m > snrs.len() {
        return Err(Error::domain(
            "selected antenna count",
            format!("must lie in 1..={}, got {m}", snrs.len()),
        ));
    }
    let ranking = snrs.ranking();
    let combined_snr: f64 = ranking[..m].iter().map(|&k| snrs.0[k]).sum();
    let mut selected = ranking[..m].to_vec();
    selected.sort_unstable();
    Ok(SelectionResult {
        selected,
        combined_snr,
        rate: (1.0 + combined_snr).log2(),
    })
}

/// `log2(1 + snr)` in bps/Hz.
pub fn achievable_rate(combined_snr: f64) -> Result<f64> {
    if combined_snr.is_nan() || combined_snr < 0.0 {
        return Err(Error::domain(
            "combined SNR",
            format!("must be non-negative, got {combined_snr}"),
        ));
    }
    Ok((1.0 + combined_snr).log2())
}

/// MRC weights: conjugate channel on selected branches, zero elsewhere.
pub fn mrc_weights(h: &ChannelVector, selected: &[usize]) -> Result<Vec<Complex64>> {
    if selected.is_empty() {
        return Err(Error::domain("selection", "must contain at least one branch"));
    }
    let mut weights = vec![Complex64::new(0.0, 0.0); h.len()];
    for &k in selected {
        let c = h.coefficients.get(k).ok_or_else(|| {
            Error::domain("selection", format!("branch {k} out of range for {} antennas", h.len()))
        })?;
        weights[k] = c.conj();
    }
    Ok(weights)
}

/// Monte Carlo estimate of the MRC output SNR over noisy observations.
///
/// Each draw sends a random QPSK symbol through `y = h·s + n`, combines with
/// [`mrc_weights`], and the estimator recovers the combined gain by
/// correlating with the known symbols. The SNR is the squared gain over the
/// residual power.
pub fn empirical_combiner_snr<R: Rng + ?Sized>(
    h: &ChannelVector,
    selected: &[usize],
    noise_var: f64,
    n_trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_trials < MIN_ORACLE_TRIALS {
        return Err(Error::domain(
            "oracle trial count",
            format!("needs at least {MIN_ORACLE_TRIALS}, got {n_trials}"),
        ));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::domain(
            "noise variance",
            format!("must be positive and finite, got {noise_var}"),
        ));
    }
    let weights = mrc_weights(h, selected)?;
    let mut symbols = Vec::with_capacity(n_trials);
    let mut outputs = Vec::with_capacity(n_trials);
    for _ in 0..n_trials {
        let quadrant = rng.random_range(0..4u8);
        let s = Complex64::from_polar(1.0, FRAC_PI_4 * (2 * quadrant + 1) as f64);
        let y = synthesize_received_signal(h, s, noise_var, rng)?;
        let z: Complex64 = selected.iter().map(|&k| weights[k] * y[k]).sum();
        symbols.push(s);
        outputs.push(z);
    }
    let n = n_trials as f64;
    let gain: Complex64 = symbols
        .iter()
        .zip(&outputs)
        .map(|(s, z)| z * s.conj())
        .sum::<Complex64>()
        / n;
    let noise_power = symbols
        .iter()
        .zip(&outputs)
        .map(|(s, z)| (z - gain * s).norm_sqr())
        .sum::<f64>()
        / n;
    Ok(gain.norm_sqr() / noise_power)
}
