//! Majorization checks and the single-path rate ordering they imply.
//!
//! `x ≺ y` when every partial sum of the descending-sorted `x` is at most the
//! matching partial sum of `y` and the totals agree. A constant vector is
//! majorized by any vector with the same total, so for a single path the flat
//! conventional SNR profile is majorized by the lensed one, and selecting the
//! strongest `M < N` lensed branches never loses rate.

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::lens::{LensProfile, PowerFractions};
use crate::receiver::SnrVector;

/// Default absolute slack on partial sums.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Spread of `β` above which the lensed rate must beat the flat one strictly.
pub const STRICT_SPREAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSumViolation {
    /// Number of leading terms summed.
    pub m: usize,
    pub x_partial: f64,
    pub y_partial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationReport {
    pub majorized: bool,
    pub first_violation: Option<PartialSumViolation>,
    pub sum_gap: f64,
}

fn sorted_descending(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Tests whether `x ≺ y` with absolute slack `tol` on each partial sum.
pub fn is_majorized(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationReport> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::domain("majorization operands", "must not be empty"));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::domain("tolerance", format!("must be non-negative, got {tol}")));
    }
    let xs = sorted_descending(x);
    let ys = sorted_descending(y);
    let n = xs.len();

    let mut first_violation = None;
    let (mut x_partial, mut y_partial) = (0.0, 0.0);
    for m in 1..n {
        x_partial += xs[m - 1];
        y_partial += ys[m - 1];
        if x_partial > y_partial + tol {
            first_violation = Some(PartialSumViolation {
                m,
                x_partial,
                y_partial,
            });
            break;
        }
    }
    let sum_gap = (xs.iter().sum::<f64>() - ys.iter().sum::<f64>()).abs();
    Ok(MajorizationReport {
        majorized: first_violation.is_none() && sum_gap <= tol,
        first_violation,
        sum_gap,
    })
}

/// The vector of means is majorized by the vector itself. Always `true` for
/// a correct checker; a `false` is a defect.
pub fn check_lemma1(x_tilde: &[f64], tol: f64) -> Result<bool> {
    if x_tilde.is_empty() {
        return Err(Error::domain("vector", "must not be empty"));
    }
    let mean = x_tilde.iter().sum::<f64>() / x_tilde.len() as f64;
    let flat = vec![mean; x_tilde.len()];
    Ok(is_majorized(&flat, x_tilde, tol)?.majorized)
}

/// Single-path comparison of the flat and lensed SNR profiles over all `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposition1Report {
    pub aoa: f64,
    pub conventional_rates: Vec<f64>,
    pub lensed_rates: Vec<f64>,
    pub majorization: MajorizationReport,
    /// Whether the lensed profile is uneven enough to demand a strict gain.
    pub strict_expected: bool,
    /// Values of `M` (1-based) where the expected ordering failed.
    pub violations: Vec<usize>,
    pub endpoint_gap: f64,
}

impl Proposition1Report {
    pub fn holds(&self) -> bool {
        self.majorization.majorized && self.violations.is_empty()
    }

    /// Smallest lensed-minus-conventional rate gap over `M < N`.
    pub fn min_gain(&self) -> Option<f64> {
        let n = self.lensed_rates.len();
        self.lensed_rates[..n.saturating_sub(1)]
            .iter()
            .zip(&self.conventional_rates)
            .map(|(l, c)| l - c)
            .reduce(f64::min)
    }
}

/// Compares `γ_i = Γ` against `γ̃_i = Γ·N·β_i` for a single path.
pub fn compare_single_path(
    snr_budget: f64,
    fractions: &PowerFractions,
    tol: f64,
) -> Result<Proposition1Report> {
    if !(snr_budget > 0.0 && snr_budget.is_finite()) {
        return Err(Error::domain("SNR budget", format!("must be positive, got {snr_budget}")));
    }
    let beta = fractions.fractions();
    let n = beta.len();
    let flat = SnrVector::new(vec![snr_budget; n])?;
    let lensed = SnrVector::new(beta.iter().map(|b| snr_budget * n as f64 * b).collect())?;
    let majorization = is_majorized(flat.as_slice(), lensed.as_slice(), tol)?;

    let conventional_rates = flat.rates();
    let lensed_rates = lensed.rates();
    let spread = beta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - beta.iter().copied().fold(f64::INFINITY, f64::min);
    let strict_expected = spread > STRICT_SPREAD;

    let mut violations = Vec::new();
    for m in 1..n {
        let (r, rt) = (conventional_rates[m - 1], lensed_rates[m - 1]);
        let ok = if strict_expected { rt > r + tol } else { rt >= r - tol };
        if !ok {
            violations.push(m);
        }
    }
    let endpoint_gap = (lensed_rates[n - 1] - conventional_rates[n - 1]).abs();
    if endpoint_gap > tol {
        violations.push(n);
    }
    Ok(Proposition1Report {
        aoa: fractions.aoa(),
        conventional_rates,
        lensed_rates,
        majorization,
        strict_expected,
        violations,
        endpoint_gap,
    })
}

/// Builds the lens power split at `aoa` and checks the single-path rate
/// ordering for every `M = 1..N`.
pub fn verify_proposition1(
    geom: &ArrayGeometry,
    lens: &LensProfile,
    snr_budget: f64,
    aoa: f64,
    tol: f64,
) -> Result<Proposition1Report> {
    let beta = lens.power_fractions(geom, aoa)?;
    compare_single_path(snr_budget, &beta, tol)
}
