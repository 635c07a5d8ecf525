//! Multipath realizations and the SIMO channel vectors they induce, with and
//! without the lens.
//!
//! Gains are expressed under the `P_t / σ² = 1` normalization, so a gain is
//! directly an SNR contribution.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::lens::LensProfile;

/// One plane-wave path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathComponent {
    /// Angle of arrival in degrees.
    pub aoa: f64,
    /// Linear power gain.
    pub gain: f64,
    /// Arrival phase α in radians.
    pub arrival_phase: f64,
    /// Per-element phase shifts introduced by the lens, radians.
    pub lens_phases: Vec<f64>,
}

impl PathComponent {
    pub fn new(aoa: f64, gain: f64, arrival_phase: f64, lens_phases: Vec<f64>) -> Result<Self> {
        if !aoa.is_finite() || aoa.abs() > 90.0 {
            return Err(Error::domain("angle of arrival", format!("{aoa}° is not in [-90, 90]")));
        }
        if !(gain >= 0.0 && gain.is_finite()) {
            return Err(Error::domain("path gain", format!("must be finite and non-negative, got {gain}")));
        }
        let in_cycle = |p: f64| (0.0..TAU).contains(&p);
        if !in_cycle(arrival_phase) || !lens_phases.iter().copied().all(in_cycle) {
            return Err(Error::domain("phase", "phases must lie in [0, 2π)"));
        }
        Ok(Self {
            aoa,
            gain,
            arrival_phase,
            lens_phases,
        })
    }

    /// Phase progression across the array, `2π·d·sinθ` per element.
    fn phase_step(&self, spacing: f64) -> f64 {
        TAU * spacing * self.aoa.to_radians().sin()
    }
}

/// A set of paths sharing one SNR budget.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathRealization {
    paths: Vec<PathComponent>,
    snr_budget: f64,
}

impl MultipathRealization {
    /// Builds a realization whose budget is the sum of the path gains.
    pub fn from_paths(paths: Vec<PathComponent>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::domain("path count", "at least one path is required"));
        }
        let snr_budget = paths.iter().map(|p| p.gain).sum();
        Ok(Self { paths, snr_budget })
    }

    pub fn paths(&self) -> &[PathComponent] {
        &self.paths
    }

    pub fn snr_budget(&self) -> f64 {
        self.snr_budget
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Complex channel coefficients from the user to each element.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub coefficients: Vec<Complex64>,
    pub lensed: bool,
}

impl ChannelVector {
    pub fn new(coefficients: Vec<Complex64>, lensed: bool) -> Result<Self> {
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::domain("channel coefficients", "entries must be finite"));
        }
        Ok(Self {
            coefficients,
            lensed,
        })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Total received power `Σ|h_i|²`.
    pub fn total_power(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Splits `snr_budget` over paths in proportion to `cos θ_l`.
pub fn cosine_gains(aoas: &[f64], snr_budget: f64) -> Result<Vec<f64>> {
    if aoas.is_empty() {
        return Err(Error::domain("path count", "at least one path is required"));
    }
    if !(snr_budget > 0.0 && snr_budget.is_finite()) {
        return Err(Error::domain("SNR budget", format!("must be positive, got {snr_budget}")));
    }
    let cosines: Vec<f64> = aoas.iter().map(|a| a.to_radians().cos()).collect();
    let total: f64 = cosines.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::domain("angles of arrival", "cosine weights sum to zero"));
    }
    Ok(cosines.iter().map(|c| snr_budget * (c / total)).collect())
}

/// Draws `n_paths` paths with AoAs uniform on `±angular_spread/2`, uniform
/// arrival and lens phases, and gains proportional to `cos θ` summing to
/// `snr_budget`. Lens phases are drawn for `n_antennas` elements.
pub fn draw_multipath<R: Rng + ?Sized>(
    n_paths: usize,
    angular_spread: f64,
    snr_budget: f64,
    n_antennas: usize,
    rng: &mut R,
) -> Result<MultipathRealization> {
    if n_paths == 0 {
        return Err(Error::domain("path count", "at least one path is required"));
    }
    if !(angular_spread > 0.0 && angular_spread <= 180.0) {
        return Err(Error::domain(
            "angular spread",
            format!("must lie in (0, 180] degrees, got {angular_spread}"),
        ));
    }
    let half = angular_spread / 2.0;
    let mut aoas = Vec::with_capacity(n_paths);
    let mut phases = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        aoas.push(rng.random_range(-half..=half));
        let alpha = rng.random_range(0.0..TAU);
        let eta: Vec<f64> = (0..n_antennas).map(|_| rng.random_range(0.0..TAU)).collect();
        phases.push((alpha, eta));
    }
    let gains = cosine_gains(&aoas, snr_budget)?;
    let paths = aoas
        .into_iter()
        .zip(gains)
        .zip(phases)
        .map(|((aoa, gain), (arrival_phase, lens_phases))| PathComponent {
            aoa,
            gain,
            arrival_phase,
            lens_phases,
        })
        .collect();
    Ok(MultipathRealization { paths, snr_budget })
}

/// Channel without the lens: every path reaches every element with its full
/// gain and a linear phase progression.
pub fn conventional_channel(paths: &MultipathRealization, geom: &ArrayGeometry) -> ChannelVector {
    let d = geom.spacing();
    let coefficients = (1..=geom.n_antennas())
        .map(|i| {
            paths
                .paths
                .iter()
                .map(|p| {
                    let phase = p.arrival_phase + p.phase_step(d) * i as f64;
                    Complex64::from_polar(p.gain.sqrt(), phase)
                })
                .sum()
        })
        .collect();
    ChannelVector {
        coefficients,
        lensed: false,
    }
}

/// Channel with the lens: path `l` delivers `N·g_l·β_il` of power to
/// element `i`, with an extra lens phase `η_il`.
pub fn lens_channel(
    paths: &MultipathRealization,
    geom: &ArrayGeometry,
    lens: &LensProfile,
) -> Result<ChannelVector> {
    let n = geom.n_antennas();
    let d = geom.spacing();
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n];
    for p in &paths.paths {
        if p.lens_phases.len() != n {
            return Err(Error::LengthMismatch {
                left: p.lens_phases.len(),
                right: n,
            });
        }
        let beta = lens.power_fractions(geom, p.aoa)?;
        let step = p.phase_step(d);
        for (k, (h, (&b, &eta))) in coefficients
            .iter_mut()
            .zip(beta.fractions().iter().zip(&p.lens_phases))
            .enumerate()
        {
            let phase = p.arrival_phase + step * (k + 1) as f64 + eta;
            *h += Complex64::from_polar((n as f64 * p.gain * b).sqrt(), phase);
        }
    }
    Ok(ChannelVector {
        coefficients,
        lensed: true,
    })
}

/// One noisy observation `y = h·s + n` with `n ~ CN(0, noise_var·I)`.
pub fn synthesize_received_signal<R: Rng + ?Sized>(
    h: &ChannelVector,
    symbol: Complex64,
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::domain(
            "noise variance",
            format!("must be finite and non-negative, got {noise_var}"),
        ));
    }
    let scale = (noise_var / 2.0).sqrt();
    Ok(h.coefficients
        .iter()
        .map(|&c| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c * symbol + Complex64::new(re, im) * scale
        })
        .collect())
}
