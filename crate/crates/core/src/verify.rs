//! Property suites backing `lensmimo verify`.
//!
//! Each suite sweeps randomized inputs drawn from a seeded stream and stops
//! at the first counterexample.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{conventional_channel, draw_multipath, lens_channel};
use crate::error::Result;
use crate::experiments::ScenarioConfig;
use crate::geometry::ArrayGeometry;
use crate::lens::{LensProfile, PowerFractions};
use crate::majorization::{check_lemma1, compare_single_path, DEFAULT_TOLERANCE};
use crate::receiver::{branch_snrs, empirical_combiner_snr, select_top_m};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
pub const MRC_RELATIVE_TOLERANCE: f64 = 0.05;
pub const MRC_CHANNELS: usize = 20;
pub const MRC_NOISE_DRAWS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Cases per sweep for the mean-vector, rate-ordering and normalization suites.
    pub sweep: usize,
    pub seed: u64,
    pub mrc_channels: usize,
    pub mrc_noise_draws: usize,
    /// Added to the first power fraction before the normalization check.
    /// Test hook for fault injection; zero in normal runs.
    pub beta_perturbation: f64,
}

impl VerifyOptions {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            sweep: config.trials,
            seed: config.seed,
            mrc_channels: MRC_CHANNELS,
            mrc_noise_draws: MRC_NOISE_DRAWS,
            beta_perturbation: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// First counterexample, if any.
    pub failure: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {} ({} cases)", self.name, self.cases),
            Some(why) => write!(f, "FAIL {}: {why}", self.name),
        }
    }
}

fn stream(seed: u64, suite: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite);
    rng
}

/// A random but valid array, lens and in-coverage angle.
fn random_setup<R: Rng>(rng: &mut R) -> Result<(ArrayGeometry, LensProfile, f64)> {
    let geom = ArrayGeometry::new(rng.random_range(2..=64), rng.random_range(0.25..=1.0))?;
    let coverage = rng.random_range(10.0..=180.0);
    let lens = LensProfile::new(rng.random_range(5.0..=40.0), rng.random_range(0.5..=8.0), coverage)?;
    let aoa = rng.random_range(-coverage / 2.0..=coverage / 2.0);
    Ok((geom, lens, aoa))
}

pub fn lemma1_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut rng = stream(opts.seed, 1);
    for case in 0..opts.sweep {
        let len = rng.random_range(1..=64);
        let v: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..100.0)).collect();
        if !check_lemma1(&v, DEFAULT_TOLERANCE)? {
            return Ok(SuiteOutcome {
                name: "lemma1",
                cases: case + 1,
                failure: Some(format!("mean vector not majorized by {v:?}")),
            });
        }
    }
    Ok(SuiteOutcome { name: "lemma1", cases: opts.sweep, failure: None })
}

/// Single-path rate ordering over random arrays, lenses, angles and budgets.
pub fn proposition1_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut rng = stream(opts.seed, 2);
    for case in 0..opts.sweep {
        let (geom, lens, aoa) = random_setup(&mut rng)?;
        let snr_db: f64 = rng.random_range(-10.0..=30.0);
        let beta = lens.power_fractions(&geom, aoa)?;
        let report = compare_single_path(10f64.powf(snr_db / 10.0), &beta, DEFAULT_TOLERANCE)?;
        if !report.holds() {
            return Ok(SuiteOutcome {
                name: "proposition1",
                cases: case + 1,
                failure: Some(format!(
                    "N={} d={} Δ={} D={} θ={aoa} Γ={snr_db} dB: majorized={}, violations at M={:?}",
                    geom.n_antennas(),
                    geom.spacing(),
                    lens.beamwidth(),
                    lens.aperture(),
                    report.majorization.majorized,
                    report.violations,
                )),
            });
        }
    }
    Ok(SuiteOutcome { name: "proposition1", cases: opts.sweep, failure: None })
}

fn perturbed(beta: PowerFractions, delta: f64) -> Vec<f64> {
    let mut v = beta.fractions().to_vec();
    v[0] += delta;
    v
}

pub fn normalization_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut rng = stream(opts.seed, 3);
    for case in 0..opts.sweep {
        let (geom, lens, aoa) = random_setup(&mut rng)?;
        let beta = perturbed(lens.power_fractions(&geom, aoa)?, opts.beta_perturbation);
        let total: f64 = beta.iter().sum();
        let negative = beta.iter().position(|b| *b < 0.0);
        if (total - 1.0).abs() >= NORMALIZATION_TOLERANCE || negative.is_some() {
            return Ok(SuiteOutcome {
                name: "normalization",
                cases: case + 1,
                failure: Some(format!(
                    "N={} d={} Δ={} D={} θ={aoa}: Σβ−1 = {:e}, first negative at {:?}",
                    geom.n_antennas(),
                    geom.spacing(),
                    lens.beamwidth(),
                    lens.aperture(),
                    total - 1.0,
                    negative.map(|k| k + 1),
                )),
            });
        }
    }
    Ok(SuiteOutcome { name: "normalization", cases: opts.sweep, failure: None })
}

/// Empirical MRC output SNR against the sum of selected branch SNRs, over
/// random conventional and lensed channels drawn from `config`.
pub fn mrc_suite(config: &ScenarioConfig, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let geom = config.geometry()?;
    let lens = config.lens()?;
    let mut rng = stream(opts.seed, 4);
    for case in 0..opts.mrc_channels {
        let paths = rng.random_range(1..=8);
        let realization = draw_multipath(
            paths,
            config.angular_spread,
            config.snr_linear(),
            geom.n_antennas(),
            &mut rng,
        )?;
        let h = if case % 2 == 0 {
            conventional_channel(&realization, &geom)
        } else {
            lens_channel(&realization, &geom, &lens)?
        };
        let m = rng.random_range(1..=geom.n_antennas());
        let selection = select_top_m(&branch_snrs(&h), m)?;
        let estimate = empirical_combiner_snr(&h, &selection.selected, 1.0, opts.mrc_noise_draws, &mut rng)?;
        let expected = selection.combined_snr;
        let rel = (estimate - expected).abs() / expected;
        if rel > MRC_RELATIVE_TOLERANCE {
            return Ok(SuiteOutcome {
                name: "mrc_oracle",
                cases: case + 1,
                failure: Some(format!(
                    "channel {case} (L={paths}, lensed={}), M={m}: empirical {estimate:.4} vs Σγ {expected:.4}",
                    h.lensed
                )),
            });
        }
    }
    Ok(SuiteOutcome { name: "mrc_oracle", cases: opts.mrc_channels, failure: None })
}

/// Runs every suite in a fixed order.
pub fn run_all(config: &ScenarioConfig, opts: &VerifyOptions) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![
        lemma1_suite(opts)?,
        proposition1_suite(opts)?,
        normalization_suite(opts)?,
        mrc_suite(config, opts)?,
    ])
}
