//! Monte Carlo rate-versus-selected-antennas studies.
//!
//! Every trial owns a ChaCha8 stream selected by its index under the master
//! seed, and per-trial results are reduced in ascending trial order, so a
//! curve depends only on the configuration and never on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{conventional_channel, draw_multipath, lens_channel};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::lens::{LensProfile, DEFAULT_APERTURE};
use crate::receiver::branch_snrs;

/// Trials handed to the worker pool at a time.
const BATCH: usize = 1024;

/// Parameters of one rate-versus-`M` study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Number of array elements `N`.
    pub antennas: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
    /// Lens 90% power beamwidth in wavelengths.
    pub beamwidth: f64,
    /// Lens aperture in wavelengths.
    pub aperture: f64,
    /// AoA spread `Θ` in degrees; also the lens angular coverage.
    pub angular_spread: f64,
    /// Total SNR budget `Γ` in dB.
    pub snr_db: f64,
    /// Number of paths `L`.
    pub paths: usize,
    pub trials: usize,
    pub seed: u64,
    /// Selected-antenna counts to report; every `1..=N` when absent.
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            antennas: 20,
            spacing: 0.5,
            beamwidth: 3.0,
            aperture: DEFAULT_APERTURE,
            angular_spread: 60.0,
            snr_db: 10.0,
            paths: 1,
            trials: 1000,
            seed: 42,
            m_values: None,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry()?;
        self.lens()?;
        if self.paths == 0 {
            return Err(Error::domain("paths", "at least one path is required"));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials", "at least one trial is required"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::domain("snr_db", format!("must be finite, got {}", self.snr_db)));
        }
        self.resolved_m_values()?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.antennas, self.spacing)
    }

    pub fn lens(&self) -> Result<LensProfile> {
        LensProfile::new(self.aperture, self.beamwidth, self.angular_spread)
    }

    /// `Γ` as a linear ratio.
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// Requested `M` values, sorted and deduplicated, each in `1..=N`.
    pub fn resolved_m_values(&self) -> Result<Vec<usize>> {
        let Some(requested) = &self.m_values else {
            return Ok((1..=self.antennas).collect());
        };
        if requested.is_empty() {
            return Err(Error::domain("M", "at least one value is required"));
        }
        if let Some(&bad) = requested.iter().find(|&&m| m == 0 || m > self.antennas) {
            return Err(Error::domain(
                "M",
                format!("{bad} is outside 1..={}", self.antennas),
            ));
        }
        let mut values = requested.clone();
        values.sort_unstable();
        values.dedup();
        Ok(values)
    }

    /// Same scenario with a different path count.
    pub fn with_paths(&self, paths: usize) -> Self {
        Self {
            paths,
            ..self.clone()
        }
    }
}

/// Rates for `M = 1..N` from a single channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRates {
    pub conventional: Vec<f64>,
    pub lensed: Vec<f64>,
}

/// Runs trial `index`: one realization shared by both receivers.
pub fn run_trial(
    config: &ScenarioConfig,
    geom: &ArrayGeometry,
    lens: &LensProfile,
    index: u64,
) -> Result<TrialRates> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let realization = draw_multipath(
        config.paths,
        config.angular_spread,
        config.snr_linear(),
        geom.n_antennas(),
        &mut rng,
    )?;
    let h = conventional_channel(&realization, geom);
    let h_lens = lens_channel(&realization, geom, lens)?;
    Ok(TrialRates {
        conventional: branch_snrs(&h).rates(),
        lensed: branch_snrs(&h_lens).rates(),
    })
}

/// Mean and standard error of a rate across trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub m_values: Vec<usize>,
    pub conventional: Vec<RatePoint>,
    pub lensed: Vec<RatePoint>,
    pub n_trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Conventional,
    Lensed,
}

impl RateCurve {
    pub fn points(&self, system: System) -> &[RatePoint] {
        match system {
            System::Conventional => &self.conventional,
            System::Lensed => &self.lensed,
        }
    }

    /// Mean rate at `m`, if `m` was evaluated.
    pub fn mean_at(&self, system: System, m: usize) -> Option<f64> {
        let k = self.m_values.iter().position(|&v| v == m)?;
        Some(self.points(system)[k].mean)
    }
}

/// Welford accumulator, fed in trial order.
#[derive(Debug, Clone, Copy, Default)]
struct Running {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn point(&self) -> RatePoint {
        let stderr = if self.n > 1 {
            let var = (self.m2 / (self.n - 1) as f64).max(0.0);
            (var / self.n as f64).sqrt()
        } else {
            0.0
        };
        RatePoint {
            mean: self.mean,
            stderr,
        }
    }
}

/// Averages conventional and lensed rates over `config.trials` realizations
/// using `workers` threads.
pub fn run_rate_vs_m(config: &ScenarioConfig, workers: usize) -> Result<RateCurve> {
    config.validate()?;
    if workers == 0 {
        return Err(Error::domain("workers", "at least one worker is required"));
    }
    let geom = config.geometry()?;
    let lens = config.lens()?;
    let m_values = config.resolved_m_values()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain("workers", e.to_string()))?;

    let mut conventional = vec![Running::default(); m_values.len()];
    let mut lensed = vec![Running::default(); m_values.len()];
    let mut start = 0;
    while start < config.trials {
        let end = (start + BATCH).min(config.trials);
        let batch: Vec<TrialRates> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|t| run_trial(config, &geom, &lens, t as u64))
                .collect::<Result<_>>()
        })?;
        for trial in &batch {
            for (k, &m) in m_values.iter().enumerate() {
                conventional[k].push(trial.conventional[m - 1]);
                lensed[k].push(trial.lensed[m - 1]);
            }
        }
        start = end;
    }

    Ok(RateCurve {
        m_values,
        conventional: conventional.iter().map(Running::point).collect(),
        lensed: lensed.iter().map(Running::point).collect(),
        n_trials: config.trials,
    })
}

/// Smallest `M` whose mean rate reaches `fraction` of the full-array rate.
pub fn min_antennas_for_capacity_fraction(
    curve: &RateCurve,
    fraction: f64,
    system: System,
) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::domain("capacity fraction", format!("must lie in (0, 1], got {fraction}")));
    }
    let n = *curve
        .m_values
        .last()
        .ok_or_else(|| Error::domain("rate curve", "is empty"))?;
    let points = curve.points(system);
    let capacity = points[points.len() - 1].mean;
    let target = fraction * capacity;
    Ok(curve
        .m_values
        .iter()
        .zip(points)
        .find(|(_, p)| p.mean >= target)
        .map(|(&m, _)| m)
        .unwrap_or(n))
}

/// Two studies differing only in the path count, and their per-`M` gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub fewer_paths: usize,
    pub more_paths: usize,
    pub m_values: Vec<usize>,
    pub fewer: RateCurve,
    pub more: RateCurve,
    /// `more − fewer` mean lensed rate per `M`.
    pub lensed_gap: Vec<f64>,
    /// `more − fewer` mean conventional rate per `M`.
    pub conventional_gap: Vec<f64>,
}

impl SensitivityReport {
    pub fn from_curves(
        fewer_paths: usize,
        fewer: RateCurve,
        more_paths: usize,
        more: RateCurve,
    ) -> Result<Self> {
        if fewer.m_values != more.m_values {
            return Err(Error::Mismatch("curves cover different M values".into()));
        }
        let gap = |a: &[RatePoint], b: &[RatePoint]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| y.mean - x.mean).collect()
        };
        Ok(Self {
            fewer_paths,
            more_paths,
            m_values: fewer.m_values.clone(),
            lensed_gap: gap(&fewer.lensed, &more.lensed),
            conventional_gap: gap(&fewer.conventional, &more.conventional),
            fewer,
            more,
        })
    }

    pub fn max_abs_lensed_gap(&self) -> f64 {
        self.lensed_gap.iter().fold(0.0, |acc, g| acc.max(g.abs()))
    }

    pub fn max_abs_conventional_gap(&self) -> f64 {
        self.conventional_gap.iter().fold(0.0, |acc, g| acc.max(g.abs()))
    }
}

/// Runs two configurations that may differ only in `paths`.
pub fn compare_multipath_sensitivity(
    a: &ScenarioConfig,
    b: &ScenarioConfig,
    workers: usize,
) -> Result<SensitivityReport> {
    if a.with_paths(b.paths) != *b {
        return Err(Error::Mismatch(
            "configurations must be identical apart from the path count".into(),
        ));
    }
    let (fewer, more) = if a.paths <= b.paths { (a, b) } else { (b, a) };
    SensitivityReport::from_curves(
        fewer.paths,
        run_rate_vs_m(fewer, workers)?,
        more.paths,
        run_rate_vs_m(more, workers)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(paths: usize, trials: usize) -> ScenarioConfig {
        ScenarioConfig {
            paths,
            trials,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn single_path_conventional_closed_form() {
        let curve = run_rate_vs_m(&small(1, 50), 2).unwrap();
        for (k, &m) in curve.m_values.iter().enumerate() {
            let want = (1.0 + 10.0 * m as f64).log2();
            assert!((curve.conventional[k].mean - want).abs() < 1e-9);
            assert!(curve.conventional[k].stderr < 1e-9);
        }
        assert!((curve.conventional[0].mean - 3.459_431_618_637_297).abs() < 1e-9);
        assert!((curve.lensed[19].mean - 201f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn per_trial_monotone_with_equal_endpoints() {
        let cfg = small(1, 1);
        let (geom, lens) = (cfg.geometry().unwrap(), cfg.lens().unwrap());
        for t in 0..200 {
            let r = run_trial(&cfg, &geom, &lens, t).unwrap();
            assert!(r.conventional.windows(2).all(|w| w[0] <= w[1]));
            assert!(r.lensed.windows(2).all(|w| w[0] <= w[1]));
            assert!((r.lensed[19] - r.conventional[19]).abs() < 1e-12);
        }
        let cfg = small(5, 1);
        for t in 0..200 {
            let r = run_trial(&cfg, &geom, &lens, t).unwrap();
            assert!(r.conventional.windows(2).all(|w| w[0] <= w[1]));
            assert!(r.lensed.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = small(3, 2500);
        let one = run_rate_vs_m(&cfg, 1).unwrap();
        let four = run_rate_vs_m(&cfg, 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn subset_of_m_values() {
        let cfg = ScenarioConfig {
            m_values: Some(vec![20, 3, 1, 3]),
            ..small(2, 20)
        };
        let curve = run_rate_vs_m(&cfg, 1).unwrap();
        assert_eq!(curve.m_values, vec![1, 3, 20]);
        let full = run_rate_vs_m(&small(2, 20), 1).unwrap();
        assert_eq!(curve.lensed[1], full.lensed[2]);
        assert_eq!(curve.conventional[2], full.conventional[19]);
    }

    #[test]
    fn config_validation() {
        assert!(small(0, 10).validate().is_err());
        assert!(small(1, 0).validate().is_err());
        let bad_m = ScenarioConfig { m_values: Some(vec![21]), ..small(1, 1) };
        assert!(bad_m.validate().is_err());
        let bad_m = ScenarioConfig { m_values: Some(vec![]), ..small(1, 1) };
        assert!(bad_m.validate().is_err());
        let bad = ScenarioConfig { angular_spread: 200.0, ..small(1, 1) };
        assert!(bad.validate().is_err());
        let bad = ScenarioConfig { spacing: -0.5, ..small(1, 1) };
        assert!(bad.validate().is_err());
        assert!(run_rate_vs_m(&small(1, 1), 0).is_err());
    }

    #[test]
    fn capacity_fraction_counts() {
        let curve = run_rate_vs_m(&small(1, 200), 2).unwrap();
        assert_eq!(min_antennas_for_capacity_fraction(&curve, 0.99, System::Conventional).unwrap(), 19);
        assert_eq!(min_antennas_for_capacity_fraction(&curve, 1.0, System::Conventional).unwrap(), 20);
        assert_eq!(min_antennas_for_capacity_fraction(&curve, 1.0, System::Lensed).unwrap(), 20);
        assert!(min_antennas_for_capacity_fraction(&curve, 0.0, System::Lensed).is_err());
        assert!(min_antennas_for_capacity_fraction(&curve, 1.5, System::Lensed).is_err());
    }

    #[test]
    fn conventional_99_percent_oracle() {
        // Independent closed form: smallest M with log2(1+10M) ≥ 0.99·log2(201).
        let target = 0.99 * 201f64.log2();
        let m = (1..=20).find(|&m| (1.0 + 10.0 * m as f64).log2() >= target).unwrap();
        assert_eq!(m, 19);
    }

    #[test]
    fn sensitivity_same_config_is_zero() {
        let cfg = small(2, 100);
        let r = compare_multipath_sensitivity(&cfg, &cfg, 2).unwrap();
        assert!(r.lensed_gap.iter().all(|g| *g == 0.0));
        assert!(r.conventional_gap.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn sensitivity_rejects_mismatch() {
        let a = small(2, 100);
        let b = ScenarioConfig { snr_db: 5.0, ..small(20, 100) };
        assert!(matches!(compare_multipath_sensitivity(&a, &b, 1), Err(Error::Mismatch(_))));
    }

    #[test]
    fn stderr_shrinks_with_trials() {
        let full = run_rate_vs_m(&small(2, 2000), 4).unwrap();
        let half = run_rate_vs_m(&small(2, 1000), 4).unwrap();
        for k in 0..20 {
            let ratio = half.lensed[k].stderr / full.lensed[k].stderr;
            assert!((ratio - 2f64.sqrt()).abs() < 0.2, "M={} ratio {ratio}", k + 1);
        }
    }
}
