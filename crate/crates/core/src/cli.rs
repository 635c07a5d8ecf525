//! Command-line front end. `lensmimo simulate` writes rate-vs-M CSVs and a
//! manifest; `lensmimo verify` runs the property suites.
//!
//! Exit codes: 0 success, 1 configuration or domain error, 2 verification
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{
    min_antennas_for_capacity_fraction, run_rate_vs_m, RateCurve, ScenarioConfig,
    SensitivityReport, System,
};
use crate::report::{output_layout, write_rate_csv_file, ConfigOverrides, RunConfig, RunManifest};
use crate::verify::{run_all, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lensmimo", version, about = "Lens-array SIMO antenna-selection simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo rate versus number of selected antennas.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// CSV output path. Several path counts write `<stem>_L<count>.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the majorization, normalization and MRC property suites.
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Fault-injection hook: perturbs the first power fraction.
        #[arg(long, hide = true, default_value_t = 0.0)]
        inject_beta_perturbation: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Single path, N = 20, d = λ/2, Δ = 3λ, Γ = 10 dB, Θ = 60°.
    Fig6,
    /// As fig6 with L = 2 and L = 20.
    Fig7,
}

impl Preset {
    pub fn config(self) -> RunConfig {
        let base = ScenarioConfig::default();
        match self {
            Preset::Fig6 => RunConfig::from_scenario(&base, vec![1]),
            Preset::Fig7 => RunConfig::from_scenario(&base, vec![2, 20]),
        }
    }
}

/// Scenario flags; each overrides the config file, which overrides the preset.
#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// TOML config file (a previous run's manifest also works).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Preset::Fig6)]
    pub preset: Preset,
    /// Number of array elements N.
    #[arg(long)]
    pub antennas: Option<usize>,
    /// Element spacing in wavelengths.
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Lens 90% power beamwidth in wavelengths.
    #[arg(long)]
    pub beamwidth: Option<f64>,
    /// Lens aperture in wavelengths.
    #[arg(long)]
    pub aperture: Option<f64>,
    /// AoA spread in degrees.
    #[arg(long)]
    pub angular_spread: Option<f64>,
    /// Total SNR budget in dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Path count(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub paths: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Selected-antenna counts to report, comma separated.
    #[arg(long = "M", value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl ScenarioArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = self.preset.config();
        if let Some(path) = &self.config {
            ConfigOverrides::from_file(path)?.apply(&mut cfg);
        }
        let flags = ConfigOverrides {
            antennas: self.antennas,
            spacing: self.spacing,
            beamwidth: self.beamwidth,
            aperture: self.aperture,
            angular_spread: self.angular_spread,
            snr_db: self.snr_db,
            paths: self.paths.clone().map(crate::report::PathCounts::Many),
            trials: self.trials,
            seed: self.seed,
            m_values: self.m_values.clone(),
        };
        flags.apply(&mut cfg);
        cfg.scenarios()?;
        Ok(cfg)
    }

    pub fn workers(&self) -> Result<usize> {
        match self.workers {
            Some(0) => Err(Error::domain("workers", "at least one worker is required")),
            Some(k) => Ok(k),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

fn print_curve_summary<W: Write>(out: &mut W, paths: usize, curve: &RateCurve) -> std::io::Result<()> {
    let n = *curve.m_values.last().expect("non-empty curve");
    write!(out, "L={paths}:")?;
    if let (Some(r), Some(rt)) = (
        curve.mean_at(System::Conventional, 1),
        curve.mean_at(System::Lensed, 1),
    ) {
        write!(out, " R_1={r:.4} R~_1={rt:.4} (gain {:.1}%)", 100.0 * (rt / r - 1.0))?;
    }
    if curve.m_values.contains(&n) && curve.m_values.len() == n {
        let conv = min_antennas_for_capacity_fraction(curve, 0.99, System::Conventional);
        let lens = min_antennas_for_capacity_fraction(curve, 0.99, System::Lensed);
        if let (Ok(c), Ok(l)) = (conv, lens) {
            write!(out, "; 99% of capacity needs M={c} without lens, M={l} with lens")?;
        }
    }
    writeln!(out)
}

fn simulate<W: Write>(scenario: &ScenarioArgs, out_path: &Path, out: &mut W) -> Result<()> {
    let started = Instant::now();
    let cfg = scenario.resolve()?;
    let workers = scenario.workers()?;
    let layout = output_layout(out_path, &cfg.paths);

    let mut curves = Vec::new();
    for (scenario, csv) in cfg.scenarios()?.iter().zip(&layout.csv) {
        let curve = run_rate_vs_m(scenario, workers)?;
        write_rate_csv_file(&curve, csv)?;
        let _ = print_curve_summary(out, scenario.paths, &curve);
        curves.push((scenario.paths, curve));
    }
    if let [(lo, a), .., (hi, b)] = curves.as_slice() {
        let report = SensitivityReport::from_curves(*lo, a.clone(), *hi, b.clone())?;
        let _ = writeln!(
            out,
            "L={lo} vs L={hi}: max |Δ lensed| = {:.4} bps/Hz, max |Δ conventional| = {:.4} bps/Hz",
            report.max_abs_lensed_gap(),
            report.max_abs_conventional_gap()
        );
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "simulate".into(),
        runtime_seconds: started.elapsed().as_secs_f64(),
        outputs: layout
            .csv
            .iter()
            .chain(std::iter::once(&layout.manifest))
            .map(|p| p.display().to_string())
            .collect(),
        config: cfg,
    };
    manifest.write(&layout.manifest)
}

/// Returns the first failing suite's report line, if any.
fn verify<W: Write>(scenario: &ScenarioArgs, perturbation: f64, out: &mut W) -> Result<Option<String>> {
    let cfg = scenario.resolve()?;
    let base = cfg.scenarios()?.remove(0);
    let opts = VerifyOptions {
        beta_perturbation: perturbation,
        ..VerifyOptions::from_config(&base)
    };
    let outcomes = run_all(&base, &opts)?;
    for o in &outcomes {
        let _ = writeln!(out, "{o}");
    }
    Ok(outcomes.iter().find(|o| !o.passed()).map(|o| o.to_string()))
}

/// Parses `args` and runs the command, writing reports to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = write!(if code == EXIT_OK { out as &mut dyn Write } else { err }, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate { scenario, out: path } => simulate(scenario, path, out).map(|_| None),
        Command::Verify {
            scenario,
            inject_beta_perturbation,
        } => verify(scenario, *inject_beta_perturbation, out),
    };
    match result {
        Ok(None) => EXIT_OK,
        Ok(Some(first_failure)) => {
            let _ = writeln!(err, "lensmimo: verification failed: {first_failure}");
            EXIT_VERIFY
        }
        Err(e) => {
            let _ = writeln!(err, "lensmimo: {e}");
            EXIT_CONFIG
        }
    }
}
