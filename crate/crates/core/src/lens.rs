//! Gaussian focal-spot model of the electromagnetic lens.
//!
//! A plane wave arriving at angle θ is focused onto the array plane as a
//! Gaussian power density centred at `ȳ_θ = (θ/90)(D/2)` with a variance `V`
//! that does not depend on θ. The density is taken over the whole real line,
//! so the lens aperture only enters through the focal-spot location.
//!
//! The standard normal CDF is evaluated through `libm::erfc`, the musl port
//! of the FreeBSD `s_erf.c` rational approximations (error below one ulp).
//! Bins to the right of the focal spot are computed from upper-tail
//! probabilities so that far-tail fractions keep their relative accuracy.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// `Δ² = BEAMWIDTH_VARIANCE_RATIO · V` for the 90% power beamwidth.
pub const BEAMWIDTH_VARIANCE_RATIO: f64 = 18.42;

/// Aperture of the reference lens, in wavelengths.
pub const DEFAULT_APERTURE: f64 = 20.0;

/// Lens focusing profile. Lengths in wavelengths, coverage in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct LensProfile {
    aperture: f64,
    beamwidth: f64,
    variance: f64,
    angular_coverage: f64,
}

impl LensProfile {
    pub fn new(aperture: f64, beamwidth: f64, angular_coverage: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture.is_finite()) {
            return Err(Error::domain(
                "lens aperture",
                format!("must be positive and finite, got {aperture}"),
            ));
        }
        if !(angular_coverage > 0.0 && angular_coverage <= 180.0) {
            return Err(Error::domain(
                "angular coverage",
                format!("must lie in (0, 180] degrees, got {angular_coverage}"),
            ));
        }
        let variance = beamwidth_to_variance(beamwidth)?;
        Ok(Self {
            aperture,
            beamwidth,
            variance,
            angular_coverage,
        })
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn beamwidth(&self) -> f64 {
        self.beamwidth
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn angular_coverage(&self) -> f64 {
        self.angular_coverage
    }

    /// Checks that `aoa` (degrees) lies within `[-Θ/2, Θ/2]`.
    pub fn check_coverage(&self, aoa: f64) -> Result<()> {
        let half = self.angular_coverage / 2.0;
        if aoa.is_finite() && aoa.abs() <= half {
            Ok(())
        } else {
            Err(Error::OutOfCoverage {
                aoa,
                half_coverage: half,
            })
        }
    }

    /// Focal-spot centre for an incident angle in degrees.
    pub fn peak_location(&self, aoa: f64) -> Result<f64> {
        self.check_coverage(aoa)?;
        Ok(focal_center(aoa, self.aperture))
    }

    /// Normalized power density at `y` for a wave arriving at `aoa`.
    pub fn density(&self, y: f64, aoa: f64) -> f64 {
        let offset = y - focal_center(aoa, self.aperture);
        (-offset * offset / (2.0 * self.variance)).exp() / (2.0 * PI * self.variance).sqrt()
    }

    /// Fraction of the collected power landing on each element. The outermost
    /// elements absorb the tails of the density beyond the array.
    pub fn power_fractions(&self, geom: &ArrayGeometry, aoa: f64) -> Result<PowerFractions> {
        let center = self.peak_location(aoa)?;
        let sigma = self.variance.sqrt();
        let half = geom.spacing() / 2.0;
        let n = geom.n_antennas();

        let fractions = geom
            .positions()
            .iter()
            .enumerate()
            .map(|(k, &y)| {
                let lo = if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    (y - half - center) / sigma
                };
                let hi = if k + 1 == n {
                    f64::INFINITY
                } else {
                    (y + half - center) / sigma
                };
                standard_normal_mass(lo, hi)
            })
            .collect();
        Ok(PowerFractions { fractions, aoa })
    }
}

fn focal_center(aoa: f64, aperture: f64) -> f64 {
    (aoa / 90.0) * (aperture / 2.0)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal upper tail, `1 - Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Probability of a standard normal variable falling in `[lo, hi]`.
fn standard_normal_mass(lo: f64, hi: f64) -> f64 {
    let mass = if lo >= 0.0 {
        normal_sf(lo) - normal_sf(hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    };
    mass.max(0.0)
}

/// Per-element power split for one incident path.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFractions {
    fractions: Vec<f64>,
    aoa: f64,
}

impl PowerFractions {
    /// Wraps externally supplied fractions, e.g. an idealised uniform lens.
    pub fn from_fractions(fractions: Vec<f64>, aoa: f64) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::domain("power fractions", "must not be empty"));
        }
        if let Some(bad) = fractions.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return Err(Error::domain(
                "power fractions",
                format!("entries must be finite and non-negative, got {bad}"),
            ));
        }
        Ok(Self { fractions, aoa })
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn aoa(&self) -> f64 {
        self.aoa
    }

    pub fn total(&self) -> f64 {
        self.fractions.iter().sum()
    }

    /// 0-based index of the strongest element, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &b) in self.fractions.iter().enumerate() {
            if b > self.fractions[best] {
                best = k;
            }
        }
        best
    }
}

/// `V = Δ² / 18.42`.
pub fn beamwidth_to_variance(beamwidth: f64) -> Result<f64> {
    if !(beamwidth > 0.0 && beamwidth.is_finite()) {
        return Err(Error::domain(
            "beamwidth",
            format!("must be positive and finite, got {beamwidth}"),
        ));
    }
    Ok(beamwidth * beamwidth / BEAMWIDTH_VARIANCE_RATIO)
}

/// Focal-spot centre `(θ/90)(D/2)`, rejecting angles outside `±coverage/2`.
pub fn peak_location(aoa: f64, aperture: f64, angular_coverage: f64) -> Result<f64> {
    let half = angular_coverage / 2.0;
    if !(aoa.is_finite() && aoa.abs() <= half) {
        return Err(Error::OutOfCoverage {
            aoa,
            half_coverage: half,
        });
    }
    Ok(focal_center(aoa, aperture))
}

pub fn normalized_density(y: f64, aoa: f64, lens: &LensProfile) -> f64 {
    lens.density(y, aoa)
}

pub fn power_fractions(
    lens: &LensProfile,
    geom: &ArrayGeometry,
    aoa: f64,
) -> Result<PowerFractions> {
    lens.power_fractions(geom, aoa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::antenna_positions;
    use proptest::prelude::*;
    use libm::erf;

    fn default_lens() -> LensProfile {
        LensProfile::new(20.0, 3.0, 60.0).unwrap()
    }

    #[test]
    fn erf_matches_tabulated_values() {
        // Abramowitz & Stegun, Table 7.1 (extended precision).
        let table = [
            (0.1, 0.112_462_916_018_284_9),
            (0.5, 0.520_499_877_813_046_5),
            (1.0, 0.842_700_792_949_714_9),
            (2.0, 0.995_322_265_018_952_7),
            (3.0, 0.999_977_909_503_001_4),
        ];
        for (x, want) in table {
            assert!((erf(x) - want).abs() < 1e-15, "erf({x})");
            assert!((1.0 - erfc(x) - want).abs() < 1e-15, "erfc({x})");
        }
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-15);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_sf(-1.0) - normal_cdf(1.0)).abs() < 1e-16);
    }

    #[test]
    fn variance_from_beamwidth() {
        assert!((beamwidth_to_variance(3.0).unwrap() - 0.488_599_348_534_202).abs() < 1e-12);
        assert!((beamwidth_to_variance(0.1).unwrap() - 5.428_881_650_380_022e-4).abs() < 1e-15);
        assert!(beamwidth_to_variance(0.0).is_err());
        assert!(beamwidth_to_variance(-1.0).is_err());
    }

    #[test]
    fn ninety_percent_beamwidth_constant() {
        // exp(-(Δ/2)²/(2V)) = 0.1  ⇒  Δ² = 8 ln 10 · V
        let exact = 8.0 * std::f64::consts::LN_10;
        assert!((exact - 18.4207).abs() < 1e-4);
        assert!((exact - BEAMWIDTH_VARIANCE_RATIO).abs() / exact < 5e-5);
    }

    #[test]
    fn peak_location_examples() {
        let lens = default_lens();
        assert_eq!(lens.peak_location(0.0).unwrap(), 0.0);
        assert!((lens.peak_location(30.0).unwrap() - 10.0 / 3.0).abs() < 1e-14);
        assert!((lens.peak_location(-30.0).unwrap() + 10.0 / 3.0).abs() < 1e-14);
        assert!(matches!(
            lens.peak_location(30.5),
            Err(Error::OutOfCoverage { .. })
        ));
        assert!(peak_location(45.0, 20.0, 60.0).is_err());
        assert!((peak_location(45.0, 20.0, 180.0).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn density_shape() {
        let lens = default_lens();
        let peak = 1.0 / (2.0 * PI * lens.variance()).sqrt();
        assert!((normalized_density(0.0, 0.0, &lens) - peak).abs() < 1e-15);
        let ybar = lens.peak_location(20.0).unwrap();
        let edge = normalized_density(ybar + lens.beamwidth() / 2.0, 20.0, &lens);
        assert!((edge / peak - 0.1).abs() < 1e-4);

        // Unit mass by trapezoid over ±12σ.
        let sigma = lens.variance().sqrt();
        let n = 20_000;
        let (a, b) = (ybar - 12.0 * sigma, ybar + 12.0 * sigma);
        let h = (b - a) / n as f64;
        let mut mass = 0.5 * (lens.density(a, 20.0) + lens.density(b, 20.0));
        for k in 1..n {
            mass += lens.density(a + k as f64 * h, 20.0);
        }
        assert!((mass * h - 1.0).abs() < 1e-9);
    }

    #[test]
    fn broadside_center_fraction() {
        let geom = antenna_positions(20, 0.5).unwrap();
        let beta = default_lens().power_fractions(&geom, 0.0).unwrap();
        // Φ(0.5/√V) − Φ(0) with √V = 0.69900...
        assert!((beta.fractions()[9] - 0.262_790_871_212_345_7).abs() < 1e-12);
        assert!((beta.fractions()[10] - beta.fractions()[9]).abs() < 1e-15);
        assert!((beta.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thirty_degrees_peaks_on_antenna_17() {
        let geom = antenna_positions(20, 0.5).unwrap();
        let beta = default_lens().power_fractions(&geom, 30.0).unwrap();
        assert_eq!(beta.argmax() + 1, 17);
    }

    #[test]
    fn rejects_out_of_coverage() {
        let geom = antenna_positions(20, 0.5).unwrap();
        assert!(default_lens().power_fractions(&geom, -31.0).is_err());
        assert!(default_lens().power_fractions(&geom, f64::NAN).is_err());
    }

    #[test]
    fn single_element_takes_everything() {
        let geom = antenna_positions(1, 0.5).unwrap();
        let beta = default_lens().power_fractions(&geom, 12.0).unwrap();
        assert_eq!(beta.fractions(), &[1.0]);
    }

    #[test]
    fn invalid_profiles() {
        assert!(LensProfile::new(0.0, 3.0, 60.0).is_err());
        assert!(LensProfile::new(20.0, 0.0, 60.0).is_err());
        assert!(LensProfile::new(20.0, 3.0, 0.0).is_err());
        assert!(LensProfile::new(20.0, 3.0, 181.0).is_err());
        assert!(PowerFractions::from_fractions(vec![0.5, -0.1], 0.0).is_err());
    }

    fn trapezoid(lens: &LensProfile, aoa: f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (lens.density(a, aoa) + lens.density(b, aoa));
        for k in 1..n {
            s += lens.density(a + k as f64 * h, aoa);
        }
        s * h
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn fractions_are_normalized(
            n in 1usize..64,
            d in 0.1f64..2.0,
            delta in 0.1f64..10.0,
            aperture in 1.0f64..60.0,
            coverage in 1.0f64..=180.0,
            u in -1.0f64..=1.0,
        ) {
            let geom = antenna_positions(n, d).unwrap();
            let lens = LensProfile::new(aperture, delta, coverage).unwrap();
            let beta = lens.power_fractions(&geom, u * coverage / 2.0).unwrap();
            prop_assert!(beta.fractions().iter().all(|b| *b >= 0.0));
            prop_assert!((beta.total() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn mirror_symmetry(theta in -30.0f64..=30.0) {
            let geom = antenna_positions(20, 0.5).unwrap();
            let lens = default_lens();
            let pos = lens.power_fractions(&geom, theta).unwrap();
            let neg = lens.power_fractions(&geom, -theta).unwrap();
            for (a, b) in pos.fractions().iter().zip(neg.fractions().iter().rev()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn matches_bin_quadrature(theta in -30.0f64..=30.0, k in 0usize..20) {
            let geom = antenna_positions(20, 0.5).unwrap();
            let lens = default_lens();
            let beta = lens.power_fractions(&geom, theta).unwrap().fractions()[k];
            let y = geom.positions()[k];
            let ybar = lens.peak_location(theta).unwrap();
            let reach = 40.0 * lens.variance().sqrt();
            let lo = if k == 0 { ybar.min(y) - reach } else { y - 0.25 };
            let hi = if k == 19 { ybar.max(y) + reach } else { y + 0.25 };
            let quad = trapezoid(&lens, theta, lo, hi, 200_000);
            // Far-tail bins are vanishingly small; compare relatively where it means something.
            prop_assert!((quad - beta).abs() <= 1e-6 * beta.max(1e-9), "quad {quad} beta {beta}");
        }
    }

    #[test]
    fn focal_spot_sweeps_monotonically() {
        let geom = antenna_positions(20, 0.5).unwrap();
        let lens = default_lens();
        let mut last = 0;
        for step in 0..=600 {
            let theta = -30.0 + step as f64 * 0.1;
            let k = lens.power_fractions(&geom, theta.min(30.0)).unwrap().argmax();
            assert!(k >= last, "argmax went back at θ={theta}");
            last = k;
        }
        assert_eq!(last, 16);
    }
}
