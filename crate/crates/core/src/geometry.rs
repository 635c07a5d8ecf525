//! Uniform linear array centered on the origin of the y-axis.

use crate::error::{Error, Result};

/// Element layout of a uniform linear array. Coordinates are in wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    spacing: f64,
    positions: Vec<f64>,
}

impl ArrayGeometry {
    /// Places `n_antennas` elements `spacing` wavelengths apart, symmetric
    /// about y = 0: `y_i = -(N-1)d/2 + (i-1)d` for `i = 1..N`.
    pub fn new(n_antennas: usize, spacing: f64) -> Result<Self> {
        if n_antennas == 0 {
            return Err(Error::domain("antenna count", "must be at least 1"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::domain(
                "antenna spacing",
                format!("must be positive and finite, got {spacing}"),
            ));
        }
        let half_span = (n_antennas - 1) as f64 * spacing / 2.0;
        let positions = (0..n_antennas)
            .map(|k| -half_span + k as f64 * spacing)
            .collect();
        Ok(Self { spacing, positions })
    }

    pub fn n_antennas(&self) -> usize {
        self.positions.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Element coordinates, 0-indexed (element `k` here is antenna `k + 1`).
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
}

/// Convenience wrapper around [`ArrayGeometry::new`].
pub fn antenna_positions(n_antennas: usize, spacing: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::new(n_antennas, spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn twenty_half_wavelength_elements() {
        let g = antenna_positions(20, 0.5).unwrap();
        assert_eq!(g.n_antennas(), 20);
        assert!((g.positions()[0] + 4.75).abs() < 1e-15);
        assert!((g.positions()[19] - 4.75).abs() < 1e-15);
    }

    #[test]
    fn single_element_is_centered() {
        assert_eq!(antenna_positions(1, 0.5).unwrap().positions(), &[0.0]);
    }

    #[test]
    fn three_elements_one_wavelength() {
        assert_eq!(antenna_positions(3, 1.0).unwrap().positions(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(antenna_positions(0, 0.5).is_err());
        assert!(antenna_positions(4, 0.0).is_err());
        assert!(antenna_positions(4, -0.5).is_err());
        assert!(antenna_positions(4, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn layout_is_uniform_and_symmetric(n in 1usize..200, d in 0.01f64..5.0) {
            let g = antenna_positions(n, d).unwrap();
            let y = g.positions();
            prop_assert_eq!(y.len(), n);
            for w in y.windows(2) {
                prop_assert!((w[1] - w[0] - d).abs() < 1e-12 * n as f64 * d.max(1.0));
            }
            let sum: f64 = y.iter().sum();
            prop_assert!(sum.abs() <= 1e-12 * n as f64 * d);
            for (a, b) in y.iter().zip(y.iter().rev()) {
                prop_assert!((a + b).abs() <= 1e-12 * n as f64 * d);
            }
        }
    }
}
