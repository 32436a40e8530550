//! Sampled azimuth gain pattern of an embedded RIS element.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Coverage slack on the required [-90 deg, +90 deg] span.
const COVERAGE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("element {index}: pattern has no samples")]
    Empty { index: usize },
    #[error("element {index}: azimuth samples must be strictly increasing (at {azimuth_deg} deg)")]
    NotIncreasing { index: usize, azimuth_deg: f64 },
    #[error("element {index}: negative or non-finite gain {gain} at {azimuth_deg} deg")]
    Gain { index: usize, azimuth_deg: f64, gain: f64 },
    #[error("element {index}: |s_mm| = {magnitude} exceeds 1")]
    SelfCoefficient { index: usize, magnitude: f64 },
    #[error("element {index}: pattern covers [{lo_deg}, {hi_deg}] deg, needs [-90, 90]")]
    Coverage { index: usize, lo_deg: f64, hi_deg: f64 },
    #[error("element {index}: azimuth {azimuth_deg} deg is outside the sampled range [{lo_deg}, {hi_deg}] deg")]
    OutOfRange {
        index: usize,
        azimuth_deg: f64,
        lo_deg: f64,
        hi_deg: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementPattern {
    index_m: usize,
    /// (azimuth rad, linear gain), azimuth strictly increasing.
    samples: Vec<(f64, f64)>,
    s_mm: Complex64,
}

impl ElementPattern {
    pub fn new(
        index_m: usize,
        samples: Vec<(f64, f64)>,
        s_mm: Complex64,
    ) -> Result<Self, PatternError> {
        let index = index_m;
        if samples.is_empty() {
            return Err(PatternError::Empty { index });
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(PatternError::NotIncreasing {
                    index,
                    azimuth_deg: w[1].0.to_degrees(),
                });
            }
        }
        for &(az, g) in &samples {
            if !(g >= 0.0 && g.is_finite()) || !az.is_finite() {
                return Err(PatternError::Gain {
                    index,
                    azimuth_deg: az.to_degrees(),
                    gain: g,
                });
            }
        }
        let magnitude = s_mm.norm();
        if !(magnitude <= 1.0) {
            return Err(PatternError::SelfCoefficient { index, magnitude });
        }
        let lo = samples[0].0;
        let hi = samples[samples.len() - 1].0;
        if lo > -FRAC_PI_2 + COVERAGE_SLACK || hi < FRAC_PI_2 - COVERAGE_SLACK {
            return Err(PatternError::Coverage {
                index,
                lo_deg: lo.to_degrees(),
                hi_deg: hi.to_degrees(),
            });
        }
        Ok(Self {
            index_m,
            samples,
            s_mm,
        })
    }

    /// Uniform gain over [-90, 90] deg.
    pub fn isotropic(index_m: usize, gain_lin: f64, s_mm: Complex64) -> Result<Self, PatternError> {
        Self::new(
            index_m,
            vec![(-FRAC_PI_2, gain_lin), (FRAC_PI_2, gain_lin)],
            s_mm,
        )
    }

    /// `G(phi) = peak * cos(phi)^exponent`, sampled every `step_rad` over
    /// [-90, 90] deg.
    pub fn cosine(
        index_m: usize,
        peak_gain_lin: f64,
        exponent: f64,
        step_rad: f64,
        s_mm: Complex64,
    ) -> Result<Self, PatternError> {
        let n = (std::f64::consts::PI / step_rad).round().max(1.0) as usize;
        let samples = (0..=n)
            .map(|i| {
                let phi = -FRAC_PI_2 + std::f64::consts::PI * i as f64 / n as f64;
                let c = phi.cos().max(0.0);
                (phi, peak_gain_lin * c.powf(exponent))
            })
            .collect();
        Self::new(index_m, samples, s_mm)
    }

    pub fn index_m(&self) -> usize {
        self.index_m
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn s_mm(&self) -> Complex64 {
        self.s_mm
    }

    pub fn with_s_mm(mut self, s_mm: Complex64) -> Result<Self, PatternError> {
        let magnitude = s_mm.norm();
        if !(magnitude <= 1.0) {
            return Err(PatternError::SelfCoefficient {
                index: self.index_m,
                magnitude,
            });
        }
        self.s_mm = s_mm;
        Ok(self)
    }

    pub fn coverage(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Linear gain at `azimuth_rad`, linearly interpolated in linear gain.
    pub fn gain_at(&self, azimuth_rad: f64) -> Result<f64, PatternError> {
        let (lo, hi) = self.coverage();
        if !(azimuth_rad >= lo && azimuth_rad <= hi) {
            return Err(PatternError::OutOfRange {
                index: self.index_m,
                azimuth_deg: azimuth_rad.to_degrees(),
                lo_deg: lo.to_degrees(),
                hi_deg: hi.to_degrees(),
            });
        }
        let s = &self.samples;
        // first sample with azimuth >= query
        let k = s.partition_point(|p| p.0 < azimuth_rad);
        if k == 0 {
            return Ok(s[0].1);
        }
        let (a0, g0) = s[k - 1];
        let (a1, g1) = s[k];
        if a1 == azimuth_rad {
            return Ok(g1);
        }
        let t = (azimuth_rad - a0) / (a1 - a0);
        Ok(g0 + t * (g1 - g0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn interpolates_linearly_and_hits_samples() {
        let p = ElementPattern::new(
            1,
            vec![(-FRAC_PI_2, 0.0), (0.0, 4.0), (FRAC_PI_2, 2.0)],
            z(),
        )
        .unwrap();
        assert_eq!(p.gain_at(0.0).unwrap(), 4.0);
        assert_eq!(p.gain_at(-FRAC_PI_2).unwrap(), 0.0);
        assert_eq!(p.gain_at(FRAC_PI_2).unwrap(), 2.0);
        assert!((p.gain_at(FRAC_PI_2 / 2.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((p.gain_at(-FRAC_PI_2 / 4.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_query_is_an_error() {
        let p = ElementPattern::isotropic(3, 1.0, z()).unwrap();
        assert!(matches!(p.gain_at(1.6), Err(PatternError::OutOfRange { index: 3, .. })));
    }

    #[test]
    fn validation() {
        assert!(matches!(
            ElementPattern::new(1, vec![(-1.0, 1.0), (FRAC_PI_2, 1.0)], z()),
            Err(PatternError::Coverage { .. })
        ));
        assert!(matches!(
            ElementPattern::new(1, vec![(-FRAC_PI_2, 1.0), (-FRAC_PI_2, 1.0), (FRAC_PI_2, 1.0)], z()),
            Err(PatternError::NotIncreasing { .. })
        ));
        assert!(matches!(
            ElementPattern::new(1, vec![(-FRAC_PI_2, -1.0), (FRAC_PI_2, 1.0)], z()),
            Err(PatternError::Gain { .. })
        ));
        assert!(matches!(
            ElementPattern::isotropic(1, 1.0, Complex64::new(0.9, 0.9)),
            Err(PatternError::SelfCoefficient { .. })
        ));
    }

    #[test]
    fn cosine_pattern_peaks_at_broadside() {
        let p = ElementPattern::cosine(1, 3.0, 1.0, 1f64.to_radians(), z()).unwrap();
        assert!((p.gain_at(0.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((p.gain_at(60f64.to_radians()).unwrap() - 1.5).abs() < 1e-3);
        assert_eq!(p.samples().len(), 181);
    }
}
