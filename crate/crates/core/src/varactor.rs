//! Varactor loads: capacitance bounds, load vectors and the mapping from
//! capacitance to port reflection coefficient.

use crate::network::{NetworkError, ReflectionVector};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoadError {
    #[error("invalid capacitance bounds: c_min = {c_min:e} F, c_max = {c_max:e} F (need 0 < c_min < c_max)")]
    Bounds { c_min: f64, c_max: f64 },
    #[error("element {index}: capacitance {value:e} F outside [{c_min:e}, {c_max:e}] F")]
    OutOfBounds {
        index: usize,
        value: f64,
        c_min: f64,
        c_max: f64,
    },
    #[error("varactor parasitics must be non-negative and finite")]
    Parasitics,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Achievable capacitance range of the varactors, in farads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadBounds {
    c_min_f: f64,
    c_max_f: f64,
}

impl LoadBounds {
    pub fn new(c_min_f: f64, c_max_f: f64) -> Result<Self, LoadError> {
        if !(c_min_f > 0.0 && c_min_f < c_max_f && c_max_f.is_finite()) {
            return Err(LoadError::Bounds {
                c_min: c_min_f,
                c_max: c_max_f,
            });
        }
        Ok(Self { c_min_f, c_max_f })
    }

    /// SMV2201-class range, 0.23 to 2.1 pF.
    pub fn smv2201() -> Self {
        Self {
            c_min_f: 0.23e-12,
            c_max_f: 2.1e-12,
        }
    }

    pub fn c_min(&self) -> f64 {
        self.c_min_f
    }

    pub fn c_max(&self) -> f64 {
        self.c_max_f
    }

    pub fn contains(&self, c: f64) -> bool {
        c >= self.c_min_f && c <= self.c_max_f
    }

    pub fn clamp(&self, c: f64) -> f64 {
        c.clamp(self.c_min_f, self.c_max_f)
    }

    /// Map `u` in [0, 1] onto the range.
    pub fn from_unit(&self, u: f64) -> f64 {
        self.clamp(self.c_min_f + u.clamp(0.0, 1.0) * (self.c_max_f - self.c_min_f))
    }

    pub fn to_unit(&self, c: f64) -> f64 {
        ((c - self.c_min_f) / (self.c_max_f - self.c_min_f)).clamp(0.0, 1.0)
    }
}

/// Per-element capacitances, all inside the bounds they were built with.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    caps_f: Vec<f64>,
}

impl LoadVector {
    pub fn new(caps_f: Vec<f64>, bounds: &LoadBounds) -> Result<Self, LoadError> {
        for (index, &value) in caps_f.iter().enumerate() {
            if !bounds.contains(value) {
                return Err(LoadError::OutOfBounds {
                    index,
                    value,
                    c_min: bounds.c_min(),
                    c_max: bounds.c_max(),
                });
            }
        }
        Ok(Self { caps_f })
    }

    pub fn uniform(n: usize, c_f: f64, bounds: &LoadBounds) -> Result<Self, LoadError> {
        Self::new(vec![c_f; n], bounds)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.caps_f
    }

    pub fn len(&self) -> usize {
        self.caps_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps_f.is_empty()
    }

    pub fn to_reflections(
        &self,
        freq_hz: f64,
        z0_ohm: f64,
        model: &VaractorModel,
    ) -> Result<ReflectionVector, LoadError> {
        Ok(ReflectionVector::new(
            self.caps_f
                .iter()
                .map(|&c| cap_to_gamma(c, freq_hz, z0_ohm, model))
                .collect(),
        )?)
    }
}

/// Series R-L parasitics of the varactor package. Defaults are ideal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VaractorModel {
    pub series_resistance_ohm: f64,
    pub series_inductance_h: f64,
}

impl VaractorModel {
    pub fn new(series_resistance_ohm: f64, series_inductance_h: f64) -> Result<Self, LoadError> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !(ok(series_resistance_ohm) && ok(series_inductance_h)) {
            return Err(LoadError::Parasitics);
        }
        Ok(Self {
            series_resistance_ohm,
            series_inductance_h,
        })
    }

    pub fn impedance(&self, c_f: f64, freq_hz: f64) -> Complex64 {
        let w = 2.0 * PI * freq_hz;
        Complex64::new(
            self.series_resistance_ohm,
            w * self.series_inductance_h - 1.0 / (w * c_f),
        )
    }
}

/// `(Z_L - Z0) / (Z_L + Z0)` with `Z_L = R_s + j(w L_s - 1/(w C))`.
pub fn cap_to_gamma(c_f: f64, freq_hz: f64, z0_ohm: f64, model: &VaractorModel) -> Complex64 {
    let z = model.impedance(c_f, freq_hz);
    (z - z0_ohm) / (z + z0_ohm)
}

/// Derivative of `cap_to_gamma` with respect to the capacitance.
pub(crate) fn dgamma_dcap(c_f: f64, freq_hz: f64, z0_ohm: f64, model: &VaractorModel) -> Complex64 {
    let w = 2.0 * PI * freq_hz;
    let z = model.impedance(c_f, freq_hz);
    // dZ/dC = j / (w C^2)
    let dz = Complex64::new(0.0, 1.0 / (w * c_f * c_f));
    let denom = z + z0_ohm;
    dz * 2.0 * z0_ohm / (denom * denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F: f64 = 3.55e9;

    #[test]
    fn ideal_loads_are_lossless() {
        let m = VaractorModel::default();
        for c in [0.23e-12, 0.5e-12, 1e-12, 2.1e-12, 1e-9] {
            assert!((cap_to_gamma(c, F, 50.0, &m).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_capacitance_shorts() {
        let g = cap_to_gamma(1.0, F, 50.0, &VaractorModel::default());
        assert!((g - Complex64::new(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn one_picofarad_at_operating_frequency() {
        let g = cap_to_gamma(1e-12, F, 50.0, &VaractorModel::default());
        // hand evaluation: X = -1/(2 pi f C) = -44.83237833574517 ohm
        let x = -1.0 / (2.0 * PI * F * 1e-12);
        assert!((x + 44.83237833574517).abs() < 1e-10);
        let num = Complex64::new(-50.0, x);
        let den = Complex64::new(50.0, x);
        assert!((g - num / den).norm() < 1e-15);
        assert!((g.re + 0.10866167164928699).abs() < 1e-12);
        assert!((g.im + 0.9940787901944104).abs() < 1e-12);
        assert!((g.arg().to_degrees() + 96.23817255703982).abs() < 1e-9);
    }

    #[test]
    fn lossy_model_stays_inside_unit_circle() {
        let m = VaractorModel::new(2.0, 0.4e-9).unwrap();
        let g = cap_to_gamma(1e-12, F, 50.0, &m);
        assert!(g.norm() < 1.0);
        assert!(VaractorModel::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn bounds_and_vectors() {
        assert!(LoadBounds::new(2e-12, 1e-12).is_err());
        assert!(LoadBounds::new(0.0, 1e-12).is_err());
        let b = LoadBounds::smv2201();
        assert!(LoadVector::new(vec![0.22e-12], &b).is_err());
        assert!(LoadVector::new(vec![0.23e-12, 2.1e-12], &b).is_ok());
        assert_eq!(b.from_unit(0.0), b.c_min());
        assert_eq!(b.from_unit(1.0), b.c_max());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let m = VaractorModel::new(1.0, 0.2e-9).unwrap();
        for c in [0.3e-12, 0.9e-12, 1.7e-12] {
            let h = 1e-6 * c;
            let fd = (cap_to_gamma(c + h, F, 50.0, &m) - cap_to_gamma(c - h, F, 50.0, &m)) / (2.0 * h);
            let an = dgamma_dcap(c, F, 50.0, &m);
            assert!((fd - an).norm() / an.norm() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn phase_decreases_with_capacitance(a in 0.23e-12f64..2.1e-12, b in 0.23e-12f64..2.1e-12) {
            prop_assume!((a - b).abs() > 1e-16);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let m = VaractorModel::default();
            // phase stays within (-pi, 0) on this range, so no wrap handling needed
            let p_lo = cap_to_gamma(lo, F, 50.0, &m).arg();
            let p_hi = cap_to_gamma(hi, F, 50.0, &m).arg();
            prop_assert!(p_lo < 0.0 && p_hi > -PI);
            prop_assert!(p_hi < p_lo);
        }
    }
}
