//! Bistatic radar cross section of the loaded surface over a receiver-angle
//! sweep, and the flat-plate reference of the same size.

use crate::farfield::{assemble_full_matrix, FarFieldError};
use crate::geometry::{GeometryError, Scenario};
use crate::network::{reduce_loaded, NetworkError, ScatterMatrix};
use crate::pattern::ElementPattern;
use crate::varactor::{LoadError, LoadVector, VaractorModel};
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Floor used for `sigma = 0` points.
pub const DBSM_FLOOR: f64 = -100.0;

#[derive(Debug, Error)]
pub enum BrcsError {
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("empty alpha grid")]
    EmptyGrid,
    #[error("alpha grid must be strictly increasing")]
    UnsortedGrid,
    #[error("curves do not share the same alpha grid")]
    GridMismatch,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// Scenario parameters a curve was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFingerprint {
    pub beta_rad: f64,
    pub range_m: f64,
    pub freq_hz: f64,
    /// Hex digest of the load vector, absent for reference curves.
    pub loads_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrcsCurve {
    /// (alpha rad, sigma dBsm), alpha strictly increasing.
    pub points: Vec<(f64, f64)>,
    pub label: String,
    pub fingerprint: CurveFingerprint,
}

impl BrcsCurve {
    /// Point with the largest sigma; first one on ties.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .fold(None, |best: Option<(f64, f64)>, p| match best {
                Some(b) if b.1 >= p.1 => Some(b),
                _ => Some(p),
            })
    }

    /// Value at the grid point closest to `alpha_rad`.
    pub fn value_near(&self, alpha_rad: f64) -> Option<f64> {
        self.points
            .iter()
            .min_by(|a, b| (a.0 - alpha_rad).abs().total_cmp(&(b.0 - alpha_rad).abs()))
            .map(|p| p.1)
    }
}

pub fn to_dbsm(sigma_m2: f64) -> f64 {
    if sigma_m2 > 0.0 {
        (10.0 * sigma_m2.log10()).max(DBSM_FLOOR)
    } else {
        DBSM_FLOOR
    }
}

/// Bistatic radar equation solved for sigma (m^2):
/// `sigma = (4 pi)^3 d_tx^2 d_rx^2 |S_RxTx|^2 / (G_tx G_rx lambda^2)`.
pub fn brcs_from_coupling(
    s_rx_tx: Complex64,
    d_tx_m: f64,
    d_rx_m: f64,
    g_tx_lin: f64,
    g_rx_lin: f64,
    lambda_m: f64,
) -> f64 {
    let four_pi_cubed = (4.0 * PI).powi(3);
    four_pi_cubed * d_tx_m.powi(2) * d_rx_m.powi(2) * s_rx_tx.norm_sqr()
        / (g_tx_lin * g_rx_lin * lambda_m * lambda_m)
}

/// Forward bistatic radar equation: received/transmitted power ratio.
pub fn radar_equation(sigma_m2: f64, d_tx_m: f64, d_rx_m: f64, g_tx_lin: f64, g_rx_lin: f64, lambda_m: f64) -> f64 {
    g_tx_lin * g_rx_lin * lambda_m * lambda_m * sigma_m2
        / ((4.0 * PI).powi(3) * d_tx_m.powi(2) * d_rx_m.powi(2))
}

fn check_grid(alphas: &[f64]) -> Result<(), BrcsError> {
    if alphas.is_empty() {
        return Err(BrcsError::EmptyGrid);
    }
    if alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(BrcsError::UnsortedGrid);
    }
    Ok(())
}

fn hash_loads(caps: &LoadVector) -> String {
    let mut h = Sha256::new();
    for c in caps.as_slice() {
        h.update(c.to_bits().to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// `[start, start + step, ..., end]` in degrees, converted to radians.
pub fn alpha_grid_deg(start: f64, end: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || end < start {
        return Vec::new();
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| (start + step * i as f64).to_radians()).collect()
}

fn sigma_at(
    scn: &Scenario,
    ris: &ScatterMatrix,
    patterns: &[ElementPattern],
    caps: &LoadVector,
    model: &VaractorModel,
    alpha: f64,
) -> Result<f64, BrcsError> {
    let at = scn.with_alpha(alpha)?;
    let full = assemble_full_matrix(&at, ris, patterns)?;
    let loads = caps.to_reflections(full.freq_hz(), full.z0_ohm(), model)?;
    let red = reduce_loaded(&full, &loads)?;
    let r = scn.range_m();
    Ok(brcs_from_coupling(
        red.get(1, 0),
        r,
        r,
        scn.gain_tx(),
        scn.gain_rx(),
        scn.wavelength_m(),
    ))
}

/// BRCS of the loaded surface for each receiver angle in `alphas` (rad),
/// with the Tx fixed at the scenario's beta.
pub fn sweep_rx_angle(
    scn: &Scenario,
    ris: &ScatterMatrix,
    patterns: &[ElementPattern],
    caps: &LoadVector,
    model: &VaractorModel,
    alphas: &[f64],
) -> Result<BrcsCurve, BrcsError> {
    check_grid(alphas)?;
    let eval = |a: &f64| sigma_at(scn, ris, patterns, caps, model, *a).map(|s| (*a, to_dbsm(s)));
    #[cfg(feature = "parallel")]
    let points: Result<Vec<_>, _> = {
        use rayon::prelude::*;
        alphas.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points: Result<Vec<_>, _> = alphas.iter().map(eval).collect();
    Ok(BrcsCurve {
        points: points?,
        label: "ris".into(),
        fingerprint: CurveFingerprint {
            beta_rad: scn.beta_rad(),
            range_m: scn.range_m(),
            freq_hz: scn.freq_hz(),
            loads_hash: Some(hash_loads(caps)),
        },
    })
}

/// Physical-optics BRCS of a flat rectangular plate, `w` along x:
/// `4 pi (A cos(beta))^2 / lambda^2 * sinc^2(k w / 2 (sin(alpha) - sin(beta)))`.
pub fn flat_reflector_sigma(width_m: f64, height_m: f64, lambda_m: f64, beta_rad: f64, alpha_rad: f64) -> f64 {
    let area = width_m * height_m;
    let k = 2.0 * PI / lambda_m;
    let x = k * width_m / 2.0 * (alpha_rad.sin() - beta_rad.sin());
    let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
    4.0 * PI * (area * beta_rad.cos()).powi(2) / (lambda_m * lambda_m) * sinc * sinc
}

pub fn flat_reflector_reference(
    width_m: f64,
    height_m: f64,
    lambda_m: f64,
    beta_rad: f64,
    alphas: &[f64],
) -> Result<BrcsCurve, BrcsError> {
    check_grid(alphas)?;
    Ok(BrcsCurve {
        points: alphas
            .iter()
            .map(|&a| (a, to_dbsm(flat_reflector_sigma(width_m, height_m, lambda_m, beta_rad, a))))
            .collect(),
        label: "reflector".into(),
        fingerprint: CurveFingerprint {
            beta_rad,
            range_m: f64::INFINITY,
            freq_hz: crate::geometry::SPEED_OF_LIGHT / lambda_m,
            loads_hash: None,
        },
    })
}

/// Like C's `%.6g`.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // exponent after rounding to 6 digits (9.999995 -> 1.00000e1)
    let s = format!("{:.5e}", v);
    let (mant, e) = s.split_once('e').expect("LowerExp has an exponent");
    let e: i32 = e.parse().expect("integer exponent");
    if (-4..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        let fixed = format!("{:.*}", decimals, v);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}{:02}", trim_zeros(mant), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Write `alpha_deg,<label>,...` rows to any writer.
pub fn write_csv<W: Write>(curves: &[BrcsCurve], mut out: W) -> Result<(), std::io::Error> {
    let mut header = String::from("alpha_deg");
    for c in curves {
        header.push(',');
        header.push_str(&c.label);
    }
    writeln!(out, "{header}")?;
    if let Some(first) = curves.first() {
        for (i, (alpha, _)) in first.points.iter().enumerate() {
            let mut row = fmt_sig6(alpha.to_degrees());
            for c in curves {
                row.push(',');
                row.push_str(&fmt_sig6(c.points[i].1));
            }
            writeln!(out, "{row}")?;
        }
    }
    Ok(())
}

pub fn export_csv(curves: &[BrcsCurve], path: &Path) -> Result<(), BrcsError> {
    if let Some(first) = curves.first() {
        for c in curves {
            if c.points.len() != first.points.len()
                || c.points.iter().zip(&first.points).any(|(a, b)| a.0 != b.0)
            {
                return Err(BrcsError::GridMismatch);
            }
        }
    }
    let io = |source| BrcsError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(curves, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

/// Parse a file written by [`write_csv`] back into `(labels, rows)`, where
/// each row is `[alpha_deg, value...]`.
pub fn read_csv<R: BufRead>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>), BrcsError> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l.map_err(|e| BrcsError::Csv { line: 1, msg: e.to_string() })?,
        None => return Err(BrcsError::Csv { line: 1, msg: "empty file".into() }),
    };
    let labels: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| BrcsError::Csv { line: i + 1, msg: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| BrcsError::Csv { line: i + 1, msg: e.to_string() })?;
        if row.len() != labels.len() + 1 {
            return Err(BrcsError::Csv {
                line: i + 1,
                msg: format!("expected {} columns, got {}", labels.len() + 1, row.len()),
            });
        }
        rows.push(row);
    }
    Ok((labels, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: f64 = 299_792_458.0 / 3.55e9;

    #[test]
    fn zero_coupling_gives_zero_sigma() {
        assert_eq!(brcs_from_coupling(Complex64::new(0.0, 0.0), 2.0, 2.0, 10.0, 10.0, LAMBDA), 0.0);
        assert_eq!(to_dbsm(0.0), DBSM_FLOOR);
    }

    #[test]
    fn distance_scaling_is_fourth_power() {
        let s = Complex64::new(0.003, -0.001);
        let a = brcs_from_coupling(s, 2.0, 3.0, 10.0, 12.0, LAMBDA);
        let b = brcs_from_coupling(s, 4.0, 6.0, 10.0, 12.0, LAMBDA);
        assert!((b / a - 16.0).abs() < 1e-12);
    }

    #[test]
    fn worked_sigma_value() {
        let g = 10f64.powf(1.1);
        let sigma = brcs_from_coupling(Complex64::new(0.01, 0.0), 2.0, 2.0, g, g, LAMBDA);
        // (4 pi)^3 * 16 * 1e-4 / (G^2 lambda^2), evaluated independently
        let oracle = 1984.4017075391884 * 16.0 * 1e-4 / (g * g * LAMBDA * LAMBDA);
        assert!((sigma - oracle).abs() / oracle < 1e-12);
        assert!((sigma - 2.8090849629720105).abs() < 1e-9);
    }

    #[test]
    fn plate_specular_value() {
        let beta = 30f64.to_radians();
        let s = flat_reflector_sigma(0.308, 0.096, LAMBDA, beta, beta);
        let closed = 4.0 * PI * (0.308 * 0.096 * beta.cos()).powi(2) / (LAMBDA * LAMBDA);
        assert!((s - closed).abs() / closed < 1e-12);
        assert!((s - 1.155394582207982).abs() < 1e-9);
        assert!((to_dbsm(s) - 0.627303267481548).abs() < 1e-9);
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(-90.0), "-90");
        assert_eq!(fmt_sig6(1.23456789), "1.23457");
        assert_eq!(fmt_sig6(-100.0), "-100");
        assert_eq!(fmt_sig6(123456789.0), "1.23457e+08");
        assert_eq!(fmt_sig6(0.000012345678), "1.23457e-05");
        assert_eq!(fmt_sig6(0.00012345678), "0.000123457");
        assert_eq!(fmt_sig6(9.9999996), "10");
        assert_eq!(fmt_sig6(-3.0000001), "-3");
    }

    #[test]
    fn grid_helpers() {
        let g = alpha_grid_deg(-90.0, 90.0, 1.0);
        assert_eq!(g.len(), 181);
        assert!(alpha_grid_deg(1.0, 0.0, 1.0).is_empty());
        assert!(matches!(flat_reflector_reference(0.3, 0.1, LAMBDA, 0.0, &[]), Err(BrcsError::EmptyGrid)));
        assert!(matches!(
            flat_reflector_reference(0.3, 0.1, LAMBDA, 0.0, &[0.1, 0.0]),
            Err(BrcsError::UnsortedGrid)
        ));
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let curve = BrcsCurve {
            points: vec![(0.0, -12.3456789), (0.1, 4.0)],
            label: "ris".into(),
            fingerprint: CurveFingerprint {
                beta_rad: 0.5,
                range_m: 2.0,
                freq_hz: 3.55e9,
                loads_hash: None,
            },
        };
        let mut a = Vec::new();
        write_csv(std::slice::from_ref(&curve), &mut a).unwrap();
        let text = String::from_utf8(a.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("alpha_deg,ris\n"));
        let mut b = Vec::new();
        write_csv(std::slice::from_ref(&curve), &mut b).unwrap();
        assert_eq!(a, b);
        let (labels, rows) = read_csv(&a[..]).unwrap();
        assert_eq!(labels, vec!["ris"]);
        assert!((rows[0][1] + 12.3457).abs() < 1e-12);
        assert!((rows[1][0] - 0.1f64.to_degrees()).abs() < 1e-4);
    }
}
