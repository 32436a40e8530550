//! Far-field extrapolation of the full link matrix from a RIS-only matrix.
//!
//! Each element-to-antenna path is treated as a lossy, delayed two-port:
//!
//! ```text
//! S_side,m = sqrt(1 - |S_mm|^2) * sqrt(G_side * G_m(gamma)) / (4 pi d / lambda) * exp(-j 2 pi d / lambda)
//! ```
//!
//! The first factor accounts for the element mismatch; the Tx and Rx
//! antennas are taken as perfectly matched. The assembled link matrix is
//!
//! ```text
//! [ 0      t^T    0   ]
//! [ t      S_RIS  r   ]
//! [ 0      r^T    0   ]
//! ```
//!
//! with `t` the Tx couplings (angle `beta`) and `r` the Rx couplings
//! (angle `-alpha`).

use crate::geometry::{ElementGeometry, GeometryError, Scenario, Side, SPEED_OF_LIGHT};
use crate::network::{max_singular_value, CMatrix, NetworkError, ScatterMatrix};
use crate::pattern::{ElementPattern, PatternError};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Allowed mismatch between a pattern's `s_mm` and the RIS diagonal.
pub const S_MM_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FarFieldError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("RIS matrix must carry only RIS element roles")]
    NotRisOnly,
    #[error("port count mismatch: {ports} RIS ports, {elements} elements, {patterns} patterns")]
    PortCount {
        ports: usize,
        elements: usize,
        patterns: usize,
    },
    #[error("port {pos}: element {element} is paired with pattern {pattern}")]
    Misaligned {
        pos: usize,
        element: usize,
        pattern: usize,
    },
    #[error("element {index}: pattern s_mm differs from RIS diagonal by {diff:e}")]
    SelfCoefficientMismatch { index: usize, diff: f64 },
    #[error("RIS matrix frequency {ris_hz} Hz does not match scenario frequency {scenario_hz} Hz")]
    FrequencyMismatch { ris_hz: f64, scenario_hz: f64 },
}

/// Coupling entry between one RIS element and the Tx or Rx antenna.
pub fn coupling_coefficient(
    scn: &Scenario,
    pat: &ElementPattern,
    el: &ElementGeometry,
    side: Side,
) -> Result<Complex64, FarFieldError> {
    let lambda = scn.wavelength_m();
    let d = scn.distance(el, side);
    let gamma = scn.azimuth(el, side)?;
    let g_m = pat.gain_at(gamma)?;
    if d < scn.far_field_distance() {
        log::debug!(
            "element {} at {:.3} m from {:?} is inside the far-field distance {:.3} m",
            el.index_m,
            d,
            side,
            scn.far_field_distance()
        );
    }
    let mismatch = (1.0 - pat.s_mm().norm_sqr()).max(0.0).sqrt();
    let magnitude = mismatch * (scn.gain(side) * g_m).sqrt() / (4.0 * PI * d / lambda);
    Ok(Complex64::from_polar(magnitude, -2.0 * PI * d / lambda))
}

/// Elements closer than `2 D^2 / lambda` to either antenna. The
/// approximation is still applied; this only reports.
pub fn far_field_violations(scn: &Scenario) -> Vec<(usize, Side, f64)> {
    let limit = scn.far_field_distance();
    let mut out = Vec::new();
    for el in scn.elements() {
        for side in [Side::Tx, Side::Rx] {
            let d = scn.distance(el, side);
            if d < limit {
                out.push((el.index_m, side, d));
            }
        }
    }
    out
}

/// Build the (N+2)-port link matrix from a RIS-only matrix.
pub fn assemble_full_matrix(
    scn: &Scenario,
    ris: &ScatterMatrix,
    patterns: &[ElementPattern],
) -> Result<ScatterMatrix, FarFieldError> {
    if !ris.is_ris_only() {
        return Err(FarFieldError::NotRisOnly);
    }
    let n = ris.dim();
    if n == 0 && patterns.is_empty() {
        // no surface: nothing couples Tx and Rx
        return Ok(ScatterMatrix::link(CMatrix::zeros(2, 2), ris.freq_hz(), ris.z0_ohm())?);
    }
    let elements = scn.elements();
    if elements.len() != n || patterns.len() != n {
        return Err(FarFieldError::PortCount {
            ports: n,
            elements: elements.len(),
            patterns: patterns.len(),
        });
    }
    let rel = (ris.freq_hz() - scn.freq_hz()).abs() / scn.freq_hz();
    if rel > 1e-9 {
        return Err(FarFieldError::FrequencyMismatch {
            ris_hz: ris.freq_hz(),
            scenario_hz: scn.freq_hz(),
        });
    }
    for (pos, (el, pat)) in elements.iter().zip(patterns).enumerate() {
        if el.index_m != pat.index_m() {
            return Err(FarFieldError::Misaligned {
                pos,
                element: el.index_m,
                pattern: pat.index_m(),
            });
        }
        let diff = (pat.s_mm() - ris.get(pos, pos)).norm();
        if diff > S_MM_TOL {
            return Err(FarFieldError::SelfCoefficientMismatch {
                index: el.index_m,
                diff,
            });
        }
    }
    // sweeps assemble hundreds of times; callers report violations once
    let violations = far_field_violations(scn);
    if !violations.is_empty() {
        log::debug!(
            "{} element/antenna paths are shorter than the far-field distance {:.3} m",
            violations.len(),
            scn.far_field_distance()
        );
    }

    let mut s = CMatrix::zeros(n + 2, n + 2);
    s.view_mut((1, 1), (n, n)).copy_from(ris.entries());
    for (pos, (el, pat)) in elements.iter().zip(patterns).enumerate() {
        let t = coupling_coefficient(scn, pat, el, Side::Tx)?;
        let r = coupling_coefficient(scn, pat, el, Side::Rx)?;
        s[(0, pos + 1)] = t;
        s[(pos + 1, 0)] = t;
        s[(n + 1, pos + 1)] = r;
        s[(pos + 1, n + 1)] = r;
    }
    Ok(ScatterMatrix::link(s, ris.freq_hz(), ris.z0_ohm())?)
}

/// Stand-in for the single full-wave RIS simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingModel {
    /// No mutual coupling; every element has self coefficient `s_mm`.
    Isolated { s_mm: Complex64 },
    /// Mutual coupling `c0 * exp(-dist / rolloff) * exp(-j 2 pi dist / lambda)`.
    ExpDecay {
        s_mm: Complex64,
        c0: f64,
        rolloff_m: f64,
    },
}

/// Largest singular value a synthetic RIS matrix is allowed. A lossless
/// RIS block leaves no room for the power the elements exchange with the
/// Tx and Rx antennas, and the assembled link would come out active.
pub const SYNTH_SIGMA_MAX: f64 = 0.99;

/// Synthetic passive, reciprocal RIS matrix for the given layout.
///
/// If the largest singular value exceeds [`SYNTH_SIGMA_MAX`] the whole
/// matrix is scaled down to it.
pub fn synth_ris_matrix(
    elements: &[ElementGeometry],
    freq_hz: f64,
    z0_ohm: f64,
    model: CouplingModel,
) -> Result<ScatterMatrix, FarFieldError> {
    let n = elements.len();
    let lambda = SPEED_OF_LIGHT / freq_hz;
    let mut s = CMatrix::zeros(n, n);
    let s_mm = match model {
        CouplingModel::Isolated { s_mm } | CouplingModel::ExpDecay { s_mm, .. } => s_mm,
    };
    for i in 0..n {
        s[(i, i)] = s_mm;
    }
    if let CouplingModel::ExpDecay { c0, rolloff_m, .. } = model {
        for i in 0..n {
            for j in i + 1..n {
                let dist = (elements[i].x_m - elements[j].x_m).hypot(elements[i].z_m - elements[j].z_m);
                let v = Complex64::from_polar(
                    c0 * (-dist / rolloff_m).exp(),
                    -2.0 * PI * dist / lambda,
                );
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
    }
    let smax = max_singular_value(&s);
    if smax > SYNTH_SIGMA_MAX {
        s *= Complex64::new(SYNTH_SIGMA_MAX / smax, 0.0);
    }
    let roles = elements
        .iter()
        .map(|e| crate::network::PortRole::RisElement(e.index_m))
        .collect();
    Ok(ScatterMatrix::new(s, freq_hz, z0_ohm, roles)?)
}

/// Patterns whose `s_mm` is taken from the RIS diagonal, all sharing one
/// gain shape.
pub fn patterns_from_diagonal(
    ris: &ScatterMatrix,
    elements: &[ElementGeometry],
    shape: impl Fn(usize, Complex64) -> Result<ElementPattern, PatternError>,
) -> Result<Vec<ElementPattern>, FarFieldError> {
    if ris.dim() != elements.len() {
        return Err(FarFieldError::PortCount {
            ports: ris.dim(),
            elements: elements.len(),
            patterns: elements.len(),
        });
    }
    elements
        .iter()
        .enumerate()
        .map(|(pos, el)| Ok(shape(el.index_m, ris.get(pos, pos))?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{check_passivity, check_reciprocity};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(range: f64, alpha_deg: f64, beta_deg: f64, g_tx: f64) -> Scenario {
        Scenario::new(
            range,
            alpha_deg.to_radians(),
            beta_deg.to_radians(),
            3.55e9,
            g_tx,
            g_tx,
            vec![ElementGeometry::new(1, 0.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn null_pattern_or_full_mismatch_gives_zero() {
        let s = single(2.0, 0.0, 0.0, 12.589);
        let el = s.elements()[0];
        let null = ElementPattern::isotropic(1, 0.0, c(0.0, 0.0)).unwrap();
        assert_eq!(coupling_coefficient(&s, &null, &el, Side::Tx).unwrap().norm(), 0.0);
        let refl = ElementPattern::isotropic(1, 3.0, c(0.0, 1.0)).unwrap();
        assert_eq!(coupling_coefficient(&s, &refl, &el, Side::Tx).unwrap().norm(), 0.0);
    }

    #[test]
    fn friis_magnitude_and_path_phase() {
        let g_tx = 10f64.powf(1.1);
        let g_m = 10f64.powf(0.5);
        let s = single(2.0, 0.0, 0.0, g_tx);
        let el = s.elements()[0];
        let pat = ElementPattern::isotropic(1, g_m, c(0.0, 0.0)).unwrap();
        let v = coupling_coefficient(&s, &pat, &el, Side::Tx).unwrap();
        // independent Friis arithmetic
        let lambda = 299_792_458.0 / 3.55e9;
        let expected = (g_tx * g_m).sqrt() * lambda / (4.0 * PI * 2.0);
        assert!((v.norm() - expected).abs() < 1e-15);
        assert!((v.norm() - 0.02120081176951103).abs() < 1e-12);
        let wrapped = (-2.0 * PI * 2.0 / lambda).rem_euclid(2.0 * PI);
        let got = v.arg().rem_euclid(2.0 * PI);
        assert!((got - wrapped).abs() < 1e-9);
        assert!((v.arg() - 1.99145081374067).abs() < 1e-9);
    }

    #[test]
    fn single_element_assembly() {
        let g_tx = 10f64.powf(1.1);
        let s = single(2.0, 0.0, 0.0, g_tx);
        let ris = ScatterMatrix::ris(CMatrix::zeros(1, 1), 3.55e9, 50.0).unwrap();
        let pats = vec![ElementPattern::isotropic(1, 1.0, c(0.0, 0.0)).unwrap()];
        let full = assemble_full_matrix(&s, &ris, &pats).unwrap();
        assert_eq!(full.dim(), 3);
        let lambda = 299_792_458.0 / 3.55e9;
        let expect = Complex64::from_polar(g_tx.sqrt() * lambda / (8.0 * PI), -4.0 * PI / lambda);
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert!((full.get(i, j) - expect).norm() < 1e-15);
        }
        for (i, j) in [(0, 0), (2, 2), (0, 2), (2, 0)] {
            assert_eq!(full.get(i, j), c(0.0, 0.0));
        }
        assert!(check_reciprocity(&full, 0.0));
    }

    #[test]
    fn assembly_keeps_ris_block_and_checks_alignment() {
        let els: Vec<_> = (0..4)
            .map(|i| ElementGeometry::new(i + 1, 0.04 * i as f64 - 0.06, 0.0))
            .collect();
        let s = Scenario::new(2.0, 0.0, 0.5, 3.55e9, 12.0, 12.0, els.clone()).unwrap();
        let ris = synth_ris_matrix(
            &els,
            3.55e9,
            50.0,
            CouplingModel::ExpDecay {
                s_mm: c(0.3, 0.2),
                c0: 0.2,
                rolloff_m: 0.05,
            },
        )
        .unwrap();
        let pats = patterns_from_diagonal(&ris, &els, |m, smm| {
            ElementPattern::cosine(m, 3.0, 1.0, 1f64.to_radians(), smm)
        })
        .unwrap();
        let full = assemble_full_matrix(&s, &ris, &pats).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(full.get(i + 1, j + 1), ris.get(i, j));
            }
        }
        assert!(check_reciprocity(&full, 1e-12));
        assert!(check_passivity(&full, 1e-6));

        let mut swapped = pats.clone();
        swapped.swap(0, 1);
        assert!(matches!(
            assemble_full_matrix(&s, &ris, &swapped),
            Err(FarFieldError::Misaligned { pos: 0, .. })
        ));
        let mut off = pats.clone();
        off[2] = off[2].clone().with_s_mm(c(0.0, 0.0)).unwrap();
        assert!(matches!(
            assemble_full_matrix(&s, &ris, &off),
            Err(FarFieldError::SelfCoefficientMismatch { index: 3, .. })
        ));
        assert!(matches!(
            assemble_full_matrix(&s, &ris, &pats[..3]),
            Err(FarFieldError::PortCount { .. })
        ));
    }

    #[test]
    fn empty_surface_gives_zero_two_port() {
        let s = single(2.0, 0.0, 0.0, 10.0);
        let ris = ScatterMatrix::ris(CMatrix::zeros(0, 0), 3.55e9, 50.0).unwrap();
        let full = assemble_full_matrix(&s, &ris, &[]).unwrap();
        assert_eq!(full.dim(), 2);
        assert!(full.entries().iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn synth_examples() {
        let els = vec![ElementGeometry::new(1, 0.0, 0.0), ElementGeometry::new(2, 0.04, 0.0)];
        let iso = synth_ris_matrix(&els, 3.55e9, 50.0, CouplingModel::Isolated { s_mm: c(0.0, 0.0) }).unwrap();
        assert!(iso.entries().iter().all(|z| z.norm() == 0.0));
        let exp = synth_ris_matrix(
            &els,
            3.55e9,
            50.0,
            CouplingModel::ExpDecay {
                s_mm: c(0.3, 0.0),
                c0: 0.2,
                rolloff_m: 0.05,
            },
        )
        .unwrap();
        assert!((exp.get(0, 1).norm() - 0.08986579282344431).abs() < 1e-15);
        assert!(check_reciprocity(&exp, 0.0));
    }

    #[test]
    fn exp_decay_off_diagonal_magnitude() {
        let els = [ElementGeometry::new(1, 0.0, 0.0), ElementGeometry::new(2, 0.04, 0.0)];
        let model = CouplingModel::ExpDecay {
            s_mm: c(0.3, 0.0),
            c0: 0.2,
            rolloff_m: 0.05,
        };
        let ris = synth_ris_matrix(&els, 3.55e9, 50.0, model).unwrap();
        // 0.2 * exp(-0.04 / 0.05)
        assert!((ris.get(0, 1).norm() - 0.0898657928234443).abs() < 1e-15);
        let lambda = SPEED_OF_LIGHT / 3.55e9;
        let phase = (ris.get(0, 1).arg() + 2.0 * PI * 0.04 / lambda).rem_euclid(2.0 * PI);
        assert!(phase.min(2.0 * PI - phase) < 1e-12);
        assert_eq!(ris.get(0, 1), ris.get(1, 0));
        assert_eq!(ris.get(0, 0), c(0.3, 0.0));
    }

    #[test]
    fn synth_rescales_active_matrices() {
        let els: Vec<_> = (0..6).map(|i| ElementGeometry::new(i + 1, 0.01 * i as f64, 0.0)).collect();
        let s = synth_ris_matrix(
            &els,
            3.55e9,
            50.0,
            CouplingModel::ExpDecay {
                s_mm: c(0.9, 0.0),
                c0: 0.9,
                rolloff_m: 1.0,
            },
        )
        .unwrap();
        assert!(check_passivity(&s, 1e-12));
        assert!((max_singular_value(s.entries()) - SYNTH_SIGMA_MAX).abs() < 1e-12);
    }
}
