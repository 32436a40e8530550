//! Link geometry: transmitter/receiver placement relative to the surface and
//! the per-element distances and azimuth angles derived from it.
//!
//! Angles are measured from the surface normal in the azimuth (x-y) plane.
//! The Tx sits at `(R sin(beta), R cos(beta), 0)`. The Rx angle `alpha` is
//! stored as drawn (positive on the opposite side of the normal) and enters
//! the formulas as `-alpha`.

use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Tolerance before an out-of-range `asin` argument is treated as an error
/// rather than round-off.
const ASIN_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("range must be positive and finite, got {0} m")]
    Range(f64),
    #[error("frequency must be positive and finite, got {0} Hz")]
    Frequency(f64),
    #[error("{which} gain must be positive and finite, got {value}")]
    Gain { which: &'static str, value: f64 },
    #[error("{which} angle {deg} deg is not in front of the surface (|angle| < 90 deg)")]
    Angle { which: &'static str, deg: f64 },
    #[error("scenario has no RIS elements")]
    NoElements,
    #[error("element {0} appears more than once")]
    DuplicateElement(usize),
    #[error("element {index}: coordinates must be finite")]
    Coordinates { index: usize },
    #[error("sin(gamma) = {value} for element {index} is outside [-1, 1]")]
    Asin { index: usize, value: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
}

/// Which end of the link a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Tx,
    Rx,
}

/// Position of one RIS element in the surface plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    /// 1-based element number, matching the RIS port order.
    pub index_m: usize,
    pub x_m: f64,
    pub z_m: f64,
}

impl ElementGeometry {
    pub fn new(index_m: usize, x_m: f64, z_m: f64) -> Self {
        Self { index_m, x_m, z_m }
    }
}

/// Physical size of the surface, used for the far-field check and the flat
/// reflector reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoardSize {
    pub width_m: f64,
    pub height_m: f64,
}

impl BoardSize {
    pub fn diagonal(&self) -> f64 {
        self.width_m.hypot(self.height_m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    range_m: f64,
    alpha_rad: f64,
    beta_rad: f64,
    freq_hz: f64,
    gain_tx: f64,
    gain_rx: f64,
    elements: Vec<ElementGeometry>,
    board: Option<BoardSize>,
}

impl Scenario {
    /// Gains are linear. Angles in radians.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        range_m: f64,
        alpha_rad: f64,
        beta_rad: f64,
        freq_hz: f64,
        gain_tx: f64,
        gain_rx: f64,
        elements: Vec<ElementGeometry>,
    ) -> Result<Self, GeometryError> {
        if !(range_m > 0.0 && range_m.is_finite()) {
            return Err(GeometryError::Range(range_m));
        }
        if !(freq_hz > 0.0 && freq_hz.is_finite()) {
            return Err(GeometryError::Frequency(freq_hz));
        }
        for (which, value) in [("Tx", gain_tx), ("Rx", gain_rx)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GeometryError::Gain { which, value });
            }
        }
        check_angle("alpha", alpha_rad)?;
        check_angle("beta", beta_rad)?;
        if elements.is_empty() {
            return Err(GeometryError::NoElements);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e.index_m) {
                return Err(GeometryError::DuplicateElement(e.index_m));
            }
            if !(e.x_m.is_finite() && e.z_m.is_finite()) {
                return Err(GeometryError::Coordinates { index: e.index_m });
            }
        }
        Ok(Self {
            range_m,
            alpha_rad,
            beta_rad,
            freq_hz,
            gain_tx,
            gain_rx,
            elements,
            board: None,
        })
    }

    pub fn with_board(mut self, board: BoardSize) -> Self {
        self.board = Some(board);
        self
    }

    /// Same scenario with the receiver moved to `alpha_rad`.
    pub fn with_alpha(&self, alpha_rad: f64) -> Result<Self, GeometryError> {
        check_angle("alpha", alpha_rad)?;
        Ok(Self {
            alpha_rad,
            ..self.clone()
        })
    }

    pub fn with_beta(&self, beta_rad: f64) -> Result<Self, GeometryError> {
        check_angle("beta", beta_rad)?;
        Ok(Self {
            beta_rad,
            ..self.clone()
        })
    }

    pub fn with_range(&self, range_m: f64) -> Result<Self, GeometryError> {
        if !(range_m > 0.0 && range_m.is_finite()) {
            return Err(GeometryError::Range(range_m));
        }
        Ok(Self {
            range_m,
            ..self.clone()
        })
    }

    pub fn with_elements(&self, elements: Vec<ElementGeometry>) -> Result<Self, GeometryError> {
        let mut s = Self::new(
            self.range_m,
            self.alpha_rad,
            self.beta_rad,
            self.freq_hz,
            self.gain_tx,
            self.gain_rx,
            elements,
        )?;
        s.board = self.board;
        Ok(s)
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }
    pub fn alpha_rad(&self) -> f64 {
        self.alpha_rad
    }
    pub fn beta_rad(&self) -> f64 {
        self.beta_rad
    }
    pub fn freq_hz(&self) -> f64 {
        self.freq_hz
    }
    pub fn gain_tx(&self) -> f64 {
        self.gain_tx
    }
    pub fn gain_rx(&self) -> f64 {
        self.gain_rx
    }
    pub fn elements(&self) -> &[ElementGeometry] {
        &self.elements
    }
    pub fn board(&self) -> Option<BoardSize> {
        self.board
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.freq_hz
    }

    pub fn gain(&self, side: Side) -> f64 {
        match side {
            Side::Tx => self.gain_tx,
            Side::Rx => self.gain_rx,
        }
    }

    /// Angle entering the geometry formulas: `beta` for Tx, `-alpha` for Rx.
    pub fn side_angle(&self, side: Side) -> f64 {
        match side {
            Side::Tx => self.beta_rad,
            Side::Rx => -self.alpha_rad,
        }
    }

    /// `d = sqrt(R^2 + x^2 + z^2 - 2 x R sin(angle))`.
    pub fn distance(&self, el: &ElementGeometry, side: Side) -> f64 {
        let r = self.range_m;
        let s = self.side_angle(side).sin();
        (r * r + el.x_m * el.x_m + el.z_m * el.z_m - 2.0 * el.x_m * r * s).sqrt()
    }

    /// Azimuth from element to antenna: `sin(gamma) = (R sin(angle) - x) / d`.
    pub fn azimuth(&self, el: &ElementGeometry, side: Side) -> Result<f64, GeometryError> {
        let d = self.distance(el, side);
        let arg = (self.range_m * self.side_angle(side).sin() - el.x_m) / d;
        if !arg.is_finite() || arg.abs() > 1.0 + ASIN_SLACK {
            return Err(GeometryError::Asin {
                index: el.index_m,
                value: arg,
            });
        }
        Ok(arg.clamp(-1.0, 1.0).asin())
    }

    /// Distance to the element at position `pos` in port order.
    pub fn distance_to_element(&self, pos: usize, side: Side) -> f64 {
        self.distance(&self.elements[pos], side)
    }

    pub fn azimuth_to_element(&self, pos: usize, side: Side) -> Result<f64, GeometryError> {
        self.azimuth(&self.elements[pos], side)
    }

    /// Diagonal of the board if known, else of the element bounding box.
    pub fn aperture_diagonal(&self) -> f64 {
        if let Some(b) = self.board {
            return b.diagonal();
        }
        let (mut x0, mut x1, mut z0, mut z1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for e in &self.elements {
            x0 = x0.min(e.x_m);
            x1 = x1.max(e.x_m);
            z0 = z0.min(e.z_m);
            z1 = z1.max(e.z_m);
        }
        (x1 - x0).hypot(z1 - z0)
    }

    /// Classic `2 D^2 / lambda` far-field distance of the surface.
    pub fn far_field_distance(&self) -> f64 {
        let d = self.aperture_diagonal();
        2.0 * d * d / self.wavelength_m()
    }
}

fn check_angle(which: &'static str, rad: f64) -> Result<(), GeometryError> {
    if !(rad.is_finite() && rad.abs() < FRAC_PI_2) {
        return Err(GeometryError::Angle {
            which,
            deg: rad.to_degrees(),
        });
    }
    Ok(())
}

/// Rectangular element grid centered on the origin (plus offsets).
///
/// Elements are numbered row by row from the lowest `z`, left to right in
/// `x`, so a 2x7 grid yields 1..=7 on the bottom row and 8..=14 on top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    pub pitch_x_m: f64,
    pub pitch_z_m: f64,
    pub offset_x_m: f64,
    pub offset_z_m: f64,
}

impl GridLayout {
    pub fn elements(&self) -> Result<Vec<ElementGeometry>, GeometryError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(GeometryError::Grid(format!(
                "{} rows x {} cols has no elements",
                self.rows, self.cols
            )));
        }
        if !(self.pitch_x_m >= 0.0 && self.pitch_z_m >= 0.0) {
            return Err(GeometryError::Grid("pitches must be non-negative".into()));
        }
        let cx = (self.cols - 1) as f64 / 2.0;
        let cz = (self.rows - 1) as f64 / 2.0;
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(ElementGeometry {
                    index_m: r * self.cols + c + 1,
                    x_m: (c as f64 - cx) * self.pitch_x_m + self.offset_x_m,
                    z_m: (r as f64 - cz) * self.pitch_z_m + self.offset_z_m,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn scn(range: f64, alpha: f64, beta: f64, els: Vec<ElementGeometry>) -> Scenario {
        Scenario::new(range, deg(alpha), deg(beta), 3.55e9, 12.589, 12.589, els).unwrap()
    }

    /// Euclidean oracle: antenna in the azimuth plane, element at (x, 0, z).
    fn euclid(range: f64, angle: f64, x: f64, z: f64) -> f64 {
        let a = [range * angle.sin(), range * angle.cos(), 0.0];
        let e = [x, 0.0, z];
        ((a[0] - e[0]).powi(2) + (a[1] - e[1]).powi(2) + (a[2] - e[2]).powi(2)).sqrt()
    }

    #[test]
    fn element_at_origin_sees_range_and_side_angle() {
        let s = scn(2.0, 12.0, 30.0, vec![ElementGeometry::new(1, 0.0, 0.0)]);
        let e = &s.elements()[0];
        assert_eq!(s.distance(e, Side::Tx), 2.0);
        assert_eq!(s.distance(e, Side::Rx), 2.0);
        assert_eq!(s.azimuth(e, Side::Tx).unwrap(), deg(30.0));
        assert_eq!(s.azimuth(e, Side::Rx).unwrap(), -deg(12.0));
    }

    #[test]
    fn distance_matches_euclidean_oracle() {
        let s = scn(2.0, 0.0, 30.0, vec![ElementGeometry::new(1, 0.1, 0.0)]);
        let d = s.distance_to_element(0, Side::Tx);
        assert!((d - euclid(2.0, deg(30.0), 0.1, 0.0)).abs() < 1e-14);
        assert!((d - 1.9519221295943134).abs() < 1e-12);

        let s = scn(2.0, 0.0, 30.0, vec![ElementGeometry::new(1, 0.1, 0.0348)]);
        let d = s.distance_to_element(0, Side::Rx);
        assert!((d - euclid(2.0, 0.0, 0.1, 0.0348)).abs() < 1e-14);
        assert!((d - 2.0028007988814065).abs() < 1e-12);
    }

    #[test]
    fn rx_distance_uses_negated_alpha() {
        let s = scn(3.0, 25.0, 10.0, vec![ElementGeometry::new(1, 0.07, -0.02)]);
        let d = s.distance_to_element(0, Side::Rx);
        assert!((d - euclid(3.0, -deg(25.0), 0.07, -0.02)).abs() < 1e-14);
    }

    #[test]
    fn azimuth_matches_planar_angle_oracle() {
        let s = scn(2.0, 0.0, 30.0, vec![ElementGeometry::new(1, 0.1, 0.0)]);
        let g = s.azimuth_to_element(0, Side::Tx).unwrap();
        let v = (2.0 * deg(30.0).sin() - 0.1, 2.0 * deg(30.0).cos());
        assert!((g - v.0.atan2(v.1)).abs() < 1e-14);
        assert!((g.to_degrees() - 27.457076095938262).abs() < 1e-10);
    }

    #[test]
    fn parallel_ray_limit() {
        let s = scn(1e6, 0.0, 30.0, vec![ElementGeometry::new(1, 0.154, 0.0)]);
        let g = s.azimuth_to_element(0, Side::Tx).unwrap();
        assert!((g - deg(30.0)).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_scenarios() {
        let els = vec![ElementGeometry::new(1, 0.0, 0.0)];
        assert!(Scenario::new(0.0, 0.0, 0.0, 1e9, 1.0, 1.0, els.clone()).is_err());
        assert!(Scenario::new(1.0, deg(90.0), 0.0, 1e9, 1.0, 1.0, els.clone()).is_err());
        assert!(Scenario::new(1.0, 0.0, 0.0, 1e9, 0.0, 1.0, els.clone()).is_err());
        assert!(Scenario::new(1.0, 0.0, 0.0, 1e9, 1.0, 1.0, vec![]).is_err());
        let dup = vec![ElementGeometry::new(1, 0.0, 0.0), ElementGeometry::new(1, 0.1, 0.0)];
        assert_eq!(
            Scenario::new(1.0, 0.0, 0.0, 1e9, 1.0, 1.0, dup),
            Err(GeometryError::DuplicateElement(1))
        );
    }

    #[test]
    fn grid_reproduces_board_layout() {
        let g = GridLayout {
            rows: 2,
            cols: 7,
            pitch_x_m: 0.040,
            pitch_z_m: 0.040,
            offset_x_m: 0.0,
            offset_z_m: 0.0,
        };
        let els = g.elements().unwrap();
        assert_eq!(els.len(), 14);
        let xmin = els.iter().map(|e| e.x_m).fold(f64::MAX, f64::min);
        let xmax = els.iter().map(|e| e.x_m).fold(f64::MIN, f64::max);
        assert!((xmax - xmin - 0.240).abs() < 1e-12);
        assert_eq!(els[0].index_m, 1);
        assert!(els[0].z_m < els[7].z_m);
        assert_eq!(els[7].x_m, els[0].x_m);
    }

    #[test]
    fn far_field_distance_of_board() {
        let s = scn(2.0, 0.0, 30.0, vec![ElementGeometry::new(1, 0.0, 0.0)]).with_board(BoardSize {
            width_m: 0.308,
            height_m: 0.096,
        });
        assert!((s.far_field_distance() - 2.4648).abs() < 1e-3);
    }
}
