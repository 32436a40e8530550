//! Touchstone v1 (`.sNp`) reader and writer for S-parameters.
//!
//! Supported: `!` comments, the `#` option line (frequency unit, parameter
//! `S`, format `RI`/`MA`/`DB`, `R <z0>`), values spread over continuation
//! lines, and the v1 two-port column order `S11 S21 S12 S22`. Matrices with
//! three or more ports are row-major. Version 2 files are rejected.

use crate::network::{CMatrix, ScatterMatrix};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TouchstoneError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("Touchstone 2.0 files are not supported (line {line}); export as v1 .sNp")]
    Version2 { line: usize },
    #[error("cannot infer the port count from file name {0:?} (expected *.sNp)")]
    Extension(String),
    #[error("no frequency point within {tol_hz} Hz of {requested_hz} Hz; available: {available:?}")]
    FrequencyNotFound {
        requested_hz: f64,
        tol_hz: f64,
        available: Vec<f64>,
    },
    #[error("document has no frequency points")]
    Empty,
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

fn perr(line: usize, msg: impl Into<String>) -> TouchstoneError {
    TouchstoneError::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    RI,
    /// Linear magnitude, angle in degrees.
    MA,
    /// 20 log10 magnitude, angle in degrees.
    DB,
}

impl DataFormat {
    fn name(self) -> &'static str {
        match self {
            DataFormat::RI => "RI",
            DataFormat::MA => "MA",
            DataFormat::DB => "DB",
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            DataFormat::RI => Complex64::new(a, b),
            DataFormat::MA => Complex64::from_polar(a, b.to_radians()),
            DataFormat::DB => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            DataFormat::RI => (z.re, z.im),
            DataFormat::MA => (z.norm(), z.arg().to_degrees()),
            DataFormat::DB => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionLine {
    pub freq_unit: FreqUnit,
    pub format: DataFormat,
    pub z0_ohm: f64,
}

impl Default for OptionLine {
    /// Touchstone defaults: `# GHz S MA R 50`.
    fn default() -> Self {
        Self {
            freq_unit: FreqUnit::GHz,
            format: DataFormat::MA,
            z0_ohm: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPoint {
    pub freq_hz: f64,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneDocument {
    pub n_ports: usize,
    pub options: OptionLine,
    pub points: Vec<FrequencyPoint>,
}

fn parse_option_line(body: &str, line: usize) -> Result<OptionLine, TouchstoneError> {
    let mut opts = OptionLine::default();
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => opts.freq_unit = FreqUnit::Hz,
            "KHZ" => opts.freq_unit = FreqUnit::KHz,
            "MHZ" => opts.freq_unit = FreqUnit::MHz,
            "GHZ" => opts.freq_unit = FreqUnit::GHz,
            "S" => {}
            "Y" | "Z" | "H" | "G" => {
                return Err(perr(line, format!("parameter type {tok} not supported, only S")))
            }
            "RI" => opts.format = DataFormat::RI,
            "MA" => opts.format = DataFormat::MA,
            "DB" => opts.format = DataFormat::DB,
            "R" => {
                let v = tokens
                    .next()
                    .ok_or_else(|| perr(line, "option R needs a value"))?;
                let z0: f64 = v
                    .parse()
                    .map_err(|_| perr(line, format!("bad reference impedance {v:?}")))?;
                if !(z0 > 0.0 && z0.is_finite()) {
                    return Err(perr(line, format!("reference impedance must be positive, got {z0}")));
                }
                opts.z0_ohm = z0;
            }
            _ => return Err(perr(line, format!("unknown option {tok:?}"))),
        }
    }
    Ok(opts)
}

/// Parse Touchstone v1 text holding an `n_ports`-port network.
pub fn parse_touchstone(text: &str, n_ports: usize) -> Result<TouchstoneDocument, TouchstoneError> {
    if n_ports == 0 {
        return Err(perr(0, "port count must be at least 1"));
    }
    let per_point = 1 + 2 * n_ports * n_ports;
    let mut options: Option<OptionLine> = None;
    let mut raw_points: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut current: Option<(usize, Vec<f64>)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            return Err(TouchstoneError::Version2 { line });
        }
        if let Some(body) = content.strip_prefix('#') {
            if current.is_some() || !raw_points.is_empty() {
                return Err(perr(line, "option line after data"));
            }
            // only the first option line counts
            if options.is_none() {
                options = Some(parse_option_line(body, line)?);
            }
            continue;
        }
        for tok in content.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| perr(line, format!("not a number: {tok:?}")))?;
            if !v.is_finite() {
                return Err(perr(line, format!("non-finite value {tok:?}")));
            }
            let (_, vals) = current.get_or_insert_with(|| (line, Vec::with_capacity(per_point)));
            if vals.len() == per_point {
                return Err(perr(
                    line,
                    format!("too many values: a {n_ports}-port point has {}", per_point),
                ));
            }
            vals.push(v);
        }
        if let Some((start, vals)) = current.take() {
            if vals.len() == per_point {
                raw_points.push((start, vals));
            } else {
                current = Some((start, vals));
            }
        }
    }
    if let Some((start, vals)) = current {
        return Err(perr(
            start,
            format!(
                "point has {} values, a {n_ports}-port point needs {per_point}",
                vals.len()
            ),
        ));
    }

    let options = options.unwrap_or_default();
    let scale = options.freq_unit.scale();
    let mut points = Vec::with_capacity(raw_points.len());
    let mut last_freq = f64::NEG_INFINITY;
    for (line, vals) in raw_points {
        let freq_hz = vals[0] * scale;
        if !(freq_hz > last_freq) {
            return Err(perr(line, format!("frequency {} is not increasing", vals[0])));
        }
        last_freq = freq_hz;
        let mut m = CMatrix::zeros(n_ports, n_ports);
        for k in 0..n_ports * n_ports {
            let z = options.format.decode(vals[1 + 2 * k], vals[2 + 2 * k]);
            let (row, col) = if n_ports == 2 {
                // S11 S21 S12 S22
                (k % 2, k / 2)
            } else {
                (k / n_ports, k % n_ports)
            };
            m[(row, col)] = z;
        }
        points.push(FrequencyPoint { freq_hz, matrix: m });
    }
    Ok(TouchstoneDocument {
        n_ports,
        options,
        points,
    })
}

/// Port count from a `.sNp` file name.
pub fn ports_from_extension(path: &Path) -> Result<usize, TouchstoneError> {
    let name = path.to_string_lossy().to_string();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| TouchstoneError::Extension(name.clone()))?;
    ext.strip_prefix('s')
        .and_then(|r| r.strip_suffix('p'))
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .ok_or(TouchstoneError::Extension(name))
}

/// Read a `.sNp` file, taking the port count from its extension.
pub fn read_touchstone(path: &Path) -> Result<TouchstoneDocument, TouchstoneError> {
    let n = ports_from_extension(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| TouchstoneError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_touchstone(&text, n)
}

/// Serialize as Touchstone v1 in the document's data format, frequencies in
/// Hz. RI output re-parses to identical values.
pub fn write_touchstone(doc: &TouchstoneDocument, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for l in c.lines() {
            let _ = writeln!(out, "! {l}");
        }
    }
    let fmt = doc.options.format;
    let _ = writeln!(out, "# {} S {} R {}", FreqUnit::Hz.name(), fmt.name(), doc.options.z0_ohm);
    let n = doc.n_ports;
    for p in &doc.points {
        let mut pairs = Vec::with_capacity(n * n);
        if n == 2 {
            for (r, c) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                pairs.push(fmt.encode(p.matrix[(r, c)]));
            }
        } else {
            for r in 0..n {
                for c in 0..n {
                    pairs.push(fmt.encode(p.matrix[(r, c)]));
                }
            }
        }
        let _ = write!(out, "{:e}", p.freq_hz);
        if n <= 2 {
            for (a, b) in &pairs {
                let _ = write!(out, " {a:e} {b:e}");
            }
            out.push('\n');
        } else {
            // each matrix row starts a new line, at most 4 pairs per line
            let mut first = true;
            for row in pairs.chunks(n) {
                for chunk in row.chunks(4) {
                    if !first {
                        out.push_str("   ");
                    }
                    first = false;
                    for (a, b) in chunk {
                        let _ = write!(out, " {a:e} {b:e}");
                    }
                    out.push('\n');
                }
            }
        }
    }
    out
}

/// Matrix at `f_hz`, within `tol_hz`; no interpolation. Ports get RIS roles.
pub fn matrix_at_frequency(
    doc: &TouchstoneDocument,
    f_hz: f64,
    tol_hz: f64,
) -> Result<ScatterMatrix, TouchstoneError> {
    if doc.points.is_empty() {
        return Err(TouchstoneError::Empty);
    }
    let best = doc
        .points
        .iter()
        .min_by(|a, b| (a.freq_hz - f_hz).abs().total_cmp(&(b.freq_hz - f_hz).abs()))
        .expect("non-empty");
    if (best.freq_hz - f_hz).abs() > tol_hz {
        return Err(TouchstoneError::FrequencyNotFound {
            requested_hz: f_hz,
            tol_hz,
            available: doc.points.iter().map(|p| p.freq_hz).collect(),
        });
    }
    ScatterMatrix::ris(best.matrix.clone(), best.freq_hz, doc.options.z0_ohm)
        .map_err(|e| perr(0, e.to_string()))
}

/// Single-point document for a matrix.
pub fn document_from_matrix(s: &ScatterMatrix, format: DataFormat) -> TouchstoneDocument {
    TouchstoneDocument {
        n_ports: s.dim(),
        options: OptionLine {
            freq_unit: FreqUnit::Hz,
            format,
            z0_ohm: s.z0_ohm(),
        },
        points: vec![FrequencyPoint {
            freq_hz: s.freq_hz(),
            matrix: s.entries().clone(),
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_port_formats_agree() {
        let ma = parse_touchstone("# GHz S MA R 50\n3.55 0.5 90\n", 1).unwrap();
        let ri = parse_touchstone("# GHz S RI R 50\n3.55 0.0 0.5\n", 1).unwrap();
        let db = parse_touchstone("# GHz S DB R 50\n3.55 -6.0206 90\n", 1).unwrap();
        assert_eq!(ma.points[0].freq_hz, 3.55e9);
        let j05 = Complex64::new(0.0, 0.5);
        assert!((ma.points[0].matrix[(0, 0)] - j05).norm() < 1e-15);
        assert_eq!(ri.points[0].matrix[(0, 0)], j05);
        let d = db.points[0].matrix[(0, 0)];
        assert!((d.norm() - 0.4999999950079739).abs() < 1e-12);
        assert!((d.arg().to_degrees() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn defaults_apply_without_option_line() {
        let d = parse_touchstone("1.0 0.25 0\n", 1).unwrap();
        assert_eq!(d.options, OptionLine::default());
        assert_eq!(d.points[0].freq_hz, 1e9);
        assert!((d.points[0].matrix[(0, 0)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_port_column_order() {
        let d = parse_touchstone("# Hz S RI R 50\n1 11 0 21 0 12 0 22 0\n", 2).unwrap();
        let m = &d.points[0].matrix;
        assert_eq!(m[(0, 0)].re, 11.0);
        assert_eq!(m[(1, 0)].re, 21.0);
        assert_eq!(m[(0, 1)].re, 12.0);
        assert_eq!(m[(1, 1)].re, 22.0);
    }

    #[test]
    fn three_port_row_major_with_continuations() {
        let text = "! comment\n# MHz S RI R 75\n100 11 0 12 0 13 0 ! row 1\n 21 0 22 0 23 0\n 31 0 32 0 33 0\n";
        let d = parse_touchstone(text, 3).unwrap();
        assert_eq!(d.options.z0_ohm, 75.0);
        assert_eq!(d.points[0].freq_hz, 100e6);
        let m = &d.points[0].matrix;
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m[(r, c)].re, (10 * (r + 1) + c + 1) as f64);
            }
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_touchstone("# GHz S RI\n1 0 0\n0.5 0 0\n", 1).unwrap_err();
        assert_eq!(e, perr(3, "frequency 0.5 is not increasing"));
        assert!(matches!(
            parse_touchstone("# GHz Z RI\n1 0 0\n", 1),
            Err(TouchstoneError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz S XX\n", 1),
            Err(TouchstoneError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_touchstone("[Version] 2.0\n", 1),
            Err(TouchstoneError::Version2 { line: 1 })
        ));
        assert!(matches!(
            parse_touchstone("# GHz S RI\n1 0 0 0\n", 1),
            Err(TouchstoneError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz S RI\n1 0\n", 1),
            Err(TouchstoneError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn extension_inference() {
        assert_eq!(ports_from_extension(Path::new("ris.s14p")).unwrap(), 14);
        assert_eq!(ports_from_extension(Path::new("a/b.S2P")).unwrap(), 2);
        assert!(ports_from_extension(Path::new("ris.txt")).is_err());
        assert!(ports_from_extension(Path::new("ris.s0p")).is_err());
    }

    #[test]
    fn frequency_lookup() {
        let d = parse_touchstone("# GHz S RI\n3.55 0.1 0\n", 1).unwrap();
        assert!(matrix_at_frequency(&d, 3.55e9, 0.0).is_ok());
        assert!(matches!(
            matrix_at_frequency(&d, 3.6e9, 1e6),
            Err(TouchstoneError::FrequencyNotFound { .. })
        ));
        assert!(matrix_at_frequency(&d, 3.5500001e9, 1e3).is_ok());
    }
}
