//! Per-element pattern table (CSV).
//!
//! ```text
//! m,azimuth_deg,gain_dbi
//! 1,-90,-inf
//! 1,0,5
//! 1,90,-inf
//! m,smm_re,smm_im
//! 1,0.31,-0.12
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Rows may appear in
//! any order inside their section; `-inf` marks a pattern null.

use crate::pattern::{ElementPattern, PatternError};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

pub const GAIN_HEADER: &str = "m,azimuth_deg,gain_dbi";
pub const SMM_HEADER: &str = "m,smm_re,smm_im";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternTableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("element {index}: duplicate azimuth {azimuth_deg} deg")]
    DuplicateAzimuth { index: usize, azimuth_deg: f64 },
    #[error("element {0}: missing s_mm row")]
    MissingSelfCoefficient(usize),
    #[error("element {0}: s_mm given but no gain rows")]
    OrphanSelfCoefficient(usize),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("pattern table has no elements")]
    Empty,
}

#[derive(PartialEq)]
enum Section {
    None,
    Gain,
    Smm,
}

fn field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, PatternTableError> {
    tok.trim().parse().map_err(|_| PatternTableError::Parse {
        line,
        msg: format!("bad {what} {:?}", tok.trim()),
    })
}

/// Parse the table into patterns sorted by element number.
pub fn parse_pattern_table(text: &str) -> Result<Vec<ElementPattern>, PatternTableError> {
    let mut section = Section::None;
    let mut gains: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    let mut smm: BTreeMap<usize, Complex64> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let normalized: String = l.chars().filter(|c| !c.is_whitespace()).collect();
        if normalized.eq_ignore_ascii_case(GAIN_HEADER) {
            section = Section::Gain;
            continue;
        }
        if normalized.eq_ignore_ascii_case(SMM_HEADER) {
            section = Section::Smm;
            continue;
        }
        let cols: Vec<&str> = l.split(',').collect();
        if cols.len() != 3 {
            return Err(PatternTableError::Parse {
                line,
                msg: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let m: usize = field(cols[0], line, "element index")?;
        match section {
            Section::None => {
                return Err(PatternTableError::Parse {
                    line,
                    msg: format!("data before a {GAIN_HEADER:?} or {SMM_HEADER:?} header"),
                })
            }
            Section::Gain => {
                let az: f64 = field(cols[1], line, "azimuth")?;
                let db: f64 = field(cols[2], line, "gain")?;
                if !az.is_finite() || db.is_nan() || db == f64::INFINITY {
                    return Err(PatternTableError::Parse {
                        line,
                        msg: "azimuth must be finite and gain finite or -inf".into(),
                    });
                }
                gains.entry(m).or_default().push((az, db));
            }
            Section::Smm => {
                let re: f64 = field(cols[1], line, "s_mm real part")?;
                let im: f64 = field(cols[2], line, "s_mm imaginary part")?;
                if !(re.is_finite() && im.is_finite()) {
                    return Err(PatternTableError::Parse {
                        line,
                        msg: "s_mm must be finite".into(),
                    });
                }
                if smm.insert(m, Complex64::new(re, im)).is_some() {
                    return Err(PatternTableError::Parse {
                        line,
                        msg: format!("second s_mm row for element {m}"),
                    });
                }
            }
        }
    }
    if gains.is_empty() {
        return Err(PatternTableError::Empty);
    }
    if let Some(&m) = smm.keys().find(|m| !gains.contains_key(m)) {
        return Err(PatternTableError::OrphanSelfCoefficient(m));
    }
    let mut out = Vec::with_capacity(gains.len());
    for (m, mut rows) in gains {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(PatternTableError::DuplicateAzimuth {
                index: m,
                azimuth_deg: w[0].0,
            });
        }
        let s = *smm
            .get(&m)
            .ok_or(PatternTableError::MissingSelfCoefficient(m))?;
        let samples = rows
            .into_iter()
            .map(|(az, db)| (az.to_radians(), 10f64.powf(db / 10.0)))
            .collect();
        out.push(ElementPattern::new(m, samples, s)?);
    }
    Ok(out)
}

/// Write patterns in the table format, gains in dBi.
pub fn write_pattern_table(patterns: &[ElementPattern]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{GAIN_HEADER}");
    for p in patterns {
        for &(az, g) in p.samples() {
            let db = if g > 0.0 { 10.0 * g.log10() } else { f64::NEG_INFINITY };
            let _ = writeln!(out, "{},{},{}", p.index_m(), az.to_degrees(), db);
        }
    }
    let _ = writeln!(out, "{SMM_HEADER}");
    for p in patterns {
        let _ = writeln!(out, "{},{},{}", p.index_m(), p.s_mm().re, p.s_mm().im);
    }
    out
}
