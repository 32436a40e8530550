//! Scenario configuration: flat `key = value unit` lines.
//!
//! ```text
//! # 7x2 layout
//! freq       = 3.55 GHz
//! range      = 2 m
//! alpha      = 0 deg
//! beta       = 30 deg
//! gain_tx_db = 11 dB
//! gain_rx_db = 11 dB
//! grid.rows  = 2
//! grid.cols  = 7
//! grid.pitch_x = 40 mm
//! grid.pitch_z = 40 mm
//! bounds.c_min = 0.23 pF
//! bounds.c_max = 2.1 pF
//! ```
//!
//! Dimensional values must carry a unit. `#` starts a comment. Keys may
//! appear once, except `element`, which lists explicit coordinates
//! (`element = 3 0.04 -0.02 m`) and replaces the grid generator.

use crate::farfield::CouplingModel;
use crate::geometry::{BoardSize, ElementGeometry, GeometryError, GridLayout, Scenario};
use crate::optimize::OptimizeOptions;
use crate::varactor::{LoadBounds, LoadError, VaractorModel};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key {key:?} given twice")]
    Duplicate { line: usize, key: String },
    #[error("missing mandatory key {0:?}")]
    Missing(&'static str),
    #[error("line {line}: {key} needs a unit ({expected})")]
    MissingUnit {
        line: usize,
        key: String,
        expected: &'static str,
    },
    #[error("line {line}: {key}: unknown unit {unit:?} (expected {expected})")]
    BadUnit {
        line: usize,
        key: String,
        unit: String,
        expected: &'static str,
    },
    #[error("line {line}: {key}: {msg}")]
    Value { line: usize, key: String, msg: String },
    #[error("no elements: give grid.rows/grid.cols or element lines")]
    NoElements,
    #[error("both grid.* and element lines given; pick one layout")]
    LayoutConflict,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Load(#[from] LoadError),
}

/// Where the RIS-only scatter matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum RisSource {
    Touchstone { path: PathBuf, freq_tol_hz: f64 },
    Synthetic(CouplingModel),
}

/// Where the element patterns come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternSource {
    Table(PathBuf),
    /// `cos^exponent` shape with the given peak gain, `s_mm` from the RIS diagonal.
    Cosine {
        peak_gain_lin: f64,
        exponent: f64,
        step_rad: f64,
    },
    Isotropic { gain_lin: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub alpha_min_deg: f64,
    pub alpha_max_deg: f64,
    pub alpha_step_deg: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        // |alpha| < 90 deg is a scenario invariant, so stop one step short
        Self {
            alpha_min_deg: -89.0,
            alpha_max_deg: 89.0,
            alpha_step_deg: 1.0,
        }
    }
}

/// Fully resolved configuration. Relative paths are kept as written; the
/// caller resolves them against the config file location.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub z0_ohm: f64,
    pub bounds: LoadBounds,
    pub varactor: VaractorModel,
    pub ris: Option<RisSource>,
    pub patterns: Option<PatternSource>,
    pub optimizer: OptimizeOptions,
    pub sweep: SweepGrid,
    pub out: Option<PathBuf>,
}

struct Entry {
    line: usize,
    value: String,
}

const FREQ_UNITS: &str = "Hz, kHz, MHz, GHz";
const LEN_UNITS: &str = "m, cm, mm";
const ANGLE_UNITS: &str = "deg, rad";
const DB_UNITS: &str = "dB, dBi";
const CAP_UNITS: &str = "F, nF, pF, fF";
const IND_UNITS: &str = "H, nH, pH";
const OHM_UNITS: &str = "ohm";

const KEYS: &[&str] = &[
    "freq",
    "range",
    "alpha",
    "beta",
    "gain_tx_db",
    "gain_rx_db",
    "z0",
    "grid.rows",
    "grid.cols",
    "grid.pitch_x",
    "grid.pitch_z",
    "grid.offset_x",
    "grid.offset_z",
    "board.width",
    "board.height",
    "bounds.c_min",
    "bounds.c_max",
    "varactor.rs",
    "varactor.ls",
    "ris.file",
    "ris.freq_tol",
    "ris.model",
    "ris.s_mm",
    "ris.c0",
    "ris.rolloff",
    "patterns.file",
    "patterns.model",
    "patterns.peak_gain",
    "patterns.exponent",
    "patterns.step",
    "optimizer.starts",
    "optimizer.max_evals",
    "optimizer.seed",
    "optimizer.polish",
    "optimizer.gradient",
    "sweep.alpha_min",
    "sweep.alpha_max",
    "sweep.alpha_step",
    "out",
];

/// Decimal exponent of `unit`, or `None` if it is not one of `expected`.
/// Degrees are handled separately.
fn unit_exponent(unit: &str, expected: &'static str) -> Option<i32> {
    let e = match (expected, unit) {
        (FREQ_UNITS, "Hz") => 0,
        (FREQ_UNITS, "kHz") => 3,
        (FREQ_UNITS, "MHz") => 6,
        (FREQ_UNITS, "GHz") => 9,
        (LEN_UNITS, "m") => 0,
        (LEN_UNITS, "cm") => -2,
        (LEN_UNITS, "mm") => -3,
        (ANGLE_UNITS, "deg" | "rad") => 0,
        (DB_UNITS, "dB" | "dBi") => 0,
        (CAP_UNITS, "F") => 0,
        (CAP_UNITS, "nF") => -9,
        (CAP_UNITS, "pF") => -12,
        (CAP_UNITS, "fF") => -15,
        (IND_UNITS, "H") => 0,
        (IND_UNITS, "nH") => -9,
        (IND_UNITS, "pH") => -12,
        (OHM_UNITS, "ohm" | "Ohm") => 0,
        _ => return None,
    };
    Some(e)
}

/// `num` scaled by the unit. Decimal prefixes are applied in the text so
/// `0.23 pF` yields the same double as `0.23e-12`.
fn scaled(num: &str, unit: &str, exp: i32) -> Option<f64> {
    let x: f64 = num.parse().ok()?;
    if unit == "deg" {
        return Some(x.to_radians());
    }
    if exp == 0 || !x.is_finite() {
        return Some(x);
    }
    if num.contains(['e', 'E']) {
        return Some(x * 10f64.powi(exp));
    }
    format!("{num}e{exp}").parse().ok()
}

struct Doc {
    map: BTreeMap<String, Entry>,
    elements: Vec<Entry>,
}

impl Doc {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        let mut elements = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: format!("expected `key = value`, got {l:?}"),
            })?;
            let key = k.trim().to_string();
            let value = v.trim().to_string();
            if value.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("{key} has no value"),
                });
            }
            if key == "element" {
                elements.push(Entry { line, value });
                continue;
            }
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey { line, key });
            }
            if map.contains_key(&key) {
                return Err(ConfigError::Duplicate { line, key });
            }
            map.insert(key, Entry { line, value });
        }
        Ok(Self { map, elements })
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        self.map.get(key)
    }

    fn value_err(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Value {
            line: self.map.get(key).map_or(0, |e| e.line),
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// Number followed by a mandatory unit from `expected`.
    fn quantity(&self, key: &str, expected: &'static str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.raw(key) else {
            return Ok(None);
        };
        parse_quantity(&e.value, e.line, key, expected).map(Some)
    }

    fn required(&self, key: &'static str, expected: &'static str) -> Result<f64, ConfigError> {
        self.quantity(key, expected)?.ok_or(ConfigError::Missing(key))
    }

    fn plain<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.raw(key) else {
            return Ok(None);
        };
        e.value.parse().map(Some).map_err(|_| ConfigError::Value {
            line: e.line,
            key: key.into(),
            msg: format!("cannot parse {:?}", e.value),
        })
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        let Some(e) = self.raw(key) else {
            return Ok(None);
        };
        match e.value.as_str() {
            "on" | "true" | "yes" => Ok(Some(true)),
            "off" | "false" | "no" => Ok(Some(false)),
            other => Err(ConfigError::Value {
                line: e.line,
                key: key.into(),
                msg: format!("expected on/off, got {other:?}"),
            }),
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.raw(key).map(|e| e.value.as_str())
    }
}

fn parse_quantity(value: &str, line: usize, key: &str, expected: &'static str) -> Result<f64, ConfigError> {
    let mut toks = value.split_whitespace();
    let num = toks.next().unwrap_or("");
    let bad_num = || ConfigError::Value {
        line,
        key: key.into(),
        msg: format!("cannot parse number {num:?}"),
    };
    num.parse::<f64>().map_err(|_| bad_num())?;
    let unit = toks.next().ok_or_else(|| ConfigError::MissingUnit {
        line,
        key: key.into(),
        expected,
    })?;
    if let Some(extra) = toks.next() {
        return Err(ConfigError::Value {
            line,
            key: key.into(),
            msg: format!("unexpected trailing {extra:?}"),
        });
    }
    let exp = unit_exponent(unit, expected).ok_or_else(|| ConfigError::BadUnit {
        line,
        key: key.into(),
        unit: unit.into(),
        expected,
    })?;
    scaled(num, unit, exp).ok_or_else(bad_num)
}

fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn parse_element(e: &Entry) -> Result<ElementGeometry, ConfigError> {
    let toks: Vec<&str> = e.value.split_whitespace().collect();
    let bad = |msg: String| ConfigError::Value {
        line: e.line,
        key: "element".into(),
        msg,
    };
    if toks.len() == 3 {
        return Err(ConfigError::MissingUnit {
            line: e.line,
            key: "element".into(),
            expected: LEN_UNITS,
        });
    }
    if toks.len() != 4 {
        return Err(bad(format!("expected `index x z unit`, got {:?}", e.value)));
    }
    let index: usize = toks[0]
        .parse()
        .map_err(|_| bad(format!("bad element index {:?}", toks[0])))?;
    let exp = unit_exponent(toks[3], LEN_UNITS).ok_or_else(|| ConfigError::BadUnit {
        line: e.line,
        key: "element".into(),
        unit: toks[3].into(),
        expected: LEN_UNITS,
    })?;
    let coord = |t: &str| -> Result<f64, ConfigError> {
        scaled(t, toks[3], exp).ok_or_else(|| bad(format!("bad coordinate {t:?}")))
    };
    Ok(ElementGeometry::new(index, coord(toks[1])?, coord(toks[2])?))
}

fn layout(doc: &Doc) -> Result<Vec<ElementGeometry>, ConfigError> {
    let has_grid = KEYS
        .iter()
        .filter(|k| k.starts_with("grid."))
        .any(|k| doc.has(k));
    if has_grid && !doc.elements.is_empty() {
        return Err(ConfigError::LayoutConflict);
    }
    if !doc.elements.is_empty() {
        return doc.elements.iter().map(parse_element).collect();
    }
    if !has_grid {
        return Err(ConfigError::NoElements);
    }
    let rows: usize = doc.plain("grid.rows")?.ok_or(ConfigError::Missing("grid.rows"))?;
    let cols: usize = doc.plain("grid.cols")?.ok_or(ConfigError::Missing("grid.cols"))?;
    if rows == 0 || cols == 0 {
        return Err(ConfigError::NoElements);
    }
    let pitch = |key: &'static str, needed: bool| -> Result<f64, ConfigError> {
        match doc.quantity(key, LEN_UNITS)? {
            Some(v) => Ok(v),
            None if needed => Err(ConfigError::Missing(key)),
            None => Ok(0.0),
        }
    };
    let grid = GridLayout {
        rows,
        cols,
        pitch_x_m: pitch("grid.pitch_x", cols > 1)?,
        pitch_z_m: pitch("grid.pitch_z", rows > 1)?,
        offset_x_m: doc.quantity("grid.offset_x", LEN_UNITS)?.unwrap_or(0.0),
        offset_z_m: doc.quantity("grid.offset_z", LEN_UNITS)?.unwrap_or(0.0),
    };
    Ok(grid.elements()?)
}

fn ris_source(doc: &Doc) -> Result<Option<RisSource>, ConfigError> {
    let file = doc.text("ris.file");
    let model = doc.text("ris.model");
    match (file, model) {
        (Some(_), Some(_)) => Err(doc.value_err("ris.model", "ris.file and ris.model are exclusive")),
        (Some(p), None) => Ok(Some(RisSource::Touchstone {
            path: PathBuf::from(p),
            freq_tol_hz: doc.quantity("ris.freq_tol", FREQ_UNITS)?.unwrap_or(1e3),
        })),
        (None, Some(m)) => {
            let s_mm = match doc.raw("ris.s_mm") {
                None => Complex64::new(0.0, 0.0),
                Some(e) => {
                    let parts: Vec<f64> = e
                        .value
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|_| doc.value_err("ris.s_mm", "expected `re im`"))?;
                    if parts.len() != 2 {
                        return Err(doc.value_err("ris.s_mm", "expected `re im`"));
                    }
                    Complex64::new(parts[0], parts[1])
                }
            };
            if s_mm.norm() > 1.0 {
                return Err(doc.value_err("ris.s_mm", "|s_mm| must not exceed 1"));
            }
            match m {
                "isolated" => Ok(Some(RisSource::Synthetic(CouplingModel::Isolated { s_mm }))),
                "exp_decay" => {
                    let c0: f64 = doc.plain("ris.c0")?.ok_or(ConfigError::Missing("ris.c0"))?;
                    let rolloff_m = doc.required("ris.rolloff", LEN_UNITS)?;
                    if !(c0 >= 0.0 && rolloff_m > 0.0) {
                        return Err(doc.value_err("ris.c0", "need c0 >= 0 and rolloff > 0"));
                    }
                    Ok(Some(RisSource::Synthetic(CouplingModel::ExpDecay {
                        s_mm,
                        c0,
                        rolloff_m,
                    })))
                }
                other => Err(doc.value_err(
                    "ris.model",
                    format!("unknown model {other:?} (isolated, exp_decay)"),
                )),
            }
        }
        (None, None) => Ok(None),
    }
}

fn pattern_source(doc: &Doc) -> Result<Option<PatternSource>, ConfigError> {
    match (doc.text("patterns.file"), doc.text("patterns.model")) {
        (Some(_), Some(_)) => Err(doc.value_err(
            "patterns.model",
            "patterns.file and patterns.model are exclusive",
        )),
        (Some(p), None) => Ok(Some(PatternSource::Table(PathBuf::from(p)))),
        (None, Some("cosine")) => Ok(Some(PatternSource::Cosine {
            peak_gain_lin: db_to_lin(doc.required("patterns.peak_gain", DB_UNITS)?),
            exponent: doc.plain("patterns.exponent")?.unwrap_or(1.0),
            step_rad: doc
                .quantity("patterns.step", ANGLE_UNITS)?
                .unwrap_or(1f64.to_radians()),
        })),
        (None, Some("isotropic")) => Ok(Some(PatternSource::Isotropic {
            gain_lin: db_to_lin(doc.required("patterns.peak_gain", DB_UNITS)?),
        })),
        (None, Some(other)) => Err(doc.value_err(
            "patterns.model",
            format!("unknown model {other:?} (cosine, isotropic)"),
        )),
        (None, None) => Ok(None),
    }
}

/// Parse and validate a scenario configuration.
pub fn load_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let doc = Doc::parse(text)?;

    let freq = doc.required("freq", FREQ_UNITS)?;
    let range = doc.required("range", LEN_UNITS)?;
    let alpha = doc.required("alpha", ANGLE_UNITS)?;
    let beta = doc.required("beta", ANGLE_UNITS)?;
    let g_tx = db_to_lin(doc.required("gain_tx_db", DB_UNITS)?);
    let g_rx = db_to_lin(doc.required("gain_rx_db", DB_UNITS)?);
    let z0 = doc.quantity("z0", OHM_UNITS)?.unwrap_or(50.0);
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(doc.value_err("z0", "must be positive"));
    }

    let elements = layout(&doc)?;
    let mut scenario = Scenario::new(range, alpha, beta, freq, g_tx, g_rx, elements)?;
    match (doc.quantity("board.width", LEN_UNITS)?, doc.quantity("board.height", LEN_UNITS)?) {
        (Some(w), Some(h)) => {
            if !(w > 0.0 && h > 0.0) {
                return Err(doc.value_err("board.width", "board dimensions must be positive"));
            }
            scenario = scenario.with_board(BoardSize {
                width_m: w,
                height_m: h,
            });
        }
        (None, None) => {}
        (Some(_), None) => return Err(ConfigError::Missing("board.height")),
        (None, Some(_)) => return Err(ConfigError::Missing("board.width")),
    }

    let bounds = LoadBounds::new(
        doc.required("bounds.c_min", CAP_UNITS)?,
        doc.required("bounds.c_max", CAP_UNITS)?,
    )?;
    let varactor = VaractorModel::new(
        doc.quantity("varactor.rs", OHM_UNITS)?.unwrap_or(0.0),
        doc.quantity("varactor.ls", IND_UNITS)?.unwrap_or(0.0),
    )?;

    let mut optimizer = OptimizeOptions::default();
    if let Some(v) = doc.plain("optimizer.starts")? {
        optimizer.starts = v;
    }
    if let Some(v) = doc.plain("optimizer.max_evals")? {
        optimizer.max_evals = v;
    }
    if let Some(v) = doc.plain("optimizer.seed")? {
        optimizer.seed = v;
    }
    if let Some(v) = doc.flag("optimizer.polish")? {
        optimizer.polish = v;
    }
    if let Some(v) = doc.flag("optimizer.gradient")? {
        optimizer.gradient_refine = v;
    }
    if optimizer.starts == 0 || optimizer.max_evals == 0 {
        return Err(doc.value_err("optimizer.starts", "starts and max_evals must be at least 1"));
    }

    let mut sweep = SweepGrid::default();
    let deg = |key: &str| -> Result<Option<f64>, ConfigError> {
        Ok(doc.quantity(key, ANGLE_UNITS)?.map(f64::to_degrees))
    };
    if let Some(v) = deg("sweep.alpha_min")? {
        sweep.alpha_min_deg = v;
    }
    if let Some(v) = deg("sweep.alpha_max")? {
        sweep.alpha_max_deg = v;
    }
    if let Some(v) = deg("sweep.alpha_step")? {
        sweep.alpha_step_deg = v;
    }
    if !(sweep.alpha_step_deg > 0.0) {
        return Err(doc.value_err("sweep.alpha_step", "step must be positive"));
    }

    Ok(ScenarioConfig {
        scenario,
        z0_ohm: z0,
        bounds,
        varactor,
        ris: ris_source(&doc)?,
        patterns: pattern_source(&doc)?,
        optimizer,
        sweep,
        out: doc.text("out").map(PathBuf::from),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
freq = 3.55 GHz
range = 2 m
alpha = 0 deg
beta = 30 deg
gain_tx_db = 11 dB
gain_rx_db = 11 dB
bounds.c_min = 0.23 pF
bounds.c_max = 2.1 pF
";

    fn with(extra: &str) -> String {
        format!("{BASE}{extra}")
    }

    #[test]
    fn seven_by_two_grid() {
        let cfg = load_scenario(&with(
            "grid.rows = 2\ngrid.cols = 7\ngrid.pitch_x = 40 mm\ngrid.pitch_z = 40 mm\n",
        ))
        .unwrap();
        let s = &cfg.scenario;
        assert_eq!(s.elements().len(), 14);
        let xs: Vec<f64> = s.elements().iter().map(|e| e.x_m).collect();
        let span = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
        assert!((span - 0.240).abs() < 1e-12);
        assert_eq!(s.freq_hz(), 3.55e9);
        assert_eq!(s.range_m(), 2.0);
        assert_eq!(s.alpha_rad(), 0.0);
        assert!((s.beta_rad() - 30f64.to_radians()).abs() < 1e-15);
        assert!((s.gain_tx() - 12.589254117941675).abs() < 1e-12);
        assert_eq!(cfg.bounds, LoadBounds::new(0.23e-12, 2.1e-12).unwrap());
        assert_eq!(cfg.z0_ohm, 50.0);
        assert!(cfg.ris.is_none());
    }

    #[test]
    fn explicit_elements() {
        let cfg = load_scenario(&with("element = 1 0 0 mm\nelement = 2 40 0 mm # right\n")).unwrap();
        assert_eq!(cfg.scenario.elements()[1], ElementGeometry::new(2, 0.04, 0.0));
    }

    #[test]
    fn missing_layout_is_rejected() {
        assert_eq!(load_scenario(BASE), Err(ConfigError::NoElements));
        assert_eq!(
            load_scenario(&with("grid.rows = 0\ngrid.cols = 7\ngrid.pitch_x = 40 mm\n")),
            Err(ConfigError::NoElements)
        );
    }

    #[test]
    fn missing_keys_and_units() {
        let no_freq = with("element = 1 0 0 m\n").replace("freq = 3.55 GHz\n", "");
        assert_eq!(load_scenario(&no_freq), Err(ConfigError::Missing("freq")));
        let no_unit = with("element = 1 0 0 m\n").replace("range = 2 m", "range = 2");
        assert!(matches!(
            load_scenario(&no_unit),
            Err(ConfigError::MissingUnit { line: 2, .. })
        ));
        let bad_unit = with("element = 1 0 0 m\n").replace("3.55 GHz", "3.55 furlongs");
        assert!(matches!(load_scenario(&bad_unit), Err(ConfigError::BadUnit { .. })));
        assert!(matches!(
            load_scenario(&with("element = 1 0 0\n")),
            Err(ConfigError::MissingUnit { .. })
        ));
    }

    #[test]
    fn inverted_bounds() {
        let t = with("element = 1 0 0 m\n").replace("2.1 pF", "0.1 pF");
        assert!(matches!(load_scenario(&t), Err(ConfigError::Load(LoadError::Bounds { .. }))));
    }

    #[test]
    fn typos_and_duplicates() {
        assert!(matches!(
            load_scenario(&with("element = 1 0 0 m\nbound.c_min = 1 pF\n")),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            load_scenario(&with("element = 1 0 0 m\nrange = 3 m\n")),
            Err(ConfigError::Duplicate { .. })
        ));
    }

    #[test]
    fn sources_and_options() {
        let cfg = load_scenario(&with(
            "element = 1 0 0 m\n\
             ris.model = exp_decay\nris.s_mm = 0.3 0\nris.c0 = 0.2\nris.rolloff = 50 mm\n\
             patterns.model = cosine\npatterns.peak_gain = 5 dBi\npatterns.exponent = 1.5\n\
             optimizer.seed = 7\noptimizer.polish = off\nsweep.alpha_step = 0.5 deg\nout = results\n",
        ))
        .unwrap();
        assert_eq!(
            cfg.ris,
            Some(RisSource::Synthetic(CouplingModel::ExpDecay {
                s_mm: Complex64::new(0.3, 0.0),
                c0: 0.2,
                rolloff_m: 0.05,
            }))
        );
        assert!(matches!(cfg.patterns, Some(PatternSource::Cosine { exponent, .. }) if exponent == 1.5));
        assert_eq!(cfg.optimizer.seed, 7);
        assert!(!cfg.optimizer.polish);
        assert_eq!(cfg.sweep.alpha_step_deg, 0.5);
        assert_eq!(cfg.out, Some(PathBuf::from("results")));

        let ts = load_scenario(&with("element = 1 0 0 m\nris.file = ris.s14p\nris.freq_tol = 1 MHz\n")).unwrap();
        assert_eq!(
            ts.ris,
            Some(RisSource::Touchstone {
                path: PathBuf::from("ris.s14p"),
                freq_tol_hz: 1e6
            })
        );
    }
}
