//! A resolved link: scenario, RIS matrix, patterns and load model together,
//! with the three end-to-end operations (assemble, optimize, sweep).

use crate::brcs::{flat_reflector_reference, sweep_rx_angle, BrcsCurve, BrcsError};
use crate::farfield::{assemble_full_matrix, patterns_from_diagonal, synth_ris_matrix, FarFieldError};
use crate::geometry::Scenario;
use crate::ingest::config::{PatternSource, RisSource, ScenarioConfig};
use crate::ingest::patterns::{parse_pattern_table, PatternTableError};
use crate::ingest::touchstone::{matrix_at_frequency, read_touchstone, TouchstoneError};
use crate::network::ScatterMatrix;
use crate::optimize::{optimize, phase_gradient_seed, OptimizeError, OptimizeOptions, OptimizeResult};
use crate::pattern::ElementPattern;
use crate::varactor::{LoadBounds, LoadVector, VaractorModel};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("config has no RIS source (set ris.file or ris.model)")]
    NoRisSource,
    #[error("config has no pattern source (set patterns.file or patterns.model)")]
    NoPatternSource,
    #[error("{path}: {source}")]
    Touchstone {
        path: PathBuf,
        #[source]
        source: TouchstoneError,
    },
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    PatternTable {
        path: PathBuf,
        #[source]
        source: PatternTableError,
    },
    #[error("{path}: no pattern for element {index}")]
    MissingPattern { path: PathBuf, index: usize },
    #[error("{path}: {ports} ports but the layout has {elements} elements")]
    PortMismatch {
        path: PathBuf,
        ports: usize,
        elements: usize,
    },
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    pub scenario: Scenario,
    pub ris: ScatterMatrix,
    /// Aligned with `scenario.elements()`.
    pub patterns: Vec<ElementPattern>,
    pub bounds: LoadBounds,
    pub varactor: VaractorModel,
}

impl LinkModel {
    /// Resolve the RIS and pattern sources of `cfg`; relative file paths are
    /// taken from `base_dir`.
    pub fn from_config(cfg: &ScenarioConfig, base_dir: &Path) -> Result<Self, LinkError> {
        let scn = &cfg.scenario;
        let ris = match cfg.ris.as_ref().ok_or(LinkError::NoRisSource)? {
            RisSource::Synthetic(model) => synth_ris_matrix(scn.elements(), scn.freq_hz(), cfg.z0_ohm, *model)?,
            RisSource::Touchstone { path, freq_tol_hz } => {
                let path = base_dir.join(path);
                let wrap = |source| LinkError::Touchstone {
                    path: path.clone(),
                    source,
                };
                let doc = read_touchstone(&path).map_err(wrap)?;
                if doc.n_ports != scn.elements().len() {
                    return Err(LinkError::PortMismatch {
                        path,
                        ports: doc.n_ports,
                        elements: scn.elements().len(),
                    });
                }
                matrix_at_frequency(&doc, scn.freq_hz(), *freq_tol_hz).map_err(wrap)?
            }
        };
        let patterns = match cfg.patterns.as_ref().ok_or(LinkError::NoPatternSource)? {
            PatternSource::Cosine {
                peak_gain_lin,
                exponent,
                step_rad,
            } => patterns_from_diagonal(&ris, scn.elements(), |m, s| {
                ElementPattern::cosine(m, *peak_gain_lin, *exponent, *step_rad, s)
            })?,
            PatternSource::Isotropic { gain_lin } => {
                patterns_from_diagonal(&ris, scn.elements(), |m, s| ElementPattern::isotropic(m, *gain_lin, s))?
            }
            PatternSource::Table(p) => {
                let path = base_dir.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| LinkError::Io {
                    path: path.clone(),
                    msg: e.to_string(),
                })?;
                let table = parse_pattern_table(&text).map_err(|source| LinkError::PatternTable {
                    path: path.clone(),
                    source,
                })?;
                scn.elements()
                    .iter()
                    .map(|el| {
                        table
                            .iter()
                            .find(|p| p.index_m() == el.index_m)
                            .cloned()
                            .ok_or(LinkError::MissingPattern {
                                path: path.clone(),
                                index: el.index_m,
                            })
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(Self {
            scenario: scn.clone(),
            ris,
            patterns,
            bounds: cfg.bounds,
            varactor: cfg.varactor,
        })
    }

    pub fn full_matrix(&self) -> Result<ScatterMatrix, FarFieldError> {
        assemble_full_matrix(&self.scenario, &self.ris, &self.patterns)
    }

    /// Optimize for the scenario's Rx angle. Without an explicit initial
    /// point the first start is the geometric phase-gradient seed.
    pub fn optimize(&self, opts: &OptimizeOptions) -> Result<OptimizeResult, LinkError> {
        let full = self.full_matrix()?;
        let mut opts = opts.clone();
        if opts.initial.is_none() {
            opts.initial = Some(phase_gradient_seed(
                &self.scenario,
                &self.bounds,
                &self.varactor,
                self.ris.z0_ohm(),
            ));
        }
        Ok(optimize(&full, &self.bounds, &self.varactor, &opts)?)
    }

    pub fn sweep(&self, caps: &LoadVector, alphas_rad: &[f64]) -> Result<BrcsCurve, BrcsError> {
        sweep_rx_angle(&self.scenario, &self.ris, &self.patterns, caps, &self.varactor, alphas_rad)
    }

    /// Flat-plate reference of the board size, if the scenario has one.
    pub fn reflector(&self, alphas_rad: &[f64]) -> Option<Result<BrcsCurve, BrcsError>> {
        let b = self.scenario.board()?;
        Some(flat_reflector_reference(
            b.width_m,
            b.height_m,
            self.scenario.wavelength_m(),
            self.scenario.beta_rad(),
            alphas_rad,
        ))
    }
}
