//! Scatter-matrix model of an RIS-aided link.
//!
//! A single simulated RIS-only scatter matrix plus per-element gain
//! patterns is extended to the full Tx + RIS + Rx network for any antenna
//! placement in the far field. The varactor loads are then optimized for
//! maximum Tx to Rx power transfer, and the loaded surface is characterized
//! by its bistatic radar cross section.
//!
//! ```
//! use rislink::prelude::*;
//!
//! let grid = GridLayout { rows: 1, cols: 2, pitch_x_m: 0.04, pitch_z_m: 0.0, offset_x_m: 0.0, offset_z_m: 0.0 };
//! let scn = Scenario::new(2.0, 0.0, 30f64.to_radians(), 3.55e9, 12.6, 12.6, grid.elements().unwrap()).unwrap();
//! let s_mm = Complex64::new(0.1, 0.0);
//! let ris = synth_ris_matrix(scn.elements(), 3.55e9, 50.0, CouplingModel::Isolated { s_mm }).unwrap();
//! let pats = patterns_from_diagonal(&ris, scn.elements(), |m, s| ElementPattern::isotropic(m, 3.0, s)).unwrap();
//! let full = assemble_full_matrix(&scn, &ris, &pats).unwrap();
//! assert_eq!(full.dim(), 4);
//! let bounds = LoadBounds::smv2201();
//! let res = optimize(&full, &bounds, &VaractorModel::default(), &OptimizeOptions::default()).unwrap();
//! assert!(res.objective > 0.0);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brcs;
pub mod farfield;
pub mod geometry;
pub mod ingest;
pub mod link;
pub mod network;
pub mod optimize;
pub mod pattern;
pub mod varactor;

pub use num_complex::Complex64;

use thiserror::Error;

/// Any error the library can produce.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Network(#[from] network::NetworkError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Pattern(#[from] pattern::PatternError),
    #[error(transparent)]
    FarField(#[from] farfield::FarFieldError),
    #[error(transparent)]
    Load(#[from] varactor::LoadError),
    #[error(transparent)]
    Optimize(#[from] optimize::OptimizeError),
    #[error(transparent)]
    Brcs(#[from] brcs::BrcsError),
    #[error(transparent)]
    Touchstone(#[from] ingest::TouchstoneError),
    #[error(transparent)]
    PatternTable(#[from] ingest::PatternTableError),
    #[error(transparent)]
    Config(#[from] ingest::ConfigError),
    #[error(transparent)]
    Link(#[from] link::LinkError),
}

pub mod prelude {
    pub use crate::brcs::{
        alpha_grid_deg, brcs_from_coupling, export_csv, flat_reflector_reference, flat_reflector_sigma,
        sweep_rx_angle, to_dbsm, BrcsCurve,
    };
    pub use crate::farfield::{
        assemble_full_matrix, coupling_coefficient, patterns_from_diagonal, synth_ris_matrix, CouplingModel,
    };
    pub use crate::geometry::{BoardSize, ElementGeometry, GridLayout, Scenario, Side};
    pub use crate::link::LinkModel;
    pub use crate::network::{
        check_passivity, check_reciprocity, power_transfer, reduce_loaded, PortRole, ReflectionVector,
        ScatterMatrix,
    };
    pub use crate::optimize::{objective, optimize, phase_gradient_seed, OptimizeOptions, OptimizeResult};
    pub use crate::pattern::ElementPattern;
    pub use crate::varactor::{cap_to_gamma, LoadBounds, LoadVector, VaractorModel};
    pub use crate::Complex64;
}
