//! Readers for external data: Touchstone files, pattern tables and the
//! scenario configuration.

pub mod config;
pub mod patterns;
pub mod touchstone;

pub use config::{load_scenario, ConfigError, PatternSource, RisSource, ScenarioConfig, SweepGrid};
pub use patterns::{parse_pattern_table, write_pattern_table, PatternTableError};
pub use touchstone::{
    document_from_matrix, matrix_at_frequency, parse_touchstone, ports_from_extension, read_touchstone,
    write_touchstone, DataFormat, FreqUnit, FrequencyPoint, OptionLine, TouchstoneDocument, TouchstoneError,
};
