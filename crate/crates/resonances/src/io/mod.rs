//! Tables, records, plots, result cache and configuration files.

mod cache;
mod config;
mod csv;
mod record;
mod svg;

pub use cache::{key_hash, Cache, CACHE_ENV};
pub use config::{pick, CountSection, FunnelSection, LatticeSection, RunConfig, SdsSection, SymbolsSection};
pub use csv::{fmt_f64, read_table, spectrum_rows, write_table, Row, Table, TableKind};
pub use record::{RecordRow, SpectrumRecord, SCHEMA_VERSION};
pub use svg::{emit_svg, PlotData, Style};
