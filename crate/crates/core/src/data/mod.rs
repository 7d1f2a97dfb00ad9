//! Synthetic generators, label noise, CSV input and results documents.

mod csv_io;
mod generate;
mod results;

pub use csv_io::{load_csv, read_csv, save_csv, write_csv};
pub use generate::{apply_rcn, generate, planted_normal, Cluster, GenKind, GenSpec, GeneratorSource};
pub use results::{load_results, save_results, ResultsDocument, TradeoffRow};
