//! Command implementations behind the `confmap` binary.

pub mod batch;
pub mod error;
pub mod run;
pub mod settings;
pub mod table;

pub use error::CliError;
pub use settings::Settings;
pub use table::{parse_tsv, write_tsv, StatsRecord, Status};
