//! Configuration, presets and CSV output behind the `opdyn` binary.

pub mod commands;
pub mod config;
pub mod emit;
pub mod presets;

pub use config::{parse_config, ConfigDocument, ConfigError};
pub use presets::{CommandKind, PresetName};
