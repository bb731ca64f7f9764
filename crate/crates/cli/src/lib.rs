//! Scenario runner for the generalized-function engine: expression syntax,
//! TOML scenarios, suites and CSV reports.

pub mod config;
pub mod demo;
pub mod parse;
pub mod run;
pub mod sweep;

pub use config::{ScenarioConfig, Suite};
pub use parse::parse_expression;
pub use run::{run, RunReport};
