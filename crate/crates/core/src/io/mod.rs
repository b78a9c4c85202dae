//! Document format, reports and command dispatch.

mod commands;
mod document;
mod report;

pub use commands::{run_command, Command, RunOptions};
pub use document::{
    parse_document, serialize_document, AlgebraDocument, AlgebraModel, BracketEntry, MapEntry,
    ParseError, Terms,
};
pub use report::{CheckReport, Report, Verdict, Witness};
