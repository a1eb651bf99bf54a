//! Library half of the command-line tool: input loading and the report
//! document schema.  Kept as a library so consumers (and the
//! integration tests) can re-load emitted reports into typed form.

pub mod input;
pub mod report;
