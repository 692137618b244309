//! Scenario ingestion, bundled fixtures, and report serialization.

pub mod report;
pub mod scenario;

pub use report::{
    display_number, parse_csv, parse_structured, render_csv, render_report, render_structured,
    render_text, write_report, Column, CsvCell, Destination, ReportDocument, ReportError,
    ReportFormat, ReportRow, ReportTable,
};
pub use scenario::{
    load_scenario, parse_scenario, FixtureConstants, Scenario, ScenarioError, PUBLISHED_FIXTURE,
    SELF_CONSISTENT_FIXTURE,
};
