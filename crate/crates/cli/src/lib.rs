//! Support code for the `b2tsp` command: benchmark reports and SVG output.

pub mod report;
pub mod svg;
