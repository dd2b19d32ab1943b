//! File formats, JSON reports, SVG/CSV rendering and the `ifs-spectral`
//! command line, on top of `ifs-spectral-core`.

pub mod cli;
pub mod format;
pub mod reference;
pub mod render;
pub mod report;
