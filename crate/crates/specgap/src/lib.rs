//! File formats, JSON reports and the command-line front-end for
//! [`specgap_core`].

pub mod cli;
pub mod io;
pub mod parallel;
pub mod report;
