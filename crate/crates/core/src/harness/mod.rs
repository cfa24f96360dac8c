//! Experiment runner shared by the command-line tool and the test suites.

pub mod config;
pub mod identities;
pub mod report;
pub mod runners;

pub use runners::run;
