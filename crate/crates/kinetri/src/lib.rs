//! Scenario files, event logs, verification drivers and the command line
//! for the kinetic pseudo-triangulation in `kinetri-core`.

pub mod cli;
pub mod decimal;
pub mod eventlog;
pub mod runner;
pub mod scale;
pub mod scenario_file;
pub mod verify;

