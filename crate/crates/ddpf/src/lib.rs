//! Scenario files, CSV output, parameter sweeps and the `ddpf` command line
//! on top of `ddpf-core`.

pub mod cli;
pub mod harness;
pub mod mapfile;
pub mod pgm;
pub mod records;
