//! Library side of the `sunchain` command: config parsing, the verification
//! pipelines and the built-in self-test.

pub mod config;
pub mod run;
pub mod selftest;
