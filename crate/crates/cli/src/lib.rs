//! Library surface of the CLI crate: the config-file format, exposed so
//! integration tests can exercise parse/print round-trips directly.

pub mod config;
