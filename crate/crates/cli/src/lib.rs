//! Library surface of the command-line front end: configuration parsing,
//! scenario construction, file formats and the built-in self-checks. The
//! `wbeuler` binary is a thin wrapper over these modules.

pub mod atlas;
pub mod check;
pub mod config;
pub mod output;
pub mod scenario;
