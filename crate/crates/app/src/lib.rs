//! The `inquest` command line and HTTP chat service, built on the
//! `inquest` library.

pub mod agent;
pub mod cli;
pub mod service;
