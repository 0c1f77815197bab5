//! Files, experiments and the command-line driver around [`fof_core`].

pub mod cli;
pub mod docs;
pub mod experiments;
pub mod io;

pub use fof_core;
