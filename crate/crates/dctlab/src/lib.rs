//! File formats, parallel derivation and the command-line front end for
//! `dctlab-core`.

pub mod cli;
pub mod corpus;
pub mod derive;
pub mod fmt;
pub mod io;
pub mod matrix_text;
pub mod pgm;
