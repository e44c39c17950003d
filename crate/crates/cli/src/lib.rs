//! File formats, the command line and parallel experiment drivers on top of
//! `robustchoice-core`.

pub mod cli;
pub mod crossval;
pub mod format;
pub mod io;
pub mod methods;
pub mod pool;
pub mod study;
