pub mod config;
pub mod io;
pub mod plot;
pub mod run;
