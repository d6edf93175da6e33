pub mod arith;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod matrix;
pub mod qseries;
pub mod repnum;
pub mod verify;
