//! The dense Clifford algebra kernel.

pub mod blade;
pub mod matrix_rep;
pub mod multivector;
pub mod parse;
pub mod sig;
