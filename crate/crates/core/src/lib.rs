pub mod alpha;
pub mod ample;
pub mod builder;
pub mod cli;
pub mod lattice;
pub mod lct;
