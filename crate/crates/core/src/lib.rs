pub mod cli;
pub mod cluster;
pub mod formulation;
pub mod io;
pub mod lp;
pub mod study;
pub mod synthetic;
pub mod system;
pub mod tree;
pub mod validation;
