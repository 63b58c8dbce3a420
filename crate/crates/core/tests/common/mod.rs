#![allow(dead_code)]

pub mod micro;
pub mod random_lp;
pub mod reference_simplex;
