//! Executable completeness theory for abstract domains: complete shells and
//! cores on finite lattices, and trace-versus-state completeness of
//! universal model checking on finite transition systems.

pub mod cli;
pub mod completeness;
pub mod error;
pub mod fixtures;
pub mod kripke;
pub mod lattice;
pub mod mucalc;
pub mod report;
pub mod shells;
pub mod suite;
pub mod traces;
