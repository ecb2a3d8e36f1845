//! Combinatorial invariants of structurally stable vector fields on closed
//! oriented surfaces, and the local cobordism moves that relate them.

pub mod census;
pub mod cli;
pub mod cobordism;
pub mod dot;
pub mod field_graph;
pub mod io;
pub mod periodic;
pub mod surface_map;
pub mod torus_mcg;
