//! Fungal sandpile automaton engine and a circuit-to-sandpile compiler.
//!
//! Cells are addressed as `(x, y)` with `x` growing to the right and `y`
//! growing downwards.

pub mod circuit;
pub mod gadgets;
pub mod grid;
pub mod lattice;
pub mod scheme;

pub use grid::{Cell, Configuration};
pub use scheme::{parse_scheme, Rule, UpdateScheme};
