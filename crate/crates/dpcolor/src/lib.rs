//! Constructive DP-colouring machinery for 2-connected K_{2,4}-minor-free
//! graphs: covers with weighted link bundles, two-terminal outerplanar
//! gadgets and their codings, the structural decomposition, and a guaranteed
//! colouring solver, all validated against brute-force oracles at desk
//! scale.

pub mod atlas;
pub mod coding;
pub mod cover;
pub mod graph;
pub mod io;
pub mod iso;
pub mod minor;
pub mod oracle;
pub mod outerplanar;
pub mod solver;
pub mod structure;
pub mod suite;
