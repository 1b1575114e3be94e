//! Neighbourhood sizes for every vertex of an undirected graph.
//!
//! The [`graph`] module holds the graph type and the truncated-BFS reference
//! backend that works for every radius. For radius 2 there are two
//! parameterized backends: [`vc`] runs in time exponential in half the vertex
//! cover size, and [`td`] in time exponential in the width of a supplied tree
//! decomposition. [`seth`] turns CNF formulas into instances whose closed
//! 2-neighbourhood sizes decide satisfiability, which doubles as an
//! end-to-end check of all backends.

pub mod graph;
pub mod runner;
pub mod seth;
pub mod subset;
pub mod td;
pub mod vc;
