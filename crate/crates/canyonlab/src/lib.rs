//! Exact computation of bi-Lipschitz invariants of plane curve germs
//! f(x,y): polar arcs, gradient canyons, relative and augmented Newton
//! polygons, polar multiplicities and second-level (H, delta) invariants,
//! bundled into a comparable identity card.

pub mod arith;
pub mod poly;
pub mod polygon;
pub mod series;
pub mod solver;
pub mod tree;
pub mod canyon;
pub mod error;
pub mod invariants;
pub mod render;

pub use error::{Error, Result};
