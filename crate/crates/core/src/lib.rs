// Tensor formulas read best with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod classify2d;
pub mod cli;
pub mod corpus;
pub mod doc;
pub mod jetgeom;
pub mod liealgebra;
pub mod linalg;
pub mod multspace;
pub mod symexpr;
pub mod varlagrange;
