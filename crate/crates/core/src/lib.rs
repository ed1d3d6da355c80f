//! Tree-checking games for dual interpolation problems.

pub mod parse;
pub mod problem;
pub mod term;
pub mod tree;
pub mod types;
pub mod game;
pub mod catalog;
pub mod oracle;
pub mod tiles;
pub mod partition;
pub mod tiletree;
pub mod transforms;
pub mod solver;
pub mod fuzz;
