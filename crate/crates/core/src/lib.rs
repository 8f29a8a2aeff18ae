//! Schützenberger automata of amalgamated free products of finite inverse
//! semigroups, their host structure, and presentations of maximal subgroups
//! obtained from graphs of groups.

pub mod amalgam;
pub mod bassserre;
pub mod cli;
pub mod corpus;
pub mod document;
pub mod error;
pub mod fis;
pub mod graph;
pub mod group;
pub mod host;
pub mod opuntoid;
pub mod stephen;
pub mod word;

pub use error::{Error, Result};
