//! Steiner tree approximation as an iterated primal-dual method over a partition LP,
//! with exact rational arithmetic throughout.

pub mod components;
pub mod error;
pub mod graph;
pub mod instances;
pub mod lp;
pub mod mst_dual;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod report;
pub mod simplex;
pub mod solver;
pub mod stp;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Edge, Instance};
pub use rational::Cost;
