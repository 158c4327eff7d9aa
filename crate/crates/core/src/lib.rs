//! Exact homology computations around the pre-Lie operad: decorated rooted
//! trees, explicit operads, deformation complexes of operad maps, and the
//! twisted operad of pre-Lie algebras.

pub mod exactla;
pub mod treekit;
pub mod operads;
pub mod defcx;
pub mod twist;
pub mod cli;
