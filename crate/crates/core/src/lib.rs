//! Invariant subspaces of `L^2(X, mu)` under a free action of a finite abelian
//! group `T`, and their extra invariance under an intermediate subgroup.
//!
//! Given a chain `Gamma <= Delta <= T` and a free action of `T` on a finite
//! weighted point set, the crate provides the Zak transforms over `Gamma` and
//! `T`, principal and finitely generated `Gamma`-invariant spaces, the mask
//! spaces `U_xi` that decide `Delta`-invariance, and best approximation of data
//! by invariant spaces of bounded length.

pub mod action;
pub mod approx;
pub mod cli;
pub mod config;
mod error;
pub mod extra;
pub mod group;
pub mod io;
mod linalg;
pub mod scenarios;
pub mod setting;
pub mod subspace;
pub mod zak;

pub use error::{Error, Result};
pub use setting::{ChainMember, Setting, DEFAULT_TOL};

pub type Vector = nalgebra::DVector<num_complex::Complex64>;
