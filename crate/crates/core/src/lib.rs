//! Dihedral (CM) modular forms attached to Hecke characters of imaginary
//! quadratic fields, their symmetric power L-functions, and numerical
//! certification of Shimura period relations.

pub mod arith;
pub mod cyclo;
pub mod cmform;
pub mod dirichlet;
pub mod hecke;
pub mod lvalue;
pub mod mp;
pub mod periods;
pub mod qfield;
pub mod recognize;
pub mod symdecomp;

mod error;

pub use error::{Error, Result};
