//! Exact construction and verification of symmetry breaking operators.
//!
//! Two explicit branching settings are covered:
//!
//! * `SL(2)` tensor products, where symmetry breaking operators are Rankin–Cohen
//!   bidifferential operators ([`rankin_cohen`], built on the model in [`sl2`]);
//! * the conformal pair `O(n+1,1) ⊃ O(n,1)`, with the differential operators of Juhl
//!   ([`juhl`], built on [`gegenbauer`] and the model in [`conformal`]) and the
//!   integral operator `A_{λ,ν}` evaluated numerically ([`kernel`]).
//!
//! [`tables`] encodes the classification of symmetric pairs with finite and with
//! uniformly bounded multiplicities.
//!
//! All symbolic work is exact over the rationals ([`rational`], [`poly`], [`linalg`]).

pub mod conformal;
pub mod error;
pub mod gegenbauer;
pub mod juhl;
pub mod kernel;
pub mod linalg;
pub mod poly;
pub mod rankin_cohen;
pub mod rational;
pub mod report;
pub mod sl2;
pub mod tables;

pub use error::{Error, Result};
pub use poly::{poch, ParamPoly, Poly, Ring};
pub use rational::Rational;
pub use report::Report;
