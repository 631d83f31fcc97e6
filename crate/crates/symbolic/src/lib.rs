//! Exact polynomial algebra over the rationals.
//!
//! [`RationalPoly`] values live in a [`Ring`] of named variables. On top of
//! them sit a plain-ASCII parser and printer, Buchberger's algorithm with
//! normal-form reduction, symbolic determinants and minors of polynomial
//! matrices, and ideal-containment checks. [`catalog`] builds structured
//! rigidity matrices from graphs and bundles the slingshot and adjacent-minor
//! example ideals.

pub mod catalog;
pub mod containment;
pub mod error;
pub mod groebner;
pub mod matrix;
pub mod order;
pub mod parse;
pub mod ring;

pub use containment::{verify_containment, Containment, VerificationRecord};
pub use error::{Error, Result};
pub use groebner::{buchberger, normal_form_reduce, s_polynomial, GroebnerBasis};
pub use matrix::{determinant, symbolic_minors, Minor, MinorSet, PolyMatrix};
pub use order::MonomialOrder;
pub use parse::{parse_poly, parse_polys};
pub use ring::{Monomial, RationalPoly, Ring};
