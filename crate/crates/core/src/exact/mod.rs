//! Exact arithmetic: rationals, cyclotomic integers, character tables and Bernoulli numbers.

pub mod bernoulli;
pub mod chartable;
pub mod cyclo;

pub use bernoulli::{bernoulli, bernoulli_numbers, bernoulli_poly, gen_bernoulli};
pub use chartable::CharTable;
pub use cyclo::{cyclotomic_poly, CycloInt, CycloRat, Cyclotomic};

pub type Rational = num::BigRational;
